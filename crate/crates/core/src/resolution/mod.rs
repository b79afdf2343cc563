//! Singular locus of `Y`, the three blow-ups `Y1 -> Y`, `Y0 -> Y1`, `X -> Y0`
//! and the point-count ledger relating them.
//!
//! Centers, in order: the isolated nodes over `D` (pairwise meets of the
//! `l_i + h` lines), the curve `W` over `[0:0:1]`, and the strict transform
//! `Z~` of `Z = {x y = 0, x0 = x1 = x4 = 0, x2^2 = a x3^2}`.

pub mod census;
pub mod jet;
pub mod ledger;
pub mod normal_forms;
pub mod qmap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fibration::{Chart, FibrationError, ModelExt, ModelSpec, Stratum};
use crate::gf::{Elem, GfError};
use crate::proj;
use crate::quadform::{QuadError, QuadForm};
use jet::LocalChart;

pub use census::{
    expected_singular_set, singular_census, singular_census_brute, singular_census_brute_report, CensusReport, SingularPoint,
};
pub use ledger::{count_resolved, ledger_polynomials, LedgerPolynomials, ResolvedCounts};
pub use normal_forms::{chart_census, ChartCensus, NormalForm};
pub use qmap::{qmap_certify, QMapCertificate};

#[derive(Debug, Error)]
pub enum ResolutionError {
    #[error("{kind:?} center at {base:?}/{fibre:?}: {what}")]
    NotCenter { kind: CenterKind, base: [Elem; 3], fibre: [Elem; 5], what: String },
    #[error(transparent)]
    Fibration(#[from] FibrationError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CenterKind {
    Node,
    W,
    Z,
}

/// A point of a blow-up center, with a fibre point in `P^4` and, for `Z~`,
/// the component: `0, 1` lie over `x = 0`, `2, 3` over `y = 0`, odd index for
/// the root `-s` of `s^2 = a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CenterPoint {
    pub kind: CenterKind,
    pub base: [Elem; 3],
    pub fibre: [Elem; 5],
    pub component: Option<u8>,
}

/// Normal-cone quadric of a center at one of its points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalFibre {
    pub center: CenterPoint,
    /// Form on the normal coordinates; its zero set in `P(N)` is the fibre.
    pub form: QuadForm,
    pub rank: usize,
    pub delta: i8,
}

/// Local chart, center coordinates and tangent directions of a center point.
pub fn local_data(model: &ModelExt, cp: &CenterPoint) -> (LocalChart, [Elem; 6], Vec<usize>) {
    let f = &model.field;
    let z = Elem::ZERO;
    let [bx, by, bz] = cp.base;
    match cp.kind {
        CenterKind::Node => {
            let x = f.div(bx, by).expect("node off y = 0");
            let zz = f.div(bz, by).expect("node off y = 0");
            (LocalChart::Y { chart: Chart::Uy, one: 4 }, [x, zz, z, z, z, z], vec![])
        }
        CenterKind::W => {
            let [_, _, c2, c3, _] = cp.fibre;
            if c3.is_zero() {
                (LocalChart::Y { chart: Chart::Uz, one: 2 }, [z; 6], vec![4])
            } else {
                let w = f.div(c2, c3).expect("nonzero");
                (LocalChart::Y { chart: Chart::Uz, one: 3 }, [z, z, z, z, w, z], vec![4])
            }
        }
        CenterKind::Z => {
            let s = f.div(cp.fibre[2], cp.fibre[3]).expect("Z points have x3 != 0");
            let comp = cp.component.expect("Z points carry a component");
            if bx.is_zero() && by.is_zero() {
                let chart = if comp < 2 { LocalChart::WBlowY } else { LocalChart::WBlowX };
                (chart, [z, z, s, z, z, z], vec![0])
            } else if bx.is_zero() {
                let t = f.div(bz, by).expect("y != 0");
                (LocalChart::Y { chart: Chart::Uy, one: 3 }, [z, t, z, z, s, z], vec![1])
            } else {
                let t = f.div(bz, bx).expect("x != 0");
                (LocalChart::Y { chart: Chart::Ux, one: 3 }, [z, t, z, z, s, z], vec![1])
            }
        }
    }
}

/// Second-order part of the local equation along the normal directions.
///
/// Fails unless the equation and its gradient vanish at the point and the
/// Hessian has no tangent component, i.e. the hypersurface has multiplicity
/// two along the center to second order.
pub fn exceptional_form(model: &ModelExt, cp: &CenterPoint) -> Result<ExceptionalFibre, ResolutionError> {
    let f = &model.field;
    let (chart, c, tangent) = local_data(model, cp);
    let bad = |what: String| ResolutionError::NotCenter { kind: cp.kind, base: cp.base, fibre: cp.fibre, what };
    if !chart.value(model, &c).is_zero() {
        return Err(bad("point is not on the hypersurface".into()));
    }
    if chart.gradient(model, &c).iter().any(|g| !g.is_zero()) {
        return Err(bad("nonzero gradient".into()));
    }
    let h = chart.hessian(model, &c);
    for &t in &tangent {
        if h[t].iter().any(|v| !v.is_zero()) {
            return Err(bad(format!("Hessian has a component along tangent direction {t}")));
        }
    }
    let normal: Vec<usize> = (0..6).filter(|i| !tangent.contains(i)).collect();
    let n = normal.len();
    let mut form = QuadForm::zero(n);
    for (a, &i) in normal.iter().enumerate() {
        for (b, &j) in normal.iter().enumerate() {
            form.matrix[a * n + b] = h[i][j];
        }
    }
    if form.is_zero() {
        return Err(bad("second-order part vanishes".into()));
    }
    let inv = form.invariants(f);
    Ok(ExceptionalFibre { center: cp.clone(), form, rank: inv.rank, delta: inv.delta })
}

/// Node centers: the `F_q`-rational meets of the `l_i + h` lines off `x y = 0`,
/// as points of `P^2(F_{q^m})`.
pub fn node_centers(ms: &ModelSpec, model: &ModelExt) -> Vec<CenterPoint> {
    let base = ms.over(1).expect("m = 1");
    ms.special_points()
        .into_iter()
        .filter(|sp| base.stratum(&sp.point) == Stratum::D)
        .map(|sp| {
            let p = proj::normalized(&model.field, sp.point.map(|c| model.emb.map(c))).expect("nonzero");
            CenterPoint { kind: CenterKind::Node, base: p, fibre: vertex(), component: None }
        })
        .collect()
}

pub(crate) fn vertex() -> [Elem; 5] {
    [Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ONE]
}

pub(crate) fn origin() -> [Elem; 3] {
    [Elem::ZERO, Elem::ZERO, Elem::ONE]
}

/// `W = {[0:0:1]} x {[0:0:x2:x3:0]}` over `F_{q^m}`.
pub fn w_centers(model: &ModelExt) -> Vec<CenterPoint> {
    proj::points::<2>(&model.field)
        .map(|[c2, c3]| CenterPoint {
            kind: CenterKind::W,
            base: origin(),
            fibre: [Elem::ZERO, Elem::ZERO, c2, c3, Elem::ZERO],
            component: None,
        })
        .collect()
}

/// Roots of `s^2 = a` in `F_{q^m}`, smaller code first.
pub fn sqrt_a(model: &ModelExt) -> Option<[Elem; 2]> {
    let f = &model.field;
    f.sqrt(model.a).map(|s| [s, f.neg(s)])
}

/// Points of the four components of `Z~` over `F_{q^m}`; empty unless `a` is a
/// square there. The point over `[0:0:1]` is the one on the `W` blow-up.
pub fn z_centers(model: &ModelExt) -> Vec<CenterPoint> {
    let Some(roots) = sqrt_a(model) else { return Vec::new() };
    let mut out = Vec::new();
    for (line, comp0) in [(0usize, 0u8), (1, 2)] {
        for [u, v] in proj::points::<2>(&model.field) {
            // line 0: [0:u:v], line 1: [u:0:v]
            let base = if line == 0 { [Elem::ZERO, u, v] } else { [u, Elem::ZERO, v] };
            for (k, &s) in roots.iter().enumerate() {
                out.push(CenterPoint {
                    kind: CenterKind::Z,
                    base,
                    fibre: [Elem::ZERO, Elem::ZERO, s, Elem::ONE, Elem::ZERO],
                    component: Some(comp0 + k as u8),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Witness;

    pub(crate) fn witness25() -> ModelSpec {
        let w: Witness = "5^2; 2; 1,2,6; 10,2,14".parse().unwrap();
        let f = w.field().unwrap();
        ModelSpec::new(&f, f.smallest_nonsquare(), w.l1, w.l2).unwrap()
    }

    #[test]
    fn center_ranks_over_f25() {
        let ms = witness25();
        let model = ms.over(1).unwrap();
        let nodes = node_centers(&ms, &model);
        assert_eq!(nodes.len(), 104);
        for cp in &nodes {
            assert_eq!(exceptional_form(&model, cp).unwrap().rank, 6);
        }
        // a is not a square in F_25, so W has no special points and Z is empty
        for cp in w_centers(&model) {
            assert_eq!(exceptional_form(&model, &cp).unwrap().rank, 5);
        }
        assert!(z_centers(&model).is_empty());
    }

    #[test]
    fn center_ranks_over_f625() {
        let ms = witness25();
        let model = ms.over(2).unwrap();
        let f = &model.field;
        let mut rank3 = 0;
        for cp in w_centers(&model) {
            let e = exceptional_form(&model, &cp).unwrap();
            let special = f.square(cp.fibre[2]) == f.mul(model.a, f.square(cp.fibre[3]));
            assert_eq!(e.rank, if special { 3 } else { 5 });
            rank3 += special as usize;
        }
        assert_eq!(rank3, 2);
        let zs = z_centers(&model);
        assert_eq!(zs.len(), 4 * 626);
        let t = zs
            .iter()
            .filter(|cp| {
                let e = exceptional_form(&model, cp).unwrap();
                assert!(e.rank >= 4);
                e.rank == 4
            })
            .count();
        // 16 T points, each on two components
        assert_eq!(t, 32);
    }
}
