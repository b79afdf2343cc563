//! Point counts of `Y1`, `Y0` and `X` from `|Y|` and the exceptional fibres:
//! each blow-up replaces a center point `c` by the quadric `E_c`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{
    exceptional_form, node_centers, origin, sqrt_a, w_centers, z_centers, CenterKind, CenterPoint, ExceptionalFibre,
    ResolutionError,
};
use crate::fibration::{count_y_brute, count_y_stratified, y_polynomial, ModelExt, ModelSpec, Stratum};
use crate::gf::{Elem, GfError};
use crate::proj;
use crate::quadform::{CountPolynomial, QPoly};

/// Exact per-family contribution as polynomials in `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPolys {
    pub kind: CenterKind,
    pub points: QPoly,
    /// `Σ |E_c|` over the center points.
    pub exceptional: QPoly,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerPolynomials {
    pub m: u32,
    pub y: QPoly,
    pub y1: QPoly,
    pub y0: QPoly,
    pub x: QPoly,
    pub families: Vec<FamilyPolys>,
}

fn form_poly(e: &ExceptionalFibre, model: &ModelExt, k: u32) -> CountPolynomial {
    e.form.count_polynomial(&model.field).expect("nonzero form").over_degree(k)
}

/// Symbolic ledger for extension degree `m`.
///
/// Node forms are defined over `F_q`. The special points of `W` and all of
/// `Z~` need `sqrt(a)`, so their forms are computed over `F_{q^2}` and only
/// contribute for even `m`. Points of one family that are not special all carry
/// forms of odd rank 5, whose count does not depend on the point.
pub fn ledger_polynomials(ms: &ModelSpec, m: u32) -> Result<LedgerPolynomials, ResolutionError> {
    let m1 = ms.over(1)?;
    let m2 = ms.over(2)?;
    let even = m % 2 == 0;
    let p1 = QPoly::projective(1);

    let nodes = node_centers(ms, &m1);
    let node_exc: QPoly = nodes
        .iter()
        .map(|c| exceptional_form(&m1, c).map(|e| form_poly(&e, &m1, 1).qpoly(m)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    let node_fam = FamilyPolys {
        kind: CenterKind::Node,
        points: QPoly::constant(nodes.len() as i64),
        exceptional: node_exc,
    };

    let generic_w = CenterPoint {
        kind: CenterKind::W,
        base: origin(),
        fibre: [Elem::ZERO, Elem::ZERO, Elem::ONE, Elem::ZERO, Elem::ZERO],
        component: None,
    };
    let w_gen = form_poly(&exceptional_form(&m1, &generic_w)?, &m1, 1).qpoly(m);
    let s = sqrt_a(&m2).expect("a is a square in F_{q^2}");
    let mut w_exc = QPoly::default();
    let mut w_special = 0i64;
    if even {
        for root in s {
            let cp = CenterPoint { fibre: [Elem::ZERO, Elem::ZERO, root, Elem::ONE, Elem::ZERO], ..generic_w.clone() };
            w_exc = &w_exc + &form_poly(&exceptional_form(&m2, &cp)?, &m2, 2).qpoly(m);
            w_special += 1;
        }
    }
    w_exc = &w_exc + &(&(&p1 - &QPoly::constant(w_special)) * &w_gen);
    let w_fam = FamilyPolys { kind: CenterKind::W, points: p1.clone(), exceptional: w_exc };

    let mut z_fam = FamilyPolys { kind: CenterKind::Z, points: QPoly::default(), exceptional: QPoly::default() };
    if even {
        let zs = z_centers(&m2);
        for comp in 0..4u8 {
            let pts: Vec<&CenterPoint> = zs.iter().filter(|c| c.component == Some(comp)).collect();
            let mut special = 0i64;
            let mut generic: Option<QPoly> = None;
            for cp in pts {
                let st = m2.stratum(&cp.base);
                if matches!(st, Stratum::VxyK | Stratum::Origin) {
                    let e = exceptional_form(&m2, cp)?;
                    z_fam.exceptional = &z_fam.exceptional + &form_poly(&e, &m2, 2).qpoly(m);
                    special += 1;
                } else if generic.is_none() {
                    generic = Some(form_poly(&exceptional_form(&m2, cp)?, &m2, 2).qpoly(m));
                }
            }
            let generic = generic.expect("a component has non-special points over F_{q^2}");
            z_fam.exceptional = &z_fam.exceptional + &(&(&p1 - &QPoly::constant(special)) * &generic);
            z_fam.points = &z_fam.points + &p1;
        }
    }

    let y = y_polynomial(ms, m)?;
    let y1 = &(&y - &node_fam.points) + &node_fam.exceptional;
    let y0 = &(&y1 - &w_fam.points) + &w_fam.exceptional;
    let x = &(&y0 - &z_fam.points) + &z_fam.exceptional;
    Ok(LedgerPolynomials { m, y, y1, y0, x, families: vec![node_fam, w_fam, z_fam] })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub kind: CenterKind,
    pub points: BigInt,
    pub exceptional: BigInt,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolvedCounts {
    pub q: u64,
    pub m: u32,
    pub y: BigInt,
    pub y1: BigInt,
    pub y0: BigInt,
    pub x: BigInt,
    /// `X` with `W` blown up before the nodes.
    pub x_w_first: BigInt,
    pub tallies: Vec<Tally>,
    /// Center supports are pairwise disjoint, so the order of the blow-ups
    /// does not matter.
    pub centers_disjoint: bool,
    /// Tallies from enumerating every center point over `F_{q^m}`, when in budget.
    pub enumerated: Option<Vec<Tally>>,
    pub agree: bool,
}

/// Center points over `F_{q^m}` and the exact size of each exceptional fibre.
pub fn enumerate_tallies(ms: &ModelSpec, m: u32, budget: u64) -> Result<Vec<Tally>, ResolutionError> {
    let model = ms.over(m)?;
    let big_q = model.field.q() as u64;
    if big_q + 1 > budget {
        return Err(GfError::Budget { what: "center enumeration", order: big_q + 1, budget }.into());
    }
    let families = [node_centers(ms, &model), w_centers(&model), z_centers(&model)];
    let kinds = [CenterKind::Node, CenterKind::W, CenterKind::Z];
    families
        .iter()
        .zip(kinds)
        .map(|(pts, kind)| {
            let mut exc = BigInt::from(0);
            for cp in pts {
                let e = exceptional_form(&model, cp)?;
                exc += e.form.count_projective_points(&model.field, 1)?;
            }
            Ok(Tally { kind, points: BigInt::from(pts.len()), exceptional: exc })
        })
        .collect()
}

/// Supports of the three centers in `Y`: nodes, `W`, and `Z` over the base.
fn supports_disjoint(ms: &ModelSpec, m: u32) -> Result<bool, ResolutionError> {
    let model = ms.over(m)?;
    let key = |c: &CenterPoint| {
        let fibre = proj::normalized(&model.field, c.fibre).expect("nonzero");
        (c.base, fibre)
    };
    let nodes: BTreeSet<_> = node_centers(ms, &model).iter().map(key).collect();
    let w: BTreeSet<_> = w_centers(&model).iter().map(key).collect();
    // Z~ meets the W-exceptional divisor, not W itself; compare with Z off the origin
    let z: BTreeSet<_> = z_centers(&model).iter().filter(|c| c.base != origin()).map(key).collect();
    Ok(nodes.is_disjoint(&w) && nodes.is_disjoint(&z) && w.is_disjoint(&z))
}

/// Ledger counts over `F_{q^m}`; centers are enumerated as a cross-check when
/// `q^m + 1 <= budget`.
pub fn count_resolved(ms: &ModelSpec, m: u32, budget: u64) -> Result<ResolvedCounts, ResolutionError> {
    let q = ms.field.q() as u64;
    let lp = ledger_polynomials(ms, m)?;
    let tallies: Vec<Tally> = lp
        .families
        .iter()
        .map(|fam| Tally { kind: fam.kind, points: fam.points.eval(q, m), exceptional: fam.exceptional.eval(q, m) })
        .collect();
    let y = count_y_stratified(ms, m)?.total;
    let step = |acc: &BigInt, t: &Tally| acc - &t.points + &t.exceptional;
    let y1 = step(&y, &tallies[0]);
    let y0 = step(&y1, &tallies[1]);
    let x = step(&y0, &tallies[2]);
    let x_w_first = step(&step(&step(&y, &tallies[1]), &tallies[0]), &tallies[2]);
    let enumerated = match enumerate_tallies(ms, m, budget) {
        Ok(t) => Some(t),
        Err(ResolutionError::Field(GfError::Budget { .. })) => None,
        Err(e) => return Err(e),
    };
    let agree = y == lp.y.eval(q, m)
        && x == lp.x.eval(q, m)
        && enumerated.as_ref().map_or(true, |t| *t == tallies)
        && x == x_w_first;
    Ok(ResolvedCounts {
        q,
        m,
        y,
        y1,
        y0,
        x,
        x_w_first,
        tallies,
        centers_disjoint: supports_disjoint(ms, m.min(2))?,
        enumerated,
        agree,
    })
}

/// Literal counts over `F_q`: every fibre of `Y` and every exceptional quadric
/// enumerated point by point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteLedger {
    pub q: u64,
    pub y: u64,
    pub y1: u64,
    pub y0: u64,
    pub x: u64,
}

pub fn ledger_brute(ms: &ModelSpec, budget: u64) -> Result<BruteLedger, ResolutionError> {
    let model = ms.over(1)?;
    let f = &model.field;
    let q = f.q() as u64;
    let y = count_y_brute(ms, budget)?;
    let mut sums = [0u64; 3];
    for (i, pts) in [node_centers(ms, &model), w_centers(&model), z_centers(&model)].iter().enumerate() {
        for cp in pts {
            let e = exceptional_form(&model, cp)?;
            let work = proj::count(q, e.form.n as u32 - 1);
            if work > budget {
                return Err(GfError::Budget { what: "exceptional fibre enumeration", order: work, budget }.into());
            }
            sums[i] += e.form.count_points_in(f);
        }
        sums[i] -= pts.len() as u64;
    }
    let y1 = y + sums[0];
    let y0 = y1 + sums[1];
    Ok(BruteLedger { q, y, y1, y0, x: y0 + sums[2] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::tests::witness25;

    #[test]
    fn polynomials_by_parity() {
        let ms = witness25();
        for m in 1..=4 {
            let lp = ledger_polynomials(&ms, m).unwrap();
            let e = (m % 2 == 0) as i64;
            assert_eq!(lp.y1.descending(), vec![1, 106, 32 * e + 107, 91, 106, 1], "m = {m}");
            assert_eq!(lp.y0.descending(), vec![1, 107, 32 * e + 109, 93, 107, 1], "m = {m}");
        }
    }

    #[test]
    fn enumeration_agrees() {
        let ms = witness25();
        for m in 1..=2 {
            let r = count_resolved(&ms, m, 1 << 12).unwrap();
            assert!(r.enumerated.is_some());
            assert!(r.agree, "m = {m}: {r:?}");
            assert!(r.centers_disjoint);
        }
    }
}
