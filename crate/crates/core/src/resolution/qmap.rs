//! Certificates that every blow-up center is a smooth family whose exceptional
//! fibres are quadrics of the predicted rank, checked point by point over the
//! splitting field `F_{q^2}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{exceptional_form, node_centers, w_centers, z_centers, CenterKind, CenterPoint, ResolutionError};
use crate::fibration::{ModelExt, ModelSpec, Stratum};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentRow {
    pub kind: CenterKind,
    pub component: Option<u8>,
    pub points: usize,
    pub expected_points: usize,
    /// Rank -> number of points.
    pub ranks: BTreeMap<usize, usize>,
    pub expected_ranks: BTreeMap<usize, usize>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QMapCertificate {
    pub q: u64,
    pub rows: Vec<ComponentRow>,
    pub violations: Vec<String>,
    pub ok: bool,
}

fn profile(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &(r, n) in pairs {
        if n > 0 {
            *m.entry(r).or_insert(0) += n;
        }
    }
    m
}

fn row(
    model: &ModelExt,
    kind: CenterKind,
    component: Option<u8>,
    pts: &[&CenterPoint],
    expected_points: usize,
    expected: impl Fn(&CenterPoint) -> usize,
    violations: &mut Vec<String>,
) -> ComponentRow {
    let mut ranks = BTreeMap::new();
    let mut want = Vec::new();
    for cp in pts {
        let exp = expected(cp);
        want.push((exp, 1));
        match exceptional_form(model, cp) {
            Ok(e) => {
                *ranks.entry(e.rank).or_insert(0) += 1;
                if e.rank != exp {
                    violations.push(format!(
                        "{kind:?} point {:?}/{:?}: exceptional rank {}, expected {exp}",
                        cp.base, cp.fibre, e.rank
                    ));
                }
            }
            Err(err) => violations.push(err.to_string()),
        }
    }
    if pts.len() != expected_points {
        violations.push(format!("{kind:?} component {component:?}: {} points, expected {expected_points}", pts.len()));
    }
    let expected_ranks = profile(&want);
    let ok = pts.len() == expected_points && ranks == expected_ranks;
    ComponentRow { kind, component, points: pts.len(), expected_points, ranks, expected_ranks, ok }
}

/// Checks over `F_{q^2}`:
/// nodes have rank-6 fibres; `W` is a `P^1` with rank-5 fibres except rank 3
/// over `x2^2 = a x3^2`; each of the four `Z~` components is a `P^1` with rank-5
/// fibres except rank 4 over the points of `x y = 0` on an `l_i + h` line.
pub fn qmap_certify(ms: &ModelSpec) -> Result<QMapCertificate, ResolutionError> {
    let model = ms.over(2)?;
    let f = &model.field;
    let p1 = f.q() as usize + 1;
    let mut violations = Vec::new();
    let mut rows = Vec::new();

    let nodes = node_centers(ms, &model);
    let refs: Vec<&CenterPoint> = nodes.iter().collect();
    rows.push(row(&model, CenterKind::Node, None, &refs, refs.len(), |_| 6, &mut violations));

    let a = model.a;
    let w = w_centers(&model);
    let refs: Vec<&CenterPoint> = w.iter().collect();
    let w_rank = |cp: &CenterPoint| {
        let c = f.sub(f.square(cp.fibre[2]), f.mul(a, f.square(cp.fibre[3])));
        if c.is_zero() {
            3
        } else {
            5
        }
    };
    rows.push(row(&model, CenterKind::W, None, &refs, p1, w_rank, &mut violations));

    let z = z_centers(&model);
    for comp in 0..4u8 {
        let refs: Vec<&CenterPoint> = z.iter().filter(|c| c.component == Some(comp)).collect();
        let z_rank = |cp: &CenterPoint| if model.stratum(&cp.base) == Stratum::VxyK { 4 } else { 5 };
        rows.push(row(&model, CenterKind::Z, Some(comp), &refs, p1, z_rank, &mut violations));
    }
    let ok = violations.is_empty() && rows.iter().all(|r| r.ok);
    Ok(QMapCertificate { q: ms.field.q() as u64, rows, violations, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::LinearForm;
    use crate::gf::Elem;
    use crate::resolution::tests::witness25;

    #[test]
    fn certificate_holds_on_witness() {
        let c = qmap_certify(&witness25()).unwrap();
        assert!(c.ok, "{:?}", c.violations);
        assert_eq!(c.rows.len(), 6);
    }

    #[test]
    fn line_through_origin_breaks_it() {
        let ms = witness25();
        let f = ms.field.clone();
        let l1 = LinearForm::new(ms.cfg.l1.b, ms.cfg.l1.c, Elem::ZERO);
        let bad = ModelSpec::unchecked(&f, ms.a, l1, ms.cfg.l2).unwrap();
        let c = qmap_certify(&bad).unwrap();
        assert!(!c.ok);
        assert!(!c.violations.is_empty());
    }
}
