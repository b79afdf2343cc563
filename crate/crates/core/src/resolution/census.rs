//! Singular points of `Y(F_{q^m})` against the set cut out by the defining
//! equations of `Z`, `W` and the vertices over `D`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jet::LocalChart;
use super::{origin, vertex, ResolutionError};
use crate::fibration::{Chart, ModelExt, ModelSpec, Stratum};
use crate::gf::{Elem, Field, GfError};
use crate::proj;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SingularPoint {
    pub base: [Elem; 3],
    pub fibre: [Elem; 5],
    pub stratum: Stratum,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusReport {
    pub q: u64,
    pub m: u32,
    pub observed: usize,
    pub expected: usize,
    /// Expected but not singular.
    pub missing: Vec<SingularPoint>,
    /// Singular but not expected.
    pub extra: Vec<SingularPoint>,
    /// Stratum label -> (observed, expected).
    pub by_stratum: BTreeMap<String, (usize, usize)>,
    pub equal: bool,
}

fn affine_base(p: &[Elem; 3], chart: Chart, f: &Field) -> [Elem; 2] {
    let (den, a, b) = match chart {
        Chart::Uy => (p[1], p[0], p[2]),
        Chart::Ux => (p[0], p[1], p[2]),
        Chart::Uz => (p[2], p[0], p[1]),
    };
    [f.div(a, den).expect("in chart"), f.div(b, den).expect("in chart")]
}

/// Both base partials of the chart equation at a fibre point in the radical
/// of the fibre form.
fn base_partials_vanish(model: &ModelExt, p: &[Elem; 3], chart: Chart, v: &[Elem; 5]) -> bool {
    let f = &model.field;
    let one = v.iter().position(|c| !c.is_zero()).expect("projective point");
    let inv = f.inv(v[one]).expect("nonzero");
    let [u1, u2] = affine_base(p, chart, f);
    let mut c = [u1, u2, Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO];
    let mut k = 2;
    for (i, &vi) in v.iter().enumerate() {
        if i != one {
            c[k] = f.mul(vi, inv);
            k += 1;
        }
    }
    let lc = LocalChart::Y { chart, one };
    [0usize, 1].iter().all(|&i| {
        let mut w = [Elem::ZERO; 6];
        w[i] = Elem::ONE;
        lc.jet_at(model, &c, &w).0[1].is_zero()
    })
}

/// Points of `P^4` supported on the coordinates in `support`.
fn supported_points(f: &Field, support: &[usize]) -> Vec<[Elem; 5]> {
    let k = support.len();
    if k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut buf = vec![Elem::ZERO; k];
    let q = f.q();
    for lead in 0..k {
        let free = k - lead - 1;
        let total = (q as u64).pow(free as u32);
        for mut code in 0..total {
            buf.iter_mut().for_each(|c| *c = Elem::ZERO);
            buf[lead] = Elem::ONE;
            for j in (lead + 1..k).rev() {
                buf[j] = Elem((code % q as u64) as u32);
                code /= q as u64;
            }
            let mut v = [Elem::ZERO; 5];
            for (i, &s) in support.iter().enumerate() {
                v[s] = buf[i];
            }
            out.push(v);
        }
    }
    out
}

/// Singular points of `Y(F_{q^m})`. A singular point has vanishing fibre
/// partials, so it lies in the radical of its fibre form; only those points
/// are tested against the base partials.
pub fn observed_singular(model: &ModelExt, budget: u64) -> Result<Vec<SingularPoint>, ResolutionError> {
    let f = &model.field;
    let n = proj::count(f.q() as u64, 2);
    if n > budget {
        return Err(GfError::Budget { what: "singular census", order: n, budget }.into());
    }
    let pts: Vec<[Elem; 3]> = proj::points::<3>(f).collect();
    let mut out: Vec<SingularPoint> = pts
        .par_iter()
        .flat_map_iter(|p| {
            let c = model.classify(p);
            let radical: Vec<usize> = (0..5).filter(|&i| c.coeffs[i].is_zero()).collect();
            supported_points(f, &radical)
                .into_iter()
                .filter(|v| base_partials_vanish(model, p, c.chart, v))
                .map(|v| SingularPoint { base: *p, fibre: v, stratum: c.stratum })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Brute-force census over `F_q`: every point of every fibre is tested against
/// the equation and all six partials.
pub fn singular_census_brute(ms: &ModelSpec, budget: u64) -> Result<Vec<SingularPoint>, ResolutionError> {
    let model = ms.over(1)?;
    let f = &model.field;
    let q = f.q() as u64;
    let work = proj::count(q, 2) * proj::count(q, 4);
    if work > budget {
        return Err(GfError::Budget { what: "brute singular census", order: work, budget }.into());
    }
    let fibre_pts: Vec<[Elem; 5]> = proj::points::<5>(f).collect();
    let pts: Vec<[Elem; 3]> = proj::points::<3>(f).collect();
    let mut out: Vec<SingularPoint> = pts
        .par_iter()
        .flat_map_iter(|p| {
            let c = model.classify(p);
            let mut found = Vec::new();
            for v in &fibre_pts {
                let val = (0..5).fold(Elem::ZERO, |s, i| f.add(s, f.mul(c.coeffs[i], f.square(v[i]))));
                if !val.is_zero() {
                    continue;
                }
                if (0..5).any(|i| !f.mul(c.coeffs[i], v[i]).is_zero()) {
                    continue;
                }
                if base_partials_vanish(&model, p, c.chart, v) {
                    found.push(SingularPoint { base: *p, fibre: *v, stratum: c.stratum });
                }
            }
            found
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `Z ∪ W ∪ {vertex over every pairwise meet of the l_i + h lines}`.
pub fn expected_singular_set(ms: &ModelSpec, model: &ModelExt) -> BTreeSet<SingularPoint> {
    let f = &model.field;
    let mut out = BTreeSet::new();
    let fib = |c2: Elem, c3: Elem| [Elem::ZERO, Elem::ZERO, c2, c3, Elem::ZERO];
    let pt = |base: [Elem; 3], fibre: [Elem; 5]| SingularPoint { base, fibre, stratum: model.stratum(&base) };
    let conic: Vec<[Elem; 2]> = proj::points::<2>(f)
        .filter(|[c2, c3]| f.sub(f.square(*c2), f.mul(model.a, f.square(*c3))).is_zero())
        .collect();
    for [u, v] in proj::points::<2>(f) {
        for base in [[Elem::ZERO, u, v], [u, Elem::ZERO, v]] {
            for &[c2, c3] in &conic {
                out.insert(pt(base, fib(c2, c3)));
            }
        }
    }
    for [c2, c3] in proj::points::<2>(f) {
        out.insert(pt(origin(), fib(c2, c3)));
    }
    let k = &ms.cfg.lines[2..];
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            let p = proj::meet(&ms.field, k[i].coeffs(), k[j].coeffs()).expect("distinct lines");
            let p = proj::normalized(f, p.map(|c| model.emb.map(c))).expect("nonzero");
            out.insert(pt(p, vertex()));
        }
    }
    out
}

fn compare(q: u64, m: u32, observed: Vec<SingularPoint>, expected: BTreeSet<SingularPoint>) -> CensusReport {
    let obs: BTreeSet<SingularPoint> = observed.into_iter().collect();
    let missing: Vec<SingularPoint> = expected.difference(&obs).cloned().collect();
    let extra: Vec<SingularPoint> = obs.difference(&expected).cloned().collect();
    let mut by_stratum: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for s in &obs {
        by_stratum.entry(s.stratum.label().to_string()).or_default().0 += 1;
    }
    for s in &expected {
        by_stratum.entry(s.stratum.label().to_string()).or_default().1 += 1;
    }
    CensusReport {
        q,
        m,
        observed: obs.len(),
        expected: expected.len(),
        equal: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
        by_stratum,
    }
}

/// Census over `F_{q^m}` compared with the expected set.
pub fn singular_census(ms: &ModelSpec, m: u32, budget: u64) -> Result<CensusReport, ResolutionError> {
    let model = ms.over(m)?;
    let observed = observed_singular(&model, budget)?;
    let expected = expected_singular_set(ms, &model);
    Ok(compare(ms.field.q() as u64, m, observed, expected))
}

/// Same comparison with the brute-force observed set over `F_q`.
pub fn singular_census_brute_report(ms: &ModelSpec, budget: u64) -> Result<CensusReport, ResolutionError> {
    let model = ms.over(1)?;
    let observed = singular_census_brute(ms, budget)?;
    let expected = expected_singular_set(ms, &model);
    Ok(compare(ms.field.q() as u64, 1, observed, expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::tests::witness25;

    #[test]
    fn census_matches_at_m1() {
        let ms = witness25();
        let r = singular_census(&ms, 1, 1 << 22).unwrap();
        assert!(r.equal, "{:?} {:?}", r.missing, r.extra);
        // W has 26 points, Z is empty, 120 vertices
        assert_eq!(r.observed, 26 + 120);
    }

    #[test]
    fn census_extra_points_over_t_at_m2() {
        let ms = witness25();
        let r = singular_census(&ms, 2, 1 << 22).unwrap();
        assert!(r.missing.is_empty());
        assert!(!r.equal);
        // the cone x2^2 = a x3^2 over each T point minus its vertex and two Z points
        assert_eq!(r.extra.len(), 16 * (2 * 625 - 2));
        assert!(r.extra.iter().all(|s| s.stratum == Stratum::VxyK));
    }
}
