//! The quadric fibration `Y -> P^2`: chart equations, fibre classification and
//! exact point counts of `Y` over `F_{q^m}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{build_l, ConfigError, IncidentPoint, LineConfig, LinearForm, Witness};
use crate::gf::{Elem, Embedding, Field, GfError};
use crate::proj;
use crate::quadform::{CountPolynomial, Invariants, QPoly, QuadError, QuadForm};

#[derive(Debug, Error)]
pub enum FibrationError {
    #[error("a = {0} is a square in F_q")]
    SquareA(Elem),
    #[error("configuration is not admissible: {0}")]
    Inadmissible(String),
    #[error("point {0:?} lies in fewer than two charts")]
    SingleChart([Elem; 3]),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// The data `(F_q, a, l1, l2)` defining `Y`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub field: Field,
    pub a: Elem,
    pub cfg: LineConfig,
}

impl ModelSpec {
    /// Requires `a` non-square, the coefficient constraint and generic position.
    pub fn new(field: &Field, a: Elem, l1: LinearForm, l2: LinearForm) -> Result<ModelSpec, FibrationError> {
        let ms = Self::unchecked(field, a, l1, l2)?;
        if !ms.cfg.generic {
            let v = ms.cfg.violations();
            return Err(FibrationError::Inadmissible(format!("{} violations, first {:?}", v.len(), &v[..v.len().min(3)])));
        }
        if !ms.cfg.constraint {
            return Err(FibrationError::Inadmissible("a coefficient of l1 or l2 is 0 or -1".into()));
        }
        Ok(ms)
    }

    /// Only checks that `a` is a non-square and that all 18 forms are nonzero.
    pub fn unchecked(field: &Field, a: Elem, l1: LinearForm, l2: LinearForm) -> Result<ModelSpec, FibrationError> {
        if field.quad_char(a) != -1 {
            return Err(FibrationError::SquareA(a));
        }
        let cfg = build_l(field, l1, l2)?;
        Ok(ModelSpec { field: field.clone(), a, cfg })
    }

    pub fn from_witness(w: &Witness) -> Result<ModelSpec, FibrationError> {
        Self::new(&w.field()?, w.a, w.l1, w.l2)
    }

    pub fn witness(&self) -> Witness {
        Witness { p: self.field.p(), e: self.field.e(), a: self.a, l1: self.cfg.l1, l2: self.cfg.l2 }
    }

    /// The model with coefficients mapped into `F_{q^m}`.
    pub fn over(&self, m: u32) -> Result<ModelExt, FibrationError> {
        let big = self.field.extension(m)?;
        let emb = Embedding::new(&self.field, &big)?;
        Ok(ModelExt {
            m,
            a: emb.map(self.a),
            lines: self.cfg.lines_over(&emb),
            field: big,
            emb,
        })
    }

    /// `F_q`-rational points on two or more configuration lines.
    pub fn special_points(&self) -> Vec<IncidentPoint> {
        self.cfg.special_points()
    }
}

/// Chart used for a base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Chart {
    Ux,
    Uy,
    Uz,
}

/// Base stratum of a point of `P^2`, by incidence with the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stratum {
    Generic,
    /// On exactly one `l_i + h` line, off `xy = 0`.
    KLine,
    /// On two or more `l_i + h` lines, off `xy = 0`.
    D,
    /// On `xy = 0`, no `l_i + h` line, not `[0:0:1]`.
    Vxy,
    /// On `xy = 0` and some `l_i + h` line.
    VxyK,
    /// `[0:0:1]`.
    Origin,
}

impl Stratum {
    pub fn label(self) -> &'static str {
        match self {
            Stratum::Generic => "generic",
            Stratum::KLine => "K-line",
            Stratum::D => "D",
            Stratum::Vxy => "V_xy",
            Stratum::VxyK => "V_xy∩K",
            Stratum::Origin => "[0:0:1]",
        }
    }

    pub fn from_incidence(on_x: bool, on_y: bool, k_count: usize) -> Stratum {
        match (on_x && on_y, on_x || on_y, k_count) {
            (true, _, _) => Stratum::Origin,
            (false, true, 0) => Stratum::Vxy,
            (false, true, _) => Stratum::VxyK,
            (false, false, 0) => Stratum::Generic,
            (false, false, 1) => Stratum::KLine,
            _ => Stratum::D,
        }
    }

    /// Fibre rank that the incidence data predicts.
    pub fn expected_rank(self) -> usize {
        match self {
            Stratum::Generic => 5,
            Stratum::KLine | Stratum::D => 4,
            Stratum::Vxy | Stratum::Origin => 3,
            Stratum::VxyK => 2,
        }
    }
}

/// Classified fibre over a base point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreClass {
    pub point: [Elem; 3],
    pub chart: Chart,
    /// `(1, -a, -f, a f, -g1 g2)` in the chart.
    pub coeffs: [Elem; 5],
    pub rank: usize,
    pub delta: i8,
    pub stratum: Stratum,
}

/// Coefficients `(f, g1, g2)` of the chart equation at `p`.
pub fn chart_functions(f: &Field, lines: &[LinearForm], p: &[Elem; 3], chart: Chart) -> (Elem, Elem, Elem) {
    let [x, y, z] = *p;
    let prod = |block: usize| lines[2 + 8 * block..10 + 8 * block].iter().fold(Elem::ONE, |s, l| f.mul(s, l.eval(f, p)));
    let (num_f, den_f, den_g) = match chart {
        Chart::Ux => (y, x, x),
        Chart::Uy => (x, y, y),
        Chart::Uz => (f.mul(x, y), f.square(z), z),
    };
    let fv = f.div(num_f, den_f).expect("point lies in the chart");
    let d8 = f.pow(den_g, -8).expect("point lies in the chart");
    (fv, f.mul(prod(0), d8), f.mul(prod(1), d8))
}

pub fn fibre_coeffs(f: &Field, a: Elem, fv: Elem, g: Elem) -> [Elem; 5] {
    [Elem::ONE, f.neg(a), f.neg(fv), f.mul(a, fv), f.neg(g)]
}

/// Chart from the partition `U_y`, then `{y = 0} ∩ U_x`, then `[0:0:1]`.
pub fn chart_of(p: &[Elem; 3]) -> Chart {
    if !p[1].is_zero() {
        Chart::Uy
    } else if !p[0].is_zero() {
        Chart::Ux
    } else {
        Chart::Uz
    }
}

pub fn charts_containing(p: &[Elem; 3]) -> Vec<Chart> {
    let mut v = Vec::new();
    if !p[0].is_zero() {
        v.push(Chart::Ux);
    }
    if !p[1].is_zero() {
        v.push(Chart::Uy);
    }
    if !p[2].is_zero() {
        v.push(Chart::Uz);
    }
    v
}

/// Invariants of a diagonal form without running elimination.
pub fn diagonal_invariants(f: &Field, d: &[Elem]) -> Invariants {
    let nz: Vec<Elem> = d.iter().copied().filter(|c| !c.is_zero()).collect();
    let disc = nz.iter().fold(Elem::ONE, |s, &c| f.mul(s, c));
    Invariants { rank: nz.len(), radical: d.len() - nz.len(), disc, delta: f.quad_char(disc) }
}

/// Model with coefficients in `F_{q^m}`.
#[derive(Debug, Clone)]
pub struct ModelExt {
    pub m: u32,
    pub field: Field,
    pub a: Elem,
    pub lines: Vec<LinearForm>,
    pub emb: Embedding,
}

impl ModelExt {
    pub fn stratum(&self, p: &[Elem; 3]) -> Stratum {
        let f = &self.field;
        let k = self.lines[2..].iter().filter(|l| l.eval(f, p).is_zero()).count();
        Stratum::from_incidence(p[0].is_zero(), p[1].is_zero(), k)
    }

    pub fn coeffs_in(&self, p: &[Elem; 3], chart: Chart) -> [Elem; 5] {
        let f = &self.field;
        let (fv, g1, g2) = chart_functions(f, &self.lines, p, chart);
        fibre_coeffs(f, self.a, fv, f.mul(g1, g2))
    }

    pub fn classify(&self, p: &[Elem; 3]) -> FibreClass {
        let chart = chart_of(p);
        let coeffs = self.coeffs_in(p, chart);
        let inv = diagonal_invariants(&self.field, &coeffs);
        FibreClass { point: *p, chart, coeffs, rank: inv.rank, delta: inv.delta, stratum: self.stratum(p) }
    }

    /// Fibre count over the base point, by the closed form.
    pub fn fibre_count(&self, c: &FibreClass) -> BigInt {
        let inv = diagonal_invariants(&self.field, &c.coeffs);
        CountPolynomial::from_invariants(&self.field, 5, &inv).eval(self.field.q() as u64, 1).expect("k = 1")
    }
}

/// Fibre at a point of `P^2(F_{q^m})`.
pub fn classify_fibre(ms: &ModelSpec, m: u32, p: &[Elem; 3]) -> Result<FibreClass, FibrationError> {
    Ok(ms.over(m)?.classify(p))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartCheck {
    pub point: [Elem; 3],
    pub charts: Vec<Chart>,
    pub ranks: Vec<usize>,
    pub deltas: Vec<i8>,
    pub counts: Vec<BigInt>,
    /// The gluing substitution carries one diagonal form to the other.
    pub gluing_ok: bool,
    pub consistent: bool,
}

/// Compares the fibre forms over `p` in every chart containing `p`.
pub fn chart_consistency(model: &ModelExt, p: &[Elem; 3]) -> Result<ChartCheck, FibrationError> {
    let charts = charts_containing(p);
    if charts.len() < 2 {
        return Err(FibrationError::SingleChart(*p));
    }
    let f = &model.field;
    let forms: Vec<[Elem; 5]> = charts.iter().map(|&c| model.coeffs_in(p, c)).collect();
    let invs: Vec<Invariants> = forms.iter().map(|d| diagonal_invariants(f, d)).collect();
    let counts: Vec<BigInt> = invs
        .iter()
        .map(|i| CountPolynomial::from_invariants(f, 5, i).eval(f.q() as u64, 1).expect("k = 1"))
        .collect();
    // Gluing scalings: source chart -> target chart, (u, v) with scale s = v/u on x2, x3 and (v/u)^8 on x4.
    let coord = |c: Chart| match c {
        Chart::Ux => p[0],
        Chart::Uy => p[1],
        Chart::Uz => p[2],
    };
    let mut gluing_ok = true;
    for i in 0..charts.len() {
        for j in 0..charts.len() {
            if i == j {
                continue;
            }
            let s = f.div(coord(charts[j]), coord(charts[i])).expect("both coordinates nonzero");
            let s8 = f.pow(s, 8).expect("nonzero");
            let scale = [Elem::ONE, Elem::ONE, s, s, s8];
            for k in 0..5 {
                if f.mul(f.square(scale[k]), forms[j][k]) != forms[i][k] {
                    gluing_ok = false;
                }
            }
        }
    }
    let consistent = gluing_ok
        && invs.windows(2).all(|w| w[0].rank == w[1].rank && w[0].delta == w[1].delta)
        && counts.windows(2).all(|w| w[0] == w[1]);
    Ok(ChartCheck {
        point: *p,
        ranks: invs.iter().map(|i| i.rank).collect(),
        deltas: invs.iter().map(|i| i.delta).collect(),
        charts,
        counts,
        gluing_ok,
        consistent,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumCount {
    pub stratum: Stratum,
    pub m: u32,
    pub points: BigInt,
    /// Fibre count per point when it is the same across the stratum.
    pub fibre: Option<BigInt>,
    pub subtotal: BigInt,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YCount {
    pub m: u32,
    pub total: BigInt,
    pub strata: Vec<StratumCount>,
    /// Points whose fibre rank disagrees with the incidence prediction.
    pub rank_mismatches: Vec<[Elem; 3]>,
}

fn merge_strata(m: u32, rows: impl IntoIterator<Item = (Stratum, BigInt, BigInt)>) -> Vec<StratumCount> {
    // (stratum) -> (points, subtotal, distinct fibre counts)
    let mut acc: BTreeMap<Stratum, (BigInt, BigInt, Vec<BigInt>)> = BTreeMap::new();
    for (s, npts, fibre) in rows {
        let e = acc.entry(s).or_insert_with(|| (BigInt::from(0), BigInt::from(0), Vec::new()));
        e.1 += &npts * &fibre;
        e.0 += npts;
        if !e.2.contains(&fibre) {
            e.2.push(fibre);
        }
    }
    acc.into_iter()
        .map(|(stratum, (points, subtotal, fibres))| StratumCount {
            stratum,
            m,
            points,
            fibre: (fibres.len() == 1).then(|| fibres[0].clone()),
            subtotal,
        })
        .collect()
}

/// `|Y(F_{q^m})|` by classifying every base point.
pub fn count_y_enumerate(ms: &ModelSpec, m: u32, budget: u64) -> Result<YCount, FibrationError> {
    let model = ms.over(m)?;
    let big_q = model.field.q() as u64;
    let npts = proj::count(big_q, 2);
    if npts > budget {
        return Err(GfError::Budget { what: "base enumeration", order: npts, budget }.into());
    }
    let pts: Vec<[Elem; 3]> = proj::points::<3>(&model.field).collect();
    let rows: Vec<(Stratum, BigInt, usize, [Elem; 3])> = pts
        .par_iter()
        .map(|p| {
            let c = model.classify(p);
            (c.stratum, model.fibre_count(&c), c.rank, *p)
        })
        .collect();
    let rank_mismatches = rows.iter().filter(|r| r.0.expected_rank() != r.2).map(|r| r.3).collect();
    let strata = merge_strata(m, rows.into_iter().map(|(s, c, _, _)| (s, BigInt::from(1), c)));
    let total = strata.iter().map(|s| s.subtotal.clone()).sum();
    Ok(YCount { m, total, strata, rank_mismatches })
}

/// Fibre count polynomial for points of a line stratum, whose form does not
/// depend on the point up to squares.
fn line_stratum_polynomial(ms: &ModelSpec, s: Stratum) -> CountPolynomial {
    let f = &ms.field;
    let a2 = f.square(ms.a);
    let inv = match s {
        // (1, -a, -f, a f, 0): discriminant a^2 f^2, a square
        Stratum::KLine => Invariants { rank: 4, radical: 1, disc: a2, delta: 1 },
        // (1, -a, 0, 0, -g): odd rank, discriminant irrelevant
        Stratum::Vxy => Invariants { rank: 3, radical: 2, disc: Elem::ONE, delta: 1 },
        _ => Invariants { rank: 5, radical: 0, disc: Elem::ONE, delta: 1 },
    };
    CountPolynomial::from_invariants(f, 5, &inv)
}

/// `|Y(F_{q^m})|` for any `m` from the `F_q` incidence structure.
///
/// Special points are `F_q`-rational, so their fibre forms are computed once over
/// `F_q` and lifted. Every other point lies on at most one line; its fibre is
/// determined up to squares by the kind of line.
pub fn count_y_stratified(ms: &ModelSpec, m: u32) -> Result<YCount, FibrationError> {
    let f = &ms.field;
    let q = f.q() as u64;
    let big_q = BigInt::from(q).pow(m);
    let model = ms.over(1)?;
    let special = ms.special_points();
    let mut rows: Vec<(Stratum, BigInt, BigInt)> = Vec::new();
    let mut rank_mismatches = Vec::new();
    for sp in &special {
        let c = model.classify(&sp.point);
        if c.rank != c.stratum.expected_rank() {
            rank_mismatches.push(sp.point);
        }
        let inv = diagonal_invariants(f, &c.coeffs);
        rows.push((c.stratum, BigInt::from(1), CountPolynomial::from_invariants(f, 5, &inv).eval(q, m)?));
    }
    let mut on_lines = BigInt::from(0);
    for (idx, _) in ms.cfg.lines.iter().enumerate() {
        let nspecial = special.iter().filter(|sp| sp.lines.contains(&idx)).count();
        let rest = &big_q + 1 - nspecial;
        on_lines += &rest;
        let s = if idx < 2 { Stratum::Vxy } else { Stratum::KLine };
        rows.push((s, rest, line_stratum_polynomial(ms, s).eval(q, m)?));
    }
    let generic = &big_q * &big_q + &big_q + 1 - special.len() - on_lines;
    rows.push((Stratum::Generic, generic, line_stratum_polynomial(ms, Stratum::Generic).eval(q, m)?));
    let strata = merge_strata(m, rows);
    let total = strata.iter().map(|s| s.subtotal.clone()).sum();
    Ok(YCount { m, total, strata, rank_mismatches })
}

/// `|Y(F_{q^m})|` as a polynomial in `Q = q^m`. Only the twist signs depend on `m`.
pub fn y_polynomial(ms: &ModelSpec, m: u32) -> Result<QPoly, FibrationError> {
    let f = &ms.field;
    let model = ms.over(1)?;
    let special = ms.special_points();
    let mut total = QPoly::default();
    for sp in &special {
        let c = model.classify(&sp.point);
        let inv = diagonal_invariants(f, &c.coeffs);
        total = &total + &CountPolynomial::from_invariants(f, 5, &inv).qpoly(m);
    }
    let mut on_lines = QPoly::default();
    for idx in 0..ms.cfg.lines.len() {
        let nspecial = special.iter().filter(|sp| sp.lines.contains(&idx)).count();
        let rest = &QPoly::projective(1) - &QPoly::constant(nspecial as i64);
        let s = if idx < 2 { Stratum::Vxy } else { Stratum::KLine };
        total = &total + &(&rest * &line_stratum_polynomial(ms, s).qpoly(m));
        on_lines = &on_lines + &rest;
    }
    let generic = &(&QPoly::projective(2) - &QPoly::constant(special.len() as i64)) - &on_lines;
    total = &total + &(&generic * &line_stratum_polynomial(ms, Stratum::Generic).qpoly(m));
    Ok(total)
}

/// Brute force over `F_q`: every chart's base points, every fibre point tested
/// against the chart equation.
pub fn count_y_brute(ms: &ModelSpec, budget: u64) -> Result<u64, FibrationError> {
    let f = &ms.field;
    let q = f.q() as u64;
    let work = proj::count(q, 2) * proj::count(q, 4);
    if work > budget {
        return Err(GfError::Budget { what: "chart enumeration", order: work, budget }.into());
    }
    let lines = &ms.cfg.lines;
    let mut base: Vec<([Elem; 3], Chart)> = Vec::new();
    // U_y with y = 1
    for x in f.elements() {
        for z in f.elements() {
            base.push(([x, Elem::ONE, z], Chart::Uy));
        }
    }
    // {y = 0} ∩ U_x with x = 1
    for z in f.elements() {
        base.push(([Elem::ONE, Elem::ZERO, z], Chart::Ux));
    }
    base.push(([Elem::ZERO, Elem::ZERO, Elem::ONE], Chart::Uz));
    let total: u64 = base
        .par_iter()
        .map(|(p, chart)| {
            let (fv, g1, g2) = chart_functions(f, lines, p, *chart);
            let d = fibre_coeffs(f, ms.a, fv, f.mul(g1, g2));
            QuadForm::diag(&d).count_points_in(f)
        })
        .sum();
    Ok(total)
}

/// Exponent vector over named factors.
pub type ExponentVector = Vec<(String, i32)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenericFibreReport {
    /// Diagonal entries as signed products: constant, `f`, `g1 g2`.
    pub diagonal: Vec<String>,
    pub f: ExponentVector,
    pub g1: ExponentVector,
    pub g2: ExponentVector,
    /// `(point, count over F_{q^{2m}}, expected rank-5 count)`.
    pub samples: Vec<([Elem; 3], BigInt, BigInt)>,
    pub ok: bool,
}

/// Generic fibre `(1, -a, -f, a f, -g1 g2)` and a count check over `F_{q^2}`.
pub fn generic_fibre_report(ms: &ModelSpec, samples: usize) -> Result<GenericFibreReport, FibrationError> {
    let k_names = |b: usize| -> ExponentVector {
        let mut v: ExponentVector = (0..8).map(|h| (format!("l{}+h{}", b + 1, h), 1)).collect();
        v.push(("y".into(), -8));
        v
    };
    let model = ms.over(2)?;
    let q2 = model.field.q() as u64;
    let rank5 = CountPolynomial { base: vec![1; 4], twist: vec![], eps: 0, k: 1 }.eval(q2, 1)?;
    let mut out = Vec::new();
    for p in proj::points::<3>(&model.field) {
        if out.len() >= samples {
            break;
        }
        let c = model.classify(&p);
        if c.stratum == Stratum::Generic {
            let got = model.fibre_count(&c);
            out.push((p, got, rank5.clone()));
        }
    }
    let ok = out.iter().all(|(_, a, b)| a == b) && model.field.quad_char(model.a) == 1;
    Ok(GenericFibreReport {
        diagonal: vec!["1".into(), "-a".into(), "-f".into(), "a*f".into(), "-g1*g2".into()],
        f: vec![("x".into(), 1), ("y".into(), -1)],
        g1: k_names(0),
        g2: k_names(1),
        samples: out,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn witness25() -> ModelSpec {
        let w: Witness = "5^2; 2; 1,2,6; 10,2,14".parse().unwrap();
        let f = w.field().unwrap();
        let a = f.smallest_nonsquare();
        ModelSpec::new(&f, a, w.l1, w.l2).unwrap()
    }

    #[test]
    fn stratified_matches_enumeration() {
        let ms = witness25();
        for m in 1..=2 {
            let e = count_y_enumerate(&ms, m, 1 << 22).unwrap();
            let s = count_y_stratified(&ms, m).unwrap();
            assert_eq!(e.total, s.total, "m = {m}");
            assert!(e.rank_mismatches.is_empty());
            for (a, b) in e.strata.iter().zip(&s.strata) {
                assert_eq!((a.stratum, &a.points, &a.subtotal), (b.stratum, &b.points, &b.subtotal));
            }
        }
    }

    #[test]
    fn polynomial_matches_stratified_count() {
        let ms = witness25();
        for m in 1..=4 {
            let poly = y_polynomial(&ms, m).unwrap();
            assert_eq!(poly.eval(25, m), count_y_stratified(&ms, m).unwrap().total);
            let e = (m % 2 == 0) as i64;
            assert_eq!(poly.descending(), vec![1, 2, 32 * e + 3, -117, 2, 1]);
        }
    }

    #[test]
    fn origin_fibre_has_rank_three() {
        let ms = witness25();
        let c = classify_fibre(&ms, 1, &[Elem::ZERO, Elem::ZERO, Elem::ONE]).unwrap();
        assert_eq!(c.rank, 3);
        assert_eq!(c.stratum, Stratum::Origin);
    }
}
