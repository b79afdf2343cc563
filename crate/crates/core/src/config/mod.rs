//! Linear forms on `P^2`, the 18-line configuration and its incidence data.

mod bound;
mod search;
mod witness;

pub use bound::{hypersurface_bound_check, BoundReport, MPoly};
pub use search::{search_u, Admissibility, Policy, SearchReport};
pub use witness::Witness;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Embedding, Field, GfError};
use crate::proj;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("zero linear form in a line set")]
    ZeroForm,
    #[error("not a set of lines: {0} is the zero form")]
    NotLines(String),
    #[error("configuration is degenerate: {0}")]
    Degenerate(String),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("bad witness: {0}")]
    BadWitness(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// `b x + c y + d z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl LinearForm {
    pub const X: LinearForm = LinearForm { b: Elem::ONE, c: Elem::ZERO, d: Elem::ZERO };
    pub const Y: LinearForm = LinearForm { b: Elem::ZERO, c: Elem::ONE, d: Elem::ZERO };
    pub const Z: LinearForm = LinearForm { b: Elem::ZERO, c: Elem::ZERO, d: Elem::ONE };

    pub fn new(b: Elem, c: Elem, d: Elem) -> Self {
        LinearForm { b, c, d }
    }

    pub fn coeffs(&self) -> [Elem; 3] {
        [self.b, self.c, self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    #[inline]
    pub fn eval(&self, f: &Field, p: &[Elem; 3]) -> Elem {
        f.add(f.add(f.mul(self.b, p[0]), f.mul(self.c, p[1])), f.mul(self.d, p[2]))
    }

    pub fn add(&self, f: &Field, o: &LinearForm) -> LinearForm {
        LinearForm { b: f.add(self.b, o.b), c: f.add(self.c, o.c), d: f.add(self.d, o.d) }
    }

    pub fn scale(&self, f: &Field, s: Elem) -> LinearForm {
        LinearForm { b: f.mul(self.b, s), c: f.mul(self.c, s), d: f.mul(self.d, s) }
    }

    /// Proportional representative with first nonzero coefficient 1.
    pub fn canonical(&self, f: &Field) -> Option<LinearForm> {
        proj::normalized(f, self.coeffs()).map(|[b, c, d]| LinearForm { b, c, d })
    }

    pub fn proportional(&self, f: &Field, o: &LinearForm) -> bool {
        let a = self.coeffs();
        let b = o.coeffs();
        (0..3).all(|i| (0..3).all(|j| f.mul(a[i], b[j]) == f.mul(a[j], b[i])))
    }

    pub fn map(&self, emb: &Embedding) -> LinearForm {
        LinearForm { b: emb.map(self.b), c: emb.map(self.c), d: emb.map(self.d) }
    }

    pub fn display(&self) -> String {
        format!("{}x+{}y+{}z", self.b, self.c, self.d)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.b, self.c, self.d)
    }
}

/// The eight forms `e_x x + e_y y + e_z z`, `e in {0,1}^3`, index `4 e_x + 2 e_y + e_z`.
pub fn h_set() -> [LinearForm; 8] {
    let bit = |v: usize| if v == 1 { Elem::ONE } else { Elem::ZERO };
    std::array::from_fn(|i| LinearForm { b: bit((i >> 2) & 1), c: bit((i >> 1) & 1), d: bit(i & 1) })
}

pub fn det3(f: &Field, a: &LinearForm, b: &LinearForm, c: &LinearForm) -> Elem {
    let m = |x: Elem, y: Elem| f.mul(x, y);
    let t1 = m(a.b, f.sub(m(b.c, c.d), m(b.d, c.c)));
    let t2 = m(a.c, f.sub(m(b.b, c.d), m(b.d, c.b)));
    let t3 = m(a.d, f.sub(m(b.b, c.c), m(b.c, c.b)));
    f.add(f.sub(t1, t2), t3)
}

/// No two forms proportional and every 3-subset has nonzero determinant.
pub fn general_position(f: &Field, forms: &[LinearForm]) -> Result<bool, ConfigError> {
    if forms.iter().any(LinearForm::is_zero) {
        return Err(ConfigError::ZeroForm);
    }
    Ok(first_violation(f, forms, &[]).is_none())
}

/// A violation of general position: a proportional pair or a concurrent triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Pair(usize, usize),
    Triple(usize, usize, usize),
}

/// First violation in index order, skipping the listed triples.
pub fn first_violation(f: &Field, forms: &[LinearForm], exempt: &[(usize, usize, usize)]) -> Option<Violation> {
    all_violations(f, forms, exempt).into_iter().next()
}

pub fn all_violations(f: &Field, forms: &[LinearForm], exempt: &[(usize, usize, usize)]) -> Vec<Violation> {
    let n = forms.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if forms[i].proportional(f, &forms[j]) {
                out.push(Violation::Pair(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if det3(f, &forms[i], &forms[j], &forms[k]).is_zero() && !exempt.contains(&(i, j, k)) {
                    out.push(Violation::Triple(i, j, k));
                }
            }
        }
    }
    out
}

/// Index of `l_i + h` in the 18-line list (`block` is 0 or 1).
pub const fn k_index(block: usize, h: usize) -> usize {
    2 + 8 * block + h
}

/// Triples of the 18-line list that are concurrent for every choice of `l1, l2`:
/// `x, l+h, l+h+x` when `e_x(h) = 0` and `y, l+h, l+h+y` when `e_y(h) = 0`.
pub fn forced_triples() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for block in 0..2 {
        for h in 0..8 {
            if h & 4 == 0 {
                out.push((0, k_index(block, h), k_index(block, h + 4)));
            }
            if h & 2 == 0 {
                out.push((1, k_index(block, h), k_index(block, h + 2)));
            }
        }
    }
    out.sort();
    out
}

/// The configuration `{x, y} ∪ {l1 + h} ∪ {l2 + h}`.
#[derive(Debug, Clone)]
pub struct LineConfig {
    pub field: Field,
    pub l1: LinearForm,
    pub l2: LinearForm,
    /// `x, y, l1+h (h in H order), l2+h (h in H order)`.
    pub lines: Vec<LinearForm>,
    pub general_position: bool,
    /// General position except for the forced triples.
    pub generic: bool,
    /// All six coefficients avoid `{0, -1}`.
    pub constraint: bool,
}

pub fn build_l(f: &Field, l1: LinearForm, l2: LinearForm) -> Result<LineConfig, ConfigError> {
    let h = h_set();
    let mut lines = vec![LinearForm::X, LinearForm::Y];
    for (li, name) in [(l1, "l1"), (l2, "l2")] {
        for (hi, hf) in h.iter().enumerate() {
            let form = li.add(f, hf);
            if form.is_zero() {
                return Err(ConfigError::NotLines(format!("{name}+h{hi}")));
            }
            lines.push(form);
        }
    }
    let general_position = first_violation(f, &lines, &[]).is_none();
    let generic = general_position || first_violation(f, &lines, &forced_triples()).is_none();
    let minus_one = f.from_i64(-1);
    let constraint = [l1.b, l1.c, l1.d, l2.b, l2.c, l2.d].iter().all(|&c| !c.is_zero() && c != minus_one);
    Ok(LineConfig { field: f.clone(), l1, l2, lines, general_position, generic, constraint })
}

/// A point of `P^2` together with the indices of the configuration lines through it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidentPoint {
    pub point: [Elem; 3],
    pub lines: Vec<usize>,
    /// Degree over `F_q` of the smallest field containing the point.
    pub degree: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectionSet {
    pub m: u32,
    pub points: Vec<IncidentPoint>,
}

impl IntersectionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    /// Sizes of Frobenius orbits.
    pub fn orbit_sizes(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.degree).collect()
    }
}

impl LineConfig {
    pub fn k_lines(&self) -> &[LinearForm] {
        &self.lines[2..]
    }

    pub fn violations(&self) -> Vec<Violation> {
        all_violations(&self.field, &self.lines, &[])
    }

    /// Lines mapped into an extension field.
    pub fn lines_over(&self, emb: &Embedding) -> Vec<LinearForm> {
        self.lines.iter().map(|l| l.map(emb)).collect()
    }

    /// Every point of `P^2` on at least two lines of the configuration, sorted.
    pub fn special_points(&self) -> Vec<IncidentPoint> {
        let f = &self.field;
        let mut pts: Vec<[Elem; 3]> = Vec::new();
        for i in 0..self.lines.len() {
            for j in i + 1..self.lines.len() {
                if let Some(p) = proj::meet(f, self.lines[i].coeffs(), self.lines[j].coeffs()) {
                    pts.push(p);
                }
            }
        }
        pts.sort();
        pts.dedup();
        pts.into_iter()
            .map(|p| IncidentPoint {
                point: p,
                lines: (0..self.lines.len()).filter(|&k| self.lines[k].eval(f, &p).is_zero()).collect(),
                degree: 1,
            })
            .collect()
    }

    /// Pairwise intersections of the 16 `l_i + h` lines over `F_{q^m}`.
    ///
    /// The lines are defined over `F_q`, so every intersection is `F_q`-rational and
    /// the Frobenius orbits are trivial; the set is the same for every `m`.
    pub fn intersection_points(&self, m: u32) -> Result<IntersectionSet, ConfigError> {
        let f = &self.field;
        let k = self.k_lines();
        if let Some(v) = first_violation(f, k, &[]) {
            return Err(ConfigError::Degenerate(format!("K-lines not in general position: {v:?}")));
        }
        let big = self.field.extension(m)?;
        let emb = Embedding::new(f, &big)?;
        let mut points = Vec::new();
        for i in 0..k.len() {
            for j in i + 1..k.len() {
                let p = proj::meet(f, k[i].coeffs(), k[j].coeffs()).expect("distinct lines");
                let pb = proj::normalized(&big, p.map(|c| emb.map(c))).expect("nonzero");
                let mut degree = 1;
                let mut cur = pb.map(|c| big.frobenius(c, f.e()));
                while cur != pb {
                    cur = cur.map(|c| big.frobenius(c, f.e()));
                    degree += 1;
                }
                points.push(IncidentPoint { point: p, lines: vec![i + 2, j + 2], degree });
            }
        }
        points.sort_by(|a, b| a.point.cmp(&b.point));
        Ok(IntersectionSet { m, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(f: &Field, b: i64, c: i64, d: i64) -> LinearForm {
        LinearForm::new(f.from_i64(b), f.from_i64(c), f.from_i64(d))
    }

    #[test]
    fn coordinate_triple() {
        let f = Field::new(3, 1).unwrap();
        assert!(general_position(&f, &[LinearForm::X, LinearForm::Y, LinearForm::Z]).unwrap());
        let xy = lf(&f, 1, 1, 0);
        assert!(!general_position(&f, &[LinearForm::X, LinearForm::Y, xy]).unwrap());
        assert_eq!(general_position(&f, &[LinearForm::X, lf(&f, 0, 0, 0)]), Err(ConfigError::ZeroForm));
    }

    #[test]
    fn build_l_shapes() {
        let f = Field::new(7, 1).unwrap();
        let c = build_l(&f, lf(&f, 1, 2, 3), lf(&f, 3, 5, 2)).unwrap();
        assert_eq!(c.lines.len(), 18);
        assert_eq!(c.k_lines().len(), 16);
        assert!(build_l(&f, lf(&f, 0, 0, 0), lf(&f, 1, 1, 1)).is_err());
        let same = build_l(&f, lf(&f, 1, 1, 1), lf(&f, 1, 1, 1)).unwrap();
        assert!(!same.general_position && !same.generic);
    }

    #[test]
    fn forced_triples_are_listed_once() {
        let t = forced_triples();
        assert_eq!(t.len(), 16);
        assert_eq!(t[0], (0, 2, 6));
        assert_eq!(t[15], (1, 15, 17));
    }
}
