//! Mod-2 residues of symbols built from linear forms on `P^2`, and the
//! ramification test for the resulting quaternion symbols over `F_q(t)`.
//!
//! Function classes are homogeneous of degree 0: a constant times a product
//! of powers of linear forms. Affine data is brought to degree 0 by dividing by
//! powers of `z`, so `z = 0` is the line at infinity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{LineConfig, LinearForm};
use crate::gf::{Elem, Field};
use crate::proj;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("function class has degree {0}, expected 0")]
    NotDegreeZero(i64),
    #[error("zero constant or zero linear form")]
    Zero,
    #[error("residue of a symbol with valuations {0:?}: more than one odd entry")]
    Unsupported(Vec<i64>),
}

/// `c · Π L_i^{e_i}` with canonical, pairwise non-proportional forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionClass {
    pub constant: Elem,
    pub factors: Vec<(LinearForm, i64)>,
}

fn lead(v: &[Elem]) -> Elem {
    *v.iter().find(|c| !c.is_zero()).expect("nonzero")
}

impl FunctionClass {
    pub fn new(f: &Field, constant: Elem, factors: &[(LinearForm, i64)]) -> Result<FunctionClass, SymbolError> {
        if constant.is_zero() {
            return Err(SymbolError::Zero);
        }
        let mut c = constant;
        let mut out: Vec<(LinearForm, i64)> = Vec::new();
        for &(l, e) in factors {
            let canon = l.canonical(f).ok_or(SymbolError::Zero)?;
            c = f.mul(c, f.pow(lead(&l.coeffs()), e).expect("nonzero"));
            match out.iter_mut().find(|(m, _)| *m == canon) {
                Some(slot) => slot.1 += e,
                None => out.push((canon, e)),
            }
        }
        out.retain(|(_, e)| *e != 0);
        out.sort();
        let deg: i64 = out.iter().map(|(_, e)| e).sum();
        if deg != 0 {
            return Err(SymbolError::NotDegreeZero(deg));
        }
        Ok(FunctionClass { constant: c, factors: out })
    }

    pub fn constant(c: Elem) -> FunctionClass {
        FunctionClass { constant: c, factors: vec![] }
    }

    /// Dehomogenizes at `z = 1`: the affine function `c Π L_i(x, y, 1)^{e_i}`.
    pub fn affine(f: &Field, constant: Elem, factors: &[(LinearForm, i64)]) -> Result<FunctionClass, SymbolError> {
        let deg: i64 = factors.iter().map(|(_, e)| e).sum();
        let mut all = factors.to_vec();
        all.push((LinearForm::Z, -deg));
        Self::new(f, constant, &all)
    }

    pub fn mul(&self, f: &Field, o: &FunctionClass) -> FunctionClass {
        let all: Vec<_> = self.factors.iter().chain(&o.factors).copied().collect();
        Self::new(f, f.mul(self.constant, o.constant), &all).expect("degree stays 0")
    }

    pub fn pow(&self, f: &Field, k: i64) -> FunctionClass {
        let all: Vec<_> = self.factors.iter().map(|&(l, e)| (l, e * k)).collect();
        Self::new(f, f.pow(self.constant, k).expect("nonzero"), &all).expect("degree stays 0")
    }

    /// Order of vanishing along the line `line = 0`.
    pub fn valuation(&self, f: &Field, line: &LinearForm) -> i64 {
        self.factors.iter().filter(|(l, _)| l.proportional(f, line)).map(|(_, e)| e).sum()
    }

    /// Restriction to the line after dividing out `(line / aux)^v`, `v` the
    /// valuation. The class mod squares does not depend on `aux` when `v` is even.
    pub fn restrict(&self, f: &Field, param: &LineParam) -> BinaryFunction {
        let v = self.valuation(f, &param.line);
        let aux = param.aux;
        let mut constant = self.constant;
        let mut factors: Vec<([Elem; 2], i64)> = Vec::new();
        let mut push = |l: &LinearForm, e: i64, constant: &mut Elem| {
            let b = [l.eval(f, &param.p0), l.eval(f, &param.p1)];
            let lc = lead(&b);
            *constant = f.mul(*constant, f.pow(lc, e).expect("nonzero"));
            let canon = proj::normalized(f, b).expect("form does not vanish on the line");
            match factors.iter_mut().find(|(m, _)| *m == canon) {
                Some(slot) => slot.1 += e,
                None => factors.push((canon, e)),
            }
        };
        for (l, e) in &self.factors {
            if !l.proportional(f, &param.line) {
                push(l, *e, &mut constant);
            }
        }
        // line^v with line canonical has been dropped; compensate by aux^v
        if v != 0 {
            push(&aux, v, &mut constant);
        }
        factors.retain(|(_, e)| *e != 0);
        factors.sort();
        BinaryFunction { constant, factors }
    }
}

/// A line with two of its points, giving `P^1 -> line, [s:t] -> s p0 + t p1`,
/// and a form not vanishing on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineParam {
    pub line: LinearForm,
    pub p0: [Elem; 3],
    pub p1: [Elem; 3],
    pub aux: LinearForm,
}

impl LineParam {
    pub fn new(f: &Field, line: &LinearForm) -> Option<LineParam> {
        let line = line.canonical(f)?;
        let coords = [LinearForm::X, LinearForm::Y, LinearForm::Z];
        let mut pts: Vec<[Elem; 3]> = Vec::new();
        for c in &coords {
            if let Some(p) = proj::meet(f, line.coeffs(), c.coeffs()) {
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        let aux = *coords.iter().find(|c| !c.proportional(f, &line))?;
        Some(LineParam { line, p0: pts[0], p1: pts[1], aux })
    }

    pub fn point(&self, f: &Field, st: [Elem; 2]) -> [Elem; 3] {
        std::array::from_fn(|i| f.add(f.mul(st[0], self.p0[i]), f.mul(st[1], self.p1[i])))
    }
}

/// Degree-0 function on `P^1`: `c Π (α s + β t)^e`, canonical binary forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryFunction {
    pub constant: Elem,
    pub factors: Vec<([Elem; 2], i64)>,
}

fn bin_eval(f: &Field, b: &[Elem; 2], st: &[Elem; 2]) -> Elem {
    f.add(f.mul(b[0], st[0]), f.mul(b[1], st[1]))
}

impl BinaryFunction {
    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn valuation_at(&self, f: &Field, st: &[Elem; 2]) -> i64 {
        self.factors.iter().filter(|(b, _)| bin_eval(f, b, st).is_zero()).map(|(_, e)| e).sum()
    }
}

/// `{A, B}` over the function field of a line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symbol2 {
    pub param: LineParam,
    pub entries: [BinaryFunction; 2],
}

/// Tame symbol of `{A, B}` at a degree-1 place: `(-1)^{v(A) v(B)} A^{v(B)} / B^{v(A)}`.
pub fn tame_symbol(f: &Field, a: &BinaryFunction, b: &BinaryFunction, st: &[Elem; 2]) -> Elem {
    let va = a.valuation_at(f, st);
    let vb = b.valuation_at(f, st);
    let mut val = f.mul(f.pow(a.constant, vb).expect("nonzero"), f.pow(b.constant, -va).expect("nonzero"));
    let terms = a.factors.iter().map(|(l, e)| (l, e * vb)).chain(b.factors.iter().map(|(l, e)| (l, -e * va)));
    for (l, e) in terms {
        let x = bin_eval(f, l, st);
        if x.is_zero() {
            continue;
        }
        val = f.mul(val, f.pow(x, e).expect("nonzero"));
    }
    if (va * vb) % 2 != 0 {
        val = f.neg(val);
    }
    val
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuaternionReport {
    /// Places `[s:t]` where the tame symbol is a non-square, with its value.
    pub ramified: Vec<([Elem; 2], Elem)>,
    pub nontrivial: bool,
    /// An even number of ramified places.
    pub reciprocity_ok: bool,
}

/// Residues of `{A, B}` at every degree-1 place of `P^1`. All factors are
/// `F_q`-rational binary forms, so no other place can ramify.
pub fn quaternion_nontrivial(f: &Field, sym: &Symbol2) -> QuaternionReport {
    let [a, b] = &sym.entries;
    let ramified: Vec<([Elem; 2], Elem)> = proj::points::<2>(f)
        .filter_map(|st| {
            let r = tame_symbol(f, a, b, &st);
            (f.quad_char(r) == -1).then_some((st, r))
        })
        .collect();
    QuaternionReport { nontrivial: !ramified.is_empty(), reciprocity_ok: ramified.len() % 2 == 0, ramified }
}

/// Residue of `{u1, u2, u3}` along `line`. Entries are first rescaled by even
/// powers of a uniformizer; a symbol with no odd valuation has residue 0 and
/// one odd entry `u_j` gives the other two entries restricted to the line.
pub fn residue(f: &Field, sym: &[FunctionClass; 3], line: &LinearForm) -> Result<Option<Symbol2>, SymbolError> {
    let param = LineParam::new(f, line).ok_or(SymbolError::Zero)?;
    let vals: Vec<i64> = sym.iter().map(|u| u.valuation(f, &param.line)).collect();
    let odd: Vec<usize> = (0..3).filter(|&i| vals[i] % 2 != 0).collect();
    match odd.as_slice() {
        [] => Ok(None),
        [j] => {
            let rest: Vec<BinaryFunction> = (0..3).filter(|i| i != j).map(|i| sym[i].restrict(f, &param)).collect();
            let [a, b]: [BinaryFunction; 2] = rest.try_into().expect("two entries");
            Ok(Some(Symbol2 { param, entries: [a, b] }))
        }
        _ => Err(SymbolError::Unsupported(vals)),
    }
}

/// `{a, f, g1}` with `f = x / y` and `g1 = Π_h (l1 + h) / y^8`.
pub fn xi(f: &Field, a: Elem, cfg: &LineConfig) -> [FunctionClass; 3] {
    let fx = FunctionClass::new(f, Elem::ONE, &[(LinearForm::X, 1), (LinearForm::Y, -1)]).expect("degree 0");
    let mut g: Vec<(LinearForm, i64)> = cfg.lines[2..10].iter().map(|l| (*l, 1)).collect();
    g.push((LinearForm::Y, -8));
    let g1 = FunctionClass::new(f, Elem::ONE, &g).expect("degree 0");
    [FunctionClass::constant(a), fx, g1]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineResidue {
    pub line: LinearForm,
    pub in_l: bool,
    pub valuations: [i64; 3],
    pub residue: Option<Symbol2>,
    pub quaternion: Option<QuaternionReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidueReport {
    pub q: u64,
    pub lines: Vec<LineResidue>,
    /// Every line outside the configuration has zero residue.
    pub outside_zero: bool,
    /// First configuration line with a ramified residue.
    pub witness: Option<LinearForm>,
    pub reciprocity_ok: bool,
    pub certified: bool,
}

pub fn line_residue(f: &Field, sym: &[FunctionClass; 3], cfg: &LineConfig, line: &LinearForm) -> LineResidue {
    let in_l = cfg.lines.iter().any(|l| l.proportional(f, line));
    let valuations = [0, 1, 2].map(|i| sym[i].valuation(f, line));
    match residue(f, sym, line) {
        Ok(r) => {
            let quaternion = r.as_ref().map(|s| quaternion_nontrivial(f, s));
            LineResidue { line: *line, in_l, valuations, residue: r, quaternion, error: None }
        }
        Err(e) => LineResidue { line: *line, in_l, valuations, residue: None, quaternion: None, error: Some(e.to_string()) },
    }
}

/// Residues of `{a, f, g1}` along the given lines and the configuration lines.
pub fn residue_report(f: &Field, a: Elem, cfg: &LineConfig, lines: &[LinearForm]) -> ResidueReport {
    let sym = xi(f, a, cfg);
    let mut all: Vec<LinearForm> = lines.iter().filter_map(|l| l.canonical(f)).collect();
    all.extend(cfg.lines.iter().filter_map(|l| l.canonical(f)));
    all.sort();
    all.dedup();
    let rows: Vec<LineResidue> = all.iter().map(|l| line_residue(f, &sym, cfg, l)).collect();
    let outside_zero = rows.iter().filter(|r| !r.in_l).all(|r| r.error.is_none() && r.residue.is_none());
    let witness = rows
        .iter()
        .find(|r| r.in_l && r.quaternion.as_ref().is_some_and(|q| q.nontrivial))
        .map(|r| r.line);
    let reciprocity_ok = rows.iter().filter_map(|r| r.quaternion.as_ref()).all(|q| q.reciprocity_ok);
    ResidueReport {
        q: f.q() as u64,
        certified: outside_zero && witness.is_some() && reciprocity_ok,
        lines: rows,
        outside_zero,
        witness,
        reciprocity_ok,
    }
}

/// Every line of `P^2(F_q)`.
pub fn all_lines(f: &Field) -> Vec<LinearForm> {
    proj::points::<3>(f).map(|[b, c, d]| LinearForm::new(b, c, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::build_l;

    fn setup() -> (Field, Elem, LineConfig) {
        let f = Field::new(5, 2).unwrap();
        let l1 = LinearForm::new(Elem(1), Elem(2), Elem(6));
        let l2 = LinearForm::new(Elem(10), Elem(2), Elem(14));
        let cfg = build_l(&f, l1, l2).unwrap();
        (f.clone(), f.smallest_nonsquare(), cfg)
    }

    #[test]
    fn valuations_of_g1() {
        let (f, a, cfg) = setup();
        let [_, fx, g1] = xi(&f, a, &cfg);
        for l in &cfg.lines[2..10] {
            assert_eq!(g1.valuation(&f, l), 1);
        }
        assert_eq!(g1.valuation(&f, &LinearForm::Y), -8);
        assert_eq!(fx.valuation(&f, &LinearForm::new(Elem(1), Elem(1), Elem(1))), 0);
    }

    #[test]
    fn t_symbol_with_nonsquare_ramifies_at_zero() {
        // {a, t} on P^1: t = s-coordinate ratio; ramified at t = 0 and t = ∞
        let f = Field::new(7, 1).unwrap();
        let a = f.smallest_nonsquare();
        let param = LineParam::new(&f, &LinearForm::Z).unwrap();
        let t = BinaryFunction { constant: Elem::ONE, factors: vec![([Elem::ONE, Elem::ZERO], 1), ([Elem::ZERO, Elem::ONE], -1)] };
        let sym = Symbol2 { param, entries: [BinaryFunction { constant: a, factors: vec![] }, t] };
        let r = quaternion_nontrivial(&f, &sym);
        assert!(r.nontrivial);
        assert_eq!(r.ramified.len(), 2);
        assert!(r.reciprocity_ok);
    }

    #[test]
    fn constant_symbol_is_split() {
        let f = Field::new(7, 1).unwrap();
        let param = LineParam::new(&f, &LinearForm::Z).unwrap();
        let c = |v| BinaryFunction { constant: Elem(v), factors: vec![] };
        let sym = Symbol2 { param, entries: [c(3), c(5)] };
        assert!(!quaternion_nontrivial(&f, &sym).nontrivial);
    }

    #[test]
    fn residue_along_first_block_line() {
        let (f, a, cfg) = setup();
        let sym = xi(&f, a, &cfg);
        let r = line_residue(&f, &sym, &cfg, &cfg.lines[2]);
        let q = r.quaternion.unwrap();
        assert!(q.nontrivial);
        // ramified where the line meets x = 0 and y = 0
        assert_eq!(q.ramified.len(), 2);
        let param = r.residue.unwrap().param;
        for (st, _) in &q.ramified {
            let p = param.point(&f, *st);
            assert!(p[0].is_zero() || p[1].is_zero());
        }
    }

    #[test]
    fn witness_report_certifies() {
        let (f, a, cfg) = setup();
        let rep = residue_report(&f, a, &cfg, &all_lines(&f));
        assert!(rep.outside_zero);
        assert!(rep.certified);
        assert_eq!(rep.lines.len(), 651);
    }
}
