//! Local normal forms of the blown-up charts and a literal smoothness census
//! of each over small fields.

use serde::{Deserialize, Serialize};

use super::ResolutionError;
use crate::config::MPoly;
use crate::gf::{Elem, Field, GfError};

/// A chart equation in six affine coordinates, written as a sum of monomials
/// with unit coefficients, e.g. `s0 v1 + 1 + y1^2 + y4^2 t2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalForm {
    pub equation: String,
    pub vars: [String; 6],
    /// Dimension of the expected singular locus, `None` for smooth.
    pub singular_dim: Option<u32>,
}

impl NormalForm {
    fn new(equation: &str, vars: [&str; 6], singular_dim: Option<u32>) -> NormalForm {
        NormalForm { equation: equation.into(), vars: vars.map(String::from), singular_dim }
    }

    pub fn poly(&self, f: &Field) -> MPoly {
        let terms = self.equation.split('+').map(|mono| {
            let mut e = vec![0u32; 6];
            let mut c = Elem::ONE;
            for factor in mono.split_whitespace() {
                let (name, k) = match factor.split_once('^') {
                    Some((n, k)) => (n, k.parse::<u32>().expect("integer exponent")),
                    None => (factor, 1),
                };
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => e[i] += k,
                    None => {
                        let n: i64 = name.parse().unwrap_or_else(|_| panic!("unknown symbol {name}"));
                        c = f.mul(c, f.from_i64(n));
                    }
                }
            }
            (e, c)
        });
        MPoly::new(f, 6, terms)
    }
}

/// The charts that must be smooth after all three blow-ups, followed by the
/// chart of the `W` blow-up that stays singular along the strict transform of `Z`.
pub fn normal_forms() -> Vec<NormalForm> {
    vec![
        NormalForm::new("1 + y1^2 + y2^2 + y3^2 + u1 u2", ["x0", "y1", "y2", "y3", "u1", "u2"], None),
        NormalForm::new("y0^2 + y1^2 + y2^2 + y3^2 + u2", ["t1", "y0", "y1", "y2", "y3", "u2"], None),
        NormalForm::new("s0 + y0^2 + y1^2 + y4^2", ["t1", "t2", "s0", "y0", "y1", "y4"], None),
        NormalForm::new("s0 v1 + 1 + y1^2 + y4^2", ["v1", "t2", "s0", "x0", "y1", "y4"], None),
        NormalForm::new("s0 + y0^2 + y1^2 + y4^2 t2", ["t1", "t2", "s0", "y0", "y1", "y4"], None),
        NormalForm::new("s0 v1 + 1 + y1^2 + y4^2 t2", ["v1", "t2", "s0", "x0", "y1", "y4"], None),
        NormalForm::new("r1 v1 v2 + 1 + y1^2 + y4^2", ["r1", "v1", "v2", "x0", "y1", "y4"], None),
        NormalForm::new("w2 + z0^2 + z1^2 + z4^2", ["r1", "t1", "w2", "z0", "z1", "z4"], None),
        NormalForm::new("s1 w2 + 1 + z1^2 + z4^2", ["s1", "t1", "w2", "z0", "z1", "z4"], None),
        NormalForm::new("r1 v2 + y0^2 + y1^2 + y4^2", ["r1", "v1", "v2", "y0", "y1", "y4"], Some(1)),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartCensus {
    pub equation: String,
    pub q: u64,
    pub m: u32,
    pub zeros: u64,
    pub singular: u64,
    pub first_singular: Option<Vec<u32>>,
    /// Smooth when expected smooth; otherwise exactly `Q^dim` singular points.
    pub ok: bool,
}

/// Enumerates `F_{q^m}^6`. The equation has degree at most 2 in one variable,
/// which is swept as a quadratic with the other five fixed; candidate zeros are
/// then tested against all six partials.
pub fn chart_census(nf: &NormalForm, base: &Field, m: u32, budget: u64) -> Result<ChartCensus, ResolutionError> {
    let f = base.extension(m)?;
    let big_q = f.q() as u64;
    // one quadratic sweep per point of the other five coordinates
    let work = big_q.pow(5);
    if work > budget {
        return Err(GfError::Budget { what: "chart census", order: work, budget }.into());
    }
    let poly = nf.poly(&f);
    let partials: Vec<MPoly> = (0..6).map(|i| poly.derivative(&f, i)).collect();
    let sweep = (0..6).rev().find(|&i| poly.degree_in(i) <= 2).expect("some variable of degree <= 2");
    let half = f.inv(f.from_i64(2)).expect("odd characteristic");
    let minus_one = f.from_i64(-1);
    let mut zeros = 0u64;
    let mut singular = 0u64;
    let mut first = None;
    let mut x = [Elem::ZERO; 6];
    let others: Vec<usize> = (0..6).filter(|&i| i != sweep).collect();
    for mut code in 0..big_q.pow(5) {
        for &i in &others {
            x[i] = Elem((code % big_q) as u32);
            code /= big_q;
        }
        let mut at = |t: Elem| {
            x[sweep] = t;
            poly.eval(&f, &x)
        };
        let c = at(Elem::ZERO);
        let p1 = at(Elem::ONE);
        let pm = at(minus_one);
        let b = f.mul(f.sub(p1, pm), half);
        let a = f.sub(f.mul(f.add(p1, pm), half), c);
        for t in f.elements() {
            let v = f.add(f.mul(f.add(f.mul(a, t), b), t), c);
            if !v.is_zero() {
                continue;
            }
            zeros += 1;
            x[sweep] = t;
            if partials.iter().all(|d| d.eval(&f, &x).is_zero()) {
                singular += 1;
                first.get_or_insert_with(|| x.iter().map(|e| e.0).collect());
            }
        }
    }
    let ok = match nf.singular_dim {
        None => singular == 0,
        Some(d) => singular == big_q.pow(d),
    };
    Ok(ChartCensus { equation: nf.equation.clone(), q: base.q() as u64, m, zeros, singular, first_singular: first, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_over_f3() {
        let f = Field::new(3, 1).unwrap();
        for nf in normal_forms() {
            let c = chart_census(&nf, &f, 1, 1 << 20).unwrap();
            assert!(c.ok, "{c:?}");
        }
    }

    #[test]
    fn zero_count_matches_direct_enumeration() {
        let f = Field::new(3, 1).unwrap();
        let nf = &normal_forms()[6];
        let poly = nf.poly(&f);
        let mut direct = 0;
        for code in 0..729u32 {
            let x: Vec<Elem> = (0..6).map(|i| Elem(code / 3u32.pow(i) % 3)).collect();
            direct += poly.eval(&f, &x).is_zero() as u64;
        }
        assert_eq!(chart_census(nf, &f, 1, 1 << 20).unwrap().zeros, direct);
    }

    #[test]
    fn parses_constants_and_powers() {
        let f = Field::new(5, 1).unwrap();
        let nf = NormalForm::new("2 a^2 b + 1", ["a", "b", "c", "d", "e", "g"], None);
        let p = nf.poly(&f);
        assert_eq!(p.eval(&f, &[Elem(2), Elem(3), Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO]), Elem(0));
    }
}
