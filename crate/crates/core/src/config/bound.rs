//! Affine zero counts of polynomials against `min(q^n, d n q^(n-1))`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::gf::{Elem, Field, GfError};

/// Sparse polynomial in `n` variables. Like terms are merged on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub n: usize,
    pub terms: Vec<(Vec<u32>, Elem)>,
}

impl MPoly {
    pub fn new(f: &Field, n: usize, terms: impl IntoIterator<Item = (Vec<u32>, Elem)>) -> MPoly {
        let mut acc: BTreeMap<Vec<u32>, Elem> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length");
            let s = acc.entry(e).or_insert(Elem::ZERO);
            *s = f.add(*s, c);
        }
        MPoly { n, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn monomial(n: usize, exps: Vec<u32>) -> MPoly {
        assert_eq!(exps.len(), n);
        MPoly { n, terms: vec![(exps, Elem::ONE)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, f: &Field, x: &[Elem]) -> Elem {
        self.terms.iter().fold(Elem::ZERO, |s, (e, c)| {
            let m = e.iter().zip(x).filter(|(&k, _)| k > 0).fold(*c, |acc, (&k, &v)| {
                f.mul(acc, f.pow(v, k as i64).expect("positive exponent"))
            });
            f.add(s, m)
        })
    }

    /// Formal partial derivative in variable `i`.
    pub fn derivative(&self, f: &Field, i: usize) -> MPoly {
        MPoly::new(
            f,
            self.n,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, f.mul(*c, f.from_i64(e[i] as i64)))
            }),
        )
    }

    /// Largest exponent of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    pub n: usize,
    pub d: u32,
    pub count: u64,
    pub bound: u64,
    pub holds: bool,
}

/// Counts affine zeros of `poly` over `F_q^n` by enumeration.
pub fn hypersurface_bound_check(f: &Field, poly: &MPoly, budget: u64) -> Result<BoundReport, ConfigError> {
    if poly.is_zero() {
        return Err(ConfigError::ZeroPolynomial);
    }
    let d = poly.degree();
    if d == 0 {
        return Err(ConfigError::Degenerate("constant polynomial".into()));
    }
    let q = f.q() as u64;
    let n = poly.n;
    let total = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    if total > budget {
        return Err(GfError::Budget { what: "enumeration", order: total, budget }.into());
    }
    let mut x = vec![Elem::ZERO; n];
    let mut count = 0u64;
    for _ in 0..total {
        if poly.eval(f, &x).is_zero() {
            count += 1;
        }
        for v in x.iter_mut() {
            v.0 += 1;
            if v.0 < f.q() {
                break;
            }
            v.0 = 0;
        }
    }
    let bound = total.min(d as u64 * n as u64 * q.pow(n as u32 - 1));
    Ok(BoundReport { q, n, d, count, bound, holds: count <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_coordinate_hyperplanes() {
        let f3 = Field::new(3, 1).unwrap();
        let r = hypersurface_bound_check(&f3, &MPoly::monomial(2, vec![1, 0]), 1 << 20).unwrap();
        assert_eq!((r.count, r.bound, r.holds), (3, 6, true));
        let f5 = Field::new(5, 1).unwrap();
        let r = hypersurface_bound_check(&f5, &MPoly::monomial(3, vec![1, 1, 1]), 1 << 20).unwrap();
        assert_eq!((r.count, r.bound, r.holds), (61, 125, true));
    }

    #[test]
    fn zero_polynomial_rejected() {
        let f = Field::new(3, 1).unwrap();
        let p = MPoly::new(&f, 1, [(vec![1], Elem(1)), (vec![1], Elem(2))]);
        assert_eq!(hypersurface_bound_check(&f, &p, 100).unwrap_err(), ConfigError::ZeroPolynomial);
    }
}
