//! Quadratic forms over `F_q` in a handful of variables: diagonalization,
//! invariants, closed-form and brute-force projective point counts.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Embedding, Field, GfError};
use crate::proj;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("the zero form defines no quadric")]
    ZeroForm,
    #[error("count over F_(q^{m}) requested for a form defined over F_(q^{k})")]
    Degree { m: u32, k: u32 },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Symmetric matrix `M` with `Q(v) = v^T M v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadForm {
    pub n: usize,
    pub matrix: Vec<Elem>,
}

/// Result of congruence diagonalization: `P M P^T = diag(d)`.
#[derive(Debug, Clone)]
pub struct Diagonal {
    pub diag: Vec<Elem>,
    /// Rows are the new basis vectors.
    pub basis: Vec<Vec<Elem>>,
}

impl QuadForm {
    pub fn zero(n: usize) -> QuadForm {
        QuadForm { n, matrix: vec![Elem::ZERO; n * n] }
    }

    pub fn diag(d: &[Elem]) -> QuadForm {
        let n = d.len();
        let mut q = QuadForm::zero(n);
        for (i, &c) in d.iter().enumerate() {
            q.matrix[i * n + i] = c;
        }
        q
    }

    /// From monomial coefficients `c * x_i x_j` (`i <= j`).
    pub fn from_terms(f: &Field, n: usize, terms: &[(usize, usize, Elem)]) -> QuadForm {
        let half = f.inv(f.from_i64(2)).expect("odd characteristic");
        let mut q = QuadForm::zero(n);
        for &(i, j, c) in terms {
            if i == j {
                q.matrix[i * n + i] = f.add(q.matrix[i * n + i], c);
            } else {
                let h = f.mul(c, half);
                q.matrix[i * n + j] = f.add(q.matrix[i * n + j], h);
                q.matrix[j * n + i] = f.add(q.matrix[j * n + i], h);
            }
        }
        q
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Elem {
        self.matrix[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, f: &Field, v: &[Elem]) -> Elem {
        let n = self.n;
        let mut s = Elem::ZERO;
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            let mut row = self.at(i, i);
            row = f.mul(row, v[i]);
            for j in i + 1..n {
                let c = self.at(i, j);
                if !c.is_zero() {
                    row = f.add(row, f.mul(f.add(c, c), v[j]));
                }
            }
            s = f.add(s, f.mul(row, v[i]));
        }
        s
    }

    /// `B^T M B` for an `n x k` matrix given as `k` column vectors.
    pub fn pullback(&self, f: &Field, cols: &[Vec<Elem>]) -> QuadForm {
        let k = cols.len();
        let mut out = QuadForm::zero(k);
        for a in 0..k {
            for b in 0..k {
                let mut s = Elem::ZERO;
                for i in 0..self.n {
                    for j in 0..self.n {
                        s = f.add(s, f.mul(f.mul(cols[a][i], self.at(i, j)), cols[b][j]));
                    }
                }
                out.matrix[a * k + b] = s;
            }
        }
        out
    }

    pub fn map(&self, emb: &Embedding) -> QuadForm {
        QuadForm { n: self.n, matrix: self.matrix.iter().map(|&c| emb.map(c)).collect() }
    }

    pub fn diagonalize(&self, f: &Field) -> Diagonal {
        let n = self.n;
        let mut m: Vec<Vec<Elem>> = (0..n).map(|i| (0..n).map(|j| self.at(i, j)).collect()).collect();
        let mut basis: Vec<Vec<Elem>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { Elem::ONE } else { Elem::ZERO }).collect()).collect();
        // row_i += c row_j together with the matching column operation
        let add_multiple = |m: &mut Vec<Vec<Elem>>, basis: &mut Vec<Vec<Elem>>, i: usize, j: usize, c: Elem| {
            for k in 0..n {
                m[i][k] = f.add(m[i][k], f.mul(c, m[j][k]));
                basis[i][k] = f.add(basis[i][k], f.mul(c, basis[j][k]));
            }
            for k in 0..n {
                m[k][i] = f.add(m[k][i], f.mul(c, m[k][j]));
            }
        };
        for k in 0..n {
            if m[k][k].is_zero() {
                if let Some(i) = (k + 1..n).find(|&i| !m[i][i].is_zero()) {
                    m.swap(k, i);
                    for row in m.iter_mut() {
                        row.swap(k, i);
                    }
                    basis.swap(k, i);
                } else if let Some((i, j)) =
                    (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !m[i][j].is_zero())
                {
                    // M_ii = M_jj = 0 here, so row_i += row_j makes M_ii = 2 M_ij != 0.
                    add_multiple(&mut m, &mut basis, i, j, Elem::ONE);
                    if i != k {
                        m.swap(k, i);
                        for row in m.iter_mut() {
                            row.swap(k, i);
                        }
                        basis.swap(k, i);
                    }
                } else {
                    break;
                }
            }
            let inv = f.inv(m[k][k]).expect("pivot");
            for i in k + 1..n {
                if !m[i][k].is_zero() {
                    let c = f.neg(f.mul(m[i][k], inv));
                    add_multiple(&mut m, &mut basis, i, k, c);
                }
            }
        }
        Diagonal { diag: (0..n).map(|i| m[i][i]).collect(), basis }
    }

    pub fn invariants(&self, f: &Field) -> Invariants {
        let d = self.diagonalize(f).diag;
        let nz: Vec<Elem> = d.into_iter().filter(|c| !c.is_zero()).collect();
        let prod = nz.iter().fold(Elem::ONE, |a, &b| f.mul(a, b));
        Invariants { rank: nz.len(), radical: self.n - nz.len(), disc: prod, delta: f.quad_char(prod) }
    }

    /// Closed-form point count of `{Q = 0} ⊂ P^{n-1}` as a function of the extension degree.
    pub fn count_polynomial(&self, f: &Field) -> Result<CountPolynomial, QuadError> {
        if self.is_zero() {
            return Err(QuadError::ZeroForm);
        }
        Ok(CountPolynomial::from_invariants(f, self.n, &self.invariants(f)))
    }

    /// Closed-form count over `F_{q^m}`, `q = |f|`.
    pub fn count_projective_points(&self, f: &Field, m: u32) -> Result<BigInt, QuadError> {
        self.count_polynomial(f)?.eval(f.q() as u64, m)
    }

    /// Enumerates canonical representatives of `P^{n-1}(F_{q^m})`.
    pub fn count_brute(&self, f: &Field, m: u32, budget: u64) -> Result<u64, QuadError> {
        let big = f.extension(m)?;
        let total = proj::count(big.q() as u64, self.n as u32 - 1);
        if total > budget {
            return Err(GfError::Budget { what: "projective enumeration", order: total, budget }.into());
        }
        let emb = Embedding::new(f, &big)?;
        Ok(self.map(&emb).count_points_in(&big))
    }

    /// Brute count with coefficients already in `f`. Sweeps the last free coordinate
    /// in an inner loop with the rest of the vector fixed.
    pub fn count_points_in(&self, f: &Field) -> u64 {
        let n = self.n;
        let q = f.q();
        let mut count = 0u64;
        let two = f.from_i64(2);
        let mut v = vec![Elem::ZERO; n];
        for lead in 0..n {
            v.iter_mut().for_each(|c| *c = Elem::ZERO);
            v[lead] = Elem::ONE;
            if lead == n - 1 {
                count += self.at(lead, lead).is_zero() as u64;
                continue;
            }
            let last = n - 1;
            let a = self.at(last, last);
            let prefixes = (q as u64).pow((last - lead - 1) as u32);
            for mut code in 0..prefixes {
                for j in (lead + 1..last).rev() {
                    v[j] = Elem((code % q as u64) as u32);
                    code /= q as u64;
                }
                v[last] = Elem::ZERO;
                let c = self.eval(f, &v);
                let b = (0..last).fold(Elem::ZERO, |s, i| f.add(s, f.mul(self.at(i, last), v[i])));
                let b = f.mul(b, two);
                for t in f.elements() {
                    let val = f.add(f.mul(f.add(f.mul(a, t), b), t), c);
                    count += val.is_zero() as u64;
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub rank: usize,
    pub radical: usize,
    /// Product of the nonzero diagonal entries after diagonalization.
    pub disc: Elem,
    /// `quad_char(disc)`; +1 for the zero form.
    pub delta: i8,
}

/// `N(Q) = Σ base_i Q^i + eps^(m/k) Σ twist_i Q^i` with `Q = q^m`; only valid when `k | m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountPolynomial {
    pub base: Vec<i64>,
    pub twist: Vec<i64>,
    /// Sign over the field of definition; 0 when there is no twist.
    pub eps: i8,
    /// Degree over `F_q` of the field of definition.
    pub k: u32,
}

impl CountPolynomial {
    pub fn from_invariants(f: &Field, n: usize, inv: &Invariants) -> CountPolynomial {
        let base = vec![1i64; n - 1];
        let s = inv.rank;
        if s % 2 == 1 || s == 0 {
            return CountPolynomial { base, twist: vec![], eps: 0, k: 1 };
        }
        let t = s / 2;
        let sign = if t % 2 == 1 { f.quad_char(f.from_i64(-1)) } else { 1 };
        let eps = sign * inv.delta;
        let mut twist = vec![0i64; inv.radical + t];
        twist[inv.radical + t - 1] = 1;
        CountPolynomial { base, twist, eps, k: 1 }
    }

    /// Same polynomial, defined over `F_{q^k}`.
    pub fn over_degree(mut self, k: u32) -> CountPolynomial {
        self.k = k;
        self
    }

    /// Sign of the twist over `F_{q^m}`.
    pub fn sign(&self, m: u32) -> i64 {
        if self.eps == 0 {
            0
        } else if self.eps == 1 || (m / self.k) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Evaluates at `Q = q^m` where `q` is the order of the base field.
    pub fn eval(&self, q: u64, m: u32) -> Result<BigInt, QuadError> {
        if m % self.k != 0 {
            return Err(QuadError::Degree { m, k: self.k });
        }
        let big_q = BigInt::from(q).pow(m);
        let poly = |c: &[i64]| {
            c.iter().rev().fold(BigInt::from(0), |acc, &a| acc * &big_q + BigInt::from(a))
        };
        Ok(poly(&self.base) + poly(&self.twist) * self.sign(m))
    }

    /// Coefficients of the count over `F_{q^m}` as a polynomial in `Q` (highest index last).
    pub fn coefficients(&self, m: u32) -> Vec<i64> {
        let len = self.base.len().max(self.twist.len());
        let s = self.sign(m);
        (0..len)
            .map(|i| self.base.get(i).copied().unwrap_or(0) + s * self.twist.get(i).copied().unwrap_or(0))
            .collect()
    }
}

impl CountPolynomial {
    pub fn qpoly(&self, m: u32) -> QPoly {
        QPoly::new(self.coefficients(m))
    }
}

/// Integer polynomial in `Q = q^m`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QPoly(pub Vec<i64>);

impl QPoly {
    pub fn new(mut c: Vec<i64>) -> QPoly {
        while c.last() == Some(&0) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn constant(c: i64) -> QPoly {
        QPoly::new(vec![c])
    }

    /// `Q^k`.
    pub fn power(k: usize) -> QPoly {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        QPoly(c)
    }

    /// Number of points of `P^n` over `F_Q`.
    pub fn projective(n: usize) -> QPoly {
        QPoly(vec![1; n + 1])
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, q: u64, m: u32) -> BigInt {
        let big_q = BigInt::from(q).pow(m);
        self.0.iter().rev().fold(BigInt::from(0), |acc, &a| acc * &big_q + BigInt::from(a))
    }

    /// Coefficients from the leading term down.
    pub fn descending(&self) -> Vec<i64> {
        self.0.iter().rev().copied().collect()
    }
}

impl std::ops::Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl std::ops::Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl std::ops::Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return QPoly::default();
        }
        let mut c = vec![0i64; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }
}

impl std::iter::Sum for QPoly {
    fn sum<I: Iterator<Item = QPoly>>(iter: I) -> QPoly {
        iter.fold(QPoly::default(), |a, b| &a + &b)
    }
}

impl std::fmt::Display for QPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let a = c.unsigned_abs();
            let coef = if a == 1 && i > 0 { String::new() } else { a.to_string() };
            let mono = match i {
                0 => String::new(),
                1 => "Q".to_string(),
                _ => format!("Q^{i}"),
            };
            if first {
                write!(f, "{sign}{coef}{mono}")?;
            } else {
                write!(f, " {sign} {coef}{mono}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Named model forms used for the cohomology tables.
pub mod models {
    use super::*;

    /// Smooth quadric threefold `x0^2 + ... + x4^2 = 0`.
    pub fn c1() -> QuadForm {
        QuadForm::diag(&[Elem::ONE; 5])
    }

    /// Cone over a smooth quadric surface, `x0^2 + x1^2 + x2^2 + x3^2 = 0` in `P^4`.
    pub fn c2() -> QuadForm {
        QuadForm::diag(&[Elem::ONE, Elem::ONE, Elem::ONE, Elem::ONE, Elem::ZERO])
    }

    /// Rank-3 cone `x0^2 + x1^2 + x2^2 = 0` in `P^4`.
    pub fn c3() -> QuadForm {
        QuadForm::diag(&[Elem::ONE, Elem::ONE, Elem::ONE, Elem::ZERO, Elem::ZERO])
    }

    /// Two hyperplanes `x0 x1 = 0` in `P^4`.
    pub fn c4(f: &Field) -> QuadForm {
        QuadForm::from_terms(f, 5, &[(0, 1, Elem::ONE)])
    }

    /// `y0^2 + y1^2 + y2^2 + y3^2 + u1 u2 = 0` in `P^5`.
    pub fn c5(f: &Field) -> QuadForm {
        QuadForm::from_terms(
            f,
            6,
            &[(0, 0, Elem::ONE), (1, 1, Elem::ONE), (2, 2, Elem::ONE), (3, 3, Elem::ONE), (4, 5, Elem::ONE)],
        )
    }

    /// The smooth quadric surface `x0^2 + x1^2 + x2^2 + x3^2 = 0` in `P^3`.
    pub fn surface() -> QuadForm {
        QuadForm::diag(&[Elem::ONE; 4])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_plane() {
        let f = Field::new(5, 1).unwrap();
        let q = QuadForm::from_terms(&f, 2, &[(0, 1, Elem::ONE)]);
        let inv = q.invariants(&f);
        assert_eq!(inv.rank, 2);
        // -disc is a square: the form is split
        assert_eq!(f.quad_char(f.neg(inv.disc)), 1);
        assert_eq!(q.count_projective_points(&f, 1).unwrap(), BigInt::from(2));
    }

    #[test]
    fn tiny_brute_counts() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(QuadForm::diag(&[Elem::ONE]).count_brute(&f, 1, 100).unwrap(), 0);
        assert_eq!(QuadForm::diag(&[Elem::ONE, f.from_i64(-1)]).count_brute(&f, 1, 100).unwrap(), 2);
        assert_eq!(models::c1().count_brute(&f, 1, 1000).unwrap(), 40);
    }

    #[test]
    fn c5_rank_and_delta() {
        for p in [3, 5, 7] {
            let f = Field::new(p, 1).unwrap();
            let inv = models::c5(&f).invariants(&f);
            assert_eq!(inv.rank, 6);
            assert_eq!(inv.delta, f.quad_char(f.from_i64(-1)));
        }
    }

    #[test]
    fn zero_form_is_rejected() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(QuadForm::zero(3).count_projective_points(&f, 1), Err(QuadError::ZeroForm));
    }

    #[test]
    fn qpoly_arithmetic() {
        let a = QPoly::projective(2);
        let b = &QPoly::power(1) - &QPoly::constant(1);
        assert_eq!((&a * &b).0, vec![-1, 0, 0, 1]);
        assert_eq!((&a * &b).eval(3, 2), BigInt::from(728));
        assert_eq!((&a - &a), QPoly::default());
        assert_eq!(QPoly::new(vec![1, -117, 0, 3]).to_string(), "3Q^3 - 117Q + 1");
    }

    #[test]
    fn c4_count() {
        let f = Field::new(7, 1).unwrap();
        let q = 7i64;
        let want = 2 * q.pow(3) + q * q + q + 1;
        assert_eq!(models::c4(&f).count_projective_points(&f, 1).unwrap(), BigInt::from(want));
        assert_eq!(models::c4(&f).count_brute(&f, 1, 1 << 20).unwrap() as i64, want);
    }
}
