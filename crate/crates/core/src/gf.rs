//! Arithmetic in `F_q = F_p[t]/(m(t))` for odd `p`.
//!
//! Elements are encoded as integers `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` where
//! `c_i` are the coefficients of the reduced polynomial. Multiplication and the
//! quadratic character go through discrete-log tables; addition in proper
//! extensions uses Zech logarithms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order for which log tables are built.
pub const MAX_TABLE_ORDER: u64 = 1 << 23;

/// Default cap on full enumeration of a field.
pub const DEFAULT_ENUM_BUDGET: u64 = 1 << 23;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("{0} is not an odd prime")]
    BadCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("field of order {order} exceeds the {what} budget of {budget}")]
    Budget { what: &'static str, order: u64, budget: u64 },
    #[error("cannot parse field spec {0:?} (expected \"p^e\" or a prime power)")]
    Parse(String),
    #[error("F_{small} does not embed in F_{big}")]
    NoEmbedding { small: String, big: String },
}

/// Characteristic, degree and defining polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    /// Monic, low degree first, length `e + 1`.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

/// Parses `"p^e"` or a bare prime power `"q"`.
pub fn parse_spec(s: &str) -> Result<(u32, u32), GfError> {
    let s = s.trim();
    let bad = || GfError::Parse(s.to_string());
    let (p, e) = match s.split_once('^') {
        Some((a, b)) => (a.trim().parse::<u32>().map_err(|_| bad())?, b.trim().parse::<u32>().map_err(|_| bad())?),
        None => {
            // a bare order q = p^e
            let q = s.parse::<u32>().ok().filter(|&q| q >= 2).ok_or_else(bad)?;
            let p = (2..=q).find(|d| q % d == 0).ok_or_else(bad)?;
            let (mut r, mut e) = (q, 0);
            while r % p == 0 {
                r /= p;
                e += 1;
            }
            if r != 1 {
                return Err(bad());
            }
            (p, e)
        }
    };
    Ok((p, e))
}

/// A field element in its integer encoding. Only meaningful together with its [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const NONE: u32 = u32::MAX;

struct Inner {
    spec: FieldSpec,
    q: u32,
    generator: Elem,
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
    neg: Vec<u32>,
}

/// Shared handle to a finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low degree first, used only while building tables.
mod poly {
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        // m is monic
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        for i in (dm..r.len()).rev() {
            let lead = r[i] as u64;
            if lead == 0 {
                continue;
            }
            let shift = i - dm;
            for (j, &c) in m.iter().enumerate() {
                let t = (lead * c as u64) % p as u64;
                r[shift + j] = ((r[shift + j] as u64 + p as u64 - t) % p as u64) as u32;
            }
        }
        r.truncate(dm.max(1));
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let v: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        rem(&v, m, p)
    }

    pub fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// Trial division by every monic polynomial of degree 1..=deg/2.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let d = m.len() - 1;
        if d <= 1 {
            return true;
        }
        for k in 1..=d / 2 {
            let count = (p as u64).pow(k as u32);
            for code in 0..count {
                let mut f = Vec::with_capacity(k + 1);
                let mut c = code;
                for _ in 0..k {
                    f.push((c % p as u64) as u32);
                    c /= p as u64;
                }
                f.push(1);
                if is_zero(&rem(m, &f, p)) {
                    return false;
                }
            }
        }
        true
    }
}

fn digits(mut code: u64, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64) as u32
}

/// Lexicographically smallest monic irreducible of degree `e`, ordering the
/// non-leading coefficients by their base-`p` code (constant term least significant).
pub fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(e);
    for code in 0..count {
        let mut m = digits(code, p, e);
        m.push(1);
        if m[0] != 0 && poly::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Field {
    /// `F_{p^e}` with the canonical modulus. Instances are cached per `(p, e)`.
    pub fn new(p: u32, e: u32) -> Result<Field, GfError> {
        if p == 2 || !is_prime(p as u64) {
            return Err(GfError::BadCharacteristic(p as u64));
        }
        if e == 0 {
            return Err(GfError::BadDegree);
        }
        let order = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if order > MAX_TABLE_ORDER {
            return Err(GfError::Budget { what: "table", order, budget: MAX_TABLE_ORDER });
        }
        if let Some(f) = cache().lock().unwrap().get(&(p, e)) {
            return Ok(f.clone());
        }
        let f = Field(Arc::new(Self::build(p, e)));
        cache().lock().unwrap().entry((p, e)).or_insert(f.clone());
        Ok(f)
    }

    /// Parses a `"p^e"` string and builds the field.
    pub fn from_spec_str(s: &str) -> Result<Field, GfError> {
        let (p, e) = parse_spec(s)?;
        Field::new(p, e)
    }

    /// The degree-`m` extension `F_{q^m}`.
    pub fn extension(&self, m: u32) -> Result<Field, GfError> {
        Field::new(self.p(), self.e() * m)
    }

    fn build(p: u32, e: u32) -> Inner {
        let modulus = smallest_irreducible(p, e);
        let q = p.pow(e);
        let n = (q - 1) as u64;
        let factors = prime_factors(n);
        let pow = |base: &[u32], mut k: u64| -> Vec<u32> {
            let mut acc = vec![1u32];
            let mut b = base.to_vec();
            while k > 0 {
                if k & 1 == 1 {
                    acc = poly::mul_mod(&acc, &b, &modulus, p);
                }
                b = poly::mul_mod(&b, &b, &modulus, p);
                k >>= 1;
            }
            acc
        };
        let is_one = |a: &[u32]| a[0] == 1 && a[1..].iter().all(|&c| c == 0);
        let mut generator = 0u32;
        for code in 2..q.max(3) {
            let g = digits(code as u64, p, e);
            if factors.iter().all(|&r| !is_one(&pow(&g, n / r))) {
                generator = code;
                break;
            }
        }
        let gdig = digits(generator as u64, p, e);
        let mut log = vec![NONE; q as usize];
        let mut exp = vec![0u32; 2 * n as usize];
        let mut cur = vec![1u32];
        for k in 0..n as usize {
            let mut d = cur.clone();
            d.resize(e as usize, 0);
            let c = undigits(&d, p);
            exp[k] = c;
            exp[k + n as usize] = c;
            log[c as usize] = k as u32;
            cur = poly::mul_mod(&cur, &gdig, &modulus, p);
        }
        let mut zech = vec![NONE; n as usize];
        for k in 0..n as usize {
            let mut d = digits(exp[k] as u64, p, e);
            d[0] = (d[0] + 1) % p;
            let c = undigits(&d, p);
            zech[k] = if c == 0 { NONE } else { log[c as usize] };
        }
        let neg = (0..q)
            .map(|c| {
                let d: Vec<u32> = digits(c as u64, p, e).into_iter().map(|x| (p - x) % p).collect();
                undigits(&d, p)
            })
            .collect();
        Inner {
            spec: FieldSpec { p, e, modulus },
            q,
            generator: Elem(generator),
            log,
            exp,
            zech,
            neg,
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }
    #[inline]
    pub fn p(&self) -> u32 {
        self.0.spec.p
    }
    #[inline]
    pub fn e(&self) -> u32 {
        self.0.spec.e
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn generator(&self) -> Elem {
        self.0.generator
    }
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }
    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p() as i64) as u32)
    }

    /// Element from its integer code; `None` if out of range.
    pub fn elem(&self, code: u32) -> Option<Elem> {
        (code < self.q()).then_some(Elem(code))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.e() == 1 {
            let s = a.0 + b.0;
            let p = self.p();
            return Elem(if s >= p { s - p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let t = &*self.0;
        let n = t.q - 1;
        let la = t.log[a.0 as usize];
        let lb = t.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + n - la };
        let z = t.zech[d as usize];
        if z == NONE {
            Elem::ZERO
        } else {
            Elem(t.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.e() == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.p() as u64) as u32);
        }
        let t = &*self.0;
        Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let t = &*self.0;
        let n = t.q - 1;
        let l = t.log[a.0 as usize];
        Some(Elem(t.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        let bi = self.inv(b).ok_or(GfError::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    /// `a^k` for signed `k`; `0^k` with `k <= 0` is an error.
    pub fn pow(&self, a: Elem, k: i64) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return if k > 0 { Ok(Elem::ZERO) } else if k == 0 { Ok(Elem::ONE) } else { Err(GfError::DivisionByZero) };
        }
        let t = &*self.0;
        let n = (t.q - 1) as i64;
        let l = t.log[a.0 as usize] as i64;
        let idx = ((l as i128 * k as i128).rem_euclid(n as i128)) as usize;
        Ok(Elem(t.exp[idx]))
    }

    /// Discrete log to the base [`Field::generator`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        let l = self.0.log[a.0 as usize];
        (l != NONE).then_some(l)
    }

    pub fn exp(&self, k: u64) -> Elem {
        let n = (self.q() - 1) as u64;
        Elem(self.0.exp[(k % n) as usize])
    }

    /// Quadratic character: 0, +1 or -1.
    #[inline]
    pub fn quad_char(&self, a: Elem) -> i8 {
        if a.0 == 0 {
            return 0;
        }
        if self.0.log[a.0 as usize] % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, a: Elem) -> bool {
        self.quad_char(a) >= 0
    }

    /// A square root, the one with the smaller code, if it exists.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return Some(Elem::ZERO);
        }
        let l = self.0.log[a.0 as usize];
        if l % 2 == 1 {
            return None;
        }
        let r = Elem(self.0.exp[(l / 2) as usize]);
        let s = self.neg(r);
        Some(r.min(s))
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Elem, k: u32) -> Elem {
        if a.0 == 0 {
            return a;
        }
        let n = (self.q() - 1) as u64;
        let mut l = self.0.log[a.0 as usize] as u64;
        for _ in 0..k {
            l = (l * self.p() as u64) % n;
        }
        Elem(self.0.exp[l as usize])
    }

    /// Coefficient vector (low degree first) of an element.
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        digits(a.0 as u64, self.p(), self.e())
    }

    /// Every element in code order, subject to an enumeration budget.
    pub fn enumerate(&self, budget: u64) -> Result<Vec<Elem>, GfError> {
        if self.q() as u64 > budget {
            return Err(GfError::Budget { what: "enumeration", order: self.q() as u64, budget });
        }
        Ok((0..self.q()).map(Elem).collect())
    }

    /// Iterator over all elements in code order (no budget check).
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q()).map(Elem)
    }

    /// Iterator over nonzero elements.
    pub fn units(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.q()).map(Elem)
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(0..self.q()))
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(1..self.q()))
    }

    /// Smallest non-square by code.
    pub fn smallest_nonsquare(&self) -> Elem {
        self.units().find(|&a| self.quad_char(a) == -1).expect("odd q has non-squares")
    }

    pub fn wrap(&self, a: Elem) -> FieldElement {
        FieldElement { field: self.clone(), value: a }
    }
}

/// Ring embedding `F_q -> F_{q^m}` sending `t` to the smallest root of the
/// small field's modulus.
#[derive(Clone, Debug)]
pub struct Embedding {
    small: Field,
    big: Field,
    image: Vec<Elem>,
}

impl Embedding {
    pub fn new(small: &Field, big: &Field) -> Result<Embedding, GfError> {
        if small.p() != big.p() || big.e() % small.e() != 0 {
            return Err(GfError::NoEmbedding { small: small.spec().to_string(), big: big.spec().to_string() });
        }
        let p = small.p();
        let m = &small.spec().modulus;
        let root = big
            .elements()
            .find(|&r| {
                let v = m.iter().rev().fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, r), Elem(c)));
                v.is_zero()
            })
            .expect("the modulus splits in any extension of matching degree");
        let image = small
            .elements()
            .map(|a| {
                let d = digits(a.0 as u64, p, small.e());
                d.iter().rev().fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, root), Elem(c)))
            })
            .collect();
        Ok(Embedding { small: small.clone(), big: big.clone(), image })
    }

    #[inline]
    pub fn map(&self, a: Elem) -> Elem {
        self.image[a.0 as usize]
    }

    pub fn small(&self) -> &Field {
        &self.small
    }

    pub fn big(&self) -> &Field {
        &self.big
    }
}

/// Element bundled with its field; operations are checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub field: Field,
    pub value: Elem,
}

impl FieldElement {
    fn same(&self, o: &FieldElement) -> Result<(), GfError> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch(self.field.spec().to_string(), o.field.spec().to_string()))
        }
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.field.wrap(self.field.add(self.value, o.value)))
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.field.wrap(self.field.sub(self.value, o.value)))
    }

    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.field.wrap(self.field.mul(self.value, o.value)))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.field.wrap(self.field.div(self.value, o.value)?))
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement, GfError> {
        Ok(self.field.wrap(self.field.pow(self.value, k)?))
    }

    pub fn quad_char(&self) -> i8 {
        self.field.quad_char(self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_identities() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.add(Elem(2), Elem(2)), Elem(1));
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.pow(Elem(2), 4).unwrap(), Elem(1));
        let f7 = Field::new(7, 1).unwrap();
        assert_eq!(f7.quad_char(Elem(3)), -1);
    }

    #[test]
    fn f9_modulus_is_t2_plus_1() {
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.spec().modulus, vec![1, 0, 1]);
        let t = Elem(3);
        assert_eq!(f9.mul(t, t), f9.from_i64(-1));
    }

    #[test]
    fn generator_is_nonsquare() {
        for (p, e) in [(3, 1), (3, 2), (5, 1), (7, 2), (3, 4), (11, 1)] {
            let f = Field::new(p, e).unwrap();
            assert_eq!(f.quad_char(f.generator()), -1);
        }
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.div(Elem(1), Elem(0)), Err(GfError::DivisionByZero));
        let g = Field::new(7, 1).unwrap();
        let r = f.wrap(Elem(1)).add(&g.wrap(Elem(1)));
        assert!(matches!(r, Err(GfError::FieldMismatch(..))));
    }

    #[test]
    fn enumeration_budget() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.enumerate(100).unwrap().len(), 9);
        assert!(matches!(f.enumerate(5), Err(GfError::Budget { .. })));
    }

    #[test]
    fn rejects_even_and_composite() {
        assert!(Field::new(2, 1).is_err());
        assert!(Field::new(9, 1).is_err());
        assert_eq!(parse_spec("3^4").unwrap(), (3, 4));
        assert_eq!(parse_spec("13").unwrap(), (13, 1));
        assert_eq!(parse_spec("27").unwrap(), (3, 3));
        assert!(parse_spec("x^2").is_err());
        assert!(parse_spec("12").is_err());
        assert!(parse_spec("0").is_err());
    }

    #[test]
    fn embedding_is_ring_hom() {
        for (p, e, m) in [(3, 1, 2), (3, 2, 2), (5, 1, 3), (3, 1, 4)] {
            let s = Field::new(p, e).unwrap();
            let b = Field::new(p, e * m).unwrap();
            let emb = Embedding::new(&s, &b).unwrap();
            for x in s.elements() {
                for y in s.elements() {
                    assert_eq!(emb.map(s.add(x, y)), b.add(emb.map(x), emb.map(y)));
                    assert_eq!(emb.map(s.mul(x, y)), b.mul(emb.map(x), emb.map(y)));
                }
            }
        }
    }
}
