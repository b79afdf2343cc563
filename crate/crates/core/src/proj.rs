//! Canonical representatives of projective points: first nonzero coordinate is 1.

use crate::gf::{Elem, Field};

/// Scales `v` so its first nonzero entry is 1. Returns `false` for the zero vector.
pub fn normalize(f: &Field, v: &mut [Elem]) -> bool {
    let Some(i) = v.iter().position(|c| !c.is_zero()) else {
        return false;
    };
    let inv = f.inv(v[i]).expect("nonzero");
    for c in v[i..].iter_mut() {
        *c = f.mul(*c, inv);
    }
    true
}

pub fn normalized<const N: usize>(f: &Field, mut v: [Elem; N]) -> Option<[Elem; N]> {
    normalize(f, &mut v).then_some(v)
}

/// Number of points of `P^n(F_Q)`.
pub fn count(q: u64, n: u32) -> u64 {
    (0..=n).map(|i| q.pow(i)).sum()
}

/// Canonical points of `P^{N-1}`, leading coordinate position ascending, then
/// the tail in lexicographic code order.
pub fn points<const N: usize>(f: &Field) -> impl Iterator<Item = [Elem; N]> + '_ {
    let q = f.q() as u64;
    (0..N).flat_map(move |lead| {
        let tail = N - 1 - lead;
        (0..q.pow(tail as u32)).map(move |mut code| {
            let mut v = [Elem::ZERO; N];
            v[lead] = Elem::ONE;
            for j in (lead + 1..N).rev() {
                v[j] = Elem((code % q) as u32);
                code /= q;
            }
            v
        })
    })
}

/// The point where two distinct lines meet (cross product of coefficient vectors).
pub fn meet(f: &Field, a: [Elem; 3], b: [Elem; 3]) -> Option<[Elem; 3]> {
    let c = |i: usize, j: usize| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
    normalized(f, [c(1, 2), c(2, 0), c(0, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_each_point_once() {
        let f = Field::new(5, 1).unwrap();
        let pts: Vec<[Elem; 3]> = points::<3>(&f).collect();
        assert_eq!(pts.len() as u64, count(5, 2));
        let mut s = pts.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), pts.len());
        for p in pts {
            assert_eq!(normalized(&f, p), Some(p));
        }
    }

    #[test]
    fn meet_lies_on_both() {
        let f = Field::new(7, 1).unwrap();
        let a = [Elem(1), Elem(2), Elem(3)];
        let b = [Elem(4), Elem(0), Elem(6)];
        let p = meet(&f, a, b).unwrap();
        for l in [a, b] {
            let v = (0..3).fold(Elem::ZERO, |s, i| f.add(s, f.mul(l[i], p[i])));
            assert!(v.is_zero());
        }
    }
}
