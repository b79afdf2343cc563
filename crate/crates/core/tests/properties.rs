use proptest::prelude::*;

use num_bigint::BigInt;
use quadfib::config::{build_l, LinearForm};
use quadfib::gf::{Elem, Embedding, Field};
use quadfib::lefschetz::{balanced_digits, fit_polys};
use quadfib::quadform::{QPoly, QuadForm};
use quadfib::symbols::{line_residue, FunctionClass};

const FIELDS: [(u32, u32); 7] = [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (11, 1)];

fn field() -> impl Strategy<Value = Field> {
    (0..FIELDS.len()).prop_map(|i| Field::new(FIELDS[i].0, FIELDS[i].1).unwrap())
}

fn with_elems(k: usize) -> impl Strategy<Value = (Field, Vec<Elem>)> {
    field().prop_flat_map(move |f| {
        let q = f.q();
        (Just(f), proptest::collection::vec((0..q).prop_map(Elem), k))
    })
}

proptest! {
    #[test]
    fn field_axioms((f, v) in with_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        // Frobenius is additive and multiplicative
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

    #[test]
    fn quadratic_character_is_multiplicative((f, v) in with_elems(2)) {
        let (a, b) = (v[0], v[1]);
        prop_assert_eq!(f.quad_char(f.mul(a, b)), f.quad_char(a) * f.quad_char(b));
        prop_assert_eq!(f.is_square(a), f.quad_char(a) >= 0);
    }

    #[test]
    fn embedding_is_a_ring_map((f, v) in with_elems(2), m in 2u32..=3) {
        prop_assume!(f.q().pow(m) <= 1 << 12);
        let big = f.extension(m).unwrap();
        let emb = Embedding::new(&f, &big).unwrap();
        let (a, b) = (v[0], v[1]);
        prop_assert_eq!(emb.map(f.add(a, b)), big.add(emb.map(a), emb.map(b)));
        prop_assert_eq!(emb.map(f.mul(a, b)), big.mul(emb.map(a), emb.map(b)));
    }

    #[test]
    fn closed_form_count_matches_enumeration(
        (f, entries) in field().prop_filter("small", |f| f.q() <= 9).prop_flat_map(|f| {
            let q = f.q();
            (Just(f), proptest::collection::vec(0..q, 15))
        }),
        n in 1usize..=5,
    ) {
        let mut terms = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                terms.push((i, j, Elem(entries[k])));
                k += 1;
            }
        }
        let form = QuadForm::from_terms(&f, n, &terms);
        prop_assume!(!form.is_zero());
        let closed = form.count_projective_points(&f, 1).unwrap();
        let brute = form.count_brute(&f, 1, 1 << 20).unwrap();
        prop_assert_eq!(closed, BigInt::from(brute));
    }

    #[test]
    fn general_position_ignores_scaling((f, v) in with_elems(8)) {
        prop_assume!(v[6] != Elem::ZERO && v[7] != Elem::ZERO);
        let l1 = LinearForm::new(v[0], v[1], v[2]);
        let l2 = LinearForm::new(v[3], v[4], v[5]);
        let Ok(cfg) = build_l(&f, l1, l2) else { return Ok(()) };
        let scaled: Vec<LinearForm> = cfg
            .lines
            .iter()
            .enumerate()
            .map(|(i, l)| l.scale(&f, if i % 2 == 0 { v[6] } else { v[7] }))
            .collect();
        let mut rev = scaled.clone();
        rev.reverse();
        let gp = quadfib::config::general_position(&f, &cfg.lines).unwrap();
        prop_assert_eq!(gp, cfg.general_position);
        prop_assert_eq!(quadfib::config::general_position(&f, &scaled).unwrap(), gp);
        prop_assert_eq!(quadfib::config::general_position(&f, &rev).unwrap(), gp);
    }

    #[test]
    fn residues_only_see_square_classes(
        (f, v) in with_elems(16).prop_filter("odd q, few elements", |(f, _)| f.q() <= 27),
        target in 0usize..3,
    ) {
        let a = f.smallest_nonsquare();
        let lf = |i: usize| LinearForm::new(v[i], v[i + 1], v[i + 2]);
        prop_assume!((0..5).all(|k| !lf(3 * k).is_zero()));
        let l1 = LinearForm::new(Elem::ONE, Elem::ONE, Elem::ONE);
        let cfg = build_l(&f, l1, l1).unwrap();
        let base = quadfib::symbols::xi(&f, a, &cfg);
        // h = l_a l_b / (l_c l_d), degree 0
        let c = if v[15].is_zero() { Elem::ONE } else { v[15] };
        let h = FunctionClass::new(&f, c, &[(lf(0), 1), (lf(3), 1), (lf(6), -1), (lf(9), -1)]).unwrap();
        let mut twisted = base.clone();
        twisted[target] = twisted[target].mul(&f, &h.pow(&f, 2));
        // half the time a line where the residue is nonzero
        let line = if v[14].0 % 2 == 0 { cfg.lines[2 + v[13].0 as usize % 8] } else { lf(12) };
        let r0 = line_residue(&f, &base, &cfg, &line);
        let r1 = line_residue(&f, &twisted, &cfg, &line);
        prop_assert_eq!(r0.residue.is_some(), r1.residue.is_some());
        let ram = |r: &quadfib::symbols::LineResidue| r.quaternion.as_ref().map(|q| q.ramified.iter().map(|x| x.0).collect::<Vec<_>>());
        prop_assert_eq!(ram(&r0), ram(&r1));
    }

    #[test]
    fn balanced_digits_round_trip(n in -10_000_000i64..10_000_000, q in 3i64..40) {
        let big_q = BigInt::from(q);
        let d = balanced_digits(&BigInt::from(n), &big_q);
        let back = d.iter().rev().fold(BigInt::from(0), |acc, x| acc * &big_q + x);
        prop_assert_eq!(back, BigInt::from(n));
        prop_assert!(d.iter().all(|x| x.clone() * 2 <= big_q && x.clone() * 2 > -big_q.clone()));
    }

    #[test]
    fn fit_recovers_nonnegative_polynomials(c in proptest::collection::vec(0i64..500, 1..6), split in 0i64..50) {
        // period-2 part on the top weight: split points over F_{q^2}
        let top = c.len() - 1;
        prop_assume!(c[top] > 0);
        let polys: Vec<(u32, QPoly)> = (1..=8u32)
            .map(|m| {
                let mut v = c.clone();
                if m % 2 == 0 {
                    v[top] += 2 * split;
                }
                (m, QPoly::new(v))
            })
            .collect();
        let fit = fit_polys("p", 5, &polys, &[1, 2], &[1, 2, 3, 4, 5, 6]).unwrap();
        prop_assert!(fit.ok);
        prop_assert_eq!(fit.weights[top].coefficients.clone(), vec![(1, c[top], 1), (2, split, 1)]);
    }
}
