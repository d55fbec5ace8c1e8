use std::sync::Arc;

use gl2ind::gf::{Elem, Field, FieldCtx};
use proptest::prelude::*;

const ORDERS: &[(u32, u32)] = &[(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3)];

fn field(i: usize) -> Arc<Field> {
    let (p, n) = ORDERS[i % ORDERS.len()];
    Arc::new(Field::new(p, n).unwrap())
}

/// Schoolbook product of coefficient vectors reduced by the monic modulus.
fn oracle_mul(f: &Field, a: Elem, b: Elem) -> Elem {
    let p = f.p() as u64;
    let n = f.degree() as usize;
    let (ca, cb) = (f.coords(a), f.coords(b));
    let mut prod = vec![0u64; 2 * n];
    for i in 0..n {
        for j in 0..n {
            prod[i + j] = (prod[i + j] + ca[i] as u64 * cb[j] as u64) % p;
        }
    }
    let m = f.modulus();
    for deg in (n..2 * n).rev() {
        let c = prod[deg];
        if c != 0 {
            for (k, &mk) in m.iter().enumerate().take(n) {
                let idx = deg - n + k;
                prod[idx] = (prod[idx] + (p - c) * mk as u64) % p;
            }
            prod[deg] = 0;
        }
    }
    let coords: Vec<i64> = prod[..n].iter().map(|&x| x as i64).collect();
    f.from_coords(&coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn field_axioms(i in 0usize..10, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = field(i);
        let q = f.order();
        let (a, b, c) = (Elem(a % q), Elem(b % q), Elem(c % q));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(f.inv(a).unwrap(), a), Elem::ONE);
            prop_assert_eq!(f.div(f.mul(b, a), a).unwrap(), b);
        }
    }

    #[test]
    fn multiplication_matches_schoolbook(i in 0usize..10, a in any::<u32>(), b in any::<u32>()) {
        let f = field(i);
        let q = f.order();
        let (a, b) = (Elem(a % q), Elem(b % q));
        prop_assert_eq!(f.mul(a, b), oracle_mul(&f, a, b));
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism(i in 0usize..10, a in any::<u32>(), b in any::<u32>(), j in 0u32..4) {
        let f = field(i);
        let q = f.order();
        let (a, b) = (Elem(a % q), Elem(b % q));
        let fr = |x| f.frobenius(x, j);
        prop_assert_eq!(fr(f.add(a, b)), f.add(fr(a), fr(b)));
        prop_assert_eq!(fr(f.mul(a, b)), f.mul(fr(a), fr(b)));
        prop_assert_eq!(f.frobenius(a, f.degree()), a);
        let mut naive = a;
        for _ in 0..j {
            naive = f.pow(naive, f.p() as u64);
        }
        prop_assert_eq!(fr(a), naive);
    }

    #[test]
    fn power_sums_vanish_below_q_minus_one(i in 0usize..10) {
        let f = field(i);
        let q = f.order() as u64;
        for e in 0..q {
            let s = f.elements().fold(Elem::ZERO, |acc, t| f.add(acc, f.pow(t, e)));
            let expect = if e == q - 1 { f.neg(Elem::ONE) } else { Elem::ZERO };
            prop_assert_eq!(s, expect, "exponent {}", e);
        }
    }

    #[test]
    fn field_sum_is_minus_top_coefficient(i in 0usize..6, coeffs in prop::collection::vec(any::<u32>(), 1..10)) {
        let (p, n) = [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)][i];
        let ctx = FieldCtx::new(p, n, 1).unwrap();
        let f = ctx.fq();
        let q = f.order() as usize;
        let mut poly: Vec<Elem> = coeffs.iter().map(|&c| Elem(c % q as u32)).collect();
        poly.truncate(q);
        let brute = f.elements().fold(Elem::ZERO, |acc, t| f.add(acc, f.eval_poly(&poly, t)));
        prop_assert_eq!(ctx.sum_over_fq(&poly).unwrap(), brute);
        let top = if poly.len() == q { poly[q - 1] } else { Elem::ZERO };
        prop_assert_eq!(brute, f.neg(top));
    }

    #[test]
    fn embedding_is_a_ring_homomorphism(i in 0usize..3, a in any::<u32>(), b in any::<u32>()) {
        let (p, f, m) = [(2, 1, 2), (3, 1, 2), (2, 2, 2)][i];
        let ctx = FieldCtx::new(p, f, m).unwrap();
        let fq = ctx.fq();
        let k = ctx.k();
        let (a, b) = (Elem(a % fq.order()), Elem(b % fq.order()));
        prop_assert_eq!(ctx.embed(fq.add(a, b)), k.add(ctx.embed(a), ctx.embed(b)));
        prop_assert_eq!(ctx.embed(fq.mul(a, b)), k.mul(ctx.embed(a), ctx.embed(b)));
        prop_assert_eq!(ctx.restrict(ctx.embed(a)), Some(a));
    }
}

#[test]
fn field_sum_rejects_high_degree() {
    let ctx = FieldCtx::new(3, 1, 1).unwrap();
    let poly = vec![Elem::ONE; 4];
    assert!(ctx.sum_over_fq(&poly).is_err());
}
