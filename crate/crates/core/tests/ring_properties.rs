use std::sync::Arc;

use gl2ind::gf::{Elem, Field};
use gl2ind::localring::{DigitString, LocalRingCtx, RingElem};
use proptest::prelude::*;

const PREC: u32 = 6;

fn ring(i: usize) -> LocalRingCtx {
    let configs: [(u32, u32, Option<Vec<i64>>, u32); 9] = [
        (2, 1, None, 1),
        (3, 1, None, 1),
        (2, 2, None, 1),
        (3, 2, None, 1),
        (3, 1, None, 2),
        (2, 1, None, 2),
        (5, 1, None, 3),
        (2, 2, None, 2),
        (3, 1, Some(vec![3, 3]), 2),
    ];
    let (p, f, eis, e) = &configs[i % configs.len()];
    let fq = Arc::new(Field::new(*p, *f).unwrap());
    match eis {
        Some(c) => LocalRingCtx::with_eisenstein(fq, c, PREC).unwrap(),
        None => LocalRingCtx::new(fq, *e, PREC).unwrap(),
    }
}

fn digit_string(r: &LocalRingCtx, raw: &[u32]) -> DigitString {
    DigitString(raw.iter().map(|&d| Elem(d % r.q())).collect())
}

fn elem(r: &LocalRingCtx, raw: &[u32]) -> RingElem {
    r.from_digits(&digit_string(r, raw)).unwrap()
}

fn digits_strategy() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), PREC as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_axioms(i in 0usize..9, a in digits_strategy(), b in digits_strategy(), c in digits_strategy()) {
        let r = ring(i);
        let (a, b, c) = (elem(&r, &a), elem(&r, &b), elem(&r, &c));
        prop_assert_eq!(r.add(&a, &b), r.add(&b, &a));
        prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
        prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
        prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
        prop_assert!(r.add(&a, &r.neg(&a)).is_zero());
        prop_assert_eq!(r.mul(&a, &r.one()), a.clone());
    }

    #[test]
    fn teichmuller_is_multiplicative_and_fixed_by_q_power(i in 0usize..9, a in any::<u32>(), b in any::<u32>()) {
        let r = ring(i);
        let fq = r.residue_field().clone();
        let (a, b) = (Elem(a % r.q()), Elem(b % r.q()));
        let (ta, tb) = (r.teichmuller(a), r.teichmuller(b));
        prop_assert_eq!(r.mul(&ta, &tb), r.teichmuller(fq.mul(a, b)));
        let mut pow = r.one();
        for _ in 0..r.q() {
            pow = r.mul(&pow, &ta);
        }
        prop_assert_eq!(pow, ta.clone());
        prop_assert_eq!(r.residue(&ta), a);
    }

    #[test]
    fn digits_round_trip(i in 0usize..9, raw in digits_strategy(), n in 1u32..=PREC) {
        let r = ring(i);
        let s = digit_string(&r, &raw[..n as usize]);
        let a = r.from_digits(&s).unwrap();
        prop_assert_eq!(r.digits(&a, n).unwrap(), s);
        let full = elem(&r, &raw);
        let back = r.from_digits(&r.digits(&full, n).unwrap()).unwrap();
        prop_assert!(r.eq_mod(&r.truncate(&back, n), &full));
    }

    #[test]
    fn residue_is_a_ring_homomorphism(i in 0usize..9, a in digits_strategy(), b in digits_strategy()) {
        let r = ring(i);
        let fq = r.residue_field().clone();
        let (a, b) = (elem(&r, &a), elem(&r, &b));
        prop_assert_eq!(r.residue(&r.add(&a, &b)), fq.add(r.residue(&a), r.residue(&b)));
        prop_assert_eq!(r.residue(&r.mul(&a, &b)), fq.mul(r.residue(&a), r.residue(&b)));
    }

    #[test]
    fn uniformizer_division_inverts_multiplication(i in 0usize..9, a in digits_strategy(), k in 0u32..PREC) {
        let r = ring(i);
        let a = elem(&r, &a);
        let pk = r.uniformizer_pow(k);
        prop_assert_eq!(r.valuation(&pk), k);
        let mut x = r.mul(&a, &pk);
        for _ in 0..k {
            x = r.divide_by_uniformizer(&x).unwrap();
        }
        prop_assert_eq!(x.precision(), PREC - k);
        prop_assert!(r.eq_mod(&x, &a));
    }
}

/// `[a] mod p²` over `Z` for a prime residue field: `a^{p^k}` stabilises.
fn integer_teichmuller(a: u64, p: u64) -> u64 {
    let m = p * p;
    let mut t = a % m;
    for _ in 0..4 {
        let mut next = 1u64;
        for _ in 0..p {
            next = next * t % m;
        }
        t = next;
    }
    t
}

#[test]
fn carry_digit_matches_integer_teichmuller_lifts() {
    for p in [2u64, 3, 5, 7] {
        let r = LocalRingCtx::new(Arc::new(Field::new(p as u32, 1).unwrap()), 1, 2).unwrap();
        for a in 0..p {
            for b in 0..p {
                let m = p * p;
                let s = (integer_teichmuller(a, p) + integer_teichmuller(b, p)) % m;
                let d0 = (a + b) % p;
                let diff = (s + m - integer_teichmuller(d0, p)) % m;
                assert_eq!(diff % p, 0);
                let carry = diff / p;
                let got = r.witt_carry(Elem(a as u32), Elem(b as u32), 2).unwrap();
                assert_eq!(got.digits(), &[Elem(d0 as u32), Elem(carry as u32)], "p={p} a={a} b={b}");
            }
        }
    }
}

/// `(x^p + y^p - (x+y)^p)/p` evaluated in `F_q` from integer binomials.
fn carry_polynomial(fq: &Field, x: Elem, y: Elem) -> Elem {
    let p = fq.p() as u64;
    let binom = |n: u64, k: u64| -> u64 { (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i) };
    (1..p).fold(Elem::ZERO, |acc, k| {
        let c = fq.from_int(-((binom(p, k) / p) as i64));
        fq.add(acc, fq.mul(c, fq.mul(fq.pow(x, k), fq.pow(y, p - k))))
    })
}

#[test]
fn unramified_carry_digit_matches_polynomial() {
    for (p, f) in [(2u32, 2u32), (3, 2), (2, 1), (3, 1), (2, 3)] {
        let fq = Arc::new(Field::new(p, f).unwrap());
        let r = LocalRingCtx::new(fq.clone(), 1, 3).unwrap();
        let shift = |z: Elem| fq.pow(z, (p as u64).pow(f - 1));
        for a in fq.elements() {
            for b in fq.elements() {
                let ds = r.witt_carry(a, b, 2).unwrap();
                assert_eq!(ds.digits()[0], fq.add(a, b));
                let expect = carry_polynomial(&fq, shift(a), shift(b));
                assert_eq!(ds.digits()[1], expect, "q={} a={a:?} b={b:?}", fq.order());
                assert_eq!(r.witt_carry_closed_form(a, b), expect);
            }
        }
    }
}

#[test]
fn ramified_teichmuller_sum_has_no_first_carry() {
    for (p, e) in [(3u32, 2u32), (2, 2), (5, 3)] {
        let fq = Arc::new(Field::new(p, 1).unwrap());
        let r = LocalRingCtx::new(fq.clone(), e, 4).unwrap();
        for a in fq.elements() {
            for b in fq.elements() {
                let lhs = r.add(&r.teichmuller(a), &r.teichmuller(b));
                let rhs = r.teichmuller(fq.add(a, b));
                assert!(r.eq_mod(&r.truncate(&lhs, 2), &rhs), "p={p} e={e}");
            }
        }
    }
}
