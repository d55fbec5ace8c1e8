#![allow(dead_code)]

use std::sync::Arc;

use gl2ind::gf::{Elem, FieldCtx};
use gl2ind::induction::{InducedElem, InductionCtx};
use gl2ind::localring::{DigitString, LocalRingCtx, RingElem};
use gl2ind::weight::WeightCtx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ctx(p: u32, f: u32, e: u32, r: Vec<u32>, chi: u32, nu: u32, prec: u32) -> InductionCtx {
    let fields = Arc::new(FieldCtx::new(p, f, 1).unwrap());
    let w = Arc::new(WeightCtx::new(fields.clone(), r, chi, Elem(nu)).unwrap());
    let ring = Arc::new(LocalRingCtx::new(fields.fq().clone(), e, prec).unwrap());
    InductionCtx::new(w, ring).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ring(c: &InductionCtx, rng: &mut ChaCha8Rng) -> RingElem {
    let q = c.q();
    let n = c.ring().precision() as usize;
    let digits = DigitString((0..n).map(|_| Elem(rng.random_range(0..q))).collect());
    c.ring().from_digits(&digits).unwrap()
}

pub fn random_elem(c: &InductionCtx, levels: &[usize], terms: usize, rng: &mut ChaCha8Rng) -> InducedElem {
    let q = c.q();
    let kq = c.k().order();
    let d = c.weight().dim();
    let mut x = InducedElem::zero();
    for _ in 0..terms {
        let n = levels[rng.random_range(0..levels.len())];
        let mu = DigitString((0..n).map(|_| Elem(rng.random_range(0..q))).collect());
        let w: Vec<Elem> = (0..d).map(|_| Elem(rng.random_range(0..kq))).collect();
        x.add_term(c.k(), &mu, Elem::ONE, &w);
    }
    x
}
