mod common;

use std::sync::Arc;

use common::ctx;
use gl2ind::analysis::{AnalysisError, Analyzer, CheckStatus};
use gl2ind::induction::InductionError;

fn analyzer(p: u32, f: u32, e: u32, r: Vec<u32>, chi: u32, nu: u32, prec: u32) -> Analyzer {
    Analyzer::new(Arc::new(ctx(p, f, e, r, chi, nu, prec)))
}

#[test]
fn self_similar_agrees_with_dense() {
    let cases = [
        (3, 1, 2, vec![1], 0, 1, 2),
        (3, 1, 2, vec![0], 1, 2, 2),
        (2, 2, 1, vec![1, 1], 1, 2, 2),
        (2, 1, 2, vec![1], 0, 1, 2),
        (3, 2, 1, vec![0, 0], 0, 1, 1),
        (3, 2, 1, vec![1, 0], 3, 5, 1),
        (3, 1, 1, vec![1], 0, 1, 2),
        (5, 1, 1, vec![2], 0, 1, 1),
    ];
    for (p, f, e, r, chi, nu, top) in cases {
        let a = analyzer(p, f, e, r.clone(), chi, nu, 7);
        for n in 1..=top {
            let dense = a.truncated_l_dense(n).unwrap();
            let rep = a.truncated_l(n).unwrap();
            let tag = format!("p={p} f={f} e={e} r={r:?} N={n}");
            assert_eq!(rep.dim_even, dense.dim_even, "{tag}");
            assert_eq!(rep.dim_t_image, dense.dim_t_image, "{tag}");
            assert_eq!(rep.dim_l_invariants, dense.dim_l_invariants, "{tag}");
            assert_eq!(rep.dim_y, dense.dim_y, "{tag}");
            assert_eq!(rep.dim_coinvariants, dense.dim_coinvariants, "{tag}");
        }
    }
}

#[test]
fn first_truncation_dimension() {
    for (p, f, e, r) in [(3, 1, 2, vec![1]), (2, 2, 1, vec![1, 1]), (3, 2, 1, vec![0, 0])] {
        let a = analyzer(p, f, e, r, 0, 1, 3);
        let d = a.induction().weight().dim();
        let q = a.induction().q() as usize;
        assert_eq!(a.truncated_l(1).unwrap().dim_l, d + q * q * d - q * d);
    }
}

#[test]
fn canonical_invariants_grow() {
    let cases = [
        (3, 1, 2, vec![1], 0, 1),
        (3, 1, 2, vec![0], 0, 1),
        (3, 2, 1, vec![0, 0], 0, 1),
        (2, 2, 1, vec![1, 1], 0, 1),
        (3, 1, 2, vec![1], 1, 2),
        (3, 1, 2, vec![0], 1, 2),
        (3, 2, 1, vec![0, 0], 3, 5),
        (2, 2, 1, vec![1, 1], 1, 2),
    ];
    for (p, f, e, r, chi, nu) in cases {
        let a = analyzer(p, f, e, r.clone(), chi, nu, 7);
        let mut last = 0;
        for n in 1..=3 {
            let rep = a.truncated_l(n).unwrap();
            assert!(rep.dim_l_invariants >= 2 && rep.dim_l_invariants >= last, "r={r:?} N={n}");
            last = rep.dim_l_invariants;
            assert_eq!(rep.dim_coinvariants, 1);
            for c in rep.t_minus_coinvariant_surjective.iter().chain(&rep.t_plus_coinvariant_vanishing) {
                assert_eq!(c.status, CheckStatus::Pass, "r={r:?} N={n} level {}", c.level);
            }
            assert_eq!(rep.t_plus_coinvariant_vanishing.len(), n);
        }
    }
}

#[test]
fn level_coinvariants_are_one_dimensional() {
    for (p, f, e, r) in [(3, 1, 2, vec![1]), (2, 2, 1, vec![1, 1]), (3, 1, 1, vec![2])] {
        let a = analyzer(p, f, e, r, 0, 1, 4);
        for n in 0..=3 {
            assert_eq!(a.level_coinvariant_dim(n).unwrap(), 1);
        }
    }
}

#[test]
fn truncation_needs_precision() {
    let a = analyzer(3, 1, 2, vec![1], 0, 1, 4);
    assert!(matches!(
        a.truncated_l(2),
        Err(AnalysisError::Induction(InductionError::PrecisionExhausted { .. }))
    ));
}
