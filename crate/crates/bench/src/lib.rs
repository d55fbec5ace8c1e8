//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use gl2ind::{Elem, FieldCtx, InductionCtx, LocalRingCtx, WeightCtx};

/// Builds the induction context for `(p, f, e, r)` with trivial twist.
pub fn induction(p: u32, f: u32, e: u32, r: &[u32], precision: u32) -> Arc<InductionCtx> {
    let fields = Arc::new(FieldCtx::new(p, f, 1).expect("valid field"));
    let weight = Arc::new(WeightCtx::new(fields.clone(), r.to_vec(), 0, Elem::ONE).expect("valid weight"));
    let ring = Arc::new(LocalRingCtx::new(fields.fq().clone(), e, precision).expect("valid ring"));
    Arc::new(InductionCtx::new(weight, ring).expect("valid induction"))
}

/// The four canonical configurations plus the larger one.
pub const CONFIGS: &[(&str, u32, u32, u32, &[u32])] = &[
    ("ramified-dim-gt1", 3, 1, 2, &[1]),
    ("ramified-dim1", 3, 1, 2, &[0]),
    ("unramified-generic", 3, 2, 1, &[0, 0]),
    ("unramified-maximal", 2, 2, 1, &[1, 1]),
    ("q9-r22", 3, 2, 1, &[2, 2]),
];
