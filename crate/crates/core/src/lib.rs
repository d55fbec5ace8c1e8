//! Exact computations with compact inductions of mod-p weights of GL₂ over
//! a p-adic field: finite fields, truncated local rings, weights, Hecke
//! operators and invariant subspaces.

pub mod gf;
pub mod localring;
pub mod linalg;
pub mod weight;
pub mod induction;
pub mod analysis;

pub use analysis::{
    AnalysisError, Analyzer, CaseLabel, Candidates, Certificate, CheckStatus, LevelCheck, MainLemmaReport,
    TruncationReport,
};
pub use gf::{Elem, Field, FieldCtx, GfError};
pub use induction::{InducedElem, InductionCtx, InductionError, LevelRange, Parity, TermRecord};
pub use linalg::{LinalgError, Matrix, Subspace};
pub use localring::{DigitString, LocalRingCtx, LocalRingError, RingElem};
pub use weight::{WeightCtx, WeightError};
