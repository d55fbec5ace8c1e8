//! Finite computations behind the non-admissibility argument: the space
//! `R₁′ = ker T₋|R₁`, the `U`-invariants of `R₂/T₊R₁′`, explicit witnesses
//! `g`, and invariants and coinvariants of the truncations
//! `L_N = I^e_{[0,2N]} / T(I^o_{[1,2N-1]})`.
//!
//! `L_N` is too large to build densely beyond small cases (level `2N` has
//! `q^{2N}·D` coordinates), so [`Analyzer::truncated_l`] uses the
//! self-similarity of the tree: the part of `L_N` above level 1 splits into
//! `q²` copies of `L_{N-1}` indexed by the first two digits, and only the
//! subspace `Y_N = {ℓ : (u-1)ℓ ∈ k·x^r⃗ for all u}` of each copy can contribute
//! to invariants one level up. [`Analyzer::truncated_l_dense`] computes the
//! same numbers directly and serves as the cross-check.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::induction::{InducedElem, InductionCtx, InductionError, LevelRange, Parity, TermRecord};
use crate::linalg::{axpy, coinvariant_complement, joint_preimage, LinalgError, Matrix, Subspace};
use crate::localring::{DigitString, LocalRingError, RingElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("configuration does not satisfy the hypotheses of case {requested:?} (it is {actual:?})")]
    CaseMismatch {
        requested: CaseLabel,
        actual: CaseLabel,
    },
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Induction(#[from] InductionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ring(#[from] LocalRingError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

/// Which explicit construction of the witness applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "ramified-dim>1")]
    RamifiedDimGt1,
    #[serde(rename = "ramified-dim1")]
    RamifiedDim1,
    #[serde(rename = "unramified-generic")]
    UnramifiedGeneric,
    #[serde(rename = "unramified-maximal")]
    UnramifiedMaximal,
    #[serde(rename = "search-only")]
    SearchOnly,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::RamifiedDimGt1 => "ramified-dim>1",
            CaseLabel::RamifiedDim1 => "ramified-dim1",
            CaseLabel::UnramifiedGeneric => "unramified-generic",
            CaseLabel::UnramifiedMaximal => "unramified-maximal",
            CaseLabel::SearchOnly => "search-only",
        }
    }
}

/// `V`, `W` and the spaces they are built from, all in `R₁`/`R₂` coordinates.
#[derive(Clone, Debug)]
pub struct Candidates {
    pub r1_prime: Subspace,
    pub t_plus_r1: Subspace,
    pub t_plus_r1_prime: Subspace,
    pub v: Subspace,
    pub w: Subspace,
}

impl Candidates {
    pub fn witness_exists(&self) -> bool {
        self.v.dim() > self.w.dim()
    }

    pub fn dims(&self) -> BTreeMap<String, usize> {
        let r2 = self.v.ambient();
        let mut d = BTreeMap::new();
        d.insert("R1".into(), self.r1_prime.ambient());
        d.insert("R1'".into(), self.r1_prime.dim());
        d.insert("R2".into(), r2);
        d.insert("T+R1".into(), self.t_plus_r1.dim());
        d.insert("T+R1'".into(), self.t_plus_r1_prime.dim());
        d.insert("Q".into(), r2 - self.t_plus_r1_prime.dim());
        d.insert("Q^U".into(), self.v.dim() - self.t_plus_r1_prime.dim());
        d.insert("V".into(), self.v.dim());
        d.insert("W".into(), self.w.dim());
        d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitCandidate {
    pub case: CaseLabel,
    pub g: InducedElem,
    /// The index `j₀` the construction used, when it has one.
    pub j0: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub status: CheckStatus,
    pub method: String,
}

/// Evidence that `x^r⃗` and `g` span a 2-dimensional subspace of `L(σ)^U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub invariant_mod_t_plus_r1_prime: bool,
    pub outside_t_plus_r1: bool,
    pub t_plus_injective: Vec<LevelCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainLemmaReport {
    pub p: u32,
    pub f: u32,
    pub e: u32,
    pub r: Vec<u32>,
    pub chi: u32,
    pub nu: Vec<u32>,
    pub case: CaseLabel,
    pub found: bool,
    pub search_witness: bool,
    pub explicit_candidate_in_v: Option<bool>,
    pub explicit_candidate_outside_w: Option<bool>,
    pub j0: Option<usize>,
    pub g: Option<Vec<TermRecord>>,
    pub certificate: Option<Certificate>,
    pub dims: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub n: usize,
    pub method: String,
    pub dim_even: usize,
    pub dim_t_image: usize,
    pub dim_l: usize,
    pub dim_l_invariants: usize,
    pub dim_y: usize,
    pub dim_coinvariants: usize,
    pub t_minus_coinvariant_surjective: Vec<LevelCheck>,
    pub t_plus_coinvariant_vanishing: Vec<LevelCheck>,
}

/// The numbers [`Analyzer::truncated_l_dense`] computes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseTruncation {
    pub dim_even: usize,
    pub dim_t_image: usize,
    pub dim_l_invariants: usize,
    pub dim_y: usize,
    pub dim_coinvariants: usize,
}

/// Levels whose coinvariants are also computed densely in the reports.
const DENSE_COINVARIANT_LIMIT: usize = 800;

/// Quotient `Z/K` of nested subspaces with a chosen basis and a coordinate
/// map defined on all of `Z`.
struct Quotient {
    rows: Vec<Vec<Elem>>,
    tags: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
    lifts: Vec<Vec<Elem>>,
}

impl Quotient {
    fn new(field: &Field, kill: &Subspace, space: &Subspace) -> Self {
        let mut qt = Quotient {
            rows: Vec::new(),
            tags: Vec::new(),
            pivots: Vec::new(),
            lifts: Vec::new(),
        };
        let dim_q = space.dim() - kill.dim();
        for v in kill.basis() {
            qt.insert(field, v, vec![Elem::ZERO; dim_q]);
        }
        for v in space.basis() {
            let k = qt.lifts.len();
            if k == dim_q {
                break;
            }
            let mut tag = vec![Elem::ZERO; dim_q];
            tag[k] = Elem::ONE;
            if qt.insert(field, v, tag) {
                qt.lifts.push(v.clone());
            }
        }
        qt
    }

    fn insert(&mut self, field: &Field, v: &[Elem], mut tag: Vec<Elem>) -> bool {
        let mut r = v.to_vec();
        for ((row, rtag), &piv) in self.rows.iter().zip(&self.tags).zip(&self.pivots) {
            let c = r[piv];
            if !c.is_zero() {
                let neg = field.neg(c);
                axpy(field, &mut r, neg, row);
                axpy(field, &mut tag, neg, rtag);
            }
        }
        let Some(piv) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = field.inv(r[piv]).expect("pivot is nonzero");
        for x in r.iter_mut().chain(tag.iter_mut()) {
            *x = field.mul(*x, inv);
        }
        for (row, rtag) in self.rows.iter_mut().zip(self.tags.iter_mut()) {
            let c = row[piv];
            if !c.is_zero() {
                let neg = field.neg(c);
                axpy(field, row, neg, &r);
                axpy(field, rtag, neg, &tag);
            }
        }
        self.rows.push(r);
        self.tags.push(tag);
        self.pivots.push(piv);
        true
    }

    fn dim(&self) -> usize {
        self.lifts.len()
    }

    /// Coordinates of the class of `v`; `v` must lie in the space.
    fn coords(&self, field: &Field, v: &[Elem]) -> Vec<Elem> {
        let mut r = v.to_vec();
        let mut out = vec![Elem::ZERO; self.dim()];
        for ((row, tag), &piv) in self.rows.iter().zip(&self.tags).zip(&self.pivots) {
            let c = r[piv];
            if !c.is_zero() {
                axpy(field, &mut r, field.neg(c), row);
                axpy(field, &mut out, c, tag);
            }
        }
        debug_assert!(r.iter().all(|x| x.is_zero()), "vector outside the quotiented space");
        out
    }
}

/// `Y_N` with the action of every `ϖ^i[d]`, `i ≤ 2N`.
struct SelfSimilarLevel {
    dim_y: usize,
    /// Coordinates of the class of `x^r⃗` (level 0) in `Y_N`.
    x_top: Vec<Elem>,
    /// `actions[i][d]` is the matrix of `ϖ^i[d]` on `Y_N`.
    actions: Vec<Vec<Matrix>>,
    dim_invariants: usize,
}

pub struct Analyzer {
    ictx: Arc<InductionCtx>,
}

impl Analyzer {
    pub fn new(ictx: Arc<InductionCtx>) -> Self {
        Analyzer { ictx }
    }

    pub fn induction(&self) -> &Arc<InductionCtx> {
        &self.ictx
    }

    fn k(&self) -> &Arc<Field> {
        self.ictx.k()
    }

    fn dim_sigma(&self) -> usize {
        self.ictx.weight().dim()
    }

    pub fn case_label(&self) -> CaseLabel {
        let e = self.ictx.ring().e();
        let f = self.ictx.fields().f();
        if e >= 2 {
            if self.dim_sigma() > 1 {
                CaseLabel::RamifiedDimGt1
            } else {
                CaseLabel::RamifiedDim1
            }
        } else if f >= 2 {
            if self.ictx.weight().is_maximal() {
                CaseLabel::UnramifiedMaximal
            } else {
                CaseLabel::UnramifiedGeneric
            }
        } else {
            CaseLabel::SearchOnly
        }
    }

    pub fn u_generators(&self, n: usize) -> Result<Vec<RingElem>> {
        Ok(self.ictx.u_generators(n)?)
    }

    /// `ker(T₋ : R₁ → R₀)` in `R₁` coordinates.
    pub fn r1_prime(&self) -> Result<Subspace> {
        Ok(self.ictx.t_minus_matrix(1)?.kernel())
    }

    pub fn invariant_candidates(&self) -> Result<Candidates> {
        let ic = &self.ictx;
        let k = self.k();
        let r2 = LevelRange::single(2);
        let r1_prime = self.r1_prime()?;
        let tp = ic.t_plus_matrix(1)?;
        let t_plus_r1 = tp.image();
        let mut t_plus_r1_prime = Subspace::zero(k, tp.cols());
        for b in r1_prime.basis() {
            t_plus_r1_prime.insert(&tp.apply(b)?)?;
        }
        let shifted = self
            .u_generators(2)?
            .iter()
            .map(|c| Ok(ic.u_matrix(c, &r2)?.minus_identity()?))
            .collect::<Result<Vec<_>>>()?;
        let v = joint_preimage(&shifted, &t_plus_r1_prime, None)?;
        let w = v.intersect(&t_plus_r1)?;
        Ok(Candidates {
            r1_prime,
            t_plus_r1,
            t_plus_r1_prime,
            v,
            w,
        })
    }

    /// The first `j₀` in the selection order of the unramified generic
    /// construction, followed by the remaining admissible indices.
    pub fn j0_order(&self) -> Vec<usize> {
        let w = self.ictx.weight();
        let p = self.ictx.fields().p() as u64;
        let r = w.r();
        let total: u64 = r.iter().enumerate().map(|(j, &x)| x as u64 * p.pow(j as u32)).sum();
        let admissible: Vec<usize> = (0..r.len()).filter(|&j| (r[j] as u64) < p - 1).collect();
        let mut order: Vec<usize> = admissible
            .iter()
            .copied()
            .filter(|&j| p.pow(j as u32) * r[j] as u64 != total)
            .collect();
        for j in admissible {
            if !order.contains(&j) {
                order.push(j);
            }
        }
        order
    }

    fn level_two_sum<F>(&self, coeff: F) -> InducedElem
    where
        F: Fn(Elem) -> Vec<Elem>,
    {
        let k = self.k();
        let mut g = InducedElem::zero();
        for mu in self.ictx.fields().fq().elements() {
            for lam in self.ictx.fields().fq().elements() {
                g.add_term(k, &DigitString(vec![mu, lam]), Elem::ONE, &coeff(lam));
            }
        }
        g
    }

    /// The unramified generic element for a given `j₀`.
    pub fn unramified_generic_candidate(&self, j0: usize) -> InducedElem {
        let fields = self.ictx.fields();
        let w = self.ictx.weight();
        let p = fields.p() as u64;
        let exp = p.pow(j0 as u32) * (w.r()[j0] as u64 + 1);
        let xr = w.x_top();
        self.level_two_sum(|lam| {
            let c = fields.embed(fields.fq().pow(lam, exp));
            xr.iter().map(|&x| self.k().mul(x, c)).collect()
        })
    }

    /// The explicit element from the proof for `case`, verified against
    /// `V \ W` when a choice of `j₀` is involved.
    pub fn explicit_candidate(&self, case: CaseLabel, cands: Option<&Candidates>) -> Result<ExplicitCandidate> {
        let actual = self.case_label();
        if case != actual || case == CaseLabel::SearchOnly {
            return Err(AnalysisError::CaseMismatch {
                requested: case,
                actual,
            });
        }
        let w = self.ictx.weight();
        let unit_vector_at = |j: usize| -> Vec<u32> {
            (0..w.r().len()).map(|i| u32::from(i == j)).collect()
        };
        let shifted_basis = |j: usize| -> Vec<Elem> {
            let mut i = unit_vector_at(j);
            // x^{r-i'} y^{i'} has exponent vector i'.
            i.truncate(w.r().len());
            w.basis_vector(w.index_of(&i))
        };
        match case {
            CaseLabel::RamifiedDimGt1 => {
                let j0 = w.r().iter().position(|&x| x >= 1).expect("dim σ > 1");
                let v = shifted_basis(j0);
                Ok(ExplicitCandidate {
                    case,
                    g: self.level_two_sum(|_| v.clone()),
                    j0: Some(j0),
                })
            }
            CaseLabel::RamifiedDim1 => {
                let fields = self.ictx.fields();
                Ok(ExplicitCandidate {
                    case,
                    g: self.level_two_sum(|lam| vec![fields.embed(lam)]),
                    j0: None,
                })
            }
            CaseLabel::UnramifiedMaximal => {
                let v = shifted_basis(0);
                Ok(ExplicitCandidate {
                    case,
                    g: self.level_two_sum(|_| v.clone()),
                    j0: Some(0),
                })
            }
            CaseLabel::UnramifiedGeneric => {
                let order = self.j0_order();
                let owned;
                let cands = match cands {
                    Some(c) => c,
                    None => {
                        owned = self.invariant_candidates()?;
                        &owned
                    }
                };
                for &j0 in &order {
                    let g = self.unramified_generic_candidate(j0);
                    let (in_v, outside_w) = self.locate(&g, cands)?;
                    if in_v && outside_w {
                        return Ok(ExplicitCandidate {
                            case,
                            g,
                            j0: Some(j0),
                        });
                    }
                }
                let j0 = order[0];
                Ok(ExplicitCandidate {
                    case,
                    g: self.unramified_generic_candidate(j0),
                    j0: Some(j0),
                })
            }
            CaseLabel::SearchOnly => unreachable!(),
        }
    }

    /// `(g ∈ V, g ∉ W)` for an element supported on level 2.
    pub fn locate(&self, g: &InducedElem, cands: &Candidates) -> Result<(bool, bool)> {
        let v = self.ictx.to_coords(g, &LevelRange::single(2))?;
        Ok((cands.v.contains(&v)?, !cands.w.contains(&v)?))
    }

    /// `(u-1)g ∈ T₊R₁′` for every generator, evaluated on elements rather
    /// than matrices.
    pub fn directly_invariant(&self, g: &InducedElem, cands: &Candidates) -> Result<bool> {
        let k = self.k();
        let r2 = LevelRange::single(2);
        for c in self.u_generators(2)? {
            let diff = self.ictx.u_act(&c, g)?.sub(k, g);
            if !cands.t_plus_r1_prime.contains(&self.ictx.to_coords(&diff, &r2)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A basis vector of `V` outside `W`, if any.
    pub fn search_witness(&self, cands: &Candidates) -> Result<Option<InducedElem>> {
        for b in cands.v.basis() {
            if !cands.w.contains(b)? {
                return Ok(Some(self.ictx.from_coords(&LevelRange::single(2), b)?));
            }
        }
        Ok(None)
    }

    /// `T₊` is injective on `R_n`: the common `μ`-block has zero kernel, and
    /// every basis element of `R_n` maps to the block prediction.
    pub fn t_plus_injective_at(&self, n: usize) -> Result<bool> {
        let ic = &self.ictx;
        let block = ic.t_plus_block();
        if block.kernel().dim() != 0 {
            return Ok(false);
        }
        let d = self.dim_sigma();
        let q = ic.q() as usize;
        let k = self.k();
        for mu in DigitString::all(ic.q(), n) {
            for i in 0..d {
                let b = InducedElem::single(mu.clone(), ic.weight().basis_vector(i));
                let mut expect = InducedElem::zero();
                for lam in 0..q {
                    let w = &block.row(i)[lam * d..(lam + 1) * d];
                    expect.add_term(k, &mu.pushed(Elem(lam as u32)), Elem::ONE, w);
                }
                if ic.t_plus(&b)? != expect {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Certifies `dim L(σ)^U ≥ 2` from `g`: it is invariant modulo `T₊R₁′`,
    /// lies outside `T₊R₁`, and `T₊` is injective on odd levels (checked on
    /// `R₁` and `R₃`, assumed above).
    pub fn independence_certificate(&self, g: &InducedElem, cands: &Candidates) -> Result<Certificate> {
        let (in_v, outside) = self.locate(g, cands)?;
        let invariant = in_v && self.directly_invariant(g, cands)?;
        if !invariant {
            return Err(AnalysisError::CheckFailed("g is not invariant modulo T₊R₁′".into()));
        }
        if !outside {
            return Err(AnalysisError::CheckFailed("g lies in T₊R₁".into()));
        }
        let mut inj = Vec::new();
        for n in [1usize, 3] {
            if !self.t_plus_injective_at(n)? {
                return Err(AnalysisError::CheckFailed(format!("T₊ not injective on R_{n}")));
            }
            inj.push(LevelCheck {
                level: n,
                status: CheckStatus::Pass,
                method: "block kernel and full evaluation".into(),
            });
        }
        inj.push(LevelCheck {
            level: 5,
            status: CheckStatus::Assumed,
            method: "levels ≥ 5 by the general injectivity of T₊".into(),
        });
        Ok(Certificate {
            invariant_mod_t_plus_r1_prime: true,
            outside_t_plus_r1: true,
            t_plus_injective: inj,
        })
    }

    pub fn main_lemma(&self) -> Result<MainLemmaReport> {
        let ic = &self.ictx;
        let fields = ic.fields();
        let cands = self.invariant_candidates()?;
        let case = self.case_label();
        let search_witness = cands.witness_exists();
        let mut report = MainLemmaReport {
            p: fields.p(),
            f: fields.f(),
            e: ic.ring().e(),
            r: ic.weight().r().to_vec(),
            chi: ic.weight().chi(),
            nu: fields.k().coords(ic.weight().nu()),
            case,
            found: false,
            search_witness,
            explicit_candidate_in_v: None,
            explicit_candidate_outside_w: None,
            j0: None,
            g: None,
            certificate: None,
            dims: cands.dims(),
        };
        let g = if case == CaseLabel::SearchOnly {
            self.search_witness(&cands)?
        } else {
            let pc = self.explicit_candidate(case, Some(&cands))?;
            let (in_v, outside) = self.locate(&pc.g, &cands)?;
            report.explicit_candidate_in_v = Some(in_v);
            report.explicit_candidate_outside_w = Some(outside);
            report.j0 = pc.j0;
            if in_v && outside {
                Some(pc.g)
            } else {
                self.search_witness(&cands)?
            }
        };
        if let Some(g) = g {
            report.certificate = Some(self.independence_certificate(&g, &cands)?);
            report.g = Some(ic.to_records(&g));
            report.found = true;
        }
        Ok(report)
    }

    // Truncations.

    fn check_truncation_precision(&self, n: usize) -> Result<()> {
        let available = self.ictx.ring().precision();
        if (2 * n + 1) as u32 > available {
            return Err(InductionError::PrecisionExhausted {
                level: 2 * n,
                needed: 2 * n as u32 + 1,
                available,
            }
            .into());
        }
        Ok(())
    }

    /// `ϖ^i [d]` for all `i ≤ top`, `d ∈ F_q`.
    fn all_digit_elements(&self, top: usize) -> Vec<Vec<RingElem>> {
        let ring = self.ictx.ring();
        (0..=top)
            .map(|i| {
                let pi = ring.uniformizer_pow(i as u32);
                self.ictx
                    .fields()
                    .fq()
                    .elements()
                    .map(|d| ring.mul(&pi, &ring.teichmuller(d)))
                    .collect()
            })
            .collect()
    }

    fn base_level(&self) -> Result<SelfSimilarLevel> {
        let w = self.ictx.weight();
        let k = self.k();
        let d = self.dim_sigma();
        let xr = Subspace::echelon(k, d, [w.x_top().as_slice()])?;
        let fq = self.ictx.fields().fq();
        let shifted = self
            .ictx
            .fields()
            .fq_prime_basis()
            .into_iter()
            .map(|lam| Ok(w.unipotent_matrix(lam).minus_identity()?))
            .collect::<Result<Vec<_>>>()?;
        let y = joint_preimage(&shifted, &xr, None)?;
        let quotient = Quotient::new(k, &Subspace::zero(k, d), &y);
        let act = |lam: Elem| -> Result<Matrix> {
            let rows: Vec<Vec<Elem>> = quotient
                .lifts
                .iter()
                .map(|v| quotient.coords(k, &w.act_unipotent(lam, v)))
                .collect();
            Ok(Matrix::from_rows(k, quotient.dim(), rows)?)
        };
        let actions = vec![fq.elements().map(act).collect::<Result<Vec<_>>>()?];
        let gens: Vec<Matrix> = self
            .ictx
            .fields()
            .fq_prime_basis()
            .into_iter()
            .map(|lam| actions[0][lam.0 as usize].clone())
            .collect();
        let dim_invariants = crate::linalg::fixed_space(k, quotient.dim(), &gens)?.dim();
        Ok(SelfSimilarLevel {
            dim_y: quotient.dim(),
            x_top: quotient.coords(k, &w.x_top()),
            actions,
            dim_invariants,
        })
    }

    /// Block transition of `c` at level `n ≥ 1`: for each two-digit prefix
    /// `β`, the new prefix and the matrix by which the tail moves.
    fn transitions(&self, c: &RingElem, n: usize, prev: &SelfSimilarLevel) -> Result<Vec<(usize, Matrix)>> {
        let ring = self.ictx.ring();
        let q = self.ictx.q();
        let k = self.k();
        DigitString::all(q, 2)
            .iter()
            .map(|beta| {
                let z = ring.add(&ring.from_digits(beta)?, c);
                let ds = ring.digits(&z, 2 * n as u32 + 1)?;
                let target = ds.truncated(2).index(q);
                let mut m = Matrix::identity(k, prev.dim_y);
                for (i, &dig) in ds.digits()[2..].iter().enumerate() {
                    if !dig.is_zero() {
                        m = m.then(&prev.actions[i][dig.0 as usize])?;
                    }
                }
                Ok((target, m))
            })
            .collect()
    }

    /// Matrix of `c` on `C_n = σ ⊕ (Y_{n-1})^{q²}`.
    fn ambient_action(&self, c: &RingElem, n: usize, prev: &SelfSimilarLevel) -> Result<Matrix> {
        let d = self.dim_sigma();
        let y = prev.dim_y;
        let k = self.k();
        let q2 = (self.ictx.q() as usize).pow(2);
        let dim = d + q2 * y;
        let mut m = Matrix::zeros(k, dim, dim);
        let res = self.ictx.ring().residue(c);
        let u = self.ictx.weight().unipotent_matrix(res);
        for i in 0..d {
            m.row_mut(i)[..d].copy_from_slice(u.row(i));
        }
        for (beta, (target, t)) in self.transitions(c, n, prev)?.into_iter().enumerate() {
            for j in 0..y {
                let row = d + beta * y + j;
                let start = d + target * y;
                m.row_mut(row)[start..start + y].copy_from_slice(t.row(j));
            }
        }
        Ok(m)
    }

    fn next_level(&self, n: usize, prev: &SelfSimilarLevel) -> Result<SelfSimilarLevel> {
        let ic = &self.ictx;
        let k = self.k();
        let d = self.dim_sigma();
        let q = ic.q() as usize;
        let y = prev.dim_y;
        let dim = d + q * q * y;

        // T applied to the basis of R₁.
        let tminus = ic.t_minus_block();
        let tplus = ic.t_plus_block();
        let mut t_r1 = Subspace::zero(k, dim);
        for mu0 in 0..q {
            for i in 0..d {
                let mut v = vec![Elem::ZERO; dim];
                v[..d].copy_from_slice(tminus.row(mu0 * d + i));
                for lam in 0..q {
                    let c = tplus.get(i, lam * d);
                    let start = d + (mu0 * q + lam) * y;
                    axpy(k, &mut v[start..start + y], c, &prev.x_top);
                }
                t_r1.insert(&v)?;
            }
        }
        let mut x_top = vec![Elem::ZERO; dim];
        x_top[..d].copy_from_slice(&ic.weight().x_top());
        let mut target = t_r1.clone();
        target.insert(&x_top)?;

        let digit_elems = self.all_digit_elements(2 * n);
        let gen_positions: Vec<usize> = ic
            .fields()
            .fq_prime_basis()
            .into_iter()
            .map(|l| l.0 as usize)
            .collect();
        let mut ambient: Vec<Vec<Option<Matrix>>> = vec![vec![None; q]; 2 * n + 1];
        let mut shifted = Vec::new();
        for (i, row) in ambient.iter_mut().enumerate() {
            for &s in &gen_positions {
                let m = self.ambient_action(&digit_elems[i][s], n, prev)?;
                shifted.push(m.minus_identity()?);
                row[s] = Some(m);
            }
        }
        let z = joint_preimage(&shifted, &target, None)?;
        let quotient = Quotient::new(k, &t_r1, &z);
        let dim_y = quotient.dim();

        let mut actions = Vec::with_capacity(2 * n + 1);
        for (i, row) in ambient.into_iter().enumerate() {
            let mut per_digit = Vec::with_capacity(q);
            for (dig, cached) in row.into_iter().enumerate() {
                let m = match cached {
                    Some(m) => m,
                    None => self.ambient_action(&digit_elems[i][dig], n, prev)?,
                };
                let rows: Vec<Vec<Elem>> = quotient
                    .lifts
                    .iter()
                    .map(|v| Ok(quotient.coords(k, &m.apply(v)?)))
                    .collect::<Result<_>>()?;
                per_digit.push(Matrix::from_rows(k, dim_y, rows)?);
            }
            actions.push(per_digit);
        }
        let gens: Vec<Matrix> = (0..=2 * n)
            .flat_map(|i| gen_positions.iter().map(move |&s| (i, s)))
            .map(|(i, s)| actions[i][s].clone())
            .collect();
        let dim_invariants = crate::linalg::fixed_space(k, dim_y, &gens)?.dim();
        Ok(SelfSimilarLevel {
            dim_y,
            x_top: quotient.coords(k, &x_top),
            actions,
            dim_invariants,
        })
    }

    /// `(dim Y_N, dim L_N^U)` for `N = 0..=n` by the self-similar recursion.
    pub fn invariant_dims(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        self.check_truncation_precision(n)?;
        let mut level = self.base_level()?;
        let mut out = vec![(level.dim_y, level.dim_invariants)];
        for m in 1..=n {
            level = self.next_level(m, &level)?;
            out.push((level.dim_y, level.dim_invariants));
        }
        Ok(out)
    }

    /// `E(x) = Σ_μ (y^r⃗-coefficient of x_μ)` is the coinvariant functional
    /// on every `R_n`. Returns the scalars `(s₋, s₊)` with
    /// `E∘T₋ = s₋·E` and `E∘T₊ = s₊·E`, or `None` when `T₋` or `T₊` is not
    /// a multiple of `E` on the coinvariants.
    fn coinvariant_scalars(&self) -> (Option<Elem>, Option<Elem>) {
        let ic = &self.ictx;
        let k = self.k();
        let d = self.dim_sigma();
        let q = ic.q() as usize;
        let top = d - 1;
        let tminus = ic.t_minus_block();
        let tplus = ic.t_plus_block();
        let w = ic.weight();
        let invariant = ic.fields().fq_prime_basis().into_iter().all(|t| {
            let u = w.unipotent_matrix(t);
            (0..d).all(|i| u.get(i, top) == if i == top { Elem::ONE } else { Elem::ZERO })
        });
        if !invariant {
            return (None, None);
        }
        let proportional = |values: Vec<(usize, Elem)>| -> Option<Elem> {
            let s = values.iter().find(|(i, _)| *i == top).map(|&(_, v)| v)?;
            values
                .iter()
                .all(|&(i, v)| i == top || v.is_zero())
                .then_some(s)
        };
        let minus: Vec<(usize, Elem)> = (0..q * d)
            .map(|row| (row % d, tminus.get(row, top)))
            .collect();
        let s_minus = proportional(minus.clone()).filter(|s| {
            minus.iter().filter(|(i, _)| *i == top).all(|(_, v)| v == s)
        });
        let plus: Vec<(usize, Elem)> = (0..d)
            .map(|i| {
                let v = (0..q).fold(Elem::ZERO, |acc, lam| k.add(acc, tplus.get(i, lam * d + top)));
                (i, v)
            })
            .collect();
        (s_minus, proportional(plus))
    }

    /// Codimension of `Σ_u (u-1)R_n` in `R_n`, computed densely.
    pub fn level_coinvariant_dim(&self, n: usize) -> Result<usize> {
        let ic = &self.ictx;
        let range = LevelRange::single(n);
        let ops = self
            .u_generators(n)?
            .iter()
            .map(|c| Ok(ic.u_matrix(c, &range)?))
            .collect::<Result<Vec<_>>>()?;
        let dim = ic.level_dim(n);
        Ok(dim - coinvariant_complement(self.k(), dim, &ops)?.dim())
    }

    /// `σ` has one-dimensional coinvariants under the unipotent group, so
    /// every `R_n` does too (it is induced from it).
    fn sigma_coinvariants_one_dim(&self) -> Result<bool> {
        let w = self.ictx.weight();
        let ops: Vec<Matrix> = self
            .ictx
            .fields()
            .fq_prime_basis()
            .into_iter()
            .map(|l| w.unipotent_matrix(l).clone())
            .collect();
        let d = w.dim();
        Ok(d - coinvariant_complement(self.k(), d, &ops)?.dim() == 1)
    }

    fn coinvariant_checks(&self, n: usize) -> Result<(Vec<LevelCheck>, Vec<LevelCheck>, usize)> {
        let (s_minus, s_plus) = self.coinvariant_scalars();
        let sigma_ok = self.sigma_coinvariants_one_dim()?;
        let mut level_ok = BTreeMap::new();
        let mut level_method = BTreeMap::new();
        for lvl in 0..=2 * n {
            let (ok, method) = if self.ictx.level_dim(lvl) <= DENSE_COINVARIANT_LIMIT {
                (self.level_coinvariant_dim(lvl)? == 1, "dense")
            } else {
                (sigma_ok, "induced")
            };
            level_ok.insert(lvl, ok);
            level_method.insert(lvl, method);
        }
        let status = |b: bool| if b { CheckStatus::Pass } else { CheckStatus::Fail };
        let mut minus = Vec::new();
        let mut plus = Vec::new();
        for lvl in (1..2 * n).step_by(2) {
            let m_ok = level_ok[&(lvl - 1)] && s_minus.is_some_and(|s| !s.is_zero());
            minus.push(LevelCheck {
                level: lvl,
                status: status(m_ok),
                method: format!("functional; R_{} coinvariants {}", lvl - 1, level_method[&(lvl - 1)]),
            });
            let p_ok = level_ok[&(lvl + 1)] && s_plus.is_some_and(|s| s.is_zero());
            plus.push(LevelCheck {
                level: lvl,
                status: status(p_ok),
                method: format!("functional; R_{} coinvariants {}", lvl + 1, level_method[&(lvl + 1)]),
            });
        }
        // Right exactness: (L_N)_U is the cokernel of the N×(N+1) bidiagonal
        // map between the one-dimensional level coinvariants.
        let k = self.k();
        let rows: Vec<Vec<Elem>> = (0..n)
            .map(|i| {
                let mut r = vec![Elem::ZERO; n + 1];
                r[i] = s_minus.unwrap_or(Elem::ZERO);
                r[i + 1] = s_plus.unwrap_or(Elem::ZERO);
                r
            })
            .collect();
        let rank = Matrix::from_rows(k, n + 1, rows)?.rank();
        Ok((minus, plus, n + 1 - rank))
    }

    fn level_dims(&self, n: usize) -> (usize, usize) {
        let even = (0..=2 * n).step_by(2).map(|l| self.ictx.level_dim(l)).sum();
        let odd = (1..2 * n).step_by(2).map(|l| self.ictx.level_dim(l)).sum();
        (even, odd)
    }

    pub fn truncated_l(&self, n: usize) -> Result<TruncationReport> {
        self.check_truncation_precision(n)?;
        if self.ictx.t_plus_block().kernel().dim() != 0 {
            return Err(AnalysisError::CheckFailed("T₊ block is not injective".into()));
        }
        let (dim_even, dim_odd) = self.level_dims(n);
        let dims = self.invariant_dims(n)?;
        let (dim_y, dim_inv) = dims[n];
        let (minus, plus, dim_coinv) = self.coinvariant_checks(n)?;
        Ok(TruncationReport {
            n,
            method: "self-similar".into(),
            dim_even,
            dim_t_image: dim_odd,
            dim_l: dim_even - dim_odd,
            dim_l_invariants: dim_inv,
            dim_y,
            dim_coinvariants: dim_coinv,
            t_minus_coinvariant_surjective: minus,
            t_plus_coinvariant_vanishing: plus,
        })
    }

    /// Direct computation on `I^e_{[0,2N]}`; only feasible for small cases.
    pub fn truncated_l_dense(&self, n: usize) -> Result<DenseTruncation> {
        self.check_truncation_precision(n)?;
        let ic = &self.ictx;
        let k = self.k();
        let even = LevelRange::new(Parity::Even, 0, 2 * n)?;
        let dim_even = ic.range_dim(&even);
        let mut t_image = Subspace::zero(k, dim_even);
        for lvl in (1..2 * n).step_by(2) {
            let m = ic.matrix_of(|x| ic.t(x), &LevelRange::single(lvl), &even)?;
            for i in 0..m.rows() {
                t_image.insert(m.row(i))?;
            }
        }
        let ops = self
            .u_generators(2 * n)?
            .iter()
            .map(|c| Ok(ic.u_matrix(c, &even)?))
            .collect::<Result<Vec<_>>>()?;
        let shifted = ops
            .iter()
            .map(|m| Ok(m.minus_identity()?))
            .collect::<Result<Vec<_>>>()?;
        let inv = joint_preimage(&shifted, &t_image, None)?;
        let mut with_x = t_image.clone();
        let x = ic.to_coords(
            &InducedElem::single(DigitString::empty(), ic.weight().x_top()),
            &even,
        )?;
        with_x.insert(&x)?;
        let y = joint_preimage(&shifted, &with_x, None)?;
        let co = coinvariant_complement(k, dim_even, &ops)?.sum(&t_image)?;
        Ok(DenseTruncation {
            dim_even,
            dim_t_image: t_image.dim(),
            dim_l_invariants: inv.dim() - t_image.dim(),
            dim_y: y.dim() - t_image.dim(),
            dim_coinvariants: dim_even - co.dim(),
        })
    }
}
