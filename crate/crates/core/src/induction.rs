//! Elements of the positive part `⊕_{n≥0} R_n(σ)` of the compact induction,
//! the actions of `U` and `α`, and the Hecke operators `T₊`, `T₋`, `T`.
//!
//! An element is a finite sum of symbols `[(ϖ^n, μ), w]` with `μ ∈ I_n`
//! written as a [`DigitString`] of length `n`, so the level of a term is the
//! length of its key. Coordinates on `R_n` follow the order of
//! [`DigitString::all`] (digit 0 most significant), then the weight basis.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field, FieldCtx, GfError};
use crate::linalg::{LinalgError, Matrix};
use crate::localring::{DigitString, LocalRingCtx, LocalRingError, RingElem};
use crate::weight::{WeightCtx, WeightError, WeightVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InductionError {
    #[error("T₊ is only implemented on levels ≥ 1")]
    LevelZeroUnsupported,
    #[error("T and T₋ are only defined here on levels ≥ 1")]
    LevelZeroInput,
    #[error("level {level} needs precision {needed}, context has {available}")]
    PrecisionExhausted {
        level: usize,
        needed: u32,
        available: u32,
    },
    #[error("element has support outside the requested level range")]
    OutsideRange,
    #[error("weight vector has length {got}, expected {expected}")]
    WrongWeightLength { expected: usize, got: usize },
    #[error("residue field of the local ring differs from the weight's field")]
    MixedContexts,
    #[error("invalid level range {lo}..={hi}")]
    BadRange { lo: usize, hi: usize },
    #[error("malformed record: {0}")]
    BadRecord(String),
    #[error(transparent)]
    Ring(#[from] LocalRingError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] GfError),
}

pub type Result<T> = std::result::Result<T, InductionError>;

/// A finite sum `Σ [(ϖ^n, μ), w]`. Zero weight vectors are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InducedElem {
    terms: BTreeMap<DigitString, WeightVector>,
}

impl InducedElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(mu: DigitString, w: WeightVector) -> Self {
        let mut x = Self::zero();
        if w.iter().any(|c| !c.is_zero()) {
            x.terms.insert(mu, w);
        }
        x
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DigitString, &WeightVector)> {
        self.terms.iter()
    }

    pub fn get(&self, mu: &DigitString) -> Option<&WeightVector> {
        self.terms.get(mu)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorted, duplicate-free support levels.
    pub fn levels(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.terms.keys().map(|k| k.len()).collect();
        l.dedup();
        l
    }

    pub fn max_level(&self) -> Option<usize> {
        self.terms.keys().next_back().map(|k| k.len())
    }

    /// Adds `c·w` at key `mu`.
    pub fn add_term(&mut self, k: &Field, mu: &DigitString, c: Elem, w: &[Elem]) {
        if c.is_zero() || w.iter().all(|x| x.is_zero()) {
            return;
        }
        match self.terms.get_mut(mu) {
            Some(cur) => {
                crate::linalg::axpy(k, cur, c, w);
                if cur.iter().all(|x| x.is_zero()) {
                    self.terms.remove(mu);
                }
            }
            None => {
                let v: Vec<Elem> = w.iter().map(|&x| k.mul(c, x)).collect();
                self.terms.insert(mu.clone(), v);
            }
        }
    }

    /// `self += c·other`
    pub fn add_scaled(&mut self, k: &Field, c: Elem, other: &InducedElem) {
        for (mu, w) in &other.terms {
            self.add_term(k, mu, c, w);
        }
    }

    pub fn add(&self, k: &Field, other: &InducedElem) -> InducedElem {
        let mut out = self.clone();
        out.add_scaled(k, Elem::ONE, other);
        out
    }

    pub fn sub(&self, k: &Field, other: &InducedElem) -> InducedElem {
        let mut out = self.clone();
        out.add_scaled(k, k.neg(Elem::ONE), other);
        out
    }

    pub fn scale(&self, k: &Field, c: Elem) -> InducedElem {
        let mut out = InducedElem::zero();
        out.add_scaled(k, c, self);
        out
    }

    /// The part supported on level `n`.
    pub fn level_part(&self, n: usize) -> InducedElem {
        InducedElem {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.len() == n)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    All,
}

/// The levels `lo..=hi` of the given parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelRange {
    pub parity: Parity,
    pub lo: usize,
    pub hi: usize,
}

impl LevelRange {
    pub fn new(parity: Parity, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(InductionError::BadRange { lo, hi });
        }
        Ok(LevelRange { parity, lo, hi })
    }

    pub fn single(n: usize) -> Self {
        LevelRange {
            parity: Parity::All,
            lo: n,
            hi: n,
        }
    }

    pub fn levels(&self) -> Vec<usize> {
        (self.lo..=self.hi)
            .filter(|n| match self.parity {
                Parity::Even => n % 2 == 0,
                Parity::Odd => n % 2 == 1,
                Parity::All => true,
            })
            .collect()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.levels().contains(&n)
    }
}

/// One term of an element in portable form: digits and coefficients as
/// coordinate lists over the prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub level: usize,
    pub digits: Vec<Vec<u32>>,
    pub coefficients: Vec<Vec<u32>>,
}

#[derive(Debug)]
pub struct InductionCtx {
    fields: Arc<FieldCtx>,
    ring: Arc<LocalRingCtx>,
    weight: Arc<WeightCtx>,
    /// `[λ][i] = (-λ)^{i⃗}` embedded in `K`.
    neg_powers: Vec<Vec<Elem>>,
    /// `[λ] = ν·u_λ(y^r⃗)`.
    lowered: Vec<WeightVector>,
}

impl InductionCtx {
    pub fn new(weight: Arc<WeightCtx>, ring: Arc<LocalRingCtx>) -> Result<Self> {
        let fields = Arc::clone(weight.fields());
        if **ring.residue_field() != **fields.fq() {
            return Err(InductionError::MixedContexts);
        }
        let fq = fields.fq();
        let k = fields.k();
        let neg_powers = fq
            .elements()
            .map(|lam| {
                let neg = fq.neg(lam);
                weight
                    .basis()
                    .iter()
                    .map(|i| fields.embed(fields.monomial_exp(neg, i)))
                    .collect()
            })
            .collect();
        let y = weight.y_top();
        let lowered = fq
            .elements()
            .map(|lam| {
                weight
                    .act_unipotent(lam, &y)
                    .into_iter()
                    .map(|c| k.mul(c, weight.nu()))
                    .collect()
            })
            .collect();
        Ok(InductionCtx {
            fields,
            ring,
            weight,
            neg_powers,
            lowered,
        })
    }

    pub fn fields(&self) -> &Arc<FieldCtx> {
        &self.fields
    }

    pub fn ring(&self) -> &Arc<LocalRingCtx> {
        &self.ring
    }

    pub fn weight(&self) -> &Arc<WeightCtx> {
        &self.weight
    }

    pub fn k(&self) -> &Arc<Field> {
        self.fields.k()
    }

    pub fn q(&self) -> u32 {
        self.fields.q()
    }

    /// Highest level whose elements still have room for one carry.
    pub fn max_level(&self) -> usize {
        self.ring.precision() as usize - 1
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.max_level() {
            return Err(InductionError::PrecisionExhausted {
                level: n,
                needed: n as u32 + 1,
                available: self.ring.precision(),
            });
        }
        Ok(())
    }

    pub fn level_dim(&self, n: usize) -> usize {
        (self.q() as usize).pow(n as u32) * self.weight.dim()
    }

    pub fn range_dim(&self, range: &LevelRange) -> usize {
        range.levels().iter().map(|&n| self.level_dim(n)).sum()
    }

    /// `[(ϖ^n, μ), e_i]` in basis order.
    pub fn basis_r(&self, n: usize) -> Result<Vec<InducedElem>> {
        self.check_level(n)?;
        let d = self.weight.dim();
        let mut out = Vec::with_capacity(self.level_dim(n));
        for mu in DigitString::all(self.q(), n) {
            for i in 0..d {
                out.push(InducedElem::single(mu.clone(), self.weight.basis_vector(i)));
            }
        }
        Ok(out)
    }

    pub fn check_weight(&self, w: &[Elem]) -> Result<()> {
        if w.len() != self.weight.dim() {
            return Err(InductionError::WrongWeightLength {
                expected: self.weight.dim(),
                got: w.len(),
            });
        }
        Ok(())
    }

    /// `[[1, c], [0, 1]]·x`.
    pub fn u_act(&self, c: &RingElem, x: &InducedElem) -> Result<InducedElem> {
        let k = self.k();
        let mut out = InducedElem::zero();
        for (mu, w) in x.terms() {
            let n = mu.len();
            self.check_level(n)?;
            if (c.precision() as usize) < n + 1 {
                return Err(InductionError::PrecisionExhausted {
                    level: n,
                    needed: n as u32 + 1,
                    available: c.precision(),
                });
            }
            let z = self.ring.add(&self.ring.from_digits(mu)?, c);
            let ds = self.ring.digits(&z, n as u32 + 1)?;
            let t = ds.digits()[n];
            let key = ds.truncated(n);
            let w2 = self.weight.act_unipotent(t, w);
            out.add_term(k, &key, Elem::ONE, &w2);
        }
        Ok(out)
    }

    /// `α = diag(ϖ, 1)`: prepends a zero digit.
    pub fn alpha_act(&self, x: &InducedElem) -> Result<InducedElem> {
        let mut out = InducedElem::zero();
        for (mu, w) in x.terms() {
            self.check_level(mu.len() + 1)?;
            out.terms.insert(mu.shifted(), w.clone());
        }
        Ok(out)
    }

    /// `α²`.
    pub fn alpha2_act(&self, x: &InducedElem) -> Result<InducedElem> {
        self.alpha_act(&self.alpha_act(x)?)
    }

    /// `Σ_i u_i (-λ)^{i⃗}` for `w = Σ u_i e_i`.
    fn lowered_coefficient(&self, lam: Elem, w: &[Elem]) -> Elem {
        let k = self.k();
        w.iter()
            .zip(&self.neg_powers[lam.0 as usize])
            .fold(Elem::ZERO, |acc, (&u, &pw)| k.add(acc, k.mul(u, pw)))
    }

    pub fn t_plus(&self, x: &InducedElem) -> Result<InducedElem> {
        let k = self.k();
        let xr = self.weight.x_top();
        let mut out = InducedElem::zero();
        for (mu, w) in x.terms() {
            if mu.is_empty() {
                return Err(InductionError::LevelZeroUnsupported);
            }
            self.check_level(mu.len() + 1)?;
            for lam in self.fields.fq().elements() {
                let s = self.lowered_coefficient(lam, w);
                out.add_term(k, &mu.pushed(lam), s, &xr);
            }
        }
        Ok(out)
    }

    pub fn t_minus(&self, x: &InducedElem) -> Result<InducedElem> {
        let k = self.k();
        let top = self.weight.dim() - 1;
        let mut out = InducedElem::zero();
        for (mu, w) in x.terms() {
            let n = mu.len();
            if n == 0 {
                return Err(InductionError::LevelZeroInput);
            }
            let last = mu.digits()[n - 1];
            out.add_term(k, &mu.truncated(n - 1), w[top], &self.lowered[last.0 as usize]);
        }
        Ok(out)
    }

    pub fn t(&self, x: &InducedElem) -> Result<InducedElem> {
        if x.terms().any(|(mu, _)| mu.is_empty()) {
            return Err(InductionError::LevelZeroInput);
        }
        let plus = self.t_plus(x)?;
        let minus = self.t_minus(x)?;
        Ok(plus.add(self.k(), &minus))
    }

    /// The `D × qD` matrix of `T₊` on one `μ`-block: row `i`, column
    /// `λ·D + j`. `T₊` on `R_n` is this block repeated `q^n` times.
    pub fn t_plus_block(&self) -> Matrix {
        let d = self.weight.dim();
        let q = self.q() as usize;
        let mut m = Matrix::zeros(self.k(), d, q * d);
        for lam in 0..q {
            for i in 0..d {
                m.set(i, lam * d, self.neg_powers[lam][i]);
            }
        }
        m
    }

    /// The `qD × D` matrix of `T₋` from the children of one `μ` to `μ`.
    pub fn t_minus_block(&self) -> Matrix {
        let d = self.weight.dim();
        let q = self.q() as usize;
        let mut m = Matrix::zeros(self.k(), q * d, d);
        for lam in 0..q {
            m.row_mut(lam * d + d - 1)
                .copy_from_slice(&self.lowered[lam]);
        }
        m
    }

    /// Offsets of each level's block in range coordinates.
    fn offsets(&self, range: &LevelRange) -> Vec<(usize, usize)> {
        let mut off = 0;
        range
            .levels()
            .into_iter()
            .map(|n| {
                let o = off;
                off += self.level_dim(n);
                (n, o)
            })
            .collect()
    }

    pub fn to_coords(&self, x: &InducedElem, range: &LevelRange) -> Result<Vec<Elem>> {
        let offs = self.offsets(range);
        let d = self.weight.dim();
        let mut v = vec![Elem::ZERO; self.range_dim(range)];
        for (mu, w) in x.terms() {
            let off = offs
                .iter()
                .find(|(n, _)| *n == mu.len())
                .map(|&(_, o)| o)
                .ok_or(InductionError::OutsideRange)?;
            let base = off + mu.index(self.q()) * d;
            v[base..base + d].copy_from_slice(w);
        }
        Ok(v)
    }

    pub fn from_coords(&self, range: &LevelRange, v: &[Elem]) -> Result<InducedElem> {
        let dim = self.range_dim(range);
        if v.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            }
            .into());
        }
        let d = self.weight.dim();
        let mut out = InducedElem::zero();
        for (n, off) in self.offsets(range) {
            for (idx, mu) in DigitString::all(self.q(), n).into_iter().enumerate() {
                let base = off + idx * d;
                let w = &v[base..base + d];
                if w.iter().any(|c| !c.is_zero()) {
                    out.terms.insert(mu, w.to_vec());
                }
            }
        }
        Ok(out)
    }

    /// Matrix of a linear operator between level ranges, obtained by
    /// applying it to every basis element of the domain.
    pub fn matrix_of<F>(&self, op: F, domain: &LevelRange, codomain: &LevelRange) -> Result<Matrix>
    where
        F: Fn(&InducedElem) -> Result<InducedElem>,
    {
        let rows: Vec<Vec<Elem>> = domain
            .levels()
            .into_iter()
            .map(|n| self.basis_r(n))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .map(|b| op(&b).and_then(|img| self.to_coords(&img, codomain)))
            .collect::<Result<_>>()?;
        Ok(Matrix::from_rows(self.k(), self.range_dim(codomain), rows)?)
    }

    pub fn t_plus_matrix(&self, n: usize) -> Result<Matrix> {
        self.matrix_of(|x| self.t_plus(x), &LevelRange::single(n), &LevelRange::single(n + 1))
    }

    pub fn t_minus_matrix(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            return Err(InductionError::LevelZeroInput);
        }
        self.matrix_of(|x| self.t_minus(x), &LevelRange::single(n), &LevelRange::single(n - 1))
    }

    /// `T` on `R_n` into `R_{n-1} ⊕ R_{n+1}`.
    pub fn t_matrix(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            return Err(InductionError::LevelZeroInput);
        }
        let parity = if (n - 1).is_multiple_of(2) { Parity::Even } else { Parity::Odd };
        let codomain = LevelRange::new(parity, n - 1, n + 1)?;
        self.matrix_of(|x| self.t(x), &LevelRange::single(n), &codomain)
    }

    pub fn u_matrix(&self, c: &RingElem, range: &LevelRange) -> Result<Matrix> {
        self.matrix_of(|x| self.u_act(c, x), range, range)
    }

    /// Additive generators `ϖ^i [λ_s]` (`0 ≤ i ≤ n`, `λ_s` running over the
    /// F_p-basis of F_q) of `O/ϖ^{n+1}`.
    pub fn u_generators(&self, n: usize) -> Result<Vec<RingElem>> {
        if n + 1 > self.ring.precision() as usize {
            return Err(InductionError::PrecisionExhausted {
                level: n,
                needed: n as u32 + 1,
                available: self.ring.precision(),
            });
        }
        let mut out = Vec::new();
        for i in 0..=n {
            let pi_i = self.ring.uniformizer_pow(i as u32);
            for lam in self.fields.fq_prime_basis() {
                out.push(self.ring.mul(&pi_i, &self.ring.teichmuller(lam)));
            }
        }
        Ok(out)
    }

    pub fn to_records(&self, x: &InducedElem) -> Vec<TermRecord> {
        let fq = self.fields.fq();
        let k = self.k();
        x.terms()
            .map(|(mu, w)| TermRecord {
                level: mu.len(),
                digits: mu.digits().iter().map(|&d| fq.coords(d)).collect(),
                coefficients: w.iter().map(|&c| k.coords(c)).collect(),
            })
            .collect()
    }

    pub fn from_records(&self, records: &[TermRecord]) -> Result<InducedElem> {
        let fq = self.fields.fq();
        let k = self.k();
        let to_elem = |field: &Field, coords: &[u32]| -> Result<Elem> {
            if coords.iter().any(|&c| c >= field.p()) {
                return Err(InductionError::BadRecord("coordinate not reduced mod p".into()));
            }
            let c: Vec<i64> = coords.iter().map(|&c| c as i64).collect();
            Ok(field.from_coords(&c)?)
        };
        let mut out = InducedElem::zero();
        for r in records {
            if r.digits.len() != r.level {
                return Err(InductionError::BadRecord(format!(
                    "level {} with {} digits",
                    r.level,
                    r.digits.len()
                )));
            }
            self.check_level(r.level)?;
            let mu = DigitString(
                r.digits
                    .iter()
                    .map(|d| to_elem(fq, d))
                    .collect::<Result<_>>()?,
            );
            let w: Vec<Elem> = r
                .coefficients
                .iter()
                .map(|c| to_elem(k, c))
                .collect::<Result<_>>()?;
            self.check_weight(&w)?;
            out.add_term(k, &mu, Elem::ONE, &w);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ictx(p: u32, f: u32, e: u32, r: Vec<u32>, nu: u32, prec: u32) -> InductionCtx {
        let fields = Arc::new(FieldCtx::new(p, f, 1).unwrap());
        let w = Arc::new(WeightCtx::new(fields.clone(), r, 0, Elem(nu)).unwrap());
        let ring = Arc::new(LocalRingCtx::new(fields.fq().clone(), e, prec).unwrap());
        InductionCtx::new(w, ring).unwrap()
    }

    fn ds(d: &[u32]) -> DigitString {
        DigitString(d.iter().map(|&x| Elem(x)).collect())
    }

    #[test]
    fn basis_sizes() {
        let c = ictx(3, 1, 1, vec![0], 1, 4);
        assert_eq!(c.basis_r(0).unwrap().len(), 1);
        assert_eq!(c.basis_r(2).unwrap().len(), 9);
        let c4 = ictx(2, 2, 1, vec![1, 1], 1, 3);
        assert_eq!(c4.basis_r(1).unwrap().len(), 16);
        assert!(c.basis_r(4).is_err());
    }

    #[test]
    fn u_act_examples() {
        let c = ictx(3, 1, 1, vec![1], 1, 3);
        let y = c.weight().y_top();
        let x = InducedElem::single(ds(&[0]), y.clone());
        assert_eq!(c.u_act(&c.ring().zero(), &x).unwrap(), x);
        let one = c.ring().one();
        assert_eq!(c.u_act(&one, &x).unwrap(), InducedElem::single(ds(&[1]), y.clone()));
        // [2] + [1] = 0 exactly, so no carry reaches the weight.
        let x2 = InducedElem::single(ds(&[2]), y.clone());
        assert_eq!(c.u_act(&one, &x2).unwrap(), InducedElem::single(ds(&[0]), y.clone()));
        // [1] + [1] = 2 = [2] + 3·[1]: the carry acts by u_1.
        let x1 = InducedElem::single(ds(&[1]), y.clone());
        assert_eq!(
            c.u_act(&one, &x1).unwrap(),
            InducedElem::single(ds(&[2]), vec![Elem(1), Elem(1)])
        );
    }

    #[test]
    fn alpha_prepends_zero_digit() {
        let c = ictx(3, 1, 1, vec![0], 1, 4);
        let x = InducedElem::single(ds(&[2]), vec![Elem(1)]);
        assert_eq!(c.alpha_act(&x).unwrap(), InducedElem::single(ds(&[0, 2]), vec![Elem(1)]));
        let z = InducedElem::single(ds(&[]), vec![Elem(1)]);
        assert_eq!(c.alpha_act(&z).unwrap(), InducedElem::single(ds(&[0]), vec![Elem(1)]));
    }

    #[test]
    fn t_plus_examples() {
        let c = ictx(3, 1, 1, vec![0], 1, 4);
        let x = InducedElem::single(ds(&[1]), vec![Elem(1)]);
        let mut expect = InducedElem::zero();
        for l in 0..3 {
            expect.add_term(c.k(), &ds(&[1, l]), Elem::ONE, &[Elem(1)]);
        }
        assert_eq!(c.t_plus(&x).unwrap(), expect);

        let c1 = ictx(3, 1, 1, vec![1], 1, 4);
        let y = InducedElem::single(ds(&[0]), c1.weight().y_top());
        let mut expect = InducedElem::zero();
        for l in 0..3u32 {
            let neg = (3 - l) % 3;
            expect.add_term(c1.k(), &ds(&[0, l]), Elem(neg), &c1.weight().x_top());
        }
        assert_eq!(c1.t_plus(&y).unwrap(), expect);
        let z = InducedElem::single(ds(&[]), vec![Elem(1), Elem(0)]);
        assert_eq!(c1.t_plus(&z), Err(InductionError::LevelZeroUnsupported));
    }

    #[test]
    fn t_minus_examples() {
        let c = ictx(3, 1, 1, vec![1], 2, 4);
        let y = c.weight().y_top();
        let x = InducedElem::single(ds(&[0]), y.clone());
        assert_eq!(
            c.t_minus(&x).unwrap(),
            InducedElem::single(ds(&[]), vec![Elem(0), Elem(2)])
        );
        let xr = InducedElem::single(ds(&[1]), c.weight().x_top());
        assert!(c.t_minus(&xr).unwrap().is_zero());
        // μ₁ = 2: ν·(2x + y) with ν = 2.
        let x2 = InducedElem::single(ds(&[0, 2]), y);
        assert_eq!(
            c.t_minus(&x2).unwrap(),
            InducedElem::single(ds(&[0]), vec![Elem(1), Elem(2)])
        );
        let z = InducedElem::single(ds(&[]), vec![Elem(1), Elem(0)]);
        assert_eq!(c.t_minus(&z), Err(InductionError::LevelZeroInput));
        assert_eq!(c.t(&z), Err(InductionError::LevelZeroInput));
    }

    #[test]
    fn coordinates_round_trip() {
        let c = ictx(2, 2, 1, vec![1, 0], 1, 4);
        let range = LevelRange::new(Parity::Even, 0, 2).unwrap();
        let mut x = InducedElem::zero();
        x.add_term(c.k(), &ds(&[]), Elem::ONE, &[Elem(1), Elem(3)]);
        x.add_term(c.k(), &ds(&[2, 3]), Elem::ONE, &[Elem(2), Elem(0)]);
        let v = c.to_coords(&x, &range).unwrap();
        assert_eq!(v.len(), 2 + 32);
        assert_eq!(c.from_coords(&range, &v).unwrap(), x);
        let odd = InducedElem::single(ds(&[1]), vec![Elem(1), Elem(0)]);
        assert_eq!(c.to_coords(&odd, &range), Err(InductionError::OutsideRange));
    }

    #[test]
    fn records_round_trip() {
        let c = ictx(3, 2, 1, vec![1, 0], 1, 3);
        let mut x = InducedElem::zero();
        x.add_term(c.k(), &ds(&[4, 7]), Elem::ONE, &[Elem(5), Elem(0)]);
        x.add_term(c.k(), &ds(&[]), Elem::ONE, &[Elem(0), Elem(8)]);
        let recs = c.to_records(&x);
        let json = serde_json::to_string(&recs).unwrap();
        let back: Vec<TermRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(c.from_records(&back).unwrap(), x);
        let bad = vec![TermRecord {
            level: 1,
            digits: vec![],
            coefficients: vec![vec![0, 0]],
        }];
        assert!(matches!(c.from_records(&bad), Err(InductionError::BadRecord(_))));
    }

    #[test]
    fn generators_count() {
        let c = ictx(3, 1, 1, vec![0], 1, 4);
        assert_eq!(c.u_generators(2).unwrap().len(), 3);
        let c4 = ictx(2, 2, 1, vec![0, 0], 1, 4);
        assert_eq!(c4.u_generators(2).unwrap().len(), 6);
        assert!(c4.u_generators(4).is_err());
    }

    #[test]
    fn blocks_match_level_one_matrices() {
        let c = ictx(3, 1, 2, vec![2], 2, 4);
        let tp = c.t_plus_matrix(1).unwrap();
        let block = c.t_plus_block();
        let (d, q) = (3, 3);
        for mu in 0..q {
            for i in 0..d {
                for col in 0..q * d {
                    assert_eq!(tp.get(mu * d + i, mu * q * d + col), block.get(i, col));
                }
            }
        }
        let tm = c.t_minus_matrix(1).unwrap();
        assert_eq!(tm, c.t_minus_block());
    }
}
