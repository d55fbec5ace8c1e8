//! Truncated rings of integers `O/ϖ^N` of a p-adic field with residue degree
//! `f` and ramification index `e`.
//!
//! `O` is presented as `GR[x]/E(x)` where `GR = W(F_q)` is truncated to the
//! Galois ring `GR(p^M, f) = (Z/p^M)[t]/(lift of the F_q modulus)` and `E` is
//! an Eisenstein polynomial with integer coefficients; `ϖ` is the class of
//! `x` (or `-E(0)` when `e = 1`). An element is stored as `e` Galois-ring
//! coefficients, each with `f` integer coordinates. The coefficient of `x^i`
//! is reduced modulo `p^⌈(prec-i)/e⌉`, which makes the representation
//! canonical at a given precision.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field, GfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalRingError {
    #[error("ramification index must be at least 1")]
    ZeroRamification,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("working modulus p^{exponent} is too large for 31-bit coefficients")]
    TooLarge { exponent: u32 },
    #[error("element is not divisible by the uniformizer")]
    NotDivisible,
    #[error("precision exhausted: need {needed}, have {available}")]
    PrecisionExhausted { needed: u32, available: u32 },
    #[error("Teichmüller iteration did not stabilise")]
    NonConvergence,
    #[error(transparent)]
    Field(#[from] GfError),
}

pub type Result<T> = std::result::Result<T, LocalRingError>;

/// An element of `O/ϖ^prec`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingElem {
    coeffs: Vec<u64>,
    prec: u32,
}

impl RingElem {
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Coordinates: entry `i*f + j` is the `t^j` part of the `x^i` coefficient.
    pub fn raw_coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// `Σ_i ϖ^i [λ_i]`, an element of the representative set `I_n` with `n` the
/// length. Ordered by length first, then lexicographically with digit 0 most
/// significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitString(pub Vec<Elem>);

impl DigitString {
    pub fn empty() -> Self {
        DigitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[Elem] {
        &self.0
    }

    /// `[μ]_n`: the first `n` digits.
    pub fn truncated(&self, n: usize) -> DigitString {
        DigitString(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `ϖ·μ`: a zero digit in front.
    pub fn shifted(&self) -> DigitString {
        let mut d = Vec::with_capacity(self.0.len() + 1);
        d.push(Elem::ZERO);
        d.extend_from_slice(&self.0);
        DigitString(d)
    }

    pub fn pushed(&self, digit: Elem) -> DigitString {
        let mut d = self.0.clone();
        d.push(digit);
        DigitString(d)
    }

    /// Every digit string of length `n` over a field of order `q`, in order.
    pub fn all(q: u32, n: usize) -> Vec<DigitString> {
        let total = (q as usize).pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut d = vec![Elem::ZERO; n];
                for slot in d.iter_mut().rev() {
                    *slot = Elem((idx % q as usize) as u32);
                    idx /= q as usize;
                }
                DigitString(d)
            })
            .collect()
    }

    /// Position of this string in [`DigitString::all`].
    pub fn index(&self, q: u32) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, d| acc * q as usize + d.0 as usize)
    }
}

impl PartialOrd for DigitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DigitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", d.0)?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

fn inv_mod_int(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quo = old_r / r;
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub struct LocalRingCtx {
    p: u32,
    f: u32,
    e: u32,
    n: u32,
    m: u32,
    pm: u64,
    pow_p: Vec<u64>,
    fq: Arc<Field>,
    /// Monic lift of the residue-field modulus, low to high (length f+1).
    gr_modulus: Vec<u64>,
    /// `E = x^e + Σ_{i<e} eis[i] x^i`, reduced mod p^M.
    eis: Vec<u64>,
    /// Integer coefficients of `E` as given.
    eis_int: Vec<i64>,
    uniformizer: RingElem,
    p_over_pi: Vec<u64>,
    teich: Vec<Vec<u64>>,
}

impl fmt::Debug for LocalRingCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalRingCtx")
            .field("p", &self.p)
            .field("f", &self.f)
            .field("e", &self.e)
            .field("precision", &self.n)
            .field("eisenstein", &self.eis_int)
            .finish()
    }
}

impl LocalRingCtx {
    /// Context with the default Eisenstein polynomial `x^e - p`.
    pub fn new(fq: Arc<Field>, e: u32, precision: u32) -> Result<Self> {
        if e == 0 {
            return Err(LocalRingError::ZeroRamification);
        }
        let mut eis = vec![0i64; e as usize];
        eis[0] = -(fq.p() as i64);
        Self::with_eisenstein(fq, &eis, precision)
    }

    /// `eisenstein` lists the non-leading coefficients `c_0, …, c_{e-1}` of
    /// the monic polynomial `x^e + Σ c_i x^i`.
    pub fn with_eisenstein(fq: Arc<Field>, eisenstein: &[i64], precision: u32) -> Result<Self> {
        let e = eisenstein.len() as u32;
        if e == 0 {
            return Err(LocalRingError::ZeroRamification);
        }
        if precision == 0 {
            return Err(LocalRingError::ZeroPrecision);
        }
        let p = fq.p();
        let f = fq.degree();
        let pi = p as i64;
        if eisenstein.iter().any(|c| c.rem_euclid(pi) != 0) {
            return Err(LocalRingError::NotEisenstein(
                "lower coefficients must be divisible by p".into(),
            ));
        }
        if eisenstein[0].rem_euclid(pi * pi) == 0 {
            return Err(LocalRingError::NotEisenstein(
                "constant coefficient must not be divisible by p^2".into(),
            ));
        }
        let m = precision.div_ceil(e) + 1;
        let pm = (p as u64)
            .checked_pow(m)
            .filter(|&v| v < (1u64 << 31))
            .ok_or(LocalRingError::TooLarge { exponent: m })?;
        let pow_p: Vec<u64> = (0..=m).map(|k| (p as u64).pow(k)).collect();
        let eis: Vec<u64> = eisenstein
            .iter()
            .map(|&c| c.rem_euclid(pm as i64) as u64)
            .collect();
        let gr_modulus: Vec<u64> = fq.modulus().iter().map(|&c| c as u64).collect();

        // p/ϖ = -u0^{-1} (ϖ^{e-1} + Σ_{j≥1} c_j ϖ^{j-1}), where c_0 = p·u0.
        let u0 = (eisenstein[0] / pi).rem_euclid(pm as i64) as u64;
        let u0_inv = inv_mod_int(u0, pm).expect("u0 is a p-adic unit");
        let neg_u0_inv = (pm - u0_inv) % pm;
        let mut p_over_pi = vec![0u64; (e * f) as usize];
        if e == 1 {
            p_over_pi[0] = neg_u0_inv;
        } else {
            p_over_pi[((e - 1) * f) as usize] = neg_u0_inv;
            for j in 1..e as usize {
                p_over_pi[(j - 1) * f as usize] = eis[j] * neg_u0_inv % pm;
            }
        }

        let mut ctx = LocalRingCtx {
            p,
            f,
            e,
            n: precision,
            m,
            pm,
            pow_p,
            fq,
            gr_modulus,
            eis,
            eis_int: eisenstein.to_vec(),
            uniformizer: RingElem {
                coeffs: Vec::new(),
                prec: precision,
            },
            p_over_pi,
            teich: Vec::new(),
        };
        let mut unif = vec![0u64; (e * f) as usize];
        if e == 1 {
            unif[0] = (pm - ctx.eis[0]) % pm;
        } else {
            unif[f as usize] = 1;
        }
        ctx.uniformizer = ctx.canonical(unif, precision);
        ctx.teich = ctx.build_teichmuller()?;
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.fq.order()
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// Working precision `M` of the Galois-ring coefficients.
    pub fn coefficient_precision(&self) -> u32 {
        self.m
    }

    pub fn eisenstein(&self) -> &[i64] {
        &self.eis_int
    }

    pub fn residue_field(&self) -> &Arc<Field> {
        &self.fq
    }

    // Galois ring GR(p^M, f) on coordinate vectors of length f.

    fn gr_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.f as usize;
        let pm = self.pm;
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % pm;
            }
        }
        for k in (f..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &mi) in self.gr_modulus[..f].iter().enumerate() {
                let idx = k - f + i;
                prod[idx] = (prod[idx] + (pm - c) * mi) % pm;
            }
            prod[k] = 0;
        }
        prod.truncate(f);
        prod
    }

    fn gr_pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = vec![0u64; self.f as usize];
        acc[0] = 1 % self.pm;
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.gr_mul(&acc, &b);
            }
            b = self.gr_mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    fn build_teichmuller(&self) -> Result<Vec<Vec<u64>>> {
        let q = self.q() as u64;
        self.fq
            .elements()
            .map(|lam| {
                let mut y: Vec<u64> = self.fq.coords(lam).iter().map(|&c| c as u64).collect();
                for _ in 0..=self.m + 1 {
                    let next = self.gr_pow(&y, q);
                    if next == y {
                        return Ok(y);
                    }
                    y = next;
                }
                Err(LocalRingError::NonConvergence)
            })
            .collect()
    }

    /// Exponent `k` with the `x^i` coefficient living mod `p^k`.
    #[inline]
    fn coeff_exponent(&self, i: u32, prec: u32) -> u32 {
        if prec <= i {
            0
        } else {
            (prec - i).div_ceil(self.e)
        }
    }

    fn canonical(&self, mut coeffs: Vec<u64>, prec: u32) -> RingElem {
        let f = self.f as usize;
        for i in 0..self.e {
            let modulus = self.pow_p[self.coeff_exponent(i, prec) as usize];
            for c in &mut coeffs[i as usize * f..(i as usize + 1) * f] {
                *c %= modulus;
            }
        }
        RingElem { coeffs, prec }
    }

    pub fn zero(&self) -> RingElem {
        self.zero_at(self.n)
    }

    fn zero_at(&self, prec: u32) -> RingElem {
        RingElem {
            coeffs: vec![0; (self.e * self.f) as usize],
            prec,
        }
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> RingElem {
        let mut c = vec![0u64; (self.e * self.f) as usize];
        c[0] = v.rem_euclid(self.pm as i64) as u64;
        self.canonical(c, self.n)
    }

    pub fn uniformizer(&self) -> RingElem {
        self.uniformizer.clone()
    }

    /// `ϖ^k`.
    pub fn uniformizer_pow(&self, k: u32) -> RingElem {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, &self.uniformizer);
        }
        acc
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, a: &RingElem, prec: u32) -> RingElem {
        let prec = prec.min(a.prec);
        self.canonical(a.coeffs.clone(), prec)
    }

    /// Equality modulo `ϖ^min(prec)`.
    pub fn eq_mod(&self, a: &RingElem, b: &RingElem) -> bool {
        let prec = a.prec.min(b.prec);
        self.truncate(a, prec) == self.truncate(b, prec)
    }

    pub fn teichmuller(&self, lam: Elem) -> RingElem {
        let mut c = vec![0u64; (self.e * self.f) as usize];
        c[..self.f as usize].copy_from_slice(&self.teich[lam.0 as usize]);
        self.canonical(c, self.n)
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let pm = self.pm;
        let c = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % pm)
            .collect();
        self.canonical(c, a.prec.min(b.prec))
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        let pm = self.pm;
        let c = a.coeffs.iter().map(|&x| (pm - x) % pm).collect();
        self.canonical(c, a.prec)
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let e = self.e as usize;
        let f = self.f as usize;
        let pm = self.pm;
        let mut prod: Vec<Vec<u64>> = vec![vec![0u64; f]; 2 * e - 1];
        for i in 0..e {
            let ai = &a.coeffs[i * f..(i + 1) * f];
            if ai.iter().all(|&x| x == 0) {
                continue;
            }
            for j in 0..e {
                let bj = &b.coeffs[j * f..(j + 1) * f];
                if bj.iter().all(|&x| x == 0) {
                    continue;
                }
                let t = self.gr_mul(ai, bj);
                for (dst, v) in prod[i + j].iter_mut().zip(t) {
                    *dst = (*dst + v) % pm;
                }
            }
        }
        // x^e = -Σ c_i x^i with integer c_i.
        for k in (e..prod.len()).rev() {
            let top = std::mem::replace(&mut prod[k], vec![0u64; f]);
            for (i, &ci) in self.eis.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                let factor = (pm - ci) % pm;
                for (dst, &v) in prod[k - e + i].iter_mut().zip(&top) {
                    *dst = (*dst + v * factor) % pm;
                }
            }
        }
        let coeffs: Vec<u64> = prod.into_iter().take(e).flatten().collect();
        self.canonical(coeffs, a.prec.min(b.prec))
    }

    pub fn ring_arith(&self, op: RingOp, a: &RingElem, b: &RingElem) -> RingElem {
        match op {
            RingOp::Add => self.add(a, b),
            RingOp::Sub => self.sub(a, b),
            RingOp::Mul => self.mul(a, b),
        }
    }

    /// Image in the residue field.
    pub fn residue(&self, a: &RingElem) -> Elem {
        if a.prec == 0 {
            return Elem::ZERO;
        }
        let p = self.p as u64;
        let coords: Vec<i64> = a.coeffs[..self.f as usize]
            .iter()
            .map(|&c| (c % p) as i64)
            .collect();
        self.fq
            .from_coords(&coords)
            .expect("coordinate count matches residue degree")
    }

    /// ϖ-adic valuation, capped at the precision.
    pub fn valuation(&self, a: &RingElem) -> u32 {
        let f = self.f as usize;
        let mut best = a.prec;
        for i in 0..self.e {
            for &c in &a.coeffs[i as usize * f..(i as usize + 1) * f] {
                if c == 0 {
                    continue;
                }
                let mut v = 0u32;
                let mut c = c;
                while c % self.p as u64 == 0 {
                    c /= self.p as u64;
                    v += 1;
                }
                best = best.min(i + self.e * v);
            }
        }
        best
    }

    /// `a/ϖ` for `a ≡ 0 mod ϖ`, at precision one lower.
    pub fn divide_by_uniformizer(&self, a: &RingElem) -> Result<RingElem> {
        if a.prec <= 1 {
            return Err(LocalRingError::PrecisionExhausted {
                needed: 2,
                available: a.prec,
            });
        }
        if self.residue(a) != Elem::ZERO {
            return Err(LocalRingError::NotDivisible);
        }
        let e = self.e as usize;
        let f = self.f as usize;
        let pm = self.pm;
        let mut out = vec![0u64; e * f];
        // Σ_{i≥1} a_i x^{i-1}
        out[..(e - 1) * f].copy_from_slice(&a.coeffs[f..]);
        // (a_0/p)·(p/ϖ)
        let a0: Vec<u64> = a.coeffs[..f].iter().map(|&c| c / self.p as u64).collect();
        for i in 0..e {
            let t = self.gr_mul(&a0, &self.p_over_pi[i * f..(i + 1) * f]);
            for (dst, v) in out[i * f..(i + 1) * f].iter_mut().zip(t) {
                *dst = (*dst + v) % pm;
            }
        }
        Ok(self.canonical(out, a.prec - 1))
    }

    /// The `I_n` representative of `a mod ϖ^n`.
    pub fn digits(&self, a: &RingElem, n: u32) -> Result<DigitString> {
        if n > a.prec {
            return Err(LocalRingError::PrecisionExhausted {
                needed: n,
                available: a.prec,
            });
        }
        let mut cur = self.truncate(a, n);
        let mut out = Vec::with_capacity(n as usize);
        for i in 0..n {
            let lam = self.residue(&cur);
            out.push(lam);
            if i + 1 < n {
                let t = self.teichmuller(lam);
                cur = self.divide_by_uniformizer(&self.sub(&cur, &t))?;
            }
        }
        Ok(DigitString(out))
    }

    /// `Σ ϖ^i [λ_i]` at full precision.
    pub fn from_digits(&self, s: &DigitString) -> Result<RingElem> {
        if s.len() as u32 > self.n {
            return Err(LocalRingError::PrecisionExhausted {
                needed: s.len() as u32,
                available: self.n,
            });
        }
        let mut acc = self.zero();
        for &d in s.digits().iter().rev() {
            acc = self.add(&self.mul(&acc, &self.uniformizer), &self.teichmuller(d));
        }
        Ok(acc)
    }

    /// `[μ]_n`.
    pub fn truncate_digits(&self, s: &DigitString, n: usize) -> DigitString {
        s.truncated(n)
    }

    /// Digits of `[a] + [b]` up to length `len`.
    pub fn witt_carry(&self, a: Elem, b: Elem, len: u32) -> Result<DigitString> {
        let s = self.add(&self.teichmuller(a), &self.teichmuller(b));
        self.digits(&s, len)
    }

    /// `F(a^{p^{f-1}}, b^{p^{f-1}})` with `F(x,y) = (x^p + y^p - (x+y)^p)/p`
    /// reduced mod p; the carry digit of `[a]+[b]` when `e = 1`.
    pub fn witt_carry_closed_form(&self, a: Elem, b: Elem) -> Elem {
        let fq = &self.fq;
        let x = fq.frobenius(a, self.f - 1);
        let y = fq.frobenius(b, self.f - 1);
        let p = self.p as u64;
        let mut acc = Elem::ZERO;
        let mut binom = 1u64;
        for k in 1..p {
            binom = binom * (p - k + 1) / k;
            let coeff = fq.from_int(-((binom / p) as i64));
            let term = fq.mul(fq.pow(x, k), fq.pow(y, p - k));
            acc = fq.add(acc, fq.mul(coeff, term));
        }
        acc
    }
}
