//! Finite fields `F_{p^n}` with table-driven arithmetic, and the pair
//! `F_q ⊂ K` (residue field inside the coefficient field) used by every
//! other module.
//!
//! Elements are stored as integer codes `Σ c_i p^i` where `c_i` are the
//! coordinates on the power basis `1, t, …, t^{n-1}` of the modulus root `t`.
//! Code `0` is zero and code `1` is one; enumeration in code order therefore
//! starts with zero.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{degree} exceeds the supported order 2^16")]
    TooLarge { p: u32, degree: u32 },
    #[error("modulus must be monic of degree {0} with coefficients below p")]
    BadModulus(u32),
    #[error("modulus is reducible over F_{0}")]
    Reducible(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different field contexts")]
    MixedFieldContexts,
    #[error("binary operation is missing its second operand")]
    MissingOperand,
    #[error("polynomial has degree {degree}, the field sum identity needs degree <= {bound}")]
    DegreeTooHigh { degree: usize, bound: usize },
    #[error("coordinate list has length {got}, expected {expected}")]
    BadCoordinates { expected: usize, got: usize },
    #[error("element is not in the residue field F_q")]
    NotInSubfield,
}

pub type Result<T> = std::result::Result<T, GfError>;

/// A field element code. Only meaningful together with the [`Field`] it
/// came from.
#[derive(
    Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Conway polynomials for small `(p, n)`, coefficients low to high.
fn conway_polynomial(p: u32, n: u32) -> Option<&'static [u32]> {
    let c: &'static [u32] = match (p, n) {
        (2, 1) => &[1, 1],
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (2, 6) => &[1, 1, 0, 1, 1, 0, 1],
        (2, 7) => &[1, 1, 0, 0, 0, 0, 0, 1],
        (2, 8) => &[1, 0, 1, 1, 1, 0, 0, 0, 1],
        (3, 1) => &[1, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (3, 4) => &[2, 0, 0, 2, 1],
        (3, 5) => &[1, 2, 0, 0, 0, 1],
        (3, 6) => &[2, 2, 1, 0, 2, 0, 1],
        (5, 1) => &[3, 1],
        (5, 2) => &[2, 4, 1],
        (5, 3) => &[3, 3, 0, 1],
        (5, 4) => &[2, 4, 4, 0, 1],
        (7, 1) => &[4, 1],
        (7, 2) => &[3, 6, 1],
        (7, 3) => &[4, 0, 6, 1],
        (11, 1) => &[9, 1],
        (11, 2) => &[2, 7, 1],
        (13, 1) => &[11, 1],
        (13, 2) => &[2, 12, 1],
        _ => return None,
    };
    Some(c)
}

/// Dense polynomials over `F_p`, coefficients low to high, kept trimmed.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        trim(&mut out);
        out
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        trim(&mut a);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while a.len() > dm {
            let top = a.len() - 1;
            let c = (a[top] as u64 * lead_inv as u64 % p as u64) as u32;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let idx = top - dm + i;
                    a[idx] = ((a[idx] as u64 + (p - c) as u64 * mi as u64) % p as u64) as u32;
                }
            }
            a.pop();
            trim(&mut a);
        }
        a
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^(p^k) mod m`.
    pub fn x_pow_p_pow(k: u32, m: &[u32], p: u32) -> Vec<u32> {
        let mut cur = rem(&[0, 1], m, p);
        for _ in 0..k {
            let base = cur.clone();
            let mut acc = vec![1u32];
            let mut b = base;
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &b, m, p);
                }
                b = mulmod(&b, &b, m, p);
                e >>= 1;
            }
            cur = acc;
        }
        cur
    }
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = match modulus.len().checked_sub(1) {
        Some(n) if n >= 1 => n as u32,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let x = [0u32, 1];
    let top = fp_poly::x_pow_p_pow(n, modulus, p);
    if fp_poly::sub(&top, &x, p) != Vec::<u32>::new() {
        return false;
    }
    for l in prime_factors(n as u64) {
        let h = fp_poly::x_pow_p_pow(n / l as u32, modulus, p);
        let d = fp_poly::sub(&h, &x, p);
        if fp_poly::gcd(modulus, &d, p).len() != 1 {
            return false;
        }
    }
    true
}

fn first_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for code in 0..count {
        let mut c = code;
        let mut poly = Vec::with_capacity(n as usize + 1);
        for _ in 0..n {
            poly.push((c % p as u64) as u32);
            c /= p as u64;
        }
        poly.push(1);
        if poly[0] != 0 && is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The finite field `F_p[t]/(modulus)`.
pub struct Field {
    p: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    is_conway: bool,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl Field {
    /// Field of order `p^degree` with the Conway modulus when tabulated,
    /// otherwise the first irreducible polynomial in code order.
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        Self::with_modulus(p, degree, None)
    }

    pub fn with_modulus(p: u32, degree: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if degree == 0 {
            return Err(GfError::ZeroDegree);
        }
        let order64 = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
        if order64 > MAX_ORDER {
            return Err(GfError::TooLarge { p, degree });
        }
        let order = order64 as u32;
        let (modulus, is_conway) = match modulus {
            Some(m) => {
                if m.len() != degree as usize + 1
                    || m[degree as usize] != 1
                    || m.iter().any(|&c| c >= p)
                {
                    return Err(GfError::BadModulus(degree));
                }
                let conway = conway_polynomial(p, degree) == Some(m.as_slice());
                (m, conway)
            }
            None => match conway_polynomial(p, degree) {
                Some(c) => (c.to_vec(), true),
                None => (first_irreducible(p, degree), false),
            },
        };
        if !is_irreducible(&modulus, p) {
            return Err(GfError::Reducible(p));
        }

        let to_coeffs = |code: u32| -> Vec<u32> {
            let mut c = code;
            let mut out = Vec::with_capacity(degree as usize);
            for _ in 0..degree {
                out.push(c % p);
                c /= p;
            }
            out
        };
        let to_code = |coeffs: &[u32]| -> u32 {
            coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
        };

        // Smallest code of multiplicative order `order - 1`.
        let group = order - 1;
        let mut exp = Vec::new();
        let mut generator = Elem::ONE;
        for g in 1..order {
            let gc = to_coeffs(g);
            let mut powers = Vec::with_capacity(group as usize);
            let mut cur = vec![1u32];
            let mut ok = true;
            for i in 0..group {
                let mut padded = cur.clone();
                padded.resize(degree as usize, 0);
                let code = to_code(&padded);
                if i > 0 && code == 1 {
                    ok = false;
                    break;
                }
                powers.push(code);
                cur = fp_poly::mulmod(&cur, &gc, &modulus, p);
            }
            if ok {
                exp = powers;
                generator = Elem(g);
                break;
            }
        }
        debug_assert_eq!(exp.len(), group as usize);

        let mut log = vec![NONE; order as usize];
        for (i, &c) in exp.iter().enumerate() {
            log[c as usize] = i as u32;
        }
        let neg: Vec<u32> = (0..order)
            .map(|code| {
                let coeffs: Vec<u32> = to_coeffs(code).iter().map(|&c| (p - c) % p).collect();
                to_code(&coeffs)
            })
            .collect();
        let zech: Vec<u32> = exp
            .iter()
            .map(|&c| {
                let low = c % p;
                let plus_one = c - low + (low + 1) % p;
                if plus_one == 0 {
                    NONE
                } else {
                    log[plus_one as usize]
                }
            })
            .collect();
        let mut doubled = exp.clone();
        doubled.extend_from_slice(&exp);

        Ok(Field {
            p,
            degree,
            order,
            modulus,
            is_conway,
            generator,
            exp: doubled,
            log,
            zech,
            neg,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_conway(&self) -> bool {
        self.is_conway
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    #[inline]
    fn group_order(&self) -> u32 {
        self.order - 1
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let n = self.group_order();
        let d = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[d as usize];
        if z == NONE {
            Elem::ZERO
        } else {
            Elem(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        Elem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// `a + b·c`
    #[inline]
    pub fn mul_add(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.add(a, self.mul(b, c))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        let n = self.group_order();
        Ok(Elem(self.exp[((n - self.log[a.0 as usize]) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let n = self.group_order() as u64;
        let l = self.log[a.0 as usize] as u64;
        Elem(self.exp[((l * (e % n)) % n) as usize])
    }

    /// `a^(p^j)`.
    pub fn frobenius(&self, a: Elem, j: u32) -> Elem {
        if a.0 == 0 {
            return a;
        }
        let n = self.group_order() as u64;
        let mut e = 1u64 % n.max(1);
        for _ in 0..j {
            e = e * self.p as u64 % n.max(1);
        }
        if n == 1 {
            return a;
        }
        let l = self.log[a.0 as usize] as u64;
        Elem(self.exp[(l * e % n) as usize])
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, x: i64) -> Elem {
        Elem(x.rem_euclid(self.p as i64) as u32)
    }

    pub fn coords(&self, a: Elem) -> Vec<u32> {
        let mut c = a.0;
        (0..self.degree)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    /// Element from its coordinates on the power basis; each coordinate
    /// is reduced mod p.
    pub fn from_coords(&self, coords: &[i64]) -> Result<Elem> {
        if coords.len() != self.degree as usize {
            return Err(GfError::BadCoordinates {
                expected: self.degree as usize,
                got: coords.len(),
            });
        }
        Ok(Elem(coords.iter().rev().fold(0u32, |acc, &c| {
            acc * self.p + c.rem_euclid(self.p as i64) as u32
        })))
    }

    /// Every element, zero first, in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(Elem)
    }

    /// The polynomial-basis root `t` (the prime-field element itself when
    /// the degree is 1).
    pub fn root(&self) -> Elem {
        if self.degree == 1 {
            Elem((self.p - self.modulus[0]) % self.p)
        } else {
            Elem(self.p)
        }
    }

    /// Horner evaluation of `Σ coeffs[i] x^i`.
    pub fn eval_poly(&self, coeffs: &[Elem], x: Elem) -> Elem {
        coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Which of the two fields of a [`FieldCtx`] to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Fq,
    K,
}

/// The residue field `F_q = F_{p^f}` together with the coefficient field
/// `K = F_{q^m}` and a fixed embedding `F_q ⊂ K`.
#[derive(Debug)]
pub struct FieldCtx {
    f: u32,
    m: u32,
    fq: Arc<Field>,
    k: Arc<Field>,
    embedding: Vec<Elem>,
    restriction: Vec<u32>,
}

impl FieldCtx {
    pub fn new(p: u32, f: u32, m: u32) -> Result<Self> {
        let fq = Arc::new(Field::new(p, f)?);
        if m == 0 {
            return Err(GfError::ZeroDegree);
        }
        let k = if m == 1 {
            Arc::clone(&fq)
        } else {
            let degree = f.checked_mul(m).ok_or(GfError::TooLarge { p, degree: u32::MAX })?;
            Arc::new(Field::new(p, degree)?)
        };
        Self::from_fields(fq, k, m)
    }

    pub fn from_fields(fq: Arc<Field>, k: Arc<Field>, m: u32) -> Result<Self> {
        let f = fq.degree();
        let p = fq.p();
        if k.p() != p || k.degree() != f * m {
            return Err(GfError::MixedFieldContexts);
        }
        let embedding: Vec<Elem> = if m == 1 && *fq == *k {
            fq.elements().collect()
        } else {
            // First root of the F_q modulus in K.
            let coeffs: Vec<Elem> = fq.modulus().iter().map(|&c| k.from_int(c as i64)).collect();
            let root = k
                .elements()
                .find(|&x| k.eval_poly(&coeffs, x).is_zero())
                .ok_or(GfError::Reducible(p))?;
            fq.elements()
                .map(|lam| {
                    let c: Vec<Elem> = fq
                        .coords(lam)
                        .iter()
                        .map(|&d| k.from_int(d as i64))
                        .collect();
                    k.eval_poly(&c, root)
                })
                .collect()
        };
        let mut restriction = vec![NONE; k.order() as usize];
        for (i, e) in embedding.iter().enumerate() {
            restriction[e.0 as usize] = i as u32;
        }
        Ok(FieldCtx {
            f,
            m,
            fq,
            k,
            embedding,
            restriction,
        })
    }

    pub fn p(&self) -> u32 {
        self.fq.p()
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.fq.order()
    }

    pub fn fq(&self) -> &Arc<Field> {
        &self.fq
    }

    pub fn k(&self) -> &Arc<Field> {
        &self.k
    }

    #[inline]
    pub fn embed(&self, lam: Elem) -> Elem {
        self.embedding[lam.0 as usize]
    }

    /// The element of `F_q` mapping to `a`, if any.
    pub fn restrict(&self, a: Elem) -> Option<Elem> {
        match self.restriction[a.0 as usize] {
            NONE => None,
            c => Some(Elem(c)),
        }
    }

    pub fn enumerate(&self, which: Which) -> Vec<Elem> {
        match which {
            Which::Fq => self.fq.elements().collect(),
            Which::K => self.k.elements().collect(),
        }
    }

    /// F_p-basis `1, t, …, t^{f-1}` of `F_q`.
    pub fn fq_prime_basis(&self) -> Vec<Elem> {
        let p = self.p();
        (0..self.f).map(|j| Elem(p.pow(j))).collect()
    }

    /// `λ^{Σ p^j i_j}` in `F_q`, with `0^0 = 1`.
    pub fn monomial_exp(&self, lam: Elem, exps: &[u32]) -> Elem {
        let p = self.p() as u64;
        let e: u64 = exps
            .iter()
            .enumerate()
            .map(|(j, &i)| i as u64 * p.pow(j as u32))
            .sum();
        self.fq.pow(lam, e)
    }

    /// `Σ_{t ∈ F_q} F(t)` by enumeration, for `F` with coefficients in `K`
    /// of degree at most `q - 1`.
    pub fn sum_over_fq(&self, poly: &[Elem]) -> Result<Elem> {
        let bound = self.q() as usize - 1;
        if let Some(deg) = poly.iter().rposition(|c| !c.is_zero()) {
            if deg > bound {
                return Err(GfError::DegreeTooHigh { degree: deg, bound });
            }
        }
        let k = &self.k;
        Ok(self
            .fq
            .elements()
            .map(|t| k.eval_poly(poly, self.embed(t)))
            .fold(Elem::ZERO, |acc, v| k.add(acc, v)))
    }
}

/// An element bundled with its field, for context-checked arithmetic.
#[derive(Clone, Debug)]
pub struct FieldElem {
    field: Arc<Field>,
    value: Elem,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.field == *other.field
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

impl FieldElem {
    pub fn new(field: &Arc<Field>, value: Elem) -> Self {
        debug_assert!(value.0 < field.order());
        FieldElem {
            field: Arc::clone(field),
            value,
        }
    }

    pub fn from_coords(field: &Arc<Field>, coords: &[i64]) -> Result<Self> {
        Ok(Self::new(field, field.from_coords(coords)?))
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(GfError::MixedFieldContexts)
        }
    }

    pub fn apply(&self, op: FieldOp, other: Option<&FieldElem>) -> Result<FieldElem> {
        let f = &self.field;
        let value = match op {
            FieldOp::Neg => f.neg(self.value),
            FieldOp::Inv => f.inv(self.value)?,
            FieldOp::Add | FieldOp::Sub | FieldOp::Mul => {
                let b = other.ok_or(GfError::MissingOperand)?;
                self.same_field(b)?;
                match op {
                    FieldOp::Add => f.add(self.value, b.value),
                    FieldOp::Sub => f.sub(self.value, b.value),
                    _ => f.mul(self.value, b.value),
                }
            }
        };
        Ok(FieldElem::new(f, value))
    }

    pub fn frobenius(&self, j: u32) -> FieldElem {
        FieldElem::new(&self.field, self.field.frobenius(self.value, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32, n: u32) -> Arc<Field> {
        Arc::new(Field::new(p, n).unwrap())
    }

    #[test]
    fn prime_field_examples() {
        let f3 = f(3, 1);
        assert_eq!(f3.add(Elem(2), Elem(2)), Elem(1));
        assert_eq!(f3.inv(Elem(2)).unwrap(), Elem(2));
        assert_eq!(f3.inv(Elem(0)), Err(GfError::DivisionByZero));
    }

    #[test]
    fn f4_multiplication_reduces_by_modulus() {
        let f4 = f(2, 2);
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let t = f4.root();
        // t^2 = t + 1
        assert_eq!(f4.coords(f4.mul(t, t)), vec![1, 1]);
        assert_eq!(f4.frobenius(t, 1), f4.add(t, Elem::ONE));
    }

    #[test]
    fn frobenius_fixes_base_field() {
        let f9 = f(3, 2);
        for a in f9.elements() {
            assert_eq!(f9.frobenius(a, 2), a);
        }
        assert_eq!(f9.frobenius(Elem::ZERO, 5), Elem::ZERO);
    }

    #[test]
    fn conway_table_entries_are_primitive_and_compatible() {
        for &(p, n) in &[
            (2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (2, 7), (2, 8),
            (3, 1), (3, 2), (3, 3), (3, 4), (3, 5), (3, 6),
            (5, 1), (5, 2), (5, 3), (5, 4),
            (7, 1), (7, 2), (7, 3),
            (11, 1), (11, 2), (13, 1), (13, 2),
        ] {
            let field = Field::new(p, n).unwrap();
            assert!(field.is_conway(), "({p},{n})");
            // The root t itself generates the multiplicative group.
            let t = field.root();
            let order = field.order() as u64 - 1;
            for l in prime_factors(order) {
                assert_ne!(field.pow(t, order / l), Elem::ONE, "({p},{n}) root not primitive");
            }
            // Norm compatibility with every subfield.
            for d in 1..n {
                if n % d != 0 {
                    continue;
                }
                let sub = Field::new(p, d).unwrap();
                let pd = (p as u64).pow(d);
                let e = (field.order() as u64 - 1) / (pd - 1);
                let y = field.pow(t, e);
                let coeffs: Vec<Elem> =
                    sub.modulus().iter().map(|&c| field.from_int(c as i64)).collect();
                assert!(field.eval_poly(&coeffs, y).is_zero(), "({p},{n}) vs {d}");
            }
        }
    }

    #[test]
    fn fallback_modulus_is_irreducible() {
        let field = Field::new(2, 9).unwrap();
        assert!(!field.is_conway());
        assert!(is_irreducible(field.modulus(), 2));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Field::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(Field::new(2, 17).unwrap_err(), GfError::TooLarge { p: 2, degree: 17 });
        assert_eq!(
            Field::with_modulus(2, 2, Some(vec![1, 0, 1])).unwrap_err(),
            GfError::Reducible(2)
        );
    }

    #[test]
    fn embedding_image_is_fixed_field_of_q_power() {
        for &(p, fdeg, m) in &[(2, 1, 2), (2, 2, 2), (3, 1, 2), (3, 2, 2), (2, 2, 3)] {
            let ctx = FieldCtx::new(p, fdeg, m).unwrap();
            let k = ctx.k();
            let q = ctx.q() as u64;
            let fixed: Vec<Elem> = k.elements().filter(|&x| k.pow(x, q) == x).collect();
            let mut image: Vec<Elem> = ctx.fq().elements().map(|l| ctx.embed(l)).collect();
            image.sort();
            assert_eq!(image, fixed);
            // Ring homomorphism.
            let fq = ctx.fq();
            for a in fq.elements() {
                for b in fq.elements() {
                    assert_eq!(ctx.embed(fq.add(a, b)), k.add(ctx.embed(a), ctx.embed(b)));
                    assert_eq!(ctx.embed(fq.mul(a, b)), k.mul(ctx.embed(a), ctx.embed(b)));
                }
            }
        }
    }

    #[test]
    fn monomial_exp_conventions() {
        let ctx = FieldCtx::new(3, 1, 1).unwrap();
        assert_eq!(ctx.monomial_exp(Elem(2), &[2]), Elem(1));
        assert_eq!(ctx.monomial_exp(Elem::ZERO, &[0]), Elem::ONE);
        let ctx9 = FieldCtx::new(3, 2, 1).unwrap();
        for lam in ctx9.fq().elements() {
            assert_eq!(ctx9.monomial_exp(lam, &[0, 0]), Elem::ONE);
            assert_eq!(ctx9.monomial_exp(lam, &[0, 1]), ctx9.fq().frobenius(lam, 1));
        }
    }

    #[test]
    fn field_sum_examples() {
        let c3 = FieldCtx::new(3, 1, 1).unwrap();
        assert_eq!(c3.sum_over_fq(&[Elem(0), Elem(0), Elem(1)]).unwrap(), Elem(2));
        let c5 = FieldCtx::new(5, 1, 1).unwrap();
        assert_eq!(c5.sum_over_fq(&[Elem(1)]).unwrap(), Elem(0));
        let c4 = FieldCtx::new(2, 2, 1).unwrap();
        assert_eq!(c4.sum_over_fq(&[Elem(0), Elem(1)]).unwrap(), Elem(0));
        assert_eq!(
            c3.sum_over_fq(&[Elem(0), Elem(0), Elem(0), Elem(1)]),
            Err(GfError::DegreeTooHigh { degree: 3, bound: 2 })
        );
        // Zero high coefficients do not count towards the degree.
        assert_eq!(c3.sum_over_fq(&[Elem(1), Elem(0), Elem(0), Elem(0)]).unwrap(), Elem(0));
    }

    #[test]
    fn enumeration_is_zero_first_and_complete() {
        let c2 = FieldCtx::new(2, 1, 1).unwrap();
        assert_eq!(c2.enumerate(Which::Fq), vec![Elem(0), Elem(1)]);
        let c3 = FieldCtx::new(3, 1, 1).unwrap();
        assert_eq!(c3.enumerate(Which::Fq), vec![Elem(0), Elem(1), Elem(2)]);
        let c4 = FieldCtx::new(2, 2, 2).unwrap();
        assert_eq!(c4.enumerate(Which::Fq).len(), 4);
        assert_eq!(c4.enumerate(Which::K).len(), 16);
    }

    #[test]
    fn checked_arithmetic_rejects_mixed_contexts() {
        let f3 = f(3, 1);
        let f9 = f(3, 2);
        let a = FieldElem::new(&f3, Elem(1));
        let b = FieldElem::new(&f9, Elem(1));
        assert_eq!(a.apply(FieldOp::Add, Some(&b)), Err(GfError::MixedFieldContexts));
        assert_eq!(a.apply(FieldOp::Add, None), Err(GfError::MissingOperand));
        let two = FieldElem::new(&f3, Elem(2));
        let inv = two.apply(FieldOp::Inv, None).unwrap();
        assert_eq!(inv.apply(FieldOp::Mul, Some(&two)).unwrap().value(), Elem::ONE);
        // A separately constructed but equal field is the same context.
        let f3b = f(3, 1);
        let c = FieldElem::new(&f3b, Elem(2));
        assert_eq!(a.apply(FieldOp::Add, Some(&c)).unwrap().value(), Elem(0));
    }
}
