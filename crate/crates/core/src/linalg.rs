//! Dense exact linear algebra over a finite field.
//!
//! Vectors are rows and maps act on the right: the rows of a [`Matrix`] are
//! the images of the domain basis and `v ↦ v·M`. Composition `a.then(&b)`
//! is the matrix product `a·b`.

use std::sync::Arc;

use thiserror::Error;

use crate::gf::{Elem, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspace is not contained in the larger space")]
    NotSubspace,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, got })
    }
}

/// `dst += c·src`
#[inline]
pub(crate) fn axpy(field: &Field, dst: &mut [Elem], c: Elem, src: &[Elem]) {
    if c.is_zero() {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = field.add(*d, field.mul(c, s));
        }
    }
}

#[inline]
fn scale(field: &Field, v: &mut [Elem], c: Elem) {
    for x in v.iter_mut() {
        *x = field.mul(*x, c);
    }
}

fn first_nonzero(v: &[Elem]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(field: &Arc<Field>, rows: usize, cols: usize) -> Self {
        Matrix {
            field: Arc::clone(field),
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Elem::ONE;
        }
        m
    }

    pub fn from_rows(field: &Arc<Field>, cols: usize, rows: Vec<Vec<Elem>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend(r);
        }
        Ok(Matrix {
            field: Arc::clone(field),
            rows: n,
            cols,
            data,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Elem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `v·M`.
    pub fn apply(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        check_dim(self.rows, v.len())?;
        let mut out = vec![Elem::ZERO; self.cols];
        for (i, &c) in v.iter().enumerate() {
            axpy(&self.field, &mut out, c, self.row(i));
        }
        Ok(out)
    }

    /// The map "first `self`, then `other`".
    pub fn then(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            let r = other.apply(self.row(i))?;
            out.row_mut(i).copy_from_slice(&r);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        let mut out = self.clone();
        for (d, &s) in out.data.iter_mut().zip(&other.data) {
            *d = self.field.add(*d, s);
        }
        Ok(out)
    }

    /// `M - I` for square `M`.
    pub fn minus_identity(&self) -> Result<Matrix> {
        check_dim(self.rows, self.cols)?;
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i);
            out.set(i, i, self.field.sub(v, Elem::ONE));
        }
        Ok(out)
    }

    pub fn kernel(&self) -> Subspace {
        kernel_of_rows(&self.field, self.rows, (0..self.rows).map(|i| self.row(i).to_vec()))
    }

    pub fn image(&self) -> Subspace {
        let mut s = Subspace::zero(&self.field, self.cols);
        for i in 0..self.rows {
            s.insert(self.row(i)).expect("row length equals column count");
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.image().dim()
    }
}

/// Left kernel of the matrix whose rows are `rows`, by elimination with
/// combination tracking.
fn kernel_of_rows<I>(field: &Arc<Field>, n: usize, rows: I) -> Subspace
where
    I: IntoIterator<Item = Vec<Elem>>,
{
    let f: &Field = field;
    // Echelon rows (leading entry 1) with their tags.
    let mut pivot_of: Vec<Option<usize>> = Vec::new();
    let mut ech: Vec<(Vec<Elem>, Vec<Elem>)> = Vec::new();
    let mut kernel = Subspace::zero(field, n);
    for (idx, mut row) in rows.into_iter().enumerate() {
        if pivot_of.len() < row.len() {
            pivot_of.resize(row.len(), None);
        }
        let mut tag = vec![Elem::ZERO; n];
        tag[idx] = Elem::ONE;
        let mut lead = None;
        for col in 0..row.len() {
            let c = row[col];
            if c.is_zero() {
                continue;
            }
            match pivot_of[col] {
                Some(k) => {
                    let neg = f.neg(c);
                    let (prow, ptag) = &ech[k];
                    axpy(f, &mut row[col..], neg, &prow[col..]);
                    axpy(f, &mut tag, neg, ptag);
                }
                None => {
                    lead = Some(col);
                    break;
                }
            }
        }
        match lead {
            Some(col) => {
                let inv = f.inv(row[col]).expect("leading entry is nonzero");
                scale(f, &mut row, inv);
                scale(f, &mut tag, inv);
                pivot_of[col] = Some(ech.len());
                ech.push((row, tag));
            }
            None => {
                kernel.insert(&tag).expect("tag length is the row count");
            }
        }
    }
    kernel
}

/// A subspace of `K^n`, held as a reduced row-echelon basis. Two subspaces
/// are equal exactly when their bases are identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: Arc<Field>,
    ambient: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &Arc<Field>, ambient: usize) -> Self {
        Subspace {
            field: Arc::clone(field),
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Arc<Field>, ambient: usize) -> Self {
        let mut s = Self::zero(field, ambient);
        for i in 0..ambient {
            let mut v = vec![Elem::ZERO; ambient];
            v[i] = Elem::ONE;
            s.rows.push(v);
            s.pivots.push(i);
        }
        s
    }

    pub fn echelon<'a, I>(field: &Arc<Field>, ambient: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [Elem]>,
    {
        let mut s = Self::zero(field, ambient);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its projection along the pivot columns.
    pub fn reduce(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        check_dim(self.ambient, v.len())?;
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        Ok(v)
    }

    fn reduce_in_place(&self, v: &mut [Elem]) {
        let f: &Field = &self.field;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if !c.is_zero() {
                axpy(f, v, f.neg(c), row);
            }
        }
    }

    pub fn contains(&self, v: &[Elem]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(|x| x.is_zero()))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Elem]) -> Result<bool> {
        let mut r = self.reduce(v)?;
        let Some(piv) = first_nonzero(&r) else {
            return Ok(false);
        };
        let f = Arc::clone(&self.field);
        let inv = f.inv(r[piv]).expect("pivot entry is nonzero");
        scale(&f, &mut r, inv);
        for row in &mut self.rows {
            let c = row[piv];
            if !c.is_zero() {
                axpy(&f, row, f.neg(c), &r);
            }
        }
        let pos = self.pivots.partition_point(|&p| p < piv);
        self.pivots.insert(pos, piv);
        self.rows.insert(pos, r);
        Ok(true)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        check_dim(other.ambient, self.ambient)?;
        for r in &self.rows {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_dim(self.ambient, other.ambient)?;
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r)?;
        }
        Ok(s)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        check_dim(self.ambient, other.ambient)?;
        let k = self.dim();
        let rows = self.rows.iter().chain(&other.rows).cloned();
        let rel = kernel_of_rows(&self.field, k + other.dim(), rows);
        let mut out = Subspace::zero(&self.field, self.ambient);
        for c in rel.basis() {
            out.insert(&combine(&self.field, self.ambient, &c[..k], &self.rows))?;
        }
        Ok(out)
    }

    /// `dim(self/sub)`; errors unless `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize> {
        if !sub.is_subspace_of(self)? {
            return Err(LinalgError::NotSubspace);
        }
        Ok(self.dim() - sub.dim())
    }
}

/// `Σ coeffs[i]·vectors[i]`.
pub fn combine(field: &Field, ambient: usize, coeffs: &[Elem], vectors: &[Vec<Elem>]) -> Vec<Elem> {
    let mut out = vec![Elem::ZERO; ambient];
    for (&c, v) in coeffs.iter().zip(vectors) {
        axpy(field, &mut out, c, v);
    }
    out
}

pub fn echelon(field: &Arc<Field>, ambient: usize, vectors: &[Vec<Elem>]) -> Result<Subspace> {
    Subspace::echelon(field, ambient, vectors.iter().map(|v| v.as_slice()))
}

pub fn member(v: &[Elem], s: &Subspace) -> Result<bool> {
    s.contains(v)
}

pub fn kernel(m: &Matrix) -> Subspace {
    m.kernel()
}

pub fn image(m: &Matrix) -> Subspace {
    m.image()
}

pub fn sum(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    s.sum(t)
}

pub fn intersect(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    s.intersect(t)
}

pub fn quotient_dim(sub: &Subspace, sup: &Subspace) -> Result<usize> {
    sup.quotient_dim(sub)
}

/// `{v : v·M ∈ S}`.
pub fn preimage(m: &Matrix, s: &Subspace) -> Result<Subspace> {
    joint_preimage(std::slice::from_ref(m), s, None)
}

/// `{v ∈ within : v·M ∈ S for every M}`, solved one map at a time on the
/// shrinking domain. `within` defaults to the whole domain.
pub fn joint_preimage(maps: &[Matrix], s: &Subspace, within: Option<&Subspace>) -> Result<Subspace> {
    let field = Arc::clone(s.field());
    let n = match (maps.first(), within) {
        (Some(m), _) => m.rows(),
        (None, Some(w)) => w.ambient(),
        (None, None) => return Err(LinalgError::DimensionMismatch { expected: 1, got: 0 }),
    };
    let mut domain = match within {
        Some(w) => {
            check_dim(n, w.ambient())?;
            w.clone()
        }
        None => Subspace::full(&field, n),
    };
    for m in maps {
        check_dim(n, m.rows())?;
        check_dim(s.ambient(), m.cols())?;
        let basis = domain.basis().to_vec();
        let residues = basis
            .iter()
            .map(|b| m.apply(b).and_then(|img| s.reduce(&img)))
            .collect::<Result<Vec<_>>>()?;
        let rel = kernel_of_rows(&field, basis.len(), residues);
        let mut next = Subspace::zero(&field, n);
        for c in rel.basis() {
            next.insert(&combine(&field, n, c, &basis))?;
        }
        domain = next;
        if domain.dim() == 0 {
            break;
        }
    }
    Ok(domain)
}

/// Joint fixed space `∩ ker(M - I)`; the whole space when `ops` is empty.
pub fn fixed_space(field: &Arc<Field>, n: usize, ops: &[Matrix]) -> Result<Subspace> {
    let shifted = ops
        .iter()
        .map(|m| {
            check_dim(n, m.rows())?;
            m.minus_identity()
        })
        .collect::<Result<Vec<_>>>()?;
    let zero = Subspace::zero(field, n);
    let fixed = if shifted.is_empty() {
        Subspace::full(field, n)
    } else {
        joint_preimage(&shifted, &zero, None)?
    };
    for v in fixed.basis() {
        for m in ops {
            debug_assert_eq!(&m.apply(v)?, v);
        }
    }
    Ok(fixed)
}

/// `Σ image(M - I)`; the coinvariants are the quotient by this space.
pub fn coinvariant_complement(field: &Arc<Field>, n: usize, ops: &[Matrix]) -> Result<Subspace> {
    let mut s = Subspace::zero(field, n);
    for m in ops {
        check_dim(n, m.rows())?;
        let d = m.minus_identity()?;
        for i in 0..n {
            s.insert(d.row(i))?;
        }
    }
    Ok(s)
}
