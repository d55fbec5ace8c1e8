//! The weight `σ = Sym^r⃗ ⊗ (χ∘det)` of `GL₂(F_q)`, inflated to `KZ` with the
//! uniformizer acting by `ν`.
//!
//! Basis vectors are `e_i⃗ = ⊗_j x_j^{r_j-i_j} y_j^{i_j}` for `0⃗ ≤ i⃗ ≤ r⃗`,
//! ordered lexicographically with `i_0` most significant, so `e_0 = x^r⃗`
//! comes first and `y^r⃗` last. The matrix `[[a,b],[c,d]]` sends
//! `x_j ↦ a^{p^j}x_j + c^{p^j}y_j` and `y_j ↦ b^{p^j}x_j + d^{p^j}y_j`.

use std::sync::Arc;

use thiserror::Error;

use crate::gf::{Elem, FieldCtx};
use crate::linalg::{fixed_space, LinalgError, Matrix, Subspace};
use crate::localring::{LocalRingCtx, RingElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("weight exponent vector has length {got}, expected f = {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("weight exponent {0} is outside 0..=p-1")]
    ExponentOutOfRange(u32),
    #[error("character exponent {0} is outside 0..=q-2")]
    ChiOutOfRange(u32),
    #[error("central character value must be nonzero")]
    NuZero,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not in GL2(O)")]
    NotInK,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, WeightError>;

/// Coefficients on the monomial basis, in `K`.
pub type WeightVector = Vec<Elem>;

/// A 2×2 matrix `[[a, b], [c, d]]` over `F_q`.
pub type Gl2 = [[Elem; 2]; 2];

#[derive(Debug)]
pub struct WeightCtx {
    fields: Arc<FieldCtx>,
    r: Vec<u32>,
    chi: u32,
    nu: Elem,
    basis: Vec<Vec<u32>>,
    strides: Vec<usize>,
    unipotent: Vec<Matrix>,
}

impl WeightCtx {
    pub fn new(fields: Arc<FieldCtx>, r: Vec<u32>, chi: u32, nu: Elem) -> Result<Self> {
        let f = fields.f() as usize;
        if r.len() != f {
            return Err(WeightError::WrongLength {
                expected: f,
                got: r.len(),
            });
        }
        if let Some(&bad) = r.iter().find(|&&rj| rj >= fields.p()) {
            return Err(WeightError::ExponentOutOfRange(bad));
        }
        if chi > fields.q() - 2 && !(fields.q() == 2 && chi == 0) {
            return Err(WeightError::ChiOutOfRange(chi));
        }
        if nu.is_zero() {
            return Err(WeightError::NuZero);
        }
        let mut strides = vec![1usize; f];
        for j in (0..f.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * (r[j + 1] as usize + 1);
        }
        let dim: usize = r.iter().map(|&x| x as usize + 1).product();
        let basis: Vec<Vec<u32>> = (0..dim)
            .map(|idx| {
                (0..f)
                    .map(|j| ((idx / strides[j]) % (r[j] as usize + 1)) as u32)
                    .collect()
            })
            .collect();
        let mut ctx = WeightCtx {
            fields,
            r,
            chi,
            nu,
            basis,
            strides,
            unipotent: Vec::new(),
        };
        let fq = Arc::clone(ctx.fields.fq());
        ctx.unipotent = fq
            .elements()
            .map(|t| ctx.gl2_matrix(&[[Elem::ONE, t], [Elem::ZERO, Elem::ONE]]))
            .collect::<Result<_>>()?;
        Ok(ctx)
    }

    pub fn fields(&self) -> &Arc<FieldCtx> {
        &self.fields
    }

    pub fn r(&self) -> &[u32] {
        &self.r
    }

    pub fn chi(&self) -> u32 {
        self.chi
    }

    pub fn nu(&self) -> Elem {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The exponent vectors `i⃗` in basis order.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn index_of(&self, i: &[u32]) -> usize {
        i.iter().zip(&self.strides).map(|(&a, &s)| a as usize * s).sum()
    }

    pub fn zero_vector(&self) -> WeightVector {
        vec![Elem::ZERO; self.dim()]
    }

    pub fn basis_vector(&self, idx: usize) -> WeightVector {
        let mut v = self.zero_vector();
        v[idx] = Elem::ONE;
        v
    }

    /// `x^r⃗`.
    pub fn x_top(&self) -> WeightVector {
        self.basis_vector(0)
    }

    /// `y^r⃗`.
    pub fn y_top(&self) -> WeightVector {
        self.basis_vector(self.dim() - 1)
    }

    /// Whether `r⃗ = (p-1, …, p-1)`.
    pub fn is_maximal(&self) -> bool {
        self.r.iter().all(|&x| x == self.fields.p() - 1)
    }

    /// Matrix of `g` on `σ` in row convention, χ-twist included.
    pub fn gl2_matrix(&self, g: &Gl2) -> Result<Matrix> {
        let fq = self.fields.fq();
        let k = self.fields.k();
        let [[a, b], [c, d]] = *g;
        let det = fq.sub(fq.mul(a, d), fq.mul(b, c));
        if det.is_zero() {
            return Err(WeightError::SingularMatrix);
        }
        let twist = self.fields.embed(fq.pow(det, self.chi as u64));
        let f = self.r.len();
        // expansions[j][i_j] = coefficients of (A + Cy)^{r-i}(B + Dy)^{i} in y.
        let expansions: Vec<Vec<Vec<Elem>>> = (0..f)
            .map(|j| {
                let fr = |z: Elem| fq.frobenius(z, j as u32);
                let (aa, bb, cc, dd) = (fr(a), fr(b), fr(c), fr(d));
                let rj = self.r[j];
                (0..=rj)
                    .map(|ij| {
                        let mut poly = vec![Elem::ONE];
                        for _ in 0..rj - ij {
                            poly = poly_mul_linear(fq, &poly, aa, cc);
                        }
                        for _ in 0..ij {
                            poly = poly_mul_linear(fq, &poly, bb, dd);
                        }
                        poly
                    })
                    .collect()
            })
            .collect();
        let dim = self.dim();
        let mut m = Matrix::zeros(k, dim, dim);
        for (row, i) in self.basis.iter().enumerate() {
            for (col, kk) in self.basis.iter().enumerate() {
                let mut entry = Elem::ONE;
                for j in 0..f {
                    entry = fq.mul(entry, expansions[j][i[j] as usize][kk[j] as usize]);
                    if entry.is_zero() {
                        break;
                    }
                }
                if !entry.is_zero() {
                    m.set(row, col, k.mul(self.fields.embed(entry), twist));
                }
            }
        }
        Ok(m)
    }

    pub fn act_gl2(&self, g: &Gl2, v: &[Elem]) -> Result<WeightVector> {
        Ok(self.gl2_matrix(g)?.apply(v)?)
    }

    /// `[[1, t], [0, 1]]` on `σ`.
    pub fn unipotent_matrix(&self, t: Elem) -> &Matrix {
        &self.unipotent[t.0 as usize]
    }

    pub fn act_unipotent(&self, t: Elem, v: &[Elem]) -> WeightVector {
        if t.is_zero() {
            return v.to_vec();
        }
        self.unipotent[t.0 as usize]
            .apply(v)
            .expect("vector length is the weight dimension")
    }

    /// Action of `ϖ^z·g` for `g ∈ GL₂(O)`: through the reduction of `g`,
    /// times `ν^z`.
    pub fn act_kz(
        &self,
        ring: &LocalRingCtx,
        g: &[[RingElem; 2]; 2],
        z: i64,
        v: &[Elem],
    ) -> Result<WeightVector> {
        let red = [
            [ring.residue(&g[0][0]), ring.residue(&g[0][1])],
            [ring.residue(&g[1][0]), ring.residue(&g[1][1])],
        ];
        let fq = self.fields.fq();
        let det = fq.sub(fq.mul(red[0][0], red[1][1]), fq.mul(red[0][1], red[1][0]));
        if det.is_zero() {
            return Err(WeightError::NotInK);
        }
        let w = self.act_gl2(&red, v)?;
        let k = self.fields.k();
        let nu_z = if z >= 0 {
            k.pow(self.nu, z as u64)
        } else {
            k.pow(k.inv(self.nu).expect("nu is nonzero"), z.unsigned_abs())
        };
        Ok(w.into_iter().map(|x| k.mul(x, nu_z)).collect())
    }

    /// Fixed vectors of the upper unipotent subgroup of `GL₂(F_q)`.
    pub fn u_invariants(&self) -> Subspace {
        fixed_space(self.fields.k(), self.dim(), &self.unipotent)
            .expect("unipotent matrices are square of the weight dimension")
    }
}

/// `poly · (u + v·y)`
fn poly_mul_linear(fq: &crate::gf::Field, poly: &[Elem], u: Elem, v: Elem) -> Vec<Elem> {
    let mut out = vec![Elem::ZERO; poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i] = fq.add(out[i], fq.mul(c, u));
        out[i + 1] = fq.add(out[i + 1], fq.mul(c, v));
    }
    out
}
