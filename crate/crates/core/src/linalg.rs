//! Small dense complex matrices and vectors.
//!
//! The entangled-pair demonstrations live in dimensions d <= 16, so this is a
//! plain row-major `Vec` store with the handful of operations the crate needs:
//! products, adjoints, orthonormalization, and Haar-random unitaries.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Build from rows; all rows must have length equal to the row count.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(CMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Elementwise complex conjugate.
    pub fn conjugated(&self) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Sum of |z|^2 over all entries.
    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// max_ij |(self - I)_ij|.
    pub fn max_deviation_from_identity(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { T::one() } else { T::zero() };
                let dev = (self[(i, j)] - Complex::new(target, T::zero())).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    /// Deviation of u†u from the identity.
    pub fn unitarity_deviation(&self) -> T {
        self.dagger().matmul(self).max_deviation_from_identity()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Inner product ⟨a|b⟩ = Σ conj(a_i) b_i.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * *y;
    }
    acc
}

pub fn vec_norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Largest pairwise deviation of a set of vectors from orthonormality,
/// i.e. max_zw |⟨v_z|v_w⟩ - δ_zw|.
pub fn orthonormality_deviation<T: Real>(vectors: &[Vec<Complex<T>>]) -> T {
    let mut worst = T::zero();
    for (z, vz) in vectors.iter().enumerate() {
        for (w, vw) in vectors.iter().enumerate() {
            let target = if z == w { T::one() } else { T::zero() };
            let dev = (inner(vz, vw) - Complex::new(target, T::zero())).norm();
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// Orthonormalize the rows of `m` in place by modified Gram-Schmidt.
///
/// Returns an error if a row collapses to (numerical) zero, i.e. the rows
/// were linearly dependent.
pub fn gram_schmidt_rows<T: Real>(m: &mut CMatrix<T>) -> Result<()> {
    let d = m.dim();
    for i in 0..d {
        for j in 0..i {
            let proj = inner(m.row(j), m.row(i));
            for k in 0..d {
                let adj = proj * m[(j, k)];
                m[(i, k)] -= adj;
            }
        }
        let norm = vec_norm(m.row(i));
        if norm < T::of(1e-12) {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: "rows are linearly dependent; cannot orthonormalize".into(),
            });
        }
        for k in 0..d {
            m[(i, k)] /= norm;
        }
    }
    Ok(())
}

/// Haar-distributed random unitary: orthonormalized complex Gaussian matrix.
///
/// Modified Gram-Schmidt yields the QR factor with positive-real diagonal R,
/// which makes the resulting Q exactly Haar-distributed.
pub fn haar_unitary<T, R>(dim: usize, rng: &mut R) -> Result<CMatrix<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if dim == 0 {
        return Err(Error::InvalidDimension);
    }
    let mut m = CMatrix::zeros(dim);
    let sqrt_half = T::of(0.5).sqrt();
    for i in 0..dim {
        for j in 0..dim {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            m[(i, j)] = Complex::new(re * sqrt_half, im * sqrt_half);
        }
    }
    gram_schmidt_rows(&mut m)?;
    Ok(m)
}
