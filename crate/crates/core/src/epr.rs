//! Finite-dimensional entangled pairs: conjugate-basis re-expansion,
//! bilateral scattering, and perfectly correlated measurements.
//!
//! The maximally entangled pair |Φ_d⟩ = Σ_j |j⟩|j⟩/√d re-expands in any
//! orthonormal basis {φ_z} as Σ_z |φ_z⟩|φ_z*⟩/√d: finding particle 1 in
//! |φ_z⟩ leaves particle 2 in the conjugate state. Consequently, scattering
//! particle 1 by a unitary u and particle 2 by its elementwise conjugate u*
//! leaves |Φ_d⟩ fixed (the ridge identity (u ⊗ u*)|Φ_d⟩ = |Φ_d⟩), and
//! measuring the two particles in a basis and its conjugate always yields
//! equal outcome indices — however improbable each individual outcome is.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, orthonormality_deviation, CMatrix};
use crate::rng::{master_rng, trial_rng};
use crate::scalar::Real;

/// Tolerance on u†u = 1 for scattering matrices.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on pairwise basis orthonormality.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Tolerance on state normalization.
pub const NORM_TOL: f64 = 1e-12;
/// Joint probabilities below this are treated as exactly zero when sampling.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Joint two-particle state Σ_jk c_jk |j⟩₁|k⟩₂ in dimension d.
#[derive(Debug, Clone, PartialEq)]
pub struct EntangledPair<T> {
    amps: CMatrix<T>,
}

/// Unitary scattering matrix, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix<T> {
    u: CMatrix<T>,
}

/// Rank-1 projective measurement: an orthonormal basis whose index is the
/// outcome label. Degenerate observables are recovered by grouping outcome
/// indices after the fact.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement<T> {
    basis: Vec<Vec<Complex<T>>>,
}

/// Which particle an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    One,
    Two,
}

impl<T: Real> EntangledPair<T> {
    /// Build from an explicit amplitude matrix; must be normalized.
    pub fn from_amplitudes(amps: CMatrix<T>) -> Result<Self> {
        let norm = amps.norm_sqr();
        if (norm - T::one()).abs() > T::of(NORM_TOL) {
            return Err(Error::InvalidParameter {
                name: "amps",
                reason: format!("joint state norm² = {}, not 1", norm.as_f64()),
            });
        }
        Ok(EntangledPair { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.dim()
    }

    pub fn amplitudes(&self) -> &CMatrix<T> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.norm_sqr()
    }
}

impl<T: Real> ScatteringMatrix<T> {
    pub fn new(u: CMatrix<T>) -> Result<Self> {
        let dev = u.unitarity_deviation();
        if dev > T::of(UNITARITY_TOL) {
            return Err(Error::NotUnitary {
                max_dev: dev.as_f64(),
                tol: UNITARITY_TOL,
            });
        }
        Ok(ScatteringMatrix { u })
    }

    /// Haar-random unitary from the given seed.
    pub fn haar_random(dim: usize, seed: u64) -> Result<Self>
    where
        rand_distr::StandardNormal: rand_distr::Distribution<T>,
    {
        Self::new(haar_unitary(dim, &mut master_rng(seed))?)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(ScatteringMatrix {
            u: CMatrix::identity(dim),
        })
    }

    /// Diagonal phase unitary diag(exp(iθ_0), ..., exp(iθ_{d-1})).
    pub fn diagonal_phases(phases: &[T]) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidDimension);
        }
        let mut u = CMatrix::zeros(phases.len());
        for (i, &theta) in phases.iter().enumerate() {
            u[(i, i)] = Complex::from_polar(T::one(), theta);
        }
        Ok(ScatteringMatrix { u })
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.u
    }
}

impl<T: Real> ProjectiveMeasurement<T> {
    pub fn from_basis(basis: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        for v in &basis {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.len(),
                });
            }
        }
        let dev = orthonormality_deviation(&basis);
        if dev > T::of(ORTHONORMALITY_TOL) {
            return Err(Error::NotOrthonormal {
                max_dev: dev.as_f64(),
                tol: ORTHONORMALITY_TOL,
            });
        }
        Ok(ProjectiveMeasurement { basis })
    }

    /// Measurement in the computational basis.
    pub fn computational(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        let basis = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Complex::new(if i == j { T::one() } else { T::zero() }, T::zero()))
                    .collect()
            })
            .collect();
        Ok(ProjectiveMeasurement { basis })
    }

    /// Rows of a Haar-random unitary as the measurement basis.
    pub fn haar_random(dim: usize, seed: u64) -> Result<Self>
    where
        rand_distr::StandardNormal: rand_distr::Distribution<T>,
    {
        let u = haar_unitary::<T, _>(dim, &mut master_rng(seed))?;
        let basis = (0..dim).map(|i| u.row(i).to_vec()).collect();
        Ok(ProjectiveMeasurement { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex<T>>] {
        &self.basis
    }
}

/// The maximally entangled pair c_jk = δ_jk/√d.
pub fn make_maximally_entangled<T: Real>(d: usize) -> Result<EntangledPair<T>> {
    if d == 0 {
        return Err(Error::InvalidDimension);
    }
    let mut amps = CMatrix::zeros(d);
    let w = T::one() / T::of(d as f64).sqrt();
    for j in 0..d {
        amps[(j, j)] = Complex::new(w, T::zero());
    }
    Ok(EntangledPair { amps })
}

/// Overlap matrix M_zw = √d·⟨φ_z|₁⟨φ_w*|₂ψ⟩ of the pair against a basis on
/// particle 1 and its conjugate on particle 2.
///
/// For a maximally entangled pair this is the identity for every orthonormal
/// basis: the state re-expands as Σ_z |φ_z⟩|φ_z*⟩/√d with equal weights.
pub fn conjugate_pair_basis<T: Real>(
    pair: &EntangledPair<T>,
    m: &ProjectiveMeasurement<T>,
) -> Result<CMatrix<T>> {
    let d = pair.dim();
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: m.dim(),
        });
    }
    let scale = T::of(d as f64).sqrt();
    let mut out = CMatrix::zeros(d);
    for z in 0..d {
        for w in 0..d {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..d {
                for k in 0..d {
                    // ⟨φ_z| contributes conj(φ_z[j]); ⟨φ_w*| contributes φ_w[k]
                    acc += m.basis[z][j].conj() * m.basis[w][k] * pair.amps[(j, k)];
                }
            }
            out[(z, w)] = acc * scale;
        }
    }
    Ok(out)
}

/// Scatter particle 1 by `u` and particle 2 by the elementwise conjugate
/// u*: amplitudes map as c → u·c·u†. Unitarity preserves normalization.
pub fn apply_bilateral_scattering<T: Real>(
    pair: &EntangledPair<T>,
    s: &ScatteringMatrix<T>,
) -> Result<EntangledPair<T>> {
    if pair.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: pair.dim(),
            right: s.dim(),
        });
    }
    // (u ⊗ u*) c: Σ_lm u_jl conj(u_km) c_lm = (u · c · u†)_jk
    let amps = s.u.matmul(&pair.amps).matmul(&s.u.dagger());
    Ok(EntangledPair { amps })
}

/// Conjugate the phase of one particle. In the computational product basis
/// this sends every joint amplitude to its conjugate regardless of the side
/// (the basis kets are real); the side records which mirror acted. Applying
/// it twice is the identity.
pub fn phase_conjugate<T: Real>(pair: &EntangledPair<T>, _side: Side) -> EntangledPair<T> {
    EntangledPair {
        amps: pair.amps.conjugated(),
    }
}

/// Joint outcome probabilities p_zw = |⟨φ_z|⟨φ_w*|ψ⟩|² for measuring
/// particle 1 in the basis and particle 2 in its elementwise conjugate.
/// Entries below [`PROBABILITY_FLOOR`] are zeroed.
pub fn joint_outcome_table<T: Real>(
    pair: &EntangledPair<T>,
    m: &ProjectiveMeasurement<T>,
) -> Result<Vec<Vec<T>>> {
    let d = pair.dim();
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: m.dim(),
        });
    }
    let table = m
        .basis
        .iter()
        .map(|bz| {
            m.basis
                .iter()
                .map(|bw| {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (j, az) in bz.iter().enumerate() {
                        for (k, aw) in bw.iter().enumerate() {
                            // particle 2 is measured in the conjugate basis,
                            // so its bra has components φ_w[k]
                            acc += az.conj() * *aw * pair.amps[(j, k)];
                        }
                    }
                    let p = acc.norm_sqr();
                    if p < T::of(PROBABILITY_FLOOR) {
                        T::zero()
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect();
    Ok(table)
}

/// Sample joint measurement outcomes: particle 1 in the given basis,
/// particle 2 in its elementwise conjugate. Each trial is inverse-CDF
/// sampled from the d² joint probabilities on its own seed substream.
pub fn measure_correlated<T: Real>(
    pair: &EntangledPair<T>,
    m: &ProjectiveMeasurement<T>,
    trials: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    let table = joint_outcome_table(pair, m)?;
    let d = pair.dim();
    let mut cumulative = Vec::with_capacity(d * d);
    let mut acc = T::zero();
    for row in &table {
        for &p in row {
            acc += p;
            cumulative.push(acc);
        }
    }
    let total = acc;
    let outcomes = (0..trials)
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let u: T = T::of(rng.random::<f64>()) * total;
            // strict less-than: ties at bucket boundaries go rightward
            let idx = cumulative.partition_point(|&c| c <= u).min(d * d - 1);
            (idx / d, idx % d)
        })
        .collect();
    Ok(outcomes)
}
