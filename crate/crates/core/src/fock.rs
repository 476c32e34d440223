//! Brute-force Fock-space validator.
//!
//! Everything the closed forms in [`crate::quadrature`] and
//! [`crate::counting`] assert about Gaussian states is re-derived here from
//! truncated number-basis amplitudes and elementary probability, with no
//! Gaussian moment factoring anywhere on the path:
//!
//! * quadrature second moments come from the ladder-operator matrix elements
//!   summed over the amplitude array;
//! * attenuation moments come from Bernoulli thinning of the joint
//!   photon-number distribution (exact for photodetection through a lossy
//!   coupling to vacuum);
//! * photocount-difference variances come from discretizing the stationary
//!   field into independent frequency-bin mode pairs and summing.

use num_complex::Complex;

use crate::counting::{butterworth_transmission, CavityConfig, FilterConfig};
use crate::error::{Error, Result};
use crate::opa::{
    fluorescence_spectrum, phase_sensitive_spectrum, truncation_level, truncation_tail, OpaParams,
    DEFAULT_TAIL_EPSILON,
};
use crate::scalar::Real;

/// Hard ceiling on the per-state truncation the oracle will allocate.
/// Beyond this the brute-force route stops being a desk-scale check.
pub const MAX_ORACLE_TRUNCATION: usize = 2048;

/// Two-mode state truncated at `n_max` photons per mode; `amps[(j, k)]` is
/// the amplitude of |j⟩_S |k⟩_I, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTwoModeState<T> {
    n_max: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> TruncatedTwoModeState<T> {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitude(&self, j: usize, k: usize) -> Complex<T> {
        self.amps[j * (self.n_max + 1) + k]
    }

    /// Captured norm Σ|a_jk|²; at most 1, and at least 1 - tail for states
    /// built by [`make_tmss`].
    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Total probability on the off-diagonal (n_S ≠ n_I) part.
    pub fn offdiagonal_mass(&self) -> T {
        let mut acc = T::zero();
        for j in 0..=self.n_max {
            for k in 0..=self.n_max {
                if j != k {
                    acc += self.amplitude(j, k).norm_sqr();
                }
            }
        }
        acc
    }

    /// ⟨â_S â_I⟩ from the ladder matrix elements.
    pub fn phase_sensitive_moment(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 1..=self.n_max {
            for k in 1..=self.n_max {
                let jk = T::of((j * k) as f64).sqrt();
                acc += self.amplitude(j - 1, k - 1).conj() * self.amplitude(j, k) * jk;
            }
        }
        acc
    }
}

/// Two-mode squeezed vacuum with mean photon number `nbar` per mode,
/// truncated at `n_max`. The caller must pick `n_max` deep enough that the
/// geometric tail mass is below the shared budget of 1e-12.
pub fn make_tmss<T: Real>(nbar: T, n_max: usize) -> Result<TruncatedTwoModeState<T>> {
    if !(nbar >= T::zero()) {
        return Err(Error::InvalidParameter {
            name: "nbar",
            reason: format!(
                "mean photon number must be nonnegative, got {}",
                nbar.as_f64()
            ),
        });
    }
    let tail = truncation_tail(nbar, n_max);
    if !(tail < T::of(DEFAULT_TAIL_EPSILON)) {
        return Err(Error::Truncation {
            tail: tail.as_f64(),
            limit: DEFAULT_TAIL_EPSILON,
        });
    }
    let dim = n_max + 1;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    let head = (T::one() / (nbar + T::one())).sqrt();
    let ratio = (nbar / (nbar + T::one())).sqrt();
    let mut c = head;
    for n in 0..dim {
        amps[n * dim + n] = Complex::new(c, T::zero());
        c *= ratio;
    }
    Ok(TruncatedTwoModeState { n_max, amps })
}

/// Exact photon-number moments after transmitting each arm through an
/// independent lossy coupling to vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberMoments<T> {
    pub n_s: T,
    pub n_i: T,
    pub n_s_sq: T,
    pub n_i_sq: T,
    /// ⟨n̂_S n̂_I⟩.
    pub cross: T,
    /// Attenuated phase-sensitive moment √(η_s η_i)·⟨â_S â_I⟩.
    pub phase_sensitive: Complex<T>,
}

impl<T: Real> NumberMoments<T> {
    /// Raw second moment ⟨(n̂_S - n̂_I)²⟩.
    pub fn difference_second_moment(&self) -> T {
        self.n_s_sq - T::of(2.0) * self.cross + self.n_i_sq
    }

    /// σ² = ⟨(n̂_S - n̂_I)²⟩/(⟨n̂_S⟩ + ⟨n̂_I⟩); 1.0 at zero flux by the
    /// shot-noise convention.
    pub fn normalized_difference_variance(&self) -> T {
        let flux = self.n_s + self.n_i;
        if flux <= T::zero() {
            return T::one();
        }
        self.difference_second_moment() / flux
    }
}

/// Bernoulli-thin the joint photon-number distribution: a photon in arm S
/// (I) survives independently with probability `eta_s` (`eta_i`). Thinning
/// is exact for photon-number moments behind a beamsplitter; per count
/// (j, k) the thinned moments are binomial,
/// E[m] = ηj, E[m²] = η²j(j-1) + ηj, E[m_s m_i] = η_s η_i jk.
pub fn attenuate<T: Real>(
    state: &TruncatedTwoModeState<T>,
    eta_s: T,
    eta_i: T,
) -> NumberMoments<T> {
    debug_assert!(
        eta_s >= T::zero() && eta_s <= T::one(),
        "eta_s out of [0,1]"
    );
    debug_assert!(
        eta_i >= T::zero() && eta_i <= T::one(),
        "eta_i out of [0,1]"
    );
    let mut n_s = T::zero();
    let mut n_i = T::zero();
    let mut n_s_sq = T::zero();
    let mut n_i_sq = T::zero();
    let mut cross = T::zero();
    for j in 0..=state.n_max {
        for k in 0..=state.n_max {
            let p = state.amplitude(j, k).norm_sqr();
            if p == T::zero() {
                continue;
            }
            let jf = T::of(j as f64);
            let kf = T::of(k as f64);
            n_s += p * eta_s * jf;
            n_i += p * eta_i * kf;
            n_s_sq += p * (eta_s * eta_s * jf * (jf - T::one()) + eta_s * jf);
            n_i_sq += p * (eta_i * eta_i * kf * (kf - T::one()) + eta_i * kf);
            cross += p * eta_s * eta_i * jf * kf;
        }
    }
    let phase_sensitive = state.phase_sensitive_moment() * (eta_s * eta_i).sqrt();
    NumberMoments {
        n_s,
        n_i,
        n_s_sq,
        n_i_sq,
        cross,
        phase_sensitive,
    }
}

/// Quadrature second moments read off the amplitude array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneMoments<T> {
    /// Var(a_s1) = (1 + 2⟨n̂_S⟩ + 2Re⟨â_S²⟩)/4.
    pub marg_var: T,
    /// Cov(a_s1, a_i1) = Re(⟨â_S â_I⟩ + ⟨â_S â_I†⟩)/2.
    pub cross_cov: T,
}

impl<T: Real> HomodyneMoments<T> {
    /// Regression coefficient of the idler reading on the signal reading.
    pub fn mean_coeff(&self) -> T {
        self.cross_cov / self.marg_var
    }

    /// Conditional variance of the idler reading given the signal reading.
    pub fn cond_var(&self) -> T {
        self.marg_var - self.cross_cov * self.cross_cov / self.marg_var
    }
}

/// Compute homodyne (real-quadrature) second moments from the Fock
/// amplitudes via the standard ladder-operator matrix elements. Truncation
/// must satisfy the shared 1e-12 tail budget for the reported moments to be
/// trustworthy at 1e-6.
pub fn homodyne_moments<T: Real>(state: &TruncatedTwoModeState<T>) -> HomodyneMoments<T> {
    let n = state.n_max;
    let mut mean_n = T::zero();
    let mut a_s_sq = Complex::new(T::zero(), T::zero());
    let mut a_s_a_i = Complex::new(T::zero(), T::zero());
    let mut a_s_a_i_dag = Complex::new(T::zero(), T::zero());
    for j in 0..=n {
        for k in 0..=n {
            let a = state.amplitude(j, k);
            if a.norm_sqr() == T::zero() {
                continue;
            }
            mean_n += a.norm_sqr() * T::of(j as f64);
            if j >= 2 {
                let el = T::of((j * (j - 1)) as f64).sqrt();
                a_s_sq += state.amplitude(j - 2, k).conj() * a * el;
            }
            if j >= 1 && k >= 1 {
                let el = T::of((j * k) as f64).sqrt();
                a_s_a_i += state.amplitude(j - 1, k - 1).conj() * a * el;
            }
            if j >= 1 && k < n {
                let el = T::of((j * (k + 1)) as f64).sqrt();
                a_s_a_i_dag += state.amplitude(j - 1, k + 1).conj() * a * el;
            }
        }
    }
    let quarter = T::of(0.25);
    let two = T::of(2.0);
    HomodyneMoments {
        marg_var: quarter * (T::one() + two * mean_n + two * a_s_sq.re),
        cross_cov: (a_s_a_i.re + a_s_a_i_dag.re) / two,
    }
}

/// Which counting kernel the bin decomposition models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountingKernel<T> {
    Cavity(CavityConfig<T>),
    Butterworth(FilterConfig<T>),
}

/// One frequency bin of the discretized stationary field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin<T> {
    /// Normalized detuning of the bin center (relative to the kernel center).
    pub center: T,
    /// Fluorescence spectrum at the bin: mean photons per mode.
    pub s_n: T,
    /// Phase-sensitive spectrum at the bin.
    pub s_p: T,
    /// Kernel weight: intensity transmission for a filter bin, squared mode
    /// coupling ℓ(u)·Δu for a cavity bin.
    pub transmission: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinDecomposition<T> {
    pub bins: Vec<Bin<T>>,
    pub bin_width: T,
}

/// Fraction of the kernel-weighted spectral mass estimated to lie outside
/// the span, relative to the captured mass; 1e-4 is the acceptance line.
pub const MAX_UNCAPTURED_MASS: f64 = 1e-4;

fn kernel_weight<T: Real>(kernel: &CountingKernel<T>, u: T, bin_width: T) -> T {
    match kernel {
        CountingKernel::Cavity(c) => {
            let g = c.gc_over_g;
            T::of(2.0) * g / ((g * g + u * u) * T::of(2.0) * T::PI()) * bin_width
        }
        CountingKernel::Butterworth(f) => butterworth_transmission(f.k_order, f.wc_over_g, u),
    }
}

/// Discretize the field into `n_bins` mode pairs across `span`.
pub fn decompose_bins<T: Real>(
    p: &OpaParams<T>,
    kernel: &CountingKernel<T>,
    n_bins: usize,
    span: T,
) -> Result<BinDecomposition<T>> {
    if n_bins < 101 || n_bins.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "n_bins",
            reason: format!("need an odd bin count of at least 101, got {n_bins}"),
        });
    }
    if !(span > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "span",
            reason: "span must be positive".into(),
        });
    }
    let (dx, resolution) = match kernel {
        CountingKernel::Cavity(c) => (c.dx, c.gc_over_g),
        CountingKernel::Butterworth(f) => {
            // nearest pole of the Butterworth response to the real axis
            let angle = T::PI() / T::of(2.0 * f.k_order as f64);
            (f.dx, f.wc_over_g * angle.sin())
        }
    };
    let width = span / T::of(n_bins as f64);
    if width > resolution / T::of(2.0) {
        return Err(Error::InvalidParameter {
            name: "n_bins",
            reason: format!(
                "bin width {:.3e} cannot resolve the kernel scale {:.3e}; use more bins or a smaller span",
                width.as_f64(),
                resolution.as_f64()
            ),
        });
    }
    let half = T::of((n_bins as f64 - 1.0) / 2.0);
    let bins: Vec<Bin<T>> = (0..n_bins)
        .map(|j| {
            let center = (T::of(j as f64) - half) * width;
            Bin {
                center,
                s_n: fluorescence_spectrum(p, center + dx),
                s_p: phase_sensitive_spectrum(p, center + dx),
                transmission: kernel_weight(kernel, center, width),
            }
        })
        .collect();

    // Span-coverage check: bound the uncaptured kernel-weighted mass by the
    // edge values with a 1/u^4 decay envelope (the slowest tail here is
    // kernel x phase-sensitive spectrum).
    let captured: T = bins.iter().map(|b| b.transmission * b.s_p).sum();
    if captured > T::zero() {
        let edge = T::of(0.5) * span;
        let first = &bins[0];
        let last = &bins[n_bins - 1];
        let per_width = |b: &Bin<T>| match kernel {
            // cavity transmissions already carry the bin width
            CountingKernel::Cavity(_) => b.transmission * b.s_p / width,
            CountingKernel::Butterworth(_) => b.transmission * b.s_p,
        };
        let tail = (per_width(first) + per_width(last)) * edge / T::of(3.0);
        let captured_mass = match kernel {
            CountingKernel::Cavity(_) => captured,
            CountingKernel::Butterworth(_) => captured * width,
        };
        let missing = tail / (captured_mass + tail);
        if missing > T::of(MAX_UNCAPTURED_MASS) {
            return Err(Error::SpanCoverage {
                missing: missing.as_f64(),
                limit: MAX_UNCAPTURED_MASS,
            });
        }
    }
    Ok(BinDecomposition {
        bins,
        bin_width: width,
    })
}

fn oracle_truncation<T: Real>(nbar: T) -> Result<usize> {
    let level = truncation_level(nbar, T::of(DEFAULT_TAIL_EPSILON));
    if level > MAX_ORACLE_TRUNCATION {
        return Err(Error::Truncation {
            tail: truncation_tail(nbar, MAX_ORACLE_TRUNCATION).as_f64(),
            limit: DEFAULT_TAIL_EPSILON,
        });
    }
    Ok(level)
}

/// Brute-force σ² for a counting scenario.
///
/// Filter kernel: every bin is an independent two-mode squeezed pair with
/// per-mode mean S⁽ⁿ⁾ at its detuning, thinned by the bin's intensity
/// transmission; means and difference variances add across bins.
///
/// Cavity kernel: the loaded cavity mode interferes the bins coherently
/// rather than counting them separately, so the bins are summed into the
/// cavity pair's mean n = Σℓ_jΔu·S⁽ⁿ⁾ and cross moment q = Σℓ_jΔu·S⁽ᵖ⁾
/// first. A zero-mean Gaussian pair with equal means and those moments is
/// exactly a pure two-mode squeezed vacuum of mean N₀ = n²/(q²-n²) seen
/// through transmission η = (q²-n²)/n, so its count statistics are again
/// produced by thinning — no Gaussian moment factoring on this path.
pub fn bin_sigma2<T: Real>(
    p: &OpaParams<T>,
    kernel: &CountingKernel<T>,
    n_bins: usize,
    span: T,
) -> Result<T> {
    let decomposition = decompose_bins(p, kernel, n_bins, span)?;
    if p.g2() <= T::zero() {
        return Ok(T::one());
    }
    match kernel {
        CountingKernel::Butterworth(_) => {
            let mut diff_sq = T::zero();
            let mut flux = T::zero();
            for bin in &decomposition.bins {
                if bin.s_n <= T::zero() {
                    continue;
                }
                let state = make_tmss(bin.s_n, oracle_truncation(bin.s_n)?)?;
                let m = attenuate(&state, bin.transmission, bin.transmission);
                diff_sq += m.difference_second_moment();
                flux += m.n_s + m.n_i;
            }
            if flux <= T::zero() {
                return Ok(T::one());
            }
            Ok(diff_sq / flux)
        }
        CountingKernel::Cavity(_) => {
            let mut n = T::zero();
            let mut q = T::zero();
            for bin in &decomposition.bins {
                n += bin.transmission * bin.s_n;
                q += bin.transmission * bin.s_p;
            }
            if n <= T::zero() {
                return Ok(T::one());
            }
            let excess = q * q - n * n;
            if excess <= T::zero() {
                // q > n holds pointwise for any pumped spectrum, so a
                // nonpositive excess means the captured flux is at rounding
                // level; report the zero-flux convention.
                return Ok(T::one());
            }
            let eta = (excess / n).min(T::one());
            let nbar0 = n * n / excess;
            let state = make_tmss(nbar0, oracle_truncation(nbar0)?)?;
            let m = attenuate(&state, eta, eta);
            Ok(m.normalized_difference_variance())
        }
    }
}
