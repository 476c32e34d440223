//! Single photon-pair states over a Fourier-mode grid and conjugate-state
//! projection.
//!
//! Over a counting window T with ΓT ≫ 1, the signal/idler fields decompose
//! into Fourier modes at normalized detunings x_n = 2πn/(ΓT). A lone photon
//! pair occupies matched modes, |ψ⟩ = Σ_n ψ_n |1⟩_Sn |1⟩_In with
//! |ψ_n|² ∝ S⁽ⁿ⁾(x_n). Projecting the signal photon onto a wavepacket φ
//! leaves the idler in amplitudes ∝ ψ_n φ_n*: when ψ is flat across φ's
//! support, the idler is exactly the conjugate wavepacket — a low-probability
//! projection whose conditional output is nonetheless perfect.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::opa::{fluorescence_spectrum, OpaParams};
use crate::scalar::Real;

/// Minimum ΓT accepted by [`build_pair_state`]; below this the Fourier-mode
/// picture of the window is not valid.
pub const MIN_GAMMA_T: f64 = 50.0;

/// Probability floor under which a projection is treated as conditioning on
/// a zero-probability event. Far below any representable physical overlap;
/// hitting it signals a caller error, not physics.
pub const MIN_PROJECTION_PROB: f64 = 1e-30;

/// Photon-pair amplitudes over a symmetric mode grid n = -(M-1)/2 ..= (M-1)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState<T> {
    psi: Vec<Complex<T>>,
    mode_freqs: Vec<T>,
}

/// Single-photon wavepacket amplitudes over the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketState<T> {
    phi: Vec<Complex<T>>,
}

fn normalize<T: Real>(amps: &mut [Complex<T>]) -> Result<()> {
    let norm: T = amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::InvalidParameter {
            name: "amplitudes",
            reason: "cannot normalize: zero or non-finite norm".into(),
        });
    }
    for z in amps {
        *z /= norm;
    }
    Ok(())
}

impl<T: Real> PairState<T> {
    pub fn n_modes(&self) -> usize {
        self.psi.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.psi
    }

    /// Normalized detunings x_n = 2πn/(ΓT) of the mode grid.
    pub fn mode_freqs(&self) -> &[T] {
        &self.mode_freqs
    }

    /// Replace the amplitude phases with exp(i·profile(x_n)), keeping the
    /// magnitudes. The spectra fix only |ψ_n|²; this hook is for
    /// experimenting with non-default phase structure.
    pub fn with_phase_profile(mut self, profile: impl Fn(T) -> T) -> Self {
        for (z, &x) in self.psi.iter_mut().zip(&self.mode_freqs) {
            let theta = profile(x);
            *z = Complex::from_polar(z.norm(), theta);
        }
        self
    }
}

impl<T: Real> WavepacketState<T> {
    /// Build from raw amplitudes; normalizes. Errors on zero norm.
    pub fn new(mut phi: Vec<Complex<T>>) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidDimension);
        }
        normalize(&mut phi)?;
        Ok(WavepacketState { phi })
    }

    /// Flat (equal-amplitude) wavepacket over modes with |n| <= half_width,
    /// on a grid of `n_modes` modes.
    pub fn flat_center_band(n_modes: usize, half_width: usize) -> Result<Self> {
        let center = (n_modes.max(1) - 1) / 2;
        let amps: Vec<Complex<T>> = (0..n_modes)
            .map(|i| {
                let n = i as isize - center as isize;
                if n.unsigned_abs() <= half_width {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        WavepacketState::new(amps)
    }

    /// Gaussian wavepacket centered at detuning `center` with rms width
    /// `rms` over the given mode grid.
    pub fn gaussian(mode_freqs: &[T], center: T, rms: T) -> Result<Self> {
        if !(rms > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "rms",
                reason: "gaussian width must be positive".into(),
            });
        }
        let amps: Vec<Complex<T>> = mode_freqs
            .iter()
            .map(|&x| {
                let d = (x - center) / rms;
                Complex::new((-d * d / T::of(4.0)).exp(), T::zero())
            })
            .collect();
        WavepacketState::new(amps)
    }

    pub fn n_modes(&self) -> usize {
        self.phi.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.phi
    }

    /// Elementwise conjugate.
    pub fn conjugated(&self) -> Self {
        WavepacketState {
            phi: self.phi.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Build the photon-pair state on an M-mode grid from the amplifier spectra:
/// ψ_n ∝ √(S⁽ⁿ⁾(x_n)), real-positive (the phase-sensitive spectrum is
/// real-positive), on the grid x_n = 2πn/(ΓT) with ΓT = `gamma_t_window`.
///
/// `n_modes` must be odd so the grid is symmetric about n = 0, and
/// ΓT must be at least [`MIN_GAMMA_T`].
pub fn build_pair_state<T: Real>(
    p: &OpaParams<T>,
    gamma_t_window: T,
    n_modes: usize,
) -> Result<PairState<T>> {
    if !(gamma_t_window >= T::of(MIN_GAMMA_T)) {
        return Err(Error::WindowTooShort {
            gamma_t: gamma_t_window.as_f64(),
            min: MIN_GAMMA_T,
        });
    }
    if n_modes == 0 {
        return Err(Error::InvalidDimension);
    }
    if n_modes.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "n_modes",
            reason: format!("mode count must be odd for a symmetric grid, got {n_modes}"),
        });
    }
    let half = (n_modes - 1) / 2;
    let step = T::of(2.0) * T::PI() / gamma_t_window;
    let mut mode_freqs = Vec::with_capacity(n_modes);
    let mut psi = Vec::with_capacity(n_modes);
    for i in 0..n_modes {
        let n = i as isize - half as isize;
        let x = T::of(n as f64) * step;
        mode_freqs.push(x);
        psi.push(Complex::new(fluorescence_spectrum(p, x).sqrt(), T::zero()));
    }
    normalize(&mut psi)?;
    Ok(PairState { psi, mode_freqs })
}

/// Project the signal photon onto `phi`.
///
/// Returns the success probability Σ_n |ψ_n|²|φ_n|² and the conditional
/// idler wavepacket with amplitudes ψ_n φ_n*/√prob.
pub fn project_signal<T: Real>(
    pair: &PairState<T>,
    phi: &WavepacketState<T>,
) -> Result<(T, WavepacketState<T>)> {
    if pair.n_modes() != phi.n_modes() {
        return Err(Error::DimensionMismatch {
            left: pair.n_modes(),
            right: phi.n_modes(),
        });
    }
    let prob: T = pair
        .psi
        .iter()
        .zip(&phi.phi)
        .map(|(a, b)| a.norm_sqr() * b.norm_sqr())
        .sum();
    if prob < T::of(MIN_PROJECTION_PROB) {
        return Err(Error::OrthogonalProjection {
            prob: prob.as_f64(),
            min: MIN_PROJECTION_PROB,
        });
    }
    let scale = prob.sqrt();
    let idler: Vec<Complex<T>> = pair
        .psi
        .iter()
        .zip(&phi.phi)
        .map(|(a, b)| *a * b.conj() / scale)
        .collect();
    Ok((prob, WavepacketState { phi: idler }))
}

/// Overlap fidelity |Σ_n idler_n φ_n|² between the conditional idler state
/// and the conjugate of the projected wavepacket (global phase discarded).
/// Equals 1 exactly when the idler is conj(φ) up to a phase.
pub fn conjugate_fidelity<T: Real>(idler: &WavepacketState<T>, phi: &WavepacketState<T>) -> T {
    assert_eq!(idler.n_modes(), phi.n_modes(), "mode count mismatch");
    let mut overlap = Complex::new(T::zero(), T::zero());
    for (a, b) in idler.phi.iter().zip(&phi.phi) {
        overlap += *a * *b;
    }
    overlap.norm_sqr()
}
