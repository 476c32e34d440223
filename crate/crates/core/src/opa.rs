//! Output statistics of a below-threshold, doubly-resonant optical parametric
//! amplifier with vacuum signal/idler inputs.
//!
//! The device is characterized by two closed-form spectra in the normalized
//! detuning x = ω/Γ (Γ the cavity-loss rate, G² the pump power normalized to
//! threshold):
//!
//! ```text
//! S⁽ⁿ⁾(x) = |2G / (1 - G² - x² - 2ix)|²              (fluorescence)
//! S⁽ᵖ⁾(x) = 2G (1 + G² + x²) / |1 - G² - x² - 2ix|²  (phase-sensitive)
//! ```
//!
//! S⁽ⁿ⁾ is the mean photon number per mode at detuning x; S⁽ᵖ⁾ is the
//! signal-idler cross-correlation at matched detunings and saturates the
//! quantum bound: [S⁽ᵖ⁾]² = S⁽ⁿ⁾(S⁽ⁿ⁾ + 1) identically. That saturation is
//! the maximal-entanglement signature everything downstream relies on.
//!
//! A matched signal/idler mode pair at detuning ±Δω is a two-mode squeezed
//! vacuum whose squared Schmidt coefficients form a Bose-Einstein (geometric)
//! distribution with mean N̄ = S⁽ⁿ⁾(Δω/Γ).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Construction-time ceiling on the normalized pump power. The spectra
/// diverge at threshold (g2 = 1); beyond 0.99 the downstream quadratures
/// lose accuracy at f64 precision.
pub const MAX_G2: f64 = 0.99;

/// Pump power and cavity linewidth of the amplifier.
///
/// All spectra depend only on the normalized detuning x = ω/Γ; `gamma` is
/// kept so interfaces can report physical frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaParams<T> {
    g2: T,
    gamma: T,
}

impl<T: Real> OpaParams<T> {
    /// `g2` is the pump power normalized to threshold, `gamma` the
    /// cavity-loss rate in rad/s.
    pub fn new(g2: T, gamma: T) -> Result<Self> {
        if !(g2 >= T::zero() && g2 <= T::of(MAX_G2)) {
            return Err(Error::AboveThreshold {
                g2: g2.as_f64(),
                max: MAX_G2,
            });
        }
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("cavity-loss rate must be positive, got {}", gamma.as_f64()),
            });
        }
        Ok(OpaParams { g2, gamma })
    }

    pub fn g2(&self) -> T {
        self.g2
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Pump amplitude G = +√(G²).
    pub fn pump_amplitude(&self) -> T {
        self.g2.sqrt()
    }

    /// |1 - G² - x² - 2ix|² = ((1 - G² - x²))² + 4x², the common denominator
    /// of both spectra.
    fn denom(&self, x: T) -> T {
        let b = T::one() - self.g2 - x * x;
        b * b + T::of(4.0) * x * x
    }
}

/// Fluorescence (normally-ordered) spectrum S⁽ⁿ⁾ at normalized detuning x.
pub fn fluorescence_spectrum<T: Real>(p: &OpaParams<T>, x: T) -> T {
    T::of(4.0) * p.g2() / p.denom(x)
}

/// Phase-sensitive cross spectrum S⁽ᵖ⁾ at normalized detuning x.
pub fn phase_sensitive_spectrum<T: Real>(p: &OpaParams<T>, x: T) -> T {
    let g = p.pump_amplitude();
    T::of(2.0) * g * (T::one() + p.g2() + x * x) / p.denom(x)
}

/// Two-mode squeezed vacuum: the joint state of a matched signal/idler mode
/// pair, parameterized by its mean photon number per mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeSqueezedState<T> {
    nbar: T,
}

impl<T: Real> TwoModeSqueezedState<T> {
    pub fn new(nbar: T) -> Result<Self> {
        if !(nbar >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "nbar",
                reason: format!(
                    "mean photon number must be nonnegative, got {}",
                    nbar.as_f64()
                ),
            });
        }
        Ok(TwoModeSqueezedState { nbar })
    }

    pub fn nbar(&self) -> T {
        self.nbar
    }
}

/// The signal mode at ω_S + Δω paired with the idler mode at ω_I - Δω, for
/// dx = Δω/Γ. Mean photons per mode is the fluorescence spectrum there.
pub fn mode_pair_state<T: Real>(p: &OpaParams<T>, dx: T) -> TwoModeSqueezedState<T> {
    TwoModeSqueezedState {
        nbar: fluorescence_spectrum(p, dx),
    }
}

/// Schmidt coefficients √(N̄ⁿ/(N̄+1)ⁿ⁺¹) for n = 0..=n_max.
///
/// Their squares are the geometric photon-number distribution with mean N̄;
/// the mass left beyond n_max is (N̄/(N̄+1))^(n_max+1).
pub fn schmidt_coefficients<T: Real>(s: &TwoModeSqueezedState<T>, n_max: usize) -> Vec<T> {
    let nbar = s.nbar();
    let head = (T::one() / (nbar + T::one())).sqrt();
    let ratio = (nbar / (nbar + T::one())).sqrt();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = head;
    for _ in 0..=n_max {
        out.push(c);
        c *= ratio;
    }
    out
}

/// Geometric tail mass (N̄/(N̄+1))^(n_max+1) beyond the truncation.
pub fn truncation_tail<T: Real>(nbar: T, n_max: usize) -> T {
    if nbar <= T::zero() {
        return T::zero();
    }
    (nbar / (nbar + T::one())).powi(n_max as i32 + 1)
}

/// Smallest n_max whose tail mass is below `epsilon`.
pub fn truncation_level<T: Real>(nbar: T, epsilon: T) -> usize {
    if nbar <= T::zero() {
        return 0;
    }
    let ratio = nbar / (nbar + T::one());
    let n = (epsilon.ln() / ratio.ln()).ceil().as_f64() as usize;
    n.saturating_sub(1)
}

/// Shared truncation budget for Fock-space representations.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;
