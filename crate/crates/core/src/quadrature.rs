//! Field-quadrature statistics of the two-mode squeezed vacuum.
//!
//! Conventions: â₁ = Re(â), so the vacuum quadrature variance is 1/4 (the
//! shot-noise level). For mean photon number N̄ per mode, the joint
//! quadrature wavefunction of a matched signal/idler pair is
//!
//! ```text
//! ψ(α_S, α_I) = exp[-(1+2N̄)(α_S² + α_I²) + 4√(N̄(N̄+1)) α_S α_I] / √(π/2)
//! ```
//!
//! whose squared modulus is a bivariate Gaussian with marginal variance
//! (1+2N̄)/4, cross covariance √(N̄(N̄+1))/2, and conditional variance
//! 1/(4(1+2N̄)). As N̄ grows the conditional spread vanishes: homodyne
//! readings on the two beams become duplicates of each other even though
//! each marginal is high-variance noise.

use rand_distr::{Distribution, StandardNormal};

use crate::opa::TwoModeSqueezedState;
use crate::rng::trial_rng;
use crate::scalar::Real;

/// One joint homodyne reading: signal and idler real-quadrature outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSample<T> {
    pub a_s1: T,
    pub a_i1: T,
}

/// Closed-form homodyne statistics of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalStats<T> {
    /// Regression coefficient of the idler outcome on the signal outcome,
    /// √(4N̄(N̄+1))/(1+2N̄). Also the correlation, since the marginals match.
    pub mean_coeff: T,
    /// Variance of the idler outcome given the signal outcome, 1/(4(1+2N̄)).
    pub cond_var: T,
    /// Marginal variance of either outcome, (1+2N̄)/4.
    pub marg_var: T,
}

/// Joint quadrature wavefunction ψ(a_s1, a_i1); real, positive, symmetric,
/// and unit-normalized: ∬ψ² = 1.
pub fn wavefunction<T: Real>(s: &TwoModeSqueezedState<T>, a_s1: T, a_i1: T) -> T {
    let nbar = s.nbar();
    let diag = T::one() + T::of(2.0) * nbar;
    let cross = T::of(4.0) * (nbar * (nbar + T::one())).sqrt();
    let exponent = -diag * (a_s1 * a_s1 + a_i1 * a_i1) + cross * a_s1 * a_i1;
    exponent.exp() / (T::PI() / T::of(2.0)).sqrt()
}

pub fn conditional_stats<T: Real>(s: &TwoModeSqueezedState<T>) -> ConditionalStats<T> {
    let nbar = s.nbar();
    let diag = T::one() + T::of(2.0) * nbar;
    ConditionalStats {
        mean_coeff: (T::of(4.0) * nbar * (nbar + T::one())).sqrt() / diag,
        cond_var: T::one() / (T::of(4.0) * diag),
        marg_var: diag / T::of(4.0),
    }
}

/// Cross covariance ⟨a_s1 a_i1⟩ = √(4N̄(N̄+1))/4 of the joint distribution.
pub fn cross_covariance<T: Real>(s: &TwoModeSqueezedState<T>) -> T {
    let nbar = s.nbar();
    (T::of(4.0) * nbar * (nbar + T::one())).sqrt() / T::of(4.0)
}

/// Draw joint homodyne samples from the exact bivariate Gaussian.
///
/// Each trial consumes its own deterministic substream of `seed`, so the
/// output is reproducible and independent of evaluation order. The 2x2
/// Cholesky factor is closed-form: the residual scale √(1-ρ²) = 1/(1+2N̄)
/// exactly, so there is no cancellation even for huge N̄ (precision of the
/// residual degrades only once N̄ exceeds ~1e8 in f64).
pub fn sample_homodyne<T>(
    s: &TwoModeSqueezedState<T>,
    trials: usize,
    seed: u64,
) -> Vec<QuadratureSample<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let stats = conditional_stats(s);
    let sigma = stats.marg_var.sqrt();
    let rho = stats.mean_coeff;
    let residual = T::one() / (T::one() + T::of(2.0) * s.nbar());
    (0..trials)
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let z1: T = StandardNormal.sample(&mut rng);
            let z2: T = StandardNormal.sample(&mut rng);
            QuadratureSample {
                a_s1: sigma * z1,
                a_i1: sigma * (rho * z1 + residual * z2),
            }
        })
        .collect()
}

/// Conditional standard deviation of (a_i1 - mean_coeff·a_s1): the residual
/// spread of the idler reading about its prediction from the signal reading.
/// Strictly decreasing in N̄ and vanishing as N̄ → ∞.
pub fn epr_limit_deviation<T: Real>(s: &TwoModeSqueezedState<T>) -> T {
    conditional_stats(s).cond_var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn tmss(nbar: f64) -> TwoModeSqueezedState<f64> {
        TwoModeSqueezedState::new(nbar).unwrap()
    }

    /// 2-D quadrature of ψ² over [-L, L]² by nesting the 1-D adaptive rule.
    /// For large N̄ the mass concentrates on a diagonal ridge of width
    /// √cond_var; the inner pass needs breakpoints there or it sees zero.
    fn norm_check(nbar: f64) -> f64 {
        let s = tmss(nbar);
        let stats = conditional_stats(&s);
        let l = 7.5 * stats.marg_var.sqrt();
        let ridge = stats.cond_var.sqrt();
        let opts = QuadOptions {
            rel_tol: 1e-11,
            abs_tol: 1e-16,
            max_intervals: 2048,
        };
        let outer = integrate(
            |x| {
                let center = stats.mean_coeff * x;
                let bp = [
                    center - 6.0 * ridge,
                    center - ridge,
                    center,
                    center + ridge,
                    center + 6.0 * ridge,
                ];
                integrate(
                    |y| {
                        let psi = wavefunction(&s, x, y);
                        psi * psi
                    },
                    -l,
                    l,
                    &bp,
                    &opts,
                )
                .unwrap()
                .value
            },
            -l,
            l,
            &[],
            &opts,
        )
        .unwrap();
        outer.value
    }

    #[test]
    fn vacuum_wavefunction_is_product_of_quarter_variance_gaussians() {
        let s = tmss(0.0);
        // ψ² for N̄=0 must equal the product of two N(0, 1/4) densities
        for (x, y) in [(0.0, 0.0), (0.3, -0.2), (1.0, 0.5)] {
            let psi = wavefunction(&s, x, y);
            let density = |t: f64| (2.0 / std::f64::consts::PI).sqrt() * (-2.0 * t * t).exp();
            assert!((psi * psi - density(x) * density(y)).abs() < 1e-14);
        }
    }

    #[test]
    fn wavefunction_is_symmetric_and_positive() {
        let s = tmss(2.5);
        for (x, y) in [(0.1, 0.9), (-1.0, 0.4), (2.0, -2.0)] {
            assert_eq!(wavefunction(&s, x, y), wavefunction(&s, y, x));
            assert!(wavefunction(&s, x, y) > 0.0);
        }
    }

    #[test]
    fn wavefunction_squared_normalizes_to_one() {
        for nbar in [0.0, 1.0, 10.0] {
            let v = norm_check(nbar);
            assert!((v - 1.0).abs() < 1e-10, "nbar = {nbar}: ∬ψ² = {v}");
        }
    }

    #[test]
    fn conditional_stats_reference_values() {
        let v = conditional_stats(&tmss(0.0));
        assert_eq!(v.mean_coeff, 0.0);
        assert_eq!(v.cond_var, 0.25);
        assert_eq!(v.marg_var, 0.25);

        let one = conditional_stats(&tmss(1.0));
        assert!((one.mean_coeff - 0.9428090415820634).abs() < 1e-15); // 2√2/3
        assert!((one.cond_var - 1.0 / 12.0).abs() < 1e-16);
        assert!((one.marg_var - 0.75).abs() < 1e-16);

        let ten = conditional_stats(&tmss(10.0));
        assert!((ten.cond_var - 1.0 / 84.0).abs() < 1e-16);
        // strongly sub-shot-noise: well below the coherent-state level of 1/4
        assert!(ten.cond_var < 0.25 / 10.0);
    }

    #[test]
    fn epr_limit_reference_values() {
        assert_eq!(epr_limit_deviation(&tmss(0.0)), 0.5);
        assert!((epr_limit_deviation(&tmss(1.0)) - 1.0 / 12f64.sqrt()).abs() < 1e-15);
        assert!((epr_limit_deviation(&tmss(1e4)) - 0.0035354455208995144).abs() < 1e-12);
    }

    #[test]
    fn sampling_vacuum_is_uncorrelated() {
        let n = 100_000;
        let samples = sample_homodyne(&tmss(0.0), n, 0);
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for q in &samples {
            sx += q.a_s1;
            sy += q.a_i1;
            sxy += q.a_s1 * q.a_i1;
            sxx += q.a_s1 * q.a_s1;
            syy += q.a_i1 * q.a_i1;
        }
        let nf = n as f64;
        let corr = (sxy / nf - sx / nf * sy / nf)
            / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        assert!(corr.abs() < 4.0 / nf.sqrt(), "corr = {corr}");
    }

    #[test]
    fn sampling_residual_variance_matches_conditional() {
        let s = tmss(1.0);
        let stats = conditional_stats(&s);
        let n = 100_000;
        let samples = sample_homodyne(&s, n, 42);
        let mut acc = 0.0;
        for q in &samples {
            let r = q.a_i1 - stats.mean_coeff * q.a_s1;
            acc += r * r;
        }
        let var = acc / n as f64;
        assert!(
            (var - stats.cond_var).abs() / stats.cond_var < 0.05,
            "residual var = {var}, expected {}",
            stats.cond_var
        );
    }

    #[test]
    fn sampling_large_nbar_is_strongly_correlated() {
        let s = tmss(100.0);
        let n = 100_000;
        let samples = sample_homodyne(&s, n, 7);
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for q in &samples {
            sxy += q.a_s1 * q.a_i1;
            sxx += q.a_s1 * q.a_s1;
            syy += q.a_i1 * q.a_i1;
        }
        let corr = sxy / (sxx * syy).sqrt();
        let expected = conditional_stats(&s).mean_coeff;
        assert!(
            (corr - expected).abs() < 5e-3,
            "corr = {corr} vs {expected}"
        );
    }

    #[test]
    fn sample_moments_converge_with_trials() {
        // fixed seed, increasing trial counts: empirical covariance within
        // 4 standard errors of the analytic covariance
        let s = tmss(2.0);
        let stats = conditional_stats(&s);
        let cov = cross_covariance(&s);
        for n in [1_000usize, 10_000, 100_000] {
            let samples = sample_homodyne(&s, n, 3);
            let nf = n as f64;
            let mut sxx = 0.0;
            let mut sxy = 0.0;
            for q in &samples {
                sxx += q.a_s1 * q.a_s1;
                sxy += q.a_s1 * q.a_i1;
            }
            // var of the sample second moment of a Gaussian: 2σ⁴/n (and the
            // cross term's is (σ⁴ρ² + σ⁴)/n); 4 standard errors either way
            let se_xx = (2.0 * stats.marg_var.powi(2) / nf).sqrt();
            let se_xy = ((stats.marg_var.powi(2) + cov * cov) / nf).sqrt();
            assert!(
                (sxx / nf - stats.marg_var).abs() < 4.0 * se_xx,
                "n = {n}: second moment {} vs {}",
                sxx / nf,
                stats.marg_var
            );
            assert!(
                (sxy / nf - cov).abs() < 4.0 * se_xy,
                "n = {n}: cross moment {} vs {cov}",
                sxy / nf
            );
        }
    }

    #[test]
    fn zero_trials_yields_empty() {
        assert!(sample_homodyne(&tmss(1.0), 0, 0).is_empty());
    }

    proptest! {
        #[test]
        fn uncertainty_product_is_pinned(nbar in 0.0..1e8f64) {
            let v = conditional_stats(&tmss(nbar));
            // marg_var · cond_var = 1/16: two roundings at most
            prop_assert!((v.marg_var * v.cond_var - 0.0625).abs() <= 4e-17);
            // the correlation saturates to 1.0 in f64 near N̄ ~ 1e8
            prop_assert!(v.mean_coeff >= 0.0 && v.mean_coeff <= 1.0);
            if nbar < 1e7 {
                prop_assert!(v.mean_coeff < 1.0);
            }
            prop_assert!(v.cond_var <= 0.25 && v.marg_var >= 0.25);
        }

        #[test]
        fn epr_deviation_decreases(nbar in 0.0..1e6f64) {
            let lo = epr_limit_deviation(&tmss(nbar));
            let hi = epr_limit_deviation(&tmss(nbar + 1.0));
            prop_assert!(hi < lo);
        }
    }
}
