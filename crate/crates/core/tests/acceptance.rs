//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them all).

use twinbeam::counting::{cavity_moments, filter_moments, log_grid, CavityConfig, FilterConfig};
use twinbeam::epr::{
    apply_bilateral_scattering, make_maximally_entangled, measure_correlated,
    ProjectiveMeasurement, ScatteringMatrix,
};
use twinbeam::fock::{bin_sigma2, homodyne_moments, make_tmss, CountingKernel};
use twinbeam::integrate::{integrate, QuadOptions};
use twinbeam::opa::{
    fluorescence_spectrum, phase_sensitive_spectrum, truncation_level, OpaParams,
    TwoModeSqueezedState,
};
use twinbeam::pair::{build_pair_state, conjugate_fidelity, project_signal, WavepacketState};
use twinbeam::quadrature::{conditional_stats, wavefunction};

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

#[test]
fn criterion_1_spectral_identity() {
    let mut worst: f64 = 0.0;
    for g2 in [0.01, 0.5, 0.9] {
        let p = OpaParams::new(g2, 1.0).unwrap();
        for i in 0..10_000 {
            let x = -50.0 + 100.0 * (i as f64) / 9_999.0;
            let sn = fluorescence_spectrum(&p, x);
            let sp = phase_sensitive_spectrum(&p, x);
            let rel = (sp * sp - sn * (sn + 1.0)).abs() / (sn * (sn + 1.0));
            worst = worst.max(rel);
        }
    }
    report(
        1,
        "spectral identity [S\u{207d}\u{1d56}\u{207e}]\u{b2} = S\u{207d}\u{207f}\u{207e}(S\u{207d}\u{207f}\u{207e}+1)",
        worst <= 1e-12,
        &format!("max relative deviation {worst:.3e} on 10\u{2074}-point grids, g2 \u{2208} {{0.01, 0.5, 0.9}}"),
    );
}

#[test]
fn criterion_2_conditional_homodyne_statistics() {
    let mut worst: f64 = 0.0;
    for nbar in [0.1f64, 1.0, 10.0] {
        let state = TwoModeSqueezedState::new(nbar).unwrap();
        let closed = conditional_stats(&state);
        // paper-anchored closed forms
        assert_eq!(closed.marg_var, (1.0 + 2.0 * nbar) / 4.0);
        assert_eq!(closed.cond_var, 1.0 / (4.0 * (1.0 + 2.0 * nbar)));

        let fock = homodyne_moments(&make_tmss(nbar, truncation_level(nbar, 1e-12)).unwrap());
        worst = worst.max((fock.marg_var - closed.marg_var).abs());
        worst = worst.max((fock.mean_coeff() - closed.mean_coeff).abs());
        worst = worst.max((fock.cond_var() - closed.cond_var).abs());
    }
    report(
        2,
        "conditional homodyne statistics vs Fock oracle",
        worst <= 1e-6,
        &format!("max |closed form - oracle| = {worst:.3e} over N\u{304} \u{2208} {{0.1, 1, 10}}"),
    );
}

#[test]
fn criterion_3_scattered_pair_outcomes_always_match() {
    let configs = 50;
    let trials = 1_000;
    let mut total_matched = 0usize;
    let mut total = 0usize;
    for cfg in 0..configs {
        let seed = 1000 + cfg as u64;
        // dimension drawn deterministically in 2..=8
        let d = 2 + (seed as usize * 2654435761) % 7;
        let pair = make_maximally_entangled::<f64>(d).unwrap();
        let s = ScatteringMatrix::haar_random(d, seed).unwrap();
        let scattered = apply_bilateral_scattering(&pair, &s).unwrap();
        let m = ProjectiveMeasurement::haar_random(d, seed ^ 0xDEAD).unwrap();
        let outcomes = measure_correlated(&scattered, &m, trials, seed).unwrap();
        total += outcomes.len();
        total_matched += outcomes.iter().filter(|&&(a, b)| a == b).count();
    }
    report(
        3,
        "perfect outcome correlation through random scattering",
        total_matched == total && total == configs * trials,
        &format!("{total_matched}/{total} joint outcomes matched over {configs} random (unitary, basis, d \u{2264} 8) configurations"),
    );
}

#[test]
fn criterion_4_cavity_sweep_is_monotone_and_vanishes() {
    let p = OpaParams::new(0.01, 1.0).unwrap();
    let grid = log_grid(1e-3, 1.0, 25).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for dx in [0.0, 1.0, 2.0] {
        let sigmas: Vec<f64> = grid
            .iter()
            .map(|&gc| {
                cavity_moments(&p, &CavityConfig::new(gc, dx).unwrap())
                    .unwrap()
                    .sigma2
            })
            .collect();
        let monotone = sigmas.windows(2).all(|w| w[0] <= w[1] + 1e-12);
        pass &= monotone;
        if dx == 0.0 {
            pass &= sigmas[0] < 0.05;
            detail = format!(
                "sigma2(gc=1e-3, dx=0) = {:.5}, monotone nonincreasing toward gc \u{2192} 0 for dx \u{2208} {{0, 1, 2}}",
                sigmas[0]
            );
        }
    }
    report(4, "cavity-loading variance sweep", pass, &detail);
}

#[test]
fn criterion_5_filter_variance_law() {
    let p = OpaParams::new(0.01, 1.0).unwrap();
    let mut worst_rel: f64 = 0.0;
    for k in [1u32, 2, 4, 8] {
        let s = filter_moments(&p, &FilterConfig::new(k, 1e-3, 0.0).unwrap()).unwrap();
        let law = 1.0 / (2.0 * k as f64);
        worst_rel = worst_rel.max((s.sigma2 - law).abs() / law);
    }
    report(
        5,
        "Butterworth filter variance \u{2248} 1/2K",
        worst_rel < 0.05,
        &format!("max relative deviation from 1/(2K): {worst_rel:.4} for K \u{2208} {{1, 2, 4, 8}} at \u{3c9}c/\u{393} = 1e-3"),
    );
}

#[test]
fn criterion_6_closed_forms_match_fock_bin_oracle() {
    let p = OpaParams::new(0.01f64, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for gc in [0.1, 1.0] {
        let cfg = CavityConfig::new(gc, 0.0).unwrap();
        let closed = cavity_moments(&p, &cfg).unwrap().sigma2;
        let oracle = bin_sigma2(&p, &CountingKernel::Cavity(cfg), 2001, 100.0).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    for (k, w, span) in [(1u32, 0.1, 60.0), (1, 1.0, 100.0), (2, 1.0, 100.0)] {
        let cfg = FilterConfig::new(k, w, 0.0).unwrap();
        let closed = filter_moments(&p, &cfg).unwrap().sigma2;
        let oracle = bin_sigma2(&p, &CountingKernel::Butterworth(cfg), 2001, span).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    report(
        6,
        "moment-factored counting vs independent bin oracle",
        worst <= 1e-3,
        &format!("max |closed form - bin oracle| = {worst:.2e} at bandwidth ratios {{0.1, 1}}, 2001 bins"),
    );
}

#[test]
fn criterion_7_conjugate_state_projection() {
    let p = OpaParams::new(0.01f64, 1.0).unwrap();

    // flat-spectrum exactness: over a support where ψ is constant the idler
    // is the exact conjugate. A single-mode grid and a single-mode
    // wavepacket on a wide grid both realize that case with public API.
    let single = build_pair_state(&p, 200.0, 1).unwrap();
    let phi1 = WavepacketState::new(vec![num_complex::Complex::new(0.6, 0.8)]).unwrap();
    let (_, idler1) = project_signal(&single, &phi1).unwrap();
    let mut flat_dev = (conjugate_fidelity(&idler1, &phi1) - 1.0).abs();

    let wide = build_pair_state(&p, 200.0, 201).unwrap();
    let one_mode = WavepacketState::flat_center_band(201, 0).unwrap();
    let (_, idler_one) = project_signal(&wide, &one_mode).unwrap();
    flat_dev = flat_dev.max((conjugate_fidelity(&idler_one, &one_mode) - 1.0).abs());

    // spectrum-shaped pair over the full band, wavepacket flat on the
    // central 10% of the modes: near-perfect conditional state at low
    // success probability
    let phi = WavepacketState::flat_center_band(201, 10).unwrap(); // 21 of 201 modes
    let (prob, idler) = project_signal(&wide, &phi).unwrap();
    let fid = conjugate_fidelity(&idler, &phi);

    let pass = flat_dev <= 1e-12 && fid > 0.99 && prob < 0.2;
    report(
        7,
        "conjugate-state projection",
        pass,
        &format!(
            "flat-support fidelity deviation {flat_dev:.1e}; shaped spectrum: fidelity {fid:.5} at success probability {prob:.4}"
        ),
    );
}

#[test]
fn criterion_8_quadrature_wavefunction_normalization() {
    let opts = QuadOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-16,
        max_intervals: 4096,
    };
    let mut worst: f64 = 0.0;
    for nbar in [0.0f64, 1.0, 10.0] {
        let s = TwoModeSqueezedState::new(nbar).unwrap();
        let stats = conditional_stats(&s);
        let l = 7.5 * stats.marg_var.sqrt();
        let ridge = stats.cond_var.sqrt();
        let value = integrate(
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
        .unwrap()
        .value;
        worst = worst.max((value - 1.0).abs());
    }
    report(
        8,
        "quadrature wavefunction normalization \u{222c}\u{3c8}\u{b2} = 1",
        worst <= 1e-10,
        &format!(
            "max |\u{222c}\u{3c8}\u{b2} - 1| = {worst:.2e} for N\u{304} \u{2208} {{0, 1, 10}}"
        ),
    );
}
