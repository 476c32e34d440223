//! Command dispatch and output emission.
//!
//! Every command writes one primary file: a CSV table whose first line is a
//! `#` comment echoing the artifact version and the full resolved
//! configuration (so identical configs produce byte-identical files), then
//! the column schema, then the rows. The epr-demo command writes a JSON
//! summary instead.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use twinbeam::counting::{fig3_sweep, filter_moments, log_grid, CavityConfig, FilterConfig};
use twinbeam::epr::{
    apply_bilateral_scattering, joint_outcome_table, make_maximally_entangled, measure_correlated,
    ProjectiveMeasurement, ScatteringMatrix,
};
use twinbeam::fock::{
    bin_sigma2, homodyne_moments, make_tmss, CountingKernel, MAX_ORACLE_TRUNCATION,
};
use twinbeam::opa::{
    fluorescence_spectrum, phase_sensitive_spectrum, truncation_level, OpaParams,
    TwoModeSqueezedState,
};
use twinbeam::pair::{build_pair_state, conjugate_fidelity, project_signal, WavepacketState};
use twinbeam::quadrature::{conditional_stats, sample_homodyne};

use crate::config::{PhiSpec, ResolvedCommand, RunConfig};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Absolute σ² agreement required for an oracle row to count as passing.
const ORACLE_SIGMA2_TOL: f64 = 1e-3;
/// Relative tolerance for the per-row spectral-identity check.
const IDENTITY_REL_TOL: f64 = 1e-12;

/// One emitted file.
pub struct Emitted {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

impl Emitted {
    fn write(&self) -> Result<(), CliError> {
        if let Some(parent) = self.path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| CliError::Io {
                    path: parent.to_path_buf(),
                    source: e,
                })?;
            }
        }
        std::fs::write(&self.path, &self.bytes).map_err(|e| CliError::Io {
            path: self.path.clone(),
            source: e,
        })
    }
}

fn header_comment(config: &RunConfig, params: &str) -> String {
    let mut line = format!(
        "# twinbeam {VERSION} command={} {params} seed={} with-oracle={}",
        command_name(&config.command),
        config.seed,
        config.with_oracle
    );
    if let Some(hz) = config.gamma_hz {
        write!(
            line,
            " gamma-hz={hz} (labels only; quantities stay normalized)"
        )
        .unwrap();
    }
    line
}

fn command_name(cmd: &ResolvedCommand) -> &'static str {
    match cmd {
        ResolvedCommand::Spectra { .. } => "spectra",
        ResolvedCommand::Quadrature { .. } => "quadrature",
        ResolvedCommand::Pairs { .. } => "pairs",
        ResolvedCommand::Fig3 { .. } => "fig3",
        ResolvedCommand::Filters { .. } => "filters",
        ResolvedCommand::EprDemo { .. } => "epr-demo",
    }
}

fn reject_oracle(config: &RunConfig) -> Result<(), CliError> {
    if config.with_oracle {
        return Err(CliError::Usage {
            key: "with-oracle".into(),
            reason: format!(
                "no independent oracle is defined for `{}`",
                command_name(&config.command)
            ),
        });
    }
    Ok(())
}

/// Execute a resolved run and return the file to write.
pub fn execute(config: &RunConfig) -> Result<Emitted, CliError> {
    let bytes = match &config.command {
        ResolvedCommand::Spectra { g2, x_max, points } => {
            run_spectra(config, *g2, *x_max, *points)?
        }
        ResolvedCommand::Quadrature { nbar, trials } => run_quadrature(config, *nbar, *trials)?,
        ResolvedCommand::Pairs {
            g2,
            gamma_t,
            modes,
            phi,
        } => run_pairs(config, *g2, *gamma_t, *modes, phi)?,
        ResolvedCommand::Fig3 { g2, dx, gc_grid } => run_fig3(config, *g2, dx, gc_grid)?,
        ResolvedCommand::Filters {
            g2,
            k,
            wc_over_g,
            dx,
        } => run_filters(config, *g2, k, *wc_over_g, *dx)?,
        ResolvedCommand::EprDemo { dim, trials } => run_epr_demo(config, *dim, *trials)?,
    };
    Ok(Emitted {
        path: config.output_path.clone(),
        bytes,
    })
}

fn run_spectra(
    config: &RunConfig,
    g2: f64,
    x_max: f64,
    points: usize,
) -> Result<Vec<u8>, CliError> {
    if points < 2 {
        return Err(CliError::Usage {
            key: "points".into(),
            reason: "need at least 2 grid points".into(),
        });
    }
    if !(x_max > 0.0) {
        return Err(CliError::Usage {
            key: "x-max".into(),
            reason: "grid half-width must be positive".into(),
        });
    }
    let p = OpaParams::new(g2, 1.0)?;
    let mut out = String::new();
    let params = format!("g2={g2} x-max={x_max} points={points}");
    out.push_str(&header_comment(config, &params));
    out.push('\n');
    out.push_str(if config.with_oracle {
        "x,s_n,s_p,identity_ok\n"
    } else {
        "x,s_n,s_p\n"
    });
    for i in 0..points {
        let x = -x_max + 2.0 * x_max * (i as f64) / ((points - 1) as f64);
        let sn = fluorescence_spectrum(&p, x);
        let sp = phase_sensitive_spectrum(&p, x);
        if config.with_oracle {
            let bound = sn * (sn + 1.0);
            let ok = if bound > 0.0 {
                (sp * sp - bound).abs() / bound <= IDENTITY_REL_TOL
            } else {
                sp == 0.0
            };
            writeln!(out, "{x},{sn},{sp},{ok}").unwrap();
        } else {
            writeln!(out, "{x},{sn},{sp}").unwrap();
        }
    }
    Ok(out.into_bytes())
}

fn run_quadrature(config: &RunConfig, nbar: f64, trials: usize) -> Result<Vec<u8>, CliError> {
    let state = TwoModeSqueezedState::new(nbar)?;
    let samples = sample_homodyne(&state, trials, config.seed);
    let mut out = String::new();
    let params = format!("nbar={nbar} trials={trials}");
    out.push_str(&header_comment(config, &params));
    out.push('\n');
    if config.with_oracle {
        let stats = conditional_stats(&state);
        let level = truncation_level(nbar, 1e-12);
        if level > MAX_ORACLE_TRUNCATION {
            return Err(CliError::Core(twinbeam::Error::Truncation {
                tail: twinbeam::opa::truncation_tail(nbar, MAX_ORACLE_TRUNCATION),
                limit: 1e-12,
            }));
        }
        let fock = homodyne_moments(&make_tmss(nbar, level)?);
        let ok = (fock.marg_var - stats.marg_var).abs() <= 1e-6
            && (fock.mean_coeff() - stats.mean_coeff).abs() <= 1e-6
            && (fock.cond_var() - stats.cond_var).abs() <= 1e-6;
        writeln!(
            out,
            "# oracle marg_var closed={} fock={} mean_coeff closed={} fock={} cond_var closed={} fock={} ok={ok}",
            stats.marg_var,
            fock.marg_var,
            stats.mean_coeff,
            fock.mean_coeff(),
            stats.cond_var,
            fock.cond_var()
        )
        .unwrap();
    }
    out.push_str("trial,a_s1,a_i1\n");
    for (i, s) in samples.iter().enumerate() {
        writeln!(out, "{i},{},{}", s.a_s1, s.a_i1).unwrap();
    }
    Ok(out.into_bytes())
}

fn run_pairs(
    config: &RunConfig,
    g2: f64,
    gamma_t: f64,
    modes: usize,
    phi_spec: &PhiSpec,
) -> Result<Vec<u8>, CliError> {
    reject_oracle(config)?;
    let p = OpaParams::new(g2, 1.0)?;
    let pair = build_pair_state(&p, gamma_t, modes)?;
    let phi = match phi_spec {
        PhiSpec::Flat { fraction } => {
            if !(*fraction > 0.0 && *fraction <= 1.0) {
                return Err(CliError::Usage {
                    key: "phi-frac".into(),
                    reason: format!("band fraction must be in (0, 1], got {fraction}"),
                });
            }
            let half_width = ((fraction * modes as f64) / 2.0).round() as usize;
            WavepacketState::flat_center_band(modes, half_width)?
        }
        PhiSpec::Gaussian { rms, center } => {
            WavepacketState::gaussian(pair.mode_freqs(), *center, *rms)?
        }
    };
    let (prob, idler) = project_signal(&pair, &phi)?;
    let fidelity = conjugate_fidelity(&idler, &phi);

    let mut out = String::new();
    let phi_desc = match phi_spec {
        PhiSpec::Flat { fraction } => format!("phi-kind=flat phi-frac={fraction}"),
        PhiSpec::Gaussian { rms, center } => {
            format!("phi-kind=gaussian phi-rms={rms} phi-center={center}")
        }
    };
    let params = format!("g2={g2} gamma-t={gamma_t} modes={modes} {phi_desc}");
    out.push_str(&header_comment(config, &params));
    out.push('\n');
    writeln!(
        out,
        "# projection probability={prob} conjugate fidelity={fidelity}"
    )
    .unwrap();
    out.push_str("n,psi_sq,phi_sq,fidelity\n");
    let half = (modes as isize - 1) / 2;
    for (i, (a, b)) in pair.amplitudes().iter().zip(phi.amplitudes()).enumerate() {
        let n = i as isize - half;
        writeln!(out, "{n},{},{},{fidelity}", a.norm_sqr(), b.norm_sqr()).unwrap();
    }
    Ok(out.into_bytes())
}

/// Bin-oracle grid: bin width fine enough to resolve both the kernel scale
/// and the spectral line, span doubled until the coverage estimate accepts
/// it (slow kernel skirts need wide spans).
fn oracle_grid(p: &OpaParams<f64>, kernel: &CountingKernel<f64>) -> Result<(usize, f64), CliError> {
    let (width_cap, mut span, floor) = match kernel {
        CountingKernel::Cavity(c) => (
            (c.gc_over_g / 2.0).min(0.25),
            40f64.max(20.0 * c.gc_over_g),
            2001,
        ),
        CountingKernel::Butterworth(f) => {
            let angle = std::f64::consts::PI / (2.0 * f.k_order as f64);
            (
                (f.wc_over_g * angle.sin() / 2.0).min(0.25),
                (8.0 * f.wc_over_g).max(4.0),
                101,
            )
        }
    };
    loop {
        let mut n_bins = ((span / width_cap).ceil() as usize).max(floor);
        if n_bins.is_multiple_of(2) {
            n_bins += 1;
        }
        match twinbeam::fock::decompose_bins(p, kernel, n_bins, span) {
            Ok(_) => return Ok((n_bins, span)),
            Err(twinbeam::Error::SpanCoverage { .. }) if span < 1e5 => span *= 2.0,
            Err(e) => return Err(CliError::Core(e)),
        }
    }
}

fn run_fig3(
    config: &RunConfig,
    g2: f64,
    dx_list: &[f64],
    grid: &crate::config::GridSpec,
) -> Result<Vec<u8>, CliError> {
    let p = OpaParams::new(g2, 1.0)?;
    let gc_grid = log_grid(grid.min, grid.max, grid.points)?;
    let mut out = String::new();
    let params = format!(
        "g2={g2} dx={} gc-grid={}:{}:{}",
        join_f64(dx_list),
        grid.min,
        grid.max,
        grid.points
    );
    out.push_str(&header_comment(config, &params));
    out.push('\n');
    out.push_str(if config.with_oracle {
        "dx,gc_over_g,sigma2,sigma2_oracle,oracle_ok\n"
    } else {
        "dx,gc_over_g,sigma2\n"
    });
    // grid cells evaluate in parallel inside the sweep; row order stays the
    // deterministic product order
    let rows = fig3_sweep(&p, dx_list, &gc_grid)?;
    for row in rows {
        if config.with_oracle {
            let cfg = CavityConfig::new(row.gc_over_g, row.dx)?;
            let kernel = CountingKernel::Cavity(cfg);
            let (n_bins, span) = oracle_grid(&p, &kernel)?;
            let oracle = bin_sigma2(&p, &kernel, n_bins, span)?;
            let ok = (row.sigma2 - oracle).abs() <= ORACLE_SIGMA2_TOL;
            writeln!(
                out,
                "{},{},{},{oracle},{ok}",
                row.dx, row.gc_over_g, row.sigma2
            )
            .unwrap();
        } else {
            writeln!(out, "{},{},{}", row.dx, row.gc_over_g, row.sigma2).unwrap();
        }
    }
    Ok(out.into_bytes())
}

fn run_filters(
    config: &RunConfig,
    g2: f64,
    orders: &[u32],
    wc_over_g: f64,
    dx: f64,
) -> Result<Vec<u8>, CliError> {
    let p = OpaParams::new(g2, 1.0)?;
    let mut out = String::new();
    let params = format!(
        "g2={g2} k={} wc-over-g={wc_over_g} dx={dx}",
        join_u32(orders)
    );
    out.push_str(&header_comment(config, &params));
    out.push('\n');
    out.push_str(if config.with_oracle {
        "k,wc_over_g,sigma2,law_1_over_2k,sigma2_oracle,oracle_ok\n"
    } else {
        "k,wc_over_g,sigma2,law_1_over_2k\n"
    });
    for &k in orders {
        let cfg = FilterConfig::new(k, wc_over_g, dx)?;
        let sigma2 = filter_moments(&p, &cfg)?.sigma2;
        let law = 1.0 / (2.0 * k as f64);
        if config.with_oracle {
            let kernel = CountingKernel::Butterworth(cfg);
            let (n_bins, span) = oracle_grid(&p, &kernel)?;
            let oracle = bin_sigma2(&p, &kernel, n_bins, span)?;
            let ok = (sigma2 - oracle).abs() <= ORACLE_SIGMA2_TOL;
            writeln!(out, "{k},{wc_over_g},{sigma2},{law},{oracle},{ok}").unwrap();
        } else {
            writeln!(out, "{k},{wc_over_g},{sigma2},{law}").unwrap();
        }
    }
    Ok(out.into_bytes())
}

#[derive(Serialize)]
struct EprSummary {
    command: &'static str,
    version: &'static str,
    dim: usize,
    trials: usize,
    seed: u64,
    /// Fraction of trials whose two outcome indices matched.
    match_fraction: f64,
    /// Per-outcome counts of the (matching) joint results.
    outcome_counts: Vec<usize>,
    /// Total joint probability off the diagonal of the outcome table.
    offdiagonal_probability: f64,
}

fn run_epr_demo(config: &RunConfig, dim: usize, trials: usize) -> Result<Vec<u8>, CliError> {
    reject_oracle(config)?;
    let pair = make_maximally_entangled::<f64>(dim)?;
    let s = ScatteringMatrix::haar_random(dim, config.seed)?;
    let scattered = apply_bilateral_scattering(&pair, &s)?;
    let m = ProjectiveMeasurement::haar_random(dim, config.seed ^ 0x9E37_79B9_7F4A_7C15)?;

    let table = joint_outcome_table(&scattered, &m)?;
    let offdiag: f64 = table
        .iter()
        .enumerate()
        .flat_map(|(z, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(w, &p)| (z != w).then_some(p))
        })
        .sum();

    let outcomes = measure_correlated(&scattered, &m, trials, config.seed)?;
    let matched = outcomes.iter().filter(|&&(a, b)| a == b).count();
    let mut counts = vec![0usize; dim];
    for &(a, b) in &outcomes {
        if a == b {
            counts[a] += 1;
        }
    }
    let summary = EprSummary {
        command: "epr-demo",
        version: VERSION,
        dim,
        trials,
        seed: config.seed,
        match_fraction: if trials == 0 {
            1.0
        } else {
            matched as f64 / trials as f64
        },
        outcome_counts: counts,
        offdiagonal_probability: offdiag,
    };
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("serialize summary");
    bytes.push(b'\n');
    Ok(bytes)
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_u32(values: &[u32]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Run a resolved config to completion: execute and write the output file.
pub fn run_to_file(config: &RunConfig) -> Result<PathBuf, CliError> {
    let emitted = execute(config)?;
    emitted.write()?;
    Ok(emitted.path)
}
