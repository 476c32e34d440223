//! Command-line and config-file parsing.
//!
//! Flags override config-file values, which override built-in defaults. The
//! config file is flat `key = value` text using the long flag names; unknown
//! keys are rejected so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TWINBEAM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "twinbeam",
    version,
    about = "Entangled twin-beam statistics: spectra, homodyne samples, pair projection, and photocount-difference sweeps",
    after_help = "All physical inputs are normalized (pump power to threshold, frequencies to the source linewidth). Outputs are CSV tables or JSON summaries with the full configuration echoed in a header comment."
)]
pub struct Cli {
    /// Flat key = value config file supplying defaults for any flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output file path (default: <command>.csv or .json under $TWINBEAM_OUT_DIR or .)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for every stochastic operation
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Append brute-force Fock-oracle cross-check columns where available
    #[arg(long, global = true)]
    pub with_oracle: bool,

    /// Cavity linewidth in Hz, used to label outputs only; all math stays normalized
    #[arg(long, global = true)]
    pub gamma_hz: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct PumpArg {
    /// Pump power normalized to threshold (default 0.01)
    #[arg(long)]
    pub g2: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fluorescence and phase-sensitive spectra on a detuning grid
    Spectra {
        #[command(flatten)]
        pump: PumpArg,
        /// Half-width of the symmetric detuning grid (default 8)
        #[arg(long)]
        x_max: Option<f64>,
        /// Number of grid points (default 401)
        #[arg(long)]
        points: Option<usize>,
    },
    /// Joint homodyne quadrature samples of a two-mode squeezed vacuum
    Quadrature {
        /// Mean photons per mode (default 1)
        #[arg(long)]
        nbar: Option<f64>,
        /// Number of samples (default 10000)
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Photon-pair conjugate-state projection table
    Pairs {
        #[command(flatten)]
        pump: PumpArg,
        /// Counting window in units of the cavity lifetime, ΓT (default 200)
        #[arg(long)]
        gamma_t: Option<f64>,
        /// Odd number of Fourier modes (default 201)
        #[arg(long)]
        modes: Option<usize>,
        /// Wavepacket shape: flat or gaussian (default flat)
        #[arg(long)]
        phi_kind: Option<String>,
        /// Flat wavepacket: fraction of the mode band it covers (default 0.1)
        #[arg(long)]
        phi_frac: Option<f64>,
        /// Gaussian wavepacket: rms width in normalized detuning (default 0.05)
        #[arg(long)]
        phi_rms: Option<f64>,
        /// Gaussian wavepacket: center detuning (default 0)
        #[arg(long)]
        phi_center: Option<f64>,
    },
    /// Cavity-loading variance sweep over Γc/Γ and detunings
    Fig3 {
        #[command(flatten)]
        pump: PumpArg,
        /// Comma-separated normalized detunings (default 0,1,2)
        #[arg(long)]
        dx: Option<String>,
        /// Cavity-linewidth grid as min:max:points (default 1e-3:1e1:25)
        #[arg(long)]
        gc_grid: Option<String>,
    },
    /// Butterworth filter-penetration variances vs the 1/(2K) law
    Filters {
        #[command(flatten)]
        pump: PumpArg,
        /// Comma-separated Butterworth orders (default 1,2,4,8)
        #[arg(long)]
        k: Option<String>,
        /// Filter bandwidth over source linewidth (default 1e-3)
        #[arg(long)]
        wc_over_g: Option<f64>,
        /// Normalized detuning of the filter pair (default 0)
        #[arg(long)]
        dx: Option<f64>,
    },
    /// Finite-dimensional scattered-pair measurement demonstration
    EprDemo {
        /// Pair dimension (default 4)
        #[arg(long)]
        dim: Option<usize>,
        /// Measurement trials (default 10000)
        #[arg(long)]
        trials: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectra { .. } => "spectra",
            Command::Quadrature { .. } => "quadrature",
            Command::Pairs { .. } => "pairs",
            Command::Fig3 { .. } => "fig3",
            Command::Filters { .. } => "filters",
            Command::EprDemo { .. } => "epr-demo",
        }
    }

    /// Config-file keys this command accepts, beyond the global ones.
    fn recognized_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Spectra { .. } => &["g2", "x-max", "points"],
            Command::Quadrature { .. } => &["nbar", "trials"],
            Command::Pairs { .. } => &[
                "g2",
                "gamma-t",
                "modes",
                "phi-kind",
                "phi-frac",
                "phi-rms",
                "phi-center",
            ],
            Command::Fig3 { .. } => &["g2", "dx", "gc-grid"],
            Command::Filters { .. } => &["g2", "k", "wc-over-g", "dx"],
            Command::EprDemo { .. } => &["dim", "trials"],
        }
    }
}

const GLOBAL_KEYS: [&str; 4] = ["seed", "out", "with-oracle", "gamma-hz"];

/// Wavepacket selection for the pairs command.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    /// Equal amplitude over the central `fraction` of the mode band.
    Flat { fraction: f64 },
    /// Gaussian of rms width `rms` centered at detuning `center`.
    Gaussian { rms: f64, center: f64 },
}

/// Log grid specification min:max:points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Fully resolved run: defaults, config file, and flags merged.
#[derive(Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub output_path: PathBuf,
    pub with_oracle: bool,
    pub gamma_hz: Option<f64>,
    pub command: ResolvedCommand,
}

#[derive(Debug, PartialEq)]
pub enum ResolvedCommand {
    Spectra {
        g2: f64,
        x_max: f64,
        points: usize,
    },
    Quadrature {
        nbar: f64,
        trials: usize,
    },
    Pairs {
        g2: f64,
        gamma_t: f64,
        modes: usize,
        phi: PhiSpec,
    },
    Fig3 {
        g2: f64,
        dx: Vec<f64>,
        gc_grid: GridSpec,
    },
    Filters {
        g2: f64,
        k: Vec<u32>,
        wc_over_g: f64,
        dx: f64,
    },
    EprDemo {
        dim: usize,
        trials: usize,
    },
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse().map_err(|_| CliError::Usage {
        key: key.to_string(),
        reason: format!("cannot parse value {raw:?}"),
    })
}

fn parse_list_f64(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value::<f64>(key, s))
        .collect()
}

fn parse_list_u32(key: &str, raw: &str) -> Result<Vec<u32>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value::<u32>(key, s))
        .collect()
}

fn parse_grid(key: &str, raw: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage {
            key: key.to_string(),
            reason: format!("expected min:max:points, got {raw:?}"),
        });
    }
    Ok(GridSpec {
        min: parse_value(key, parts[0])?,
        max: parse_value(key, parts[1])?,
        points: parse_value(key, parts[2])?,
    })
}

/// Parse a flat `key = value` config file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut map = BTreeMap::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage {
                key: format!("{}:{}", path.display(), lineno + 1),
                reason: format!("expected key = value, got {raw_line:?}"),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Merger {
    file: BTreeMap<String, String>,
}

impl Merger {
    fn take<T: std::str::FromStr>(
        &mut self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            self.file.remove(key);
            return Ok(v);
        }
        match self.file.remove(key) {
            Some(raw) => parse_value(key, &raw),
            None => Ok(default),
        }
    }

    fn take_raw(&mut self, flag: Option<String>, key: &str, default: &str) -> String {
        if let Some(v) = flag {
            self.file.remove(key);
            return v;
        }
        self.file.remove(key).unwrap_or_else(|| default.to_string())
    }

    /// Everything recognized must have been consumed by now.
    fn finish(self, recognized: &[&str]) -> Result<(), CliError> {
        if let Some((key, _)) = self.file.into_iter().next() {
            return Err(CliError::Usage {
                key: key.clone(),
                reason: format!(
                    "unknown config key (recognized here: {})",
                    recognized.join(", ")
                ),
            });
        }
        Ok(())
    }
}

/// Merge flags, config file, and defaults into a [`RunConfig`].
pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut recognized: Vec<&str> = GLOBAL_KEYS.to_vec();
    recognized.extend(cli.command.recognized_keys());
    if let Some(bad) = file.keys().find(|k| !recognized.contains(&k.as_str())) {
        return Err(CliError::Usage {
            key: bad.clone(),
            reason: format!(
                "unknown config key for `{}` (recognized: {})",
                cli.command.name(),
                recognized.join(", ")
            ),
        });
    }
    let mut m = Merger { file };

    let seed = m.take(cli.seed, "seed", 0u64)?;
    let with_oracle = if cli.with_oracle {
        m.file.remove("with-oracle");
        true
    } else {
        match m.file.remove("with-oracle") {
            Some(raw) => parse_value("with-oracle", &raw)?,
            None => false,
        }
    };
    let gamma_hz = match cli.gamma_hz {
        Some(v) => {
            m.file.remove("gamma-hz");
            Some(v)
        }
        None => match m.file.remove("gamma-hz") {
            Some(raw) => Some(parse_value("gamma-hz", &raw)?),
            None => None,
        },
    };
    let out_override: Option<PathBuf> = match cli.out {
        Some(p) => {
            m.file.remove("out");
            Some(p)
        }
        None => m.file.remove("out").map(PathBuf::from),
    };

    let name = cli.command.name();
    let command = match cli.command {
        Command::Spectra {
            pump,
            x_max,
            points,
        } => ResolvedCommand::Spectra {
            g2: m.take(pump.g2, "g2", 0.01)?,
            x_max: m.take(x_max, "x-max", 8.0)?,
            points: m.take(points, "points", 401)?,
        },
        Command::Quadrature { nbar, trials } => ResolvedCommand::Quadrature {
            nbar: m.take(nbar, "nbar", 1.0)?,
            trials: m.take(trials, "trials", 10_000)?,
        },
        Command::Pairs {
            pump,
            gamma_t,
            modes,
            phi_kind,
            phi_frac,
            phi_rms,
            phi_center,
        } => {
            let kind = m.take_raw(phi_kind, "phi-kind", "flat");
            let phi = match kind.as_str() {
                "flat" => PhiSpec::Flat {
                    fraction: m.take(phi_frac, "phi-frac", 0.1)?,
                },
                "gaussian" => PhiSpec::Gaussian {
                    rms: m.take(phi_rms, "phi-rms", 0.05)?,
                    center: m.take(phi_center, "phi-center", 0.0)?,
                },
                other => {
                    return Err(CliError::Usage {
                        key: "phi-kind".into(),
                        reason: format!("expected flat or gaussian, got {other:?}"),
                    })
                }
            };
            // unused shape keys for the selected kind are still recognized
            m.file.remove("phi-frac");
            m.file.remove("phi-rms");
            m.file.remove("phi-center");
            ResolvedCommand::Pairs {
                g2: m.take(pump.g2, "g2", 0.01)?,
                gamma_t: m.take(gamma_t, "gamma-t", 200.0)?,
                modes: m.take(modes, "modes", 201)?,
                phi,
            }
        }
        Command::Fig3 { pump, dx, gc_grid } => {
            let dx_raw = m.take_raw(dx, "dx", "0,1,2");
            let grid_raw = m.take_raw(gc_grid, "gc-grid", "1e-3:1e1:25");
            ResolvedCommand::Fig3 {
                g2: m.take(pump.g2, "g2", 0.01)?,
                dx: parse_list_f64("dx", &dx_raw)?,
                gc_grid: parse_grid("gc-grid", &grid_raw)?,
            }
        }
        Command::Filters {
            pump,
            k,
            wc_over_g,
            dx,
        } => {
            let k_raw = m.take_raw(k, "k", "1,2,4,8");
            ResolvedCommand::Filters {
                g2: m.take(pump.g2, "g2", 0.01)?,
                k: parse_list_u32("k", &k_raw)?,
                wc_over_g: m.take(wc_over_g, "wc-over-g", 1e-3)?,
                dx: m.take(dx, "dx", 0.0)?,
            }
        }
        Command::EprDemo { dim, trials } => ResolvedCommand::EprDemo {
            dim: m.take(dim, "dim", 4)?,
            trials: m.take(trials, "trials", 10_000)?,
        },
    };
    m.finish(&recognized)?;

    let output_path = out_override.unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        let ext = if matches!(command, ResolvedCommand::EprDemo { .. }) {
            "json"
        } else {
            "csv"
        };
        dir.join(format!("{name}.{ext}"))
    });

    Ok(RunConfig {
        seed,
        output_path,
        with_oracle,
        gamma_hz,
        command,
    })
}
