mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use commands::{Failure, Outcome};
use config::{apply_env_overrides, config_hash, load, A24Perturbation};

#[derive(Parser)]
#[command(
    name = "fwlab",
    version,
    about = "Foldy-Wouthuysen transformation checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for reports.
    #[arg(long, default_value = "fwlab-reports")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the computed exact FW series with the encoded reference.
    EriksenSeries {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        weight_max: Option<u32>,
        /// Replace the leading A24 coefficient 24 by 23.
        #[arg(long)]
        perturb_a24: bool,
    },
    /// Check the grade-filtered series against the closed-form Hamiltonian.
    RelfwCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Exact transform and ħ-convergence on the lattice Dirac model.
    NumericFw {
        #[command(flatten)]
        common: Common,
        /// Comma-separated ħ values.
        #[arg(long, value_delimiter = ',')]
        hbar: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        export_matrices: bool,
    },
    /// Spin-1 Landau spectrum against the analytic formulas.
    Spin1Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g_factor: Option<f64>,
        #[arg(long)]
        field: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        field_halvings: Option<usize>,
    },
}

fn env_tolerances(
    cfg: &fwlab_numeric::matfun::MatfunConfig,
) -> Result<fwlab_numeric::matfun::MatfunConfig, Failure> {
    apply_env_overrides(cfg, std::env::vars()).map_err(Failure::Config)
}

fn emit<T: Serialize>(name: &str, out: &Path, cfg: &T, outcome: &Outcome) -> anyhow::Result<()> {
    let hash = config_hash(cfg)?;
    let version = env!("CARGO_PKG_VERSION");
    let report = json!({
        "command": name,
        "version": version,
        "config_sha256": hash,
        "config": cfg,
        "pass": outcome.pass,
        "result": outcome.result,
    });
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let json_text = serde_json::to_string_pretty(&report)? + "\n";
    std::fs::write(out.join(format!("{name}.json")), json_text)?;
    let text = format!(
        "fwlab {version} {name}\nconfig sha256 {hash}\n\n{}",
        outcome.table
    );
    std::fs::write(out.join(format!("{name}.txt")), &text)?;
    for (file, body) in &outcome.files {
        std::fs::write(out.join(file), body)?;
    }
    print!("{text}");
    Ok(())
}

fn finish<T: Serialize>(
    name: &str,
    out: &Path,
    cfg: &T,
    run: Result<Outcome, Failure>,
) -> ExitCode {
    match run {
        Ok(outcome) => match emit(name, out, cfg, &outcome) {
            Ok(()) => ExitCode::from(if outcome.pass { 0 } else { 2 }),
            Err(e) => {
                eprintln!("fwlab: writing reports failed: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(f) => {
            eprintln!("fwlab: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::EriksenSeries {
            common,
            weight_max,
            perturb_a24,
        } => {
            let cfg = load::<config::EriksenSeriesConfig>(common.config.as_deref()).map(|mut c| {
                if let Some(w) = weight_max {
                    c.weight_max = w;
                }
                if perturb_a24 {
                    c.perturb_a24 = Some(A24Perturbation {
                        index: 0,
                        inner: "23".into(),
                    });
                }
                c
            });
            match cfg {
                Ok(cfg) => finish(
                    "eriksen_series",
                    &common.out,
                    &cfg,
                    commands::eriksen_series(&cfg),
                ),
                Err(e) => finish::<()>("eriksen_series", &common.out, &(), Err(Failure::Config(e))),
            }
        }
        Command::RelfwCheck { common } => {
            match load::<config::RelFwCheckConfig>(common.config.as_deref()) {
                Ok(cfg) => finish(
                    "relfw_check",
                    &common.out,
                    &cfg,
                    commands::relfw_check(&cfg),
                ),
                Err(e) => finish::<()>("relfw_check", &common.out, &(), Err(Failure::Config(e))),
            }
        }
        Command::NumericFw {
            common,
            hbar,
            seed,
            export_matrices,
        } => {
            let cfg = load::<config::NumericFwConfig>(common.config.as_deref())
                .map_err(Failure::Config)
                .and_then(|mut c| {
                    if let Some(h) = hbar {
                        c.hbar = h;
                    }
                    if let Some(s) = seed {
                        c.seed = s;
                    }
                    c.export_matrices |= export_matrices;
                    c.tolerances = env_tolerances(&c.tolerances)?;
                    Ok(c)
                });
            match cfg {
                Ok(cfg) => finish("numeric_fw", &common.out, &cfg, commands::numeric_fw(&cfg)),
                Err(f) => finish::<()>("numeric_fw", &common.out, &(), Err(f)),
            }
        }
        Command::Spin1Spectrum {
            common,
            g_factor,
            field,
            n_max,
            levels,
            field_halvings,
        } => {
            let cfg = load::<config::Spin1SpectrumConfig>(common.config.as_deref())
                .map_err(Failure::Config)
                .and_then(|mut c| {
                    if let Some(g) = g_factor {
                        c.spec.g_factor = g;
                    }
                    if let Some(b) = field {
                        c.spec.field = b;
                    }
                    if let Some(n) = n_max {
                        c.spec.n_max = n;
                    }
                    if let Some(l) = levels {
                        c.levels = l;
                    }
                    if let Some(k) = field_halvings {
                        c.field_halvings = k;
                    }
                    c.tolerances = env_tolerances(&c.tolerances)?;
                    Ok(c)
                });
            match cfg {
                Ok(cfg) => finish(
                    "spin1_spectrum",
                    &common.out,
                    &cfg,
                    commands::spin1_spectrum(&cfg),
                ),
                Err(f) => finish::<()>("spin1_spectrum", &common.out, &(), Err(f)),
            }
        }
    }
}
