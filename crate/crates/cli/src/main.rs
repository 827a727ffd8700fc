//! `nlrabi`: spectra, sweeps, phase-space reports and figure data for
//! nonlinear-resonator Rabi models.
//!
//! Exit status: 0 on success, 1 for bad flags or I/O problems, 2 when a
//! spectrum is not converged under cutoff doubling or a validation check fails.

mod commands;
mod config;
mod failure;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlrabi::spectra::Control;
use nlrabi::Nonlinearity;

use crate::config::{Format, ModelKind, OUT_DIR_ENV};

#[derive(Parser, Debug)]
#[command(name = "nlrabi", version, about = "Nonlinear-resonator quantum Rabi models")]
pub struct Cli {
    /// Settings file (`key = value` lines, or a JSON sidecar from an earlier run). Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lowest levels of one model, checked by cutoff doubling.
    Spectrum(SpectrumArgs),
    /// Levels versus eta or J.
    Sweep(SweepArgs),
    /// Wigner function of a resonator eigenstate.
    Wigner(WignerArgs),
    /// Quadrature variances and normalized squeezing of resonator eigenstates.
    Squeezing(SqueezingArgs),
    /// Hopfield polaritons and the effective nonlinear polariton model.
    Polariton(PolaritonArgs),
    /// Run the self-check suite and write a JSON report.
    Validate(ValidateArgs),
    /// Regenerate figure data.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// kerr, cavity, corrected-dipole, naive-dipole, coulomb, naive-coulomb, rabi-dipole, rabi-coulomb.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// kerr, plus or minus.
    #[arg(long)]
    pub variant: Option<Nonlinearity>,
    /// Nonlinear coefficient.
    #[arg(long = "J", visible_alias = "j")]
    pub j: Option<f64>,
    /// Normalized coupling.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "omega-c")]
    pub omega_c: Option<f64>,
    #[arg(long = "omega-q")]
    pub omega_q: Option<f64>,
    /// Rescale omega_c so the bare resonator's first gap equals it.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub renormalize: Option<bool>,
}

#[derive(Args, Debug, Default)]
pub struct NumericArgs {
    /// Number of levels.
    #[arg(long)]
    pub k: Option<usize>,
    /// Photon cutoff; chosen from eta and J when omitted.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Largest level drift accepted under cutoff doubling.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct OutputArgs {
    /// csv or json.
    #[arg(long)]
    pub format: Option<Format>,
    /// Base name of the output files.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// eta or J.
    #[arg(long)]
    pub control: Option<Control>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ResonatorArgs {
    /// kerr, plus or minus.
    #[arg(long)]
    pub variant: Option<Nonlinearity>,
    #[arg(long = "J", visible_alias = "j")]
    pub j: Option<f64>,
    #[arg(long = "omega-c")]
    pub omega_c: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Eigenstate index.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long = "x-min", allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max", allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long = "p-min", allow_hyphen_values = true)]
    pub p_min: Option<f64>,
    #[arg(long = "p-max", allow_hyphen_values = true)]
    pub p_max: Option<f64>,
    /// Points per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SqueezingArgs {
    #[command(flatten)]
    pub resonator: ResonatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Number of eigenstates.
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PolaritonArgs {
    #[arg(long = "omega-photon")]
    pub omega_photon: Option<f64>,
    #[arg(long = "omega-matter")]
    pub omega_matter: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Quartic coefficient of the matter mode.
    #[arg(long = "j-b")]
    pub j_b: Option<f64>,
    /// Per-mode cutoff of the two-mode oracle; 0 skips the oracle comparison.
    #[arg(long = "oracle-cutoff")]
    pub oracle_cutoff: Option<usize>,
    /// Cutoff of the effective single-mode model.
    #[arg(long = "effective-cutoff")]
    pub effective_cutoff: Option<usize>,
    /// Photon-like transitions compared with the oracle.
    #[arg(long)]
    pub rungs: Option<usize>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// fig1, fig2 (wigner-panel), fig3 (spectra-naive-vs-corrected), fig4 (spectra-gauge-consistent).
    pub figure: String,
    /// Single J instead of the default pair 0.05 and 0.1.
    #[arg(long = "J", visible_alias = "j")]
    pub j: Option<f64>,
    /// Grid points (eta for spectra, J for fig1).
    #[arg(long)]
    pub points: Option<usize>,
    /// Upper end of the eta grid.
    #[arg(long = "eta-max")]
    pub eta_max: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub renormalize: Option<bool>,
    /// Wigner grid points per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(failure::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
