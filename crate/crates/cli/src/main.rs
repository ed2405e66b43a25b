//! Batch verifier for finite Fell-bundle constructions. Every run prints one JSON report on
//! stdout. Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 malformed input.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use fellbundle::{Tolerance, Tolerance64};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fellbundle", version, about = "Verify Fell bundles, bundle maps, actions and correspondences")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Relative PSD tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_psd: f64,
    /// Relative rank tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// Relative equality tolerance for identity residuals.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_eq: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random samples for sampled checks and randomized identity checks.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Embed certificate matrices in the report.
    #[arg(long, global = true)]
    pub full: bool,
}

impl Opts {
    pub fn tol(&self) -> Tolerance64 {
        Tolerance::new(self.tol_psd, self.tol_rank, self.tol_eq)
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the axioms of whatever the input document describes.
    Validate { input: PathBuf },
    /// Expand presets into the explicit document and write it out.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Positive definiteness of a bundle map: exact certificate, Choi matrix, random tuples.
    PdCheck { input: PathBuf },
    /// Gelfand-Raikov construction; writes bundle, action and vector, then re-derives the map.
    Gns {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Crossed-product correspondence of an action, with cyclicity of an optional vector.
    Correspond { input: PathBuf },
    /// Imprimitivity checks for an equivalence bundle.
    Morita { input: PathBuf },
    /// Structural summary plus validation.
    Report { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = cli.opts;
    if !opts.tol().is_valid() {
        let rep = output::Report::new("invalid", "", &opts);
        return rep.malformed("tolerances must be positive").emit();
    }
    let rep = match &cli.cmd {
        Cmd::Validate { input } => commands::validate(input, &opts),
        Cmd::Build { input, out } => commands::build(input, out, &opts),
        Cmd::PdCheck { input } => commands::pd_check(input, &opts),
        Cmd::Gns { input, out } => commands::gns(input, out, &opts),
        Cmd::Correspond { input } => commands::correspond(input, &opts),
        Cmd::Morita { input } => commands::morita(input, &opts),
        Cmd::Report { input } => commands::report(input, &opts),
    };
    rep.emit()
}
