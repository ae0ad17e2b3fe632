//! Command-line parsing.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infoproj_core::synth::SynthSpec;
use infoproj_core::TailPrior;

use crate::config::{
    FitConfig, GenConfig, InputSource, MethodChoice, RhoPolicy, RunConfig, SicConfig,
    SolverOverrides,
};
use crate::csvio::LoadOptions;
use crate::run::{run, Exit};

#[derive(Debug, Parser)]
#[command(
    name = "infoproj",
    version,
    about = "Informative linear projections: PCA and t-PCA"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit projection directions and write a JSON report.
    Fit(FitArgs),
    /// Write a synthetic dataset as CSV.
    Gen(GenArgs),
    /// Evaluate the information content of given directions.
    Sic(SicArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Pca,
    TpcaPower,
    TpcaRelax,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    TwoScale,
    OutlierPair,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV file.
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    pub input: Option<PathBuf>,
    /// Use a generated dataset instead of a file.
    #[arg(long, value_enum)]
    pub synth: Option<VariantArg>,
    /// The first CSV line holds column names.
    #[arg(long)]
    pub has_header: bool,
    /// The last CSV column holds labels.
    #[arg(long)]
    pub label_last: bool,
    /// Use the data as given instead of subtracting column means.
    #[arg(long)]
    pub no_center: bool,
    #[command(flatten)]
    pub shape: SynthShape,
}

/// Size overrides for generated data.
#[derive(Debug, Args)]
pub struct SynthShape {
    #[arg(long)]
    pub n_large: Option<usize>,
    #[arg(long)]
    pub n_small: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Covariance multiplier of the scaled population.
    #[arg(long)]
    pub scale_factor: Option<f64>,
    /// Scale the larger population instead of the smaller one.
    #[arg(long)]
    pub scale_majority: bool,
}

#[derive(Debug, Args)]
pub struct PriorArgs {
    /// Absolute t-prior scale.
    #[arg(long, conflicts_with = "rho_rel")]
    pub rho: Option<f64>,
    /// t-prior scale as a multiple of the data scale.
    #[arg(long)]
    pub rho_rel: Option<f64>,
    /// Gaussian prior scale.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Degrees of freedom of the t prior.
    #[arg(long, conflicts_with = "c")]
    pub nu: Option<f64>,
    /// Expected mean of log(1 + x'x/rho); sets nu through the inverse of kappa.
    #[arg(long)]
    pub c: Option<f64>,
    /// Plot resolution: one value, or one per axis separated by commas.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub delta: Vec<f64>,
}

impl PriorArgs {
    fn rho_policy(&self) -> RhoPolicy {
        match (self.rho, self.rho_rel) {
            (Some(v), _) => RhoPolicy::Absolute(v),
            (None, Some(f)) => RhoPolicy::Relative(f),
            (None, None) => RhoPolicy::default(),
        }
    }

    fn tail(&self) -> TailPrior {
        match (self.nu, self.c) {
            (_, Some(c)) => TailPrior::Expectation(c),
            (Some(nu), None) => TailPrior::Nu(nu),
            (None, None) => TailPrior::Nu(1.0),
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "tpca-power")]
    pub method: MethodArg,
    /// Number of directions.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Power-method step size, or the relaxation's initial step.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Extra random starts for the power method.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Seed for random restarts and generated data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    /// Write projected coordinates as CSV.
    #[arg(long)]
    pub out_proj: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub shape: SynthShape,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SicArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// CSV with one direction per row; rows must be orthonormal.
    #[arg(long)]
    pub weights: PathBuf,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_report: Option<PathBuf>,
}

fn synth_spec(variant: VariantArg, seed: u64, shape: &SynthShape) -> SynthSpec {
    let base = match variant {
        VariantArg::TwoScale => SynthSpec::two_scale(seed),
        VariantArg::OutlierPair => SynthSpec::outlier_pair(seed),
    };
    SynthSpec {
        n_large: shape.n_large.unwrap_or(base.n_large),
        n_small: shape.n_small.unwrap_or(base.n_small),
        d: shape.d.unwrap_or(base.d),
        scale_factor: shape.scale_factor.unwrap_or(base.scale_factor),
        scale_minority: !shape.scale_majority,
        ..base
    }
}

fn input_source(data: &DataArgs, seed: u64) -> InputSource {
    match (&data.input, data.synth) {
        (Some(path), _) => InputSource::Csv {
            path: path.clone(),
            load: LoadOptions {
                has_header: data.has_header,
                label_last: data.label_last,
                center: !data.no_center,
            },
        },
        (None, Some(v)) => InputSource::Synth(synth_spec(v, seed, &data.shape)),
        (None, None) => unreachable!("clap requires --input or --synth"),
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        match cli.command {
            Command::Fit(a) => RunConfig::Fit(FitConfig {
                input: input_source(&a.data, a.seed),
                method: match a.method {
                    MethodArg::Pca => MethodChoice::Pca,
                    MethodArg::TpcaPower => MethodChoice::TpcaPower,
                    MethodArg::TpcaRelax => MethodChoice::TpcaRelax,
                },
                r: a.r,
                rho: a.prior.rho_policy(),
                sigma: a.prior.sigma,
                tail: a.prior.tail(),
                deltas: a.prior.delta.clone(),
                solver: SolverOverrides {
                    alpha: a.alpha,
                    tol: a.tol,
                    max_iter: a.max_iter,
                    restarts: a.restarts,
                },
                seed: a.seed,
                out_report: a.out_report,
                out_proj: a.out_proj,
            }),
            Command::Gen(a) => RunConfig::Gen(GenConfig {
                spec: synth_spec(a.variant, a.seed, &a.shape),
                out: a.out,
            }),
            Command::Sic(a) => RunConfig::Sic(SicConfig {
                input: input_source(&a.data, a.seed),
                weights: a.weights,
                rho: a.prior.rho_policy(),
                sigma: a.prior.sigma,
                tail: a.prior.tail(),
                deltas: a.prior.delta.clone(),
                out_report: a.out_report,
            }),
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code. Errors go to standard error.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                Exit::InputError as i32
            } else {
                0
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&RunConfig::from(cli)) {
        Ok(exit) => {
            if exit == Exit::NotConverged {
                eprintln!("infoproj: the solver did not converge; the report was still written");
            }
            exit as i32
        }
        Err(e) => {
            eprintln!("infoproj: {e}");
            Exit::InputError as i32
        }
    }
}
