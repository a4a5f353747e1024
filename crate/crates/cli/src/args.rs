use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use yukawa_ewald::fourier::FreeMultiplier;
use yukawa_ewald::{Kernel, Setting};

#[derive(Debug, Parser)]
#[command(
    name = "yukawa-ewald",
    version,
    about = "Spectral Ewald summation for 2D Yukawa sums"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the sum at a set of targets.
    Eval(EvalArgs),
    /// Measured truncation errors against their estimates (periodic).
    Sweep(SweepArgs),
    /// Wall time per pipeline stage for growing N at constant neighbour count.
    Bench(BenchArgs),
    /// Plain against mollified free-space multiplier over alpha L / 2 pi.
    AlphaStudy(AlphaArgs),
    /// Print the parameters the tuner picks.
    Tune(TuneArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    G,
    H,
}

impl From<KernelArg> for Kernel {
    fn from(k: KernelArg) -> Kernel {
        match k {
            KernelArg::G => Kernel::G,
            KernelArg::H => Kernel::H,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SettingArg {
    Per,
    Free,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Setting {
        match s {
            SettingArg::Per => Setting::Periodic,
            SettingArg::Free => Setting::Free,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MultiplierArg {
    Mollified,
    Plain,
}

impl From<MultiplierArg> for FreeMultiplier {
    fn from(m: MultiplierArg) -> FreeMultiplier {
        match m {
            MultiplierArg::Mollified => FreeMultiplier::Mollified,
            MultiplierArg::Plain => FreeMultiplier::Plain,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    Real,
    K,
    Both,
}

/// Flags shared by every command.
#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = KernelArg::G)]
    pub kernel: KernelArg,
    /// Defaults to `per`, except for alpha-study which runs in free space.
    #[arg(long, value_enum)]
    pub setting: Option<SettingArg>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Box side L.
    #[arg(long = "box", default_value_t = std::f64::consts::TAU)]
    pub box_length: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Seed of the synthetic point generator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Window support p in grid points.
    #[arg(long, default_value_t = 24)]
    pub window_p: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append stage timings to the output (otherwise they go to stderr).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of synthetic sources.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Source CSV (x,y,f or x,y,f1,f2) instead of synthetic sources.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// random (the sources), grid:MxN or file:PATH.
    #[arg(long, default_value = "random")]
    pub targets: String,
    #[arg(long)]
    pub rc: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// FFT grid size M, overriding the one implied by k_inf.
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Use the on-grid k-space path (square grid targets only).
    #[arg(long)]
    pub ongrid: bool,
    #[arg(long, value_enum, default_value_t = MultiplierArg::Mollified)]
    pub multiplier: MultiplierArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "3,5,10,15")]
    pub xis: Vec<f64>,
    #[arg(long, value_enum, default_value_t = PartArg::Both)]
    pub part: PartArg,
    /// Points per sweep when cutoffs or wavenumbers are not listed.
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    /// Cutoff step in units of 1/xi.
    #[arg(long, default_value_t = 0.25)]
    pub rc_step: f64,
    /// Wavenumber step in units of xi.
    #[arg(long, default_value_t = 0.5)]
    pub k_step: f64,
    /// Explicit cutoffs, used for every xi.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<f64>>,
    /// Explicit k_inf values, used for every xi.
    #[arg(long, value_delimiter = ',')]
    pub wavenumbers: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "1000,4000,16000,64000")]
    pub sizes: Vec<usize>,
    /// Mean number of neighbours within the cutoff.
    #[arg(long, default_value_t = 30.0)]
    pub neighbors: f64,
    /// Runs per size; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Values of alpha L / 2 pi; 21 log-spaced values in [0.05, 5] by default.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Fixed xi. Defaults to 10 unless --rc is given.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Cutoff from which xi is tuned when --xi is absent.
    #[arg(long)]
    pub rc: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long)]
    pub sources: Option<PathBuf>,
    #[arg(long)]
    pub rc: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
}
