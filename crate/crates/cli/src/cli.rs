use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const PHASE_HELP: &str = "Phase literals: compact strings such as \"z^3 - 3z\", \"(2+1i)z^2 + i z\", \
\"z1^2 z2 - z2\" (variables z or z1, z2, ...; coefficients real, imaginary with a trailing i, or \
a parenthesized sum), or JSON {\"coeffs\": [[re, im], ...]} / {\"nvars\": n, \"terms\": [...]}. \
Lists are comma separated; `lo:hi:n` expands to n log-spaced values.";

#[derive(Parser, Debug)]
#[command(name = "covdc", version, about = "Oscillatory integrals and sublevel sets of complex polynomials", after_help = PHASE_HELP)]
pub struct Cli {
    /// Output directory for CSV, JSON and the manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base seed; COVDC_SEED takes precedence.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Work budget in integrand evaluations or samples.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker count recorded in the manifest.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Oscillatory integrals and decay fits.
    #[command(subcommand)]
    Oscint(OscintCmd),
    /// H and J functionals at a point or their infimum over a disc.
    #[command(subcommand)]
    Hfunc(HfuncCmd),
    /// Certified Newton iteration and the derivative-zero locator.
    #[command(subcommand)]
    Hensel(HenselCmd),
    /// Sublevel-set measures, covers and the slicing estimate.
    #[command(subcommand)]
    Sublevel(SublevelCmd),
    /// Root-cluster bounds for oscillatory integrals.
    #[command(subcommand)]
    Psbound(PsboundCmd),
    /// Coefficient-space sublevel scans for moment and sparse phases.
    #[command(subcommand)]
    Tarry(TarryCmd),
    /// Sublevel measures of the exponential and sine counterexamples.
    Counterexample(CounterexampleArgs),
    /// Log-log SVG plots and a summary table from CSV outputs.
    Report(ReportArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BumpArgs {
    /// Plateau radius of the cutoff (0 for a mollifier).
    #[arg(long, default_value_t = 0.5)]
    pub inner: f64,
    /// Support radius of the cutoff.
    #[arg(long, default_value_t = 1.0)]
    pub outer: f64,
    /// Center, one complex number per variable.
    #[arg(long)]
    pub center: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Auto,
    Tensor,
    Gauss,
    Localized,
}

#[derive(Args, Debug, Serialize)]
pub struct QuadArgs {
    #[arg(long, value_enum, default_value_t = RuleArg::Auto)]
    pub rule: RuleArg,
    /// Initial points per real dimension.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum OscintCmd {
    /// `∫ e(λ P) φ` for each λ.
    Integrate {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[command(flatten)]
        bump: BumpArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Least-squares slope of `log |I(λP)|` against `log λ`.
    Decay {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value = "10:1e4:8")]
        lambda: String,
        #[command(flatten)]
        bump: BumpArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// `|I(P)| H²` for each dilation `λ P`.
    Thm {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[command(flatten)]
        bump: BumpArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Greedy disc covering by `D(z, ε/J(z))`.
    Cover {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value = "0.05")]
        eps: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[command(flatten)]
        bump: BumpArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalArg {
    H,
    J,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum HfuncCmd {
    /// Value at points; `--at` takes `;`-separated points of comma-separated coordinates.
    Point {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        at: String,
        #[arg(long, value_enum, default_value_t = FunctionalArg::H)]
        which: FunctionalArg,
    },
    /// Infimum over the ball of radius `--radius` around `--center`.
    Inf {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        center: Option<String>,
        #[arg(long, value_enum, default_value_t = FunctionalArg::H)]
        which: FunctionalArg,
        #[arg(long, default_value_t = 48)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        refine: usize,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub theta_delta: Option<f64>,
    #[arg(long)]
    pub theta_1: Option<f64>,
    #[arg(long)]
    pub theta_bulk: Option<f64>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum HenselCmd {
    /// Newton iteration from `--z0`, with the claim trace when conditions hold.
    Iterate {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        z0: String,
        /// Derivative order for the conditions; 0 iterates without them.
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Bound for `|φ|` on the disc of radius 7/4; defaults to the coefficient sum.
        #[arg(long)]
        sup: Option<f64>,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Smallness conditions at `--z0` for each order in `--order`.
    Conditions {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        z0: String,
        #[arg(long, default_value = "1")]
        order: String,
        #[arg(long)]
        sup: Option<f64>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Locate a zero of a low derivative near a point of `{|P| <= ε}`.
    Locate {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        z0: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1e-2)]
        kappa: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Grid,
    Mc,
    Quadtree,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum SublevelCmd {
    /// `|{z in D_R : |P(z) - a| <= ε}|` for each ε.
    Measure {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "0")]
        a: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Quadtree)]
        method: MethodArg,
        /// Grid resolution, MC samples or quadtree base cells.
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// Check that sublevel points with `|P^(k)| >= μ` sit near derived zeros.
    Cover {
        #[arg(long)]
        phase: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 100.0)]
        c_d: f64,
    },
    /// Inner and outer root-cluster discs around the sublevel set.
    Kw {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// `min(R, 1/H)²` against the largest unit sublevel measure.
    Equivalence {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 48)]
        grid: usize,
        #[arg(long, default_value_t = 8)]
        a_samples: usize,
    },
    /// Sliced against direct Monte Carlo for a bivariate phase.
    Slice {
        #[arg(long)]
        phase: String,
        /// Multi-index of the derivative bounded below, e.g. `1,1`.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 20000)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum PsboundCmd {
    /// Per-root cluster bounds and their maximum.
    Bound {
        #[arg(long)]
        phase: String,
    },
    /// Cluster quantity against `H_f` over the disc of radius 2.
    VsH {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// `|I(λf)|` against the bound for each λ.
    VsIntegral {
        #[arg(long)]
        phase: String,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[command(flatten)]
        bump: BumpArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum TarryCmd {
    /// `|{w : H(w) <= Q}|` for the moment curve of degree `d`.
    Scan {
        #[arg(long)]
        d: usize,
        #[arg(long = "Q", default_value = "4,8,16,32")]
        q: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Dyadic terms `2^{-2rq} |{2^r < H <= 2^{r+1}}|`.
    Dyadic {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 6)]
        r_max: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Check that the lattice boxes cover the sublevel set.
    Boxes {
        #[arg(long)]
        d: usize,
        #[arg(long = "Q")]
        q: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    /// Localized piece against the rest at a single lattice cell, `d = 2`.
    Necessity {
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, default_value_t = 3.0)]
        a: f64,
        #[arg(long, default_value_t = 0.05)]
        c1: f64,
        #[arg(long, default_value_t = 4.0)]
        base: f64,
    },
    /// Scan or dyadic terms for a sparse exponent set.
    Sparse {
        #[arg(long)]
        exponents: String,
        #[arg(long = "Q", default_value = "4,8,16,32")]
        q: String,
        /// Run the dyadic series at this exponent instead of the scan.
        #[arg(long)]
        dyadic_q: Option<f64>,
        #[arg(long, default_value_t = 6)]
        r_max: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    /// `(e^{N(z+1)} - 1)/N`.
    Exp,
    /// Its square.
    ExpSquare,
    /// `2 sin(N z)/N`.
    Sine,
}

#[derive(Args, Debug, Serialize)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Exp)]
    pub family: FamilyArg,
    #[arg(long = "N", default_value = "20,50")]
    pub n: String,
    #[arg(long, default_value = "1e-3,1e-4")]
    pub eps: String,
    #[arg(long, default_value_t = 256)]
    pub base: usize,
    /// Finest quadtree cell in units of ε.
    #[arg(long, default_value_t = 0.02)]
    pub min_cell: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Directories or CSV files to aggregate.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Column for the horizontal axis (default: first numeric column).
    #[arg(long)]
    pub x: Option<String>,
    /// Columns to plot (default: all other numeric columns).
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
