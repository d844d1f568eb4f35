//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "soliton",
    version,
    about = "Translating solitons among ruled surfaces of Minkowski 3-space"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Tolerance for PASS/FAIL decisions (per-command default when omitted).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol: Option<f64>,
    /// Sampling grid as WxH, e.g. 30x30.
    #[arg(long, global = true, value_name = "WxH")]
    pub grid: Option<String>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Plain-text `key = value` file; flags take precedence over it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Obj,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog families and their parameters.
    List {
        /// Show one family only.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Sample a family on a grid and write a CSV or OBJ mesh.
    Sample {
        /// Family id or spec file.
        target: String,
        #[command(flatten)]
        params: FamilyArgs,
    },
    /// Report the soliton residual of a family or spec file.
    Residual {
        target: String,
        #[command(flatten)]
        params: FamilyArgs,
        /// Velocity `x,y,z` (defaults to the family's own).
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Extra uniformly random interior points (uses --seed).
        #[arg(long, default_value_t = 0)]
        random_points: usize,
    },
    /// Integrate a profile ODE and optionally check its lifted cylinder.
    SolveOde {
        /// eq31-spacelike, eq31-timelike, eq32, gr0-spacelike or gr0-timelike.
        ode: String,
        #[arg(long, allow_hyphen_values = true)]
        v1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        v2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        v3: Option<f64>,
        /// Initial data `u0,u0'`.
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
        /// Integration interval `s0,s1` (s1 < s0 integrates backwards).
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Local error tolerance per unit length.
        #[arg(long)]
        ode_tol: Option<f64>,
        /// Run the soliton residual on the lifted cylinder.
        #[arg(long)]
        lift: bool,
    },
    /// Classify the ruled surface in a spec file.
    Classify {
        spec: PathBuf,
        /// Velocity to verify instead of fitting.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Write the residual coefficient table as CSV.
        #[arg(long, value_name = "PATH")]
        coefficients: Option<PathBuf>,
    },
    /// Least-squares velocity of a family or spec file.
    FitVelocity {
        target: String,
        #[command(flatten)]
        params: FamilyArgs,
        /// Restrict to `<c, v> = 0`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        constrain: Vec<String>,
    },
}

/// Family parameters and domain overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct FamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<f64>,
    #[arg(long)]
    pub base: Option<f64>,
    #[arg(long)]
    pub case: Option<f64>,
    /// Profile expression in `s` for GenericCylinder.
    #[arg(long, allow_hyphen_values = true)]
    pub profile: Option<String>,
    /// `s0,s1` window.
    #[arg(long, allow_hyphen_values = true)]
    pub s_range: Option<String>,
    /// `t0,t1` window.
    #[arg(long, allow_hyphen_values = true)]
    pub t_range: Option<String>,
}

impl FamilyArgs {
    pub fn named(&self) -> [(&'static str, Option<f64>); 10] {
        [
            ("a", self.a),
            ("b", self.b),
            ("v1", self.v1),
            ("v2", self.v2),
            ("v3", self.v3),
            ("k", self.k),
            ("eps", self.eps),
            ("sign", self.sign),
            ("base", self.base),
            ("case", self.case),
        ]
    }
}
