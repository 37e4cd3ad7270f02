use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "isopair", version, about = "Isotopic pairs, Lie superalgebras and coupled-oscillator dynamics")]
pub struct Cli {
    /// Print the JSON report on stdout instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the pair axioms, the triple system and the superalgebra of a pair file.
    Verify(VerifyArgs),
    /// Build the oscillator pair and audit its matrices and bracket table.
    Oscillator(OscillatorArgs),
    /// Integrate the classical equations; writes trajectory.csv.
    Classical(ClassicalArgs),
    /// Integrate the operator equations in a representation; writes relations.csv.
    Quantum(QuantumArgs),
    /// Numerical search for split representations.
    Search(SearchArgs),
    /// Bunches, I(g) and isorepresentations.
    Appendix(AppendixArgs),
    /// Compare printed formulas against recomputed values.
    Errata(ErrataArgs),
    /// Execute a JSON run configuration.
    Run(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Directory for report.json, summary.txt and data files.
    #[arg(long, value_name = "DIR", global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EpsArgs {
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub eps1: String,
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    pub eps2: String,
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    pub eps3: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Pair document: {"n1", "n2", "m1": [[iso, i, j, out, num, den]], "m2": [...]}.
    pub pair: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct OscillatorArgs {
    #[command(flatten)]
    pub eps: EpsArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub eps: EpsArgs,
    /// Initial state P,Q,R,A,B,C.
    #[arg(long, default_value = "1,0,1,0,1,1", allow_hyphen_values = true, value_delimiter = ',')]
    pub state: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value = "rk4")]
    pub method: isopair::ode::Method,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Keep every n-th sample in the CSV (the last sample is always kept).
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Bound on the relative drift of the integrals.
    #[arg(long, default_value_t = 1e-6)]
    pub drift_tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct QuantumArgs {
    /// Representation document: {"dimW", "grading", "t1": [...], "t2": [...]}.
    #[arg(long)]
    pub rep: PathBuf,
    #[command(flatten)]
    pub eps: EpsArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub drift_tol: f64,
    /// Threshold below which the hidden-hamiltonian identity counts as confirmed.
    #[arg(long, default_value_t = 1e-8)]
    pub audit_tol: f64,
    /// Also run dt = 0.02, 0.01, 0.005 and report the observed order.
    #[arg(long)]
    pub refine: bool,
    /// Write the operator matrices to operators.jsonl.
    #[arg(long)]
    pub matrices: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 1)]
    pub d1: usize,
    #[arg(long, default_value_t = 1)]
    pub d2: usize,
    /// Run every (d1, d2) with 1 <= d1, d2 <= N instead of a single shape.
    #[arg(long, value_name = "N")]
    pub sweep: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub min_norm_sq: f64,
    #[arg(long, default_value_t = 0.0)]
    pub min_generator_norm_sq: f64,
    /// Target the pair (Hom(C^n, C^m), Hom(C^m, C^n)), given as n,m.
    #[arg(long, value_delimiter = ',', conflicts_with = "pair")]
    pub hom: Option<Vec<usize>>,
    /// Target a pair document; the oscillator pair is used when neither is given.
    #[arg(long)]
    pub pair: Option<PathBuf>,
    /// Restrict to these basis indices of V1 (with --keep2).
    #[arg(long, value_delimiter = ',', requires = "keep2")]
    pub keep1: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', requires = "keep1")]
    pub keep2: Option<Vec<usize>>,
    #[command(flatten)]
    pub eps: EpsArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct AppendixArgs {
    #[command(subcommand)]
    pub command: AppendixCommand,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Subcommand, Debug)]
pub enum AppendixCommand {
    /// Check a Lie algebra.
    Lie {
        /// `sl2`, `abelian:N` or a Lie algebra document.
        #[arg(long)]
        g: String,
    },
    /// Build I(g) and check it as a pair and as a superalgebra.
    IPair {
        #[arg(long)]
        g: String,
    },
    /// Check a bunch, its completeness and its enlargement.
    Bunch {
        #[arg(long)]
        bunch: PathBuf,
    },
    /// Check an isorepresentation by both routes, plus the split structure.
    Isorep {
        #[arg(long)]
        g: String,
        #[arg(long)]
        isorep: PathBuf,
    },
    /// The standard isorepresentation on ad + ad.
    Standard {
        #[arg(long)]
        g: String,
    },
}

#[derive(Args, Debug)]
pub struct ErrataArgs {
    #[command(flatten)]
    pub eps: EpsArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub config: PathBuf,
}
