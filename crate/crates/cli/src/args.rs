//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitset_core::scalar::{parse_rational, GaussianRational, Rational};

#[derive(Debug, Parser)]
#[command(
    name = "hitset",
    version,
    about = "Exact-arithmetic workbench for robust hitting sets of algebraic circuits",
    args_override_self = true,
    arg_required_else_help = true,
    propagate_version = true
)]
pub struct Cli {
    /// TOML file mirroring the command-line flags; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, default_value_t = 1, value_parser = positive)]
    pub jobs: usize,
    /// Directory receiving the JSON artifact of the run.
    #[arg(long, global = true, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived parameter bundle for (n, s, r).
    Params(ParamsArgs),
    /// Circuit evaluation, expansion and checks.
    Circuit {
        #[command(subcommand)]
        cmd: CircuitCmd,
    },
    /// Norm identities and inequalities of a polynomial.
    Norm(NormArgs),
    /// Universal circuits and embeddings into them.
    Universal {
        #[command(subcommand)]
        cmd: UniversalCmd,
    },
    /// Grid enumeration and seeded sampling.
    Grid {
        #[command(subcommand)]
        cmd: GridCmd,
    },
    /// Empirical anti-concentration tests over a grid.
    Anticonc {
        #[command(subcommand)]
        cmd: AnticoncCmd,
    },
    /// Robust hitting-set verification and construction.
    Robust {
        #[command(subcommand)]
        cmd: RobustCmd,
    },
    /// Existential-theory-of-the-reals encodings and the solver backend.
    Etr {
        #[command(subcommand)]
        cmd: EtrCmd,
    },
    /// Solver-driven hitting-set search.
    Search {
        #[command(subcommand)]
        cmd: SearchCmd,
    },
    /// Nonzero polynomial vanishing on a hitting set.
    Hardpoly(HardpolyArgs),
}

#[derive(Debug, Args)]
pub struct Shape {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub r: u32,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Parameter replacement `key=value` (c_cw, c_size, c_var, eta, delta, eps_alg, m).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub pairs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Solver executable; defaults to $HITSET_SOLVER, then `z3`.
    #[arg(long, value_name = "PATH")]
    pub solver: Option<PathBuf>,
    /// Per-query time limit in seconds.
    #[arg(long, default_value_t = 30, value_name = "SEC")]
    pub timeout: u64,
}

#[derive(Debug, Args)]
pub struct CsvArg {
    /// Also write the report rows as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub shape: Shape,
    /// Anti-concentration constant.
    #[arg(long, value_parser = rational)]
    pub ccw: Option<Rational>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum CircuitCmd {
    /// Evaluate every output at a point.
    Eval {
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Comma-separated coordinates, each `p/q` or `a+b i`.
        #[arg(long, value_parser = complex_point, allow_hyphen_values = true)]
        point: ComplexPoint,
    },
    /// Expand one output into its dense polynomial.
    Expand {
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Cap on intermediate monomials.
        #[arg(long, default_value_t = hitset_core::poly::DEFAULT_EXPAND_BUDGET)]
        budget: u64,
    },
    /// Size, degrees and homogeneity.
    Check {
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    /// Grid spacing of the sup-norm lower bound, a unit fraction.
    #[arg(long, value_parser = rational)]
    pub delta: Rational,
    /// Real point of the unit ball for the gradient inequality (repeatable).
    #[arg(long = "markov-point", value_parser = real_point, allow_hyphen_values = true)]
    pub markov_points: Vec<RealPoint>,
    /// Complex point of the unit polydisc for the pointwise bound (repeatable).
    #[arg(long = "pointwise-point", value_parser = complex_point, allow_hyphen_values = true)]
    pub pointwise_points: Vec<ComplexPoint>,
    #[command(flatten)]
    pub csv: CsvArg,
}

#[derive(Debug, Subcommand)]
pub enum UniversalCmd {
    /// Build the universal circuit for (n, s, r).
    Build {
        #[command(flatten)]
        shape: Shape,
        /// Per-degree product width.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Auxiliary assignment specializing the universal circuit to a given circuit.
    Embed {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Scale the embedded output by this factor.
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        scale: Option<Rational>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Real,
    Complex,
    Realified,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = rational)]
    pub delta: Rational,
    #[arg(long, value_enum, default_value_t = VariantArg::Real)]
    pub variant: VariantArg,
    /// Degree of the realified grid.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Subcommand)]
pub enum GridCmd {
    /// Points in enumeration order starting at an index.
    Enum {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "0")]
        from: String,
        #[command(flatten)]
        csv: CsvArg,
    },
    /// Seeded uniform sample with replacement.
    Sample {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        csv: CsvArg,
    },
}

#[derive(Debug, Args)]
pub struct AnticoncArgs {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[arg(long, value_parser = rational)]
    pub delta: Rational,
    /// Comma-separated thresholds β.
    #[arg(long, value_parser = real_point, default_value = "1/100,1/10,1/2")]
    pub beta: RealPoint,
    /// Constant in the bound C·r·β.
    #[arg(long, value_parser = rational, default_value = "2")]
    pub c: Rational,
    /// Visit every grid point instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub csv: CsvArg,
}

#[derive(Debug, Subcommand)]
pub enum AnticoncCmd {
    Real(AnticoncArgs),
    Complex(AnticoncArgs),
}

#[derive(Debug, Subcommand)]
pub enum RobustCmd {
    /// First point of the set where the polynomial is robustly nonzero.
    Verify {
        #[arg(long = "hitting-set", value_name = "FILE")]
        hitting_set: PathBuf,
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
    },
    /// Seeded candidate set of m complex grid points.
    Sample {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Real set obtained from a complex one.
    Realify {
        #[arg(long = "hitting-set", value_name = "FILE")]
        hitting_set: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Border-rank tensor family and one set robustly hitting all of it.
    DemoTensor {
        /// Comma-separated nonzero values of ε.
        #[arg(long, value_parser = real_point, default_value = "1/10", allow_hyphen_values = true)]
        eps: Vec<RealPoint>,
        #[command(flatten)]
        csv: CsvArg,
    },
}

#[derive(Debug, Args)]
pub struct UniversalShape {
    #[command(flatten)]
    pub shape: Shape,
    #[arg(long)]
    pub width: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuxArgs {
    /// Comma-separated real auxiliary values; symbolic when absent.
    #[arg(long, value_parser = real_point, allow_hyphen_values = true, conflicts_with = "assignment")]
    pub aux: Option<RealPoint>,
    /// Output file of `universal embed` supplying the auxiliary values.
    #[arg(long, value_name = "FILE")]
    pub assignment: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FormulaOut {
    /// Write the SMT-LIB script here instead of printing it.
    #[arg(long, value_name = "FILE")]
    pub dump: Option<PathBuf>,
    /// Send the formula to the solver and check any returned model.
    #[arg(long)]
    pub solve: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Subcommand)]
pub enum EtrCmd {
    /// `|C_a(v)| ≥ ε` (or its negation) over the gate variables.
    EncodePhi {
        #[command(flatten)]
        universal: UniversalShape,
        #[arg(long, value_parser = real_point, allow_hyphen_values = true)]
        point: RealPoint,
        #[arg(long, value_parser = rational)]
        eps: Rational,
        #[command(flatten)]
        aux: AuxArgs,
        #[arg(long)]
        negate: bool,
        #[command(flatten)]
        out: FormulaOut,
    },
    /// Existence of a unit-box point where the specialized circuit leaves [-1, 1].
    EncodePsi {
        #[command(flatten)]
        universal: UniversalShape,
        #[command(flatten)]
        aux: AuxArgs,
        #[command(flatten)]
        out: FormulaOut,
    },
    /// Escape query for one candidate tuple.
    EncodeSearch {
        #[command(flatten)]
        universal: UniversalShape,
        /// Candidate point, comma-separated (repeatable).
        #[arg(long, value_parser = real_point, allow_hyphen_values = true, required = true)]
        candidate: Vec<RealPoint>,
        #[arg(long, value_parser = rational)]
        eps: Rational,
        #[command(flatten)]
        out: FormulaOut,
    },
    /// Run the solver on an SMT-LIB script.
    Solve {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Lex,
    Rand,
}

#[derive(Debug, Subcommand)]
pub enum SearchCmd {
    /// Query candidates in order until one admits no escaping circuit.
    Run {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_parser = rational)]
        delta: Option<Rational>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, value_parser = rational)]
        eps: Option<Rational>,
        #[arg(long, value_enum, default_value_t = ModeArg::Lex)]
        mode: ModeArg,
        /// Required with `--mode rand`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "max-candidates", default_value_t = 1000)]
        max_candidates: usize,
        /// Refuse runs whose estimated atom count exceeds this value.
        #[arg(long = "cost-cap")]
        cost_cap: Option<String>,
        /// Candidates solved concurrently; defaults to `--jobs`.
        #[arg(long)]
        lookahead: Option<usize>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        csv: CsvArg,
    },
    /// Structural and sampled checks of a certificate.
    VerifyCert {
        #[arg(long, value_name = "FILE")]
        certificate: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Re-solve the accepting query.
        #[arg(long)]
        recheck: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Args)]
pub struct HardpolyArgs {
    #[arg(long = "hitting-set", value_name = "FILE")]
    pub hitting_set: PathBuf,
    #[arg(long)]
    pub degree: Option<u32>,
    /// Ask the solver whether the polynomial is a multiple of some size-s member.
    #[arg(long = "check-hardness", requires = "s")]
    pub check_hardness: bool,
    /// Circuit size for the hardness query.
    #[arg(long)]
    pub s: Option<usize>,
    /// Degree of the hardness query; defaults to the extracted degree.
    #[arg(long)]
    pub r: Option<u32>,
    /// Cap on intermediate terms in the symbolic expansion.
    #[arg(long, default_value_t = hitset_core::hardpoly::DEFAULT_SYMBOLIC_BUDGET)]
    pub budget: usize,
    /// Write the hardness query as SMT-LIB.
    #[arg(long, value_name = "FILE")]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Comma-separated rationals.
#[derive(Clone, Debug)]
pub struct RealPoint(pub Vec<Rational>);

/// Comma-separated Gaussian rationals.
#[derive(Clone, Debug)]
pub struct ComplexPoint(pub Vec<GaussianRational>);

pub fn real_point(s: &str) -> Result<RealPoint, String> {
    s.split(',').map(rational).collect::<Result<_, _>>().map(RealPoint)
}

pub fn complex_point(s: &str) -> Result<ComplexPoint, String> {
    s.split(',')
        .map(|t| t.parse::<GaussianRational>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(ComplexPoint)
}
