use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "regseq", version, about = "Asymptotics of summatory functions of q-regular sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the primary artifact here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Omit the timestamp comment line from CSV output.
    #[arg(long, global = true)]
    pub no_meta: bool,

    /// On failure print {"error": {"kind", "message"}} on stdout.
    #[arg(long, global = true)]
    pub error_json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    RowSum,
    ColumnSum,
    Spectral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// x(n) and v(n).
    Eval {
        #[command(flatten)]
        rep: RepArg,
        #[arg(long = "n")]
        n: u128,
    },
    /// X(N) = Σ_{n<N} x(n), exact for integral representations.
    Sum {
        #[command(flatten)]
        rep: RepArg,
        #[arg(long = "N")]
        n: u128,
        /// Sum term by term (at most 5·10^7 terms).
        #[arg(long)]
        brute: bool,
    },
    /// Eigenvalues of C = Σ A_r with algebraic multiplicity and largest Jordan block.
    Spectrum {
        #[command(flatten)]
        rep: RepArg,
        /// Eigenvalue clustering tolerance; default 1e-8·(1 + ‖C‖∞).
        #[arg(long)]
        cluster_tol: Option<f64>,
    },
    /// Joint spectral radius bounds from products up to a given length.
    Jsr {
        #[command(flatten)]
        rep: RepArg,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, value_enum, default_value_t = NormArg::RowSum)]
        norm: NormArg,
        /// Maximal number of products enumerated.
        #[arg(long, default_value_t = 1 << 22)]
        product_cap: u128,
        /// Slack εR added to the upper bound to obtain R.
        #[arg(long, default_value_t = 1e-6)]
        eps_r: f64,
    },
    /// Dirichlet series 𝒱(s) and 𝒳(s).
    Dirichlet {
        #[command(flatten)]
        rep: RepArg,
        /// Point s as "re,im" or "re".
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Use the absolutely convergent regime only.
        #[arg(long)]
        direct: bool,
        /// Also report the functional-equation residual at s.
        #[arg(long)]
        residual: bool,
        #[command(flatten)]
        dirichlet: DirichletArgs,
    },
    /// Fourier coefficients of all fluctuations.
    Fourier {
        #[command(flatten)]
        rep: RepArg,
        /// Truncation degree L.
        #[arg(long = "L", default_value_t = 50)]
        degree: usize,
        #[command(flatten)]
        dirichlet: DirichletArgs,
        #[command(flatten)]
        residue: ResidueArgs,
    },
    /// Empirical against reconstructed fluctuation of one expansion term.
    Fluctuation {
        #[command(flatten)]
        rep: RepArg,
        #[arg(long = "L", default_value_t = 50)]
        degree: usize,
        /// Expansion term index; default is the dominant term.
        #[arg(long)]
        term: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        dirichlet: DirichletArgs,
        #[command(flatten)]
        residue: ResidueArgs,
    },
    /// One p-periodic fluctuation collected over ζλ, ζ^p = 1.
    Combine {
        #[command(flatten)]
        rep: RepArg,
        /// Eigenvalue λ as "re,im" or "re".
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 2)]
        p: usize,
        /// Power of log_q N.
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long = "L", default_value_t = 50)]
        degree: usize,
        #[command(flatten)]
        dirichlet: DirichletArgs,
        #[command(flatten)]
        residue: ResidueArgs,
    },
    /// Pseudo-Tauberian relation for a family of trigonometric polynomials.
    Tauber {
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[arg(long)]
        q: f64,
        /// Number of functions; checked against the file.
        #[arg(long)]
        m: usize,
        /// JSON file {"phi": [[φ_{j,−L}, …, φ_{j,L}], …]}.
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long = "Nmax", default_value_t = 100_000)]
        nmax: u64,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// Cauchy radius; default 0.9·min(…) from κ, q, α, β.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 16)]
        cauchy_m_start: usize,
        #[arg(long, default_value_t = 4096)]
        cauchy_m_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        cauchy_tol: f64,
    },
    /// Esthetic numbers: main terms, parities and error term.
    Esthetic {
        #[arg(long)]
        q: usize,
        #[arg(long = "L", default_value_t = 50)]
        degree: usize,
        /// Write "u,empirical,reconstructed" for the dominant term here.
        #[arg(long)]
        emit_fluctuation: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        residue: ResidueArgs,
    },
}

#[derive(Debug, Args)]
pub struct RepArg {
    /// Representation JSON file, or builtin:NAME (sum-of-digits[:q], constant:q, esthetic:q).
    #[arg(long = "rep")]
    pub rep: String,
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    /// R; default is the JSR upper bound plus εR.
    #[arg(long)]
    pub r_bound: Option<f64>,
    /// Margin δ to the abscissa log_q R.
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Target accuracy of Dirichlet evaluations.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Minimal distance of q^s to σ(C).
    #[arg(long, default_value_t = 1e-4)]
    pub poles_tol: f64,
    /// Largest split point of the direct regime.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_split: usize,
}

#[derive(Debug, Args)]
pub struct ResidueArgs {
    /// Contour radius ρ; default min(0.4/log q, half pole gap, strip distance)/2.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub m_start: usize,
    #[arg(long, default_value_t = 16384)]
    pub m_max: usize,
    /// Convergence tolerance of the residue quadrature.
    #[arg(long, default_value_t = 1e-9)]
    pub residue_tol: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 8.0)]
    pub u_min: f64,
    #[arg(long, default_value_t = 12.0)]
    pub u_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub u_step: f64,
}
