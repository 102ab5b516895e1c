//! `ffcircle`: command-line front end. Every run writes a manifest with its
//! full configuration and the code revision under `--out`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "ffcircle", version = ffcircle::REVISION, about = "Exact circle-method experiments over F_q[t]")]
pub struct Cli {
    /// Worker threads for grid and sweep evaluation (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized steps (sweep resampling, power iteration).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Work budget per call; defaults to FFCIRCLE_BUDGET or 1e8.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Directory for manifests and result files.
    #[arg(long, global = true, default_value = "ffcircle-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Finite and archimedean Kloosterman sums.
    #[command(subcommand)]
    Kloosterman(KlCommand),
    /// Direct vs closed exponential sums S_{g,r}(c).
    Expsum(ExpsumArgs),
    /// Closed vs numeric oscillatory integrals I_{g,r}(c).
    Osc(OscArgs),
    /// Brute-force count vs delta-method reconstruction.
    Count(CountArgs),
    /// Local densities and the truncated singular series.
    Densities(DensityArgs),
    /// Morgenstern Cayley graphs.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Twisted Linnik-Selberg sums.
    #[command(subcommand)]
    Tls(TlsCommand),
    /// Runs the acceptance suite (all criteria, or the ones listed).
    Selftest { criteria: Vec<u8> },
}

#[derive(Subcommand, Debug, Serialize)]
pub enum KlCommand {
    /// Kl_r(m, n) with its Weil bound.
    Finite {
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Kl_inf(alpha) by closed form and by direct integration.
    Infinity {
        #[arg(long, default_value_t = 3)]
        q: u64,
        /// A finite Laurent sum such as `t^-2` or `2t^-3+t^-4`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
}

/// An instance, from `--instance FILE` or from the individual flags.
#[derive(Args, Debug, Serialize, Clone)]
pub struct InstanceArgs {
    /// JSON file `{q, nu, f, g, lambda}`; overrides the flags below.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub nu: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
    pub lambda: String,
    /// Skip the closed-form hypotheses (only `f = F(lambda) mod g` is enforced).
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum GridSize {
    /// The two deg g = 1 instances.
    Small,
    /// Every instance of the acceptance grid (several minutes).
    Full,
}

#[derive(Args, Debug, Serialize)]
pub struct ExpsumArgs {
    /// Run a predefined comparison grid instead of a single instance.
    #[arg(long, value_enum)]
    pub grid: Option<GridSize>,
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// `c1,c2,c3,c4`; without it every c with |c| <= |g| is compared.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct OscArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    /// Modulus; without it every monic r with deg r <= Q.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// `c1,c2,c3,c4`; without it every c with deg c_i <= deg g + 1.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MethodChoice {
    Closed,
    Direct,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    /// Largest prime degree in the product.
    #[arg(long, default_value_t = 3)]
    pub max_deg: usize,
    /// Largest k in each density sequence.
    #[arg(long, default_value_t = 6)]
    pub k_max: u32,
    /// Largest deg r in the series.
    #[arg(long, default_value_t = 4)]
    pub sum_deg: usize,
}

/// A graph, from the flags or from the last `graph build` under `--out`.
#[derive(Args, Debug, Serialize, Clone)]
pub struct GraphSel {
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long, default_value_t = 1 << 22)]
    pub max_vertices: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum VariantChoice {
    Bipartite,
    NonBipartite,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum GraphCommand {
    /// Builds the graph and writes `header.json` and `edges.txt`.
    Build(GraphSel),
    Diameter(GraphSel),
    /// Second eigenvalue: dense up to `--max-dense` vertices, power iteration beyond.
    Spectrum {
        #[command(flatten)]
        sel: GraphSel,
        #[arg(long, default_value_t = 4096)]
        max_dense: usize,
    },
    /// BFS distance between two matrices: `I`, `W`, or `a;b;c;d`.
    Distance {
        #[command(flatten)]
        sel: GraphSel,
        #[arg(long, default_value = "I")]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Diameter lower-bound experiment.
    Lowerbound {
        #[command(flatten)]
        sel: GraphSel,
        #[arg(long, value_enum, default_value_t = VariantChoice::Bipartite)]
        variant: VariantChoice,
    },
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct TlsArgs {
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub delta: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Numerator of a = a_num / g^a_gpow.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value_t = 0)]
    pub a_gpow: u32,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = 0)]
    pub b_gpow: u32,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum TlsCommand {
    /// One sum at |r| = q^T (or |r| <= q^T with `--window cumulative`).
    Sum {
        #[command(flatten)]
        p: TlsArgs,
        #[arg(long = "T", short = 'T')]
        t: usize,
        #[arg(long, default_value = "finite")]
        variant: String,
        #[arg(long, default_value = "exact")]
        window: String,
    },
    /// Sweep over T = 0..=t_max with slope fits; appends to exact.csv and cumulative.csv.
    Sweep {
        #[command(flatten)]
        p: TlsArgs,
        #[arg(long, default_value_t = 4)]
        t_max: usize,
        /// Comma-separated: finite, with_infinity.
        #[arg(long, default_value = "finite,with_infinity")]
        variants: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
