//! `tensor-spectra`: rank functionals of order-3 tensors from the command line.

mod commands;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "tensor-spectra", version, about = "Rank functionals of order-3 tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    config: RunConfig,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Optimization tolerance in bits
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for randomized steps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on enumeration work
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Output format; each subcommand has its own default
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Tensors {
    /// Tensor file in the JSON format; repeat for a batch
    #[arg(long, required = true)]
    pub tensor: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Primal,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DualTarget {
    /// `f` on Θ to `g` on Ξ
    G,
    /// `g` on Ξ to `f` on Θ
    F,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weighted slice-rank upper bound from an optimal slice cover
    Cover {
        #[command(flatten)]
        tensors: Tensors,
        /// Weighting, repeat for a batch
        #[arg(long, required = true)]
        xi: Vec<String>,
    },
    /// Tightness witness or a certificate that none exists
    Tight {
        #[command(flatten)]
        tensors: Tensors,
    },
    /// Support functional ζ_θ
    Zeta {
        #[command(flatten)]
        tensors: Tensors,
        #[arg(long, required = true)]
        theta: Vec<String>,
    },
    /// Asymptotic weighted slice rank G_ξ of a tight support
    Gxi {
        #[command(flatten)]
        tensors: Tensors,
        #[arg(long, required = true)]
        xi: Vec<String>,
        #[arg(long, value_enum, default_value_t = Route::Primal)]
        route: Route,
    },
    /// Min-entropy variants of G_ξ (with --xi) or ζ_θ (with --theta)
    Minentropy {
        #[command(flatten)]
        tensors: Tensors,
        #[arg(long, conflicts_with = "theta", required_unless_present = "theta")]
        xi: Vec<String>,
        #[arg(long)]
        theta: Vec<String>,
    },
    /// Field functional max_ξ G_ξ^{⟨θ,ξ⟩} of a tight support
    Field {
        #[command(flatten)]
        tensors: Tensors,
        #[arg(long, required = true)]
        theta: Vec<String>,
        /// Resolution of the ξ face grid
        #[arg(long, default_value_t = tensor_spectra::dual_pair::DEFAULT_XI_SCAN)]
        resolution: usize,
    },
    /// Exact feasibility of uniform marginals on the support
    Semistable {
        #[command(flatten)]
        tensors: Tensors,
    },
    /// Finite-power bounds M_{ξ,k} from weight decompositions
    Weights {
        #[command(flatten)]
        tensors: Tensors,
        #[arg(long, default_value = "1,1,1")]
        xi: String,
        /// Powers to evaluate
        #[arg(long, default_value = "1,2,4,8")]
        k: String,
    },
    /// Conjugate transform between grid functions on Θ and Ξ
    Dual {
        /// CSV grid with three coordinate columns and a value column
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, value_enum)]
        to: DualTarget,
        /// Output grid resolution; defaults to the input resolution
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Dimensions of symmetric-group and general-linear representations
    Repdims {
        #[arg(long)]
        k: usize,
        /// Rank of GL_m for Weyl module dimensions
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Stretch factor for the entropy-rate check
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Reference values for the standard examples
    Examples,
    /// Basic facts about a tensor
    Info {
        #[command(flatten)]
        tensors: Tensors,
    },
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TENSOR_SPECTRA_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("TENSOR_SPECTRA_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("TENSOR_SPECTRA_THREADS must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<output::Report> {
    configure_threads()?;
    let cfg = &cli.config;
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        anyhow::bail!("--tol must be positive, got {}", cfg.tol);
    }
    if cfg.budget == Some(0) {
        anyhow::bail!("--budget must be positive");
    }
    match cli.command {
        Command::Cover { tensors, xi } => commands::cover(cfg, &tensors, &xi),
        Command::Tight { tensors } => commands::tight(cfg, &tensors),
        Command::Zeta { tensors, theta } => commands::zeta(cfg, &tensors, &theta),
        Command::Gxi { tensors, xi, route } => commands::gxi(cfg, &tensors, &xi, route),
        Command::Minentropy { tensors, xi, theta } => commands::minentropy(cfg, &tensors, &xi, &theta),
        Command::Field { tensors, theta, resolution } => commands::field(cfg, &tensors, &theta, resolution),
        Command::Semistable { tensors } => commands::semistable(&tensors),
        Command::Weights { tensors, xi, k } => commands::weights(cfg, &tensors, &xi, &k),
        Command::Dual { grid, to, resolution } => commands::dual(&grid, to, resolution),
        Command::Repdims { k, m, n } => commands::repdims(cfg, k, m, n),
        Command::Examples => commands::examples(cfg),
        Command::Info { tensors } => commands::info(cfg, &tensors),
    }
}

/// 3 for answers that are negative or inconclusive, 2 for bad input.
fn exit_code(err: &anyhow::Error) -> u8 {
    use tensor_spectra::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible | Error::NotTight | Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.config.format;
    let out = cli.config.out.clone();
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = report.render(format).and_then(|b| output::write(&b, out.as_deref())) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match report.negative {
        Some(msg) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
        None => ExitCode::SUCCESS,
    }
}
