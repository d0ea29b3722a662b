use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vdw_bem_cli::{parse_config, run, Command, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "vdw-bem", version, about = "Non-retarded van der Waals forces between finite bodies")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Configuration file; defaults apply to every absent key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and mesh artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Also write the per-node frequency integrand (`energy`).
    #[arg(long, global = true)]
    emit_integrand: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Write and re-check the meshes of the configured geometry.
    Mesh,
    /// Interaction energy at `energy.coordinate`.
    Energy,
    /// Energy and force scan over the configured samples.
    Scan,
    /// Proximity-force or pairwise-sum baseline.
    Baseline,
    /// Run the analytic oracle suite.
    Validate,
    /// Mesh and frequency-node convergence at the first scan sample.
    Convergence,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Mesh => Command::Mesh,
            Sub::Energy => Command::Energy,
            Sub::Scan => Command::Scan,
            Sub::Baseline => Command::Baseline,
            Sub::Validate => Command::Validate,
            Sub::Convergence => Command::Convergence,
        }
    }
}

fn load(path: Option<&PathBuf>) -> Result<RunConfig, String> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("io: {}: {e}", p.display()))?;
            parse_config(&text).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(cli.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        emit_integrand: cli.emit_integrand,
    };
    match pool.install(|| run(cli.command.into(), &cfg, &opts)) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
