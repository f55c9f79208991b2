use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gni_core::diagnostics::run_suite;
use gni_core::games::{make_game, GameKind};
use gni_core::Game;

use gni::config::Document;
use gni::{presets, run_study, Result};

#[derive(Parser)]
#[command(name = "gni", about = "Stationary Nash points of smooth games via GNI merit descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a preset or a config file.
    Run(RunArgs),
    /// Run the diagnostics suite on one game family or all of them.
    Check(CheckArgs),
    /// List the built-in game families and their defaults.
    ListGames,
    /// List the built-in presets.
    ListPresets,
    /// Print the version.
    Version,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed and GNI_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write convergence.svg.
    #[arg(long)]
    svg: bool,
    /// Record wall-clock time per iteration (makes outputs non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Extra `key=value` or `method.key=value` assignments.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    game: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 100)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(args: RunArgs) -> Result<bool> {
    let mut doc = match (&args.preset, &args.config) {
        (Some(name), _) => presets::document(name)?,
        (None, Some(path)) => Document::read(path)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    doc.apply_seed_env()?;
    let flags = [
        args.seed.map(|s| format!("seed={s}")),
        args.starts.map(|s| format!("starts={s}")),
        args.output.as_ref().map(|p| format!("output={}", p.display())),
        args.svg.then(|| "svg=true".to_string()),
        args.timing.then(|| "timing=true".to_string()),
    ];
    for assignment in flags.into_iter().flatten().chain(args.sets) {
        doc.set(&assignment, "command line")?;
    }
    let config = doc.build()?;
    let study = run_study(&config)?;
    let files = study.write(&config.output)?;
    println!(
        "{} on {}: {} start(s), seed {}, iterations counted to ‖∇f‖ ≤ {:e}",
        config.name, study.summary.game, config.starts, config.seed, study.summary.convergence_tol
    );
    println!(
        "{:<14} {:>9} {:>11} {:>11} {:>12} {:>12}",
        "method", "converged", "mean iters", "median", "mean error", "mean ‖∇f‖"
    );
    for m in &study.summary.methods {
        println!(
            "{:<14} {:>9.3} {:>11.1} {:>11.1} {:>12.4e} {:>12.4e}",
            m.method, m.convergence_fraction, m.mean_iterations, m.median_iterations, m.mean_final_error, m.mean_final_grad_norm
        );
    }
    println!("wrote {} files under {}", files.len(), config.output.display());
    Ok(true)
}

fn check(args: CheckArgs) -> Result<bool> {
    let labels: Vec<&str> = match &args.game {
        Some(g) => vec![g.as_str()],
        None => GameKind::LABELS.to_vec(),
    };
    let mut all_passed = true;
    for label in labels {
        let kind = GameKind::default_for(label)
            .ok_or_else(|| gni::Error::Experiment(format!("unknown game '{label}'")))?;
        let game = make_game(&kind, args.seed)?;
        for r in run_suite(&game, args.probes, args.seed)? {
            let verdict = match (r.applicable, r.passed) {
                (false, _) => "N/A",
                (true, true) => "PASS",
                (true, false) => "FAIL",
            };
            all_passed &= r.passed || !r.applicable;
            println!(
                "{:<12} {:<22} {:<4} worst={:<11.3e} threshold={:<8.1e} probes={}",
                game.name(),
                r.name,
                verdict,
                r.worst_case,
                r.threshold,
                r.probes
            );
        }
    }
    Ok(all_passed)
}

fn list_games() {
    for label in GameKind::LABELS {
        let kind = GameKind::default_for(label).expect("listed label");
        println!("{label:<12} {kind:?}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Check(a) => check(a),
        Command::ListGames => {
            list_games();
            Ok(true)
        }
        Command::ListPresets => {
            for p in presets::PRESETS {
                println!("{:<20} {}", p.name, p.description);
            }
            Ok(true)
        }
        Command::Version => {
            println!("gni {}", env!("CARGO_PKG_VERSION"));
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
