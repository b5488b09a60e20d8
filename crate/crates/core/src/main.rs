use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info, warn};
use serde_json::json;

use bandit_cluster::experiment::{diagnostics, export_csv, parse_config, regress_slope, run_sweep, ProblemSpec};
use bandit_cluster::fw::{solve_oracle, OracleOptions};
use bandit_cluster::model::ProblemKind;
use bandit_cluster::Result;

const EXIT_CAPPED: u8 = 2;
const EXIT_OVER_DELTA: u8 = 3;

#[derive(Parser)]
#[command(name = "bandit-cluster", version, about = "Fixed-confidence clustering with bandit feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a δ sweep and write summary.csv and episodes.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory (default: the config's "output", else ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal allocation and hardness of the config's instance.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = OracleOptions::default().max_iters)]
        max_iters: u64,
        #[arg(long, default_value_t = OracleOptions::default().gap_tol)]
        gap_tol: f64,
    },
    /// Print regularity constants, hardness and a gradient spot check.
    Diagnostics {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the hypotheses of a problem family.
    GenProblem {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long = "N")]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    MatchingPairs,
    OddArm,
    Nary,
}

impl From<KindArg> for ProblemKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::MatchingPairs => ProblemKind::MatchingPairs,
            KindArg::OddArm => ProblemKind::OddArm,
            KindArg::Nary => ProblemKind::Nary,
        }
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn sweep(config: PathBuf, threads: Option<usize>, out: Option<PathBuf>) -> Result<u8> {
    let mut cfg = parse_config(&config)?;
    if let Ok(raw) = std::env::var("BC_SEED") {
        cfg.seed_base = raw
            .trim()
            .parse()
            .map_err(|_| bandit_cluster::Error::Config(format!("BC_SEED is not an integer: {raw:?}")))?;
        info!("seed_base overridden by BC_SEED = {}", cfg.seed_base);
    }
    let dir = out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let result = run_sweep(&cfg, threads)?;
    let (summary, episodes) = export_csv(&result.rows, &result.episodes, &dir)?;
    let slopes: Vec<_> = cfg
        .algos
        .iter()
        .map(|&a| {
            let fit = regress_slope(result.rows_for(a)).ok();
            json!({
                "algo": a.to_string(),
                "slope": fit.map(|f| f.0),
                "intercept": fit.map(|f| f.1),
            })
        })
        .collect();
    print_json(&json!({
        "summary": summary,
        "episodes": episodes,
        "t_star": result.t_star,
        "hardness": 1.0 / result.t_star,
        "regression": slopes,
        "capped": result.capped(),
    }));
    if result.capped() > 0 {
        warn!("{} episodes hit the cap of {} pulls", result.capped(), cfg.cap);
        return Ok(EXIT_CAPPED);
    }
    if let Some(r) = result.over_budget().next() {
        warn!("error rate {} exceeds delta {} for {}", r.error_rate, r.delta, r.algo);
        return Ok(EXIT_OVER_DELTA);
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sweep { config, threads, out } => sweep(config, threads, out),
        Command::Oracle {
            config,
            max_iters,
            gap_tol,
        } => {
            let cfg = parse_config(&config)?;
            let r = solve_oracle(&cfg.instance, &cfg.problem, OracleOptions { max_iters, gap_tol })?;
            print_json(&json!({
                "t_star": r.t_star,
                "hardness": r.hardness(),
                "w_star": r.w_star,
                "iterations": r.iterations,
                "gap": r.gap,
            }));
            Ok(0)
        }
        Command::Diagnostics { config } => {
            let cfg = parse_config(&config)?;
            print_json(&diagnostics(&cfg.instance, &cfg.problem)?);
            Ok(0)
        }
        Command::GenProblem { kind, k, m, n } => {
            let spec = ProblemSpec {
                kind: kind.into(),
                k,
                m,
                n,
            };
            let problem = spec.build()?;
            print_json(&json!({
                "problem": spec,
                "num_hypotheses": problem.len(),
                "hypotheses": problem.hypotheses().iter().map(|h| h.clusters()).collect::<Vec<_>>(),
            }));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
