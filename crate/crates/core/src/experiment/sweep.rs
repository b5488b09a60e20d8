//! Monte Carlo δ sweeps.

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::binary_kl;
use crate::error::{Error, Result};
use crate::experiment::config::SweepConfig;
use crate::fw::{lower_bound, solve_oracle, OracleOptions};
use crate::model::{instance_hypothesis, DEFAULT_MATCH_TOL};
use crate::sim::{run_episode_with_truth, Algorithm, EpisodeResult};

/// Aggregate over the trials of one (δ, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub algo: Algorithm,
    pub n_trials: usize,
    pub mean_tau: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std_tau: f64,
    pub error_rate: f64,
    pub d_bernoulli: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Ordered by (δ as listed, algorithm as listed, seed).
    pub episodes: Vec<EpisodeResult>,
    pub t_star: f64,
}

impl SweepOutput {
    pub fn capped(&self) -> usize {
        self.episodes.iter().filter(|e| e.capped).count()
    }

    /// Rows whose empirical error rate exceeds their δ.
    pub fn over_budget(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error_rate > r.delta)
    }

    pub fn rows_for(&self, algo: Algorithm) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.algo == algo).collect()
    }
}

/// Mean and sample standard deviation (zero when `n = 1`).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates the episodes of one cell.
pub fn summarize(delta: f64, algo: Algorithm, episodes: &[EpisodeResult], t_star: f64) -> SweepRow {
    let taus: Vec<f64> = episodes.iter().map(|e| e.tau as f64).collect();
    let (mean_tau, std_tau) = mean_std(&taus);
    let errors = episodes.iter().filter(|e| !e.correct).count();
    SweepRow {
        delta,
        algo,
        n_trials: episodes.len(),
        mean_tau,
        std_tau,
        error_rate: errors as f64 / episodes.len() as f64,
        d_bernoulli: binary_kl(delta, 1.0 - delta),
        lower_bound: lower_bound(delta, t_star),
    }
}

/// Runs every (δ, algorithm, trial) episode of `config`. Trial `i` uses seed
/// `seed_base + i` for every cell, so algorithms see common random numbers.
///
/// `threads` bounds the worker pool; `None` uses rayon's global pool.
pub fn run_sweep(config: &SweepConfig, threads: Option<usize>) -> Result<SweepOutput> {
    let oracle = solve_oracle(&config.instance, &config.problem, OracleOptions::default())?;
    run_sweep_with_hardness(config, oracle.t_star, threads)
}

/// Like [`run_sweep`] with a precomputed `T*(P)`.
pub fn run_sweep_with_hardness(
    config: &SweepConfig,
    t_star: f64,
    threads: Option<usize>,
) -> Result<SweepOutput> {
    let truth = instance_hypothesis(&config.instance, &config.problem, DEFAULT_MATCH_TOL)?;
    let jobs: Vec<(f64, Algorithm, u64)> = config
        .delta_grid
        .iter()
        .flat_map(|&d| {
            config.algos.iter().flat_map(move |&a| {
                (0..config.trials as u64).map(move |i| (d, a, config.seed_base.wrapping_add(i)))
            })
        })
        .collect();
    let run = || -> Result<Vec<EpisodeResult>> {
        jobs.par_iter()
            .map(|&(delta, algo, seed)| {
                run_episode_with_truth(
                    &config.problem,
                    &config.instance,
                    truth,
                    algo,
                    delta,
                    seed,
                    config.cap,
                    false,
                )
            })
            .collect()
    };
    let episodes = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let rows: Vec<SweepRow> = episodes
        .chunks(config.trials)
        .map(|cell| summarize(cell[0].delta, cell[0].algo, cell, t_star))
        .collect();
    for r in &rows {
        info!(
            "delta={:e} algo={} mean_tau={:.1} error_rate={}",
            r.delta, r.algo, r.mean_tau, r.error_rate
        );
    }
    Ok(SweepOutput {
        rows,
        episodes,
        t_star,
    })
}
