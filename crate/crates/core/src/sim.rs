//! Simulated bandit environment and full-episode runner.
//!
//! Each episode owns a root seed. Arm observations and the uniform policy
//! draw from separate ChaCha streams of that seed, so an episode is
//! bit-reproducible regardless of which thread runs it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{instance_hypothesis, ClusteringProblem, ProblemInstance, DEFAULT_MATCH_TOL};
use crate::sampling::{policy_step_tasfw, policy_step_uniform, AlgorithmState};
use crate::score::{z_from_board, ScoreBoard};
use crate::stopping::{should_stop, threshold, ThresholdParams};

/// Default pull budget per episode.
pub const DEFAULT_CAP: u64 = 10_000_000;

const ARM_STREAM: u64 = 0;
const POLICY_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(rename = "tasfw", alias = "tas-fw")]
    TasFw,
    Uniform,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::TasFw => "tasfw",
            Algorithm::Uniform => "uniform",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tasfw" | "tas-fw" => Ok(Algorithm::TasFw),
            "uniform" => Ok(Algorithm::Uniform),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Per-step record kept when tracing is enabled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub t: u64,
    pub z: f64,
    pub beta: f64,
    pub sigma_hat: usize,
    pub min_pulls: u64,
    /// `max_i |N_i - Σ z̃_i|` (zero for the uniform baseline).
    pub tracking_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Stopping time in pulls (the cap when capped).
    pub tau: u64,
    pub recommended: usize,
    pub correct: bool,
    pub seed: u64,
    pub delta: f64,
    pub algo: Algorithm,
    pub capped: bool,
    pub wall_time: f64,
    pub final_pulls: Vec<u64>,
    pub trace: Option<Vec<TraceStep>>,
}

/// Draws one symbol from arm `arm` by inverse CDF.
pub fn pull<R: Rng + ?Sized>(p: &ProblemInstance, arm: usize, rng: &mut R) -> Result<usize> {
    let arms = p.arms();
    let dist = arms.get(arm).ok_or(Error::ArmOutOfRange {
        arm,
        num_arms: arms.len(),
    })?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let probs = dist.probs();
    for (a, &pa) in probs.iter().enumerate() {
        acc += pa;
        if u < acc {
            return Ok(a);
        }
    }
    // u landed in the rounding slack above the last cumulative sum
    Ok(probs.iter().rposition(|&pa| pa > 0.0).unwrap_or(probs.len() - 1))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs one episode to its stopping time (or the cap).
pub fn run_episode(
    problem: &ClusteringProblem,
    p: &ProblemInstance,
    algo: Algorithm,
    delta: f64,
    seed: u64,
    cap: u64,
) -> Result<EpisodeResult> {
    let truth = instance_hypothesis(p, problem, DEFAULT_MATCH_TOL)?;
    run_episode_with_truth(problem, p, truth, algo, delta, seed, cap, false)
}

/// Same as [`run_episode`] with a precomputed ground truth and optional
/// per-step tracing.
#[allow(clippy::too_many_arguments)]
pub fn run_episode_with_truth(
    problem: &ClusteringProblem,
    p: &ProblemInstance,
    truth: usize,
    algo: Algorithm,
    delta: f64,
    seed: u64,
    cap: u64,
    trace: bool,
) -> Result<EpisodeResult> {
    let k = p.num_arms();
    if cap < k as u64 {
        return Err(Error::CapTooSmall { cap, num_arms: k });
    }
    let started = Instant::now();
    let params = ThresholdParams::for_problem(problem, p.alphabet_size(), delta);
    let mut arm_rng = stream(seed, ARM_STREAM);
    let mut policy_rng = stream(seed, POLICY_STREAM);
    let mut state = AlgorithmState::new(k, p.alphabet_size());
    let mut steps = trace.then(Vec::new);

    let mut pmfs = state.empirical_pmfs();
    let (tau, recommended, capped) = loop {
        let arm = match algo {
            Algorithm::TasFw => policy_step_tasfw(&mut state, &pmfs, problem)?,
            Algorithm::Uniform => policy_step_uniform(k, &mut policy_rng),
        };
        let symbol = pull(p, arm, &mut arm_rng)?;
        state.record(arm, symbol);
        pmfs = state.empirical_pmfs();
        let board = ScoreBoard::compute(&pmfs, &state.allocation(), problem);
        state.set_sigma_hat(board.best());
        let t = state.t();
        if algo == Algorithm::TasFw {
            debug_assert!(state.tracking_error() <= (k - 1) as f64 + 1e-9);
        }
        if t < k as u64 {
            continue;
        }
        let (z, sigma_hat) = z_from_board(t, &board);
        let beta = threshold(t, &params);
        if let Some(steps) = steps.as_mut() {
            steps.push(TraceStep {
                t,
                z,
                beta,
                sigma_hat,
                min_pulls: state.pulls().iter().copied().min().unwrap_or(0),
                tracking_error: match algo {
                    Algorithm::TasFw => state.tracking_error(),
                    Algorithm::Uniform => 0.0,
                },
            });
        }
        if should_stop(z, beta) {
            break (t, sigma_hat, false);
        }
        if t >= cap {
            break (t, sigma_hat, true);
        }
    };

    Ok(EpisodeResult {
        tau,
        recommended,
        correct: recommended == truth,
        seed,
        delta,
        algo,
        capped,
        wall_time: started.elapsed().as_secs_f64(),
        final_pulls: state.pulls().to_vec(),
        trace: steps,
    })
}
