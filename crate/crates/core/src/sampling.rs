//! Arm selection: forced exploration schedule, C-tracking, the TaS-FW policy
//! step and the uniform baseline.

use rand::Rng;

use crate::error::Result;
use crate::fw::{fws_step, radius};
use crate::model::{Categorical, ClusteringProblem};
use crate::score::ScoreBoard;

/// `⌈√t ln t⌉`.
pub fn forced_schedule(t: u64) -> u64 {
    let t = t as f64;
    (t.sqrt() * t.ln()).ceil() as u64
}

/// Whether step `t` is a forced exploration step:
/// `⌈√t ln t⌉ = ⌈√(t+1) ln(t+1)⌉ - 1`.
pub fn forced_index(t: u64) -> bool {
    forced_schedule(t) + 1 == forced_schedule(t + 1)
}

/// C-tracking: the arm with the largest deficit `cum_z_i - N_i`, lowest
/// index on ties.
pub fn ctrack_next(cum_z: &[f64], pulls: &[u64]) -> usize {
    let mut best = 0;
    let mut best_gap = f64::NEG_INFINITY;
    for (i, (&z, &n)) in cum_z.iter().zip(pulls).enumerate() {
        let gap = z - n as f64;
        if gap > best_gap {
            best_gap = gap;
            best = i;
        }
    }
    best
}

/// Per-episode learner state.
#[derive(Debug, Clone)]
pub struct AlgorithmState {
    t: u64,
    pulls: Vec<u64>,
    counts: Vec<Vec<u64>>,
    cum_z: Vec<f64>,
    x_tilde: Vec<f64>,
    sigma_hat: usize,
}

impl AlgorithmState {
    pub fn new(num_arms: usize, alphabet_size: usize) -> Self {
        Self {
            t: 0,
            pulls: vec![0; num_arms],
            counts: vec![vec![0; alphabet_size]; num_arms],
            cum_z: vec![0.0; num_arms],
            x_tilde: vec![1.0 / num_arms as f64; num_arms],
            sigma_hat: 0,
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// `Σ_s z̃(s)`, the cumulative tracked target.
    pub fn cum_z(&self) -> &[f64] {
        &self.cum_z
    }

    pub fn x_tilde(&self) -> &[f64] {
        &self.x_tilde
    }

    pub fn sigma_hat(&self) -> usize {
        self.sigma_hat
    }

    pub fn set_sigma_hat(&mut self, sigma: usize) {
        self.sigma_hat = sigma;
    }

    /// Empirical allocation `N(t)/t`.
    pub fn allocation(&self) -> Vec<f64> {
        let t = self.t.max(1) as f64;
        self.pulls.iter().map(|&n| n as f64 / t).collect()
    }

    /// Empirical pmfs from the symbol counts. Unpulled arms get a uniform
    /// placeholder; their weight is zero so it never enters a score.
    pub fn empirical_pmfs(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|c| match Categorical::from_counts(c) {
                Some(p) => p.probs().to_vec(),
                None => vec![1.0 / c.len() as f64; c.len()],
            })
            .collect()
    }

    /// Records one observation and advances `t`.
    pub fn record(&mut self, arm: usize, symbol: usize) {
        self.t += 1;
        self.pulls[arm] += 1;
        self.counts[arm][symbol] += 1;
    }

    /// Adds a target `z̃(t)` for the upcoming step and refreshes `x̃`.
    fn push_target(&mut self, z: &[f64]) {
        let next = (self.t + 1) as f64;
        for ((c, x), zi) in self.cum_z.iter_mut().zip(&mut self.x_tilde).zip(z) {
            *c += zi;
            *x = *c / next;
        }
    }

    /// Largest `|N_i - Σ_s z̃_i(s)|` over arms.
    pub fn tracking_error(&self) -> f64 {
        self.pulls
            .iter()
            .zip(&self.cum_z)
            .map(|(&n, &c)| (n as f64 - c).abs())
            .fold(0.0, f64::max)
    }
}

/// Chooses the arm for step `t + 1` under TaS-FW and books the tracked
/// target. Does not record the observation.
///
/// Steps `1..=K` use the uniform target (pulling each arm once); later forced
/// steps use the uniform target; all others use the FW direction computed at
/// `x̃(t)` against the current estimate `σ̂(t)` with radius `r_{t+1}`.
pub fn policy_step_tasfw<P: AsRef<[f64]>>(
    state: &mut AlgorithmState,
    pmfs: &[P],
    problem: &ClusteringProblem,
) -> Result<usize> {
    let k = state.num_arms();
    let next = state.t + 1;
    let uniform = vec![1.0 / k as f64; k];
    let z = if next <= k as u64 || forced_index(next) {
        uniform
    } else {
        fws_step(pmfs, &state.x_tilde, radius(next), state.sigma_hat, problem)?
    };
    state.push_target(&z);
    let arm = ctrack_next(&state.cum_z, &state.pulls);
    Ok(arm)
}

/// Uniform baseline: an arm drawn uniformly at random.
pub fn policy_step_uniform<R: Rng + ?Sized>(num_arms: usize, rng: &mut R) -> usize {
    rng.random_range(0..num_arms)
}

/// Recomputes `σ̂` from the state's own statistics and returns the board.
pub fn refresh_estimate(state: &mut AlgorithmState, problem: &ClusteringProblem) -> ScoreBoard {
    let pmfs = state.empirical_pmfs();
    let board = ScoreBoard::compute(&pmfs, &state.allocation(), problem);
    state.sigma_hat = board.best();
    board
}
