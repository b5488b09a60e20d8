//! Stopping threshold `β(t, δ)` and the stop decision.

use crate::model::ClusteringProblem;

/// `π²/6 − 1`.
pub const BASEL_MINUS_ONE: f64 = 0.644_934_066_848_226_4;

/// Largest number of clustered arms over the hypotheses of `problem`.
pub fn k_tilde(problem: &ClusteringProblem) -> usize {
    problem.k_tilde()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub delta: f64,
    /// Cluster-count parameter. For problems whose hypotheses have different
    /// cluster counts this is the largest one.
    pub m: usize,
    pub alphabet_size: usize,
    pub k_tilde: usize,
}

impl ThresholdParams {
    pub fn for_problem(problem: &ClusteringProblem, alphabet_size: usize, delta: f64) -> Self {
        Self {
            delta,
            m: problem.m_max(),
            alphabet_size,
            k_tilde: problem.k_tilde(),
        }
    }

    fn growth(&self) -> f64 {
        (self.m * self.alphabet_size + self.k_tilde + 2) as f64
    }
}

/// `β(t, δ) = ln(1/δ) + (M|X| + K̃ + 2) ln(t+1) + ln(π²/6 − 1)`.
pub fn threshold(t: u64, params: &ThresholdParams) -> f64 {
    (1.0 / params.delta).ln() + params.growth() * ((t + 1) as f64).ln() + BASEL_MINUS_ONE.ln()
}

/// Stop once the statistic reaches the threshold (inclusive).
pub fn should_stop(z: f64, beta: f64) -> bool {
    z >= beta
}
