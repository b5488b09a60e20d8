//! Numerical diagnostics of an instance: regularity constants, hardness,
//! and a finite-difference check of the score gradients.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fw::{solve_oracle, OracleOptions};
use crate::model::{instance_hypothesis, ClusteringProblem, Hypothesis, ProblemInstance, DEFAULT_MATCH_TOL};
use crate::score::{grad_g, hypothesis_score, lipschitz_constants, LipschitzConstants};

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    #[serde(flatten)]
    pub constants: LipschitzConstants,
    pub k_tilde: usize,
    pub num_hypotheses: usize,
    pub t_star: f64,
    pub hardness: f64,
    pub w_star: Vec<f64>,
    pub oracle_iterations: u64,
    pub oracle_gap: f64,
    /// Largest `max_i |∂_i fd - ∂_i| / ||∇g||_∞` over the sampled points.
    pub grad_fd_max_rel_error: f64,
}

/// Relative step of the central differences.
const FD_STEP: f64 = 1e-5;

/// Central finite-difference gradient of `g^h` at `w`, perturbing one
/// coordinate at a time by `FD_STEP · w_i`.
pub fn fd_gradient<P: AsRef<[f64]>>(arms: &[P], w: &[f64], h: &Hypothesis) -> Vec<f64> {
    let mut probe = w.to_vec();
    (0..w.len())
        .map(|i| {
            let step = FD_STEP * w[i];
            probe[i] = w[i] + step;
            let up = hypothesis_score(arms, &probe, h);
            probe[i] = w[i] - step;
            let down = hypothesis_score(arms, &probe, h);
            probe[i] = w[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Largest deviation between the analytic and the finite-difference
/// gradient, relative to the sup norm of the analytic one.
pub fn gradient_rel_error<P: AsRef<[f64]>>(arms: &[P], w: &[f64], h: &Hypothesis) -> f64 {
    let exact = grad_g(arms, w, h);
    let approx = fd_gradient(arms, w, h);
    let scale = exact.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if scale == 0.0 {
        return approx.iter().fold(0.0, |m, g| m.max(g.abs()));
    }
    exact
        .iter()
        .zip(&approx)
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max)
}

/// A point drawn from the simplex with every coordinate at least `floor`.
pub fn random_interior<R: Rng + ?Sized>(k: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    let scale = 1.0 - floor * k as f64;
    raw.iter().map(|r| floor + scale * r / s).collect()
}

/// Finite-difference spot check over `points` random interior allocations
/// and every hypothesis of `problem`.
pub fn gradient_spot_check(p: &ProblemInstance, problem: &ClusteringProblem, points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let w = random_interior(p.num_arms(), 1e-3, &mut rng);
        for h in problem.hypotheses() {
            worst = worst.max(gradient_rel_error(p.arms(), &w, h));
        }
    }
    worst
}

pub fn diagnostics(p: &ProblemInstance, problem: &ClusteringProblem) -> Result<DiagnosticsReport> {
    let sigma = instance_hypothesis(p, problem, DEFAULT_MATCH_TOL)?;
    let constants = lipschitz_constants(p, problem, sigma)?;
    let oracle = solve_oracle(p, problem, OracleOptions::default())?;
    Ok(DiagnosticsReport {
        constants,
        k_tilde: problem.k_tilde(),
        num_hypotheses: problem.len(),
        t_star: oracle.t_star,
        hardness: oracle.hardness(),
        w_star: oracle.w_star,
        oracle_iterations: oracle.iterations,
        oracle_gap: oracle.gap,
        grad_fd_max_rel_error: gradient_spot_check(p, problem, 20, 0),
    })
}
