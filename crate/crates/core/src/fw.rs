//! Frank–Wolfe maximin steps over the `r`-subdifferential, the offline
//! hardness oracle `T*(P)`, and the converse bound.

use log::debug;
use serde::Serialize;

use crate::divergence::binary_kl;
use crate::error::{Error, Result};
use crate::game::{solve_game, GamePayoff, GameSolution, GAME_TOL};
use crate::model::{instance_hypothesis, ClusteringProblem, ProblemInstance, DEFAULT_MATCH_TOL};
use crate::score::{grad_g, ScoreBoard};

/// Floor applied to oracle iterates before gradients are taken.
pub const INTERIOR_FLOOR: f64 = 1e-12;

/// Step-dependent subdifferential radius `r_t = t^{-4/5}`.
pub fn radius(t: u64) -> f64 {
    (t as f64).powf(-0.8)
}

/// Alternatives whose score at `x` is within `r` of the margin
/// `G^{σ̂}(x)`, each with its gradient. Never empty when the problem has an
/// alternative: the minimising alternative always qualifies.
pub fn subdiff_subspace<P: AsRef<[f64]>>(
    arms: &[P],
    x: &[f64],
    r: f64,
    sigma_hat: usize,
    problem: &ClusteringProblem,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let board = ScoreBoard::compute(arms, x, problem);
    subdiff_from_board(arms, x, r, sigma_hat, problem, &board)
}

fn subdiff_from_board<P: AsRef<[f64]>>(
    arms: &[P],
    x: &[f64],
    r: f64,
    sigma_hat: usize,
    problem: &ClusteringProblem,
    board: &ScoreBoard,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let (margin, _) = board.margin(sigma_hat).ok_or(Error::NoAlternative)?;
    let hs = problem.hypotheses();
    Ok(board
        .scores()
        .iter()
        .enumerate()
        .filter(|&(i, &s)| i != sigma_hat && s < margin + r)
        .map(|(i, _)| (i, grad_g(arms, x, &hs[i])))
        .collect())
}

/// Payoff `M[k][σ'] = <e_k - x, ∇g^{σ'}(x)>` for the given gradients.
pub fn build_payoff(x: &[f64], gradients: &[(usize, Vec<f64>)]) -> Result<GamePayoff> {
    let inner: Vec<f64> = gradients
        .iter()
        .map(|(_, g)| g.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect();
    let rows = (0..x.len())
        .map(|k| {
            gradients
                .iter()
                .zip(&inner)
                .map(|((_, g), xg)| g[k] - xg)
                .collect()
        })
        .collect();
    GamePayoff::new(rows, gradients.iter().map(|(i, _)| *i).collect())
}

/// One FW direction: `argmax_{z ∈ Σ_K} min_{h ∈ H} <z - x, h>` over the
/// convex hull `H` of near-active alternative gradients.
pub fn fws_step<P: AsRef<[f64]>>(
    arms: &[P],
    x: &[f64],
    r: f64,
    sigma_hat: usize,
    problem: &ClusteringProblem,
) -> Result<Vec<f64>> {
    Ok(fws_solve(arms, x, r, sigma_hat, problem)?.z)
}

/// Like [`fws_step`] but returns the whole game solution; its value is the
/// FW gap `max_z min_h <z - x, h>`.
pub fn fws_solve<P: AsRef<[f64]>>(
    arms: &[P],
    x: &[f64],
    r: f64,
    sigma_hat: usize,
    problem: &ClusteringProblem,
) -> Result<GameSolution> {
    let gradients = subdiff_subspace(arms, x, r, sigma_hat, problem)?;
    solve_game(&build_payoff(x, &gradients)?, GAME_TOL)
}

/// Settings for [`solve_oracle`].
#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub max_iters: u64,
    pub gap_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            gap_tol: 1e-6,
        }
    }
}

/// Optimal allocation and hardness value of an instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub w_star: Vec<f64>,
    /// `T*(P) = G_P^{σ_P}(w*)`.
    pub t_star: f64,
    pub iterations: u64,
    /// FW gap at the last iterate.
    pub gap: f64,
    /// Index of the true hypothesis in the problem.
    pub sigma: usize,
}

impl OracleResult {
    pub fn hardness(&self) -> f64 {
        1.0 / self.t_star
    }
}

/// Runs noise-free FW iterations on the true instance.
///
/// The iterate is initialised to the uniform allocation as if `K` uniform
/// steps had already been taken, then updated with
/// `x(t) = (1 - 1/t) x(t-1) + z(t)/t` for `t = K+1, K+2, ...`, using the
/// radius `r_t = t^{-4/5}`. The best iterate seen is reported.
pub fn solve_oracle(
    p: &ProblemInstance,
    problem: &ClusteringProblem,
    opts: OracleOptions,
) -> Result<OracleResult> {
    let sigma = instance_hypothesis(p, problem, DEFAULT_MATCH_TOL)?;
    if problem.len() < 2 {
        return Err(Error::NoAlternative);
    }
    let arms = p.arms();
    let k = p.num_arms();
    let mut x = vec![1.0 / k as f64; k];
    let mut best_x = x.clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let start = k as u64;
    for t in (start + 1)..=(start + opts.max_iters) {
        iterations = t - start;
        clamp_interior(&mut x);
        let board = ScoreBoard::compute(arms, &x, problem);
        let (value, _) = board.margin(sigma).expect("at least two hypotheses");
        if value > best_value {
            best_value = value;
            best_x.copy_from_slice(&x);
        }
        let gradients = subdiff_from_board(arms, &x, radius(t), sigma, problem, &board)?;
        let sol = solve_game(&build_payoff(&x, &gradients)?, GAME_TOL)?;
        gap = sol.value;
        let step = 1.0 / t as f64;
        for (xi, zi) in x.iter_mut().zip(&sol.z) {
            *xi = (1.0 - step) * *xi + step * zi;
        }
    }
    Ok(OracleResult {
        w_star: best_x,
        t_star: best_value,
        iterations,
        gap,
        sigma,
    })
}

fn clamp_interior(x: &mut [f64]) {
    if x.iter().any(|&v| v < INTERIOR_FLOOR) {
        debug!("clamping oracle iterate to the interior");
        x.iter_mut().for_each(|v| *v = v.max(INTERIOR_FLOOR));
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
    }
}

/// Converse bound `d(δ || 1-δ) / T*` on the expected stopping time of any
/// δ-correct algorithm.
pub fn lower_bound(delta: f64, t_star: f64) -> f64 {
    binary_kl(delta, 1.0 - delta) / t_star
}

/// The looser form `ln(1/(2.4 δ)) / T*`.
pub fn lower_bound_loose(delta: f64, t_star: f64) -> f64 {
    (1.0 / (2.4 * delta)).ln() / t_star
}
