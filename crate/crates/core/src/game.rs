//! Exact solver for small zero-sum matrix games.
//!
//! The row player picks a mixed strategy `z` over the `K` rows to maximise
//! the worst column payoff `min_j (zᵀM)_j`. After shifting every entry to be
//! at least one, the column player's problem
//!
//! ```text
//!     max  Σ_j q_j   s.t.  M' q <= 1,  q >= 0
//! ```
//!
//! starts from a feasible slack basis, so a single-phase dense simplex with
//! Bland's rule solves it. The row strategy is read off the slack reduced
//! costs of the final tableau.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

/// Default feasibility tolerance for [`solve_game`].
pub const GAME_TOL: f64 = 1e-9;

/// Payoff matrix with `K` rows (arms) and one column per labelled hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct GamePayoff {
    rows: Vec<Vec<f64>>,
    columns: Vec<usize>,
}

impl GamePayoff {
    /// `rows[k][j]` is the payoff of row `k` against column `j`.
    pub fn new(rows: Vec<Vec<f64>>, columns: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || columns.is_empty() {
            return Err(Error::InvalidProblem("payoff matrix is empty".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
            return Err(Error::LengthMismatch {
                expected: columns.len(),
                got: bad.len(),
            });
        }
        for (k, r) in rows.iter().enumerate() {
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinitePayoff { row: k, col: j });
            }
        }
        Ok(Self { rows, columns })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.rows[row][col]
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// `(zᵀM)_j` for every column.
    pub fn column_payoffs(&self, z: &[f64]) -> Vec<f64> {
        (0..self.num_columns())
            .map(|j| z.iter().zip(&self.rows).map(|(zk, r)| zk * r[j]).sum())
            .collect()
    }

    /// `(Mλ)_k` for every row.
    pub fn row_payoffs(&self, lambda: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(lambda).map(|(m, l)| m * l).sum())
            .collect()
    }
}

/// Optimal strategies and the value of a game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    /// Maximising row strategy on the simplex.
    pub z: Vec<f64>,
    /// Minimising column mixture on the simplex (the dual certificate).
    pub column_mix: Vec<f64>,
    /// Game value `max_z min_j (zᵀM)_j`.
    pub value: f64,
    pub pivots: usize,
}

/// Solves `max_{z ∈ Σ_K} min_j (zᵀM)_j` exactly.
pub fn solve_game(payoff: &GamePayoff, tol: f64) -> Result<GameSolution> {
    let k = payoff.num_rows();
    let n = payoff.num_columns();
    let min_entry = payoff
        .rows
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min_entry;

    // Tableau: k constraint rows over n structural + k slack columns, then rhs.
    let width = n + k + 1;
    let rhs = n + k;
    let mut tab = vec![0.0; k * width];
    for row in 0..k {
        let base = row * width;
        for j in 0..n {
            tab[base + j] = payoff.rows[row][j] + shift;
        }
        tab[base + n + row] = 1.0;
        tab[base + rhs] = 1.0;
    }
    // Reduced costs for minimising -Σq, and the current objective.
    let mut cost = vec![0.0; n + k];
    cost[..n].iter_mut().for_each(|c| *c = -1.0);
    let mut objective = 0.0;
    let mut basis: Vec<usize> = (n..n + k).collect();

    let mut pivots = 0usize;
    // Bland: lowest-index improving column.
    while let Some(enter) = (0..n + k).find(|&j| cost[j] < -PIVOT_EPS) {
        // Ratio test; ties go to the lowest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for row in 0..k {
            let a = tab[row * width + enter];
            if a > PIVOT_EPS {
                let ratio = tab[row * width + rhs] / a;
                leave = match leave {
                    None => Some((row, ratio)),
                    Some((r, best)) => {
                        if ratio < best - PIVOT_EPS
                            || (ratio <= best + PIVOT_EPS && basis[row] < basis[r])
                        {
                            Some((row, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        // Bounded: every structural column is strictly positive.
        let (prow, _) = leave.expect("column game is bounded");
        let pbase = prow * width;
        let pivot = tab[pbase + enter];
        for v in &mut tab[pbase..pbase + width] {
            *v /= pivot;
        }
        for row in 0..k {
            if row == prow {
                continue;
            }
            let factor = tab[row * width + enter];
            if factor != 0.0 {
                for col in 0..width {
                    tab[row * width + col] -= factor * tab[pbase + col];
                }
            }
        }
        let factor = cost[enter];
        for col in 0..n + k {
            cost[col] -= factor * tab[pbase + col];
        }
        objective -= factor * tab[pbase + rhs];
        basis[prow] = enter;
        pivots += 1;
    }

    // objective = Σq = 1 / shifted value
    let total_q = objective;
    let mut q = vec![0.0; n];
    for (row, &b) in basis.iter().enumerate() {
        if b < n {
            q[b] = tab[row * width + rhs].max(0.0);
        }
    }
    let mut p: Vec<f64> = (0..k).map(|row| cost[n + row].max(0.0)).collect();
    let p_total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= p_total);
    let q_total: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= q_total);
    let value = 1.0 / total_q - shift;

    debug_assert!(
        payoff
            .column_payoffs(&p)
            .iter()
            .all(|&v| v >= value - tol.max(1e-9) * (1.0 + value.abs())),
        "row strategy infeasible"
    );
    Ok(GameSolution {
        z: p,
        column_mix: q,
        value,
        pivots,
    })
}
