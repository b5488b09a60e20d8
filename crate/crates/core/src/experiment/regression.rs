//! Least-squares slope of mean stopping time against `d(δ || 1-δ)`.

use crate::error::{Error, Result};
use crate::experiment::sweep::SweepRow;

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if xs.len() < 2 || sxx <= 0.0 {
        return Err(Error::InvalidProblem(
            "regression needs at least two distinct x values".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope and intercept of `mean_tau` against `d_bernoulli` over `rows`
/// (normally the rows of one algorithm).
pub fn regress_slope<'a, I>(rows: I) -> Result<(f64, f64)>
where
    I: IntoIterator<Item = &'a SweepRow>,
{
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|r| (r.d_bernoulli, r.mean_tau)).unzip();
    ols(&xs, &ys)
}
