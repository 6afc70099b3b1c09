//! Small statistics kit: quantiles, least squares, bootstrap.

use rand::Rng;

use crate::error::{Error, Result};

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn quantile(data: &[f64], p: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InsufficientData("quantile of an empty sample".into()));
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&v, p))
}

pub fn mean(data: &[f64]) -> f64 {
    data.iter().sum::<f64>() / data.len() as f64
}

/// Unbiased sample variance.
pub fn variance(data: &[f64]) -> f64 {
    let m = mean(data);
    data.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (data.len() as f64 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope from the residual scatter; zero for two points.
    pub slope_se: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("ols: {} abscissae vs {} ordinates", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("ols needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("ols: all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    let slope_se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LineFit { slope, intercept, r_squared, slope_se })
}

/// OLS slope together with its standard error propagated from known,
/// independent per-point standard errors of `y`.
pub fn ols_slope_with_point_errors(x: &[f64], y: &[f64], y_se: &[f64]) -> Result<(f64, f64)> {
    let fit = ols(x, y)?;
    if y_se.len() != x.len() {
        return Err(Error::Shape("per-point errors do not match the data".into()));
    }
    let mx = mean(x);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    // slope = Σ w_i y_i with w_i = (x_i - mx) / sxx
    let var: f64 = x.iter().zip(y_se).map(|(a, s)| ((a - mx) / sxx).powi(2) * s * s).sum();
    Ok((fit.slope, var.sqrt()))
}

/// Bootstrap standard error of `stat` over resamples of `data`.
pub fn bootstrap_se<R: Rng, F: Fn(&[f64]) -> f64>(data: &[f64], resamples: usize, rng: &mut R, stat: F) -> f64 {
    let n = data.len();
    let mut buf = vec![0.0; n];
    let values: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = data[rng.random_range(0..n)];
            }
            stat(&buf)
        })
        .collect();
    variance(&values).sqrt()
}

/// OLS slope of an autocorrelated series with its moving-block bootstrap
/// standard error: residual blocks of length `block` are redrawn with
/// replacement around the fitted line and the slope refitted.
pub fn block_bootstrap_slope<R: Rng>(
    x: &[f64],
    y: &[f64],
    block: usize,
    resamples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let fit = ols(x, y)?;
    let n = x.len();
    if block == 0 || block > n || resamples < 2 {
        return Err(Error::InsufficientData(format!("block {block} and {resamples} resamples for {n} points")));
    }
    let resid: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - fit.intercept - fit.slope * a).collect();
    let mut yb = vec![0.0; n];
    let mut slopes = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut i = 0;
        while i < n {
            let start = rng.random_range(0..=n - block);
            for k in 0..block.min(n - i) {
                yb[i + k] = fit.intercept + fit.slope * x[i + k] + resid[start + k];
            }
            i += block;
        }
        slopes.push(ols(x, &yb)?.slope);
    }
    Ok((fit.slope, variance(&slopes).sqrt()))
}
