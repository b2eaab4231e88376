//! Least-squares fit of `f(B) = 1 - α B^β / ln B` to mean entropies.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyFit {
    pub alpha: f64,
    pub beta: f64,
    pub residual_sum_squares: f64,
    pub iterations: usize,
}

pub fn model(alpha: f64, beta: f64, b: f64) -> f64 {
    1.0 - alpha * b.powf(beta) / b.ln()
}

fn rss(points: &[(f64, f64)], alpha: f64, beta: f64) -> f64 {
    points.iter().map(|&(b, y)| (y - model(alpha, beta, b)).powi(2)).sum()
}

/// Start from the log-linear fit of `ln((1 - y) ln B) = ln α + β ln B`,
/// then Levenberg–Marquardt on the untransformed residuals.
pub fn fit_entropy_model(points: &[(f64, f64)]) -> Result<EntropyFit> {
    let usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(b, y)| b > 1.0 && y < 1.0).collect();
    let mut xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(Error::Config("the fit needs two distinct B with mean entropy below 1".into()));
    }
    let n = usable.len() as f64;
    let lx: Vec<f64> = usable.iter().map(|&(b, _)| b.ln()).collect();
    let lz: Vec<f64> = usable.iter().map(|&(b, y)| ((1.0 - y) * b.ln()).ln()).collect();
    let (mx, mz) = (lx.iter().sum::<f64>() / n, lz.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxz: f64 = lx.iter().zip(&lz).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let mut beta = sxz / sxx;
    let mut alpha = (mz - beta * mx).exp();

    let mut lambda = 1e-3;
    let mut cur = rss(points, alpha, beta);
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        // J^T J and J^T r for r = y - f
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(b, y) in points {
            let p = b.powf(beta);
            let j1 = -p / b.ln();
            let j2 = -alpha * p;
            let r = y - model(alpha, beta, b);
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        let mut improved = false;
        for _ in 0..30 {
            let (d11, d22) = (a11 * (1.0 + lambda), a22 * (1.0 + lambda));
            let det = d11 * d22 - a12 * a12;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let da = (d22 * g1 - a12 * g2) / det;
            let db = (d11 * g2 - a12 * g1) / det;
            let next = rss(points, alpha + da, beta + db);
            if next.is_finite() && next <= cur {
                let step = da.abs() / alpha.abs().max(1e-300) + db.abs();
                alpha += da;
                beta += db;
                lambda = (lambda / 10.0).max(1e-12);
                improved = cur - next > 1e-16 * cur.max(1e-300) || step > 1e-12;
                cur = next;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(EntropyFit { alpha, beta, residual_sum_squares: cur, iterations })
}
