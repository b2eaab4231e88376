//! Monte-Carlo moments of `U(k)^t` over random edge lengths.

use alloc::vec;
use alloc::vec::Vec;

use faer::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeLengths, Graph, LengthDistribution};
use crate::linalg;
use crate::quantum::{bond_scattering_matrix, QuantumGraph};
use crate::scattering::VertexSMatrix;
use crate::{Error, Result};

/// Sample moments of `u^{(t)}_{bb'}`, row-major over bond pairs `(b, b')`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtMoments {
    pub bond_count: usize,
    pub trials: usize,
    /// `E u^{(t)}`.
    pub mean: Vec<c64>,
    /// `|E u^{(t)}|`.
    pub mean_abs: Vec<f64>,
    /// Standard error of the sample mean (per complex entry, modulus scale).
    pub mean_std_err: Vec<f64>,
    /// `E |u^{(t)}|²`.
    pub mean_sq: Vec<f64>,
    pub mean_sq_std_err: Vec<f64>,
}

impl UtMoments {
    #[inline]
    pub fn at(&self, b: usize, b2: usize) -> usize {
        b * self.bond_count + b2
    }
}

/// Averages `U(k)^t` over `trials` independent length draws.
pub fn monte_carlo_ut_moments(
    graph: &Graph,
    smatrices: &[VertexSMatrix],
    distribution: LengthDistribution,
    k: f64,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<UtMoments> {
    if trials < 100 {
        return Err(Error::param("at least 100 trials are required"));
    }
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    distribution.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = graph.edge_count();
    let n = 2 * e;
    let mut sum = vec![c64::new(0.0, 0.0); n * n];
    let mut sum_abs2 = vec![0.0; n * n];
    let mut sum_abs4 = vec![0.0; n * n];
    for _ in 0..trials {
        let lengths = EdgeLengths::new((0..e).map(|_| distribution.sample(&mut rng)).collect())?;
        let qg = QuantumGraph::with_smatrices(graph.clone(), lengths, smatrices.to_vec())?;
        let u = bond_scattering_matrix(&qg, k);
        let ut = linalg::mat_pow(u.entries.as_ref(), t);
        for b in 0..n {
            for b2 in 0..n {
                let z = ut[(b, b2)];
                let i = b * n + b2;
                let p = z.norm_sqr();
                sum[i] += z;
                sum_abs2[i] += p;
                sum_abs4[i] += p * p;
            }
        }
    }
    let m = trials as f64;
    let mean: Vec<c64> = sum.iter().map(|z| z / m).collect();
    let mean_abs = mean.iter().map(|z| z.norm()).collect();
    let mean_sq: Vec<f64> = sum_abs2.iter().map(|s| s / m).collect();
    let mean_std_err = (0..n * n)
        .map(|i| libm::sqrt(((mean_sq[i] - mean[i].norm_sqr()) / (m - 1.0)).max(0.0)))
        .collect();
    let mean_sq_std_err = (0..n * n)
        .map(|i| libm::sqrt(((sum_abs4[i] / m - mean_sq[i] * mean_sq[i]) / (m - 1.0)).max(0.0)))
        .collect();
    Ok(UtMoments { bond_count: n, trials, mean, mean_abs, mean_std_err, mean_sq, mean_sq_std_err })
}

/// `N_t f(k)^g d^{-t/2}`, bound on `|E u^{(t)}_{bb'}|` for `t ≥ g`.
pub fn path_mean_bound(n_t: u64, envelope: f64, girth: usize, d: usize, t: usize) -> f64 {
    n_t as f64 * libm::pow(envelope, girth as f64) / libm::pow(d as f64, t as f64 / 2.0)
}

/// `(N_t / d^t)(1 + N_t f(k)^g)`, bound on `E |u^{(t)}_{bb'}|²` for `t ≥ g`.
pub fn path_second_moment_bound(n_t: u64, envelope: f64, girth: usize, d: usize, t: usize) -> f64 {
    let n = n_t as f64;
    n / libm::pow(d as f64, t as f64) * (1.0 + n * libm::pow(envelope, girth as f64))
}

/// `(d^t/|G|)(1 + |G| μ^t)`, bound on `N_t(b, b')` for a `(d+1)`-regular graph.
pub fn path_count_bound(d: usize, t: usize, vertex_count: usize, mu: f64) -> f64 {
    let g = vertex_count as f64;
    libm::pow(d as f64, t as f64) / g * (1.0 + g * libm::pow(mu, t as f64))
}
