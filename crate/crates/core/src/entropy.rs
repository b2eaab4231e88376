//! Entropy, variance and weighted length of bond vectors, and the lower
//! bounds they satisfy.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use faer::{c64, MatRef};

use crate::graph::{girth, Girth};
use crate::linalg;
use crate::quantum::QuantumGraph;
use crate::scattering::SMatrixKind;
use crate::solver::EigenpairRecord;
use crate::{Error, Result};

/// Shannon entropy (nats) of the distribution `w_b / Σ w`.
pub fn entropy_of_weights(w: &[f64]) -> Result<f64> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::param("entropy of a zero vector is undefined"));
    }
    Ok(w.iter()
        .map(|&x| {
            let p = x / total;
            if p > 0.0 {
                -p * libm::log(p)
            } else {
                0.0
            }
        })
        .sum())
}

/// `S(a) = -Σ p_b ln p_b` with `p_b = |a_b|² / ‖a‖²`.
pub fn entropy(a: &[c64]) -> Result<f64> {
    let w: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    entropy_of_weights(&w)
}

/// Entropy of a real amplitude vector.
pub fn entropy_real(a: &[f64]) -> Result<f64> {
    let w: Vec<f64> = a.iter().map(|x| x * x).collect();
    entropy_of_weights(&w)
}

/// `S(a) / ln B`.
pub fn normalized_entropy(a: &[c64], b: usize) -> Result<f64> {
    if b < 2 {
        return Err(Error::param("normalised entropy needs B >= 2"));
    }
    Ok(entropy(a)? / libm::log(b as f64))
}

fn check_unit(norm_sq: f64) -> Result<()> {
    if (libm::sqrt(norm_sq) - 1.0).abs() > 1e-10 {
        return Err(Error::param(format!("vector norm {} differs from 1", libm::sqrt(norm_sq))));
    }
    Ok(())
}

/// `V(a) = (1/B) Σ (B|a_b|² - 1)²` for a unit vector.
pub fn variance(a: &[c64]) -> Result<f64> {
    let w: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    check_unit(w.iter().sum())?;
    let b = w.len() as f64;
    Ok(w.iter().map(|p| (b * p - 1.0) * (b * p - 1.0)).sum::<f64>() / b)
}

/// `L(a) = (1/L̄) Σ L_b |a_b|²`.
pub fn weighted_length(a: &[c64], bond_lengths: &[f64]) -> f64 {
    let mean = bond_lengths.iter().sum::<f64>() / bond_lengths.len() as f64;
    a.iter().zip(bond_lengths).map(|(z, l)| l * z.norm_sqr()).sum::<f64>() / mean
}

/// `-½ ln max |u^{(t)}_{bb'}|²` and where the maximum sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBound {
    pub value: f64,
    pub max_entry: f64,
    pub argmax: (usize, usize),
}

/// Lower bound on `S(a)` for any eigenvector of `U`, from `U^t`.
pub fn maassen_uffink_bound(u: MatRef<'_, c64>, t: usize) -> UncertaintyBound {
    let ut = linalg::mat_pow(u, t.max(1));
    let mut best = (0.0, (0, 0));
    for i in 0..ut.nrows() {
        for j in 0..ut.ncols() {
            let m = ut[(i, j)].norm_sqr();
            if m > best.0 {
                best = (m, (i, j));
            }
        }
    }
    UncertaintyBound { value: -0.5 * libm::log(best.0), max_entry: best.0, argmax: best.1 }
}

/// One checked lower bound on `S_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord {
    pub name: &'static str,
    /// Lower bound on the normalised entropy, if the bound applies.
    pub threshold: Option<f64>,
    /// `S_N - threshold`.
    pub margin: Option<f64>,
    pub satisfied: bool,
    pub skipped: Option<String>,
}

impl BoundRecord {
    fn checked(name: &'static str, threshold: f64, s_n: f64, slack: f64) -> Self {
        let margin = s_n - threshold;
        BoundRecord { name, threshold: Some(threshold), margin: Some(margin), satisfied: margin >= -slack, skipped: None }
    }

    fn skipped(name: &'static str, reason: impl Into<String>) -> Self {
        BoundRecord { name, threshold: None, margin: None, satisfied: true, skipped: Some(reason.into()) }
    }
}

pub const VARIANCE_BOUND: &str = "variance";
pub const GIRTH_BOUND: &str = "girth";
pub const STAR_BOUND: &str = "equitransmitting_star";
pub const UNCERTAINTY_BOUND: &str = "uncertainty_t1";

/// Allowed round-off below a bound.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub entropy: f64,
    pub normalized_entropy: f64,
    pub variance: f64,
    pub weighted_length: f64,
    pub bounds: Vec<BoundRecord>,
}

impl EntropyReport {
    pub fn all_satisfied(&self) -> bool {
        self.bounds.iter().all(|b| b.satisfied)
    }
}

/// Graph data shared by every eigenvector of one quantum graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundContext {
    /// `g ln d / (4 ln B)` with `t = ⌈g/2⌉`, or why it does not apply.
    pub girth_threshold: core::result::Result<(f64, usize, usize), String>,
    /// `½ ln(B-2) / ln B`, or why it does not apply.
    pub star_threshold: core::result::Result<f64, String>,
    /// `-ln max |u_{bb'}|² / (2 ln B)`.
    pub uncertainty_threshold: f64,
}

impl BoundContext {
    pub fn new(qg: &QuantumGraph) -> Self {
        let b = qg.bond_count();
        let ln_b = libm::log(b as f64);
        let all_et = qg
            .smatrices()
            .iter()
            .all(|s| matches!(s.kind(), SMatrixKind::EquiTransmitting { .. }));
        let girth_threshold = match (qg.graph().regular_degree(), all_et, girth(qg.graph())) {
            (None, _, _) => Err(String::from("graph is not regular")),
            (_, false, _) => Err(String::from("not every vertex is equi-transmitting")),
            (_, _, Girth::Infinite) => Err(String::from("graph has no cycle")),
            (Some(deg), true, Girth::Finite(g)) => {
                let d = deg - 1;
                let t = g.div_ceil(2);
                Ok((g as f64 * libm::log(d as f64) / (4.0 * ln_b), g, t))
            }
        };
        let star_threshold = if is_et_star(qg) {
            Ok(0.5 * libm::log((b - 2) as f64) / ln_b)
        } else {
            Err(String::from("not an equi-transmitting star"))
        };
        let max_m = qg.max_transition_probability();
        BoundContext { girth_threshold, star_threshold, uncertainty_threshold: -libm::log(max_m) / (2.0 * ln_b) }
    }
}

fn is_et_star(qg: &QuantumGraph) -> bool {
    let g = qg.graph();
    let e = g.edge_count();
    e >= 3
        && g.vertex_count() == e + 1
        && g.degree(0) == e
        && matches!(qg.smatrices()[0].kind(), SMatrixKind::EquiTransmitting { .. })
}

/// Diagnostics of one eigenvector and every applicable lower bound.
pub fn verify_bounds(record: &EigenpairRecord, qg: &QuantumGraph, ctx: &BoundContext) -> Result<EntropyReport> {
    let b = qg.bond_count();
    let s = entropy(&record.a)?;
    let s_n = s / libm::log(b as f64);
    let v = variance(&record.a)?;
    let l = weighted_length(&record.a, qg.bond_lengths());
    let mut bounds = Vec::with_capacity(4);
    bounds.push(BoundRecord::checked(VARIANCE_BOUND, 1.0 - v / libm::log(b as f64), s_n, BOUND_SLACK));
    bounds.push(match &ctx.girth_threshold {
        Ok((th, _, _)) => BoundRecord::checked(GIRTH_BOUND, *th, s_n, BOUND_SLACK),
        Err(why) => BoundRecord::skipped(GIRTH_BOUND, why.clone()),
    });
    bounds.push(match &ctx.star_threshold {
        Ok(th) => BoundRecord::checked(STAR_BOUND, *th, s_n, BOUND_SLACK),
        Err(why) => BoundRecord::skipped(STAR_BOUND, why.clone()),
    });
    bounds.push(BoundRecord::checked(UNCERTAINTY_BOUND, ctx.uncertainty_threshold, s_n, BOUND_SLACK));
    Ok(EntropyReport { entropy: s, normalized_entropy: s_n, variance: v, weighted_length: l, bounds })
}

/// `|⟨a, DLa⟩|² / ⟨a, La⟩` for one eigenvector.
pub fn ergodicity_term(a: &[c64], d: &[f64], bond_lengths: &[f64]) -> f64 {
    let mut dl = 0.0;
    let mut l = 0.0;
    for ((z, &db), &lb) in a.iter().zip(d).zip(bond_lengths) {
        let p = z.norm_sqr();
        dl += db * lb * p;
        l += lb * p;
    }
    dl * dl / l
}

/// Spectral average of [`ergodicity_term`] over at least 100 eigenvectors.
///
/// `d` must have zero length-weighted mean.
pub fn quantum_ergodicity_functional(records: &[EigenpairRecord], d: &[f64], bond_lengths: &[f64]) -> Result<f64> {
    if records.len() < 100 {
        return Err(Error::param(format!("need at least 100 eigenvectors, got {}", records.len())));
    }
    if d.len() != bond_lengths.len() {
        return Err(Error::param("test matrix and length vector differ in size"));
    }
    let l_tot: f64 = bond_lengths.iter().sum();
    let d_bar = d.iter().zip(bond_lengths).map(|(x, l)| x * l).sum::<f64>() / l_tot;
    if d_bar.abs() > 1e-12 {
        return Err(Error::param(format!("weighted mean of D is {d_bar:e}, must vanish")));
    }
    Ok(records.iter().map(|r| ergodicity_term(&r.a, d, bond_lengths)).sum::<f64>() / records.len() as f64)
}
