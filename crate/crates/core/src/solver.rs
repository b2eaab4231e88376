//! Eigenvalues `k_n` of a quantum graph: the wavenumbers where `U(k)` has
//! eigenvalue `1`.
//!
//! Every eigenphase of `U(k) = Σ D(k)` increases with `k` at speed
//! `⟨a, L a⟩ ∈ [L_min, L_max]`, and `det U(k) = det Σ · e^{2ik L_tot}`.
//! Lifting the phases therefore gives the exact number of wraps through
//! `0 ≡ 2π` between two wavenumbers:
//!
//! ```text
//! C(k_a, k_b) = (2 L_tot (k_b - k_a) - Σθ(k_b) + Σθ(k_a)) / 2π,   θ ∈ [0, 2π).
//! ```
//!
//! The scan evaluates the phases on a grid, checks that `C` is an integer
//! and that the sorted phases can be matched with displacements inside the
//! velocity bounds, then refines each crossing by Newton iteration on the
//! tracked eigenphase with inverse iteration for the eigenvector. Intervals
//! where tracking fails or several phases cross are split by counting
//! until the crossings separate or the interval is narrower than `10·tol`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use faer::{c64, MatRef};

use crate::linalg::{self, cis, phase, wrap_signed};
use crate::quantum::{bond_scattering_matrix, phase_velocity, QuantumGraph};
use crate::{Error, Result};

/// Phases this close below `2π` at `k = 0` are read as `0`.
const ZERO_PHASE_SLACK: f64 = 1e-9;
/// Allowed distance of the crossing count from an integer.
const COUNT_SLACK: f64 = 1e-6;
/// Allowed excess of a matched phase displacement over the velocity bounds.
const MATCH_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Root tolerance in `k`.
    pub tol: f64,
    /// How often a grid cell may be halved when the phase matching fails.
    pub max_halvings: usize,
    /// Grid step; defaults to `π / (2 max(2 L_max, L_tot))`.
    pub step: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_halvings: 10, step: None }
    }
}

/// One eigenvalue with its bond eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenpairRecord {
    /// Position `n` in the spectrum, counted from 1 and excluding `k = 0`.
    pub index: usize,
    pub k: f64,
    /// Unit vector with `U(k) a ≈ a`.
    pub a: Vec<c64>,
    /// `‖U(k) a - a‖`.
    pub residual: f64,
    /// Number of eigenphases that crossed within `10·tol`.
    pub multiplicity: usize,
}

/// Default grid step for `qg`.
pub fn default_step(qg: &QuantumGraph) -> f64 {
    let l = qg.lengths();
    PI / (2.0 * (2.0 * l.max()).max(l.total()))
}

struct Sample {
    k: f64,
    phases: Vec<f64>,
    sum: f64,
}

struct Scanner<'a> {
    qg: &'a QuantumGraph,
    two_l_tot: f64,
    l_min: f64,
    l_max: f64,
    tol: f64,
    start: Vec<c64>,
}

impl<'a> Scanner<'a> {
    fn new(qg: &'a QuantumGraph, tol: f64) -> Self {
        let l = qg.lengths();
        let b = qg.bond_count();
        // fixed, generic start vector for inverse iteration
        let start = (0..b).map(|j| cis(j as f64 * 2.399_963_229_728_653)).collect();
        Scanner { qg, two_l_tot: 2.0 * l.total(), l_min: l.min(), l_max: l.max(), tol, start }
    }

    fn sample(&self, k: f64) -> Result<Sample> {
        let u = bond_scattering_matrix(self.qg, k);
        let eig = linalg::eigenvalues(u.entries.as_ref())
            .map_err(|_| Error::numerical(k, "eigenvalue iteration for U(k) did not converge"))?;
        let mut phases: Vec<f64> = eig.into_iter().map(phase).collect();
        if k == 0.0 {
            for p in &mut phases {
                if *p > TAU - ZERO_PHASE_SLACK {
                    *p = 0.0;
                }
            }
        }
        phases.sort_by(f64::total_cmp);
        let sum = phases.iter().sum();
        Ok(Sample { k, phases, sum })
    }

    /// Exact crossing count, or `None` when it is not an integer.
    fn count(&self, a: &Sample, b: &Sample) -> Option<usize> {
        let c = (self.two_l_tot * (b.k - a.k) - b.sum + a.sum) / TAU;
        let r = libm::round(c);
        (r >= 0.0 && (c - r).abs() < COUNT_SLACK).then_some(r as usize)
    }

    /// Whether the sorted phases at `a` and `b` admit a matching with `c`
    /// wraps whose displacements respect the velocity bounds.
    fn matching_ok(&self, a: &Sample, b: &Sample, c: usize) -> bool {
        let n = a.phases.len();
        if c > n {
            return false;
        }
        let h = b.k - a.k;
        let (lo, hi) = (self.l_min * h - MATCH_SLACK, self.l_max * h + MATCH_SLACK);
        (0..n).all(|i| {
            let j = (i + c) % n;
            let lifted = b.phases[j] + if i + c >= n { TAU } else { 0.0 };
            let d = lifted - a.phases[i];
            d >= lo && d <= hi
        })
    }

    fn eigenvector_near_one(&self, k: f64) -> Result<(Vec<c64>, f64)> {
        let u = bond_scattering_matrix(self.qg, k);
        let r = linalg::inverse_iteration(u.entries.as_ref(), c64::new(1.0, 0.0), &self.start, 30)
            .map_err(|_| Error::numerical(k, "inverse iteration failed"))?;
        let res = self.qg.residual(k, &r.vector);
        Ok((r.vector, res))
    }

    /// Newton iteration on the phase that is highest at `a.k`; `None` if the
    /// tracked eigenvector is lost.
    fn track(&self, a: &Sample, kb: f64) -> Option<(f64, Vec<c64>)> {
        let top = *a.phases.last()?;
        let u = bond_scattering_matrix(self.qg, a.k);
        let first = linalg::inverse_iteration(u.entries.as_ref(), cis(top), &self.start, 30).ok()?;
        if (phase(first.eigenvalue) - top).abs() > 1e-6 {
            return None;
        }
        let mut vec_a = first.vector;
        let mut k = a.k;
        let mut theta = phase(first.eigenvalue);
        let mut delta = wrap_signed(theta);
        let (mut lo, mut hi) = (a.k, kb);
        if delta >= 0.0 {
            return None;
        }
        for _ in 0..80 {
            let v = phase_velocity(self.qg, &vec_a);
            if delta < 0.0 {
                lo = lo.max(k);
            } else {
                hi = hi.min(k);
            }
            if hi - lo < 0.1 * self.tol || (delta.abs() / v) < 0.1 * self.tol {
                return Some((k, vec_a));
            }
            let mut k_new = k - delta / v;
            if !(k_new > lo && k_new < hi) {
                k_new = 0.5 * (lo + hi);
            }
            let predicted = theta + v * (k_new - k);
            let u = bond_scattering_matrix(self.qg, k_new);
            let next = linalg::inverse_iteration(u.entries.as_ref(), cis(predicted), &vec_a, 8).ok()?;
            if linalg::inner(&vec_a, &next.vector).norm() < 0.5 {
                return None;
            }
            k = k_new;
            vec_a = next.vector;
            theta = phase(next.eigenvalue);
            delta = wrap_signed(theta);
        }
        None
    }

    /// Roots in `(a.k, b.k]` given their number `c`.
    fn resolve(&self, a: &Sample, b: &Sample, c: usize, out: &mut Vec<(f64, usize, Vec<c64>)>) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let width = b.k - a.k;
        if c == 1 {
            if let Some((k, v)) = self.track(a, b.k) {
                out.push((k, 1, v));
                return Ok(());
            }
            if width < self.tol {
                let k = 0.5 * (a.k + b.k);
                let (v, _) = self.eigenvector_near_one(k)?;
                out.push((k, 1, v));
                return Ok(());
            }
        } else if width < 10.0 * self.tol {
            let k = 0.5 * (a.k + b.k);
            let (v, _) = self.eigenvector_near_one(k)?;
            out.push((k, c, v));
            return Ok(());
        }
        let mid = self.sample(0.5 * (a.k + b.k))?;
        let left = self
            .count(a, &mid)
            .filter(|&l| l <= c)
            .ok_or_else(|| Error::numerical(mid.k, "crossing count is not an integer"))?;
        self.resolve(a, &mid, left, out)?;
        self.resolve(&mid, b, c - left, out)
    }

    /// Checks the cell `(a, b]`, halving it on failure, and resolves its roots.
    fn cell(&self, a: &Sample, b: &Sample, depth: usize, max_depth: usize, out: &mut Vec<(f64, usize, Vec<c64>)>) -> Result<()> {
        match self.count(a, b) {
            Some(c) if self.matching_ok(a, b, c) => self.resolve(a, b, c, out),
            _ if depth < max_depth => {
                let mid = self.sample(0.5 * (a.k + b.k))?;
                self.cell(a, &mid, depth + 1, max_depth, out)?;
                self.cell(&mid, b, depth + 1, max_depth, out)
            }
            _ => Err(Error::numerical(
                a.k,
                "eigenphase matching failed after the maximum number of step halvings",
            )),
        }
    }
}

fn validate_window(k_min: f64, k_max: f64, opts: &SolverOptions) -> Result<()> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(Error::param("need 0 < k_min < k_max"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::param("solver tolerance must be positive"));
    }
    if let Some(s) = opts.step {
        if !(s > 0.0) {
            return Err(Error::param("grid step must be positive"));
        }
    }
    Ok(())
}

/// Number of eigenvalues in `(0, k]`, counted with multiplicity.
pub fn counting_function(qg: &QuantumGraph, k: f64) -> Result<usize> {
    if k <= 0.0 {
        return Ok(0);
    }
    let s = Scanner::new(qg, 1e-10);
    let zero = s.sample(0.0)?;
    let end = s.sample(k)?;
    s.count(&zero, &end)
        .ok_or_else(|| Error::numerical(k, "crossing count is not an integer"))
}

/// All eigenvalues in `[k_min, k_max]`, ascending, merged within `10·tol`.
pub fn find_eigenvalues(
    qg: &QuantumGraph,
    k_min: f64,
    k_max: f64,
    opts: &SolverOptions,
) -> Result<Vec<EigenpairRecord>> {
    validate_window(k_min, k_max, opts)?;
    let scanner = Scanner::new(qg, opts.tol);
    let step = opts.step.unwrap_or_else(|| default_step(qg));
    let cells = libm::ceil((k_max - k_min) / step).max(1.0) as usize;
    let h = (k_max - k_min) / cells as f64;

    // a root exactly at k_min belongs to the cell ending there
    let k_start = (k_min - 10.0 * opts.tol).max(0.0);
    let zero = scanner.sample(0.0)?;
    let mut prev = scanner.sample(k_start)?;
    let before = scanner
        .count(&zero, &prev)
        .ok_or_else(|| Error::numerical(k_start, "crossing count from k = 0 is not an integer"))?;

    let mut raw: Vec<(f64, usize, Vec<c64>)> = Vec::new();
    for i in 1..=cells {
        let k = if i == cells { k_max } else { k_min + h * i as f64 };
        let next = scanner.sample(k)?;
        scanner.cell(&prev, &next, 0, opts.max_halvings, &mut raw)?;
        prev = next;
    }
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut merged: Vec<(f64, usize, Vec<c64>)> = Vec::new();
    let mut below = before;
    for (k, m, v) in raw {
        match merged.last_mut() {
            Some(last) if k - last.0 < 10.0 * opts.tol => last.1 += m,
            _ => merged.push((k, m, v)),
        }
    }
    let mut records = Vec::with_capacity(merged.len());
    for (k, m, a) in merged {
        let index = below + 1;
        below += m;
        if k < k_min - 10.0 * opts.tol || k > k_max {
            continue;
        }
        let residual = qg.residual(k, &a);
        records.push(EigenpairRecord { index, k, a, residual, multiplicity: m });
    }
    Ok(records)
}

/// Sorted eigenphases of `u` with their unit eigenvectors.
pub fn phases_of(u: MatRef<'_, c64>) -> Result<Vec<(f64, Vec<c64>)>> {
    let mut v: Vec<(f64, Vec<c64>)> =
        linalg::eigenpairs(u)?.into_iter().map(|(z, a)| (phase(z), a)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(v)
}

/// Unit eigenvector of `U(k)` for the eigenvalue nearest `1`, with its residual.
pub fn eigenvector_at(qg: &QuantumGraph, k: f64) -> Result<(Vec<c64>, f64)> {
    Scanner::new(qg, 1e-10).eigenvector_near_one(k)
}

/// Merges root lists from adjacent windows, dropping duplicates within `10·tol`.
pub fn merge_windows(mut parts: Vec<Vec<EigenpairRecord>>, tol: f64) -> Vec<EigenpairRecord> {
    let mut all: Vec<EigenpairRecord> = parts.drain(..).flatten().collect();
    all.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut out: Vec<EigenpairRecord> = Vec::with_capacity(all.len());
    for r in all {
        match out.last() {
            Some(last) if r.k - last.k < 10.0 * tol => {}
            _ => out.push(r),
        }
    }
    out
}
