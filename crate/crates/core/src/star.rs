//! Star graphs with Neumann conditions at the leaves.
//!
//! On edge `e` an eigenfunction reads `ψ_e(x) = A_e cos(k(x - L_e))` with
//! `x = 0` at the centre. For a Neumann centre the eigenvalues are the
//! roots of `s(k) = Σ_e tan(kL_e)` and `|A_e|² ∝ sec²(kL_e)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use faer::{c64, Mat};

use crate::constants::EULER_GAMMA;
use crate::entropy::{entropy, entropy_of_weights};
use crate::graph::{star_graph, EdgeLengths};
use crate::linalg::cis;
use crate::quadrature::integrate;
use crate::quantum::QuantumGraph;
use crate::scattering::{Boundary, VertexSMatrix};
use crate::solver::{self, find_eigenvalues, SolverOptions};
use crate::{Error, Result};

/// Pole intervals narrower than this go to the general solver.
pub const POLE_GAP: f64 = 1e-12;
/// `|cos(kL_e)|` below this counts as sitting on a pole.
pub const POLE_PROXIMITY: f64 = 1e-8;

/// Neumann star with the given edge lengths (edge `e` joins `0` and `e + 1`).
pub fn neumann_star(lengths: &[f64]) -> Result<QuantumGraph> {
    star_with_centre(lengths, Boundary::Neumann)
}

/// Star with the given centre condition and Neumann leaves.
pub fn star_with_centre(lengths: &[f64], centre: Boundary) -> Result<QuantumGraph> {
    let g = star_graph(lengths.len())?;
    let mut s = vec![centre.for_degree(lengths.len())?];
    s.extend((0..lengths.len()).map(|_| Boundary::Neumann.for_degree(1)).collect::<Result<Vec<_>>>()?);
    QuantumGraph::with_smatrices(g, EdgeLengths::new(lengths.to_vec())?, s)
}

/// `Σ_e tan(kL_e)`.
pub fn secular_tan_sum(k: f64, lengths: &[f64]) -> f64 {
    lengths.iter().map(|&l| libm::tan(k * l)).sum()
}

fn secular_tan_derivative(k: f64, lengths: &[f64]) -> f64 {
    lengths
        .iter()
        .map(|&l| {
            let c = libm::cos(k * l);
            l / (c * c)
        })
        .sum()
}

/// Roots of [`secular_tan_sum`] in a window.
#[derive(Debug, Clone, PartialEq)]
pub struct StarRoots {
    /// Ascending, repeated according to multiplicity.
    pub roots: Vec<f64>,
    /// Number of sub-windows handed to the general solver because poles of
    /// different edges coincided.
    pub fallback_windows: usize,
}

/// Root of an increasing function on `(lo, hi)` by safeguarded Newton steps.
fn monotone_root(lengths: &[f64], mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut k = 0.5 * (lo + hi);
    for _ in 0..200 {
        let s = secular_tan_sum(k, lengths);
        if s < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let ds = secular_tan_derivative(k, lengths);
        let mut next = k - s / ds;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - k).abs();
        k = next;
        if step < 0.1 * tol || hi - lo < tol {
            break;
        }
    }
    k
}

/// Roots of `Σ tan(kL_e)` in `[k_min, k_max]`.
///
/// Between consecutive poles `(m + ½)π/L_e` the sum increases from `-∞`
/// to `+∞`, so each pole interval holds exactly one root. Coinciding poles
/// of different edges are resolved with the general `U(k)` solver.
pub fn star_secular_roots_neumann(lengths: &[f64], k_min: f64, k_max: f64, tol: f64) -> Result<StarRoots> {
    if !(tol > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    if !(k_min > 0.0 && k_max > k_min) {
        return Err(Error::param("need 0 < k_min < k_max"));
    }
    EdgeLengths::new(lengths.to_vec())?;

    let mut poles = Vec::new();
    for &l in lengths {
        let mut m = libm::ceil(k_min * l / PI - 0.5).max(0.0);
        loop {
            let p = (m + 0.5) * PI / l;
            if p > k_max {
                break;
            }
            if p > k_min {
                poles.push(p);
            }
            m += 1.0;
        }
    }
    poles.sort_by(f64::total_cmp);

    // clusters of coinciding poles: (position, number of poles)
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for p in poles {
        match clusters.last_mut() {
            Some(last) if p - last.0 < POLE_GAP => last.1 += 1,
            _ => clusters.push((p, 1)),
        }
    }
    let mut bounds = vec![k_min];
    bounds.extend(clusters.iter().map(|c| c.0));
    bounds.push(k_max);
    let n_int = bounds.len() - 1;
    let degenerate = |c: usize| clusters.get(c).is_some_and(|x| x.1 > 1);
    // interval j lies between cluster j-1 and cluster j
    let flagged: Vec<bool> = (0..n_int).map(|j| (j > 0 && degenerate(j - 1)) || degenerate(j)).collect();

    let mut roots = Vec::new();
    let mut fallback_windows = 0;
    let mut j = 0;
    while j < n_int {
        if flagged[j] {
            let start = j;
            while j + 1 < n_int && flagged[j + 1] {
                j += 1;
            }
            let (lo, hi) = (bounds[start], bounds[j + 1]);
            let qg = neumann_star(lengths)?;
            let opts = SolverOptions { tol, ..SolverOptions::default() };
            for r in find_eigenvalues(&qg, lo, hi, &opts)? {
                if r.k > lo {
                    roots.extend(core::iter::repeat_n(r.k, r.multiplicity));
                }
            }
            fallback_windows += 1;
            j += 1;
            continue;
        }
        let (lo, hi) = (bounds[j], bounds[j + 1]);
        let left_is_pole = j > 0;
        let right_is_pole = j + 1 < n_int;
        let has_root = match (left_is_pole, right_is_pole) {
            (true, true) => true,
            (false, true) => secular_tan_sum(lo, lengths) < 0.0,
            (true, false) => secular_tan_sum(hi, lengths) >= 0.0,
            (false, false) => secular_tan_sum(lo, lengths) < 0.0 && secular_tan_sum(hi, lengths) >= 0.0,
        };
        if has_root {
            roots.push(monotone_root(lengths, lo, hi, tol));
        }
        j += 1;
    }
    roots.sort_by(f64::total_cmp);
    Ok(StarRoots { roots, fallback_windows })
}

/// The first `n` positive roots of `Σ tan(kL_e)`.
pub fn first_star_roots(lengths: &[f64], n: usize, tol: f64) -> Result<Vec<f64>> {
    let l_tot: f64 = lengths.iter().sum();
    let l_max = lengths.iter().copied().fold(0.0, f64::max);
    // nothing below the first root, which exceeds the first pole π/(2 L_max)
    let k_min = 0.25 * PI / l_max;
    let mut k_max = (n as f64 + lengths.len() as f64 + 2.0) * PI / l_tot * 1.05;
    let mut found = 0;
    for _ in 0..30 {
        let r = star_secular_roots_neumann(lengths, k_min, k_max, tol)?;
        if r.roots.len() >= n {
            return Ok(r.roots[..n].to_vec());
        }
        found = r.roots.len();
        k_max *= 1.25;
    }
    Err(Error::InsufficientRoots { found, needed: n })
}

/// Unit amplitudes `A_e ∝ sec(kL_e)`.
pub fn star_amplitudes(k: f64, lengths: &[f64]) -> Result<Vec<f64>> {
    let mut a = Vec::with_capacity(lengths.len());
    for (e, &l) in lengths.iter().enumerate() {
        let c = libm::cos(k * l);
        if c.abs() < POLE_PROXIMITY {
            return Err(Error::PoleProximity { k, edge: e, distance: c.abs() });
        }
        a.push(1.0 / c);
    }
    let n = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    a.iter_mut().for_each(|x| *x /= n);
    Ok(a)
}

/// Unit bond vector of a star eigenfunction in the bond layout of
/// [`neumann_star`]: `a_[0,e] = A_e e^{-ikL_e}/√2`, `a_[e,0] = A_e/√2`.
pub fn star_bond_vector(k: f64, amplitudes: &[f64], lengths: &[f64]) -> Vec<c64> {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    amplitudes
        .iter()
        .zip(lengths)
        .flat_map(|(&a, &l)| [cis(-k * l) * (a * r), c64::new(a * r, 0.0)])
        .collect()
}

/// `σ_k = e^{ikL} σ_0 e^{ikL}`.
pub fn sigma_k_matrix(sigma0: &VertexSMatrix, k: f64, lengths: &[f64]) -> Result<Mat<c64>> {
    let n = sigma0.degree();
    if lengths.len() != n {
        return Err(Error::param("σ_0 dimension and number of lengths differ"));
    }
    Ok(Mat::from_fn(n, n, |i, j| cis(k * lengths[i]) * sigma0.get(i, j) * cis(k * lengths[j])))
}

/// One Neumann-star eigenvalue with its amplitude statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSpectrumRecord {
    pub index: usize,
    pub k: f64,
    /// Unit amplitudes; moduli only when the general solver supplied them.
    pub amplitudes: Vec<f64>,
    /// `S_N(A)`, normalised by `ln |E|`.
    pub s_amplitudes: f64,
    /// `S_N(a)`, normalised by `ln 2|E|`.
    pub s_bonds: f64,
    /// `L(A) = (1/L̄) Σ L_e A_e²`.
    pub weighted_length: f64,
}

/// Largest `‖U(k)a - a‖` accepted from the `sec(kL_e)` formula.
///
/// Near-coincident poles of two edges put `kL_e` within a few ulps of a
/// pole, where the formula loses accuracy.
pub const STAR_RESIDUAL_TOL: f64 = 1e-10;

/// Bond eigenvector of a Neumann star at a root `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarEigenvector {
    /// Unit amplitudes; `|A_e|² = |a_[0,e]|² + |a_[e,0]|²` when `general`.
    pub amplitudes: Vec<f64>,
    pub bond: Vec<c64>,
    pub residual: f64,
    /// Taken from the general `U(k)` eigensolver.
    pub general: bool,
}

/// `sec(kL_e)` amplitudes, or the general eigenvector when they are inaccurate.
pub fn star_eigenvector(k: f64, lengths: &[f64], qg: &QuantumGraph) -> Result<StarEigenvector> {
    match star_amplitudes(k, lengths) {
        Ok(amplitudes) => {
            let bond = star_bond_vector(k, &amplitudes, lengths);
            let residual = qg.residual(k, &bond);
            if residual <= STAR_RESIDUAL_TOL {
                return Ok(StarEigenvector { amplitudes, bond, residual, general: false });
            }
        }
        Err(Error::PoleProximity { .. }) => {}
        Err(e) => return Err(e),
    }
    let (bond, residual) = solver::eigenvector_at(qg, k)?;
    let amplitudes = (0..lengths.len())
        .map(|e| libm::sqrt(bond[2 * e].norm_sqr() + bond[2 * e + 1].norm_sqr()))
        .collect();
    Ok(StarEigenvector { amplitudes, bond, residual, general: true })
}

fn record_at(index: usize, k: f64, lengths: &[f64], qg: &QuantumGraph) -> Result<StarSpectrumRecord> {
    let v = star_eigenvector(k, lengths, qg)?;
    let e = lengths.len() as f64;
    let w: Vec<f64> = v.amplitudes.iter().map(|x| x * x).collect();
    let s_amplitudes = entropy_of_weights(&w)? / libm::log(e);
    let s_bonds = entropy(&v.bond)? / libm::log(2.0 * e);
    let mean = lengths.iter().sum::<f64>() / e;
    let weighted_length = lengths.iter().zip(&w).map(|(l, p)| l * p).sum::<f64>() / mean;
    Ok(StarSpectrumRecord { index, k, amplitudes: v.amplitudes, s_amplitudes, s_bonds, weighted_length })
}

/// Star records for every root in `[k_min, k_max]`.
pub fn star_spectrum(lengths: &[f64], k_min: f64, k_max: f64, tol: f64) -> Result<Vec<StarSpectrumRecord>> {
    let qg = neumann_star(lengths)?;
    let roots = star_secular_roots_neumann(lengths, k_min, k_max, tol)?.roots;
    let before = solver::counting_function(&qg, k_min)?;
    roots
        .iter()
        .enumerate()
        .map(|(i, &k)| record_at(before + i + 1, k, lengths, &qg))
        .collect()
}

/// Records for the first `n` eigenvalues.
pub fn first_star_records(lengths: &[f64], n: usize, tol: f64) -> Result<Vec<StarSpectrumRecord>> {
    let qg = neumann_star(lengths)?;
    first_star_roots(lengths, n, tol)?
        .iter()
        .enumerate()
        .map(|(i, &k)| record_at(i + 1, k, lengths, &qg))
        .collect()
}

/// Which `m(ξ)` enters the large-star constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MVariant {
    /// `e^{-ξ²/4} + ξ erf(ξ/2)`
    Plain,
    /// `(2/√π) e^{-ξ²/4} + ξ erf(ξ/2)`
    TwoOverSqrtPi,
}

impl MVariant {
    pub fn m(self, xi: f64) -> f64 {
        let pre = match self {
            MVariant::Plain => 1.0,
            MVariant::TwoOverSqrtPi => 2.0 / libm::sqrt(PI),
        };
        pre * libm::exp(-xi * xi / 4.0) + xi * libm::erf(xi / 2.0)
    }
}

/// Truncation of the `ξ` integrals; `e^{-T²/4}` is far below any tolerance used.
const XI_CUTOFF: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CNeumann {
    /// `(1/√(4π)) ∫ e^{-ξ²/4} ln m²(ξ) dξ`.
    pub integral: f64,
    /// `γ + integral`.
    pub c: f64,
}

pub fn c_neumann_constant(variant: MVariant, tol: f64) -> Result<CNeumann> {
    if !(tol > 0.0 && tol <= 1e-8) {
        return Err(Error::param("quadrature tolerance must lie in (0, 1e-8]"));
    }
    let norm = 1.0 / libm::sqrt(4.0 * PI);
    let half = integrate(
        |xi| {
            let m = variant.m(xi);
            libm::exp(-xi * xi / 4.0) * libm::log(m * m)
        },
        0.0,
        XI_CUTOFF,
        tol / 4.0,
        0.0,
    )?;
    let integral = 2.0 * norm * half.value;
    Ok(CNeumann { integral, c: EULER_GAMMA + integral })
}

/// `P(y) = (1/(4π y^{3/2})) ∫ e^{-ξ²/4 - m²/(4y)} m dξ`, zero for `y ≤ 0`.
pub fn limit_density(y: f64, variant: MVariant, tol: f64) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let r = integrate(
        |xi| {
            let m = variant.m(xi);
            libm::exp(-xi * xi / 4.0 - m * m / (4.0 * y)) * m
        },
        0.0,
        XI_CUTOFF,
        tol,
        tol,
    )?;
    Ok(2.0 * r.value / (4.0 * PI * y * libm::sqrt(y)))
}

/// `∫_0^∞ w(y) P(y) dy` with `y = 1/u²`, as a double quadrature in `(u, ξ)`.
fn moment_in_u<W: Fn(f64) -> f64>(variant: MVariant, weight: W, tol: f64) -> Result<f64> {
    // m(ξ) ≥ 1 bounds the u-integrand by e^{-u²/4}
    let u_cut = 2.0 * libm::sqrt(-libm::log(tol * 1e-3)) + 2.0;
    let mut failure = None;
    let outer = integrate(
        |u| {
            let inner = integrate(
                |xi| {
                    let m = variant.m(xi);
                    libm::exp(-xi * xi / 4.0 - m * m * u * u / 4.0) * m
                },
                0.0,
                XI_CUTOFF,
                tol * 1e-2,
                tol * 1e-2,
            );
            match inner {
                Ok(r) => 2.0 * r.value * weight(u),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        u_cut,
        tol,
        0.0,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer.value / (2.0 * PI))
}

/// `∫ P(y) dy`, which equals `1`.
pub fn limit_mass(variant: MVariant, tol: f64) -> Result<f64> {
    moment_in_u(variant, |_| 1.0, tol)
}

/// `∫ P(y) ln y dy`, which equals `γ + (1/√(4π)) ∫ e^{-ξ²/4} ln m² dξ`.
pub fn limit_log_moment(variant: MVariant, tol: f64) -> Result<f64> {
    moment_in_u(variant, |u| if u > 0.0 { -2.0 * libm::log(u) } else { 0.0 }, tol)
}

/// `∫_0^y P`, using `∫_{u_0}^∞ e^{-m²u²/4} du = (√π/m) erfc(m u_0/2)`.
pub fn limit_cdf(y: f64, variant: MVariant, tol: f64) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let u0 = 1.0 / libm::sqrt(y);
    let r = integrate(
        |xi| {
            let m = variant.m(xi);
            libm::exp(-xi * xi / 4.0) * libm::erfc(m * u0 / 2.0)
        },
        0.0,
        XI_CUTOFF,
        tol,
        0.0,
    )?;
    Ok(2.0 * r.value * libm::sqrt(PI) / (2.0 * PI))
}

/// `(1/|E|²) Σ_e sec²(kL_e)`.
pub fn scaled_sec_sum(k: f64, lengths: &[f64]) -> f64 {
    let v = lengths.len() as f64;
    let sum: f64 = lengths
        .iter()
        .map(|&l| {
            let c = libm::cos(k * l);
            1.0 / (c * c)
        })
        .sum();
    sum / (v * v)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: FnMut(f64) -> Result<f64>>(samples: &[f64], mut cdf: F) -> Result<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}

/// Spectral averages of Neumann-star entropies against the large-star prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageEntropyResult {
    pub edge_count: usize,
    pub n_eigen: usize,
    /// `(1/N) Σ S_N(A)/L(A)`.
    pub weighted_average_amplitudes: f64,
    pub weighted_average_amplitudes_err: f64,
    /// `(1/N) Σ S_N(a)/L(a)`.
    pub weighted_average_bonds: f64,
    pub weighted_average_bonds_err: f64,
    /// `(1/N) Σ S_N(A)`.
    pub plain_average_amplitudes: f64,
    /// `(1/N) Σ S_N(a)`.
    pub plain_average_bonds: f64,
    /// `C / ln |E|`.
    pub prediction_amplitudes: f64,
    /// `(C + ln 2) / (ln |E| + ln 2)`.
    pub prediction_bonds: f64,
    pub c_constant: f64,
}

fn mean_and_err(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, libm::sqrt(var / n))
}

/// Averages over the first `n_eigen` eigenvalues.
pub fn average_entropy_experiment(lengths: &[f64], n_eigen: usize, variant: MVariant) -> Result<AverageEntropyResult> {
    let records = first_star_records(lengths, n_eigen, 1e-11)?;
    average_from_records(lengths.len(), &records, variant)
}

/// Same as [`average_entropy_experiment`] for precomputed records.
pub fn average_from_records(edge_count: usize, records: &[StarSpectrumRecord], variant: MVariant) -> Result<AverageEntropyResult> {
    if records.len() < 2 {
        return Err(Error::InsufficientRoots { found: records.len(), needed: 2 });
    }
    let c = c_neumann_constant(variant, 1e-12)?.c;
    let wa: Vec<f64> = records.iter().map(|r| r.s_amplitudes / r.weighted_length).collect();
    let wb: Vec<f64> = records.iter().map(|r| r.s_bonds / r.weighted_length).collect();
    let pa: Vec<f64> = records.iter().map(|r| r.s_amplitudes).collect();
    let pb: Vec<f64> = records.iter().map(|r| r.s_bonds).collect();
    let (wam, wae) = mean_and_err(&wa);
    let (wbm, wbe) = mean_and_err(&wb);
    let ln_e = libm::log(edge_count as f64);
    Ok(AverageEntropyResult {
        edge_count,
        n_eigen: records.len(),
        weighted_average_amplitudes: wam,
        weighted_average_amplitudes_err: wae,
        weighted_average_bonds: wbm,
        weighted_average_bonds_err: wbe,
        plain_average_amplitudes: mean_and_err(&pa).0,
        plain_average_bonds: mean_and_err(&pb).0,
        prediction_amplitudes: c / ln_e,
        prediction_bonds: (c + LN_2) / (ln_e + LN_2),
        c_constant: c,
    })
}

/// Ground state of a Neumann star against `k_1 ≈ π/(2 L_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationResult {
    pub k1: f64,
    pub prediction: f64,
    /// `|prediction - k1| / k1`.
    pub relative_error: f64,
    pub longest_edge: usize,
    /// `|A_e|²` on the longest edge.
    pub mass_on_longest_edge: f64,
    pub mass_per_edge: Vec<f64>,
}

pub fn localization_heuristic_check(lengths: &[f64]) -> Result<LocalizationResult> {
    let (longest_edge, l_max) = lengths
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, l)| if l > acc.1 { (i, l) } else { acc });
    let prediction = PI / (2.0 * l_max);
    // the first positive root lies between the first two poles, both ≤ 3π/(2 L_max)
    let roots = star_secular_roots_neumann(lengths, 0.25 * prediction, 3.0 * prediction + 1e-9, 1e-12)?.roots;
    let k1 = *roots.first().ok_or(Error::InsufficientRoots { found: 0, needed: 1 })?;
    let qg = neumann_star(lengths)?;
    let rec = record_at(1, k1, lengths, &qg)?;
    let mass_per_edge: Vec<f64> = rec.amplitudes.iter().map(|a| a * a).collect();
    Ok(LocalizationResult {
        k1,
        prediction,
        relative_error: (prediction - k1).abs() / k1,
        longest_edge,
        mass_on_longest_edge: mass_per_edge[longest_edge],
        mass_per_edge,
    })
}
