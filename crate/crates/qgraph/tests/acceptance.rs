//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance -- <filter>` runs the criteria whose name
//! contains `filter`. The process fails when a criterion fails that is not
//! listed in `EXPECTED_FAIL`.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qgraph::config::Family;
use qgraph::experiment::{compute_spectrum, GraphParams};
use qgraph_core::constants::{DEFAULT_M_VARIANT, REFERENCE_C_NEUMANN, REFERENCE_LOG_INTEGRAL};
use qgraph_core::entropy::{
    entropy, entropy_of_weights, maassen_uffink_bound, variance as bond_variance, verify_bounds, BoundContext, GIRTH_BOUND,
    STAR_BOUND, UNCERTAINTY_BOUND, VARIANCE_BOUND,
};
use qgraph_core::graph::{
    adjacency_spectral_gap, girth, max_nonbacktracking_count, random_regular_graph, sample_lengths,
};
use qgraph_core::linalg::{eigenpairs, inner, mat_pow, mat_vec, normalize, unitarity_deviation};
use qgraph_core::moments::path_count_bound;
use qgraph_core::quantum::{bond_scattering_matrix, markov_matrix, markov_mixing_norm, markov_spectral_gap, mixing_deviation, orbit_sums_from};
use qgraph_core::scattering::{equitransmitting_smatrix, neumann_smatrix, EXACT_TOLERANCE};
use qgraph_core::solver::{counting_function, find_eigenvalues};
use qgraph_core::star::{
    average_entropy_experiment, c_neumann_constant, first_star_roots, limit_mass, localization_heuristic_check,
    neumann_star, star_eigenvector, star_with_centre, MVariant,
};
use qgraph_core::{c64, BondIndex, Boundary, Girth, LengthDistribution, QuantumGraph, SolverOptions};

/// The mixing norm of a non-normal `M` exceeds `μ^t` at small `t`.
const EXPECTED_FAIL: &[&str] = &["mixing"];

type Outcome = Result<(bool, String), String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(lo: f64, hi: f64) -> LengthDistribution {
    LengthDistribution::uniform(lo, hi).unwrap()
}

fn regular(n: usize, d: usize, boundary: Boundary, seed: u64) -> QuantumGraph {
    let g = random_regular_graph(n, d, seed).unwrap();
    let l = sample_lengths(g.edge_count(), uniform(1.0, 2.0), seed).unwrap();
    QuantumGraph::new(g, l, boundary).unwrap()
}

fn star(e: usize, boundary: Boundary, seed: u64) -> QuantumGraph {
    let l = sample_lengths(e, uniform(1.0, 3.0), seed).unwrap();
    star_with_centre(l.as_slice(), boundary).unwrap()
}

fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let mut cols: Vec<Vec<c64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v: Vec<c64> = (0..n)
            .map(|_| c64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        // two passes keep the columns orthonormal to round-off
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        normalize(&mut v);
        cols.push(v);
    }
    Mat::from_fn(n, n, |i, j| cols[j][i])
}

fn max_entry_sq(u: &Mat<c64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            m = m.max(u[(i, j)].norm_sqr());
        }
    }
    m
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn smatrix_exactness() -> Outcome {
    let mut neumann_mismatch = 0;
    for d in 1..=24usize {
        let s = neumann_smatrix(d).map_err(e)?;
        for i in 0..d {
            for j in 0..d {
                let want = 2.0 / d as f64 - if i == j { 1.0 } else { 0.0 };
                if s.get(i, j) != c64::new(want, 0.0) {
                    neumann_mismatch += 1;
                }
            }
        }
    }
    let mut worst_unitary = 0.0f64;
    let mut worst_modulus = 0.0f64;
    for p in [3u64, 5, 7, 11, 13] {
        let s = equitransmitting_smatrix(p).map_err(e)?;
        worst_unitary = worst_unitary.max(s.unitarity_deviation());
        for i in 0..s.degree() {
            for j in 0..s.degree() {
                let m = s.get(i, j).norm_sqr();
                let want = if i == j { 0.0 } else { 1.0 / p as f64 };
                worst_modulus = worst_modulus.max((m - want).abs());
            }
        }
    }
    let pass = neumann_mismatch == 0 && worst_unitary <= 1e-12 && worst_modulus <= 1e-12;
    Ok((
        pass,
        format!(
            "Neumann d=1..24 inexact entries {neumann_mismatch}; ET p=3..13 unitarity {worst_unitary:.1e}, |s|^2 deviation {worst_modulus:.1e}"
        ),
    ))
}

fn unitarity_and_stochasticity() -> Outcome {
    let mut r = rng(2);
    let mut worst_u = 0.0f64;
    let mut worst_m = 0.0f64;
    let mut graphs = 0;
    for i in 0..100u64 {
        let qg = match i % 4 {
            0 => {
                let d = [3, 4, 5][r.random_range(0..3)];
                let n = 2 * r.random_range(3..12);
                regular(n, d, Boundary::Neumann, i)
            }
            1 => {
                let d = [4, 6, 8][r.random_range(0..3)];
                let n = d + 2 + 2 * r.random_range(0..8);
                regular(n, d, Boundary::EquiTransmitting, i)
            }
            2 => star(r.random_range(2..30), Boundary::Neumann, i),
            _ => star([4, 6, 8, 12, 14][r.random_range(0..5)], Boundary::EquiTransmitting, i),
        };
        for _ in 0..3 {
            let k = r.random_range(0.0..60.0);
            worst_u = worst_u.max(bond_scattering_matrix(&qg, k).unitarity_deviation());
        }
        worst_m = worst_m.max(markov_matrix(&qg).stochastic_deviation());
        graphs += 1;
    }
    let pass = worst_u <= 1e-11 && worst_m <= 1e-11;
    Ok((pass, format!("{graphs} graphs, max unitarity deviation {worst_u:.1e}, max stochastic deviation {worst_m:.1e}")))
}

fn mixing() -> Outcome {
    let mut violations = 0;
    let mut worst = (f64::NEG_INFINITY, 0usize, 0usize);
    let mut first_bad_t = usize::MAX;
    // the same estimate with the operator norm of R in place of the eigenvalue modulus
    let mut norm_violations = 0;
    let mut norm_range = (f64::INFINITY, 0.0f64);
    for i in 0..20u64 {
        let qg = if i % 2 == 0 {
            regular(10 + 2 * i as usize, 4, Boundary::EquiTransmitting, i)
        } else {
            regular(10 + 2 * i as usize, 3, Boundary::Neumann, i)
        };
        let m = markov_matrix(&qg);
        let mu = markov_spectral_gap(&m).map_err(e)?;
        let r_norm = markov_mixing_norm(&m).map_err(e)?;
        norm_range = (norm_range.0.min(r_norm), norm_range.1.max(r_norm));
        for t in 1..=20 {
            let dev = mixing_deviation(&m, t).map_err(e)?;
            if dev > r_norm.powi(t as i32) + 1e-10 {
                norm_violations += 1;
            }
            let excess = dev - mu.powi(t as i32);
            if excess > 1e-10 {
                violations += 1;
                first_bad_t = first_bad_t.min(t);
            }
            if excess > worst.0 {
                worst = (excess, i as usize, t);
            }
        }
    }
    Ok((
        violations == 0,
        format!(
            "{violations} of 400 (graph, t) pairs exceed mu^t; largest excess {:.3e} (graph {}, t = {}); smallest failing t {}; with ||R|| in [{:.4}, {:.4}] in place of mu: {norm_violations} violations",
            worst.0,
            worst.1,
            worst.2,
            if first_bad_t == usize::MAX { "-".to_string() } else { first_bad_t.to_string() },
            norm_range.0,
            norm_range.1,
        ),
    ))
}

fn orbit_sums() -> Outcome {
    let mut r = rng(4);
    let graphs: Vec<QuantumGraph> = vec![
        regular(6, 3, Boundary::Neumann, 1),
        regular(10, 3, Boundary::Neumann, 2),
        regular(8, 3, Boundary::Neumann, 3),
        regular(6, 4, Boundary::EquiTransmitting, 4),
        regular(8, 4, Boundary::EquiTransmitting, 5),
        regular(10, 4, Boundary::EquiTransmitting, 6),
        regular(8, 6, Boundary::EquiTransmitting, 7),
        star(5, Boundary::Neumann, 8),
        star(6, Boundary::EquiTransmitting, 9),
        star(9, Boundary::Neumann, 10),
    ];
    let mut worst = 0.0f64;
    let mut entries = 0usize;
    for qg in &graphs {
        let k = r.random_range(0.5..40.0);
        let u = bond_scattering_matrix(qg, k).entries;
        for t in 1..=6 {
            let ut = mat_pow(u.as_ref(), t);
            for b2 in 0..qg.bond_count() {
                let sums = orbit_sums_from(qg, k, b2, t, 50_000_000).map_err(e)?;
                for (b, s) in sums.iter().enumerate() {
                    worst = worst.max((s - ut[(b, b2)]).norm());
                    entries += 1;
                }
            }
        }
    }
    Ok((worst <= 1e-10, format!("{} graphs, {entries} entries for t <= 6, max deviation {worst:.1e}", graphs.len())))
}

fn weyl_excess(qg: &QuantumGraph, k: f64) -> Result<f64, String> {
    let n = counting_function(qg, k).map_err(e)? as f64;
    let b = qg.bond_count() as f64;
    Ok((n - k * qg.lengths().total() / PI).abs() - (b / 2.0 + 2.0))
}

fn solver_oracle() -> Outcome {
    let (l1, l2) = (1.234_567, 2.718_281_8);
    let qg = neumann_star(&[l1, l2]).map_err(e)?;
    let lt = l1 + l2;
    let opts = SolverOptions { tol: 1e-12, ..SolverOptions::default() };
    let records = find_eigenvalues(&qg, 0.5 * PI / lt, 50.5 * PI / lt, &opts).map_err(e)?;
    let worst_root = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.k - (i + 1) as f64 * PI / lt).abs())
        .fold(0.0f64, f64::max);
    let roots_ok = records.len() == 50 && worst_root <= 1e-9;

    let mut weyl_checks = 0;
    let mut worst_weyl = f64::NEG_INFINITY;
    let mut r = rng(5);
    let graphs = vec![
        qg.clone(),
        regular(12, 3, Boundary::Neumann, 1),
        regular(20, 3, Boundary::Neumann, 2),
        regular(10, 4, Boundary::EquiTransmitting, 3),
        regular(14, 6, Boundary::EquiTransmitting, 4),
        star(7, Boundary::Neumann, 5),
        star(12, Boundary::EquiTransmitting, 6),
    ];
    for g in &graphs {
        for _ in 0..6 {
            let k = r.random_range(0.1..60.0);
            worst_weyl = worst_weyl.max(weyl_excess(g, k)?);
            weyl_checks += 1;
        }
    }
    let pass = roots_ok && worst_weyl <= 0.0;
    Ok((
        pass,
        format!(
            "{} roots of the 2-star, max |k_n - n pi/L| {worst_root:.1e}; Weyl on {weyl_checks} windows, max |N(K) - KL/pi| - (B/2 + 2) = {worst_weyl:.2}",
            records.len()
        ),
    ))
}

struct BoundTally {
    checked: usize,
    violations: usize,
    min_margin: f64,
}

impl BoundTally {
    fn new() -> Self {
        BoundTally { checked: 0, violations: 0, min_margin: f64::INFINITY }
    }

    fn add(&mut self, margin: f64, satisfied: bool) {
        self.checked += 1;
        self.min_margin = self.min_margin.min(margin);
        if !satisfied {
            self.violations += 1;
        }
    }
}

fn tally_bounds(qg: &QuantumGraph, n: usize, names: &[&str], tallies: &mut [BoundTally]) -> Result<usize, String> {
    let records = compute_spectrum(qg, 0.05, None, Some(n), 1e-10).map_err(e)?;
    let ctx = BoundContext::new(qg);
    for rec in &records {
        let rep = verify_bounds(rec, qg, &ctx).map_err(e)?;
        for (name, tally) in names.iter().zip(tallies.iter_mut()) {
            let b = rep.bounds.iter().find(|b| b.name == *name).ok_or("missing bound")?;
            let m = b.margin.ok_or_else(|| format!("{name} skipped: {:?}", b.skipped))?;
            tally.add(m, b.satisfied);
        }
    }
    Ok(records.len())
}

fn entropy_bounds() -> Outcome {
    let n = 300;
    let mut variance = BoundTally::new();
    let mut star_t = BoundTally::new();

    let qg = regular(84, 6, Boundary::EquiTransmitting, 1);
    let g = match girth(qg.graph()) {
        Girth::Finite(g) => g,
        Girth::Infinite => return Err("regular graph without a cycle".into()),
    };
    let mut sizes = vec![];
    let mut t = [BoundTally::new(), BoundTally::new(), BoundTally::new()];
    sizes.push(tally_bounds(&qg, n, &[VARIANCE_BOUND, GIRTH_BOUND, UNCERTAINTY_BOUND], &mut t)?);
    let [v, girth_t, uncertainty] = t;
    merge(&mut variance, v);
    for (e_count, seed) in [(6usize, 1u64), (12, 2)] {
        let l = sample_lengths(e_count, uniform(1.0, 3.0), seed).map_err(e)?;
        let qg = star_with_centre(l.as_slice(), Boundary::EquiTransmitting).map_err(e)?;
        let mut t = [BoundTally::new(), BoundTally::new()];
        sizes.push(tally_bounds(&qg, n, &[VARIANCE_BOUND, STAR_BOUND], &mut t)?);
        let [v, s] = t;
        merge(&mut variance, v);
        merge(&mut star_t, s);
    }

    // bond vectors of a Neumann star built from its amplitudes
    let lengths = sample_lengths(20, uniform(2.0, 10.0), 3).map_err(e)?;
    let lengths = lengths.as_slice();
    let star_qg = neumann_star(lengths).map_err(e)?;
    let roots = first_star_roots(lengths, n, 1e-12).map_err(e)?;
    let b = star_qg.bond_count() as f64;
    let mut worst_identity = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut general = 0;
    for &k in &roots {
        let v = star_eigenvector(k, lengths, &star_qg).map_err(e)?;
        general += v.general as usize;
        let w: Vec<f64> = v.amplitudes.iter().map(|x| x * x).collect();
        let s_a = entropy(&v.bond).map_err(e)?;
        worst_identity = worst_identity.max((s_a - entropy_of_weights(&w).map_err(e)? - LN_2).abs());
        worst_residual = worst_residual.max(v.residual);
        let var = bond_variance(&v.bond).map_err(e)?;
        let margin = s_a / b.ln() - (1.0 - var / b.ln());
        variance.add(margin, margin >= -1e-12);
    }
    sizes.push(roots.len());

    let identity_ok = worst_identity <= 1e-12 && worst_residual <= 1e-8;
    let pass = variance.violations == 0
        && girth_t.violations == 0
        && star_t.violations == 0
        && uncertainty.violations == 0
        && identity_ok
        && sizes.iter().all(|&s| s >= n);
    Ok((
        pass,
        format!(
            "spectra {sizes:?}; variance {}/{} violations (min margin {:.3e}); girth g={g} {}/{} (min margin {:.3e}); ET star {}/{} (min margin {:.3e}); uncertainty {}/{}; Neumann star S(a)-S(A)-ln2 max {worst_identity:.1e}, residual {worst_residual:.1e} ({general} general eigenvectors)",
            variance.violations,
            variance.checked,
            variance.min_margin,
            girth_t.violations,
            girth_t.checked,
            girth_t.min_margin,
            star_t.violations,
            star_t.checked,
            star_t.min_margin,
            uncertainty.violations,
            uncertainty.checked,
        ),
    ))
}

fn merge(into: &mut BoundTally, from: BoundTally) {
    into.checked += from.checked;
    into.violations += from.violations;
    into.min_margin = into.min_margin.min(from.min_margin);
}

fn constants() -> Outcome {
    let mut matching = vec![];
    for v in [MVariant::Plain, MVariant::TwoOverSqrtPi] {
        let c = c_neumann_constant(v, 1e-10).map_err(e)?;
        if (c.integral - REFERENCE_LOG_INTEGRAL).abs() <= 1e-6 && (c.c - REFERENCE_C_NEUMANN).abs() <= 1e-3 {
            matching.push((v, c));
        }
    }
    let mass = limit_mass(DEFAULT_M_VARIANT, 1e-9).map_err(e)?;
    let pass = matching.len() == 1 && matching[0].0 == DEFAULT_M_VARIANT && (mass - 1.0).abs() <= 1e-4;
    let shown = matching
        .iter()
        .map(|(v, c)| format!("{v:?}: integral {:.10}, C {:.10}", c.integral, c.c))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((pass, format!("matching variants [{shown}]; int P = {mass:.10}")))
}

fn localization() -> Outcome {
    let params = GraphParams {
        family: Family::Star,
        degree: 3,
        boundary: Boundary::Neumann,
        lengths: uniform(2.0, 10.0),
        longest: Some(9.9691),
    };
    let lengths = params.star_lengths(120, 1).map_err(e)?;
    let r = localization_heuristic_check(&lengths).map_err(e)?;
    let pass = (0.155..=0.161).contains(&r.k1) && r.relative_error <= 0.03;
    Ok((
        pass,
        format!(
            "k1 = {:.6}, pi/(2 L_max) = {:.6}, relative error {:.2}%, mass on longest edge {:.3}",
            r.k1,
            r.prediction,
            100.0 * r.relative_error,
            r.mass_on_longest_edge
        ),
    ))
}

fn star_average() -> Outcome {
    let mut rows = vec![];
    for (e_count, seed) in [(30usize, 1u64), (60, 2), (120, 3)] {
        let l = sample_lengths(e_count, uniform(2.0, 10.0), seed).map_err(e)?;
        let r = average_entropy_experiment(l.as_slice(), 3000, DEFAULT_M_VARIANT).map_err(e)?;
        rows.push(r);
    }
    let decreasing = rows.windows(2).all(|w| w[1].weighted_average_bonds < w[0].weighted_average_bonds);
    let within = rows.iter().all(|r| {
        let q = r.weighted_average_bonds / r.prediction_bonds;
        (0.5..=2.0).contains(&q)
    });
    let enough = rows.iter().all(|r| r.n_eigen >= 3000);
    let shown = rows
        .iter()
        .map(|r| format!("|E|={} {:.4} vs {:.4}", r.edge_count, r.weighted_average_bonds, r.prediction_bonds))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((decreasing && within && enough, format!("{shown}; decreasing {decreasing}, within [0.5x, 2x] {within}")))
}

fn path_count_bound_check() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut violations = 0;
    let mut below_girth = 0;
    let mut below_girth_bad = 0;
    for (i, n) in [20usize, 28, 36, 44, 52, 60, 70, 80, 90, 100].into_iter().enumerate() {
        let g = random_regular_graph(n, 6, i as u64 + 1).map_err(e)?;
        let mu = adjacency_spectral_gap(&g, 6).map_err(e)?;
        let gi = match girth(&g) {
            Girth::Finite(x) => x,
            Girth::Infinite => usize::MAX,
        };
        let bonds = BondIndex::new(&g);
        for t in 1..=8 {
            let nt = max_nonbacktracking_count(&bonds, t);
            let bound = path_count_bound(5, t, n, mu);
            worst_ratio = worst_ratio.max(nt as f64 / bound);
            if nt as f64 > bound {
                violations += 1;
            }
            if 2 * t < gi + 2 {
                below_girth += 1;
                if nt > 1 {
                    below_girth_bad += 1;
                }
            }
        }
    }
    Ok((
        violations == 0 && below_girth_bad == 0,
        format!(
            "80 (graph, t) pairs, {violations} above the bound, max N_t/bound {worst_ratio:.3}; below girth {below_girth_bad} of {below_girth} have N_t > 1"
        ),
    ))
}

fn entropy_of(v: &[c64]) -> Result<f64, String> {
    entropy(v).map_err(e)
}

fn maassen_uffink() -> Outcome {
    let mut r = rng(11);
    let mut pair_violations = 0;
    let mut worst_pair = f64::INFINITY;
    for _ in 0..1000 {
        let n = r.random_range(2..16);
        let u = haar_unitary(n, &mut r);
        let mut a: Vec<c64> = (0..n)
            .map(|_| c64::new(r.sample::<f64, _>(StandardNormal), r.sample::<f64, _>(StandardNormal)))
            .collect();
        // sparse vectors sit close to the bound
        if r.random_bool(0.3) {
            let keep = r.random_range(0..n);
            a.iter_mut().enumerate().for_each(|(i, x)| if i != keep { *x *= 1e-3 });
        }
        normalize(&mut a);
        let ua = mat_vec(u.as_ref(), &a);
        let margin = entropy_of(&a)? + entropy_of(&ua)? + max_entry_sq(&u).ln();
        worst_pair = worst_pair.min(margin);
        if margin < -1e-10 {
            pair_violations += 1;
        }
    }

    let mut eig_violations = 0;
    let mut eig_checked = 0;
    let mut worst_eig = f64::INFINITY;
    let mut worst_unitary = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(2..24);
        let u = haar_unitary(n, &mut r);
        worst_unitary = worst_unitary.max(unitarity_deviation(u.as_ref()));
        let bounds: Vec<f64> = (1..=3).map(|t| maassen_uffink_bound(u.as_ref(), t).value).collect();
        for (_, v) in eigenpairs(u.as_ref()).map_err(e)? {
            let s = entropy_of(&v)?;
            for b in &bounds {
                eig_checked += 1;
                worst_eig = worst_eig.min(s - b);
                if s - b < -1e-10 {
                    eig_violations += 1;
                }
            }
        }
    }
    let pass = pair_violations == 0 && eig_violations == 0 && worst_unitary <= EXACT_TOLERANCE;
    Ok((
        pass,
        format!(
            "1000 pairs, {pair_violations} violations (min margin {worst_pair:.2e}); {eig_checked} eigenvector checks t=1..3, {eig_violations} violations (min margin {worst_eig:.2e})"
        ),
    ))
}

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { name: "smatrix-exactness", limit: s(1), run: smatrix_exactness },
        Criterion { name: "unitarity-stochasticity", limit: s(30), run: unitarity_and_stochasticity },
        Criterion { name: "mixing", limit: s(60), run: mixing },
        Criterion { name: "orbit-sums", limit: s(120), run: orbit_sums },
        Criterion { name: "solver-oracle", limit: s(120), run: solver_oracle },
        Criterion { name: "entropy-bounds", limit: s(900), run: entropy_bounds },
        Criterion { name: "constants", limit: s(10), run: constants },
        Criterion { name: "localization", limit: s(60), run: localization },
        Criterion { name: "star-average", limit: s(1800), run: star_average },
        Criterion { name: "path-count-bound", limit: s(120), run: path_count_bound_check },
        Criterion { name: "maassen-uffink", limit: s(120), run: maassen_uffink },
    ]
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = vec![];
    let mut ran = 0;
    for c in criteria() {
        if !filters.is_empty() && !filters.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok((ok, d)) => (ok && elapsed <= c.limit, d),
            Err(msg) => (false, format!("error: {msg}")),
        };
        println!(
            "{} {:<24} {detail} [{:.2} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        if !pass && !EXPECTED_FAIL.contains(&c.name) {
            unexpected.push(c.name);
        }
    }
    println!("{ran} criteria run; unexpected failures: {unexpected:?}");
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
