//! Declarative experiment runner.
//!
//! Each `(size, seed)` cell of a spec is computed independently on the
//! rayon pool; files are written afterwards, one writer per path.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qgraph_core::entropy::{verify_bounds, BoundContext, EntropyReport};
use qgraph_core::graph::{random_regular_graph, sample_lengths, LengthDistribution};
use qgraph_core::scattering::Boundary;
use qgraph_core::solver::{find_eigenvalues, merge_windows, EigenpairRecord, SolverOptions};
use qgraph_core::star::{
    self, average_from_records, c_neumann_constant, first_star_records, ks_distance, limit_cdf, limit_density,
    localization_heuristic_check, scaled_sec_sum, star_spectrum, star_with_centre, MVariant, StarSpectrumRecord,
};
use qgraph_core::QuantumGraph;

use crate::config::{ExperimentKind, ExperimentSpec, Family};
use crate::fit::{fit_entropy_model, EntropyFit};
use crate::format::{save_graph, save_spectrum, write_csv, write_json, Cell, Provenance, SpectrumHeader, SCHEMA_VERSION};
use crate::{Error, Result};

/// Thread count for the experiment pool; unset or `0` means one per core.
pub const THREADS_ENV: &str = "QGRAPH_THREADS";

pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

// lengths are drawn from a stream separate from the graph pairing
fn length_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Everything needed to build one graph of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub family: Family,
    pub degree: usize,
    pub boundary: Boundary,
    pub lengths: LengthDistribution,
    /// Stars only: length of one extra-long last edge.
    pub longest: Option<f64>,
}

impl GraphParams {
    pub fn of(spec: &ExperimentSpec) -> Self {
        GraphParams {
            family: spec.family,
            degree: spec.degree,
            boundary: spec.boundary,
            lengths: spec.lengths,
            longest: spec.longest,
        }
    }

    /// The quantum graph of one `(size, seed)` cell.
    pub fn build(&self, size: usize, seed: u64) -> Result<QuantumGraph> {
        match self.family {
            Family::Regular => {
                let g = random_regular_graph(size, self.degree, seed)?;
                let lengths = sample_lengths(g.edge_count(), self.lengths, length_seed(seed))?;
                Ok(QuantumGraph::new(g, lengths, self.boundary)?)
            }
            Family::Star => Ok(star_with_centre(&self.star_lengths(size, seed)?, self.boundary)?),
        }
    }

    /// Star edge lengths; with `longest` set the last edge has that length
    /// and the others are drawn below it.
    pub fn star_lengths(&self, size: usize, seed: u64) -> Result<Vec<f64>> {
        match self.longest {
            None => Ok(sample_lengths(size, self.lengths, length_seed(seed))?.as_slice().to_vec()),
            Some(l) => {
                let LengthDistribution::Uniform { lo, hi } = self.lengths;
                let dist = LengthDistribution::uniform(lo, hi.min(l))?;
                let mut v = if size > 1 {
                    sample_lengths(size - 1, dist, length_seed(seed))?.as_slice().to_vec()
                } else {
                    Vec::new()
                };
                v.push(l);
                Ok(v)
            }
        }
    }
}

fn weyl_width(qg: &QuantumGraph, count: usize) -> f64 {
    count as f64 * std::f64::consts::PI / qg.lengths().total()
}

fn solve_window(qg: &QuantumGraph, k_min: f64, k_max: f64, tol: f64) -> Result<Vec<EigenpairRecord>> {
    // chunking depends on the window only, so output is independent of the thread count
    let expected = (k_max - k_min) / weyl_width(qg, 1);
    let chunks = ((expected / 48.0).ceil() as usize).clamp(1, 1024);
    let h = (k_max - k_min) / chunks as f64;
    let opts = SolverOptions { tol, ..SolverOptions::default() };
    let parts = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let a = k_min + h * i as f64;
            let b = if i + 1 == chunks { k_max } else { k_min + h * (i + 1) as f64 };
            find_eigenvalues(qg, a, b, &opts)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(merge_windows(parts, tol))
}

/// Eigenpairs in `[k_min, k_max]`, or the first `n_eigen` above `k_min`.
pub fn compute_spectrum(
    qg: &QuantumGraph,
    k_min: f64,
    k_max: Option<f64>,
    n_eigen: Option<usize>,
    tol: f64,
) -> Result<Vec<EigenpairRecord>> {
    let k_lo = k_min.max(tol * 100.0);
    match (k_max, n_eigen) {
        (Some(k_max), n) => {
            let mut r = solve_window(qg, k_lo, k_max, tol)?;
            if let Some(n) = n {
                r.truncate(n);
            }
            Ok(r)
        }
        (None, Some(n)) => {
            let mut records: Vec<EigenpairRecord> = Vec::new();
            let mut lo = k_lo;
            for _ in 0..64 {
                let missing = n.saturating_sub(records.len());
                if missing == 0 {
                    break;
                }
                let hi = lo + 1.1 * weyl_width(qg, missing + 8);
                let part = solve_window(qg, lo, hi, tol)?;
                records = merge_windows(vec![records, part], tol);
                lo = hi;
            }
            if records.len() < n {
                return Err(qgraph_core::Error::InsufficientRoots { found: records.len(), needed: n }.into());
            }
            records.truncate(n);
            Ok(records)
        }
        (None, None) => Err(Error::Config("one of k_max or n_eigen is required".into())),
    }
}

pub fn entropy_reports(qg: &QuantumGraph, records: &[EigenpairRecord]) -> Result<Vec<EntropyReport>> {
    let ctx = BoundContext::new(qg);
    Ok(records.par_iter().map(|r| verify_bounds(r, qg, &ctx)).collect::<std::result::Result<Vec<_>, _>>()?)
}

pub const ENTROPY_COLUMNS: [&str; 6] = ["n", "k_n", "entropy", "normalized_entropy", "variance", "weighted_length"];

pub fn write_entropy_csv(path: &Path, prov: &Provenance, records: &[EigenpairRecord], reports: &[EntropyReport]) -> Result<()> {
    let rows: Vec<Vec<Cell>> = records
        .iter()
        .zip(reports)
        .map(|(r, e)| {
            vec![
                r.index.into(),
                r.k.into(),
                e.entropy.into(),
                e.normalized_entropy.into(),
                e.variance.into(),
                e.weighted_length.into(),
            ]
        })
        .collect();
    write_csv(path, prov, &ENTROPY_COLUMNS, &rows)
}

/// One bound over a whole spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub bound_name: String,
    /// Threshold at the eigenvector with the smallest margin.
    pub threshold: Option<f64>,
    pub min_margin_over_spectrum: Option<f64>,
    pub checked: usize,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsTable {
    pub version: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub label: String,
    pub bond_count: usize,
    pub eigen_count: usize,
    pub bounds: Vec<BoundSummary>,
}

impl BoundsTable {
    pub fn violations(&self) -> usize {
        self.bounds.iter().map(|b| b.violations).sum()
    }
}

pub fn summarize_bounds(reports: &[EntropyReport]) -> Vec<BoundSummary> {
    let Some(first) = reports.first() else { return Vec::new() };
    (0..first.bounds.len())
        .map(|i| {
            let name = first.bounds[i].name.to_string();
            let mut s = BoundSummary {
                bound_name: name,
                threshold: None,
                min_margin_over_spectrum: None,
                checked: 0,
                violations: 0,
                skipped: first.bounds[i].skipped.clone(),
            };
            for r in reports {
                let b = &r.bounds[i];
                if let Some(m) = b.margin {
                    s.checked += 1;
                    if !b.satisfied {
                        s.violations += 1;
                    }
                    if s.min_margin_over_spectrum.is_none_or(|cur| m < cur) {
                        s.min_margin_over_spectrum = Some(m);
                        s.threshold = b.threshold;
                    }
                }
            }
            s
        })
        .collect()
}

/// Files written by [`run`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub bound_violations: usize,
}

fn label(spec: &ExperimentSpec, size: usize, seed: u64) -> String {
    let f = match spec.family {
        Family::Regular => "regular",
        Family::Star => "star",
    };
    format!("{f}{size}_seed{seed}")
}

struct Cx<'a> {
    spec: &'a ExperimentSpec,
    hash: String,
    out: RunOutput,
}

impl Cx<'_> {
    fn path(&mut self, name: String) -> PathBuf {
        let p = self.spec.output.join(name);
        self.out.files.push(p.clone());
        p
    }

    fn prov(&self, seed: Option<u64>) -> Provenance {
        Provenance::new(self.hash.clone(), seed)
    }
}

fn cells(spec: &ExperimentSpec) -> Vec<(usize, u64)> {
    spec.sizes.iter().flat_map(|&n| spec.seeds.iter().map(move |&s| (n, s))).collect()
}

/// Runs an experiment, writing every output below `spec.output`.
///
/// A `bounds-report` with violated bounds writes its files and then
/// returns [`Error::BoundViolation`].
pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    thread_pool()?.install(|| run_in_pool(spec))
}

fn run_in_pool(spec: &ExperimentSpec) -> Result<RunOutput> {
    let mut cx = Cx { spec, hash: spec.hash(), out: RunOutput::default() };
    std::fs::create_dir_all(&spec.output).map_err(|e| Error::io(&spec.output, e))?;
    let spec_path = cx.path("spec.txt".into());
    let text = format!("# spec_hash={}\n# code_version={}\n{}", cx.hash, crate::format::CODE_VERSION, spec.canonical());
    std::fs::write(&spec_path, text).map_err(|e| Error::io(&spec_path, e))?;

    let ctx = |size: usize, seed: u64| format!("{} cell size = {size}, seed = {seed}", spec.kind.name());
    match spec.kind {
        ExperimentKind::Spectrum | ExperimentKind::EntropyHistogram | ExperimentKind::BoundsReport => {
            let results = cells(spec)
                .into_par_iter()
                .map(|(n, s)| spectral_cell(spec, n, s).map_err(|e| e.context(ctx(n, s))))
                .collect::<Result<Vec<_>>>()?;
            for c in results {
                write_spectral_cell(&mut cx, &c)?;
            }
            if spec.kind == ExperimentKind::BoundsReport && cx.out.bound_violations > 0 {
                return Err(Error::BoundViolation {
                    count: cx.out.bound_violations,
                    summary: format!("see bounds_*.json in {}", spec.output.display()),
                });
            }
        }
        ExperimentKind::MeanEntropyVsSize => {
            let results = cells(spec)
                .into_par_iter()
                .map(|(n, s)| spectral_cell(spec, n, s).map_err(|e| e.context(ctx(n, s))))
                .collect::<Result<Vec<_>>>()?;
            write_mean_entropy(&mut cx, &results)?;
        }
        ExperimentKind::StarAverage => {
            let results = cells(spec)
                .into_par_iter()
                .map(|(n, s)| star_cell(spec, n, s).map_err(|e| e.context(ctx(n, s))))
                .collect::<Result<Vec<_>>>()?;
            write_star_average(&mut cx, &results)?;
        }
        ExperimentKind::Localization => {
            let results = cells(spec)
                .into_par_iter()
                .map(|(n, s)| {
                    let lengths = GraphParams::of(spec).star_lengths(n, s)?;
                    let r = localization_heuristic_check(&lengths).map_err(|e| Error::from(e).context(ctx(n, s)))?;
                    Ok((n, s, lengths, r))
                })
                .collect::<Result<Vec<_>>>()?;
            write_localization(&mut cx, &results)?;
        }
    }
    Ok(cx.out)
}

struct SpectralCell {
    size: usize,
    seed: u64,
    qg: QuantumGraph,
    k_min: f64,
    k_max: f64,
    records: Vec<EigenpairRecord>,
    reports: Vec<EntropyReport>,
}

fn spectral_cell(spec: &ExperimentSpec, size: usize, seed: u64) -> Result<SpectralCell> {
    let qg = GraphParams::of(spec).build(size, seed)?;
    let records = compute_spectrum(&qg, spec.k_min, spec.k_max, spec.n_eigen, spec.tol)?;
    let reports = entropy_reports(&qg, &records)?;
    let k_max = spec.k_max.unwrap_or_else(|| records.last().map_or(spec.k_min, |r| r.k));
    Ok(SpectralCell { size, seed, qg, k_min: spec.k_min, k_max, records, reports })
}

fn write_spectral_cell(cx: &mut Cx, c: &SpectralCell) -> Result<()> {
    let name = label(cx.spec, c.size, c.seed);
    let prov = cx.prov(Some(c.seed));
    let table = BoundsTable {
        version: SCHEMA_VERSION.into(),
        provenance: prov.clone(),
        label: name.clone(),
        bond_count: c.qg.bond_count(),
        eigen_count: c.records.len(),
        bounds: summarize_bounds(&c.reports),
    };
    cx.out.bound_violations += table.violations();
    if cx.spec.kind != ExperimentKind::BoundsReport {
        let p = cx.path(format!("graph_{name}.json"));
        save_graph(&p, &c.qg)?;
        let p = cx.path(format!("entropy_{name}.csv"));
        write_entropy_csv(&p, &prov, &c.records, &c.reports)?;
    }
    if cx.spec.kind == ExperimentKind::Spectrum {
        let header = SpectrumHeader {
            version: SCHEMA_VERSION.into(),
            bond_count: c.qg.bond_count(),
            k_min: c.k_min,
            k_max: c.k_max,
            tol: cx.spec.tol,
            provenance: prov.clone(),
        };
        let p = cx.path(format!("spectrum_{name}.jsonl"));
        save_spectrum(&p, &header, &c.records)?;
    }
    let p = cx.path(format!("bounds_{name}.json"));
    write_json(&p, &table)
}

pub const MEAN_ENTROPY_COLUMNS: [&str; 8] =
    ["size", "seed", "bond_count", "n_eigen", "mean_entropy", "std_entropy", "mean_variance_bound", "min_entropy"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEntropyPoint {
    pub size: usize,
    pub seed: u64,
    pub bond_count: usize,
    pub degree: Option<usize>,
    pub girth: Option<usize>,
    pub n_eigen: usize,
    pub mean_entropy: f64,
    pub std_entropy: f64,
    /// Mean of `1 - V/ln B` over the spectrum.
    pub mean_variance_bound: f64,
    /// Girth or star bound threshold where it applies.
    pub girth_threshold: Option<f64>,
    pub star_threshold: Option<f64>,
    pub uncertainty_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEntropySummary {
    pub version: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub boundary: String,
    pub points: Vec<MeanEntropyPoint>,
    pub fit: EntropyFit,
}

fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}

fn write_mean_entropy(cx: &mut Cx, cells: &[SpectralCell]) -> Result<()> {
    let mut points = Vec::new();
    for c in cells {
        if c.records.is_empty() {
            return Err(Error::Config(format!("no eigenvalues for size {} seed {}", c.size, c.seed)));
        }
        let s: Vec<f64> = c.reports.iter().map(|r| r.normalized_entropy).collect();
        let lb = (c.qg.bond_count() as f64).ln();
        let vb: Vec<f64> = c.reports.iter().map(|r| 1.0 - r.variance / lb).collect();
        let (mean_entropy, std_entropy) = mean_std(&s);
        let ctx = BoundContext::new(&c.qg);
        points.push(MeanEntropyPoint {
            size: c.size,
            seed: c.seed,
            bond_count: c.qg.bond_count(),
            degree: c.qg.graph().regular_degree(),
            girth: ctx.girth_threshold.as_ref().ok().map(|t| t.1),
            n_eigen: c.records.len(),
            mean_entropy,
            std_entropy,
            mean_variance_bound: mean_std(&vb).0,
            girth_threshold: ctx.girth_threshold.as_ref().ok().map(|t| t.0),
            star_threshold: ctx.star_threshold.as_ref().ok().copied(),
            uncertainty_threshold: ctx.uncertainty_threshold,
        });
        let p = cx.path(format!("entropy_{}.csv", label(cx.spec, c.size, c.seed)));
        write_entropy_csv(&p, &cx.prov(Some(c.seed)), &c.records, &c.reports)?;
    }
    let fit = fit_entropy_model(&points.iter().map(|p| (p.bond_count as f64, p.mean_entropy)).collect::<Vec<_>>())?;
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|p| {
            let min = cells
                .iter()
                .find(|c| c.size == p.size && c.seed == p.seed)
                .map(|c| c.reports.iter().map(|r| r.normalized_entropy).fold(f64::INFINITY, f64::min))
                .unwrap();
            vec![
                p.size.into(),
                Cell::Int(p.seed),
                p.bond_count.into(),
                p.n_eigen.into(),
                p.mean_entropy.into(),
                p.std_entropy.into(),
                p.mean_variance_bound.into(),
                min.into(),
            ]
        })
        .collect();
    let prov = cx.prov(None);
    let path = cx.path("mean_entropy.csv".into());
    write_csv(&path, &prov, &MEAN_ENTROPY_COLUMNS, &rows)?;
    let summary = MeanEntropySummary {
        version: SCHEMA_VERSION.into(),
        provenance: prov,
        boundary: format!("{:?}", cx.spec.boundary).to_lowercase(),
        points,
        fit,
    };
    let path = cx.path("mean_entropy.json".into());
    write_json(&path, &summary)
}

struct StarCell {
    size: usize,
    seed: u64,
    lengths: Vec<f64>,
    records: Vec<StarSpectrumRecord>,
    average: star::AverageEntropyResult,
    ks: f64,
}

fn star_cell(spec: &ExperimentSpec, size: usize, seed: u64) -> Result<StarCell> {
    let lengths = GraphParams::of(spec).star_lengths(size, seed)?;
    let records = match spec.k_max {
        Some(k_max) => {
            let mut r = star_spectrum(&lengths, spec.k_min.max(1e-9), k_max, spec.tol)?;
            if let Some(n) = spec.n_eigen {
                r.truncate(n);
            }
            r
        }
        None => first_star_records(&lengths, spec.n_eigen.unwrap_or(0), spec.tol)?,
    };
    let average = average_from_records(size, &records, spec.m_variant)?;
    let y: Vec<f64> = records.iter().map(|r| scaled_sec_sum(r.k, &lengths)).collect();
    let ks = ks_distance(&y, |x| limit_cdf(x, spec.m_variant, 1e-10))?;
    Ok(StarCell { size, seed, lengths, records, average, ks })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarAverageRow {
    pub edge_count: usize,
    pub seed: u64,
    pub n_eigen: usize,
    pub weighted_average_amplitudes: f64,
    pub weighted_average_amplitudes_err: f64,
    pub weighted_average_bonds: f64,
    pub weighted_average_bonds_err: f64,
    pub plain_average_amplitudes: f64,
    pub plain_average_bonds: f64,
    pub prediction_amplitudes: f64,
    pub prediction_bonds: f64,
    /// Kolmogorov–Smirnov distance of the scaled `sec²` sums from `P(y)`.
    pub ks_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarAverageSummary {
    pub version: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub m_variant: String,
    pub log_integral: f64,
    pub c_constant: f64,
    pub rows: Vec<StarAverageRow>,
}

pub fn m_variant_name(v: MVariant) -> &'static str {
    match v {
        MVariant::Plain => "plain",
        MVariant::TwoOverSqrtPi => "two-over-sqrt-pi",
    }
}

pub const STAR_COLUMNS: [&str; 5] = ["n", "k_n", "S_A", "S_a", "L_A"];
pub const PY_SAMPLE_COLUMNS: [&str; 3] = ["n", "k_n", "y"];
pub const PY_DENSITY_COLUMNS: [&str; 3] = ["y", "density", "cdf"];

fn write_star_average(cx: &mut Cx, cells: &[StarCell]) -> Result<()> {
    let variant = cx.spec.m_variant;
    for c in cells {
        let name = label(cx.spec, c.size, c.seed);
        let prov = cx.prov(Some(c.seed));
        let mut columns: Vec<String> = STAR_COLUMNS.iter().map(|s| s.to_string()).collect();
        if cx.spec.mass_per_edge {
            columns.extend((0..c.size).map(|e| format!("mass_{e}")));
        }
        let rows: Vec<Vec<Cell>> = c
            .records
            .iter()
            .map(|r| {
                let mut row = vec![r.index.into(), r.k.into(), r.s_amplitudes.into(), r.s_bonds.into(), r.weighted_length.into()];
                if cx.spec.mass_per_edge {
                    row.extend(r.amplitudes.iter().map(|a| Cell::Float(a * a)));
                }
                row
            })
            .collect();
        let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
        let p = cx.path(format!("star_{name}.csv"));
        write_csv(&p, &prov, &cols, &rows)?;
        let rows: Vec<Vec<Cell>> = c
            .records
            .iter()
            .map(|r| vec![r.index.into(), r.k.into(), scaled_sec_sum(r.k, &c.lengths).into()])
            .collect();
        let p = cx.path(format!("py_samples_{name}.csv"));
        write_csv(&p, &prov, &PY_SAMPLE_COLUMNS, &rows)?;
    }
    // density on a log grid for the histogram overlay
    let grid: Vec<f64> = (0..=240).map(|i| 10f64.powf(-2.0 + i as f64 / 40.0)).collect();
    let rows = grid
        .par_iter()
        .map(|&y| Ok(vec![y.into(), limit_density(y, variant, 1e-12)?.into(), limit_cdf(y, variant, 1e-12)?.into()]))
        .collect::<std::result::Result<Vec<Vec<Cell>>, qgraph_core::Error>>()?;
    let prov = cx.prov(None);
    let p = cx.path("py_density.csv".into());
    write_csv(&p, &prov, &PY_DENSITY_COLUMNS, &rows)?;

    let c = c_neumann_constant(variant, 1e-12)?;
    let summary = StarAverageSummary {
        version: SCHEMA_VERSION.into(),
        provenance: prov,
        m_variant: m_variant_name(variant).into(),
        log_integral: c.integral,
        c_constant: c.c,
        rows: cells
            .iter()
            .map(|s| StarAverageRow {
                edge_count: s.size,
                seed: s.seed,
                n_eigen: s.average.n_eigen,
                weighted_average_amplitudes: s.average.weighted_average_amplitudes,
                weighted_average_amplitudes_err: s.average.weighted_average_amplitudes_err,
                weighted_average_bonds: s.average.weighted_average_bonds,
                weighted_average_bonds_err: s.average.weighted_average_bonds_err,
                plain_average_amplitudes: s.average.plain_average_amplitudes,
                plain_average_bonds: s.average.plain_average_bonds,
                prediction_amplitudes: s.average.prediction_amplitudes,
                prediction_bonds: s.average.prediction_bonds,
                ks_distance: s.ks,
            })
            .collect(),
    };
    let p = cx.path("star_average.json".into());
    write_json(&p, &summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub edge_count: usize,
    pub seed: u64,
    pub k1: f64,
    pub prediction: f64,
    pub relative_error: f64,
    pub longest_edge: usize,
    pub longest_length: f64,
    pub mass_on_longest_edge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationSummary {
    pub version: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub rows: Vec<LocalizationRow>,
}

pub const LOCALIZATION_COLUMNS: [&str; 3] = ["edge", "length", "mass"];

fn write_localization(cx: &mut Cx, cells: &[(usize, u64, Vec<f64>, star::LocalizationResult)]) -> Result<()> {
    let mut rows_out = Vec::new();
    for (size, seed, lengths, r) in cells {
        let rows: Vec<Vec<Cell>> = lengths
            .iter()
            .zip(&r.mass_per_edge)
            .enumerate()
            .map(|(e, (&l, &m))| vec![e.into(), l.into(), m.into()])
            .collect();
        let p = cx.path(format!("localization_{}.csv", label(cx.spec, *size, *seed)));
        write_csv(&p, &cx.prov(Some(*seed)), &LOCALIZATION_COLUMNS, &rows)?;
        rows_out.push(LocalizationRow {
            edge_count: *size,
            seed: *seed,
            k1: r.k1,
            prediction: r.prediction,
            relative_error: r.relative_error,
            longest_edge: r.longest_edge,
            longest_length: lengths[r.longest_edge],
            mass_on_longest_edge: r.mass_on_longest_edge,
        });
    }
    let summary = LocalizationSummary { version: SCHEMA_VERSION.into(), provenance: cx.prov(None), rows: rows_out };
    let p = cx.path("localization.json".into());
    write_json(&p, &summary)
}
