//! Operations on single artifacts: generate a graph, solve it, analyse a
//! saved spectrum, print the star constants.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use qgraph_core::constants::{DEFAULT_M_VARIANT, REFERENCE_C_NEUMANN, REFERENCE_LOG_INTEGRAL};
use qgraph_core::star::{c_neumann_constant, limit_log_moment, limit_mass, MVariant};
use qgraph_core::QuantumGraph;

use crate::config::hash_text;
use crate::experiment::{compute_spectrum, entropy_reports, m_variant_name, summarize_bounds, write_entropy_csv, BoundsTable, GraphParams};
use crate::format::{load_graph, load_spectrum, save_graph, save_spectrum, write_json, Provenance, SpectrumHeader, SCHEMA_VERSION};
use crate::{Error, Result};

fn file_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(crate::config::hex(&<sha2::Sha256 as sha2::Digest>::digest(&bytes)))
}

pub fn generate(params: &GraphParams, size: usize, seed: u64, output: &Path) -> Result<QuantumGraph> {
    let qg = params.build(size, seed)?;
    save_graph(output, &qg)?;
    Ok(qg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub k_min: f64,
    pub k_max: Option<f64>,
    pub n_eigen: Option<usize>,
    pub tol: f64,
}

/// Solves a saved graph; writes the spectrum and optionally the entropy CSV.
pub fn spectrum(graph: &Path, window: Window, output: &Path, csv: Option<&Path>) -> Result<usize> {
    if window.k_max.is_none() && window.n_eigen.is_none() {
        return Err(Error::Config("one of --k-max or --n-eigen is required".into()));
    }
    let qg = load_graph(graph)?;
    let params = format!(
        "graph_sha256 = {}\nk_min = {}\nk_max = {:?}\nn_eigen = {:?}\ntol = {}\n",
        file_hash(graph)?,
        window.k_min,
        window.k_max,
        window.n_eigen,
        window.tol
    );
    let prov = Provenance::new(hash_text(&params), None);
    let records = compute_spectrum(&qg, window.k_min, window.k_max, window.n_eigen, window.tol)?;
    let header = SpectrumHeader {
        version: SCHEMA_VERSION.into(),
        bond_count: qg.bond_count(),
        k_min: window.k_min,
        k_max: window.k_max.unwrap_or_else(|| records.last().map_or(window.k_min, |r| r.k)),
        tol: window.tol,
        provenance: prov.clone(),
    };
    save_spectrum(output, &header, &records)?;
    if let Some(csv) = csv {
        write_entropy_csv(csv, &prov, &records, &entropy_reports(&qg, &records)?)?;
    }
    Ok(records.len())
}

fn load_pair(graph: &Path, spectrum: &Path) -> Result<(QuantumGraph, SpectrumHeader, Vec<qgraph_core::EigenpairRecord>)> {
    let qg = load_graph(graph)?;
    let (header, records) = load_spectrum(spectrum)?;
    if header.bond_count != qg.bond_count() {
        return Err(Error::Config(format!(
            "spectrum has {} bonds, graph has {}",
            header.bond_count,
            qg.bond_count()
        )));
    }
    Ok((qg, header, records))
}

pub fn entropy(graph: &Path, spectrum: &Path, output: &Path) -> Result<usize> {
    let (qg, header, records) = load_pair(graph, spectrum)?;
    write_entropy_csv(output, &header.provenance, &records, &entropy_reports(&qg, &records)?)?;
    Ok(records.len())
}

/// Writes the bounds table; violated bounds are reported after writing.
pub fn bounds(graph: &Path, spectrum: &Path, output: &Path) -> Result<BoundsTable> {
    let (qg, header, records) = load_pair(graph, spectrum)?;
    let reports = entropy_reports(&qg, &records)?;
    let table = BoundsTable {
        version: SCHEMA_VERSION.into(),
        provenance: header.provenance,
        label: graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        bond_count: qg.bond_count(),
        eigen_count: records.len(),
        bounds: summarize_bounds(&reports),
    };
    write_json(output, &table)?;
    let bad: Vec<String> = table
        .bounds
        .iter()
        .filter(|b| b.violations > 0)
        .map(|b| format!("{} ({} of {}, min margin {:e})", b.bound_name, b.violations, b.checked, b.min_margin_over_spectrum.unwrap_or(0.0)))
        .collect();
    if bad.is_empty() {
        Ok(table)
    } else {
        Err(Error::BoundViolation { count: table.violations(), summary: bad.join(", ") })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantConstants {
    pub m_variant: &'static str,
    pub log_integral: f64,
    pub c_neumann: f64,
    pub matches_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub reference_log_integral: f64,
    pub reference_c_neumann: f64,
    pub variants: Vec<VariantConstants>,
    pub selected: &'static str,
    /// `∫ P(y) dy` for the selected variant.
    pub density_mass: f64,
    /// `∫ P(y) ln y dy`, which equals `c_neumann` of the selected variant.
    pub density_log_moment: f64,
}

pub fn constants(tol: f64) -> Result<ConstantsReport> {
    let variants = [MVariant::Plain, MVariant::TwoOverSqrtPi]
        .into_iter()
        .map(|v| {
            let c = c_neumann_constant(v, tol)?;
            Ok(VariantConstants {
                m_variant: m_variant_name(v),
                log_integral: c.integral,
                c_neumann: c.c,
                matches_reference: (c.integral - REFERENCE_LOG_INTEGRAL).abs() < 1e-6,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantsReport {
        reference_log_integral: REFERENCE_LOG_INTEGRAL,
        reference_c_neumann: REFERENCE_C_NEUMANN,
        variants,
        selected: m_variant_name(DEFAULT_M_VARIANT),
        density_mass: limit_mass(DEFAULT_M_VARIANT, 1e-9)?,
        density_log_moment: limit_log_moment(DEFAULT_M_VARIANT, 1e-9)?,
    })
}

impl fmt::Display for ConstantsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "reference: integral = {}, C = {}", self.reference_log_integral, self.reference_c_neumann)?;
        for v in &self.variants {
            writeln!(
                f,
                "{:<18} integral = {:.15}  C = {:.15}  {}",
                v.m_variant,
                v.log_integral,
                v.c_neumann,
                if v.matches_reference { "matches" } else { "differs" }
            )?;
        }
        writeln!(f, "selected: {}", self.selected)?;
        writeln!(f, "int P(y) dy      = {:.12}", self.density_mass)?;
        write!(f, "int P(y) ln y dy = {:.12}", self.density_log_moment)
    }
}
