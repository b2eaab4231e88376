//! JSON and CSV artifacts.
//!
//! Every JSON document carries `"version": "1"`; spectra are JSON lines
//! whose first line is a header object. CSV files start with `#` comment
//! lines naming the code version, spec hash and seed, then a column row.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qgraph_core::graph::{EdgeLengths, Graph};
use qgraph_core::scattering::{restore_smatrix, SMatrixKind, VertexSMatrix};
use qgraph_core::solver::EigenpairRecord;
use qgraph_core::{c64, QuantumGraph};

use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";
pub const CODE_VERSION: &str = concat!("qgraph ", env!("CARGO_PKG_VERSION"));

/// Where an output file came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_hash: String,
    pub seed: Option<u64>,
    pub code_version: String,
}

impl Provenance {
    pub fn new(spec_hash: impl Into<String>, seed: Option<u64>) -> Self {
        Provenance { spec_hash: spec_hash.into(), seed, code_version: CODE_VERSION.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SMatrixJson {
    pub kind: String,
    pub degree: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl From<&VertexSMatrix> for SMatrixJson {
    fn from(s: &VertexSMatrix) -> Self {
        let (kind, p) = match s.kind() {
            SMatrixKind::Neumann => ("neumann", None),
            SMatrixKind::EquiTransmitting { p } => ("equitransmitting", Some(p)),
            SMatrixKind::Custom => ("custom", None),
        };
        SMatrixJson {
            kind: kind.into(),
            degree: s.degree(),
            entries: s.entries().iter().map(|z| [z.re, z.im]).collect(),
            p,
        }
    }
}

impl SMatrixJson {
    pub fn to_smatrix(&self) -> Result<VertexSMatrix> {
        let kind = match (self.kind.as_str(), self.p) {
            ("neumann", _) => SMatrixKind::Neumann,
            ("equitransmitting", Some(p)) => SMatrixKind::EquiTransmitting { p },
            ("equitransmitting", None) => return Err(Error::Config("equitransmitting S-matrix without p".into())),
            ("custom", _) => SMatrixKind::Custom,
            (other, _) => return Err(Error::Config(format!("unknown S-matrix kind {other:?}"))),
        };
        let entries = self.entries.iter().map(|&[re, im]| c64::new(re, im)).collect();
        Ok(restore_smatrix(kind, self.degree, entries)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub version: String,
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    pub lengths: Vec<f64>,
    pub smatrices: Vec<SMatrixJson>,
}

impl From<&QuantumGraph> for GraphJson {
    fn from(qg: &QuantumGraph) -> Self {
        GraphJson {
            version: SCHEMA_VERSION.into(),
            vertex_count: qg.graph().vertex_count(),
            edges: qg.graph().edges().iter().map(|&(a, b)| [a, b]).collect(),
            lengths: qg.lengths().as_slice().to_vec(),
            smatrices: qg.smatrices().iter().map(SMatrixJson::from).collect(),
        }
    }
}

impl GraphJson {
    pub fn to_quantum_graph(&self) -> Result<QuantumGraph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::from_edges(self.vertex_count, &edges)?;
        let lengths = EdgeLengths::new(self.lengths.clone())?;
        let s = self.smatrices.iter().map(SMatrixJson::to_smatrix).collect::<Result<Vec<_>>>()?;
        Ok(QuantumGraph::with_smatrices(graph, lengths, s)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumHeader {
    pub version: String,
    pub bond_count: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub tol: f64,
    #[serde(flatten)]
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub index: usize,
    pub k: f64,
    pub residual: f64,
    pub multiplicity: usize,
    pub a: Vec<[f64; 2]>,
}

impl From<&EigenpairRecord> for RecordJson {
    fn from(r: &EigenpairRecord) -> Self {
        RecordJson {
            index: r.index,
            k: r.k,
            residual: r.residual,
            multiplicity: r.multiplicity,
            a: r.a.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl From<RecordJson> for EigenpairRecord {
    fn from(r: RecordJson) -> Self {
        EigenpairRecord {
            index: r.index,
            k: r.k,
            residual: r.residual,
            multiplicity: r.multiplicity,
            a: r.a.into_iter().map(|[re, im]| c64::new(re, im)).collect(),
        }
    }
}

fn check_version(path: &Path, value: &serde_json::Value) -> Result<()> {
    match value.get("version").and_then(|v| v.as_str()) {
        Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(Error::SchemaVersion { found: other.into(), expected: SCHEMA_VERSION }),
        None => Err(Error::Format { path: path.into(), message: "missing \"version\" field".into() }),
    }
}

fn parse_versioned<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Format { path: path.into(), message: e.to_string() })?;
    check_version(path, &value)?;
    serde_json::from_value(value).map_err(|e| Error::Format { path: path.into(), message: e.to_string() })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Reads a JSON document after checking its `version` field.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_versioned(path, &read(path)?)
}

pub fn save_graph(path: &Path, qg: &QuantumGraph) -> Result<()> {
    write_json(path, &GraphJson::from(qg))
}

pub fn load_graph(path: &Path) -> Result<QuantumGraph> {
    read_json::<GraphJson>(path)?.to_quantum_graph()
}

pub fn save_spectrum(path: &Path, header: &SpectrumHeader, records: &[EigenpairRecord]) -> Result<()> {
    let mut w = create(path)?;
    let mut line = serde_json::to_string(header).expect("serialisable");
    line.push('\n');
    for r in records {
        line.push_str(&serde_json::to_string(&RecordJson::from(r)).expect("serialisable"));
        line.push('\n');
    }
    w.write_all(line.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn load_spectrum(path: &Path) -> Result<(SpectrumHeader, Vec<EigenpairRecord>)> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Format { path: path.into(), message: "empty spectrum file".into() })?
        .map_err(|e| Error::io(path, e))?;
    let header: SpectrumHeader = parse_versioned(path, &first)?;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RecordJson = serde_json::from_str(&line)
            .map_err(|e| Error::Format { path: path.into(), message: format!("line {}: {e}", i + 2) })?;
        if r.a.len() != header.bond_count {
            return Err(Error::Format {
                path: path.into(),
                message: format!("line {}: vector has {} entries, header says {}", i + 2, r.a.len(), header.bond_count),
            });
        }
        records.push(r.into());
    }
    Ok((header, records))
}

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

/// 15 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn write_csv(path: &Path, provenance: &Provenance, columns: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# code_version={}", provenance.code_version).unwrap();
    writeln!(out, "# schema_version={SCHEMA_VERSION}").unwrap();
    writeln!(out, "# spec_hash={}", provenance.spec_hash).unwrap();
    match provenance.seed {
        Some(s) => writeln!(out, "# seed={s}").unwrap(),
        None => writeln!(out, "# seed=none").unwrap(),
    }
    writeln!(out, "{}", columns.join(",")).unwrap();
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(x) => format_float(*x),
            })
            .collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    let mut w = create(path)?;
    w.write_all(out.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// A parsed CSV file: header comments as `key=value` pairs, columns, rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Values of a numeric column.
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = read(path)?;
    let mut meta: Vec<(String, String)> = Vec::new();
    let mut columns = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.trim().split_once('=') {
                meta.push((k.into(), v.into()));
            }
            continue;
        }
        let cells: Vec<String> = line.split(',').map(String::from).collect();
        match &columns {
            None => columns = Some(cells),
            Some(cols) => {
                if cells.len() != cols.len() {
                    return Err(Error::Format { path: path.into(), message: format!("row has {} cells, expected {}", cells.len(), cols.len()) });
                }
                rows.push(cells)
            }
        }
    }
    let columns = columns.ok_or_else(|| Error::Format { path: path.into(), message: "no column row".into() })?;
    match meta.iter().find(|(k, _)| k == "schema_version") {
        Some((_, v)) if v == SCHEMA_VERSION => {}
        Some((_, v)) => return Err(Error::SchemaVersion { found: v.clone(), expected: SCHEMA_VERSION }),
        None => return Err(Error::Format { path: path.into(), message: "missing schema_version comment".into() }),
    }
    Ok(CsvTable { meta, columns, rows })
}
