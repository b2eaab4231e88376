//! Experiment specifications.
//!
//! A config file is flat `key = value` text with `#` comments. The same
//! keys are accepted as command-line flags, which override the file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use qgraph_core::graph::LengthDistribution;
use qgraph_core::scattering::{is_odd_prime, Boundary};
use qgraph_core::star::MVariant;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Spectrum,
    EntropyHistogram,
    MeanEntropyVsSize,
    StarAverage,
    BoundsReport,
    Localization,
}

impl ExperimentKind {
    pub const ALL: [(&'static str, ExperimentKind); 6] = [
        ("spectrum", ExperimentKind::Spectrum),
        ("entropy-histogram", ExperimentKind::EntropyHistogram),
        ("mean-entropy-vs-size", ExperimentKind::MeanEntropyVsSize),
        ("star-average", ExperimentKind::StarAverage),
        ("bounds-report", ExperimentKind::BoundsReport),
        ("localization", ExperimentKind::Localization),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, k)| *k == self).unwrap().0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Random regular graphs; sizes are vertex counts.
    Regular,
    /// Stars with Neumann leaves; sizes are edge counts.
    Star,
}

/// Every recognised key with its default (`None`: required or unset).
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("kind", None),
    ("family", Some("regular")),
    ("sizes", None),
    ("degree", Some("3")),
    ("boundary", Some("neumann")),
    ("length_lo", Some("1")),
    ("length_hi", Some("2")),
    ("k_min", Some("0.1")),
    ("k_max", None),
    ("n_eigen", None),
    ("seeds", Some("1")),
    ("tol", Some("1e-10")),
    ("longest", None),
    ("m_variant", Some("plain")),
    ("mass_per_edge", Some("false")),
    ("output", Some("out")),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub family: Family,
    pub sizes: Vec<usize>,
    pub degree: usize,
    pub boundary: Boundary,
    pub lengths: LengthDistribution,
    pub k_min: f64,
    pub k_max: Option<f64>,
    pub n_eigen: Option<usize>,
    pub seeds: Vec<u64>,
    pub tol: f64,
    /// Localization: length of the one edge appended to the sampled ones.
    pub longest: Option<f64>,
    pub m_variant: MVariant,
    pub mass_per_edge: bool,
    pub output: PathBuf,
    resolved: BTreeMap<String, String>,
}

/// Parses `key = value` lines.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s.trim())).collect()
}

fn equitransmitting_degree(d: usize) -> bool {
    d <= 2 || is_odd_prime(d as u64 - 1)
}

impl ExperimentSpec {
    /// Resolves defaults and validates everything before any computation.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        for key in map.keys() {
            if !KEYS.iter().any(|(k, _)| k == key) {
                return Err(Error::Config(format!("unknown key {key:?}")));
            }
        }
        let mut resolved = BTreeMap::new();
        for (key, default) in KEYS {
            if let Some(v) = map.get(*key).map(String::as_str).or(*default) {
                resolved.insert(key.to_string(), v.to_string());
            }
        }
        let get = |k: &str| resolved.get(k).map(String::as_str);
        let required = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing key {k:?}")));

        let kind_name = required("kind")?;
        let kind = ExperimentKind::ALL
            .iter()
            .find(|(n, _)| *n == kind_name)
            .map(|(_, k)| *k)
            .ok_or_else(|| Error::Config(format!("unknown kind {kind_name:?}")))?;
        let family = match required("family")? {
            "regular" => Family::Regular,
            "star" => Family::Star,
            f => return Err(Error::Config(format!("unknown family {f:?}"))),
        };
        let boundary = match required("boundary")? {
            "neumann" => Boundary::Neumann,
            "equitransmitting" => Boundary::EquiTransmitting,
            b => return Err(Error::Config(format!("unknown boundary {b:?}"))),
        };
        let m_variant = match required("m_variant")? {
            "plain" => MVariant::Plain,
            "two-over-sqrt-pi" => MVariant::TwoOverSqrtPi,
            m => return Err(Error::Config(format!("unknown m_variant {m:?}"))),
        };
        let sizes: Vec<usize> = parse_list("sizes", required("sizes")?)?;
        let seeds: Vec<u64> = parse_list("seeds", required("seeds")?)?;
        let degree: usize = parse("degree", required("degree")?)?;
        let lo: f64 = parse("length_lo", required("length_lo")?)?;
        let hi: f64 = parse("length_hi", required("length_hi")?)?;
        let lengths = LengthDistribution::uniform(lo, hi).map_err(|e| Error::Config(e.to_string()))?;
        let k_min: f64 = parse("k_min", required("k_min")?)?;
        let k_max: Option<f64> = get("k_max").map(|v| parse("k_max", v)).transpose()?;
        let n_eigen: Option<usize> = get("n_eigen").map(|v| parse("n_eigen", v)).transpose()?;
        let tol: f64 = parse("tol", required("tol")?)?;
        let longest: Option<f64> = get("longest").map(|v| parse("longest", v)).transpose()?;
        let mass_per_edge: bool = parse("mass_per_edge", required("mass_per_edge")?)?;
        let output = PathBuf::from(required("output")?);

        let fail = |m: String| Err(Error::Config(m));
        if sizes.is_empty() || sizes.contains(&0) {
            return fail("sizes must be a non-empty list of positive integers".into());
        }
        if seeds.is_empty() {
            return fail("seeds must not be empty".into());
        }
        if !(k_min >= 0.0 && k_min.is_finite()) {
            return fail(format!("k_min = {k_min} must be finite and non-negative"));
        }
        if let Some(k) = k_max {
            if !(k > k_min && k.is_finite()) {
                return fail(format!("k_max = {k} must exceed k_min = {k_min}"));
            }
        }
        if n_eigen == Some(0) {
            return fail("n_eigen must be positive".into());
        }
        if !(tol > 0.0 && tol <= 1e-6) {
            return fail(format!("tol = {tol} must lie in (0, 1e-6]"));
        }
        let needs_window = !matches!(kind, ExperimentKind::Localization);
        if needs_window && k_max.is_none() && n_eigen.is_none() {
            return fail("one of k_max or n_eigen is required".into());
        }
        match family {
            Family::Regular => {
                for &n in &sizes {
                    if degree == 0 || degree >= n || (n * degree) % 2 == 1 || (degree == 1 && n != 2) {
                        return fail(format!("no connected {degree}-regular graph on {n} vertices"));
                    }
                }
                if boundary == Boundary::EquiTransmitting && !equitransmitting_degree(degree) {
                    return fail(format!("equitransmitting needs degree - 1 an odd prime, got degree {degree}"));
                }
            }
            Family::Star => {
                if boundary == Boundary::EquiTransmitting {
                    if let Some(e) = sizes.iter().find(|&&e| !equitransmitting_degree(e)) {
                        return fail(format!("equitransmitting star with {e} edges: {e} - 1 is not an odd prime"));
                    }
                }
            }
        }
        match kind {
            ExperimentKind::StarAverage | ExperimentKind::Localization => {
                if family != Family::Star || boundary != Boundary::Neumann {
                    return fail(format!("{} needs family = star and boundary = neumann", kind.name()));
                }
                if kind == ExperimentKind::StarAverage && sizes.contains(&1) {
                    return fail("star-average needs at least two edges".into());
                }
            }
            ExperimentKind::MeanEntropyVsSize => {
                let mut distinct = sizes.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 2 {
                    return fail("mean-entropy-vs-size needs at least two distinct sizes".into());
                }
            }
            _ => {}
        }
        if let Some(l) = longest {
            if kind != ExperimentKind::Localization {
                return fail("longest only applies to localization".into());
            }
            if !(l > lo && l.is_finite()) {
                return fail(format!("longest = {l} must exceed length_lo = {lo}"));
            }
        }
        Ok(ExperimentSpec {
            kind,
            family,
            sizes,
            degree,
            boundary,
            lengths,
            k_min,
            k_max,
            n_eigen,
            seeds,
            tol,
            longest,
            m_variant,
            mass_per_edge,
            output,
            resolved,
        })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_map(&parse_config(text)?)
    }

    /// Resolved keys, one `key = value` line each, sorted.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.resolved {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }

    /// SHA-256 of [`canonical`](Self::canonical) without the output path.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.resolved.iter().filter(|(k, _)| *k != "output") {
            h.update(format!("{k} = {v}\n"));
        }
        hex(&h.finalize())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of arbitrary parameter text.
pub fn hash_text(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}
