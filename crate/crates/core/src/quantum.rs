//! Quantum graphs and their bond scattering matrix.
//!
//! `U(k)` maps incoming amplitudes to outgoing ones: for a bond
//! `[i, j]` leaving `i` and a bond `[j', i]` arriving at `i`,
//!
//! ```text
//! U(k)[[i,j], [j',i]] = σ^(i)_{j j'} · e^{ik L_{j'i}}
//! ```
//!
//! so `U(k) = Σ · D(k)` with `D = diag(e^{ikL_b})` and `det U = det Σ · e^{2ik L_tot}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::graph::{BondIndex, EdgeLengths, Graph};
use crate::linalg::{self, cis};
use crate::scattering::{Boundary, VertexSMatrix};
use crate::{Error, Result};

/// Default cap on the number of enumerated orbits.
pub const DEFAULT_PATH_CAP: usize = 10_000_000;

/// Graph with edge lengths and vertex S-matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGraph {
    graph: Graph,
    bonds: BondIndex,
    lengths: EdgeLengths,
    smatrices: Vec<VertexSMatrix>,
    bond_lengths: Vec<f64>,
    // successors[b_in] = [(b_out, σ amplitude)], all outgoing bonds at terminus(b_in)
    successors: Vec<Vec<(usize, c64)>>,
}

impl QuantumGraph {
    /// Same boundary condition at every vertex.
    pub fn new(graph: Graph, lengths: EdgeLengths, boundary: Boundary) -> Result<Self> {
        let smatrices = (0..graph.vertex_count())
            .map(|v| boundary.for_degree(graph.degree(v)))
            .collect::<Result<Vec<_>>>()?;
        Self::with_smatrices(graph, lengths, smatrices)
    }

    pub fn with_smatrices(
        graph: Graph,
        lengths: EdgeLengths,
        smatrices: Vec<VertexSMatrix>,
    ) -> Result<Self> {
        if lengths.len() != graph.edge_count() {
            return Err(Error::param(format!(
                "{} lengths supplied for {} edges",
                lengths.len(),
                graph.edge_count()
            )));
        }
        if smatrices.len() != graph.vertex_count() {
            return Err(Error::param("one S-matrix per vertex is required"));
        }
        for (v, s) in smatrices.iter().enumerate() {
            if s.degree() != graph.degree(v) {
                return Err(Error::param(format!(
                    "vertex {v} has degree {} but its S-matrix has dimension {}",
                    graph.degree(v),
                    s.degree()
                )));
            }
        }
        let bonds = BondIndex::new(&graph);
        let bond_lengths = lengths.bond_lengths();
        let successors = (0..bonds.len())
            .map(|b_in| {
                let i = bonds.terminus(b_in);
                let col = bonds.port(bonds.reverse(b_in));
                let s = &smatrices[i];
                bonds.outgoing(i).iter().map(|&b_out| (b_out, s.get(bonds.port(b_out), col))).collect()
            })
            .collect();
        Ok(QuantumGraph { graph, bonds, lengths, smatrices, bond_lengths, successors })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn bonds(&self) -> &BondIndex {
        &self.bonds
    }

    pub fn lengths(&self) -> &EdgeLengths {
        &self.lengths
    }

    pub fn smatrices(&self) -> &[VertexSMatrix] {
        &self.smatrices
    }

    /// `B`.
    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn bond_lengths(&self) -> &[f64] {
        &self.bond_lengths
    }

    /// `(b_out, σ)` pairs reachable from incoming bond `b_in`.
    pub fn successors(&self, b_in: usize) -> &[(usize, c64)] {
        &self.successors[b_in]
    }

    /// True when no vertex allows backscattering.
    pub fn forbids_backscattering(&self) -> bool {
        self.smatrices.iter().all(VertexSMatrix::forbids_backscattering)
    }

    /// `max |u_{bb'}|²`, independent of `k`.
    pub fn max_transition_probability(&self) -> f64 {
        self.successors.iter().flatten().map(|(_, s)| s.norm_sqr()).fold(0.0, f64::max)
    }

    /// `U(k) a` without forming the matrix.
    pub fn apply_u(&self, k: f64, a: &[c64]) -> Vec<c64> {
        let mut out = vec![c64::new(0.0, 0.0); self.bond_count()];
        for (b_in, succ) in self.successors.iter().enumerate() {
            let x = a[b_in] * cis(k * self.bond_lengths[b_in]);
            for &(b_out, s) in succ {
                out[b_out] += s * x;
            }
        }
        out
    }

    /// `‖U(k) a - a‖`.
    pub fn residual(&self, k: f64, a: &[c64]) -> f64 {
        let ua = self.apply_u(k, a);
        libm::sqrt(ua.iter().zip(a).map(|(x, y)| (x - y).norm_sqr()).sum())
    }
}

/// Dense `B × B` matrix on bond space.
#[derive(Debug, Clone, PartialEq)]
pub struct BondMatrix<T = c64> {
    pub entries: Mat<T>,
    /// Wavenumber the matrix was built at, if it depends on one.
    pub k: Option<f64>,
}

impl BondMatrix<c64> {
    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(self.entries.as_ref())
    }
}

impl BondMatrix<f64> {
    /// Largest deviation of a row or column sum from 1, or of an entry below 0.
    pub fn stochastic_deviation(&self) -> f64 {
        let m = &self.entries;
        let n = m.nrows();
        let mut dev = 0.0f64;
        for i in 0..n {
            let (mut row, mut col) = (0.0, 0.0);
            for j in 0..n {
                row += m[(i, j)];
                col += m[(j, i)];
                dev = dev.max(-m[(i, j)]);
            }
            dev = dev.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        dev
    }
}

pub fn bond_scattering_matrix(qg: &QuantumGraph, k: f64) -> BondMatrix {
    let n = qg.bond_count();
    let mut u = Mat::<c64>::zeros(n, n);
    for (b_in, succ) in qg.successors.iter().enumerate() {
        let phase = cis(k * qg.bond_lengths[b_in]);
        for &(b_out, s) in succ {
            u[(b_out, b_in)] = s * phase;
        }
    }
    BondMatrix { entries: u, k: Some(k) }
}

/// `m_{bb'} = |u_{bb'}|²`.
pub fn markov_matrix(qg: &QuantumGraph) -> BondMatrix<f64> {
    let n = qg.bond_count();
    let mut m = Mat::<f64>::zeros(n, n);
    for (b_in, succ) in qg.successors.iter().enumerate() {
        for &(b_out, s) in succ {
            m[(b_out, b_in)] = s.norm_sqr();
        }
    }
    BondMatrix { entries: m, k: None }
}

/// Largest eigenvalue modulus of `M` after removing one eigenvalue `1`.
pub fn markov_spectral_gap(m: &BondMatrix<f64>) -> Result<f64> {
    let mut eig = linalg::eigenvalues_real(m.entries.as_ref())?;
    if eig.len() <= 1 {
        return Ok(0.0);
    }
    let one = eig
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, z)| {
            let d = (z - c64::new(1.0, 0.0)).norm();
            if d < acc.1 {
                (i, d)
            } else {
                acc
            }
        })
        .0;
    eig.swap_remove(one);
    Ok(eig.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).min(1.0))
}

fn subtract_uniform(m: &mut Mat<f64>) {
    let inv = 1.0 / m.nrows() as f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] -= inv;
        }
    }
}

/// `‖M^t - ee^T/B‖₂`.
pub fn mixing_deviation(m: &BondMatrix<f64>, t: usize) -> Result<f64> {
    let mut p = linalg::mat_pow(m.entries.as_ref(), t);
    subtract_uniform(&mut p);
    linalg::operator_norm(p.as_ref())
}

/// `‖R‖₂` with `R = M - ee^T/B`.
pub fn markov_mixing_norm(m: &BondMatrix<f64>) -> Result<f64> {
    mixing_deviation(m, 1)
}

/// `(U(k)^t)_{b, b2}` as an explicit sum over orbits from `b2` to `b`.
pub fn orbit_sum_entry(qg: &QuantumGraph, k: f64, b: usize, b2: usize, t: usize) -> Result<c64> {
    Ok(orbit_sums_from(qg, k, b2, t, DEFAULT_PATH_CAP)?[b])
}

/// Orbit sums from `b2` to every bond, `t ≥ 1` transitions.
///
/// Each orbit `b2 = b_0 → … → b_t` contributes `Π σ · e^{ik(L_{b_0}+…+L_{b_{t-1}})}`.
/// When no vertex backscatters only non-backtracking orbits are visited.
pub fn orbit_sums_from(
    qg: &QuantumGraph,
    k: f64,
    b2: usize,
    t: usize,
    cap: usize,
) -> Result<Vec<c64>> {
    if t == 0 {
        return Err(Error::param("orbit length must be at least 1"));
    }
    let skip_reversal = qg.forbids_backscattering();
    let mut out = vec![c64::new(0.0, 0.0); qg.bond_count()];
    let mut visited = 0usize;
    // explicit DFS stack: (bond, steps taken, amplitude, accumulated length)
    let mut stack = vec![(b2, 0usize, c64::new(1.0, 0.0), 0.0f64)];
    while let Some((bond, steps, amp, len)) = stack.pop() {
        if steps == t {
            visited += 1;
            if visited > cap {
                return Err(Error::PathCapExceeded { cap });
            }
            out[bond] += amp * cis(k * len);
            continue;
        }
        let rev = bond ^ 1;
        let len = len + qg.bond_lengths[bond];
        for &(next, s) in &qg.successors[bond] {
            if skip_reversal && next == rev {
                continue;
            }
            stack.push((next, steps + 1, amp * s, len));
        }
    }
    Ok(out)
}

/// `det(U(k) - I)`.
pub fn secular_function(qg: &QuantumGraph, k: f64) -> c64 {
    let mut u = bond_scattering_matrix(qg, k).entries;
    for i in 0..u.nrows() {
        u[(i, i)] -= c64::new(1.0, 0.0);
    }
    u.determinant()
}

/// Sorted eigenphases of `U(k)` in `[0, 2π)`.
pub fn eigenphases(qg: &QuantumGraph, k: f64) -> Result<Vec<f64>> {
    let u = bond_scattering_matrix(qg, k);
    let eig = linalg::eigenvalues(u.entries.as_ref()).map_err(|_| {
        Error::numerical(k, "eigenvalue iteration for U(k) did not converge")
    })?;
    let mut phases: Vec<f64> = eig.into_iter().map(linalg::phase).collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// Eigenphases with unit eigenvectors, sorted by phase.
pub fn eigenphases_with_vectors(qg: &QuantumGraph, k: f64) -> Result<Vec<(f64, Vec<c64>)>> {
    let u = bond_scattering_matrix(qg, k);
    let pairs = linalg::eigenpairs(u.entries.as_ref())
        .map_err(|_| Error::numerical(k, "eigendecomposition of U(k) did not converge"))?;
    let mut out: Vec<(f64, Vec<c64>)> =
        pairs.into_iter().map(|(z, v)| (linalg::phase(z), v)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// `dθ/dk = ⟨a, L a⟩` for a unit eigenvector `a` of `U(k)`.
pub fn phase_velocity(qg: &QuantumGraph, a: &[c64]) -> f64 {
    let w: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    a.iter().zip(&qg.bond_lengths).map(|(z, l)| l * z.norm_sqr()).sum::<f64>() / w
}
