//! Vertex scattering matrices.
//!
//! Rows and columns are indexed by the sorted neighbour list of the vertex:
//! row `j` is the outgoing bond towards neighbour `j`, column `j'` the
//! incoming bond from neighbour `j'`, so the diagonal is backscattering.

use alloc::format;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::{linalg, Error, Result};

/// Unitarity tolerance for the exact constructions.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Unitarity tolerance for user-supplied matrices.
pub const CUSTOM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SMatrixKind {
    Neumann,
    /// Built from the Legendre symbol mod the odd prime `p`; degree `p + 1`.
    EquiTransmitting { p: u64 },
    Custom,
}

/// Unitary `d × d` vertex S-matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSMatrix {
    kind: SMatrixKind,
    degree: usize,
    entries: Vec<c64>,
}

impl VertexSMatrix {
    pub fn kind(&self) -> SMatrixKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[c64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.entries[row * self.degree + col]
    }

    pub fn to_mat(&self) -> Mat<c64> {
        Mat::from_fn(self.degree, self.degree, |i, j| self.get(i, j))
    }

    /// `max |σσ* - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(self.to_mat().as_ref())
    }

    /// True when every diagonal entry vanishes, i.e. there is no backscattering.
    pub fn forbids_backscattering(&self) -> bool {
        (0..self.degree).all(|i| self.get(i, i).norm() < EXACT_TOLERANCE)
    }
}

/// `σ_{jj'} = 2/d - δ_{jj'}`.
pub fn neumann_smatrix(d: usize) -> Result<VertexSMatrix> {
    if d == 0 {
        return Err(Error::param("vertex degree must be at least 1"));
    }
    let off = 2.0 / d as f64;
    let entries = (0..d * d)
        .map(|idx| {
            let v = if idx / d == idx % d { off - 1.0 } else { off };
            c64::new(v, 0.0)
        })
        .collect();
    Ok(VertexSMatrix { kind: SMatrixKind::Neumann, degree: d, entries })
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut q = 3;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(k / p)` by Euler's criterion.
pub fn legendre_symbol(k: i64, p: u64) -> Result<i8> {
    if !is_odd_prime(p) {
        return Err(Error::param(format!("{p} is not an odd prime")));
    }
    let r = k.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Equi-transmitting matrix of degree `p + 1`:
/// `σ = p^{-1/2} [[0, 1ᵀ], [1, C]]` with `C_{ij} = χ(i - j)`, `i, j ∈ 0..p`.
pub fn equitransmitting_smatrix(p: u64) -> Result<VertexSMatrix> {
    if !is_odd_prime(p) {
        return Err(Error::param(format!("{p} is not an odd prime")));
    }
    let d = p as usize + 1;
    let scale = 1.0 / libm::sqrt(p as f64);
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let v = match (i, j) {
                (0, 0) => 0.0,
                (0, _) | (_, 0) => 1.0,
                _ => legendre_symbol(i as i64 - j as i64, p)? as f64,
            };
            entries.push(c64::new(v * scale, 0.0));
        }
    }
    let s = VertexSMatrix { kind: SMatrixKind::EquiTransmitting { p }, degree: d, entries };
    let deviation = s.unitarity_deviation();
    if deviation > EXACT_TOLERANCE {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(s)
}

/// Accepts any square matrix that is unitary within [`CUSTOM_TOLERANCE`].
pub fn custom_smatrix(degree: usize, entries: Vec<c64>) -> Result<VertexSMatrix> {
    if degree == 0 || entries.len() != degree * degree {
        return Err(Error::param(format!(
            "expected {} entries for degree {degree}, got {}",
            degree * degree,
            entries.len()
        )));
    }
    let s = VertexSMatrix { kind: SMatrixKind::Custom, degree, entries };
    let deviation = s.unitarity_deviation();
    if !(deviation <= CUSTOM_TOLERANCE) {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(s)
}

/// Rebuilds a matrix of a known kind from stored entries, re-validating it.
pub fn restore_smatrix(kind: SMatrixKind, degree: usize, entries: Vec<c64>) -> Result<VertexSMatrix> {
    let mut s = custom_smatrix(degree, entries)?;
    if let SMatrixKind::EquiTransmitting { p } = kind {
        if p as usize + 1 != degree {
            return Err(Error::param(format!("equi-transmitting p = {p} needs degree {}", p + 1)));
        }
    }
    s.kind = kind;
    Ok(s)
}

/// Vertex condition applied uniformly across a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Neumann,
    /// Legendre construction at degree `p + 1`. Degrees 1 and 2 use the
    /// only unitary choices without backscattering freedom, which coincide
    /// with the Neumann matrices `[1]` and `[[0, 1], [1, 0]]`.
    EquiTransmitting,
}

impl Boundary {
    pub fn for_degree(self, d: usize) -> Result<VertexSMatrix> {
        match self {
            Boundary::Neumann => neumann_smatrix(d),
            Boundary::EquiTransmitting => match d {
                0 => Err(Error::param("vertex degree must be at least 1")),
                1 | 2 => neumann_smatrix(d),
                _ if is_odd_prime(d as u64 - 1) => equitransmitting_smatrix(d as u64 - 1),
                _ => Err(Error::param(format!(
                    "no equi-transmitting construction for degree {d}; degree - 1 must be an odd prime"
                ))),
            },
        }
    }
}
