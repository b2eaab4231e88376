//! Quantum graphs with Neumann and equi-transmitting vertex scattering.
//!
//! A quantum graph is a simple combinatorial graph whose edges carry
//! lengths and whose vertices carry unitary scattering matrices. Laplacian
//! eigenvalues `k_n` are the wavenumbers at which the bond scattering
//! matrix `U(k)` has an eigenvalue `1`; the matching eigenvector `a` holds
//! the plane-wave amplitude on every oriented edge (bond).
//!
//! The crate is organised as:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | graphs, bond indexing, generators, girth, spectral gap, non-backtracking path counts, random lengths |
//! | [`scattering`] | Neumann, equi-transmitting (Legendre symbol) and custom vertex S-matrices |
//! | [`quantum`] | `U(k)`, the Markov matrix, orbit sums, secular function, eigenphases |
//! | [`solver`] | eigenvalue search by eigenphase counting and tracking |
//! | [`moments`] | Monte-Carlo moments of `U(k)^t` over random edge lengths |
//! | [`entropy`] | entropy, variance, weighted length, uncertainty bounds |
//! | [`star`] | closed-form Neumann star pipeline and the large-star constants |
//! | [`quadrature`] | adaptive Gauss–Kronrod integration |
//!
//! Everything here is `no_std` with `alloc`; file formats, the CLI and the
//! experiment runner live in the `qgraph` crate.

#![no_std]

extern crate alloc;

pub mod constants;
pub mod entropy;
mod error;
pub mod graph;
pub mod linalg;
pub mod moments;
pub mod quadrature;
pub mod quantum;
pub mod scattering;
pub mod solver;
pub mod star;

pub use error::{Error, Result};
pub use faer::c64;
pub use graph::{BondIndex, EdgeLengths, Girth, Graph, LengthDistribution};
pub use quantum::{BondMatrix, QuantumGraph};
pub use scattering::{Boundary, SMatrixKind, VertexSMatrix};
pub use solver::{EigenpairRecord, SolverOptions};
