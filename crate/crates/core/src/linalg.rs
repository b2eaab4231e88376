//! Dense linear-algebra helpers on top of `faer`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef, Side};

use crate::{Error, Result};

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> c64 {
    c64::new(libm::cos(theta), libm::sin(theta))
}

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta - TAU * libm::floor(theta / TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `(-π, π]`.
#[inline]
pub fn wrap_signed(theta: f64) -> f64 {
    let r = wrap_phase(theta);
    if r > core::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

/// `arg z` in `[0, 2π)`.
#[inline]
pub fn phase(z: c64) -> f64 {
    wrap_phase(libm::atan2(z.im, z.re))
}

pub fn norm(v: &[c64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// `⟨x, y⟩ = Σ conj(x_i) y_i`.
pub fn inner(x: &[c64], y: &[c64]) -> c64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn normalize(v: &mut [c64]) {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

pub fn mat_vec(m: MatRef<'_, c64>, x: &[c64]) -> Vec<c64> {
    let n = m.nrows();
    let mut out = vec![c64::new(0.0, 0.0); n];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj == c64::new(0.0, 0.0) {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * xj;
        }
    }
    out
}

/// `max |(M M*)_{ij} - δ_ij|`.
pub fn unitarity_deviation(m: MatRef<'_, c64>) -> f64 {
    let prod = m * m.adjoint();
    let mut dev = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((prod[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// Largest singular value.
pub fn operator_norm(m: MatRef<'_, f64>) -> Result<f64> {
    let s = m
        .singular_values()
        .map_err(|_| Error::numerical(f64::NAN, "singular value decomposition did not converge"))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

pub fn mat_pow<T>(m: MatRef<'_, T>, t: usize) -> Mat<T>
where
    T: faer::traits::ComplexField,
{
    let n = m.nrows();
    let mut out = Mat::<T>::identity(n, n);
    let mut base = m.to_owned();
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            out = &out * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    out
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<c64>> {
    m.eigenvalues()
        .map_err(|_| Error::numerical(f64::NAN, "eigenvalue iteration did not converge"))
}

/// Eigenvalues of a general real matrix.
pub fn eigenvalues_real(m: MatRef<'_, f64>) -> Result<Vec<c64>> {
    m.eigenvalues()
        .map_err(|_| Error::numerical(f64::NAN, "eigenvalue iteration did not converge"))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::numerical(f64::NAN, "symmetric eigensolver did not converge"))
}

/// Eigenpairs of a general complex matrix; eigenvectors normalised to 1.
pub fn eigenpairs(m: MatRef<'_, c64>) -> Result<Vec<(c64, Vec<c64>)>> {
    let evd = m
        .eigen()
        .map_err(|_| Error::numerical(f64::NAN, "eigendecomposition did not converge"))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = m.nrows();
    Ok((0..n)
        .map(|j| {
            let mut v: Vec<c64> = (0..n).map(|i| u[(i, j)]).collect();
            normalize(&mut v);
            (s[j], v)
        })
        .collect())
}

/// Converged eigenpair from [`inverse_iteration`].
#[derive(Debug, Clone)]
pub struct ShiftedEigenpair {
    pub eigenvalue: c64,
    pub vector: Vec<c64>,
    pub residual: f64,
}

/// Shift-and-invert iteration for the eigenvalue of `m` nearest `shift`.
///
/// `start` seeds the iteration; the returned vector has unit norm and the
/// eigenvalue is its Rayleigh quotient.
pub fn inverse_iteration(
    m: MatRef<'_, c64>,
    shift: c64,
    start: &[c64],
    max_iter: usize,
) -> Result<ShiftedEigenpair> {
    let n = m.nrows();
    let mut mu = shift;
    for attempt in 0..4 {
        let mut shifted = m.to_owned();
        for i in 0..n {
            shifted[(i, i)] -= mu;
        }
        let lu = shifted.partial_piv_lu();
        let mut x: Vec<c64> = start.to_vec();
        normalize(&mut x);
        let mut best: Option<ShiftedEigenpair> = None;
        let mut finite = true;
        for _ in 0..max_iter.max(1) {
            let rhs = Mat::<c64>::from_fn(n, 1, |i, _| x[i]);
            let sol = lu.solve(&rhs);
            let mut y: Vec<c64> = (0..n).map(|i| sol[(i, 0)]).collect();
            if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                finite = false;
                break;
            }
            normalize(&mut y);
            let my = mat_vec(m, &y);
            let lambda = inner(&y, &my);
            let residual = libm::sqrt(
                my.iter()
                    .zip(&y)
                    .map(|(a, b)| (a - lambda * b).norm_sqr())
                    .sum::<f64>(),
            );
            x = y;
            let done = residual < 1e-13;
            best = Some(ShiftedEigenpair { eigenvalue: lambda, vector: x.clone(), residual });
            if done {
                break;
            }
        }
        if finite {
            if let Some(b) = best {
                return Ok(b);
            }
        }
        // exactly singular shift: nudge it off the eigenvalue
        mu = shift * cis(1e-13 * (attempt as f64 + 1.0));
    }
    Err(Error::numerical(f64::NAN, "inverse iteration produced non-finite values"))
}
