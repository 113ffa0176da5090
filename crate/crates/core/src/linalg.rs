// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra helpers shared by every module.
//!
//! All matrix functions of Hermitian generators go through [`HermitianSpectrum`],
//! so exponentials stay unitary to solver precision.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Kronecker product `a ⊗ b`; the index of `a` is the major one.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn real_diagonal(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| cr(v))))
}

pub fn expectation(op: &CMatrix, psi: &CVector) -> Complex64 {
    psi.dotc(&(op * psi))
}

/// Variance `<A²> - <A>²` of a Hermitian operator in a pure state.
pub fn variance(op: &CMatrix, psi: &CVector) -> f64 {
    let a_psi = op * psi;
    let mean = psi.dotc(&a_psi).re;
    let second = a_psi.dotc(&a_psi).re;
    (second - mean * mean).max(0.0)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector belonging to `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianSpectrum {
    pub fn new(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let n = m.nrows();
        if n == 1 {
            return Ok(Self {
                values: vec![m[(0, 0)].re],
                vectors: CMatrix::identity(1, 1),
            });
        }
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `f(H)` for a complex-valued scalar function applied to the spectrum.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fj = f(v);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.apply_fn(|lambda| Complex64::from_polar(1.0, -lambda * t))
    }

    /// `exp(-i H t) v` without forming the full propagator.
    pub fn evolve(&self, v: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.adjoint() * v;
        for (k, &lambda) in self.values.iter().enumerate() {
            coeffs[k] *= Complex64::from_polar(1.0, -lambda * t);
        }
        &self.vectors * coeffs
    }
}

/// `exp(-i H t)` for Hermitian `H`, via eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(HermitianSpectrum::new(h)?.propagator(t))
}

/// Rotate the phase of a vector so that its largest-magnitude entry is real and positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (k, z) in v.iter().enumerate() {
        // strict comparison with a small margin keeps ties on the first index
        if z.norm() > best_abs + 1e-12 {
            best_abs = z.norm();
            best = k;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let phase = v[best].conj() / best_abs;
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Positive square root of a positive-semidefinite Hermitian matrix; negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    Ok(HermitianSpectrum::new(m)?.apply_fn(|v| cr(v.max(0.0).sqrt())))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_is_spin_major() {
        let a = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, cr(2.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let k = kron(&a, &b);
        // block (1,1) is 2*b
        assert_eq!(k[(2, 3)], cr(2.0));
        assert_eq!(k[(0, 1)], ONE);
        assert_eq!(k[(0, 3)], ZERO);
    }

    #[test]
    fn spectrum_sorted_and_reconstructs() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(1.0), c(0.0, -2.0), c(0.0, 2.0), cr(-1.0)]);
        let s = HermitianSpectrum::new(&m).unwrap();
        assert!(s.values[0] < s.values[1]);
        let back = s.apply_fn(cr);
        assert!(max_abs(&(back - &m)) < 1e-12);
    }

    #[test]
    fn propagator_is_unitary() {
        let m = CMatrix::from_fn(5, 5, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let u = expm_hermitian(&m, 0.37).unwrap();
        let id = CMatrix::identity(5, 5);
        assert!(max_abs(&(u.adjoint() * &u - id)) < 1e-12);
    }

    #[test]
    fn fix_phase_makes_largest_real_positive() {
        let mut v = vec![c(0.1, 0.0), c(0.0, -3.0), c(1.0, 1.0)];
        fix_phase(&mut v);
        assert!((v[1].re - 3.0).abs() < 1e-14 && v[1].im.abs() < 1e-14);
    }
}
