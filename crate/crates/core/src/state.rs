// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Value types shared across the crate: labeled bases, pure states, Hermitian
//! and unitary operators, and validated density matrices.

use num_complex::Complex64;

use crate::boson::FockBasis;
use crate::composite::CompositeBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianSpectrum};
use crate::spin::SpinBasis;

pub const NORM_TOLERANCE: f64 = 1e-10;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Spin(SpinBasis),
    Fock(FockBasis),
    Composite(CompositeBasis),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Spin(b) => b.dim(),
            Basis::Fock(b) => b.dim(),
            Basis::Composite(b) => b.dim(),
        }
    }
}

/// Normalized amplitude vector over a labeled basis.
#[derive(Debug, Clone)]
pub struct PureState {
    basis: Basis,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(basis: Basis, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                actual: amplitudes.len(),
            });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(basis: Basis, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(basis, amplitudes / Complex64::new(norm, 0.0))
    }

    pub(crate) fn from_parts_unchecked(basis: Basis, amplitudes: CVector) -> Self {
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn expectation(&self, op: &HermitianOperator) -> Result<f64> {
        check_dim(op.dim(), self.dim())?;
        Ok(linalg::expectation(op.matrix(), &self.amplitudes).re)
    }

    pub fn variance(&self, op: &HermitianOperator) -> Result<f64> {
        check_dim(op.dim(), self.dim())?;
        Ok(linalg::variance(op.matrix(), &self.amplitudes))
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_unchecked(&self.amplitudes * self.amplitudes.adjoint())
    }

    pub fn apply(&self, u: &UnitaryOperator) -> Result<PureState> {
        check_dim(u.dim(), self.dim())?;
        Ok(Self {
            basis: self.basis.clone(),
            amplitudes: u.matrix() * &self.amplitudes,
        })
    }

    /// Tensor product `self ⊗ aux`, spin-major.
    pub fn product(&self, aux: &PureState) -> Result<PureState> {
        let (Basis::Spin(spin), Basis::Fock(fock)) = (&self.basis, &aux.basis) else {
            return Err(Error::InvalidArgument(
                "product states are built from a spin state and a Fock state".into(),
            ));
        };
        let composite = CompositeBasis::new(*spin, *fock);
        let amps = self.amplitudes.kronecker(&aux.amplitudes);
        Ok(Self {
            basis: Basis::Composite(composite),
            amplitudes: amps,
        })
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(Error::DimensionMismatch { expected, actual })
    } else {
        Ok(())
    }
}

/// Dense Hermitian matrix, optionally labeled (e.g. `"Jz"`) for reporting.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
    label: String,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let defect = linalg::hermiticity_defect(&matrix);
        let scale = linalg::max_abs(&matrix).max(1.0);
        if defect > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self {
            matrix,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn from_unchecked(matrix: CMatrix) -> Self {
        Self {
            matrix,
            label: String::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spectrum(&self) -> Result<HermitianSpectrum> {
        HermitianSpectrum::new(&self.matrix)
    }

    /// `exp(-i H t)`.
    pub fn exp_i(&self, t: f64) -> Result<UnitaryOperator> {
        Ok(UnitaryOperator::from_unchecked(self.spectrum()?.propagator(t)))
    }

    pub fn scaled(&self, factor: f64) -> HermitianOperator {
        Self {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            label: self.label.clone(),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self::from_unchecked(&self.matrix + &other.matrix))
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let n = matrix.nrows();
        let defect = linalg::max_abs(&(matrix.adjoint() * &matrix - CMatrix::identity(n, n)));
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NumericalInstability(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, after: &UnitaryOperator) -> Result<UnitaryOperator> {
        check_dim(self.dim(), after.dim())?;
        Ok(Self {
            matrix: after.matrix() * &self.matrix,
        })
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        linalg::max_abs(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOLERANCE: f64 = 1e-11;
    pub const TRACE_TOLERANCE: f64 = 1e-10;
    pub const EIGENVALUE_FLOOR: f64 = -1e-10;

    /// Validates every density-matrix invariant.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotADensityMatrix("matrix is not square".into()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > Self::HERMITIAN_TOLERANCE {
            return Err(Error::NotADensityMatrix(format!("Hermiticity defect {defect:e}")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > Self::TRACE_TOLERANCE || trace.im.abs() > Self::TRACE_TOLERANCE {
            return Err(Error::NotADensityMatrix(format!("trace {trace}")));
        }
        let spectrum = HermitianSpectrum::new(&matrix)?;
        if let Some(&lowest) = spectrum.values.first() {
            if lowest < Self::EIGENVALUE_FLOOR {
                return Err(Error::NotADensityMatrix(format!("negative eigenvalue {lowest:e}")));
            }
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn spectrum(&self) -> Result<HermitianSpectrum> {
        HermitianSpectrum::new(&self.matrix)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &UnitaryOperator) -> Result<DensityMatrix> {
        check_dim(u.dim(), self.dim())?;
        Ok(Self {
            matrix: u.matrix() * &self.matrix * u.matrix().adjoint(),
        })
    }

    /// Re-runs the invariant checks; useful after a chain of unchecked operations.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.matrix)
    }
}
