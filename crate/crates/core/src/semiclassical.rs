// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Probe density matrices as Gaussian averages over classically rotated
//! pure states. The auxiliary field enters only through the mean and spread
//! of the rotation angles.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boson::{self, mode_operator, AuxStateSpec, ModeOperator};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::spin::{self, Axis, SpinBasis};
use crate::state::{Basis, DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianNoiseSpec {
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianNoiseSpec {
    pub fn new(mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !mean.is_finite() || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "invalid Gaussian noise ({mean}, {sigma})"
            )));
        }
        Ok(Self { mean, sigma })
    }

    pub fn exact(mean: f64) -> Self {
        Self { mean, sigma: 0.0 }
    }

    /// `∫ dx P(x) e^{-iΔx} = e^{-iΔ mean} e^{-Δ² σ² / 2}`.
    pub fn characteristic(&self, delta: f64) -> Complex64 {
        Complex64::from_polar(
            (-0.5 * delta * delta * self.sigma * self.sigma).exp(),
            -delta * self.mean,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * (x - mean).powi(2))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub n_points: usize,
    pub span_sigmas: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            n_points: 201,
            span_sigmas: 6.0,
        }
    }
}

/// Uniform Riemann grid on `mean ± span σ` with normalized Gaussian weights.
pub fn gaussian_grid(spec: &GaussianNoiseSpec, n_points: usize, span_sigmas: f64) -> Result<QuadratureGrid> {
    if n_points < 3 || n_points.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "grid needs an odd number of points >= 3, got {n_points}"
        )));
    }
    if !(span_sigmas > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid span must be positive, got {span_sigmas}"
        )));
    }
    if spec.sigma == 0.0 {
        return Ok(QuadratureGrid {
            nodes: vec![spec.mean],
            weights: vec![1.0],
        });
    }
    let half = (n_points / 2) as f64;
    let step = span_sigmas * spec.sigma / half;
    let offsets: Vec<f64> = (0..n_points).map(|k| (k as f64 - half) * step).collect();
    let raw: Vec<f64> = offsets
        .iter()
        .map(|x| (-0.5 * (x / spec.sigma).powi(2)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(QuadratureGrid {
        nodes: offsets.iter().map(|x| spec.mean + x).collect(),
        weights: raw.iter().map(|w| w / total).collect(),
    })
}

fn spin_basis_of(psi: &PureState) -> Result<SpinBasis> {
    match psi.basis() {
        Basis::Spin(b) => Ok(*b),
        _ => Err(Error::InvalidArgument(
            "semiclassical averaging acts on spin states".into(),
        )),
    }
}

/// Multiplies `ρ_{mn}` by the characteristic function of `noise` at `λ_m − λ_n`.
fn dephase(rho: &mut CMatrix, levels: &[f64], noise: &GaussianNoiseSpec) {
    let n = levels.len();
    for m in 0..n {
        for k in 0..n {
            rho[(m, k)] *= noise.characteristic(levels[m] - levels[k]);
        }
    }
}

/// `ρ_A ≈ ∫ dφ P(φ) e^{-iJzφ} |ψ><ψ| e^{iJzφ}`, evaluated exactly through the
/// Gaussian characteristic function.
pub fn semiclassical_jz(psi_a: &PureState, noise: &GaussianNoiseSpec) -> Result<DensityMatrix> {
    let basis = spin_basis_of(psi_a)?;
    let mut rho = psi_a.projector().matrix().clone();
    dephase(&mut rho, &basis.m_values(), noise);
    DensityMatrix::new(rho)
}

/// Riemann-sum evaluation of the same average.
pub fn semiclassical_jz_grid(psi_a: &PureState, noise: &GaussianNoiseSpec, grid: GridParams) -> Result<DensityMatrix> {
    let basis = spin_basis_of(psi_a)?;
    let q = gaussian_grid(noise, grid.n_points, grid.span_sigmas)?;
    let m = basis.m_values();
    let n = basis.dim();
    let mut rho = CMatrix::zeros(n, n);
    for (phi, w) in q.nodes.iter().zip(&q.weights) {
        let v = CVector::from_iterator(
            n,
            psi_a
                .amplitudes()
                .iter()
                .zip(&m)
                .map(|(c, mk)| c * Complex64::from_polar(1.0, -mk * phi)),
        );
        rho += (&v * v.adjoint()) * Complex64::new(*w, 0.0);
    }
    DensityMatrix::new(rho)
}

/// Noise on `φ = n_B τ` for the `Jz ⊗ n_B` coupling: mean `N_B τ`, spread `√V(n_B) τ`.
pub fn jz_noise(spec: &AuxStateSpec, tau: f64) -> GaussianNoiseSpec {
    GaussianNoiseSpec {
        mean: spec.mean_photons() * tau,
        sigma: spec.number_variance().sqrt() * tau.abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterNoise {
    pub theta: GaussianNoiseSpec,
    pub phi: GaussianNoiseSpec,
}

/// `θ̄ = 2|β|τ`, `σ_θ² = θ̄² V(X) / 4|β|²`, `φ̄ = 0`, `σ_φ² = V(Y) / 4|β|²`, with
/// the quadrature variances measured on the squeezed vacuum `S(r)|0>`.
pub fn noise_from_optics(spec: &AuxStateSpec, tau: f64) -> Result<BeamSplitterNoise> {
    if spec.is_fock() {
        return Err(Error::InvalidArgument(
            "a Fock state has <X> = 0 and defines no classical rotation".into(),
        ));
    }
    if spec.beta.im != 0.0 || !(spec.beta.re > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise relations need real beta > 0, got {}",
            spec.beta
        )));
    }
    let beta = spec.beta.re;
    let (vx, vy) = quadrature_variances(spec.r)?;
    let theta_mean = 2.0 * beta * tau;
    Ok(BeamSplitterNoise {
        theta: GaussianNoiseSpec::new(theta_mean, theta_mean.abs() * vx.sqrt() / (2.0 * beta))?,
        phi: GaussianNoiseSpec::new(0.0, vy.sqrt() / (2.0 * beta))?,
    })
}

fn quadrature_variances(r: f64) -> Result<(f64, f64)> {
    let vacuum = AuxStateSpec::squeezed(0.0, r);
    let basis = boson::choose_cutoff(&vacuum, 1e-12)?;
    let psi = boson::squeezed_coherent(&vacuum, &basis)?;
    Ok((
        psi.variance(&mode_operator(ModeOperator::X, &basis)?)?,
        psi.variance(&mode_operator(ModeOperator::Y, &basis)?)?,
    ))
}

/// A model for averaging the beam-splitter rotation `e^{-iJzφ} e^{-iJxθ}` over
/// Gaussian angle noise.
pub trait BeamSplitterAverager: Send + Sync {
    fn name(&self) -> &'static str;
    fn average(&self, psi_a: &PureState, noise: &BeamSplitterNoise, grid: GridParams) -> Result<DensityMatrix>;
}

/// `θ` averaged in the `Jx` eigenbasis, then `φ` in the `Jz` eigenbasis.
pub struct SeparableAverage;

/// Exact `θ̄` rotation followed by `Jz` dephasing only.
pub struct PhaseOnlyAverage;

/// Rotation about the noisy in-plane axis `(cos φ, sin φ, 0)`:
/// `e^{-iJzφ} e^{-iJxθ} e^{iJzφ}`, with `φ` integrated on a grid.
pub struct AxisNoiseAverage;

struct SpinFrames {
    levels: Vec<f64>,
    /// columns: `Jx` eigenvectors in the `Jz` basis
    x_in_z: CMatrix,
}

impl SpinFrames {
    fn new(basis: &SpinBasis) -> Result<Self> {
        Ok(Self {
            levels: basis.m_values(),
            x_in_z: spin::basis_change(Axis::X, Axis::Z, basis)?.matrix().clone(),
        })
    }

    /// `θ`-averaged `e^{-iJxθ} ρ e^{iJxθ}`, computed in the `Jx` eigenbasis.
    fn average_x_rotation(&self, rho_z: &CMatrix, theta: &GaussianNoiseSpec) -> CMatrix {
        let mut rho_x = self.x_in_z.adjoint() * rho_z * &self.x_in_z;
        dephase(&mut rho_x, &self.levels, theta);
        &self.x_in_z * rho_x * self.x_in_z.adjoint()
    }
}

fn finish(mut rho: CMatrix) -> Result<DensityMatrix> {
    // restore exact Hermiticity lost to the basis changes
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(rho)
}

impl BeamSplitterAverager for SeparableAverage {
    fn name(&self) -> &'static str {
        "standard"
    }

    fn average(&self, psi_a: &PureState, noise: &BeamSplitterNoise, _grid: GridParams) -> Result<DensityMatrix> {
        let frames = SpinFrames::new(&spin_basis_of(psi_a)?)?;
        let mut rho = frames.average_x_rotation(psi_a.projector().matrix(), &noise.theta);
        dephase(&mut rho, &frames.levels, &noise.phi);
        finish(rho)
    }
}

impl BeamSplitterAverager for PhaseOnlyAverage {
    fn name(&self) -> &'static str {
        "phase_only"
    }

    fn average(&self, psi_a: &PureState, noise: &BeamSplitterNoise, grid: GridParams) -> Result<DensityMatrix> {
        let exact_theta = BeamSplitterNoise {
            theta: GaussianNoiseSpec::exact(noise.theta.mean),
            phi: noise.phi,
        };
        SeparableAverage.average(psi_a, &exact_theta, grid)
    }
}

impl BeamSplitterAverager for AxisNoiseAverage {
    fn name(&self) -> &'static str {
        "axis_noise"
    }

    fn average(&self, psi_a: &PureState, noise: &BeamSplitterNoise, grid: GridParams) -> Result<DensityMatrix> {
        let basis = spin_basis_of(psi_a)?;
        let frames = SpinFrames::new(&basis)?;
        let q = gaussian_grid(&noise.phi, grid.n_points, grid.span_sigmas)?;
        let n = basis.dim();
        let projector = psi_a.projector().matrix().clone();
        let mut rho = CMatrix::zeros(n, n);
        for (phi, w) in q.nodes.iter().zip(&q.weights) {
            // e^{iJzφ} ρ e^{-iJzφ}
            let mut inner = projector.clone();
            dephase(&mut inner, &frames.levels, &GaussianNoiseSpec::exact(-phi));
            let mut rotated = frames.average_x_rotation(&inner, &noise.theta);
            dephase(&mut rotated, &frames.levels, &GaussianNoiseSpec::exact(*phi));
            rho += rotated * Complex64::new(*w, 0.0);
        }
        finish(rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiclassicalVariant {
    #[default]
    Standard,
    PhaseOnly,
    AxisNoise,
}

impl SemiclassicalVariant {
    pub const ALL: [SemiclassicalVariant; 3] = [Self::Standard, Self::PhaseOnly, Self::AxisNoise];

    pub fn averager(&self) -> Arc<dyn BeamSplitterAverager> {
        match self {
            Self::Standard => Arc::new(SeparableAverage),
            Self::PhaseOnly => Arc::new(PhaseOnlyAverage),
            Self::AxisNoise => Arc::new(AxisNoiseAverage),
        }
    }

    pub fn name(&self) -> &'static str {
        self.averager().name()
    }
}

impl std::str::FromStr for SemiclassicalVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

pub fn semiclassical_bs(
    psi_a: &PureState,
    noise: &BeamSplitterNoise,
    variant: SemiclassicalVariant,
    grid: GridParams,
) -> Result<DensityMatrix> {
    variant.averager().average(psi_a, noise, grid)
}
