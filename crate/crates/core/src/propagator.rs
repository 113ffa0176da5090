// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Time-evolution strategies for composite Hamiltonians.
//!
//! Each strategy performs a one-time spectral decomposition and then evolves
//! any state to any time with matrix-vector work only. Decompositions are
//! cached process-wide, keyed on the Hamiltonian fingerprint and strategy.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::composite::CompositeHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianSpectrum};
use crate::state::check_dim;

/// Largest composite dimension handed to a dense eigensolver.
pub const DENSE_DIM_CEILING: usize = 2048;

pub trait Propagator: Send + Sync {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    /// `exp(-i H τ) ψ`.
    fn evolve(&self, psi: &CVector, tau: f64) -> Result<CVector>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorStrategy {
    #[default]
    Auto,
    Dense,
    Block,
    AuxEigenbasis,
}

impl PropagatorStrategy {
    pub const ALL: [PropagatorStrategy; 4] = [Self::Auto, Self::Dense, Self::Block, Self::AuxEigenbasis];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Auto => "auto",
            Self::Dense => "dense",
            Self::Block => "block",
            Self::AuxEigenbasis => "aux_eigenbasis",
        }
    }
}

impl fmt::Display for PropagatorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropagatorStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

type Builder = fn(&CompositeHamiltonian) -> Result<Arc<dyn Propagator>>;

/// Name-indexed constructors for every propagator strategy.
pub struct PropagatorRegistry {
    builders: Vec<(PropagatorStrategy, Builder)>,
}

impl Default for PropagatorRegistry {
    fn default() -> Self {
        Self {
            builders: vec![
                (PropagatorStrategy::Dense, |h| Ok(Arc::new(DensePropagator::new(h)?))),
                (PropagatorStrategy::Block, |h| Ok(Arc::new(BlockPropagator::new(h)?))),
                (PropagatorStrategy::AuxEigenbasis, |h| {
                    Ok(Arc::new(AuxEigenbasisPropagator::new(h)?))
                }),
                (PropagatorStrategy::Auto, build_auto),
            ],
        }
    }
}

impl PropagatorRegistry {
    pub fn names(&self) -> Vec<&'static str> {
        self.builders.iter().map(|(s, _)| s.name()).collect()
    }

    pub fn build(&self, strategy: PropagatorStrategy, h: &CompositeHamiltonian) -> Result<Arc<dyn Propagator>> {
        let (_, builder) = self
            .builders
            .iter()
            .find(|(s, _)| *s == strategy)
            .ok_or_else(|| Error::UnknownStrategy(strategy.name().into()))?;
        builder(h)
    }

    pub fn build_named(&self, name: &str, h: &CompositeHamiltonian) -> Result<Arc<dyn Propagator>> {
        self.build(name.parse()?, h)
    }
}

fn build_auto(h: &CompositeHamiltonian) -> Result<Arc<dyn Propagator>> {
    if let Ok(p) = AuxEigenbasisPropagator::new(h) {
        return Ok(Arc::new(p));
    }
    match BlockPropagator::new(h) {
        Ok(p) => Ok(Arc::new(p)),
        Err(block_err) if block_err.is_resource_ceiling() => match DensePropagator::new(h) {
            Ok(p) => Ok(Arc::new(p)),
            Err(e) => Err(e),
        },
        Err(e) => Err(e),
    }
}

type CacheKey = (String, PropagatorStrategy);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<dyn Propagator>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<dyn Propagator>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached propagator for `h`; concurrent callers share a single decomposition.
pub fn cached(h: &CompositeHamiltonian, strategy: PropagatorStrategy) -> Result<Arc<dyn Propagator>> {
    let key = (h.fingerprint().to_string(), strategy);
    if let Some(p) = cache().read().expect("propagator cache poisoned").get(&key) {
        return Ok(Arc::clone(p));
    }
    let built = PropagatorRegistry::default().build(strategy, h)?;
    let mut guard = cache().write().expect("propagator cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

pub fn clear_cache() {
    cache().write().expect("propagator cache poisoned").clear();
}

pub fn cache_len() -> usize {
    cache().read().expect("propagator cache poisoned").len()
}

/// Eigendecomposition of the full composite matrix.
pub struct DensePropagator {
    spectrum: HermitianSpectrum,
}

impl DensePropagator {
    pub fn new(h: &CompositeHamiltonian) -> Result<Self> {
        if h.dim() > DENSE_DIM_CEILING {
            return Err(Error::ResourceCeiling(format!(
                "dense eigendecomposition of dimension {} exceeds {DENSE_DIM_CEILING}",
                h.dim()
            )));
        }
        Ok(Self {
            spectrum: h.to_operator().spectrum()?,
        })
    }
}

impl Propagator for DensePropagator {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    fn evolve(&self, psi: &CVector, tau: f64) -> Result<CVector> {
        check_dim(self.dim(), psi.len())?;
        Ok(self.spectrum.evolve(psi, tau))
    }
}

struct Block {
    indices: Vec<usize>,
    spectrum: HermitianSpectrum,
}

/// Decomposes `H` into the connected components of its coupling graph and
/// diagonalizes each invariant block separately.
pub struct BlockPropagator {
    dim: usize,
    blocks: Vec<Block>,
}

impl BlockPropagator {
    pub fn new(h: &CompositeHamiltonian) -> Result<Self> {
        let dim = h.dim();
        let nf = h.basis().fock().dim();
        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        // candidate couplings come from the term-wise sparsity patterns; only
        // couplings surviving in the summed operator join two states
        let mut spin_nz: Vec<(usize, usize)> = h.terms().iter().flat_map(|(s, _)| nonzeros(s)).collect();
        let mut aux_nz: Vec<(usize, usize)> = h.terms().iter().flat_map(|(_, b)| nonzeros(b)).collect();
        spin_nz.sort_unstable();
        spin_nz.dedup();
        aux_nz.sort_unstable();
        aux_nz.dedup();
        let scale = h
            .terms()
            .iter()
            .map(|(s, b)| linalg::max_abs(s) * linalg::max_abs(b))
            .fold(0.0, f64::max);
        let threshold = 1e-14 * scale.max(1.0);
        for &(si, sj) in &spin_nz {
            for &(fi, fj) in &aux_nz {
                let (i, j) = (si * nf + fi, sj * nf + fj);
                if i == j || h.element(i, j).norm() <= threshold {
                    continue;
                }
                let (a, c) = (find(&mut parent, i), find(&mut parent, j));
                if a != c {
                    parent[a] = c;
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..dim {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        let largest = groups.values().map(Vec::len).max().unwrap_or(0);
        if largest > DENSE_DIM_CEILING {
            return Err(Error::ResourceCeiling(format!(
                "largest invariant block has dimension {largest} (> {DENSE_DIM_CEILING})"
            )));
        }
        let mut index_sets: Vec<Vec<usize>> = groups.into_values().collect();
        index_sets.sort_by_key(|v| v[0]);
        let blocks = index_sets
            .into_iter()
            .map(|indices| {
                let n = indices.len();
                let m = CMatrix::from_fn(n, n, |i, j| h.element(indices[i], indices[j]));
                Ok(Block {
                    spectrum: HermitianSpectrum::new(&m)?,
                    indices,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, blocks })
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }
}

fn nonzeros(m: &CMatrix) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)].norm() > 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

impl Propagator for BlockPropagator {
    fn name(&self) -> &'static str {
        "block"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn evolve(&self, psi: &CVector, tau: f64) -> Result<CVector> {
        check_dim(self.dim, psi.len())?;
        let mut out = CVector::zeros(self.dim);
        for block in &self.blocks {
            let local = CVector::from_iterator(block.indices.len(), block.indices.iter().map(|&i| psi[i]));
            if local.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                continue;
            }
            let evolved = block.spectrum.evolve(&local, tau);
            for (k, &i) in block.indices.iter().enumerate() {
                out[i] = evolved[k];
            }
        }
        Ok(out)
    }
}

/// For `H = Σ_t S_t ⊗ B_t` with mutually commuting `B_t`: diagonalize the
/// auxiliary factors jointly, after which `H` is a direct sum of spin-sized
/// blocks `h_k = Σ_t b_{t,k} S_t`.
pub struct AuxEigenbasisPropagator {
    spin_dim: usize,
    aux_vectors: CMatrix,
    spin_blocks: Vec<HermitianSpectrum>,
}

const COMMUTATION_TOLERANCE: f64 = 1e-10;

impl AuxEigenbasisPropagator {
    pub fn new(h: &CompositeHamiltonian) -> Result<Self> {
        let terms = h.terms();
        for (i, (_, a)) in terms.iter().enumerate() {
            for (_, b) in &terms[i + 1..] {
                let scale = linalg::max_abs(a).max(1.0) * linalg::max_abs(b).max(1.0);
                if linalg::max_abs(&linalg::commutator(a, b)) > COMMUTATION_TOLERANCE * scale {
                    return Err(Error::UnknownStrategy(
                        "aux_eigenbasis requires commuting auxiliary factors".into(),
                    ));
                }
            }
        }
        let nf = h.basis().fock().dim();
        // generic combination separates joint eigenspaces
        let mut mix = CMatrix::zeros(nf, nf);
        for (k, (_, b)) in terms.iter().enumerate() {
            let weight = 1.0 + 0.6180339887498949 * (k as f64 + 1.0).sqrt();
            mix += b * Complex64::new(weight, 0.0);
        }
        let vectors = HermitianSpectrum::new(&mix)?.vectors;
        let mut diagonals = Vec::with_capacity(terms.len());
        for (_, b) in terms {
            let d = vectors.adjoint() * b * &vectors;
            let scale = linalg::max_abs(b).max(1.0);
            let off = (0..nf)
                .flat_map(|i| (0..nf).filter(move |&j| j != i).map(move |j| (i, j)))
                .fold(0.0f64, |acc, (i, j)| acc.max(d[(i, j)].norm()));
            if off > 1e-8 * scale {
                return Err(Error::NumericalInstability(format!(
                    "auxiliary factors are not jointly diagonalized (off-diagonal {off:e})"
                )));
            }
            diagonals.push((0..nf).map(|i| d[(i, i)].re).collect::<Vec<f64>>());
        }
        let spin_dim = h.basis().spin().dim();
        let spin_blocks = (0..nf)
            .map(|k| {
                let mut hk = CMatrix::zeros(spin_dim, spin_dim);
                for ((s, _), diag) in terms.iter().zip(&diagonals) {
                    hk += s * Complex64::new(diag[k], 0.0);
                }
                HermitianSpectrum::new(&hk)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spin_dim,
            aux_vectors: vectors,
            spin_blocks,
        })
    }
}

impl Propagator for AuxEigenbasisPropagator {
    fn name(&self) -> &'static str {
        "aux_eigenbasis"
    }

    fn dim(&self) -> usize {
        self.spin_dim * self.aux_vectors.nrows()
    }

    fn evolve(&self, psi: &CVector, tau: f64) -> Result<CVector> {
        check_dim(self.dim(), psi.len())?;
        let nf = self.aux_vectors.nrows();
        let m = CMatrix::from_row_slice(self.spin_dim, nf, psi.as_slice());
        // coefficients in the auxiliary eigenbasis: M V*
        let mut rotated = &m * self.aux_vectors.conjugate();
        for (k, block) in self.spin_blocks.iter().enumerate() {
            let col = rotated.column(k).into_owned();
            rotated.set_column(k, &block.evolve(&col, tau));
        }
        let back = rotated * self.aux_vectors.transpose();
        Ok(CVector::from_iterator(self.dim(), back.transpose().iter().copied()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boson::FockBasis;
    use crate::composite::{beamsplitter_hamiltonian, case_hamiltonian, ClassicalCase, CompositeBasis};
    use crate::spin::SpinBasis;

    fn test_vector(n: usize) -> CVector {
        let v = CVector::from_fn(n, |i, _| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()));
        let norm = v.norm();
        v / Complex64::new(norm, 0.0)
    }

    #[test]
    fn strategies_agree_with_dense() {
        let cb = CompositeBasis::new(SpinBasis::new(3), FockBasis::new(9).unwrap());
        let hams = vec![
            beamsplitter_hamiltonian(&cb),
            case_hamiltonian(ClassicalCase::X, 1.5, &cb).unwrap(),
            case_hamiltonian(ClassicalCase::Y, 1.5, &cb).unwrap(),
        ];
        let psi = test_vector(cb.dim());
        let registry = PropagatorRegistry::default();
        for h in &hams {
            let reference = registry
                .build(PropagatorStrategy::Dense, h)
                .unwrap()
                .evolve(&psi, 0.8)
                .unwrap();
            for name in ["block", "aux_eigenbasis", "auto"] {
                match registry.build_named(name, h) {
                    Ok(p) => {
                        let out = p.evolve(&psi, 0.8).unwrap();
                        assert!((out - &reference).norm() < 1e-9, "{name} on {}", h.fingerprint());
                    }
                    Err(e) => assert!(name == "aux_eigenbasis", "{name}: {e}"),
                }
            }
        }
    }

    #[test]
    fn beamsplitter_blocks_are_small() {
        let cb = CompositeBasis::new(SpinBasis::new(6), FockBasis::new(40).unwrap());
        let p = BlockPropagator::new(&beamsplitter_hamiltonian(&cb)).unwrap();
        assert!(p.block_sizes().into_iter().max().unwrap() <= 7);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(
            "krylov".parse::<PropagatorStrategy>(),
            Err(Error::UnknownStrategy(_))
        ));
    }
}
