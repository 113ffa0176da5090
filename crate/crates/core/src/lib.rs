// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Decoherence of collective-spin probe states that exchange quanta with a
//! single quantized auxiliary mode, quantified through the quantum Fisher
//! information of the probe's reduced state.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boson;
pub mod composite;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod propagator;
pub mod scenario;
pub mod semiclassical;
pub mod spin;
pub mod state;

pub use error::{Error, Result};
pub use state::{Basis, DensityMatrix, HermitianOperator, PureState, UnitaryOperator};
