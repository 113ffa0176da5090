// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum Fisher information, purity, coherence matrices, closed-form
//! decoherence predictions and photon budgets.

mod budget;
mod coherence;
mod predictions;
mod qfi;

pub use budget::*;
pub use coherence::*;
pub use predictions::*;
pub use qfi::*;
