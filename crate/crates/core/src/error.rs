// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::lattice::MoveLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An instance exceeds a size cap. `what` names the capped quantity.
    #[error("capacity exceeded: {what} is {requested}, limit is {limit}; use a smaller instance")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("chirality violated: entry ({i}, {j}) labelled {label:?} connects nodes of equal parity")]
    Chirality {
        i: usize,
        j: usize,
        label: Option<MoveLabel>,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("no quasienergy band within {tolerance:e} of {target}")]
    EmptyBand { target: f64, tolerance: f64 },

    #[error("phase {phase} leaves the principal branch; use smaller scales")]
    BranchOverflow { phase: f64 },

    #[error("filling {density} makes the autocorrelation normalisation degenerate")]
    DegenerateDensity { density: f64 },

    #[error("graph has an empty 2-core (it is a forest); use find_grafted_p3 instead")]
    Forest,

    #[error("eigensolver failed to converge")]
    NoConvergence,
}
