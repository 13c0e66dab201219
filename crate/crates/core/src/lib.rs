// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Floquet many-body cages on constrained state graphs.
//!
//! The crate builds many-body state graphs (quantum hard-disk configurations,
//! imbalanced bipartite random graphs, a grafted-tree toy model), assembles
//! hopping Hamiltonians on them, composes palindromic Floquet drives, and
//! computes quasienergy spectra, echo/memory observables and cage
//! diagnostics.
//!
//! Conventions used throughout:
//!
//! * Schedules list layers in application order. The single-period unitary is
//!   the ordered product with the rightmost factor acting first.
//! * Quasienergies are reported as phases `θ = ε·τ = −arg λ ∈ (−π, π]`.

pub mod cages;
mod error;
pub mod floquet;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod observables;

pub use error::{Error, Result};

pub use faer::c64;
pub use faer::Mat;
