// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, orchestration and file emission behind the `fcages` binary.

pub mod config;
pub mod error;
pub mod recipes;
pub mod run;
pub mod sweep;
