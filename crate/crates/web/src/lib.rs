// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Browser bindings: HV-drive quasienergies, the averaged echo, and the toy
//! chain with and without its swap layer.

use std::sync::Arc;

use floquet_cages::floquet::{drives, floquet_operator, FloquetResult};
use floquet_cages::hamiltonian::{assemble, weights};
use floquet_cages::lattice::{enumerate_configurations_with_cap, Boundary, LatticeSpec};
use floquet_cages::models::{qhd_generators, toy_model};
use floquet_cages::observables::averaged_loschmidt;
use wasm_bindgen::prelude::*;

/// Largest Hilbert space the page will diagonalise.
pub const WEB_DIM_CAP: usize = 1200;

fn hv_result(lx: usize, ly: usize, n: usize, tau_v: f64, tau_h: f64, periodic: bool) -> Result<FloquetResult, String> {
    let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
    let lattice = LatticeSpec::new(lx, ly, boundary).map_err(|e| e.to_string())?;
    if enumerate_configurations_with_cap(&lattice, n, WEB_DIM_CAP).is_err() {
        return Err(format!("more than {WEB_DIM_CAP} states; the page is limited to small instances"));
    }
    let g = qhd_generators(&lattice, n, 1.0, 1.0).map_err(|e| e.to_string())?;
    let schedule = drives::hv(Arc::new(g.h_v), Arc::new(g.h_h), tau_v, tau_h).map_err(|e| e.to_string())?;
    floquet_operator(&schedule).map_err(|e| e.to_string())
}

/// Sorted `ε·τ` of the palindromic HV drive.
pub fn hv_quasienergies(lx: usize, ly: usize, n: usize, tau_v: f64, tau_h: f64, periodic: bool) -> Result<Vec<f64>, String> {
    Ok(hv_result(lx, ly, n, tau_v, tau_h, periodic)?.phases)
}

/// `L̄(n)` for `n = 0..=n_max` under the HV drive.
pub fn hv_echo(
    lx: usize,
    ly: usize,
    n: usize,
    tau_v: f64,
    tau_h: f64,
    periodic: bool,
    n_max: usize,
) -> Result<Vec<f64>, String> {
    let r = hv_result(lx, ly, n, tau_v, tau_h, periodic)?;
    Ok(averaged_loschmidt(&r, n_max).values)
}

/// Toy chain quasienergies; `swap` adds the `π/J_swap` swap layer.
pub fn toy_quasienergies(chain_length: usize, tau: f64, swap: bool, j_swap: f64) -> Result<Vec<f64>, String> {
    let (graph, spec) = toy_model(chain_length).map_err(|e| e.to_string())?;
    let [a, b] = spec.layer_labels;
    let h_a = Arc::new(assemble(&graph, &weights(&[(a, 1.0)])));
    let h_b = Arc::new(assemble(&graph, &weights(&[(b, 1.0)])));
    let schedule = if swap {
        let h_swap = Arc::new(assemble(&graph, &weights(&[(spec.swap_label, j_swap)])));
        drives::swap_hv(h_swap, j_swap, h_a, h_b, tau, tau)
    } else {
        drives::hv(h_a, h_b, tau, tau)
    }
    .map_err(|e| e.to_string())?;
    Ok(floquet_operator(&schedule).map_err(|e| e.to_string())?.phases)
}

#[wasm_bindgen(js_name = hvQuasienergies)]
pub fn js_hv_quasienergies(lx: usize, ly: usize, n: usize, tau_v: f64, tau_h: f64, periodic: bool) -> Result<Vec<f64>, JsError> {
    hv_quasienergies(lx, ly, n, tau_v, tau_h, periodic).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = hvEcho)]
pub fn js_hv_echo(
    lx: usize,
    ly: usize,
    n: usize,
    tau_v: f64,
    tau_h: f64,
    periodic: bool,
    n_max: usize,
) -> Result<Vec<f64>, JsError> {
    hv_echo(lx, ly, n, tau_v, tau_h, periodic, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = toyQuasienergies)]
pub fn js_toy_quasienergies(chain_length: usize, tau: f64, swap: bool, j_swap: f64) -> Result<Vec<f64>, JsError> {
    toy_quasienergies(chain_length, tau, swap, j_swap).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn toy_swap_creates_two_pi_modes() {
        let near_pi = |p: &[f64]| p.iter().filter(|t| (t.abs() - PI).abs() < 1e-6).count();
        assert_eq!(near_pi(&toy_quasienergies(20, 1.0, true, 1.0).unwrap()), 2);
        assert_eq!(near_pi(&toy_quasienergies(20, 1.0, false, 1.0).unwrap()), 0);
    }

    #[test]
    fn echo_starts_at_one_and_is_bounded() {
        let echo = hv_echo(3, 3, 2, 1.0, 1.0, false, 50).unwrap();
        assert_eq!(echo.len(), 51);
        assert!((echo[0] - 1.0).abs() < 1e-12);
        assert!(echo.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn oversized_instances_are_refused() {
        assert!(hv_quasienergies(6, 6, 6, 1.0, 1.0, false).is_err());
        assert!(hv_quasienergies(8, 8, 10, 1.0, 1.0, false).is_err());
        assert_eq!(hv_quasienergies(3, 3, 2, 1.0, 1.0, false).unwrap().len(), 24);
    }
}
