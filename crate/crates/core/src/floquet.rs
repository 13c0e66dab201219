// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Drive schedules, single-period Floquet unitaries and their spectra.
//!
//! A schedule lists layers in the order they act. The Floquet operator is the
//! matrix product with the first layer rightmost:
//! `U = U_M ⋯ U_2 U_1` for a schedule `[L_1, …, L_M]`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use faer::{c64, Mat};
use serde::Serialize;

use crate::hamiltonian::{LabeledHamiltonian, DEFAULT_DENSE_CAP};
use crate::linalg::{self, phase_distance};
use crate::{Error, Result};

/// Gap used to split quasienergy phases into degenerate bands.
pub const BAND_TOLERANCE: f64 = 1e-8;

/// Phases closer than this to `±π` are reported as branch-sensitive.
pub const BRANCH_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct DriveLayer {
    pub name: String,
    pub generator: Arc<LabeledHamiltonian>,
    pub duration: f64,
}

impl DriveLayer {
    pub fn new(name: impl Into<String>, generator: Arc<LabeledHamiltonian>, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: format!("layer durations must be finite and positive, got {duration}"),
            });
        }
        Ok(Self {
            name: name.into(),
            generator,
            duration,
        })
    }

    fn with_duration(&self, duration: f64) -> Self {
        Self {
            duration,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct DriveSchedule {
    layers: Vec<DriveLayer>,
    period: f64,
    palindromic: bool,
}

#[derive(Serialize)]
struct LayerDescription<'a> {
    name: &'a str,
    duration: f64,
    dim: usize,
    nnz: usize,
}

#[derive(Serialize)]
struct ScheduleDescription<'a> {
    palindromic: bool,
    period: f64,
    layers: Vec<LayerDescription<'a>>,
}

impl DriveSchedule {
    /// Schedule applying `layers` in the given order.
    pub fn new(layers: Vec<DriveLayer>) -> Result<Self> {
        Self::build(layers, false)
    }

    fn build(layers: Vec<DriveLayer>, palindromic: bool) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::InvalidParameter {
                name: "layers",
                reason: "a drive needs at least one layer".into(),
            });
        };
        let dim = first.generator.dim();
        if let Some(bad) = layers.iter().find(|l| l.generator.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.generator.dim(),
            });
        }
        let period = layers.iter().map(|l| l.duration).sum();
        Ok(Self {
            layers,
            period,
            palindromic,
        })
    }

    pub fn layers(&self) -> &[DriveLayer] {
        &self.layers
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn is_palindromic(&self) -> bool {
        self.palindromic
    }

    pub fn dim(&self) -> usize {
        self.layers[0].generator.dim()
    }

    /// The schedule with every duration multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| DriveLayer::new(l.name.clone(), l.generator.clone(), l.duration * factor))
            .collect::<Result<_>>()?;
        Self::build(layers, self.palindromic)
    }

    /// `n` periods back to back.
    pub fn repeated(&self, n: usize) -> Result<Self> {
        let layers = (0..n).flat_map(|_| self.layers.iter().cloned()).collect();
        Self::build(layers, self.palindromic)
    }

    /// JSON description of the layer sequence.
    pub fn to_json(&self) -> String {
        let desc = ScheduleDescription {
            palindromic: self.palindromic,
            period: self.period,
            layers: self
                .layers
                .iter()
                .map(|l| LayerDescription {
                    name: &l.name,
                    duration: l.duration,
                    dim: l.generator.dim(),
                    nnz: l.generator.nnz(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&desc).expect("schedule serialises")
    }
}

/// `[L_1(τ_1/2), …, L_{M−1}(τ_{M−1}/2), L_M(τ_M), L_{M−1}(τ_{M−1}/2), …, L_1(τ_1/2)]`.
pub fn palindromize(layers: &[DriveLayer]) -> Result<DriveSchedule> {
    let Some((centre, outer)) = layers.split_last() else {
        return DriveSchedule::build(Vec::new(), true);
    };
    let halves: Vec<DriveLayer> = outer.iter().map(|l| l.with_duration(l.duration / 2.0)).collect();
    let mut out = halves.clone();
    out.push(centre.clone());
    out.extend(halves.into_iter().rev());
    DriveSchedule::build(out, true)
}

/// `exp(−i H t)` from the symmetric eigendecomposition of `H`.
pub fn expm_generator(h: &LabeledHamiltonian, t: f64) -> Result<Mat<c64>> {
    let (values, vectors) = generator_eigen(h)?;
    Ok(linalg::spectral_exp(&values, vectors.as_ref(), t))
}

fn generator_eigen(h: &LabeledHamiltonian) -> Result<(Vec<f64>, Mat<f64>)> {
    if h.dim() > DEFAULT_DENSE_CAP {
        return Err(Error::Capacity {
            what: "Hilbert-space dimension",
            requested: h.dim(),
            limit: DEFAULT_DENSE_CAP,
        });
    }
    linalg::symmetric_eigen(h.to_dense().as_ref())
}

/// Caches generator eigendecompositions and layer exponentials by identity.
#[derive(Default)]
struct ExpCache {
    eigen: Vec<(*const LabeledHamiltonian, f64, Vec<f64>, Mat<f64>)>,
    exps: Vec<(*const LabeledHamiltonian, u64, Mat<c64>)>,
}

impl ExpCache {
    fn layer(&mut self, layer: &DriveLayer) -> Result<&Mat<c64>> {
        let key = Arc::as_ptr(&layer.generator);
        let bits = layer.duration.to_bits();
        if let Some(pos) = self.exps.iter().position(|e| e.0 == key && e.1 == bits) {
            return Ok(&self.exps[pos].2);
        }
        let pos = match self.eigen.iter().position(|e| e.0 == key) {
            Some(p) => p,
            None => {
                let (values, vectors) = generator_eigen(&layer.generator)?;
                let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                self.eigen.push((key, norm, values, vectors));
                self.eigen.len() - 1
            }
        };
        let (_, _, values, vectors) = &self.eigen[pos];
        let u = linalg::spectral_exp(values, vectors.as_ref(), layer.duration);
        self.exps.push((key, bits, u));
        Ok(&self.exps.last().expect("just pushed").2)
    }

    fn spectral_norm(&mut self, layer: &DriveLayer) -> Result<f64> {
        let key = Arc::as_ptr(&layer.generator);
        if let Some(e) = self.eigen.iter().find(|e| e.0 == key) {
            return Ok(e.1);
        }
        let (values, vectors) = generator_eigen(&layer.generator)?;
        let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.eigen.push((key, norm, values, vectors));
        Ok(norm)
    }
}

fn schedule_unitary(schedule: &DriveSchedule, cache: &mut ExpCache) -> Result<Mat<c64>> {
    let d = schedule.dim();
    let mut u = Mat::<c64>::identity(d, d);
    for layer in schedule.layers() {
        let step = cache.layer(layer)?;
        u = step * &u;
    }
    Ok(u)
}

/// Single-period unitary together with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct FloquetResult {
    pub u: Mat<c64>,
    pub period: f64,
    /// `θ_n = ε_n·τ ∈ (−π, π]`, ascending.
    pub phases: Vec<f64>,
    /// `e^{−iθ_n}`.
    pub eigenvalues: Vec<c64>,
    /// Orthonormal eigenvector columns matching `phases`.
    pub modes: Mat<c64>,
}

impl FloquetResult {
    /// Decomposes a given unitary.
    pub fn from_unitary(u: Mat<c64>, period: f64) -> Result<Self> {
        let eig = linalg::unitary_eigen(u.as_ref())?;
        Ok(Self {
            u,
            period,
            phases: eig.phases,
            eigenvalues: eig.eigenvalues,
            modes: eig.vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// `ε_n = θ_n / τ`.
    pub fn quasienergies(&self) -> Vec<f64> {
        self.phases.iter().map(|t| t / self.period).collect()
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(self.u.as_ref())
    }

    /// `max_n ‖U m_n − λ_n m_n‖_∞`.
    pub fn max_eigen_residual(&self) -> f64 {
        let um = &self.u * &self.modes;
        let mut worst = 0.0f64;
        for n in 0..self.dim() {
            for i in 0..self.dim() {
                worst = worst.max((um[(i, n)] - self.eigenvalues[n] * self.modes[(i, n)]).norm());
            }
        }
        worst
    }

    /// Degenerate bands of the phase spectrum (see [`bands`]).
    pub fn bands(&self, tol: f64) -> Vec<Vec<usize>> {
        bands(&self.phases, tol)
    }

    /// `index,quasienergy_times_tau` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,quasienergy_times_tau\n");
        for (k, t) in self.phases.iter().enumerate() {
            let _ = writeln!(out, "{k},{t:.15e}");
        }
        out
    }
}

/// Builds and diagonalises the Floquet operator of `schedule`.
pub fn floquet_operator(schedule: &DriveSchedule) -> Result<FloquetResult> {
    let u = schedule_unitary(schedule, &mut ExpCache::default())?;
    FloquetResult::from_unitary(u, schedule.period())
}

/// Groups ascending phases into bands whose neighbouring members differ by at
/// most `tol`. Bands touching `+π` and `−π` are merged across the wrap.
pub fn bands(sorted_phases: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = linalg::gap_clusters(sorted_phases, tol)
        .into_iter()
        .map(|r| r.collect())
        .collect();
    if out.len() > 1 {
        let first = sorted_phases[0];
        let last = sorted_phases[sorted_phases.len() - 1];
        if first + 2.0 * PI - last <= tol {
            let tail = out.pop().expect("more than one band");
            out[0].splice(0..0, tail);
        }
    }
    out
}

/// `‖Γ U Γ − U†‖_max` with `Γ = diag((−1)^parity)`.
pub fn chiral_relation_defect(result: &FloquetResult, parity: &[u8]) -> f64 {
    let d = result.dim();
    assert_eq!(parity.len(), d, "parity length must match dimension");
    let mut worst = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            let sign = if parity[i] == parity[j] { 1.0 } else { -1.0 };
            worst = worst.max((result.u[(i, j)] * sign - result.u[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Principal-branch effective Hamiltonian `H_F` with `U = exp(−i H_F τ)`.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    pub matrix: Mat<c64>,
    /// Modes whose phase lies within [`BRANCH_MARGIN`] of `±π`.
    pub branch_sensitive: Vec<usize>,
}

pub fn effective_hamiltonian(result: &FloquetResult) -> EffectiveHamiltonian {
    let energies: Vec<f64> = result.quasienergies();
    EffectiveHamiltonian {
        matrix: linalg::reconstruct_hermitian(&energies, result.modes.as_ref()),
        branch_sensitive: result
            .phases
            .iter()
            .enumerate()
            .filter(|(_, &t)| PI - t.abs() < BRANCH_MARGIN)
            .map(|(k, _)| k)
            .collect(),
    }
}

/// For each scale `s`, the distance between `H_F(s)·sτ` and the first-order
/// sum `Σ_j H_j·sτ_j`, in max norm.
///
/// Fails with [`Error::BranchOverflow`] when `s·Σ_j ‖H_j‖τ_j ≥ π`, beyond
/// which the principal logarithm is no longer guaranteed to match the BCH
/// series.
pub fn bch_scaling_probe(schedule: &DriveSchedule, scales: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut cache = ExpCache::default();
    let mut budget = 0.0;
    for layer in schedule.layers() {
        budget += cache.spectral_norm(layer)? * layer.duration;
    }
    let d = schedule.dim();
    let mut first_order = Mat::<f64>::zeros(d, d);
    for layer in schedule.layers() {
        for (i, j, w) in layer.generator.entries() {
            first_order[(i, j)] += w * layer.duration;
            first_order[(j, i)] += w * layer.duration;
        }
    }

    let mut out = Vec::with_capacity(scales.len());
    for &s in scales {
        if s * budget >= PI {
            return Err(Error::BranchOverflow { phase: s * budget });
        }
        let scaled = schedule.scaled(s)?;
        let result = FloquetResult::from_unitary(schedule_unitary(&scaled, &mut cache)?, scaled.period())?;
        let log = linalg::reconstruct_hermitian(&result.phases, result.modes.as_ref());
        let mut defect = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                defect = defect.max((log[(i, j)] - c64::new(s * first_order[(i, j)], 0.0)).norm());
            }
        }
        out.push((s, defect));
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Largest distance between the phase multiset and its negation after
/// pairing sorted values, with `±π` identified.
pub fn pairing_defect(phases: &[f64]) -> f64 {
    let mut pos: Vec<f64> = phases.iter().map(|t| linalg::wrap_phase(*t)).collect();
    let mut neg: Vec<f64> = phases.iter().map(|t| linalg::wrap_phase(-t)).collect();
    // Values within a hair of the cut are folded onto the +π side so that
    // the identification survives the sort.
    for v in pos.iter_mut().chain(neg.iter_mut()) {
        if PI - v.abs() < 1e-9 {
            *v = v.abs();
        }
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    pos.iter()
        .zip(&neg)
        .map(|(a, b)| phase_distance(*a, *b))
        .fold(0.0, f64::max)
}

/// Layer builders for the drives used throughout the crate.
pub mod drives {
    use super::*;

    /// `U_V(τ_V/2) U_H(τ_H) U_V(τ_V/2)`.
    pub fn hv(
        h_v: Arc<LabeledHamiltonian>,
        h_h: Arc<LabeledHamiltonian>,
        tau_v: f64,
        tau_h: f64,
    ) -> Result<DriveSchedule> {
        palindromize(&[DriveLayer::new("V", h_v, tau_v)?, DriveLayer::new("H", h_h, tau_h)?])
    }

    /// The HV drive wrapped in two swap layers of `π/(2 J_swap)` each, so
    /// that the two halves together implement `exp(−i H_swap π / J_swap)`.
    pub fn swap_hv(
        h_swap: Arc<LabeledHamiltonian>,
        j_swap: f64,
        h_v: Arc<LabeledHamiltonian>,
        h_h: Arc<LabeledHamiltonian>,
        tau_v: f64,
        tau_h: f64,
    ) -> Result<DriveSchedule> {
        palindromize(&[
            DriveLayer::new("swap", h_swap, PI / j_swap)?,
            DriveLayer::new("V", h_v, tau_v)?,
            DriveLayer::new("H", h_h, tau_h)?,
        ])
    }

    /// `U_1 U_2 U_3 U_4`, each group on for `τ`: group 4 acts first.
    pub fn standard_afai(groups: &[Arc<LabeledHamiltonian>; 4], tau: f64) -> Result<DriveSchedule> {
        let layers = (0..4)
            .rev()
            .map(|k| DriveLayer::new(format!("AFAI_{}", k + 1), groups[k].clone(), tau))
            .collect::<Result<_>>()?;
        DriveSchedule::new(layers)
    }

    /// `U_1(τ/2) U_2(τ/2) U_3(τ/2) U_4(τ) U_3(τ/2) U_2(τ/2) U_1(τ/2)`.
    pub fn symmetric_afai(groups: &[Arc<LabeledHamiltonian>; 4], tau: f64) -> Result<DriveSchedule> {
        let layers: Vec<DriveLayer> = (0..4)
            .map(|k| DriveLayer::new(format!("AFAI_{}", k + 1), groups[k].clone(), tau))
            .collect::<Result<_>>()?;
        palindromize(&layers)
    }
}
