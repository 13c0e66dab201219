// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Real symmetric hopping Hamiltonians on state graphs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Add;

use faer::Mat;

use crate::lattice::{MoveLabel, StateGraph};
use crate::linalg;
use crate::{Error, Result};

/// Largest dimension handed to the dense eigensolver by default.
pub const DEFAULT_DENSE_CAP: usize = 8192;

pub type LabelWeights = BTreeMap<MoveLabel, f64>;

/// Builds a weight map from `(label, J)` pairs.
pub fn weights(pairs: &[(MoveLabel, f64)]) -> LabelWeights {
    pairs.iter().copied().collect()
}

/// `1e-8 · max(1, norm)`: the default threshold separating exact zero modes
/// from small splittings.
pub fn zero_tolerance(norm: f64) -> f64 {
    1e-8 * norm.max(1.0)
}

/// Sparse real symmetric matrix with zero diagonal. Only the strict upper
/// triangle is stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledHamiltonian {
    dim: usize,
    entries: BTreeMap<(usize, usize), f64>,
    labels: BTreeMap<(usize, usize), MoveLabel>,
    label_weights: LabelWeights,
}

impl LabeledHamiltonian {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    /// Hamiltonian with explicit per-edge weights and no labels.
    pub fn from_edge_weights(dim: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut h = Self::zeros(dim);
        for &(a, b, w) in edges {
            let (i, j) = (a.min(b), a.max(b));
            if j >= dim {
                return Err(Error::IndexOutOfRange { index: j, dim });
            }
            if i == j {
                return Err(Error::InvalidParameter {
                    name: "edges",
                    reason: format!("diagonal entry ({i}, {i}) is not a hopping"),
                });
            }
            if !w.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "edges",
                    reason: format!("weight of ({i}, {j}) is not finite"),
                });
            }
            h.accumulate(i, j, w, None);
        }
        Ok(h)
    }

    fn accumulate(&mut self, i: usize, j: usize, w: f64, label: Option<MoveLabel>) {
        if w == 0.0 {
            return;
        }
        let slot = self.entries.entry((i, j)).or_insert(0.0);
        *slot += w;
        if *slot == 0.0 {
            self.entries.remove(&(i, j));
            self.labels.remove(&(i, j));
        } else if let Some(l) = label {
            self.labels.entry((i, j)).or_insert(l);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn label_weights(&self) -> &LabelWeights {
        &self.label_weights
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Label of the edge behind entry `(i, j)`, if it came from a labelled graph.
    pub fn label(&self, i: usize, j: usize) -> Option<MoveLabel> {
        self.labels.get(&(i.min(j), i.max(j))).copied()
    }

    /// Stored entries `(i, j, value)` with `i < j`, in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::zeros(self.dim);
        for (i, j, w) in self.entries() {
            out.accumulate(i, j, w * factor, self.label(i, j));
        }
        out.label_weights = self
            .label_weights
            .iter()
            .map(|(&l, &w)| (l, w * factor))
            .collect();
        out
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (i, j, w) in self.entries() {
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
        m
    }

    /// `H · v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "vector length must match dimension");
        let mut out = vec![0.0; self.dim];
        for (i, j, w) in self.entries() {
            out[i] += w * v[j];
            out[j] += w * v[i];
        }
        out
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        for (i, j, w) in self.entries() {
            rows[i] += w.abs();
            rows[j] += w.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}

impl Add for &LabeledHamiltonian {
    type Output = LabeledHamiltonian;

    fn add(self, rhs: &LabeledHamiltonian) -> LabeledHamiltonian {
        assert_eq!(self.dim, rhs.dim, "cannot add Hamiltonians of different dimension");
        let mut out = self.clone();
        for (i, j, w) in rhs.entries() {
            out.accumulate(i, j, w, rhs.label(i, j));
        }
        for (&l, &w) in &rhs.label_weights {
            *out.label_weights.entry(l).or_insert(0.0) += w;
        }
        out
    }
}

impl Add for LabeledHamiltonian {
    type Output = LabeledHamiltonian;

    fn add(self, rhs: LabeledHamiltonian) -> LabeledHamiltonian {
        &self + &rhs
    }
}

/// Puts weight `weights[label]` on every edge of `graph`. Labels missing
/// from the map get weight 0, which drops the edge.
pub fn assemble(graph: &StateGraph, weights: &LabelWeights) -> LabeledHamiltonian {
    let mut h = LabeledHamiltonian::zeros(graph.len());
    for e in graph.edges() {
        if let Some(&w) = weights.get(&e.label()) {
            h.accumulate(e.i(), e.j(), w, Some(e.label()));
        }
    }
    h.label_weights = weights.clone();
    h
}

/// Sublattice-ordered view of a chiral Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiralBlocks {
    /// Parity-0 nodes first, then parity-1 nodes, each ascending.
    pub permutation: Vec<usize>,
    pub n1: usize,
    pub n2: usize,
    /// `N1 × N2` block coupling the two sublattices.
    pub h_offdiag: Mat<f64>,
}

impl ChiralBlocks {
    /// Full matrix in the permuted basis.
    pub fn reconstruct(&self) -> Mat<f64> {
        let d = self.n1 + self.n2;
        Mat::from_fn(d, d, |a, b| match (a < self.n1, b < self.n1) {
            (true, false) => self.h_offdiag[(a, b - self.n1)],
            (false, true) => self.h_offdiag[(b, a - self.n1)],
            _ => 0.0,
        })
    }

    pub fn imbalance(&self) -> usize {
        self.n1.abs_diff(self.n2)
    }
}

pub fn chiral_blocks(h: &LabeledHamiltonian, parity: &[u8]) -> Result<ChiralBlocks> {
    if parity.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: parity.len(),
        });
    }
    if let Some((i, j, _)) = h.entries().find(|&(i, j, _)| parity[i] == parity[j]) {
        return Err(Error::Chirality {
            i,
            j,
            label: h.label(i, j),
        });
    }
    let mut position = vec![0; h.dim()];
    let mut permutation = Vec::with_capacity(h.dim());
    for side in [0u8, 1] {
        for (node, _) in parity.iter().enumerate().filter(|(_, &p)| p == side) {
            position[node] = permutation.len();
            permutation.push(node);
        }
    }
    let n1 = parity.iter().filter(|&&p| p == 0).count();
    let n2 = h.dim() - n1;
    let mut block = Mat::zeros(n1, n2);
    for (i, j, w) in h.entries() {
        let (a, b) = if parity[i] == 0 { (i, j) } else { (j, i) };
        block[(position[a], position[b] - n1)] = w;
    }
    Ok(ChiralBlocks {
        permutation,
        n1,
        n2,
        h_offdiag: block,
    })
}

/// Eigenpairs of a real symmetric Hamiltonian.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns.
    pub eigenvectors: Mat<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// Number of eigenvalues with `|E| < tol`.
    pub fn count_near(&self, energy: f64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| (*e - energy).abs() < tol)
            .count()
    }

    /// Kernel dimension at the default zero tolerance.
    pub fn zero_modes(&self) -> usize {
        self.count_near(0.0, zero_tolerance(self.spectral_norm()))
    }

    /// `max_k ‖H v_k − E_k v_k‖_∞`.
    pub fn max_residual(&self, h: &LabeledHamiltonian) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for k in 0..d {
            let v: Vec<f64> = (0..d).map(|i| self.eigenvectors[(i, k)]).collect();
            let hv = h.apply(&v);
            for i in 0..d {
                worst = worst.max((hv[i] - self.eigenvalues[k] * v[i]).abs());
            }
        }
        worst
    }

    /// `index,eigenvalue` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (k, e) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "{k},{e:.15e}");
        }
        out
    }
}

pub fn diagonalize(h: &LabeledHamiltonian) -> Result<SpectralDecomposition> {
    diagonalize_with_cap(h, DEFAULT_DENSE_CAP)
}

pub fn diagonalize_with_cap(h: &LabeledHamiltonian, cap: usize) -> Result<SpectralDecomposition> {
    if h.dim() > cap {
        return Err(Error::Capacity {
            what: "Hilbert-space dimension",
            requested: h.dim(),
            limit: cap,
        });
    }
    let (eigenvalues, eigenvectors) = linalg::symmetric_eigen(h.to_dense().as_ref())?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
