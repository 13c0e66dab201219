// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Cage motifs on state graphs: grafted trees, the compact localised states
//! they host, and zero/π quasienergy mode counting.

use std::collections::{BTreeMap, VecDeque};

use faer::{c64, Mat};
use serde::Serialize;

use crate::floquet::FloquetResult;
use crate::hamiltonian::{diagonalize, LabeledHamiltonian};
use crate::lattice::StateGraph;
use crate::linalg::{gap_clusters, phase_distance};
use crate::{Error, Result};

/// Graft amplitudes below this count as zero.
pub const GRAFT_TOLERANCE: f64 = 1e-10;

/// Largest accepted `‖Hψ − Eψ‖_∞` for an embedded state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// A tree attached to the rest of the graph through `graft_node` only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraftedTree {
    pub graft_node: usize,
    /// Includes the graft node.
    pub tree_nodes: Vec<usize>,
    /// `(i, j)` with `i < j`.
    pub tree_edges: Vec<(usize, usize)>,
    /// Set when the motif shares its centre with other reported motifs.
    pub overlapping: bool,
}

impl GraftedTree {
    /// Tree nodes other than the graft.
    pub fn dangling_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.tree_nodes.iter().copied().filter(move |&n| n != self.graft_node)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactLocalisedState {
    pub support: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub energy: f64,
    /// `‖Hψ − Eψ‖_∞` against the full Hamiltonian.
    #[serde(skip)]
    pub residual: f64,
}

impl CompactLocalisedState {
    /// The state as a dense vector of length `dim`.
    pub fn dense(&self, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for (&n, &a) in self.support.iter().zip(&self.amplitudes) {
            v[n] = a;
        }
        v
    }
}

/// Centres with at least two degree-1 neighbours and one other neighbour.
/// A centre with `k` leaves yields all `C(k, 2)` leaf pairs, flagged as
/// overlapping when `k > 2`.
pub fn find_grafted_p3(graph: &StateGraph) -> Vec<GraftedTree> {
    let adj = graph.adjacency();
    let mut out = Vec::new();
    for (centre, neighbours) in adj.iter().enumerate() {
        let (leaves, bulk): (Vec<usize>, Vec<usize>) =
            neighbours.iter().partition(|&&n| adj[n].len() == 1);
        if leaves.len() < 2 || bulk.is_empty() {
            continue;
        }
        let overlapping = leaves.len() > 2;
        for (a, &u) in leaves.iter().enumerate() {
            for &v in &leaves[a + 1..] {
                out.push(GraftedTree {
                    graft_node: centre,
                    tree_nodes: vec![centre, u, v],
                    tree_edges: vec![(centre.min(u), centre.max(u)), (centre.min(v), centre.max(v))],
                    overlapping,
                });
            }
        }
    }
    out
}

/// Trees hanging off the 2-core, found by repeatedly removing nodes of
/// degree at most one. All stripped nodes attached to the same core node form
/// one tree grafted at that node. Stripped components that never touch the
/// core are skipped.
pub fn find_dangling_trees(graph: &StateGraph) -> Result<Vec<GraftedTree>> {
    let adj = graph.adjacency();
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut stripped = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();
    while let Some(a) = queue.pop_front() {
        if stripped[a] {
            continue;
        }
        stripped[a] = true;
        for &b in &adj[a] {
            if !stripped[b] {
                degree[b] -= 1;
                if degree[b] == 1 {
                    queue.push_back(b);
                }
            }
        }
    }
    if stripped.iter().all(|&s| s) {
        return Err(Error::Forest);
    }

    let mut by_graft: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if !stripped[start] || seen[start] {
            continue;
        }
        let mut component = vec![start];
        let mut graft = None;
        seen[start] = true;
        let mut k = 0;
        while k < component.len() {
            let a = component[k];
            k += 1;
            for &b in &adj[a] {
                if !stripped[b] {
                    graft = Some(b);
                } else if !seen[b] {
                    seen[b] = true;
                    component.push(b);
                }
            }
        }
        if let Some(g) = graft {
            by_graft.entry(g).or_default().extend(component);
        }
    }

    Ok(by_graft
        .into_iter()
        .map(|(graft, mut nodes)| {
            nodes.push(graft);
            nodes.sort_unstable();
            let tree_edges = nodes
                .iter()
                .flat_map(|&a| {
                    adj[a]
                        .iter()
                        .filter(move |&&b| a < b)
                        .map(move |&b| (a, b))
                })
                .filter(|(_, b)| nodes.binary_search(b).is_ok())
                .collect();
            GraftedTree {
                graft_node: graft,
                tree_nodes: nodes,
                tree_edges,
                overlapping: false,
            }
        })
        .collect())
}

/// Compact localised states of a grafted tree: the [`tree_eigenstates`]
/// whose full-graph residual is within [`RESIDUAL_TOLERANCE`].
pub fn cls_from_tree(tree: &GraftedTree, full: &LabeledHamiltonian) -> Result<Vec<CompactLocalisedState>> {
    Ok(tree_eigenstates(tree, full)?
        .into_iter()
        .filter(|s| s.residual <= RESIDUAL_TOLERANCE)
        .collect())
}

/// Eigenstates of the tree's own Hamiltonian with no weight on the graft,
/// embedded in the full graph, with their full-graph residuals. Hopping
/// weights are read from `full`. Within a degenerate tree level, the
/// combinations orthogonal to the graft row are used.
pub fn tree_eigenstates(tree: &GraftedTree, full: &LabeledHamiltonian) -> Result<Vec<CompactLocalisedState>> {
    let nodes = &tree.tree_nodes;
    if let Some(&bad) = nodes.iter().find(|&&n| n >= full.dim()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            dim: full.dim(),
        });
    }
    let m = nodes.len();
    let local_edges: Vec<(usize, usize, f64)> = tree
        .tree_edges
        .iter()
        .map(|&(a, b)| {
            let ia = nodes.iter().position(|&x| x == a);
            let ib = nodes.iter().position(|&x| x == b);
            match (ia, ib) {
                (Some(ia), Some(ib)) => Ok((ia, ib, full.entry(a, b))),
                _ => Err(Error::InvalidParameter {
                    name: "tree",
                    reason: format!("edge ({a}, {b}) leaves the tree"),
                }),
            }
        })
        .collect::<Result<_>>()?;
    let local = LabeledHamiltonian::from_edge_weights(m, &local_edges)?;
    let spectrum = diagonalize(&local)?;
    let g = nodes
        .iter()
        .position(|&x| x == tree.graft_node)
        .ok_or_else(|| Error::InvalidParameter {
            name: "tree",
            reason: "graft node is not a tree node".into(),
        })?;
    let level_tol = 1e-9 * spectrum.spectral_norm().max(1.0);

    let mut out = Vec::new();
    for level in gap_clusters(&spectrum.eigenvalues, level_tol) {
        let basis: Vec<Vec<f64>> = level
            .clone()
            .map(|k| (0..m).map(|i| spectrum.eigenvectors[(i, k)]).collect())
            .collect();
        for local_state in graft_free_combinations(&basis, g) {
            let mut psi = vec![0.0; full.dim()];
            for (i, &node) in nodes.iter().enumerate() {
                psi[node] = local_state[i];
            }
            let h_psi = full.apply(&psi);
            let energy: f64 = psi.iter().zip(&h_psi).map(|(a, b)| a * b).sum();
            let residual = h_psi
                .iter()
                .zip(&psi)
                .map(|(hp, p)| (hp - energy * p).abs())
                .fold(0.0, f64::max);
            let mut support: Vec<usize> = nodes
                .iter()
                .copied()
                .filter(|&n| psi[n].abs() > 1e-12)
                .collect();
            support.sort_unstable();
            let amplitudes = support.iter().map(|&n| psi[n]).collect();
            out.push(CompactLocalisedState {
                support,
                amplitudes,
                energy,
                residual,
            });
        }
    }
    Ok(out)
}

/// Orthonormal combinations of `basis` vanishing at index `g`, sign-fixed so
/// the first significant amplitude is positive.
fn graft_free_combinations(basis: &[Vec<f64>], g: usize) -> Vec<Vec<f64>> {
    let row: Vec<f64> = basis.iter().map(|v| v[g]).collect();
    let row_norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut candidates: Vec<Vec<f64>> = if row_norm < GRAFT_TOLERANCE {
        basis.to_vec()
    } else {
        // Project each basis vector off the combination that carries the graft
        // weight.
        let carrier: Vec<f64> = (0..basis[0].len())
            .map(|i| basis.iter().zip(&row).map(|(v, r)| v[i] * r / row_norm).sum())
            .collect();
        basis
            .iter()
            .map(|v| {
                let dot: f64 = v.iter().zip(&carrier).map(|(a, b)| a * b).sum();
                v.iter().zip(&carrier).map(|(a, b)| a - dot * b).collect()
            })
            .collect()
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in candidates.iter_mut() {
        for q in &out {
            let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        v[g] = 0.0;
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        out.push(v.clone());
    }
    out
}

/// Number of phases within `tol` of `target`, compared on the circle.
pub fn count_modes_at(result: &FloquetResult, target: f64, tol: f64) -> usize {
    result
        .phases
        .iter()
        .filter(|&&t| phase_distance(t, target) < tol)
        .count()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DtcWitness {
    /// `⟨ψ|U|ψ⟩`.
    pub overlap: c64,
    pub r1: f64,
    /// `|⟨ψ|U²|ψ⟩|`.
    pub r2: f64,
    /// `r2 > 0.99` and `Re⟨ψ|U|ψ⟩ < −0.99`.
    pub period_doubled: bool,
}

/// One- and two-period return amplitudes of a normalised state.
pub fn dtc_witness(result: &FloquetResult, state: &CompactLocalisedState) -> DtcWitness {
    let d = result.dim();
    let mut psi = Mat::<c64>::zeros(d, 1);
    for (&n, &a) in state.support.iter().zip(&state.amplitudes) {
        psi[(n, 0)] = c64::new(a, 0.0);
    }
    let once = &result.u * &psi;
    let twice = &result.u * &once;
    let inner = |v: &Mat<c64>| -> c64 {
        (0..d).fold(c64::new(0.0, 0.0), |acc, i| acc + psi[(i, 0)].conj() * v[(i, 0)])
    };
    let overlap = inner(&once);
    let r2 = inner(&twice).norm();
    DtcWitness {
        overlap,
        r1: overlap.norm(),
        r2,
        period_doubled: r2 > 0.99 && overlap.re < -0.99,
    }
}

#[derive(Serialize)]
struct MotifEntry<'a> {
    graft_node: usize,
    tree_nodes: &'a [usize],
    cls: &'a [CompactLocalisedState],
}

/// JSON list of `{graft_node, tree_nodes, cls: [{support, amplitudes, energy}]}`.
pub fn motif_report_json(motifs: &[(GraftedTree, Vec<CompactLocalisedState>)]) -> String {
    let entries: Vec<MotifEntry<'_>> = motifs
        .iter()
        .map(|(tree, cls)| MotifEntry {
            graft_node: tree.graft_node,
            tree_nodes: &tree.tree_nodes,
            cls,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("motif report serialises")
}
