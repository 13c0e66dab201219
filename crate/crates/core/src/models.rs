// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Concrete model builders: quantum hard disks, imbalanced bipartite random
//! graphs (IBRG) and the grafted-tree toy model.

use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::hamiltonian::{assemble, weights, LabeledHamiltonian};
use crate::lattice::{build_state_graph, Edge, LatticeSpec, MoveLabel, StateGraph};
use crate::{Error, Result};

/// Hopping generators of the hard-disk model on one shared node order.
#[derive(Clone, Debug)]
pub struct QhdGenerators {
    /// State graph carrying H, V and NNN_diag edges.
    pub graph: StateGraph,
    pub h_full: LabeledHamiltonian,
    pub h_v: LabeledHamiltonian,
    pub h_h: LabeledHamiltonian,
    pub h_swap: LabeledHamiltonian,
}

impl QhdGenerators {
    /// The graph restricted to nearest-neighbour hops.
    pub fn hopping_graph(&self) -> StateGraph {
        self.graph.restricted(&[MoveLabel::H, MoveLabel::V])
    }
}

pub fn qhd_generators(lattice: &LatticeSpec, n: usize, j: f64, j_swap: f64) -> Result<QhdGenerators> {
    let graph = build_state_graph(lattice, n, &[MoveLabel::H, MoveLabel::V, MoveLabel::NnnDiag])?;
    Ok(QhdGenerators {
        h_full: assemble(&graph, &weights(&[(MoveLabel::H, j), (MoveLabel::V, j)])),
        h_v: assemble(&graph, &weights(&[(MoveLabel::V, j)])),
        h_h: assemble(&graph, &weights(&[(MoveLabel::H, j)])),
        h_swap: assemble(&graph, &weights(&[(MoveLabel::NnnDiag, j_swap)])),
        graph,
    })
}

/// The four bond-group generators of the anomalous Floquet drive, in
/// AFAI_1..AFAI_4 order.
#[derive(Clone, Debug)]
pub struct AfaiGenerators {
    pub graph: StateGraph,
    pub groups: [LabeledHamiltonian; 4],
}

pub fn afai_generators(lattice: &LatticeSpec, n: usize, j: f64) -> Result<AfaiGenerators> {
    let graph = build_state_graph(lattice, n, &MoveLabel::AFAI)?;
    let groups = MoveLabel::AFAI.map(|l| assemble(&graph, &weights(&[(l, j)])));
    Ok(AfaiGenerators { graph, groups })
}

/// Parameters of an imbalanced bipartite random graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IbrgParams {
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    /// Average connectivity; edge probability is `alpha / (N1 + N2)`.
    pub alpha: f64,
    pub seed: u64,
}

impl IbrgParams {
    pub fn new(n1: usize, n2: usize, alpha: f64, seed: u64) -> Result<Self> {
        let p = Self { n1, n2, alpha, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn probability(&self) -> f64 {
        self.alpha / (self.n1 + self.n2) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidParameter {
                name: "N1/N2",
                reason: "both sublattices need at least one node".into(),
            });
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must be finite and non-negative, got {}", self.alpha),
            });
        }
        let p = self.probability();
        if p > 1.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("edge probability alpha/(N1+N2) = {p} exceeds 1"),
            });
        }
        Ok(())
    }
}

/// One IBRG realisation. Nodes `0..N1` form sublattice 0 and
/// `N1..N1+N2` sublattice 1.
pub fn ibrg_generate(params: &IbrgParams) -> Result<StateGraph> {
    params.validate()?;
    ibrg_layer(params, params.seed, 0)
}

/// `m` independent IBRG layers on the same node sets.
///
/// Layer `k` draws from ChaCha8 seeded with `base_seed` on stream `k`, so
/// layer 0 reproduces [`ibrg_generate`] when `base_seed == params.seed`.
pub fn ibrg_floquet_layers(params: &IbrgParams, m: usize, base_seed: u64) -> Result<Vec<StateGraph>> {
    params.validate()?;
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "M",
            reason: "drive depth must be at least 1".into(),
        });
    }
    (0..m as u64).map(|k| ibrg_layer(params, base_seed, k)).collect()
}

fn ibrg_layer(params: &IbrgParams, seed: u64, stream: u64) -> Result<StateGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let p = params.probability();
    let (n1, n2) = (params.n1, params.n2);
    let mut edges = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u < p {
                edges.push(Edge(i, n1 + j, MoveLabel::Generic));
            }
        }
    }
    let nodes = (0..(n1 + n2) as u64).collect();
    let parity = (0..n1 + n2).map(|i| (i >= n1) as u8).collect();
    StateGraph::from_parts(nodes, edges, parity)
}

/// Node bookkeeping for [`toy_model`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyModelSpec {
    pub chain_length: usize,
    /// `c_1..c_L`.
    pub chain: Vec<usize>,
    /// `[t_A, t_B]`.
    pub centres: [usize; 2],
    /// `[[u_A, v_A], [u_B, v_B]]`.
    pub leaves: [[usize; 2]; 2],
    /// Hopping edges labelled `V` form drive layer 1, `H` layer 2.
    pub layer_labels: [MoveLabel; 2],
    /// Label of the swap edges (every graph-distance-2 pair).
    pub swap_label: MoveLabel,
}

/// Two grafted three-site trees joined through a chain of `chain_length`
/// sites.
///
/// Node ids: `c_k = k − 1`, then `t_A, u_A, v_A, t_B, u_B, v_B`. Hopping
/// edges alternate between the two drive layers along the path
/// `u_A - t_A - c_1 - … - c_L - t_B - u_B`, with both leaf edges of a tree in
/// the same layer. Swap edges join every pair of nodes at graph distance 2.
pub fn toy_model(chain_length: usize) -> Result<(StateGraph, ToyModelSpec)> {
    if chain_length < 2 {
        return Err(Error::InvalidParameter {
            name: "chain_length",
            reason: format!("must be at least 2, got {chain_length}"),
        });
    }
    let l = chain_length;
    let [t_a, u_a, v_a, t_b, u_b, v_b] = std::array::from_fn(|k| l + k);
    let layer = |k: usize| [MoveLabel::V, MoveLabel::H][k % 2];

    let mut hops = vec![
        Edge(u_a, t_a, layer(0)),
        Edge(v_a, t_a, layer(0)),
        Edge(t_a, 0, layer(1)),
    ];
    for k in 0..l - 1 {
        hops.push(Edge(k, k + 1, layer(k + 2)));
    }
    let graft_b = layer(l + 1);
    let leaf_b = layer(l + 2);
    hops.extend([
        Edge(l - 1, t_b, graft_b),
        Edge(t_b, u_b, leaf_b),
        Edge(t_b, v_b, leaf_b),
    ]);

    let n = l + 6;
    let mut adj = vec![Vec::new(); n];
    for e in &hops {
        adj[e.i()].push(e.j());
        adj[e.j()].push(e.i());
    }
    let mut edges = hops;
    for neighbours in &adj {
        for (x, &b) in neighbours.iter().enumerate() {
            for &c in &neighbours[x + 1..] {
                edges.push(Edge(b, c, MoveLabel::NnnDiag));
            }
        }
    }

    let parity = two_colouring(&adj);
    let graph = StateGraph::from_parts((0..n as u64).collect(), edges, parity)?;
    let spec = ToyModelSpec {
        chain_length: l,
        chain: (0..l).collect(),
        centres: [t_a, t_b],
        leaves: [[u_a, v_a], [u_b, v_b]],
        layer_labels: [MoveLabel::V, MoveLabel::H],
        swap_label: MoveLabel::NnnDiag,
    };
    Ok((graph, spec))
}

fn two_colouring(adj: &[Vec<usize>]) -> Vec<u8> {
    let mut colour = vec![u8::MAX; adj.len()];
    for root in 0..adj.len() {
        if colour[root] != u8::MAX {
            continue;
        }
        colour[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if colour[b] == u8::MAX {
                    colour[b] = 1 - colour[a];
                    queue.push_back(b);
                }
            }
        }
    }
    colour
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{chiral_blocks, diagonalize};
    use crate::lattice::{imbalance, Boundary, Configuration};
    use proptest::prelude::*;

    #[test]
    fn qhd_two_by_two_single_particle() {
        let g = qhd_generators(&LatticeSpec::open(2, 2).unwrap(), 1, 1.0, 1.0).unwrap();
        assert_eq!(g.h_v.nnz(), 2);
        assert_eq!(g.h_h.nnz(), 2);
        assert_eq!(g.h_full.nnz(), 4);
        // The diagonal hops (0,0)->(1,1) and (1,0)->(0,1).
        assert_eq!(g.h_swap.nnz(), 2);
        let c00 = g.graph.index_of(Configuration::from_sites(&[0])).unwrap();
        let c11 = g.graph.index_of(Configuration::from_sites(&[3])).unwrap();
        assert_eq!(g.h_swap.entry(c00, c11), 1.0);
    }

    #[test]
    fn full_is_sum_of_directional_parts() {
        for (lx, ly, n) in [(3, 3, 2), (4, 4, 3), (4, 3, 4)] {
            let g = qhd_generators(&LatticeSpec::open(lx, ly).unwrap(), n, 0.7, 1.3).unwrap();
            assert_eq!(g.h_full.to_dense(), (&g.h_v + &g.h_h).to_dense());
            assert!(g
                .graph
                .edges()
                .iter()
                .filter(|e| e.label() == MoveLabel::NnnDiag)
                .all(|e| g.graph.parity()[e.i()] == g.graph.parity()[e.j()]));
            assert!(chiral_blocks(&g.h_full, g.graph.parity()).is_ok());
            if g.h_swap.nnz() > 0 {
                assert!(chiral_blocks(&g.h_swap, g.graph.parity()).is_err());
            }
        }
    }

    #[test]
    fn afai_groups_sum_to_full_hopping() {
        let lat = LatticeSpec::new(3, 3, Boundary::Open).unwrap();
        let afai = afai_generators(&lat, 2, 1.0).unwrap();
        let qhd = qhd_generators(&lat, 2, 1.0, 0.0).unwrap();
        let [a, b, c, d] = &afai.groups;
        let total = &(&(a + b) + c) + d;
        assert_eq!(total.to_dense(), qhd.h_full.to_dense());
    }

    #[test]
    fn ibrg_zero_alpha_has_no_edges() {
        let g = ibrg_generate(&IbrgParams::new(3, 5, 0.0, 1).unwrap()).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.len(), 8);
        assert_eq!(imbalance(&g), 2);
    }

    #[test]
    fn ibrg_rejects_probability_above_one() {
        assert!(IbrgParams::new(2, 2, 5.0, 0).is_err());
        assert!(IbrgParams::new(0, 2, 1.0, 0).is_err());
        assert!(IbrgParams::new(2, 2, f64::NAN, 0).is_err());
    }

    #[test]
    fn ibrg_block_shape() {
        let g = ibrg_generate(&IbrgParams::new(3, 5, 2.0, 9).unwrap()).unwrap();
        let h = assemble(&g, &weights(&[(MoveLabel::Generic, 1.0)]));
        let blocks = chiral_blocks(&h, g.parity()).unwrap();
        assert_eq!((blocks.h_offdiag.nrows(), blocks.h_offdiag.ncols()), (3, 5));
    }

    #[test]
    fn ibrg_edge_count_matches_binomial_mean() {
        let (n1, n2, alpha) = (1000, 1000, 4.0);
        let p = alpha / (n1 + n2) as f64;
        let trials = 100;
        let counts: Vec<f64> = (0..trials)
            .map(|seed| {
                let params = IbrgParams::new(n1, n2, alpha, seed).unwrap();
                ibrg_generate(&params).unwrap().edges().len() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let expected = p * (n1 * n2) as f64;
        let std_err = (p * (1.0 - p) * (n1 * n2) as f64).sqrt() / (trials as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * std_err, "{mean} vs {expected}");
    }

    #[test]
    fn single_layer_equals_generate() {
        let params = IbrgParams::new(20, 30, 2.0, 42).unwrap();
        let layers = ibrg_floquet_layers(&params, 1, 42).unwrap();
        assert_eq!(layers, vec![ibrg_generate(&params).unwrap()]);
        assert!(ibrg_floquet_layers(&params, 0, 42).is_err());
    }

    #[test]
    fn layers_differ() {
        for seed in 0..10 {
            let params = IbrgParams::new(40, 50, 2.0, seed).unwrap();
            let layers = ibrg_floquet_layers(&params, 3, seed).unwrap();
            assert!(layers.windows(2).any(|w| w[0].edges() != w[1].edges()));
        }
    }

    #[test]
    fn toy_model_shape() {
        let (g, spec) = toy_model(50).unwrap();
        assert_eq!(g.len(), 56);
        let hop = g.restricted(&spec.layer_labels);
        let degrees: Vec<usize> = hop.adjacency().iter().map(Vec::len).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 4);
        assert_eq!(degrees.iter().filter(|&&d| d == 3).count(), 2);
        for (t, [u, v]) in spec.centres.iter().zip(spec.leaves) {
            assert_eq!(degrees[*t], 3);
            assert_eq!(hop.edges().iter().find(|e| e.j() == u || e.j() == v).map(|e| e.i()), Some(*t));
        }
        assert!(toy_model(1).is_err());
    }

    #[test]
    fn toy_model_layers_alternate() {
        let (g, spec) = toy_model(50).unwrap();
        let hop = g.restricted(&spec.layer_labels);
        let adj = hop.adjacency();
        let label = |a: usize, b: usize| {
            hop.edges()
                .iter()
                .find(|e| (e.i(), e.j()) == (a.min(b), a.max(b)))
                .unwrap()
                .label()
        };
        // Along the backbone u_A, t_A, c_1..c_L, t_B, u_B labels alternate.
        let mut path = vec![spec.leaves[0][0], spec.centres[0]];
        path.extend(&spec.chain);
        path.extend([spec.centres[1], spec.leaves[1][0]]);
        for w in path.windows(3) {
            assert_ne!(label(w[0], w[1]), label(w[1], w[2]));
        }
        for (t, [u, v]) in spec.centres.iter().zip(spec.leaves) {
            assert_eq!(label(*t, u), label(*t, v));
        }
        assert!(adj.iter().all(|n| !n.is_empty()));
    }

    #[test]
    fn toy_model_swap_edges_are_distance_two() {
        let (g, spec) = toy_model(6).unwrap();
        let adj = g.restricted(&spec.layer_labels).adjacency();
        let swaps: Vec<&Edge> = g.edges().iter().filter(|e| e.label() == spec.swap_label).collect();
        for e in &swaps {
            assert!(!adj[e.i()].contains(&e.j()));
            assert!(adj[e.i()].iter().any(|m| adj[*m].contains(&e.j())));
        }
        for [u, v] in spec.leaves {
            assert!(swaps.iter().any(|e| (e.i(), e.j()) == (u.min(v), u.max(v))));
        }
    }

    #[test]
    fn toy_static_spectrum_has_two_zero_modes() {
        let (g, spec) = toy_model(50).unwrap();
        let h = assemble(&g, &weights(&[(spec.layer_labels[0], 1.0), (spec.layer_labels[1], 1.0)]));
        let blocks = chiral_blocks(&h, g.parity()).unwrap();
        let spectrum = diagonalize(&h).unwrap();
        // With an even chain the two sublattices balance; both zero modes are
        // the leaf-pair cages.
        assert_eq!(blocks.imbalance(), 0);
        assert_eq!(spectrum.zero_modes(), 2);
    }

    proptest! {
        #[test]
        fn ibrg_is_reproducible_and_bipartite(
            n1 in 1usize..40, n2 in 1usize..40, alpha in 0.0f64..3.0, seed in any::<u64>()
        ) {
            let params = IbrgParams::new(n1, n2, alpha.min((n1 + n2) as f64), seed).unwrap();
            let a = ibrg_generate(&params).unwrap();
            let b = ibrg_generate(&params).unwrap();
            prop_assert_eq!(a.edges(), b.edges());
            for e in a.edges() {
                prop_assert_ne!(a.parity()[e.i()], a.parity()[e.j()]);
            }
            prop_assert_eq!(imbalance(&a), n1.abs_diff(n2));
        }
    }
}
