// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Hard-disk configurations on a square lattice and the many-body state graph
//! they span.
//!
//! A [`Configuration`] is an occupation bitmask over row-major site indices
//! `site(x, y) = y·Lx + x`. Valid configurations never occupy two nearest
//! neighbours. Nodes of a [`StateGraph`] are kept in ascending bitmask order so
//! that matrices and serialized graphs are reproducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One configuration must fit a single machine word.
pub const MAX_SITES: usize = 64;

/// Enumeration stops with a capacity error beyond this many configurations.
pub const MAX_CONFIGURATIONS: usize = 1 << 21;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLattice")]
pub struct LatticeSpec {
    #[serde(rename = "Lx")]
    lx: usize,
    #[serde(rename = "Ly")]
    ly: usize,
    boundary: Boundary,
}

#[derive(Deserialize)]
struct RawLattice {
    #[serde(rename = "Lx")]
    lx: usize,
    #[serde(rename = "Ly")]
    ly: usize,
    #[serde(default)]
    boundary: Boundary,
}

impl TryFrom<RawLattice> for LatticeSpec {
    type Error = Error;

    fn try_from(raw: RawLattice) -> Result<Self> {
        LatticeSpec::new(raw.lx, raw.ly, raw.boundary)
    }
}

impl LatticeSpec {
    pub fn new(lx: usize, ly: usize, boundary: Boundary) -> Result<Self> {
        Self::with_cap(lx, ly, boundary, MAX_SITES)
    }

    pub fn open(lx: usize, ly: usize) -> Result<Self> {
        Self::new(lx, ly, Boundary::Open)
    }

    /// Like [`LatticeSpec::new`] with a site cap tighter than [`MAX_SITES`].
    pub fn with_cap(lx: usize, ly: usize, boundary: Boundary, cap: usize) -> Result<Self> {
        if lx == 0 || ly == 0 {
            return Err(Error::InvalidParameter {
                name: "lattice",
                reason: format!("dimensions must be positive, got {lx}x{ly}"),
            });
        }
        let limit = cap.min(MAX_SITES);
        let sites = lx.saturating_mul(ly);
        if sites > limit {
            return Err(Error::Capacity {
                what: "lattice sites",
                requested: sites,
                limit,
            });
        }
        Ok(Self { lx, ly, boundary })
    }

    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.lx && y < self.ly);
        y * self.lx + x
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.lx, site / self.lx)
    }

    /// Site displaced by `(dx, dy)`, or `None` when it falls off an open edge
    /// or wraps back onto `site` itself.
    pub fn neighbour(&self, site: usize, dx: isize, dy: isize) -> Option<usize> {
        let (x, y) = self.coords(site);
        let shift = |c: usize, d: isize, len: usize| -> Option<usize> {
            let raw = c as isize + d;
            match self.boundary {
                Boundary::Open => (0..len as isize).contains(&raw).then_some(raw as usize),
                Boundary::Periodic => Some(raw.rem_euclid(len as isize) as usize),
            }
        };
        let target = self.site(shift(x, dx, self.lx)?, shift(y, dy, self.ly)?);
        (target != site).then_some(target)
    }

    /// Bitmask of the nearest neighbours of `site`.
    pub fn neighbour_mask(&self, site: usize) -> u64 {
        [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .filter_map(|(dx, dy)| self.neighbour(site, dx, dy))
            .fold(0, |mask, s| mask | (1 << s))
    }
}

/// Occupation bitmask of one Fock basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(u64);

impl Configuration {
    pub fn new(bits: u64) -> Self {
        Self(bits)
    }

    pub fn from_sites(sites: &[usize]) -> Self {
        Self(sites.iter().fold(0, |m, &s| m | (1 << s)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn particle_count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_occupied(self, site: usize) -> bool {
        self.0 >> site & 1 == 1
    }

    pub fn occupied_sites(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let s = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                s
            })
        })
    }

    /// True when no two occupied sites are nearest neighbours.
    pub fn is_valid(self, lattice: &LatticeSpec) -> bool {
        (lattice.sites() == 64 || self.0 >> lattice.sites() == 0)
            && self
                .occupied_sites()
                .all(|s| lattice.neighbour_mask(s) & self.0 == 0)
    }
}

/// Label carried by every state-graph edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MoveLabel {
    H,
    V,
    #[serde(rename = "NNN_diag")]
    NnnDiag,
    #[serde(rename = "NNN_axis")]
    NnnAxis,
    #[serde(rename = "AFAI_1")]
    Afai1,
    #[serde(rename = "AFAI_2")]
    Afai2,
    #[serde(rename = "AFAI_3")]
    Afai3,
    #[serde(rename = "AFAI_4")]
    Afai4,
    #[serde(rename = "generic")]
    Generic,
}

impl MoveLabel {
    pub const AFAI: [MoveLabel; 4] = [Self::Afai1, Self::Afai2, Self::Afai3, Self::Afai4];

    pub fn name(self) -> &'static str {
        match self {
            Self::H => "H",
            Self::V => "V",
            Self::NnnDiag => "NNN_diag",
            Self::NnnAxis => "NNN_axis",
            Self::Afai1 => "AFAI_1",
            Self::Afai2 => "AFAI_2",
            Self::Afai3 => "AFAI_3",
            Self::Afai4 => "AFAI_4",
            Self::Generic => "generic",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [
            Self::H,
            Self::V,
            Self::NnnDiag,
            Self::NnnAxis,
            Self::Afai1,
            Self::Afai2,
            Self::Afai3,
            Self::Afai4,
            Self::Generic,
        ]
        .into_iter()
        .find(|l| l.name() == name)
    }

    /// Nearest-neighbour hops flip the sublattice parity of a configuration.
    pub fn flips_parity(self) -> bool {
        matches!(
            self,
            Self::H | Self::V | Self::Afai1 | Self::Afai2 | Self::Afai3 | Self::Afai4
        )
    }

    fn displacements(self) -> &'static [(isize, isize)] {
        const HORIZONTAL: &[(isize, isize)] = &[(1, 0), (-1, 0)];
        const VERTICAL: &[(isize, isize)] = &[(0, 1), (0, -1)];
        match self {
            Self::H | Self::Afai1 | Self::Afai3 => HORIZONTAL,
            Self::V | Self::Afai2 | Self::Afai4 => VERTICAL,
            Self::NnnDiag => &[(1, 1), (1, -1), (-1, 1), (-1, -1)],
            Self::NnnAxis => &[(2, 0), (-2, 0), (0, 2), (0, -2)],
            Self::Generic => &[],
        }
    }

    /// AFAI bond class: a bond `(r, r + e)` is "odd" when `x + y` of its base
    /// site `r` is odd. Odd horizontal/vertical bonds are groups 1/2, even
    /// ones 3/4.
    fn afai_class(self) -> Option<bool> {
        match self {
            Self::Afai1 | Self::Afai2 => Some(true),
            Self::Afai3 | Self::Afai4 => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for MoveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// All `n`-particle hard-disk configurations in ascending bitmask order.
pub fn enumerate_configurations(lattice: &LatticeSpec, n: usize) -> Result<Vec<Configuration>> {
    enumerate_configurations_with_cap(lattice, n, MAX_CONFIGURATIONS)
}

/// Like [`enumerate_configurations`], failing once more than `cap`
/// configurations have been found.
pub fn enumerate_configurations_with_cap(lattice: &LatticeSpec, n: usize, cap: usize) -> Result<Vec<Configuration>> {
    let sites = lattice.sites();
    if n > sites {
        return Ok(Vec::new());
    }
    let masks: Vec<u64> = (0..sites).map(|s| lattice.neighbour_mask(s)).collect();
    let mut out = Vec::new();
    if !extend_independent_sets(&masks, 0, n, 0, 0, cap, &mut out) {
        return Err(Error::Capacity {
            what: "configuration count (lower bound)",
            requested: out.len(),
            limit: cap,
        });
    }
    out.sort_unstable();
    Ok(out)
}

/// Depth-first search over independent sets; `false` once `out` exceeds `cap`.
fn extend_independent_sets(
    masks: &[u64],
    start: usize,
    remaining: usize,
    chosen: u64,
    blocked: u64,
    cap: usize,
    out: &mut Vec<Configuration>,
) -> bool {
    if remaining == 0 {
        out.push(Configuration(chosen));
        return out.len() <= cap;
    }
    for site in start..masks.len() {
        if masks.len() - site < remaining {
            break;
        }
        if blocked >> site & 1 == 1 {
            continue;
        }
        if !extend_independent_sets(
            masks,
            site + 1,
            remaining - 1,
            chosen | 1 << site,
            blocked | masks[site] | 1 << site,
            cap,
            out,
        ) {
            return false;
        }
    }
    true
}

/// Single-particle hops of the requested kinds that land on another valid
/// configuration.
pub fn moves_for(
    config: Configuration,
    lattice: &LatticeSpec,
    kinds: &[MoveLabel],
) -> Vec<(Configuration, MoveLabel)> {
    let mut out: Vec<(Configuration, MoveLabel)> = Vec::new();
    let bits = config.bits();
    for from in config.occupied_sites() {
        for (k, &label) in kinds.iter().enumerate() {
            if kinds[..k].contains(&label) {
                continue;
            }
            for &(dx, dy) in label.displacements() {
                let Some(to) = lattice.neighbour(from, dx, dy) else {
                    continue;
                };
                if let Some(odd) = label.afai_class() {
                    let base = if dx + dy > 0 { from } else { to };
                    let (x, y) = lattice.coords(base);
                    if ((x + y) % 2 == 1) != odd {
                        continue;
                    }
                }
                if bits >> to & 1 == 1 {
                    continue;
                }
                let next = (bits & !(1 << from)) | 1 << to;
                if lattice.neighbour_mask(to) & next != 0 {
                    continue;
                }
                let entry = (Configuration(next), label);
                if !out.contains(&entry) {
                    out.push(entry);
                }
            }
        }
    }
    out
}

/// `(Σ over occupied sites of x + y) mod 2`.
pub fn sublattice_parity(config: Configuration, lattice: &LatticeSpec) -> u8 {
    let sum: usize = config
        .occupied_sites()
        .map(|s| {
            let (x, y) = lattice.coords(s);
            x + y
        })
        .sum();
    (sum % 2) as u8
}

/// Edge `(i, j, label)` with `i < j`. Serialized as `[i, j, "label"]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize, pub MoveLabel);

impl Edge {
    pub fn i(&self) -> usize {
        self.0
    }

    pub fn j(&self) -> usize {
        self.1
    }

    pub fn label(&self) -> MoveLabel {
        self.2
    }
}

/// Many-body state graph: basis states as nodes, nonzero hopping matrix
/// elements as labelled edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateGraph {
    lattice: Option<LatticeSpec>,
    #[serde(rename = "N")]
    particles: Option<usize>,
    nodes: Vec<u64>,
    edges: Vec<Edge>,
    parity: Vec<u8>,
}

impl StateGraph {
    /// Graph over opaque node ids. Edges are normalised to `i < j`, sorted
    /// and deduplicated.
    pub fn from_parts(nodes: Vec<u64>, edges: Vec<Edge>, parity: Vec<u8>) -> Result<Self> {
        Self::assemble(None, None, nodes, edges, parity)
    }

    fn assemble(
        lattice: Option<LatticeSpec>,
        particles: Option<usize>,
        nodes: Vec<u64>,
        edges: Vec<Edge>,
        parity: Vec<u8>,
    ) -> Result<Self> {
        let n = nodes.len();
        if parity.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: parity.len(),
            });
        }
        if let Some(&p) = parity.iter().find(|&&p| p > 1) {
            return Err(Error::InvalidParameter {
                name: "parity",
                reason: format!("parity values must be 0 or 1, got {p}"),
            });
        }
        let mut normalised = Vec::with_capacity(edges.len());
        for Edge(a, b, label) in edges {
            let (i, j) = (a.min(b), a.max(b));
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, dim: n });
            }
            if i == j {
                return Err(Error::InvalidParameter {
                    name: "edges",
                    reason: format!("self-loop at node {i}"),
                });
            }
            normalised.push(Edge(i, j, label));
        }
        normalised.sort_unstable();
        normalised.dedup();
        Ok(Self {
            lattice,
            particles,
            nodes,
            edges: normalised,
            parity,
        })
    }

    pub fn lattice(&self) -> Option<&LatticeSpec> {
        self.lattice.as_ref()
    }

    pub fn particles(&self) -> Option<usize> {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[u64] {
        &self.nodes
    }

    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.nodes.iter().map(|&b| Configuration(b))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn parity(&self) -> &[u8] {
        &self.parity
    }

    /// Subgraph on the same nodes keeping only edges with the given labels.
    pub fn restricted(&self, labels: &[MoveLabel]) -> StateGraph {
        StateGraph {
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|e| labels.contains(&e.label()))
                .collect(),
            ..self.clone()
        }
    }

    /// Distinct neighbours of every node, ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for e in &self.edges {
            adj[e.i()].push(e.j());
            adj[e.j()].push(e.i());
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn index_of(&self, config: Configuration) -> Option<usize> {
        self.nodes.binary_search(&config.bits()).ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state graph serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateGraph = serde_json::from_str(text).map_err(|e| Error::InvalidParameter {
            name: "graph",
            reason: e.to_string(),
        })?;
        Self::assemble(raw.lattice, raw.particles, raw.nodes, raw.edges, raw.parity)
    }

    /// One `i j label` line per edge.
    pub fn to_edge_list(&self) -> String {
        self.edges
            .iter()
            .map(|e| format!("{} {} {}\n", e.i(), e.j(), e.label()))
            .collect()
    }
}

pub fn build_state_graph(lattice: &LatticeSpec, n: usize, kinds: &[MoveLabel]) -> Result<StateGraph> {
    let configs = enumerate_configurations(lattice, n)?;
    let nodes: Vec<u64> = configs.iter().map(|c| c.bits()).collect();
    let mut edges = Vec::new();
    for (i, &config) in configs.iter().enumerate() {
        for (target, label) in moves_for(config, lattice, kinds) {
            let j = nodes
                .binary_search(&target.bits())
                .expect("moves land on enumerated configurations");
            if i < j {
                edges.push(Edge(i, j, label));
            }
        }
    }
    let parity = configs
        .iter()
        .map(|&c| sublattice_parity(c, lattice))
        .collect();
    StateGraph::assemble(Some(*lattice), Some(n), nodes, edges, parity)
}

/// `|#{parity 0} − #{parity 1}|`.
pub fn imbalance(graph: &StateGraph) -> usize {
    let ones = graph.parity().iter().filter(|&&p| p == 1).count();
    (graph.len() - ones).abs_diff(ones)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HV: &[MoveLabel] = &[MoveLabel::H, MoveLabel::V];

    fn open(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::open(lx, ly).unwrap()
    }

    /// All `n`-subsets of sites, filtered by pairwise non-adjacency.
    fn brute_force_count(lattice: &LatticeSpec, n: usize) -> usize {
        fn rec(lat: &LatticeSpec, start: usize, left: usize, chosen: &mut Vec<usize>) -> usize {
            if left == 0 {
                let ok = chosen.iter().enumerate().all(|(a, &s)| {
                    chosen[a + 1..].iter().all(|&t| {
                        let (x1, y1) = lat.coords(s);
                        let (x2, y2) = lat.coords(t);
                        x1.abs_diff(x2) + y1.abs_diff(y2) != 1
                    })
                });
                return ok as usize;
            }
            (start..lat.sites())
                .map(|s| {
                    chosen.push(s);
                    let c = rec(lat, s + 1, left - 1, chosen);
                    chosen.pop();
                    c
                })
                .sum()
        }
        rec(lattice, 0, n, &mut Vec::new())
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(enumerate_configurations(&open(2, 2), 1).unwrap().len(), 4);
        let diag = enumerate_configurations(&open(2, 2), 2).unwrap();
        assert_eq!(
            diag,
            vec![Configuration::from_sites(&[1, 2]), Configuration::from_sites(&[0, 3])]
        );
        // 36 pairs on 3x3 minus 12 nearest-neighbour bonds.
        assert_eq!(brute_force_count(&open(3, 3), 2), 24);
        assert_eq!(enumerate_configurations(&open(3, 3), 2).unwrap().len(), 24);
        assert!(enumerate_configurations(&open(2, 2), 5).unwrap().is_empty());
        assert_eq!(enumerate_configurations_with_cap(&open(3, 3), 2, 24).unwrap().len(), 24);
        assert!(matches!(
            enumerate_configurations_with_cap(&open(3, 3), 2, 23),
            Err(Error::Capacity { limit: 23, .. })
        ));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (lx, ly, n) in [(4, 4, 4), (4, 4, 3), (3, 4, 4), (5, 2, 3)] {
            let lat = open(lx, ly);
            assert_eq!(
                enumerate_configurations(&lat, n).unwrap().len(),
                brute_force_count(&lat, n),
                "{lx}x{ly} N={n}"
            );
        }
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let lat = LatticeSpec::new(4, 4, Boundary::Periodic).unwrap();
        let configs = enumerate_configurations(&lat, 4).unwrap();
        assert!(configs.windows(2).all(|w| w[0] < w[1]));
        assert!(configs.iter().all(|c| c.is_valid(&lat) && c.particle_count() == 4));
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            LatticeSpec::open(9, 8),
            Err(Error::Capacity { requested: 72, limit: 64, .. })
        ));
        assert!(LatticeSpec::open(8, 8).is_ok());
        assert!(matches!(
            LatticeSpec::with_cap(4, 4, Boundary::Open, 12),
            Err(Error::Capacity { .. })
        ));
        assert!(LatticeSpec::open(0, 3).is_err());
    }

    #[test]
    fn moves_small_cases() {
        let lat = open(2, 2);
        let diagonal = Configuration::from_sites(&[0, 3]);
        assert!(moves_for(diagonal, &lat, HV).is_empty());

        let corner = Configuration::from_sites(&[0]);
        let moves = moves_for(corner, &lat, HV);
        assert_eq!(moves.len(), 2);
        assert!(moves.contains(&(Configuration::from_sites(&[1]), MoveLabel::H)));
        assert!(moves.contains(&(Configuration::from_sites(&[2]), MoveLabel::V)));

        let lat3 = open(3, 3);
        let centre = Configuration::from_sites(&[4]);
        let mut targets: Vec<u64> = moves_for(centre, &lat3, &[MoveLabel::NnnDiag])
            .iter()
            .map(|(c, _)| c.bits())
            .collect();
        targets.sort();
        let corners: Vec<u64> = [0, 2, 6, 8].iter().map(|&s| 1 << s).collect();
        assert_eq!(targets, corners);
    }

    #[test]
    fn afai_groups_partition_nearest_neighbour_moves() {
        let lat = open(3, 3);
        for config in enumerate_configurations(&lat, 2).unwrap() {
            let mut hv: Vec<Configuration> =
                moves_for(config, &lat, HV).into_iter().map(|m| m.0).collect();
            let mut afai: Vec<Configuration> = moves_for(config, &lat, &MoveLabel::AFAI)
                .into_iter()
                .map(|m| m.0)
                .collect();
            hv.sort();
            afai.sort();
            assert_eq!(hv, afai);
        }
        // Bond (0,0)-(1,0) has an even base; (1,0)-(2,0) an odd one.
        let single = Configuration::from_sites(&[1]);
        let moves = moves_for(single, &lat, &MoveLabel::AFAI);
        assert!(moves.contains(&(Configuration::from_sites(&[0]), MoveLabel::Afai3)));
        assert!(moves.contains(&(Configuration::from_sites(&[2]), MoveLabel::Afai1)));
        assert!(moves.contains(&(Configuration::from_sites(&[4]), MoveLabel::Afai2)));
    }

    #[test]
    fn state_graph_small_cases() {
        let cycle = build_state_graph(&open(2, 2), 1, HV).unwrap();
        assert_eq!(cycle.len(), 4);
        assert_eq!(cycle.edges().len(), 4);
        assert!(cycle.adjacency().iter().all(|n| n.len() == 2));
        assert_eq!(imbalance(&cycle), 0);

        let frozen = build_state_graph(&open(2, 2), 2, HV).unwrap();
        assert_eq!(frozen.len(), 2);
        assert!(frozen.edges().is_empty());
    }

    #[test]
    fn parity_examples() {
        let lat = open(2, 2);
        assert_eq!(sublattice_parity(Configuration::from_sites(&[0]), &lat), 0);
        assert_eq!(sublattice_parity(Configuration::from_sites(&[2]), &lat), 1);
    }

    #[test]
    fn graph_json_round_trip_and_edge_list() {
        let g = build_state_graph(&open(2, 2), 1, HV).unwrap();
        let json = g.to_json();
        assert!(json.contains("\"Lx\":2"));
        assert!(json.contains("[0,1,\"H\"]"));
        assert_eq!(StateGraph::from_json(&json).unwrap(), g);
        let text = g.to_edge_list();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "0 1 H");
    }

    #[test]
    fn from_parts_rejects_self_loops() {
        let err = StateGraph::from_parts(vec![0, 1], vec![Edge(1, 1, MoveLabel::Generic)], vec![0, 1]);
        assert!(err.is_err());
    }

    #[test]
    fn periodic_small_lattice_has_no_duplicate_edges() {
        let lat = LatticeSpec::new(2, 3, Boundary::Periodic).unwrap();
        let g = build_state_graph(&lat, 1, HV).unwrap();
        let mut seen = g.edges().to_vec();
        seen.dedup();
        assert_eq!(seen.len(), g.edges().len());
        assert!(g.edges().iter().all(|e| e.i() < e.j()));
    }

    proptest! {
        #[test]
        fn moves_are_symmetric_and_respect_parity(
            lx in 2usize..5, ly in 2usize..5, n in 1usize..4, pick in 0usize..1000
        ) {
            let lat = open(lx, ly);
            let configs = enumerate_configurations(&lat, n).unwrap();
            prop_assume!(!configs.is_empty());
            let c = configs[pick % configs.len()];
            let kinds = [MoveLabel::H, MoveLabel::V, MoveLabel::NnnDiag, MoveLabel::NnnAxis];
            for (target, label) in moves_for(c, &lat, &kinds) {
                prop_assert!(target.is_valid(&lat));
                prop_assert_eq!(target.particle_count(), n);
                prop_assert!(moves_for(target, &lat, &[label]).contains(&(c, label)));
                let flipped = sublattice_parity(c, &lat) != sublattice_parity(target, &lat);
                match label {
                    MoveLabel::H | MoveLabel::V => prop_assert!(flipped),
                    _ => prop_assert!(!flipped),
                }
            }
        }

        #[test]
        fn graph_building_is_deterministic(lx in 1usize..5, ly in 1usize..5, n in 0usize..4) {
            let lat = open(lx, ly);
            let a = build_state_graph(&lat, n, HV).unwrap();
            let b = build_state_graph(&lat, n, HV).unwrap();
            prop_assert_eq!(a.to_json(), b.to_json());
        }
    }
}
