// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use floquet_cages::cages::{cls_from_tree, find_grafted_p3, motif_report_json};
use floquet_cages::floquet::{chiral_relation_defect, drives, floquet_operator};
use floquet_cages::hamiltonian::{assemble, diagonalize, weights};
use floquet_cages::lattice::{build_state_graph, LatticeSpec, MoveLabel, StateGraph};
use floquet_cages::models::{qhd_generators, toy_model};
use floquet_cages::observables::{averaged_loschmidt, band_overlap, long_time_memory};

#[test]
fn graph_json_round_trip_preserves_everything() {
    let lat = LatticeSpec::open(3, 4).unwrap();
    let g = build_state_graph(&lat, 3, &[MoveLabel::H, MoveLabel::V, MoveLabel::NnnDiag]).unwrap();
    let back = StateGraph::from_json(&g.to_json()).unwrap();
    assert_eq!(back, g);
    let value: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
    for key in ["lattice", "N", "nodes", "edges", "parity"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    assert_eq!(g.to_edge_list().lines().count(), g.edges().len());
}

#[test]
fn hv_drive_end_to_end() {
    let g = qhd_generators(&LatticeSpec::open(3, 3).unwrap(), 2, 1.0, 1.0).unwrap();
    let schedule = drives::hv(Arc::new(g.h_v), Arc::new(g.h_h), 0.8, 1.3).unwrap();
    let r = floquet_operator(&schedule).unwrap();
    assert!(r.unitarity_defect() < 1e-12);
    assert!(chiral_relation_defect(&r, g.graph.parity()) < 1e-10);

    let csv = r.to_csv();
    assert!(csv.starts_with("index,quasienergy_times_tau\n"));
    assert_eq!(csv.lines().count(), r.dim() + 1);

    let echo = averaged_loschmidt(&r, 2000);
    assert!(echo.values.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!((echo.tail_mean(0.5) - long_time_memory(&r)).abs() < 0.02);

    // Basis-state overlaps with a band sum to the band size.
    let curve = band_overlap(&r, 0.0, 1e-8).unwrap();
    let total: f64 = curve.values.iter().map(|v| v.1).sum();
    assert!((total - curve.members.len() as f64).abs() < 1e-9);
}

#[test]
fn toy_cages_are_zero_energy_eigenstates() {
    let (graph, spec) = toy_model(12).unwrap();
    let h = assemble(&graph, &weights(&[(spec.layer_labels[0], 1.0), (spec.layer_labels[1], 1.0)]));
    let hop = graph.restricted(&spec.layer_labels);
    let trees = find_grafted_p3(&hop);
    assert_eq!(trees.len(), 2);
    let motifs: Vec<_> = trees
        .into_iter()
        .map(|t| {
            let cls = cls_from_tree(&t, &h).unwrap();
            (t, cls)
        })
        .collect();
    for (_, states) in &motifs {
        assert_eq!(states.len(), 1);
        let v = states[0].dense(h.dim());
        let hv = h.apply(&v);
        assert!(hv.iter().all(|x| x.abs() < 1e-12));
        assert_eq!(states[0].energy, 0.0);
    }
    let spectrum = diagonalize(&h).unwrap();
    assert!(spectrum.zero_modes() >= 2);

    let report: serde_json::Value = serde_json::from_str(&motif_report_json(&motifs)).unwrap();
    let first = &report[0];
    assert!(first["graft_node"].is_u64());
    assert_eq!(first["tree_nodes"].as_array().unwrap().len(), 3);
    assert!(first["cls"][0]["amplitudes"].is_array());
}
