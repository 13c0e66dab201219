// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in desk-scale configurations.

use serde_json::json;

use crate::config::ExperimentConfig;

pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub config: serde_json::Value,
}

fn hv(tau_v: f64, tau_h: f64) -> serde_json::Value {
    json!({"layers": [{"generator": "V", "duration": tau_v}, {"generator": "H", "duration": tau_h}]})
}

pub fn figure_recipes() -> Vec<Recipe> {
    vec![
        Recipe {
            name: "fig1c",
            description: "averaged Loschmidt echo over 1e4 periods, 4x4 lattice, N=4, HV drive",
            config: json!({
                "model": {"kind": "qhd", "Lx": 4, "Ly": 4, "N": 4},
                "drive": hv(1.0, 1.0),
                "observables": {"compute": ["quasienergies", "echo", "memory"], "n_max": 10000},
                "output": {"directory": "out/fig1c", "formats": ["csv", "svg"]}
            }),
        },
        Recipe {
            name: "fig2a",
            description: "quasienergy histogram of a 400-node random graph drive (zero-band spike)",
            config: json!({
                "model": {"kind": "ibrg", "N1": 180, "N2": 220, "alpha": 2.0, "M": 1},
                "drive": {"layers": [{"generator": "G*", "duration": 1.0}]},
                "observables": {"compute": ["quasienergies", "histogram"], "histogram_bins": 201},
                "output": {"directory": "out/fig2a"},
                "seed": 1
            }),
        },
        Recipe {
            name: "fig2b",
            description: "long-time memory versus drive depth M and connectivity alpha, 10 graphs each",
            config: json!({
                "model": {"kind": "ibrg", "N1": 90, "N2": 110, "alpha": 2.0, "M": 1},
                "drive": {"layers": [{"generator": "G*", "duration": 1.0}]},
                "observables": {"compute": ["memory"]},
                "sweep": {
                    "parameters": [
                        {"pointer": "/model/M", "values": [1, 2, 3]},
                        {"pointer": "/model/alpha", "values": [2.0, 4.0]}
                    ],
                    "seeds": 10
                },
                "output": {"directory": "out/fig2b"},
                "seed": 2
            }),
        },
        Recipe {
            name: "fig3a",
            description: "echo trace and its Rabi frequencies, 4x4 lattice, N=4, 4096 periods",
            config: json!({
                "model": {"kind": "qhd", "Lx": 4, "Ly": 4, "N": 4},
                "drive": hv(1.0, 1.0),
                "observables": {"compute": ["quasienergies", "echo", "rabi"], "n_max": 4095},
                "output": {"directory": "out/fig3a", "formats": ["csv", "svg"]}
            }),
        },
        Recipe {
            name: "fig3b",
            description: "zero-band overlap curve, 4x4 lattice, N=4, HV drive",
            config: json!({
                "model": {"kind": "qhd", "Lx": 4, "Ly": 4, "N": 4},
                "drive": hv(1.0, 1.0),
                "observables": {"compute": ["quasienergies", "band_overlap"]},
                "output": {"directory": "out/fig3b", "formats": ["csv", "svg"]}
            }),
        },
        Recipe {
            name: "fig4b",
            description: "swap-extended drive on a 4x4 lattice, N=3: quasienergies and cage witnesses",
            config: json!({
                "model": {"kind": "qhd", "Lx": 4, "Ly": 4, "N": 3},
                "drive": {
                    "layers": [{"generator": "V", "duration": 1.0}, {"generator": "H", "duration": 1.0}],
                    "swap": true,
                    "J_swap": 1.0
                },
                "observables": {"compute": ["quasienergies", "cages"]},
                "output": {"directory": "out/fig4b"}
            }),
        },
        Recipe {
            name: "figEA",
            description: "band-overlap curves for tau_V/tau_H in {1,2,4,8}, 4x4 lattice, N=5",
            config: json!({
                "model": {"kind": "qhd", "Lx": 4, "Ly": 4, "N": 5},
                "drive": hv(0.25, 0.25),
                "observables": {"compute": ["band_overlap"]},
                "sweep": {
                    "parameters": [{"pointer": "/drive/layers/0/duration", "values": [0.25, 0.5, 1.0, 2.0]}]
                },
                "output": {"directory": "out/figEA"}
            }),
        },
        Recipe {
            name: "figS-AFAI",
            description: "standard four-step anomalous drive, 3x3 lattice, N=2: broken chiral relation",
            config: json!({
                "model": {"kind": "qhd", "Lx": 3, "Ly": 3, "N": 2},
                "drive": {
                    "layers": [
                        {"generator": "AFAI_4", "duration": 1.0},
                        {"generator": "AFAI_3", "duration": 1.0},
                        {"generator": "AFAI_2", "duration": 1.0},
                        {"generator": "AFAI_1", "duration": 1.0}
                    ],
                    "palindromic": false
                },
                "observables": {"compute": ["quasienergies", "echo", "memory"]},
                "output": {"directory": "out/figS-AFAI"}
            }),
        },
        Recipe {
            name: "figS-toy",
            description: "toy chain L=50 with the engineered swap drive: two pi-modes",
            config: json!({
                "model": {"kind": "toy", "L": 50},
                "drive": {
                    "layers": [{"generator": "V", "duration": 1.0}, {"generator": "H", "duration": 1.0}],
                    "swap": true,
                    "J_swap": 1.0
                },
                "observables": {"compute": ["quasienergies", "cages"], "band_tolerance": 1e-6},
                "output": {"directory": "out/figS-toy"}
            }),
        },
    ]
}

pub fn recipe(name: &str) -> Option<ExperimentConfig> {
    figure_recipes()
        .into_iter()
        .find(|r| r.name == name)
        .map(|r| serde_json::from_value(r.config).expect("built-in recipe parses"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_validates() {
        let all = figure_recipes();
        assert_eq!(all.len(), 9);
        for r in all {
            let cfg = recipe(r.name).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", r.name));
        }
        assert!(recipe("fig9").is_none());
    }
}
