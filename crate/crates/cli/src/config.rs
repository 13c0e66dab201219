// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! The JSON experiment configuration and its validation.

use floquet_cages::lattice::{Boundary, LatticeSpec};
use floquet_cages::models::IbrgParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    #[serde(default)]
    pub observables: ObservableConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    /// Hard-disk bosons on an `Lx × Ly` lattice.
    Qhd {
        #[serde(rename = "Lx")]
        lx: usize,
        #[serde(rename = "Ly")]
        ly: usize,
        #[serde(default)]
        boundary: Boundary,
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "J", default = "one")]
        j: f64,
    },
    /// Imbalanced bipartite random graph with `M` independent layers.
    Ibrg {
        #[serde(rename = "N1")]
        n1: usize,
        #[serde(rename = "N2")]
        n2: usize,
        alpha: f64,
        #[serde(rename = "M", default = "one_usize")]
        m: usize,
    },
    /// Chain of length `L` with two grafted P3 trees.
    Toy {
        #[serde(rename = "L")]
        chain_length: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    /// Generator name; `G*` on a random graph expands to `G0..G{M-1}`.
    pub generator: String,
    pub duration: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Layers in the order they act.
    pub layers: Vec<LayerConfig>,
    #[serde(default = "yes")]
    pub palindromic: bool,
    /// Prepend a swap layer of duration `π/J_swap`.
    #[serde(default)]
    pub swap: bool,
    #[serde(rename = "J_swap", default = "one")]
    pub j_swap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Graph,
    Spectrum,
    Quasienergies,
    Histogram,
    Echo,
    Memory,
    Autocorrelation,
    Rabi,
    BandOverlap,
    StaticBandOverlap,
    Cages,
}

fn default_n_max() -> usize {
    1000
}

fn default_tolerance() -> f64 {
    floquet_cages::floquet::BAND_TOLERANCE
}

fn default_bins() -> usize {
    64
}

fn default_threshold() -> f64 {
    floquet_cages::observables::PEAK_THRESHOLD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    /// Outputs produced by `observe`, `recipe` and `sweep`.
    #[serde(default)]
    pub compute: Vec<Observable>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Band clustering tolerance on `ε·τ` (and on energies for static bands).
    #[serde(default = "default_tolerance")]
    pub band_tolerance: f64,
    /// Band centre for overlap curves, `ε·τ` or energy.
    #[serde(default)]
    pub band: f64,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default = "default_threshold")]
    pub rabi_threshold: f64,
}

impl Default for ObservableConfig {
    fn default() -> Self {
        Self {
            compute: Vec::new(),
            n_max: default_n_max(),
            band_tolerance: default_tolerance(),
            band: 0.0,
            histogram_bins: default_bins(),
            rabi_threshold: default_threshold(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParameter {
    /// JSON pointer into the configuration, e.g. `/drive/layers/0/duration`.
    pub pointer: String,
    pub values: Vec<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Cartesian product over all parameters.
    pub parameters: Vec<SweepParameter>,
    /// Replicates per parameter point, each with its own derived seed.
    #[serde(default = "one_usize")]
    pub seeds: usize,
    /// Worker count; defaults to the available cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

fn default_directory() -> String {
    "out".into()
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

impl OutputConfig {
    pub fn svg(&self) -> bool {
        self.formats.contains(&Format::Svg)
    }
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {reason}"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Generator names the model provides to drive layers.
    pub fn generator_names(&self) -> Vec<String> {
        match &self.model {
            ModelConfig::Qhd { .. } => ["V", "H", "full", "swap", "AFAI_1", "AFAI_2", "AFAI_3", "AFAI_4"]
                .map(String::from)
                .to_vec(),
            ModelConfig::Ibrg { m, .. } => {
                let mut names: Vec<String> = (0..*m).map(|k| format!("G{k}")).collect();
                names.push("G*".into());
                names.push("full".into());
                names
            }
            ModelConfig::Toy { .. } => ["V", "H", "full", "swap"].map(String::from).to_vec(),
        }
    }

    pub fn lattice(&self) -> Result<Option<LatticeSpec>, CliError> {
        match &self.model {
            ModelConfig::Qhd { lx, ly, boundary, .. } => Ok(Some(LatticeSpec::new(*lx, *ly, *boundary)?)),
            _ => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match &self.model {
            ModelConfig::Qhd { j, .. } => {
                self.lattice()?;
                if !j.is_finite() || *j == 0.0 {
                    return Err(invalid("model.J", "must be finite and non-zero"));
                }
            }
            ModelConfig::Ibrg { n1, n2, alpha, m } => {
                IbrgParams::new(*n1, *n2, *alpha, self.seed)
                    .map_err(|e| invalid("model", e))?;
                if *m == 0 {
                    return Err(invalid("model.M", "drive depth must be at least 1"));
                }
            }
            ModelConfig::Toy { chain_length } => {
                if *chain_length < 2 {
                    return Err(invalid("model.L", "chain needs at least two sites"));
                }
            }
        }

        if let Some(drive) = &self.drive {
            if drive.layers.is_empty() {
                return Err(invalid("drive.layers", "at least one layer is required"));
            }
            let names = self.generator_names();
            for (k, layer) in drive.layers.iter().enumerate() {
                if !names.contains(&layer.generator) {
                    return Err(invalid(
                        &format!("drive.layers[{k}].generator"),
                        format!("`{}` is not one of {}", layer.generator, names.join(", ")),
                    ));
                }
                if !layer.duration.is_finite() || layer.duration < 0.0 {
                    return Err(invalid(&format!("drive.layers[{k}].duration"), "must be finite and non-negative"));
                }
            }
            if drive.swap && (!drive.j_swap.is_finite() || drive.j_swap <= 0.0) {
                return Err(invalid("drive.J_swap", "must be finite and positive"));
            }
            if drive.swap && matches!(self.model, ModelConfig::Ibrg { .. }) {
                return Err(invalid("drive.swap", "random graphs have no swap moves"));
            }
        }

        let obs = &self.observables;
        if obs.n_max == 0 {
            return Err(invalid("observables.n_max", "must be at least 1"));
        }
        if !(obs.band_tolerance.is_finite() && obs.band_tolerance > 0.0) {
            return Err(invalid("observables.band_tolerance", "must be finite and positive"));
        }
        if !obs.band.is_finite() {
            return Err(invalid("observables.band", "must be finite"));
        }
        if obs.histogram_bins == 0 {
            return Err(invalid("observables.histogram_bins", "must be at least 1"));
        }
        if !(obs.rabi_threshold.is_finite() && obs.rabi_threshold > 0.0) {
            return Err(invalid("observables.rabi_threshold", "must be finite and positive"));
        }
        let needs_drive = [
            Observable::Quasienergies,
            Observable::Histogram,
            Observable::Echo,
            Observable::Memory,
            Observable::Autocorrelation,
            Observable::Rabi,
            Observable::BandOverlap,
        ];
        if self.drive.is_none() {
            if let Some(o) = obs.compute.iter().find(|o| needs_drive.contains(o)) {
                return Err(invalid("observables.compute", format!("{o:?} needs a drive block")));
            }
        }
        if obs.compute.contains(&Observable::Autocorrelation) && !matches!(self.model, ModelConfig::Qhd { .. }) {
            return Err(invalid("observables.compute", "autocorrelation needs a lattice model"));
        }

        if let Some(sweep) = &self.sweep {
            if sweep.parameters.is_empty() && sweep.seeds <= 1 {
                return Err(invalid("sweep.parameters", "nothing to sweep"));
            }
            if sweep.seeds == 0 {
                return Err(invalid("sweep.seeds", "must be at least 1"));
            }
            if sweep.threads == Some(0) {
                return Err(invalid("sweep.threads", "must be at least 1"));
            }
            let doc = serde_json::to_value(self).expect("config serialises");
            for (k, p) in sweep.parameters.iter().enumerate() {
                if p.pointer.starts_with("/sweep") || doc.pointer(&p.pointer).is_none() {
                    return Err(invalid(
                        &format!("sweep.parameters[{k}].pointer"),
                        format!("`{}` does not name a configured value", p.pointer),
                    ));
                }
                if p.values.is_empty() {
                    return Err(invalid(&format!("sweep.parameters[{k}].values"), "empty value list"));
                }
                if p.values.iter().any(|v| v.as_f64().is_some_and(|x| !x.is_finite())) {
                    return Err(invalid(&format!("sweep.parameters[{k}].values"), "values must be finite"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"kind": "qhd", "Lx": 2, "Ly": 2, "N": 1},
        "drive": {"layers": [{"generator": "V", "duration": 1.0}, {"generator": "H", "duration": 1.0}]},
        "observables": {"compute": ["spectrum"]}
    }"#;

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        let once = cfg.to_json();
        let twice = ExperimentConfig::parse(&once).unwrap().to_json();
        assert_eq!(once, twice);
        assert!(cfg.drive.as_ref().unwrap().palindromic);
    }

    #[test]
    fn unknown_generator_names_the_field() {
        let text = MINIMAL.replace("\"H\"", "\"X\"");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("drive.layers[1].generator"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn oversized_lattice_is_a_capacity_error() {
        let text = MINIMAL.replace("\"Lx\": 2", "\"Lx\": 20").replace("\"Ly\": 2", "\"Ly\": 20");
        assert_eq!(ExperimentConfig::parse(&text).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"N\": 1", "\"N\": 1, \"Q\": 2");
        assert_eq!(ExperimentConfig::parse(&text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sweep_pointer_must_resolve() {
        let mut cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        cfg.sweep = Some(SweepConfig {
            parameters: vec![SweepParameter {
                pointer: "/drive/layers/5/duration".into(),
                values: vec![1.0.into()],
            }],
            seeds: 1,
            threads: None,
        });
        assert!(cfg.validate().is_err());
        cfg.sweep.as_mut().unwrap().parameters[0].pointer = "/drive/layers/0/duration".into();
        cfg.validate().unwrap();
    }
}
