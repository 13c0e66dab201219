// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Model build, drive composition, Floquet solve and file emission.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use floquet_cages::cages::{
    cls_from_tree, count_modes_at, dtc_witness, find_dangling_trees, find_grafted_p3, motif_report_json,
};
use floquet_cages::floquet::{
    chiral_relation_defect, floquet_operator, palindromize, pairing_defect, DriveLayer, DriveSchedule,
    FloquetResult,
};
use floquet_cages::hamiltonian::{assemble, diagonalize, weights, LabeledHamiltonian, SpectralDecomposition};
use floquet_cages::lattice::{imbalance, LatticeSpec, MoveLabel, StateGraph};
use floquet_cages::models::{afai_generators, ibrg_floquet_layers, qhd_generators, toy_model, IbrgParams};
use floquet_cages::observables::{
    autocorrelation, averaged_loschmidt, band_overlap, long_time_memory_with, rabi_frequencies_with, svg_line_plot,
};
use floquet_cages::Error;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ModelConfig, Observable};
use crate::error::CliError;

/// Scalars reported by a run, keyed by name.
pub type Summary = BTreeMap<String, f64>;

pub struct Model {
    pub lattice: Option<LatticeSpec>,
    /// Every edge the model defines, swap moves included.
    pub graph: StateGraph,
    /// Edges of the static Hamiltonian.
    pub hopping: StateGraph,
    pub generators: BTreeMap<String, Arc<LabeledHamiltonian>>,
}

impl Model {
    pub fn full(&self) -> &LabeledHamiltonian {
        &self.generators["full"]
    }
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<Model, CliError> {
    let j_swap = cfg.drive.as_ref().map_or(1.0, |d| d.j_swap);
    let mut generators = BTreeMap::new();
    let mut put = |name: &str, h: LabeledHamiltonian| {
        generators.insert(name.to_string(), Arc::new(h));
    };
    let (lattice, graph, hopping) = match &cfg.model {
        ModelConfig::Qhd { n, j, .. } => {
            let lattice = cfg.lattice()?.expect("lattice model");
            let g = qhd_generators(&lattice, *n, *j, j_swap)?;
            let hopping = g.hopping_graph();
            let uses_afai = cfg
                .drive
                .iter()
                .flat_map(|d| &d.layers)
                .any(|l| l.generator.starts_with("AFAI_"));
            if uses_afai {
                let afai = afai_generators(&lattice, *n, *j)?;
                debug_assert_eq!(afai.graph.nodes(), g.graph.nodes());
                for (k, h) in afai.groups.into_iter().enumerate() {
                    put(&format!("AFAI_{}", k + 1), h);
                }
            }
            put("V", g.h_v);
            put("H", g.h_h);
            put("full", g.h_full);
            put("swap", g.h_swap);
            (Some(lattice), g.graph, hopping)
        }
        ModelConfig::Ibrg { n1, n2, alpha, m } => {
            let params = IbrgParams::new(*n1, *n2, *alpha, cfg.seed)?;
            let layers = ibrg_floquet_layers(&params, *m, cfg.seed)?;
            let generic = weights(&[(MoveLabel::Generic, 1.0)]);
            let union = StateGraph::from_parts(
                layers[0].nodes().to_vec(),
                layers.iter().flat_map(|g| g.edges().iter().copied()).collect(),
                layers[0].parity().to_vec(),
            )?;
            for (k, layer) in layers.iter().enumerate() {
                put(&format!("G{k}"), assemble(layer, &generic));
            }
            put("full", assemble(&union, &generic));
            (None, union.clone(), union)
        }
        ModelConfig::Toy { chain_length } => {
            let (graph, spec) = toy_model(*chain_length)?;
            let [a, b] = spec.layer_labels;
            put(a.name(), assemble(&graph, &weights(&[(a, 1.0)])));
            put(b.name(), assemble(&graph, &weights(&[(b, 1.0)])));
            put("full", assemble(&graph, &weights(&[(a, 1.0), (b, 1.0)])));
            put("swap", assemble(&graph, &weights(&[(spec.swap_label, j_swap)])));
            let hopping = graph.restricted(&spec.layer_labels);
            (None, graph, hopping)
        }
    };
    Ok(Model {
        lattice,
        graph,
        hopping,
        generators,
    })
}

/// The configured drive, or `None` without a drive block.
pub fn build_schedule(cfg: &ExperimentConfig, model: &Model) -> Result<Option<DriveSchedule>, CliError> {
    let Some(drive) = &cfg.drive else {
        return Ok(None);
    };
    let mut layers = Vec::new();
    if drive.swap {
        layers.push(DriveLayer::new("swap", model.generators["swap"].clone(), PI / drive.j_swap)?);
    }
    for layer in &drive.layers {
        if layer.generator == "G*" {
            let depth = model.generators.keys().filter(|k| k.starts_with('G')).count();
            for k in 0..depth {
                let name = format!("G{k}");
                layers.push(DriveLayer::new(name.clone(), model.generators[&name].clone(), layer.duration)?);
            }
        } else {
            let g = model.generators[&layer.generator].clone();
            layers.push(DriveLayer::new(layer.generator.clone(), g, layer.duration)?);
        }
    }
    let schedule = if drive.palindromic {
        palindromize(&layers)?
    } else {
        DriveSchedule::new(layers)?
    };
    Ok(Some(schedule))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the run directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Output files of one run, recorded with checksums.
pub struct Outputs {
    root: PathBuf,
    prefix: String,
    svg: bool,
    pub files: Vec<FileRecord>,
}

impl Outputs {
    /// Files go to `root/prefix`; records carry `prefix/name`.
    pub fn new(root: &Path, prefix: &str, svg: bool) -> Self {
        Self {
            root: root.to_path_buf(),
            prefix: prefix.to_string(),
            svg,
            files: Vec::new(),
        }
    }

    fn relative(&self, name: &str) -> String {
        if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}/{name}", self.prefix)
        }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let relative = self.relative(name);
        write_atomic(&self.root.join(&relative), contents.as_bytes())?;
        self.files.push(FileRecord {
            path: relative,
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    fn write_svg(&mut self, name: &str, make: impl FnOnce() -> String) -> Result<(), CliError> {
        if self.svg {
            self.write(name, &make())?;
        }
        Ok(())
    }
}

/// Outcome of [`execute`].
pub struct RunOutput {
    pub files: Vec<FileRecord>,
    pub summary: Summary,
    pub timings: BTreeMap<String, f64>,
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }
}

const NEEDS_DRIVE: [Observable; 7] = [
    Observable::Quasienergies,
    Observable::Histogram,
    Observable::Echo,
    Observable::Memory,
    Observable::Autocorrelation,
    Observable::Rabi,
    Observable::BandOverlap,
];

/// `bin_low,bin_high,count` over `(−π, π]`.
pub fn phase_histogram(phases: &[f64], bins: usize) -> String {
    let width = 2.0 * PI / bins as f64;
    let mut counts = vec![0usize; bins];
    for &t in phases {
        let k = (((t + PI) / width).ceil() as usize).saturating_sub(1).min(bins - 1);
        counts[k] += 1;
    }
    let mut out = String::from("bin_low,bin_high,count\n");
    for (k, c) in counts.iter().enumerate() {
        let lo = -PI + k as f64 * width;
        let _ = writeln!(out, "{lo:.12},{:.12},{c}", lo + width);
    }
    out
}

/// Runs the requested stages for one configuration and writes their files.
pub fn execute(
    cfg: &ExperimentConfig,
    stages: &[Observable],
    root: &Path,
    prefix: &str,
) -> Result<RunOutput, CliError> {
    let mut timer = Timer(BTreeMap::new());
    let mut out = Outputs::new(root, prefix, cfg.output.svg());
    let mut summary = Summary::new();
    let obs = &cfg.observables;
    let wants = |o: Observable| stages.contains(&o);

    let model = timer.time("model", || build_model(cfg))?;
    summary.insert("dim".into(), model.graph.len() as f64);
    summary.insert("edges".into(), model.hopping.edges().len() as f64);
    summary.insert("imbalance".into(), imbalance(&model.hopping) as f64);

    if wants(Observable::Graph) {
        out.write("graph.json", &model.graph.to_json())?;
        out.write("edges.txt", &model.graph.to_edge_list())?;
    }

    let mut static_spectrum: Option<SpectralDecomposition> = None;
    if wants(Observable::Spectrum) || wants(Observable::StaticBandOverlap) {
        let spec = timer.time("diagonalize", || diagonalize(model.full()))?;
        summary.insert("static_zero_modes".into(), spec.zero_modes() as f64);
        summary.insert("spectral_norm".into(), spec.spectral_norm());
        if wants(Observable::Spectrum) {
            out.write("spectrum.csv", &spec.to_csv())?;
            out.write_svg("spectrum.svg", || {
                let xs: Vec<f64> = (0..spec.dim()).map(|k| k as f64).collect();
                svg_line_plot("static spectrum", "index", "eigenvalue", &xs, &spec.eigenvalues)
            })?;
        }
        static_spectrum = Some(spec);
    }
    if let (true, Some(spec)) = (wants(Observable::StaticBandOverlap), &static_spectrum) {
        let tol = obs.band_tolerance * spec.spectral_norm().max(1.0);
        let curve = band_overlap(spec, obs.band, tol)?;
        summary.insert("static_band_size".into(), curve.members.len() as f64);
        summary.insert("static_band_overlap_max".into(), curve.max());
        summary.insert("static_band_overlap_count_099".into(), curve.count_above(0.99) as f64);
        out.write("static_band_overlap.csv", &curve.to_csv())?;
        out.write_svg("static_band_overlap.svg", || curve.to_svg("static band overlap"))?;
    }

    let needs_floquet = stages.iter().any(|s| NEEDS_DRIVE.contains(s)) || (wants(Observable::Cages) && cfg.drive.is_some());
    let mut floquet: Option<FloquetResult> = None;
    if needs_floquet {
        let schedule = build_schedule(cfg, &model)?
            .ok_or_else(|| CliError::Validation("drive: this command needs a drive block".into()))?;
        out.write("schedule.json", &schedule.to_json())?;
        let result = timer.time("floquet", || floquet_operator(&schedule))?;
        let tol = obs.band_tolerance;
        summary.insert("period".into(), schedule.period());
        summary.insert("unitarity_defect".into(), result.unitarity_defect());
        summary.insert("zero_modes".into(), count_modes_at(&result, 0.0, tol) as f64);
        summary.insert("pi_modes".into(), count_modes_at(&result, PI, tol) as f64);
        summary.insert("chiral_defect".into(), chiral_relation_defect(&result, model.graph.parity()));
        summary.insert("pairing_defect".into(), pairing_defect(&result.phases));
        out.write("quasienergies.csv", &result.to_csv())?;
        out.write_svg("quasienergies.svg", || {
            let xs: Vec<f64> = (0..result.dim()).map(|k| k as f64).collect();
            svg_line_plot("quasienergies", "index", "quasienergy x tau", &xs, &result.phases)
        })?;
        floquet = Some(result);
    }

    if let Some(result) = &floquet {
        if wants(Observable::Histogram) {
            out.write("quasienergy_histogram.csv", &phase_histogram(&result.phases, obs.histogram_bins))?;
        }
        if wants(Observable::Echo) || wants(Observable::Rabi) {
            let echo = timer.time("echo", || averaged_loschmidt(result, obs.n_max));
            summary.insert("echo_tail".into(), echo.tail_mean(0.2));
            if wants(Observable::Echo) {
                out.write("echo.csv", &echo.to_csv())?;
                out.write_svg("echo.svg", || echo.to_svg("averaged Loschmidt echo", "L(n)"))?;
            }
            if wants(Observable::Rabi) {
                let peaks = rabi_frequencies_with(&echo, obs.rabi_threshold)?;
                if let Some(top) = peaks.first() {
                    summary.insert("rabi_frequency".into(), top.frequency);
                }
                let mut csv = String::from("frequency,weight,bin\n");
                for p in &peaks {
                    let _ = writeln!(csv, "{:.12e},{:.12e},{}", p.frequency, p.weight, p.bin);
                }
                out.write("rabi.csv", &csv)?;
            }
        }
        if wants(Observable::Memory) {
            summary.insert("memory".into(), long_time_memory_with(result, obs.band_tolerance));
        }
        if wants(Observable::Autocorrelation) {
            let lattice = model.lattice.as_ref().expect("validated lattice model");
            let configs: Vec<_> = model.graph.configurations().collect();
            let series = timer.time("autocorrelation", || autocorrelation(result, lattice, &configs, obs.n_max))?;
            summary.insert("autocorrelation_tail".into(), series.tail_mean(0.2));
            out.write("autocorrelation.csv", &series.to_csv())?;
            out.write_svg("autocorrelation.svg", || series.to_svg("density autocorrelation", "C(n)"))?;
        }
        if wants(Observable::BandOverlap) {
            let curve = band_overlap(result, obs.band, obs.band_tolerance)?;
            summary.insert("band_size".into(), curve.members.len() as f64);
            summary.insert("band_overlap_max".into(), curve.max());
            summary.insert("band_overlap_count_099".into(), curve.count_above(0.99) as f64);
            out.write("band_overlap.csv", &curve.to_csv())?;
            out.write_svg("band_overlap.svg", || curve.to_svg("band overlap"))?;
        }
    }

    if wants(Observable::Cages) {
        let full = model.full();
        let motifs = timer.time("cages", || -> Result<_, CliError> {
            let mut trees = find_grafted_p3(&model.hopping);
            match find_dangling_trees(&model.hopping) {
                Ok(more) => trees.extend(more),
                Err(Error::Forest) => {}
                Err(e) => return Err(e.into()),
            }
            trees
                .into_iter()
                .map(|t| {
                    let cls = cls_from_tree(&t, full)?;
                    Ok((t, cls))
                })
                .collect::<Result<Vec<_>, CliError>>()
        })?;
        summary.insert("trees".into(), motifs.len() as f64);
        summary.insert("cls".into(), motifs.iter().map(|m| m.1.len()).sum::<usize>() as f64);
        out.write("motifs.json", &motif_report_json(&motifs))?;
        if let Some(result) = &floquet {
            let mut csv = String::from("motif,cls,energy,overlap_re,overlap_im,r1,r2,period_doubled\n");
            let mut doubled = 0;
            for (m, (_, states)) in motifs.iter().enumerate() {
                for (c, s) in states.iter().enumerate() {
                    let w = dtc_witness(result, s);
                    doubled += w.period_doubled as usize;
                    let _ = writeln!(
                        csv,
                        "{m},{c},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
                        s.energy, w.overlap.re, w.overlap.im, w.r1, w.r2, w.period_doubled
                    );
                }
            }
            summary.insert("period_doubled_cls".into(), doubled as f64);
            out.write("dtc.csv", &csv)?;
        }
    }

    Ok(RunOutput {
        files: out.files,
        summary,
        timings: timer.0,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub files: Vec<FileRecord>,
    pub summary: Summary,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

pub const MANIFEST: &str = "manifest.json";

/// SHA-256 of the serialised configuration with the output directory
/// blanked, so relocating a run does not change its hash.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output.directory.clear();
    sha256_hex(c.to_json().as_bytes())
}

impl RunManifest {
    pub fn new(command: &str, cfg: &ExperimentConfig, out: RunOutput) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config_hash(cfg),
            config: cfg.clone(),
            files: out.files,
            summary: out.summary,
            timings: out.timings,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn histogram_counts_every_phase_once() {
        let phases = [-PI + 1e-9, -1.0, 0.0, 0.0, 1.0, PI];
        let csv = phase_histogram(&phases, 4);
        let counts: Vec<usize> = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(counts.iter().sum::<usize>(), phases.len());
        assert_eq!(counts, vec![1, 3, 1, 1]);
    }
}
