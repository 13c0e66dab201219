// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Cartesian parameter sweeps run in parallel, one directory per task.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{ExperimentConfig, Observable};
use crate::error::CliError;
use crate::run::{execute, Outputs, RunOutput, Summary};

pub struct Task {
    pub index: usize,
    pub replicate: usize,
    pub seed: u64,
    pub values: Vec<Value>,
    pub config: ExperimentConfig,
}

/// Seed of task `index`: the first draw of ChaCha8 seeded with `seed` on
/// stream `index`.
pub fn task_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Expands the sweep block into validated per-task configurations.
pub fn expand(cfg: &ExperimentConfig) -> Result<Vec<Task>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("sweep: the configuration has no sweep block".into()))?;
    let mut base = cfg.clone();
    base.sweep = None;
    let base_doc = serde_json::to_value(&base).expect("config serialises");

    let mut points: Vec<Vec<Value>> = vec![Vec::new()];
    for p in &sweep.parameters {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                p.values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect();
    }

    let mut tasks = Vec::new();
    for values in points {
        for replicate in 0..sweep.seeds {
            let index = tasks.len();
            let mut doc = base_doc.clone();
            for (p, v) in sweep.parameters.iter().zip(&values) {
                *doc.pointer_mut(&p.pointer).expect("validated pointer") = v.clone();
            }
            let mut config: ExperimentConfig = serde_json::from_value(doc)
                .map_err(|e| CliError::Validation(format!("sweep task {index}: {e}")))?;
            let seed = task_seed(cfg.seed, index);
            config.seed = seed;
            config
                .validate()
                .map_err(|e| CliError::Validation(format!("sweep task {index}: {e}")))?;
            tasks.push(Task {
                index,
                replicate,
                seed,
                values: values.clone(),
                config,
            });
        }
    }
    Ok(tasks)
}

/// Plain decimal for ordinary magnitudes, exponent form otherwise.
pub fn number_text(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs every task and writes the aggregated `sweep.csv`.
pub fn run_sweep(cfg: &ExperimentConfig, stages: &[Observable], root: &Path, threads: Option<usize>) -> Result<RunOutput, CliError> {
    let tasks = expand(cfg)?;
    let sweep = cfg.sweep.as_ref().expect("expanded");
    let workers = sweep.threads.or(threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;

    let results: Vec<Result<RunOutput, CliError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| execute(&t.config, stages, root, &format!("task_{:04}", t.index)))
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let keys: BTreeSet<&String> = results.iter().flat_map(|r| r.summary.keys()).collect();
    let mut csv = String::from("task,replicate,seed");
    for p in &sweep.parameters {
        let _ = write!(csv, ",{}", p.pointer);
    }
    for k in &keys {
        let _ = write!(csv, ",{k}");
    }
    csv.push('\n');
    for (t, r) in tasks.iter().zip(&results) {
        let _ = write!(csv, "{},{},{}", t.index, t.replicate, t.seed);
        for v in &t.values {
            let _ = write!(csv, ",{}", value_text(v));
        }
        for k in &keys {
            match r.summary.get(*k) {
                Some(x) => {
                    let _ = write!(csv, ",{}", number_text(*x));
                }
                None => csv.push(','),
            }
        }
        csv.push('\n');
    }

    let mut out = Outputs::new(root, "", false);
    let mut files = Vec::new();
    let mut timings = BTreeMap::new();
    for r in results {
        files.extend(r.files);
        for (stage, secs) in r.timings {
            *timings.entry(stage).or_insert(0.0) += secs;
        }
    }
    out.write("sweep.csv", &csv)?;
    files.extend(out.files);
    let mut summary = Summary::new();
    summary.insert("tasks".into(), tasks.len() as f64);
    Ok(RunOutput {
        files,
        summary,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{SweepConfig, SweepParameter};

    fn ibrg_sweep() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::parse(
            r#"{"model": {"kind": "ibrg", "N1": 10, "N2": 12, "alpha": 2.0},
                "drive": {"layers": [{"generator": "G*", "duration": 1.0}]},
                "seed": 5}"#,
        )
        .unwrap();
        cfg.sweep = Some(SweepConfig {
            parameters: vec![
                SweepParameter {
                    pointer: "/model/M".into(),
                    values: vec![1.into(), 2.into(), 3.into()],
                },
                SweepParameter {
                    pointer: "/model/alpha".into(),
                    values: vec![2.0.into(), 4.0.into()],
                },
            ],
            seeds: 10,
            threads: None,
        });
        cfg.validate().unwrap();
        cfg
    }

    #[test]
    fn cartesian_product_with_replicates() {
        let tasks = expand(&ibrg_sweep()).unwrap();
        assert_eq!(tasks.len(), 60);
        let seeds: BTreeSet<u64> = tasks.iter().map(|t| t.seed).collect();
        assert_eq!(seeds.len(), 60);
        assert!(tasks.iter().all(|t| t.config.sweep.is_none()));
        assert!(matches!(tasks[59].config.model, crate::config::ModelConfig::Ibrg { m: 3, .. }));
    }

    #[test]
    fn task_seeds_are_deterministic() {
        assert_eq!(task_seed(7, 3), task_seed(7, 3));
        assert_ne!(task_seed(7, 3), task_seed(7, 4));
        assert_ne!(task_seed(7, 3), task_seed(8, 3));
    }

    #[test]
    fn bad_substitution_is_a_validation_error() {
        let mut cfg = ibrg_sweep();
        cfg.sweep.as_mut().unwrap().parameters[0].values = vec!["deep".into()];
        assert_eq!(expand(&cfg).err().unwrap().exit_code(), 2);
    }
}
