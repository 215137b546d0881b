use std::io::Write;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::experiment::config::ExperimentConfig;
use crate::experiment::run::{run_experiment, RunError};

/// Top-level keys that hold lists without being sweep parameters.
const RESERVED: [&str; 3] = ["learners", "seeds", "w_star"];

/// One (value, seed, learner) run of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub value_index: usize,
    pub seed_index: usize,
    pub learner_index: usize,
    pub sweep_value: String,
    pub config: ExperimentConfig,
}

/// A validated sweep, every cell built up front.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// Dotted location of the swept parameter, e.g. `noise.budget`.
    pub parameter: String,
    pub cells: Vec<SweepCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: String,
    pub seed: u64,
    pub learner: String,
    pub mc_error: Option<f64>,
    pub ci_radius: Option<f64>,
    pub angle: Option<f64>,
    pub wall_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Failed cells, in row order, with the reason.
    pub failures: Vec<(usize, RunError)>,
}

impl SweepOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            3
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    matches!(v, Value::Number(_) | Value::String(_) | Value::Bool(_))
}

fn find_lists(v: &Value, path: &mut Vec<String>, top: bool, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                if top && RESERVED.contains(&k.as_str()) {
                    continue;
                }
                path.push(k.clone());
                find_lists(child, path, false, out);
                path.pop();
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(is_scalar) => out.push(path.clone()),
        _ => {}
    }
}

fn set_path(root: &mut Value, path: &[String], value: Value) {
    let mut cur = root;
    for key in path {
        cur = cur.get_mut(key.as_str()).expect("path was found by the scan");
    }
    *cur = value;
}

fn label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl SweepPlan {
    /// Parses a sweep file: an experiment config in which exactly one
    /// parameter is a list, plus optional `learners` and `seeds` lists.
    pub fn from_json(s: &str) -> Result<SweepPlan> {
        let root: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let Value::Object(mut map) = root else {
            return Err(Error::Parse("sweep config must be a JSON object".into()));
        };
        let learners = match map.remove("learners") {
            None => vec![map.get("learner").cloned().unwrap_or(Value::Null)],
            Some(Value::Array(items)) if !items.is_empty() => items
                .into_iter()
                .map(|l| match l {
                    Value::String(kind) => {
                        let mut m = Map::new();
                        m.insert("kind".into(), Value::String(kind));
                        Value::Object(m)
                    }
                    other => other,
                })
                .collect(),
            Some(_) => return Err(Error::Parse("learners must be a nonempty list".into())),
        };
        let seeds = match map.remove("seeds") {
            None => vec![map.get("seed").cloned().unwrap_or(Value::Null)],
            Some(Value::Array(items)) if !items.is_empty() => items,
            Some(_) => return Err(Error::Parse("seeds must be a nonempty list".into())),
        };
        let base = Value::Object(map);

        let mut lists = Vec::new();
        find_lists(&base, &mut Vec::new(), true, &mut lists);
        let path = match lists.len() {
            1 => lists.pop().expect("one list"),
            0 => return Err(Error::InvalidParameter("sweep config declares no sweep parameter".into())),
            _ => {
                let names: Vec<String> = lists.iter().map(|p| p.join(".")).collect();
                return Err(Error::InvalidParameter(format!(
                    "sweep config declares several sweep parameters: {}",
                    names.join(", ")
                )));
            }
        };
        let mut cur = &base;
        for key in &path {
            cur = &cur[key.as_str()];
        }
        let values = cur.as_array().expect("scan found a list").clone();

        let mut cells = Vec::with_capacity(values.len() * seeds.len() * learners.len());
        for (vi, value) in values.iter().enumerate() {
            for (si, seed) in seeds.iter().enumerate() {
                for (li, learner) in learners.iter().enumerate() {
                    let mut v = base.clone();
                    set_path(&mut v, &path, value.clone());
                    let obj = v.as_object_mut().expect("object");
                    obj.insert("seed".into(), seed.clone());
                    obj.insert("learner".into(), learner.clone());
                    let config: ExperimentConfig =
                        serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
                    config.validate()?;
                    cells.push(SweepCell {
                        value_index: vi,
                        seed_index: si,
                        learner_index: li,
                        sweep_value: label(value),
                        config,
                    });
                }
            }
        }
        Ok(SweepPlan {
            parameter: path.join("."),
            cells,
        })
    }

    /// Replaces every cell's seed list with the single seed given.
    pub fn with_seed(mut self, seed: u64) -> SweepPlan {
        self.cells.retain(|c| c.seed_index == 0);
        for c in &mut self.cells {
            c.config.seed = seed;
        }
        self
    }
}

/// Runs every cell in parallel. Rows come back ordered by
/// (value, seed, learner) position whatever the scheduling.
pub fn run_sweep(plan: &SweepPlan) -> SweepOutcome {
    let mut cells: Vec<&SweepCell> = plan.cells.iter().collect();
    cells.sort_by_key(|c| (c.value_index, c.seed_index, c.learner_index));
    let results: Vec<_> = cells.par_iter().map(|c| run_experiment(&c.config)).collect();
    let mut rows = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (i, (cell, res)) in cells.iter().zip(results).enumerate() {
        let mut row = SweepRow {
            sweep_value: cell.sweep_value.clone(),
            seed: cell.config.seed,
            learner: cell.config.learner.name().to_string(),
            mc_error: None,
            ci_radius: None,
            angle: None,
            wall_ms: None,
        };
        match res {
            Ok(report) => {
                row.mc_error = Some(report.mc_error.value);
                row.ci_radius = Some(report.mc_error.ci_radius);
                row.angle = report.angle;
                row.wall_ms = Some(report.wall_ms);
            }
            Err(e) => failures.push((i, e)),
        }
        rows.push(row);
    }
    SweepOutcome { rows, failures }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "sweep_value,seed,learner,mc_error,ci_radius,angle,wall_ms")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.sweep_value,
            r.seed,
            r.learner,
            opt(r.mc_error),
            opt(r.ci_radius),
            opt(r.angle),
            opt(r.wall_ms)
        )?;
    }
    out.flush()?;
    Ok(())
}
