//! Benchmark run records and their CSV schema.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// Which state space a run searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ao,
    Els,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Ao => "ao",
            Model::Els => "els",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Model, String> {
        match s {
            "ao" => Ok(Model::Ao),
            "els" => Ok(Model::Els),
            _ => Err(format!("unknown model {s:?}; expected ao or els")),
        }
    }
}

/// One solver execution on one instance. The CSV column order is this
/// field order; `schema_version` guards against mixing files after
/// schema changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub instance: String,
    pub model: Model,
    pub algo: String,
    pub threads: usize,
    pub num_procs: usize,
    pub solved: bool,
    pub time_ms: f64,
    pub makespan: Option<u64>,
    pub states_expanded: u64,
    pub states_per_second: f64,
}

pub const SCHEMA_VERSION: u32 = 1;

impl RunRecord {
    /// states/second over the measured wall time; 0 when the run was
    /// too fast to time meaningfully.
    pub fn rate(states_expanded: u64, time_ms: f64) -> f64 {
        if time_ms <= 0.0 {
            return 0.0;
        }
        states_expanded as f64 / (time_ms / 1000.0)
    }
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> anyhow::Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        let rec: RunRecord = row?;
        anyhow::ensure!(
            rec.schema_version == SCHEMA_VERSION,
            "record schema version {} does not match expected {}",
            rec.schema_version,
            SCHEMA_VERSION
        );
        out.push(rec);
    }
    Ok(out)
}
