//! Corpus generation: a grid of graphs on disk plus a manifest
//! recording every attempted combination, including the ones the
//! generator rejects (an edgeless structure cannot meet a positive
//! CCR).

use std::path::Path;

use anyhow::Context;
use optisched::graph::{generate, GraphStructure};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub structures: Vec<GraphStructure>,
    pub sizes: Vec<usize>,
    pub ccrs: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub file: String,
    pub structure: String,
    pub n: usize,
    pub ccr: f64,
    pub seed: u64,
    pub status: String,
    pub error: String,
}

pub fn instance_file_name(structure: GraphStructure, n: usize, ccr: f64, seed: u64) -> String {
    format!("{structure}-n{n}-ccr{ccr}-s{seed}.tg")
}

/// Writes one `.tg` per grid point under `out_dir`, plus
/// `manifest.csv`. Returns the manifest rows in grid order.
pub fn generate_corpus(spec: &CorpusSpec, out_dir: &Path) -> anyhow::Result<Vec<ManifestRow>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let mut rows = Vec::new();
    for &structure in &spec.structures {
        for &n in &spec.sizes {
            for &ccr in &spec.ccrs {
                for &seed in &spec.seeds {
                    let mut row = ManifestRow {
                        file: String::new(),
                        structure: structure.name().to_string(),
                        n,
                        ccr,
                        seed,
                        status: "ok".to_string(),
                        error: String::new(),
                    };
                    match generate(structure, n, ccr, seed) {
                        Ok(g) => {
                            let name = instance_file_name(structure, n, ccr, seed);
                            std::fs::write(out_dir.join(&name), g.to_tg_string())
                                .with_context(|| format!("writing {name}"))?;
                            row.file = name;
                        }
                        Err(e) => {
                            row.status = "error".to_string();
                            row.error = e.to_string();
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }

    let mut w = csv::Writer::from_path(out_dir.join("manifest.csv"))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}
