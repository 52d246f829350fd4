//! Kept posterior samples of one chain and their file formats.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SamplerConfig;
use crate::error::{invalid, Result};

/// State recorded at one kept iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Iteration number (1-based, counting burn-in).
    pub iteration: usize,
    /// Block labels. Fixed-k chains may leave some labels unused.
    pub z: Vec<usize>,
    /// Number of non-empty blocks.
    pub k: usize,
    /// Connectivity matrix indexed by label.
    pub p: Vec<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub deviance: f64,
}

/// Sidecar metadata written next to the CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub config: SamplerConfig,
    pub seed: u64,
    pub n: usize,
    pub n_kept: usize,
}

/// Kept iterations of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub config: SamplerConfig,
    pub n: usize,
    pub records: Vec<TraceRecord>,
}

pub const LABELS_FILE: &str = "labels.csv";
pub const P_FILE: &str = "p.csv";
pub const SCALARS_FILE: &str = "scalars.csv";
pub const META_FILE: &str = "trace.json";

impl ChainTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn deviances(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.deviance).collect()
    }

    pub fn ks(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.k).collect()
    }

    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.records.iter().map(|r| r.z.clone()).collect()
    }

    /// Writes `labels.csv`, `p.csv`, `scalars.csv` and `trace.json` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;

        let mut w = csv::WriterBuilder::new().flexible(true).from_path(dir.join(LABELS_FILE))?;
        let mut header = vec!["iteration".to_string()];
        header.extend((0..self.n).map(|i| format!("z{i}")));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.iteration.to_string()];
            row.extend(r.z.iter().map(|c| c.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;

        let mut w = csv::WriterBuilder::new().flexible(true).from_path(dir.join(P_FILE))?;
        w.write_record(["iteration", "k", "p_row_major"])?;
        for r in &self.records {
            let mut row = vec![r.iteration.to_string(), r.p.len().to_string()];
            row.extend(r.p.iter().flatten().map(|v| format!("{v:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join(SCALARS_FILE))?;
        w.write_record(["iteration", "k", "epsilon", "deviance"])?;
        for r in &self.records {
            let eps = r.epsilon.map(|e| format!("{e:e}")).unwrap_or_default();
            w.write_record([r.iteration.to_string(), r.k.to_string(), eps, format!("{:e}", r.deviance)])?;
        }
        w.flush()?;

        let meta = TraceMeta {
            config: self.config.clone(),
            seed: self.config.seed,
            n: self.n,
            n_kept: self.records.len(),
        };
        let mut f = BufWriter::new(File::create(dir.join(META_FILE))?);
        serde_json::to_writer_pretty(&mut f, &meta)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    /// Reads a trace written by [`ChainTrace::write_dir`].
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let meta: TraceMeta = serde_json::from_reader(BufReader::new(File::open(dir.join(META_FILE))?))?;

        let read_rows = |name: &str| -> Result<Vec<csv::StringRecord>> {
            let mut r = csv::ReaderBuilder::new().flexible(true).from_path(dir.join(name))?;
            Ok(r.records().collect::<std::result::Result<Vec<_>, _>>()?)
        };
        let labels = read_rows(LABELS_FILE)?;
        let ps = read_rows(P_FILE)?;
        let scalars = read_rows(SCALARS_FILE)?;
        if labels.len() != meta.n_kept || ps.len() != meta.n_kept || scalars.len() != meta.n_kept {
            return Err(invalid(format!("trace in {} has inconsistent row counts", dir.display())));
        }

        let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| invalid(format!("bad number {s:?}: {e}"))) };
        let int = |s: &str| -> Result<usize> { s.parse::<usize>().map_err(|e| invalid(format!("bad integer {s:?}: {e}"))) };

        let mut records = Vec::with_capacity(meta.n_kept);
        for ((lr, pr), sr) in labels.iter().zip(&ps).zip(&scalars) {
            let iteration = int(&lr[0])?;
            let z = lr.iter().skip(1).map(int).collect::<Result<Vec<_>>>()?;
            if z.len() != meta.n {
                return Err(invalid(format!("iteration {iteration}: {} labels, expected {}", z.len(), meta.n)));
            }
            let dim = int(&pr[1])?;
            let flat = pr.iter().skip(2).map(num).collect::<Result<Vec<_>>>()?;
            if flat.len() != dim * dim {
                return Err(invalid(format!("iteration {iteration}: P has {} entries, expected {}", flat.len(), dim * dim)));
            }
            let p = flat.chunks(dim.max(1)).map(|c| c.to_vec()).collect();
            let epsilon = if sr[2].is_empty() { None } else { Some(num(&sr[2])?) };
            records.push(TraceRecord {
                iteration,
                z,
                k: int(&sr[1])?,
                p,
                epsilon,
                deviance: num(&sr[3])?,
            });
        }
        Ok(ChainTrace {
            config: meta.config,
            n: meta.n,
            records,
        })
    }
}
