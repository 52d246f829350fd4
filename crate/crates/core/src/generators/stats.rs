//! Summaries of generated networks and ground-truth label files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::netcore::Graph;

/// Fraction of edge endpoints whose edge leaves the endpoint's block.
pub fn realized_mixing(g: &Graph, z: &[usize]) -> Result<f64> {
    if z.len() != g.n() {
        return Err(invalid(format!("{} labels for {} nodes", z.len(), g.n())));
    }
    if g.n_edges() == 0 {
        return Err(invalid("mixing is undefined for a graph without edges"));
    }
    let cross = g.edges().filter(|&(i, j)| z[i] != z[j]).count();
    Ok(2.0 * cross as f64 / (2.0 * g.n_edges() as f64))
}

/// Realized properties of a generated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedStats {
    pub n: usize,
    pub n_edges: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub mixing: Option<f64>,
    pub community_sizes: Vec<usize>,
}

impl RealizedStats {
    pub fn compute(g: &Graph, z: &[usize]) -> Result<Self> {
        let k = z.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0; k];
        z.iter().for_each(|&c| sizes[c] += 1);
        Ok(RealizedStats {
            n: g.n(),
            n_edges: g.n_edges(),
            mean_degree: 2.0 * g.n_edges() as f64 / g.n() as f64,
            max_degree: g.degrees().into_iter().max().unwrap_or(0),
            mixing: if g.n_edges() > 0 { Some(realized_mixing(g, z)?) } else { None },
            community_sizes: sizes,
        })
    }
}

/// Writes `node,label` rows.
pub fn write_labels<W: Write>(z: &[usize], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "label"])?;
    for (i, c) in z.iter().enumerate() {
        out.write_record([i.to_string(), c.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `node,label` rows; nodes must be listed as `0..n` in order.
pub fn read_labels<R: Read>(r: R) -> Result<Vec<usize>> {
    let mut z = Vec::new();
    for (line, rec) in csv::Reader::from_reader(r).records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| invalid(format!("row {}: {e}", line + 1)));
        if rec.len() < 2 {
            return Err(invalid(format!("row {} has fewer than two fields", line + 1)));
        }
        let (i, c) = (parse(&rec[0])?, parse(&rec[1])?);
        if i != z.len() {
            return Err(invalid(format!("row {}: expected node {}, found {i}", line + 1, z.len())));
        }
        z.push(c);
    }
    Ok(z)
}
