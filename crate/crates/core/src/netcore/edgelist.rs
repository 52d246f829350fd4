//! Plain-text edge lists: one `i j` pair per line (0-based), `#` comments,
//! optional `n <count>` header. Without a header the node count is the
//! largest index plus one.

use std::io::{BufRead, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn parse_edge_list(reader: impl BufRead) -> Result<Graph> {
    let mut n_header = None;
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: format!("{s:?}: {e}"),
            })
        };
        match fields.as_slice() {
            ["n", count] => n_header = Some(parse(count)?),
            [i, j] => edges.push((parse(i)?, parse(j)?)),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected `i j` or `n <count>`, got {line:?}"),
                })
            }
        }
    }
    let n = n_header.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    Graph::from_edges(n, &edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    parse_edge_list(std::io::BufReader::new(file))
}

pub fn write_edge_list(g: &Graph, mut out: impl Write) -> Result<()> {
    writeln!(out, "n {}", g.n())?;
    for (i, j) in g.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}
