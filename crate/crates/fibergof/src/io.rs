//! Text formats: edge lists, block assignments, and table CSV.
//!
//! Edge lists are whitespace-separated `src dst [multiplicity]` lines with
//! `#` starting a comment; a line with a single token declares an isolated
//! node. Node labels are arbitrary tokens, numbered internally by first
//! appearance. Block files hold `node block` pairs. Table CSV is one row of
//! comma-separated counts per line.

use std::collections::HashMap;
use std::path::Path;

use crate::design::BlockPartition;
use crate::error::{Error, Result};
use crate::table::GraphData;

/// Parses an edge list. `directed` controls whether `a b` and `b a` denote
/// distinct edges.
pub fn parse_edge_list(text: &str, directed: bool) -> Result<GraphData> {
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
        *ids.entry(tok.to_string()).or_insert_with(|| {
            labels.push(tok.to_string());
            labels.len() - 1
        })
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.len() {
            1 => {
                intern(toks[0], &mut labels);
            }
            2 | 3 => {
                let a = intern(toks[0], &mut labels);
                let b = intern(toks[1], &mut labels);
                let mult = match toks.get(2) {
                    None => 1,
                    Some(m) => m.parse::<i64>().map_err(|_| {
                        Error::Parse(format!(
                            "line {}: multiplicity {m:?} is not an integer",
                            lineno + 1
                        ))
                    })?,
                };
                edges.push((a, b, mult));
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected 'src dst [multiplicity]' or a bare node, got {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    let mut g = GraphData::with_labels(labels, directed)?;
    for (a, b, m) in edges {
        g.add_edge(a, b, m)?;
    }
    Ok(g)
}

/// Writes a graph back to edge-list text. Multiplicity is omitted when 1;
/// isolated nodes appear as bare label lines.
pub fn format_edge_list(g: &GraphData) -> String {
    let mut covered = vec![false; g.n()];
    let mut out = String::new();
    for (a, b, m) in g.edges() {
        covered[a] = true;
        covered[b] = true;
        if m == 1 {
            out.push_str(&format!("{} {}\n", g.labels()[a], g.labels()[b]));
        } else {
            out.push_str(&format!("{} {} {}\n", g.labels()[a], g.labels()[b], m));
        }
    }
    for (v, c) in covered.iter().enumerate() {
        if !c {
            out.push_str(&format!("{}\n", g.labels()[v]));
        }
    }
    out
}

/// Parses `node block` lines into pairs, preserving file order.
pub fn parse_blocks(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse(format!(
                "line {}: expected 'node block', got {line:?}",
                lineno + 1
            )));
        }
        pairs.push((toks[0].to_string(), toks[1].to_string()));
    }
    Ok(pairs)
}

/// Aligns block assignments with a graph's nodes: every node must be
/// assigned, and assignments for unknown nodes are rejected.
pub fn block_partition_for(g: &GraphData, pairs: &[(String, String)]) -> Result<BlockPartition> {
    let mut by_label: HashMap<&str, &str> = HashMap::new();
    for (node, block) in pairs {
        if by_label.insert(node.as_str(), block.as_str()).is_some() {
            return Err(Error::InvalidPartition(format!(
                "node {node:?} assigned to a block twice"
            )));
        }
    }
    for (node, _) in pairs {
        if !g.labels().iter().any(|l| l == node) {
            return Err(Error::InvalidPartition(format!(
                "block file mentions unknown node {node:?}"
            )));
        }
    }
    let per_node: Vec<String> = g
        .labels()
        .iter()
        .map(|l| {
            by_label
                .get(l.as_str())
                .map(|b| b.to_string())
                .ok_or_else(|| Error::InvalidPartition(format!("node {l:?} has no block")))
        })
        .collect::<Result<_>>()?;
    BlockPartition::from_names(&per_node)
}

/// Parses a rectangular table of comma-separated counts. Returns
/// `(rows, cols, row-major cells)`.
pub fn parse_table_csv(text: &str) -> Result<(usize, usize, Vec<i64>)> {
    let mut cells = Vec::new();
    let mut d2 = None;
    let mut d1 = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<i64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<i64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: cell {tok:?} is not an integer",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        match d2 {
            None => d2 = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse(format!(
                    "line {}: row has {} cells, expected {w}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        cells.extend(row);
        d1 += 1;
    }
    let d2 = d2.ok_or_else(|| Error::Parse("table file has no rows".into()))?;
    Ok((d1, d2, cells))
}

/// Formats row-major cells as table CSV with `d2` columns.
pub fn format_table_csv(d2: usize, cells: &[i64]) -> String {
    cells
        .chunks(d2)
        .map(|row| {
            row.iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// Writes text to `path` atomically: a temporary sibling file is written in
/// full and renamed over the destination.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Parse(format!("invalid output path {path:?}")))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!("{file_name}.tmp.{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip_directed() {
        let text = "# a comment\nalice bob\nbob alice\ncarol alice 3\n\ndave\n";
        let g = parse_edge_list(text, true).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.labels(), ["alice", "bob", "carol", "dave"]);
        assert_eq!(g.multiplicity(2, 0), 3);
        assert_eq!(g.multiplicity(0, 2), 0);
        let back = parse_edge_list(&format_edge_list(&g), true).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn edge_list_undirected_merges_directions() {
        let g = parse_edge_list("a b\nb a\n", false).unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.edge_total(), 2);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(matches!(
            parse_edge_list("a b c d\n", true),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_edge_list("a b x\n", true),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_edge_list("a a\n", true),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn blocks_align_with_graph() {
        let g = parse_edge_list("a b\nb c\n", true).unwrap();
        let pairs = parse_blocks("a 1\nb 2 # comment\nc 1\n").unwrap();
        let p = block_partition_for(&g, &pairs).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.block_of(0), 0);
        assert_eq!(p.block_of(1), 1);
        assert_eq!(p.block_of(2), 0);

        let missing = parse_blocks("a 1\nb 2\n").unwrap();
        assert!(block_partition_for(&g, &missing).is_err());
        let unknown = parse_blocks("a 1\nb 2\nc 1\nzed 2\n").unwrap();
        assert!(block_partition_for(&g, &unknown).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let (d1, d2, cells) = parse_table_csv("1, 2, 3\n4,5,6\n").unwrap();
        assert_eq!((d1, d2), (2, 3));
        assert_eq!(cells, vec![1, 2, 3, 4, 5, 6]);
        let text = format_table_csv(3, &cells);
        assert_eq!(parse_table_csv(&text).unwrap(), (2, 3, cells));
        assert!(parse_table_csv("1,2\n3\n").is_err());
        assert!(parse_table_csv("").is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("fibergof-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.txt");
        write_atomic(&path, "first\n").unwrap();
        write_atomic(&path, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
