//! Corpus formats: graph6, edge lists and DIMACS `.col`.
//!
//! Edge lists hold one graph: `u v` pairs per line, 0-based, with `#`
//! comments. The comment `# vertices N` fixes the vertex count; otherwise it
//! is one more than the largest index. DIMACS files hold one graph with a
//! `p edge n m` header and exactly `m` lines `e u v`, 1-based; repeated
//! edges are merged.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Graph6,
    Edgelist,
    Dimacs,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Graph6 => "graph6",
            Format::Edgelist => "edgelist",
            Format::Dimacs => "dimacs",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_extension(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "g6" | "graph6" => Some(Format::Graph6),
            "col" | "dimacs" => Some(Format::Dimacs),
            "txt" | "edges" | "el" | "edgelist" => Some(Format::Edgelist),
            _ => None,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph6" | "g6" => Ok(Format::Graph6),
            "edgelist" | "edges" => Ok(Format::Edgelist),
            "dimacs" | "col" => Ok(Format::Dimacs),
            _ => Err(format!("unknown format '{s}' (expected graph6, edgelist or dimacs)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn at(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        line,
        message: message.into(),
    }
}

/// One graph of a corpus, numbered from 0 in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: usize,
    pub graph: Graph,
    pub format: Format,
}

impl CorpusEntry {
    /// Re-encodes the graph in its source format.
    pub fn encode(&self) -> String {
        write_graph(&self.graph, self.format)
    }
}

pub fn read_corpus(path: &Path, format: Format) -> Result<Vec<CorpusEntry>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&text, format)
}

pub fn parse_corpus(text: &str, format: Format) -> Result<Vec<CorpusEntry>, CorpusError> {
    let graphs = match format {
        Format::Graph6 => parse_graph6_lines(text)?,
        Format::Edgelist => vec![parse_edgelist(text)?],
        Format::Dimacs => vec![parse_dimacs(text)?],
    };
    Ok(graphs
        .into_iter()
        .enumerate()
        .map(|(id, graph)| CorpusEntry { id, graph, format })
        .collect())
}

pub fn write_graph(g: &Graph, format: Format) -> String {
    match format {
        Format::Graph6 => {
            let mut s = encode_graph6(g);
            s.push('\n');
            s
        }
        Format::Edgelist => write_edgelist(g),
        Format::Dimacs => write_dimacs(g),
    }
}

const GRAPH6_HEADER: &str = ">>graph6<<";

fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = if i == 0 { line.strip_prefix(GRAPH6_HEADER).unwrap_or(line) } else { line };
        if line.is_empty() {
            continue;
        }
        out.push(decode_graph6(line).map_err(|m| at(i + 1, m))?);
    }
    Ok(out)
}

/// Decodes one graph6 string.
pub fn decode_graph6(s: &str) -> Result<Graph, String> {
    let bytes = s.as_bytes();
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(format!("byte {b} outside the graph6 range 63..=126"));
    }
    let (n, body) = match bytes {
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err("truncated 8-byte vertex count".into());
            }
            (sextets(&rest[..6]), &rest[6..])
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err("truncated 4-byte vertex count".into());
            }
            (sextets(&rest[..3]), &rest[3..])
        }
        [b, rest @ ..] => ((*b - 63) as u64, rest),
        [] => return Err("empty graph6 string".into()),
    };
    let n = usize::try_from(n).map_err(|_| "vertex count too large".to_string())?;
    let pairs = n * n.saturating_sub(1) / 2;
    let need = pairs.div_ceil(6);
    if body.len() != need {
        return Err(format!(
            "expected {need} adjacency bytes for {n} vertices, found {}",
            body.len()
        ));
    }
    let mut b = GraphBuilder::new(n);
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                b.add_edge(u, v).expect("indices in range");
            }
            k += 1;
        }
    }
    if pairs % 6 != 0 && (body[need - 1] - 63) & ((1 << (6 - pairs % 6)) - 1) != 0 {
        return Err("nonzero padding bits".into());
    }
    Ok(b.build())
}

fn sextets(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0u64, |acc, &b| acc << 6 | (b - 63) as u64)
}

/// Encodes a graph as graph6 (without a trailing newline).
pub fn encode_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let mut cur = 0u8;
    let mut filled = 0;
    for v in 1..n {
        for u in 0..v {
            cur = cur << 1 | g.has_edge(u, v) as u8;
            filled += 1;
            if filled == 6 {
                out.push(cur + 63);
                cur = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((cur << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 is ASCII")
}

fn parse_index(tok: &str, line: usize) -> Result<usize, CorpusError> {
    tok.parse::<usize>()
        .map_err(|_| at(line, format!("'{tok}' is not a vertex index")))
}

pub fn parse_edgelist(text: &str) -> Result<Graph, CorpusError> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let ln = i + 1;
        if let Some(comment) = line.strip_prefix('#') {
            let mut it = comment.split_whitespace();
            if it.next() == Some("vertices") {
                let tok = it.next().ok_or_else(|| at(ln, "missing vertex count"))?;
                declared = Some(parse_index(tok, ln)?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(at(ln, format!("expected 'u v', found {} fields", toks.len())));
        }
        let (u, v) = (parse_index(toks[0], ln)?, parse_index(toks[1], ln)?);
        if u == v {
            return Err(at(ln, format!("self-loop at {u}")));
        }
        edges.push((u, v, ln));
    }
    let max = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared {
        Some(n) => {
            if let Some(&(u, v, ln)) = edges.iter().find(|&&(u, v, _)| u.max(v) >= n) {
                return Err(at(ln, format!("edge {u} {v} exceeds the declared {n} vertices")));
            }
            n
        }
        None => max,
    };
    let mut b = GraphBuilder::new(n);
    for (u, v, _) in edges {
        b.add_edge(u, v).expect("checked");
    }
    Ok(b.build())
}

pub fn write_edgelist(g: &Graph) -> String {
    let mut s = format!("# vertices {}\n", g.n());
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn parse_dimacs(text: &str) -> Result<Graph, CorpusError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut builder: Option<GraphBuilder> = None;
    let mut seen = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first().copied() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(at(ln, "second 'p' line"));
                }
                if toks.len() != 4 || !matches!(toks[1], "edge" | "col") {
                    return Err(at(ln, "expected 'p edge n m'"));
                }
                let n = parse_index(toks[2], ln)?;
                let m = parse_index(toks[3], ln)?;
                header = Some((n, m, ln));
                builder = Some(GraphBuilder::new(n));
            }
            Some("e") => {
                let Some((n, _, _)) = header else {
                    return Err(at(ln, "edge line before the 'p' header"));
                };
                if toks.len() != 3 {
                    return Err(at(ln, "expected 'e u v'"));
                }
                let (u, v) = (parse_index(toks[1], ln)?, parse_index(toks[2], ln)?);
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(at(ln, format!("edge {u} {v} outside 1..={n}")));
                }
                if u == v {
                    return Err(at(ln, format!("self-loop at {u}")));
                }
                builder.as_mut().unwrap().add_edge(u - 1, v - 1).expect("checked");
                seen += 1;
            }
            Some(other) => return Err(at(ln, format!("unknown line type '{other}'"))),
        }
    }
    let Some((_, m, ln)) = header else {
        return Err(at(text.lines().count().max(1), "missing 'p edge n m' header"));
    };
    if seen != m {
        return Err(at(ln, format!("header announces {m} edges but {seen} 'e' lines follow")));
    }
    Ok(builder.unwrap().build())
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        s.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{complete, cycle, random_graph};
    use proptest::prelude::*;

    /// Straight transcription of the published packing: n as one byte,
    /// then upper-triangle bits column by column, six per byte.
    fn oracle_encode(g: &Graph) -> String {
        assert!(g.n() <= 62);
        let mut bits = Vec::new();
        for j in 1..g.n() {
            for i in 0..j {
                bits.push(g.has_edge(i, j));
            }
        }
        while bits.len() % 6 != 0 {
            bits.push(false);
        }
        let mut s = String::new();
        s.push((g.n() as u8 + 63) as char);
        for ch in bits.chunks(6) {
            let v = ch.iter().fold(0u8, |a, &b| a * 2 + b as u8);
            s.push((v + 63) as char);
        }
        s
    }

    #[test]
    fn five_cycle() {
        let c5 = cycle(5).unwrap();
        assert_eq!(oracle_encode(&c5), "Dhc");
        let g = decode_graph6("Dhc").unwrap();
        assert_eq!((g.n(), g.edge_count()), (5, 5));
        assert!((0..5).all(|v| g.degree(v) == 2));
        assert_eq!(g, c5);
        assert_eq!(encode_graph6(&c5), "Dhc");
    }

    #[test]
    fn small_cases() {
        assert_eq!(decode_graph6("?").unwrap().n(), 0);
        assert_eq!(decode_graph6("@").unwrap().n(), 1);
        assert_eq!(encode_graph6(&complete(2).unwrap()), "A_");
        assert!(decode_graph6("Dh").is_err());
        assert!(decode_graph6("Dhcc").is_err());
        assert!(decode_graph6("A`").is_err(), "padding must be zero");
    }

    #[test]
    fn long_vertex_counts() {
        let g = random_graph(70, 0.05, 3).unwrap();
        let s = encode_graph6(&g);
        assert!(s.starts_with('~'));
        assert_eq!(decode_graph6(&s).unwrap(), g);
    }

    #[test]
    fn corpus_lines_and_errors() {
        let text = ">>graph6<<Dhc\n\nA_\n";
        let entries = parse_corpus(text, Format::Graph6).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[1].id, 1);
        assert_eq!(entries[1].encode(), "A_\n");
        match parse_corpus("Dhc\nD!c\n", Format::Graph6) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn edge_lists() {
        let g = parse_edgelist("0 1\n1 2").unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 2));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
        let g = parse_edgelist("# vertices 5\n# a comment\n0 1\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(parse_edgelist(&write_edgelist(&g)).unwrap(), g);
        for (text, line) in [("0 1\n1 x\n", 2), ("0 1 2\n", 1), ("3 3\n", 1), ("# vertices 2\n0 2\n", 2)] {
            match parse_edgelist(text) {
                Err(CorpusError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn dimacs() {
        let g = parse_dimacs("c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!(g, complete(3).unwrap());
        assert_eq!(parse_dimacs(&write_dimacs(&g)).unwrap(), g);
        // repeated edges count as lines but merge
        let g = parse_dimacs("p edge 2 2\ne 1 2\ne 2 1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        for (text, line) in [
            ("p edge 3 2\ne 1 2\n", 1),
            ("e 1 2\n", 1),
            ("p edge 3 1\ne 1 4\n", 2),
            ("p edge 3 1\nx\n", 2),
            ("p edge 3\n", 1),
        ] {
            match parse_dimacs(text) {
                Err(CorpusError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn graph6_round_trip_on_random_graphs() {
        for seed in 0..1000u64 {
            let n = (seed % 21) as usize;
            let p = (seed % 7) as f64 / 6.0;
            let g = random_graph(n, p, seed).unwrap();
            let s = encode_graph6(&g);
            assert_eq!(s, oracle_encode(&g));
            assert_eq!(decode_graph6(&s).unwrap(), g);
        }
    }

    proptest! {
        #[test]
        fn all_formats_round_trip(n in 0usize..25, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = random_graph(n, p, seed).unwrap();
            for f in [Format::Graph6, Format::Edgelist, Format::Dimacs] {
                let text = write_graph(&g, f);
                let back = parse_corpus(&text, f).unwrap();
                prop_assert_eq!(back.len(), 1);
                prop_assert_eq!(&back[0].graph, &g);
                prop_assert_eq!(back[0].encode(), text);
            }
        }
    }
}
