//! Graph files: a JSON document `{"n": 4, "edges": [[1, 2, 0.5], [2, 3], ...]}`
//! or a plain edge list with one `u v [length]` per line and `#` comments.
//! Lengths default to 1.0. In the plain form `n` is the largest label.

use std::path::Path;

use fujiwara::{Edge, Graph, LengthFunction};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub graph: Graph,
    pub lengths: LengthFunction,
}

/// The JSON document form, also used when a command writes a graph back out.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: Option<usize>,
    pub edges: Vec<Value>,
}

impl GraphDoc {
    pub fn from_parts(g: &Graph, l: &LengthFunction) -> Self {
        let edges = g.edges().iter().map(|e| serde_json::json!([e.u, e.v, l.get(e).unwrap_or(1.0)])).collect();
        GraphDoc { n: Some(g.n()), edges }
    }
}

pub fn read_graph(path: &Path) -> Result<GraphInput, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_graph(text: &str) -> Result<GraphInput, CliError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_plain(text)
    }
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn build(n: usize, triples: Vec<(usize, usize, f64, String)>) -> Result<GraphInput, CliError> {
    if n == 0 {
        return Err(parse_err("graph has no vertices"));
    }
    let mut lengths = LengthFunction::new();
    let mut pairs = Vec::new();
    for (u, v, len, at) in triples {
        if u == 0 || v == 0 || u > n || v > n {
            return Err(parse_err(format!("{at}: vertex out of range 1..={n}")));
        }
        if u == v {
            return Err(parse_err(format!("{at}: loop at vertex {u}")));
        }
        if !(len > 0.0 && len.is_finite()) {
            return Err(parse_err(format!("{at}: length {len} is not a positive number")));
        }
        if lengths.insert(Edge::new(u, v), len).is_some() {
            return Err(parse_err(format!("{at}: duplicate edge ({u}, {v})")));
        }
        pairs.push((u, v));
    }
    let graph = Graph::new(n, &pairs).map_err(|e| parse_err(e.to_string()))?;
    Ok(GraphInput { graph, lengths })
}

fn parse_json(text: &str) -> Result<GraphInput, CliError> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| parse_err(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let mut triples = Vec::new();
    let mut max_label = 0;
    for (i, entry) in doc.edges.iter().enumerate() {
        let at = format!("edges[{i}]");
        let items = entry
            .as_array()
            .filter(|a| a.len() == 2 || a.len() == 3)
            .ok_or_else(|| parse_err(format!("{at}: expected [u, v] or [u, v, length], got {entry}")))?;
        let label = |k: usize| {
            items[k]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| parse_err(format!("{at}, field {}: {} is not a vertex label", k + 1, items[k])))
        };
        let (u, v) = (label(0)?, label(1)?);
        let len = match items.get(2) {
            Some(x) => x.as_f64().ok_or_else(|| parse_err(format!("{at}, field 3: {x} is not a number")))?,
            None => 1.0,
        };
        max_label = max_label.max(u).max(v);
        triples.push((u, v, len, at));
    }
    build(doc.n.unwrap_or(max_label), triples)
}

fn parse_plain(text: &str) -> Result<GraphInput, CliError> {
    let mut triples = Vec::new();
    let mut max_label = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = format!("line {}", i + 1);
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(format!("{at}: expected `u v [length]`, got {} fields", fields.len())));
        }
        let label = |k: usize| {
            fields[k]
                .parse::<usize>()
                .map_err(|_| parse_err(format!("{at}, field {}: '{}' is not a vertex label", k + 1, fields[k])))
        };
        let (u, v) = (label(0)?, label(1)?);
        let len = match fields.get(2) {
            Some(x) => x.parse::<f64>().map_err(|_| parse_err(format!("{at}, field 3: '{x}' is not a number")))?,
            None => 1.0,
        };
        max_label = max_label.max(u).max(v);
        triples.push((u, v, len, at));
    }
    build(max_label, triples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_with_default_lengths() {
        let g = parse_graph(r#"{"n": 3, "edges": [[1, 2, 0.5], [2, 3], [1, 3, 2]]}"#).unwrap();
        assert_eq!(g.graph, Graph::cycle(3).unwrap());
        assert_eq!(g.lengths.get(&Edge::new(2, 3)), Some(1.0));
        assert_eq!(g.lengths.get(&Edge::new(1, 2)), Some(0.5));
    }

    #[test]
    fn json_infers_n() {
        let g = parse_graph(r#"{"edges": [[1, 2], [2, 4]]}"#).unwrap();
        assert_eq!(g.graph.n(), 4);
    }

    #[test]
    fn plain_list() {
        let g = parse_graph("# triangle\n1 2 0.25\n\n2 3   # default length\n3 1 4\n").unwrap();
        assert_eq!(g.graph, Graph::cycle(3).unwrap());
        assert_eq!(g.lengths.get(&Edge::new(1, 3)), Some(4.0));
    }

    #[test]
    fn diagnostics_name_the_entry() {
        let msg = |s: &str| match parse_graph(s) {
            Err(CliError::Parse(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg("1 2\n2 x 1.0\n").contains("line 2, field 2"));
        assert!(msg("1 2\n2 3 abc\n").contains("line 2, field 3"));
        assert!(msg("1 2 3 4\n").contains("line 1"));
        assert!(msg(r#"{"edges": [[1, 2], [2]]}"#).contains("edges[1]"));
        assert!(msg(r#"{"edges": [[1, 2], [2, "a"]]}"#).contains("edges[1], field 2"));
        assert!(msg(r#"{"n": 2, "edges": [[1, 3]]}"#).contains("out of range"));
        assert!(msg("1 2\n2 1\n").contains("duplicate"));
        assert!(msg("1 1\n").contains("loop"));
        assert!(msg("1 2 -1\n").contains("positive"));
        assert!(msg(r#"{"edges": [[1, 2]"#).contains("line 1"));
    }
}
