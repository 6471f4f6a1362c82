//! Text, JSON and DOT formats for graphs.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! states A B
//! edges
//! e1 A B
//! e2 B A
//! ```
//!
//! Any number of `states` lines may precede the `edges` header; every
//! following non-empty line is `<edge-id> <source> <target>`. Input whose
//! first non-blank character is `{` is read as JSON instead.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::MultiGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub states: Vec<String>,
    pub edges: Vec<(String, String, String)>,
}

pub fn load_graph<R: Read>(mut source: R, allow_sinks: bool) -> Result<MultiGraph> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_graph(&text, allow_sinks)
}

pub fn parse_graph(text: &str, allow_sinks: bool) -> Result<MultiGraph> {
    let g = if text.trim_start().starts_with('{') {
        let json: GraphJson = serde_json::from_str(text)?;
        from_json_value(json)?
    } else {
        parse_text(text)?
    };
    if !allow_sinks {
        g.require_sink_free()?;
    }
    Ok(g)
}

fn parse_text(text: &str) -> Result<MultiGraph> {
    let mut states: Vec<String> = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut in_edges = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tokens.first() else { continue };
        let parse_err = |message: String| Error::Parse { line, message };
        if !in_edges && head == "states" {
            for id in &tokens[1..] {
                if lookup.insert(id.to_string(), states.len()).is_some() {
                    return Err(Error::DuplicateId { kind: "state", id: id.to_string() });
                }
                states.push(id.to_string());
            }
        } else if !in_edges && head == "edges" {
            if tokens.len() > 1 {
                return Err(parse_err("`edges` header takes no arguments".into()));
            }
            in_edges = true;
        } else if in_edges {
            let [id, src, dst] = tokens[..] else {
                return Err(parse_err(format!("expected `<edge-id> <source> <target>`, got `{}`", content.trim())));
            };
            let resolve = |s: &str| {
                lookup.get(s).copied().ok_or_else(|| parse_err(format!("edge `{id}` uses undeclared state `{s}`")))
            };
            edges.push((id.to_string(), resolve(src)?, resolve(dst)?));
        } else {
            return Err(parse_err(format!("unexpected `{head}`; expected `states` or `edges`")));
        }
    }
    MultiGraph::new(states, edges)
}

fn from_json_value(json: GraphJson) -> Result<MultiGraph> {
    let lookup: HashMap<&str, usize> = json.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut edges = Vec::with_capacity(json.edges.len());
    for (id, s, t) in &json.edges {
        let s = *lookup.get(s.as_str()).ok_or_else(|| Error::UnknownState(s.clone()))?;
        let t = *lookup.get(t.as_str()).ok_or_else(|| Error::UnknownState(t.clone()))?;
        edges.push((id.clone(), s, t));
    }
    MultiGraph::new(json.states.clone(), edges)
}

pub fn to_text(g: &MultiGraph) -> String {
    let mut out = String::new();
    out.push_str("states");
    for id in g.state_ids() {
        out.push(' ');
        out.push_str(id);
    }
    out.push_str("\nedges\n");
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", g.edge_id(e), g.state_id(g.source(e)), g.state_id(g.target(e))));
    }
    out
}

pub fn to_json(g: &MultiGraph) -> GraphJson {
    GraphJson {
        states: g.state_ids().to_vec(),
        edges: g
            .edges()
            .map(|e| (g.edge_id(e).to_string(), g.state_id(g.source(e)).to_string(), g.state_id(g.target(e)).to_string()))
            .collect(),
    }
}

/// DOT rendering with one DOT edge per multigraph edge. When `colours` is
/// given (indexed by edge), it is appended to the edge label.
pub fn to_dot(g: &MultiGraph, colours: Option<&[String]>) -> String {
    let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    let mut out = String::from("digraph G {\n");
    for id in g.state_ids() {
        out.push_str(&format!("  {};\n", quote(id)));
    }
    for e in g.edges() {
        let label = match colours {
            Some(c) => format!("{} / {}", g.edge_id(e), c[e]),
            None => g.edge_id(e).to_string(),
        };
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            quote(g.state_id(g.source(e))),
            quote(g.state_id(g.target(e))),
            quote(&label)
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_loops() {
        let g = parse_graph("states 1\nedges\ne1 1 1\ne2 1 1\n", false).unwrap();
        assert_eq!((g.num_states(), g.num_edges()), (1, 2));
        assert_eq!(g.out_degree(0), 2);
    }

    #[test]
    fn sink_rejected_unless_allowed() {
        let text = "states 1\nedges\n";
        assert!(matches!(parse_graph(text, false), Err(Error::Sink(_))));
        assert_eq!(parse_graph(text, true).unwrap().num_edges(), 0);
    }

    #[test]
    fn parses_cycle_with_comments() {
        let text = "# C3\nstates a b\nstates c # more\n\nedges\nx a b\ny b c\nz c a\n";
        let g = parse_graph(text, false).unwrap();
        assert_eq!(g.num_states(), 3);
        assert!(g.states().all(|s| g.out_degree(s) == 1));
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_graph("states a\nedges\nx a b\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("states a\nedges\nx a\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_graph("states a a\n", true), Err(Error::DuplicateId { .. })));
        assert!(matches!(parse_graph("states a\nedges\nx a a\nx a a\n", true), Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn text_and_json_round_trip() {
        let g = parse_graph("states a b\nedges\nx a b\ny b a\nz b b\n", false).unwrap();
        assert_eq!(parse_graph(&to_text(&g), false).unwrap(), g);
        let json = serde_json::to_string(&to_json(&g)).unwrap();
        assert_eq!(parse_graph(&json, false).unwrap(), g);
    }

    #[test]
    fn dot_has_one_line_per_edge() {
        let g = parse_graph("states a\nedges\nx a a\ny a a\n", false).unwrap();
        let dot = to_dot(&g, Some(&["0".to_string(), "1".to_string()]));
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("x / 0"));
    }
}
