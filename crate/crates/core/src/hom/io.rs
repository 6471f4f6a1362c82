//! Homomorphism files.
//!
//! ```text
//! state 1 -> m
//! edge e1 -> a
//! ```
//!
//! JSON input `{ "states": [[src, dst], ...], "edges": [[src, dst], ...] }`
//! is accepted as well.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::GraphHom;
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomJson {
    pub states: Vec<(String, String)>,
    pub edges: Vec<(String, String)>,
}

/// Parses a homomorphism out of `domain`. Without an explicit codomain, one
/// is rebuilt from the images, in order of first appearance.
pub fn parse_hom(text: &str, domain: Arc<MultiGraph>, codomain: Option<Arc<MultiGraph>>) -> Result<GraphHom> {
    let json = if text.trim_start().starts_with('{') { serde_json::from_str(text)? } else { parse_text(text)? };
    from_json(json, domain, codomain)
}

fn parse_text(text: &str) -> Result<HomJson> {
    let mut out = HomJson { states: Vec::new(), edges: Vec::new() };
    for (lineno, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[..] {
            [] => {}
            ["state", a, "->", b] => out.states.push((a.into(), b.into())),
            ["edge", a, "->", b] => out.edges.push((a.into(), b.into())),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected `state <id> -> <id>` or `edge <id> -> <id>`, got `{}`", content.trim()),
                })
            }
        }
    }
    Ok(out)
}

fn from_json(json: HomJson, domain: Arc<MultiGraph>, codomain: Option<Arc<MultiGraph>>) -> Result<GraphHom> {
    let mut state_img: Vec<Option<String>> = vec![None; domain.num_states()];
    for (a, b) in &json.states {
        let s = domain.state_index(a).ok_or_else(|| Error::UnknownState(a.clone()))?;
        if state_img[s].replace(b.clone()).is_some() {
            return Err(Error::DuplicateId { kind: "state mapping", id: a.clone() });
        }
    }
    let mut edge_img: Vec<Option<String>> = vec![None; domain.num_edges()];
    for (a, b) in &json.edges {
        let e = domain.edge_index(a).ok_or_else(|| Error::UnknownEdge(a.clone()))?;
        if edge_img[e].replace(b.clone()).is_some() {
            return Err(Error::DuplicateId { kind: "edge mapping", id: a.clone() });
        }
    }
    if let Some(e) = edge_img.iter().position(Option::is_none) {
        return Err(Error::NotHomomorphism(format!("edge `{}` has no image", domain.edge_id(e))));
    }
    let codomain = match codomain {
        Some(c) => c,
        None => Arc::new(rebuild_codomain(&domain, &state_img, &edge_img)?),
    };
    let edge_map = edge_img
        .iter()
        .map(|b| {
            let b = b.as_deref().expect("checked above");
            codomain.edge_index(b).ok_or_else(|| Error::UnknownEdge(b.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let hom = GraphHom::from_edge_map(domain.clone(), codomain.clone(), edge_map)?;
    for (s, img) in state_img.iter().enumerate() {
        if let Some(img) = img {
            let declared = codomain.state_index(img).ok_or_else(|| Error::UnknownState(img.clone()))?;
            if declared != hom.map_state(s) {
                return Err(Error::NotHomomorphism(format!(
                    "state `{}` is declared to map to `{img}` but its edges say `{}`",
                    domain.state_id(s),
                    codomain.state_id(hom.map_state(s))
                )));
            }
        }
    }
    Ok(hom)
}

fn rebuild_codomain(
    domain: &MultiGraph,
    state_img: &[Option<String>],
    edge_img: &[Option<String>],
) -> Result<MultiGraph> {
    let mut states: Vec<String> = Vec::new();
    let mut state_ix: HashMap<String, usize> = HashMap::new();
    let mut intern = |id: &str, states: &mut Vec<String>| {
        *state_ix.entry(id.to_string()).or_insert_with(|| {
            states.push(id.to_string());
            states.len() - 1
        })
    };
    let derived: Vec<Option<usize>> = state_img.iter().map(|s| s.as_deref().map(|s| intern(s, &mut states))).collect();
    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    let mut seen: HashMap<&str, (usize, usize)> = HashMap::new();
    // Image edges take their endpoints from the declared state images.
    for e in domain.edges() {
        let b = edge_img[e].as_deref().expect("checked");
        let (s, t) = (domain.source(e), domain.target(e));
        let missing = [s, t].into_iter().find(|&x| derived[x].is_none());
        if let Some(x) = missing {
            return Err(Error::NotHomomorphism(format!(
                "state `{}` needs an explicit image when no codomain is given",
                domain.state_id(x)
            )));
        }
        let ends = (derived[s].expect("set"), derived[t].expect("set"));
        match seen.get(b) {
            Some(&prev) if prev != ends => {
                return Err(Error::NotHomomorphism(format!("edge `{b}` would get two different endpoints")))
            }
            Some(_) => {}
            None => {
                seen.insert(b, ends);
                edges.push((b.to_string(), ends.0, ends.1));
            }
        }
    }
    MultiGraph::new(states, edges)
}

pub fn hom_to_json(h: &GraphHom) -> HomJson {
    let (g, k) = (h.domain(), h.codomain());
    HomJson {
        states: g.states().map(|s| (g.state_id(s).to_string(), k.state_id(h.map_state(s)).to_string())).collect(),
        edges: g.edges().map(|e| (g.edge_id(e).to_string(), k.edge_id(h.map_edge(e)).to_string())).collect(),
    }
}

pub fn hom_to_text(h: &GraphHom) -> String {
    let json = hom_to_json(h);
    let mut out = String::new();
    for (a, b) in &json.states {
        out.push_str(&format!("state {a} -> {b}\n"));
    }
    for (a, b) in &json.edges {
        out.push_str(&format!("edge {a} -> {b}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn two_state() -> Arc<MultiGraph> {
        Arc::new(parse_graph("states 1 2\nedges\ne1 1 1\ne2 1 2\ne3 2 1\ne4 2 2\n", false).unwrap())
    }

    #[test]
    fn parses_with_rebuilt_codomain() {
        let text = "state 1 -> m\nstate 2 -> m\nedge e1 -> a\nedge e2 -> b\nedge e3 -> a\nedge e4 -> b\n";
        let h = parse_hom(text, two_state(), None).unwrap();
        assert_eq!((h.codomain().num_states(), h.codomain().num_edges()), (1, 2));
        assert_eq!(h.edge_map(), &[0, 1, 0, 1]);
    }

    #[test]
    fn round_trips_text_and_json() {
        let text = "state 1 -> m\nstate 2 -> m\nedge e1 -> a\nedge e2 -> b\nedge e3 -> a\nedge e4 -> b\n";
        let h = parse_hom(text, two_state(), None).unwrap();
        assert_eq!(hom_to_text(&h), text);
        let again = parse_hom(&hom_to_text(&h), two_state(), Some(h.codomain().clone())).unwrap();
        assert_eq!(again, h);
        let json = serde_json::to_string(&hom_to_json(&h)).unwrap();
        assert_eq!(parse_hom(&json, two_state(), Some(h.codomain().clone())).unwrap(), h);
    }

    #[test]
    fn rejects_bad_lines_and_inconsistent_maps() {
        assert!(matches!(parse_hom("state 1 => m\n", two_state(), None), Err(Error::Parse { line: 1, .. })));
        let text = "state 1 -> m\nstate 2 -> n\nedge e1 -> a\nedge e2 -> a\nedge e3 -> b\nedge e4 -> b\n";
        assert!(matches!(parse_hom(text, two_state(), None), Err(Error::NotHomomorphism(_))));
        let missing = "state 1 -> m\nstate 2 -> m\nedge e1 -> a\n";
        assert!(parse_hom(missing, two_state(), None).is_err());
    }
}
