mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrgraph::corpus;
use rrgraph::graph::{graph_isomorphic, higher_edge_graph, is_strongly_connected, parse_graph, period, to_json, to_text};
use rrgraph::MultiGraph;

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn adjacency(g: &MultiGraph) -> Vec<Vec<u64>> {
    g.count_matrix().into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// gcd of the lengths `L ≤ n` that carry a closed walk. Every cycle is at
/// most `n` long and every closed walk splits into cycles, so this is the
/// gcd of all cycle lengths.
fn period_by_closed_walks(g: &MultiGraph) -> usize {
    let a = adjacency(g);
    let mut power = a.clone();
    let mut p = 0;
    for len in 1..=g.num_states() {
        if (0..g.num_states()).any(|i| power[i][i] > 0) {
            p = gcd(p, len);
        }
        power = mat_mul(&power, &a);
    }
    p
}

#[test]
fn period_matches_closed_walks() {
    for cg in general_corpus() {
        assert_eq!(period(&cg.graph).unwrap(), period_by_closed_walks(&cg.graph), "{}", cg.name);
    }
}

#[test]
fn higher_edge_graph_counts_paths() {
    for cg in general_corpus().into_iter().filter(|c| c.graph.num_states() <= 4) {
        let g = &cg.graph;
        let a = adjacency(g);
        let mut power = a.clone();
        for k in 2..=3 {
            let states: u64 = power.iter().flatten().sum();
            power = mat_mul(&power, &a);
            let edges: u64 = power.iter().flatten().sum();
            let h = higher_edge_graph(g, k).unwrap();
            assert_eq!(h.num_states() as u64, states, "{} k={k}", cg.name);
            assert_eq!(h.num_edges() as u64, edges, "{} k={k}", cg.name);
            assert!(is_strongly_connected(&h), "{} k={k}", cg.name);
            assert_eq!(period(&h).unwrap(), period(g).unwrap());
        }
    }
}

#[test]
fn higher_edge_graph_keeps_disconnection() {
    let g = MultiGraph::from_counts(&[vec![1, 1], vec![0, 1]]).unwrap();
    assert!(!is_strongly_connected(&higher_edge_graph(&g, 2).unwrap()));
    assert!(higher_edge_graph(&g, 0).is_err());
}

#[test]
fn canonical_codes_separate_classes() {
    let graphs = corpus::all_graphs(3, 2);
    for (i, a) in graphs.iter().enumerate() {
        for b in &graphs[i + 1..] {
            let (ga, gb) = (MultiGraph::from_counts(a).unwrap(), MultiGraph::from_counts(b).unwrap());
            assert!(graph_isomorphic(&ga, &gb).unwrap().is_none());
        }
    }
}

#[test]
fn text_and_json_round_trip() {
    for cg in corpus::named() {
        let g = &*cg.graph;
        assert_eq!(&parse_graph(&to_text(g), false).unwrap(), g);
        let json = serde_json::to_string(&to_json(g)).unwrap();
        assert_eq!(&parse_graph(&json, false).unwrap(), g);
    }
}

#[test]
fn sinks_rejected_unless_allowed() {
    let text = "states a b\nedges\ne a b\n";
    assert!(parse_graph(text, false).is_err());
    assert_eq!(parse_graph(text, true).unwrap().sinks(), vec![1]);
}

proptest! {
    #[test]
    fn random_graphs_are_strongly_connected(seed in any::<u64>(), n in 1usize..7) {
        let g = corpus::random_strongly_connected(n, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(is_strongly_connected(&g));
        prop_assert_eq!(period(&g).unwrap(), period_by_closed_walks(&g));
        prop_assert_eq!(parse_graph(&to_text(&g), false).unwrap(), g);
    }
}
