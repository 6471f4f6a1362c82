mod common;

use std::sync::Arc;

use common::*;
use rrgraph::bunchy::classify;
use rrgraph::corpus::{self, CorpusGraph};
use rrgraph::graph::graph_isomorphic;
use rrgraph::hom::{minimal_factor, quotient, resolver_to_minimal};
use rrgraph::pipeline::{
    decide_og_iso_bfc, decide_og_iso_bunchy, find_nontrivial_stability, in_amalgamation_stable_pair, road_colour,
    synchronize_to_cycle_of_bunches, tree_analysis, SearchConfig, StabilitySource, TotalOrderColouring,
};
use rrgraph::stability::stability_relation;
use rrgraph::{Error, MultiGraph};

fn cob_graphs(n: usize) -> Vec<CorpusGraph> {
    let mut out = Vec::new();
    for d in 1..=3 {
        out.extend(corpus::constant_degree(n, d).iter().map(|c| CorpusGraph::from_counts("const", c)));
    }
    out.extend(corpus::cycle_fibered(n, 3).iter().map(|c| CorpusGraph::from_counts("fibered", c)));
    out
}

#[test]
fn tallest_trees_agree_with_oracle() {
    for cg in (2..=4).flat_map(cob_graphs) {
        let g = &cg.graph;
        let mf = minimal_factor(g).unwrap();
        for zero in zero_edge_choices(g) {
            let c = TotalOrderColouring::from_zero_edges(g, &mf.graph, &mf.sigma, &zero).unwrap();
            let t = tree_analysis(&c).unwrap();
            assert_eq!(t.has_unique_tallest_tree(), unique_tallest_tree_oracle(g, &mf.sigma, &zero));
            if t.has_unique_tallest_tree() && !classify(g).unwrap().cycle_of_bunches {
                assert!(!stability_oracle(c.resolver()).is_diagonal());
            }
        }
    }
}

#[test]
fn search_results_are_verified() {
    let config = SearchConfig::default();
    for cg in (2..=4).flat_map(cob_graphs) {
        let g = &cg.graph;
        if classify(g).unwrap().cycle_of_bunches {
            assert!(matches!(find_nontrivial_stability(g, &config), Err(Error::Precondition(_))));
            continue;
        }
        let r = find_nontrivial_stability(g, &config).unwrap();
        assert!(same_partition(&r.relation.partition, &stability_oracle(&r.resolver)));
        assert!(!r.relation.is_trivial());
        if let StabilitySource::InAmalgamation { pair: (a, b) } = r.source {
            assert!(r.relation.stable(a, b));
        }
    }
}

#[test]
fn in_amalgamation_only_merges_twins() {
    for cg in general_corpus().into_iter().filter(|c| c.graph.num_states() <= 4) {
        let (_, phi) = resolver_to_minimal(&cg.graph).unwrap();
        if let Some((psi, (a, b))) = in_amalgamation_stable_pair(&phi).unwrap() {
            let g = &cg.graph;
            assert_eq!(phi.map_state(a), phi.map_state(b));
            for t in g.states() {
                assert_eq!(g.edge_count(a, t), g.edge_count(b, t), "{}", cg.name);
            }
            assert!(stability_relation(&psi).unwrap().stable(a, b));
        }
    }
}

#[test]
fn road_colouring_words_synchronize() {
    let config = SearchConfig::default();
    for cg in corpus::constant_degree(4, 2).into_iter().map(|c| CorpusGraph::from_counts("c", &c)) {
        let r = road_colour(&cg.graph, &config).unwrap();
        if r.period != 1 {
            continue;
        }
        let phi = r.colouring.resolver();
        let ends: std::collections::BTreeSet<usize> =
            cg.graph.states().map(|s| phi.transition(s, &r.word).unwrap()).collect();
        assert_eq!(ends.len(), 1);
    }
}

#[test]
fn chains_compose_to_the_synchronizer() {
    let config = SearchConfig::default();
    for cg in cob_graphs(4) {
        let s = synchronize_to_cycle_of_bunches(&cg.graph, &config).unwrap();
        assert_eq!(s.chain.compose().unwrap(), s.synchronizer);
        assert_eq!(s.chain.len(), s.steps.len());
        assert!(classify(&s.target).unwrap().cycle_of_bunches);
    }
}

fn og_oracle(g: &Arc<MultiGraph>) -> Arc<MultiGraph> {
    let (_, phi) = resolver_to_minimal(g).unwrap();
    quotient(&stability_oracle(&phi), &phi).unwrap().graph
}

#[test]
fn bfc_decider_on_cycle_fibered_graphs() {
    // Conditional answers, checked against the oracle on graphs where O(G)
    // is known to be bunchy.
    let graphs: Vec<CorpusGraph> = (2..=3).flat_map(cob_graphs).collect();
    for (i, a) in graphs.iter().enumerate().step_by(7) {
        for b in graphs[i..].iter().step_by(5) {
            let d = decide_og_iso_bfc(&a.graph, &b.graph).unwrap();
            assert!(d.conditional);
            let oa = synchronize_to_cycle_of_bunches(&a.graph, &SearchConfig::default()).unwrap().target;
            let ob = synchronize_to_cycle_of_bunches(&b.graph, &SearchConfig::default()).unwrap().target;
            assert_eq!(d.isomorphic, graph_isomorphic(&oa, &ob).unwrap().is_some());
        }
    }
}

#[test]
fn bunchy_decider_spot_checks() {
    let named = corpus::named();
    let bunchy: Vec<&CorpusGraph> = named.iter().filter(|c| classify(&c.graph).unwrap().bunchy).collect();
    for a in &bunchy {
        for b in &bunchy {
            let d = decide_og_iso_bunchy(&a.graph, &b.graph).unwrap();
            let expected = graph_isomorphic(&og_oracle(&a.graph), &og_oracle(&b.graph)).unwrap().is_some();
            assert_eq!(d.isomorphic, expected, "{} vs {}", a.name, b.name);
        }
    }
}
