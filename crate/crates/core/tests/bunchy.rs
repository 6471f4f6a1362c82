mod common;

use std::sync::Arc;

use common::*;
use rrgraph::bunchy::{classify, max_bunchy_factor, og_almost_bunchy, stability_of_almost_bunchy};
use rrgraph::graph::{graph_isomorphic, is_strongly_connected};
use rrgraph::hom::{equitable_quotient, minimal_factor, resolver_to_minimal, RightResolver};
use rrgraph::pipeline::resolver_classes;
use rrgraph::stability::{fiber_product, is_synchronizing};
use rrgraph::MultiGraph;

fn small_corpus() -> Vec<rrgraph::corpus::CorpusGraph> {
    general_corpus().into_iter().filter(|c| c.graph.num_states() <= 5).collect()
}

fn factors(g: &Arc<MultiGraph>) -> Vec<Arc<MultiGraph>> {
    out_equitable_partitions(g).iter().map(|p| equitable_quotient(g, p).unwrap().codomain().clone()).collect()
}

#[test]
fn classification_matches_definition() {
    for cg in small_corpus() {
        let c = classify(&cg.graph).unwrap();
        let mf = minimal_factor(&cg.graph).unwrap();
        assert_eq!(c.bunchy, bunchy_by_definition(&cg.graph, &mf.sigma, &mf.graph), "{}", cg.name);
        assert!(!c.bunchy || c.almost_bunchy);
    }
}

#[test]
fn images_of_bunchy_graphs_stay_bunchy() {
    for cg in small_corpus() {
        let c = classify(&cg.graph).unwrap();
        if !c.almost_bunchy {
            continue;
        }
        for h in factors(&cg.graph) {
            let ch = classify(&h).unwrap();
            assert!(ch.almost_bunchy, "{}", cg.name);
            assert!(!c.bunchy || ch.bunchy, "{}", cg.name);
        }
    }
}

#[test]
fn almost_bunchy_not_bunchy_has_nontrivial_stability() {
    let mut seen = 0;
    for cg in small_corpus() {
        let c = classify(&cg.graph).unwrap();
        if !is_strongly_connected(&cg.graph) || !c.almost_bunchy || c.bunchy {
            continue;
        }
        seen += 1;
        assert!(!stability_of_almost_bunchy(&cg.graph).unwrap().is_trivial(), "{}", cg.name);
    }
    assert!(seen > 0);
}

/// Bunchy factors reachable from `g` by some synchronizing resolver.
fn bunchy_sync_factors(g: &Arc<MultiGraph>) -> Vec<Arc<MultiGraph>> {
    out_equitable_partitions(g)
        .iter()
        .filter_map(|p| {
            let h = equitable_quotient(g, p).unwrap().codomain().clone();
            let sync = resolver_classes(g, &h, p.labels(), 1 << 12)
                .unwrap()
                .resolvers
                .iter()
                .any(|r| is_synchronizing(r).unwrap());
            (sync && classify(&h).unwrap().bunchy).then_some(h)
        })
        .collect()
}

#[test]
fn bunchy_synchronizing_factors_share_og() {
    for cg in general_corpus().into_iter().filter(|c| c.graph.num_states() <= 4) {
        let found = bunchy_sync_factors(&cg.graph);
        let ogs: Vec<_> = found.iter().map(|h| og_almost_bunchy(h).unwrap().graph).collect();
        for o in &ogs[1.min(ogs.len())..] {
            assert!(graph_isomorphic(&ogs[0], o).unwrap().is_some(), "{}", cg.name);
        }
    }
}

#[test]
fn fiber_product_of_bunchy_graphs_is_bunchy() {
    let mut products = 0;
    for cg in general_corpus().into_iter().filter(|c| c.graph.num_states() <= 4) {
        let bunchy: Vec<(Arc<MultiGraph>, RightResolver)> = factors(&cg.graph)
            .into_iter()
            .filter(|h| classify(h).unwrap().bunchy)
            .map(|h| {
                let (_, psi) = resolver_to_minimal(&h).unwrap();
                (h, psi)
            })
            .collect();
        for (_, a) in &bunchy {
            for (_, b) in &bunchy {
                products += 1;
                let fp = fiber_product(a, b).unwrap();
                assert!(classify(&fp.product).unwrap().bunchy, "{}", cg.name);
            }
        }
    }
    assert!(products > 0);
}

#[test]
fn bunchy_factor_factors_the_resolver() {
    for cg in small_corpus() {
        let b = max_bunchy_factor(&cg.graph).unwrap();
        let composite = b.to_minimal.compose(&b.quotient_map).unwrap();
        assert_eq!(composite.state_map(), minimal_factor(&cg.graph).unwrap().sigma.as_slice());
        assert!(classify(&b.graph).unwrap().bunchy, "{}", cg.name);
        if classify(&cg.graph).unwrap().bunchy {
            assert_eq!(b.graph.num_states(), cg.graph.num_states());
        }
    }
}
