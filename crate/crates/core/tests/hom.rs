mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrgraph::corpus;
use rrgraph::hom::{
    check_right_resolver, compose, construct_right_resolver, equitable_quotient, hom_to_text, minimal_factor,
    parallel_equivalent, parse_hom, quotient, resolver_to_minimal, EdgeOrders, GraphHom, Partition, RightResolver,
};

#[test]
fn sigma_stable_under_edge_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for cg in corpus::named() {
        let mf = minimal_factor(&cg.graph).unwrap();
        for _ in 0..100 {
            let orders = EdgeOrders::shuffled(&cg.graph, &mf.graph, &mut rng);
            let phi = construct_right_resolver(&cg.graph, &mf, Some(&orders)).unwrap();
            assert_eq!(phi.state_map(), mf.sigma.as_slice(), "{}", cg.name);
            assert!(check_right_resolver(phi.hom()).ok);
        }
    }
}

#[test]
fn sigma_is_the_only_state_map() {
    for cg in general_corpus().into_iter().filter(|c| c.graph.num_states() <= 4) {
        let mf = minimal_factor(&cg.graph).unwrap();
        assert_eq!(resolver_state_maps(&cg.graph, &mf.graph), vec![mf.sigma.clone()], "{}", cg.name);
    }
}

#[test]
fn minimal_factor_of_a_factor_is_the_same() {
    for cg in general_corpus().into_iter().filter(|c| c.graph.num_states() <= 4) {
        let m = minimal_factor(&cg.graph).unwrap().graph;
        for p in out_equitable_partitions(&cg.graph) {
            let h = equitable_quotient(&cg.graph, &p).unwrap().codomain().clone();
            assert_eq!(minimal_factor(&h).unwrap().graph, m, "{}", cg.name);
        }
    }
}

/// Rewires `phi` by permuting, at every codomain state, edges with a common
/// target.
fn permute_parallel(phi: &RightResolver, rng: &mut ChaCha8Rng) -> RightResolver {
    let h = phi.codomain();
    let mut image: Vec<usize> = h.edges().collect();
    for i in h.states() {
        for j in h.followers(i) {
            let group: Vec<usize> = h.out_edges(i).iter().copied().filter(|&a| h.target(a) == j).collect();
            let mut shuffled = group.clone();
            shuffled.shuffle(rng);
            for (a, b) in group.into_iter().zip(shuffled) {
                image[a] = b;
            }
        }
    }
    let auto = RightResolver::new(GraphHom::from_edge_map(h.clone(), h.clone(), image).unwrap()).unwrap();
    auto.compose(phi).unwrap()
}

#[test]
fn parallel_permutations_are_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for cg in general_corpus() {
        let (_, phi) = resolver_to_minimal(&cg.graph).unwrap();
        for _ in 0..5 {
            assert!(parallel_equivalent(&phi, &permute_parallel(&phi, &mut rng)), "{}", cg.name);
        }
    }
}

#[test]
fn diagonal_quotient_reproduces_the_graph() {
    for cg in corpus::named() {
        let (_, phi) = resolver_to_minimal(&cg.graph).unwrap();
        let q = quotient(&Partition::diagonal(cg.graph.num_states()), &phi).unwrap();
        assert_eq!(*q.graph, *cg.graph);
        assert_eq!(compose(q.induced.hom(), q.quotient_map.hom()).unwrap(), *phi.hom());
    }
}

#[test]
fn hom_text_round_trip() {
    for cg in corpus::named() {
        let (mf, phi) = resolver_to_minimal(&cg.graph).unwrap();
        let back = parse_hom(&hom_to_text(phi.hom()), cg.graph.clone(), Some(mf.graph.clone())).unwrap();
        assert_eq!(back, *phi.hom());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotients_factor_the_resolver(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Arc::new(corpus::random_strongly_connected(n, 3, &mut rng));
        let (_, phi) = resolver_to_minimal(&g).unwrap();
        let rel = stability_oracle(&phi);
        let q = quotient(&rel, &phi).unwrap();
        prop_assert_eq!(q.induced.compose(&q.quotient_map).unwrap(), phi);
        prop_assert!(check_right_resolver(q.quotient_map.hom()).ok);
    }
}
