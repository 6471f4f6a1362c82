use std::sync::Arc;

use super::RightResolver;

/// Whether `phi1 = τ ∘ phi2 ∘ σ` for permutations σ, τ of parallel edges in
/// the domain and codomain.
///
/// Fix codomain states I, J. For a codomain edge `a ∈ E_IJ`, its column is
/// the vector of targets `I'·a` over the fiber of I. A suitable τ on `E_IJ`
/// exists iff both maps produce the same multiset of columns, and σ can then
/// be read off within each `E_{I'J'}`. So this test is exact, not just
/// sufficient.
pub fn parallel_equivalent(phi1: &RightResolver, phi2: &RightResolver) -> bool {
    let same_graph = |a: &Arc<_>, b: &Arc<_>| Arc::ptr_eq(a, b) || a == b;
    if !same_graph(phi1.domain(), phi2.domain()) || !same_graph(phi1.codomain(), phi2.codomain()) {
        return false;
    }
    if phi1.state_map() != phi2.state_map() {
        return false;
    }
    let h = phi1.codomain();
    let fibers = phi1.fibers();
    for i in h.states() {
        let fiber = &fibers.sets[i];
        for j in h.states() {
            let group: Vec<_> = h.out_edges(i).iter().copied().filter(|&a| h.target(a) == j).collect();
            let columns = |phi: &RightResolver| {
                let mut cols: Vec<Vec<usize>> =
                    group.iter().map(|&a| fiber.iter().map(|&s| phi.step(s, a).expect("fiber")).collect()).collect();
                cols.sort_unstable();
                cols
            };
            if columns(phi1) != columns(phi2) {
                return false;
            }
        }
    }
    true
}
