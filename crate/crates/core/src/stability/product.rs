use std::sync::Arc;

use super::is_synchronizing;
use crate::error::{Error, Result};
use crate::graph::{principal_components, MultiGraph, StateIx};
use crate::hom::{compose, GraphHom, RightResolver};

/// `P = G1 ×_{Φ1,Φ2} G2` with its projections and the map to the base.
///
/// States are `(I1,I2)` with equal images, edges `(e1,e2)` with equal images.
#[derive(Debug, Clone)]
pub struct FiberProduct {
    pub product: Arc<MultiGraph>,
    pub pairs: Vec<(StateIx, StateIx)>,
    pub proj1: RightResolver,
    pub proj2: RightResolver,
    pub to_base: RightResolver,
}

pub fn fiber_product(phi1: &RightResolver, phi2: &RightResolver) -> Result<FiberProduct> {
    let h = phi1.codomain();
    if !Arc::ptr_eq(h, phi2.codomain()) && h != phi2.codomain() {
        return Err(Error::Mismatch("fiber product needs a common codomain".into()));
    }
    let (g1, g2) = (phi1.domain(), phi2.domain());
    let f2 = phi2.fibers();
    let mut index = vec![usize::MAX; g1.num_states() * g2.num_states()];
    let mut pairs = Vec::new();
    for a in g1.states() {
        for &b in &f2.sets[phi1.map_state(a)] {
            index[a * g2.num_states() + b] = pairs.len();
            pairs.push((a, b));
        }
    }
    let states = pairs.iter().map(|&(a, b)| format!("({},{})", g1.state_id(a), g2.state_id(b))).collect();
    let mut edges = Vec::new();
    let (mut m1, mut m2, mut mb) = (Vec::new(), Vec::new(), Vec::new());
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for &c in h.out_edges(phi1.map_state(a)) {
            let e1 = phi1.lift_edge(a, c).expect("fiber");
            let e2 = phi2.lift_edge(b, c).expect("fiber");
            let q = index[g1.target(e1) * g2.num_states() + g2.target(e2)];
            edges.push((format!("({},{})", g1.edge_id(e1), g2.edge_id(e2)), p, q));
            m1.push(e1);
            m2.push(e2);
            mb.push(c);
        }
    }
    let product = Arc::new(MultiGraph::new(states, edges)?);
    let s1 = pairs.iter().map(|&(a, _)| a).collect();
    let s2 = pairs.iter().map(|&(_, b)| b).collect();
    let sb = pairs.iter().map(|&(a, _)| phi1.map_state(a)).collect();
    let proj1 = RightResolver::new(GraphHom::new(product.clone(), g1.clone(), m1, s1)?)?;
    let proj2 = RightResolver::new(GraphHom::new(product.clone(), g2.clone(), m2, s2)?)?;
    let to_base = RightResolver::new(GraphHom::new(product.clone(), h.clone(), mb, sb)?)?;
    debug_assert_eq!(compose(phi1, &proj1).ok().as_ref(), Some(to_base.hom()));
    Ok(FiberProduct { product, pairs, proj1, proj2, to_base })
}

/// A common synchronizing extension `C` of `G1` and `G2`.
#[derive(Debug, Clone)]
pub struct SyncExtension {
    pub graph: Arc<MultiGraph>,
    pub to_g1: RightResolver,
    pub to_g2: RightResolver,
}

/// Restricts the fiber product projections to a principal component on
/// which both are onto and synchronizing.
pub fn common_sync_extension(psi1: &RightResolver, psi2: &RightResolver) -> Result<SyncExtension> {
    if !is_synchronizing(psi1)? || !is_synchronizing(psi2)? {
        return Err(Error::Precondition("both maps must be synchronizing".into()));
    }
    let fp = fiber_product(psi1, psi2)?;
    let mut surjective = 0;
    for comp in principal_components(&fp.product).iter() {
        let (Ok(to_g1), Ok(to_g2)) = (fp.proj1.restrict_to_states(comp), fp.proj2.restrict_to_states(comp)) else {
            continue;
        };
        surjective += 1;
        if is_synchronizing(&to_g1)? && is_synchronizing(&to_g2)? {
            return Ok(SyncExtension { graph: to_g1.domain().clone(), to_g1, to_g2 });
        }
    }
    if surjective == 0 {
        Err(Error::Precondition("no principal component of the fiber product projects onto both graphs".into()))
    } else {
        Err(Error::Verification(format!("{surjective} onto principal components, none synchronizing on both sides")))
    }
}
