use std::sync::Arc;

use super::classify;
use crate::error::{Error, Result};
use crate::graph::{induced_principal_subgraph, MultiGraph, StateIx};
use crate::hom::{compose, minimal_factor, GraphHom, RightResolver};
use crate::stability::{fiber_product, FiberProduct};

/// The principal subgraph `C` of `P = H1 ×_{Ψ1,Ψ2} H2` with the lifts
/// `Δ_i: G → C` and the restricted projections `C → H_i`.
#[derive(Debug, Clone)]
pub struct UniversalWitness {
    pub product: FiberProduct,
    pub c: Arc<MultiGraph>,
    /// `T(I')` as a state of `C`.
    pub t_map: Vec<StateIx>,
    pub delta1: RightResolver,
    pub delta2: RightResolver,
    pub proj1: RightResolver,
    pub proj2: RightResolver,
}

/// Builds `C` and `Δ_i` for right-resolvers `Φ_i: G → H_i` and
/// `Ψ_i: H_i → M`, with `H_i` bunchy and `M = M(H_i)`, and checks every
/// claimed property.
pub fn verify_universal_property(
    phi1: &RightResolver,
    phi2: &RightResolver,
    psi1: &RightResolver,
    psi2: &RightResolver,
) -> Result<UniversalWitness> {
    let g = phi1.domain();
    if phi2.domain() != g {
        return Err(Error::Precondition("Φ1 and Φ2 have different domains".into()));
    }
    if psi1.domain() != phi1.codomain() || psi2.domain() != phi2.codomain() {
        return Err(Error::Precondition("Ψ_i must start where Φ_i ends".into()));
    }
    let m = psi1.codomain();
    if psi2.codomain() != m {
        return Err(Error::Precondition("Ψ1 and Ψ2 have different codomains".into()));
    }
    if minimal_factor(m)?.graph.num_states() != m.num_states() {
        return Err(Error::Precondition("common codomain is not a minimal factor".into()));
    }
    for (k, h) in [(1, psi1.domain()), (2, psi2.domain())] {
        if !classify(h)?.bunchy {
            return Err(Error::Precondition(format!("H{k} is not bunchy")));
        }
    }
    let fp = fiber_product(psi1, psi2)?;
    let h2n = psi2.domain().num_states();
    let mut pair_index = vec![usize::MAX; psi1.domain().num_states() * h2n];
    for (p, &(a, b)) in fp.pairs.iter().enumerate() {
        pair_index[a * h2n + b] = p;
    }
    // T(I') = (∂Φ1(I'), ∂Φ2(I')) as a product state.
    let t_product: Vec<StateIx> = g
        .states()
        .map(|s| {
            let p = pair_index[phi1.map_state(s) * h2n + phi2.map_state(s)];
            if p == usize::MAX {
                Err(Error::Precondition(format!("Ψ1∘Φ1 and Ψ2∘Φ2 disagree at `{}`", g.state_id(s))))
            } else {
                Ok(p)
            }
        })
        .collect::<Result<_>>()?;
    let mut c_states = t_product.clone();
    c_states.sort_unstable();
    c_states.dedup();
    let c = Arc::new(induced_principal_subgraph(&fp.product, &c_states).map_err(|e| {
        Error::Verification(format!("T(V(G)) does not span a principal subgraph: {e}"))
    })?);
    let to_c = |p: StateIx| c.state_index(fp.product.state_id(p)).expect("state of C");
    let t_map: Vec<StateIx> = t_product.iter().map(|&p| to_c(p)).collect();

    // Δ_i(e) is the edge of P at T(s(e)) whose i-th coordinate is Φ_i(e).
    // Ψ_i resolves, so this is the lift of Ψ_i(Φ_i(e)) to P.
    let lift = |phi: &RightResolver, psi: &RightResolver| -> Result<RightResolver> {
        let edge_map = g
            .edges()
            .map(|e| {
                let a = psi.map_edge(phi.map_edge(e));
                let pe = fp.to_base.lift_edge(t_product[g.source(e)], a).expect("same base state");
                if fp.product.target(pe) != t_product[g.target(e)] {
                    return Err(Error::Verification(format!("lift of `{}` misses T(t(e))", g.edge_id(e))));
                }
                c.edge_index(fp.product.edge_id(pe)).ok_or_else(|| Error::Verification("edge outside C".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        RightResolver::new(GraphHom::new(g.clone(), c.clone(), edge_map, t_map.clone())?)
    };
    let delta1 = lift(phi1, psi1)?;
    let delta2 = lift(phi2, psi2)?;
    let proj1 = fp.proj1.restrict_to_states(&c_states)?;
    let proj2 = fp.proj2.restrict_to_states(&c_states)?;
    if compose(&proj1, &delta1)? != *phi1.hom() || compose(&proj2, &delta2)? != *phi2.hom() {
        return Err(Error::Verification("Φ_i differs from the projection of Δ_i".into()));
    }
    if !classify(&c)?.bunchy {
        return Err(Error::Verification("C is not bunchy".into()));
    }
    Ok(UniversalWitness { product: fp, c, t_map, delta1, delta2, proj1, proj2 })
}
