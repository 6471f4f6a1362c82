use std::collections::BTreeMap;

use super::{EdgeIx, MultiGraph, StateIx};
use crate::error::{Error, Result};

/// Default state-count guard for [`graph_isomorphic`].
pub const DEFAULT_ISO_LIMIT: usize = 12;

/// A witness isomorphism: `state_map[i]` and `edge_map[e]` are indices in the
/// second graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub state_map: Vec<StateIx>,
    pub edge_map: Vec<EdgeIx>,
}

pub fn graph_isomorphic(g: &MultiGraph, h: &MultiGraph) -> Result<Option<Isomorphism>> {
    graph_isomorphic_with(g, h, DEFAULT_ISO_LIMIT)
}

/// Backtracking isomorphism search over colour-refined candidate maps.
///
/// Exponential in the worst case; `limit` bounds the number of states.
pub fn graph_isomorphic_with(g: &MultiGraph, h: &MultiGraph, limit: usize) -> Result<Option<Isomorphism>> {
    let n = g.num_states();
    if n > limit || h.num_states() > limit {
        return Err(Error::SizeGuard { limit, actual: n.max(h.num_states()) });
    }
    if n != h.num_states() || g.num_edges() != h.num_edges() {
        return Ok(None);
    }
    let (cg, ch) = joint_refinement(g, h);
    let mut hist_g = cg.clone();
    let mut hist_h = ch.clone();
    hist_g.sort_unstable();
    hist_h.sort_unstable();
    if hist_g != hist_h {
        return Ok(None);
    }
    let mg = g.count_matrix();
    let mh = h.count_matrix();

    // Most constrained states first.
    let mut class_size = BTreeMap::new();
    for &c in &cg {
        *class_size.entry(c).or_insert(0usize) += 1;
    }
    let mut order: Vec<StateIx> = (0..n).collect();
    order.sort_by_key(|&s| (class_size[&cg[s]], cg[s], s));

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !extend(0, &order, &cg, &ch, &mg, &mh, &mut map, &mut used) {
        return Ok(None);
    }

    let mut edge_map = vec![usize::MAX; g.num_edges()];
    for i in 0..n {
        for j in 0..n {
            let ge = g.out_edges(i).iter().filter(|&&e| g.target(e) == j);
            let mut he = h.out_edges(map[i]).iter().filter(|&&e| h.target(e) == map[j]);
            for &e in ge {
                edge_map[e] = *he.next().expect("edge counts agree");
            }
        }
    }
    let iso = Isomorphism { state_map: map, edge_map };
    verify(g, h, &iso)?;
    Ok(Some(iso))
}

#[allow(clippy::too_many_arguments)]
fn extend(
    depth: usize,
    order: &[StateIx],
    cg: &[usize],
    ch: &[usize],
    mg: &[Vec<usize>],
    mh: &[Vec<usize>],
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&i) = order.get(depth) else { return true };
    for cand in 0..ch.len() {
        if used[cand] || ch[cand] != cg[i] {
            continue;
        }
        let consistent = mg[i][i] == mh[cand][cand]
            && order[..depth].iter().all(|&j| mg[i][j] == mh[cand][map[j]] && mg[j][i] == mh[map[j]][cand]);
        if !consistent {
            continue;
        }
        map[i] = cand;
        used[cand] = true;
        if extend(depth + 1, order, cg, ch, mg, mh, map, used) {
            return true;
        }
        used[cand] = false;
        map[i] = usize::MAX;
    }
    false
}

/// Colour refinement run on both graphs with a shared colour dictionary.
fn joint_refinement(g: &MultiGraph, h: &MultiGraph) -> (Vec<usize>, Vec<usize>) {
    let init = |x: &MultiGraph| -> Vec<(usize, usize, usize)> {
        let indeg = x.in_degrees();
        x.states().map(|s| (x.out_degree(s), indeg[s], x.edge_count(s, s))).collect()
    };
    type Signature = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);
    let (ig, ih) = (init(g), init(h));
    let dict: BTreeMap<_, usize> = ig.iter().chain(ih.iter()).map(|k| (*k, 0)).collect();
    let dict: BTreeMap<_, usize> = dict.into_keys().enumerate().map(|(i, k)| (k, i)).collect();
    let mut cg: Vec<usize> = ig.iter().map(|k| dict[k]).collect();
    let mut ch: Vec<usize> = ih.iter().map(|k| dict[k]).collect();
    let mut count = dict.len();
    loop {
        let sig = |x: &MultiGraph, c: &[usize]| -> Vec<Signature> {
            let mut outs = vec![BTreeMap::new(); x.num_states()];
            let mut ins = vec![BTreeMap::new(); x.num_states()];
            for e in x.edges() {
                let (s, t) = (x.source(e), x.target(e));
                *outs[s].entry(c[t]).or_insert(0usize) += 1;
                *ins[t].entry(c[s]).or_insert(0usize) += 1;
            }
            x.states()
                .map(|s| {
                    (c[s], outs[s].iter().map(|(a, b)| (*a, *b)).collect(), ins[s].iter().map(|(a, b)| (*a, *b)).collect())
                })
                .collect()
        };
        let (sg, sh) = (sig(g, &cg), sig(h, &ch));
        let keys: BTreeMap<_, usize> = sg.iter().chain(sh.iter()).map(|k| (k.clone(), 0)).collect();
        let keys: BTreeMap<_, usize> = keys.into_keys().enumerate().map(|(i, k)| (k, i)).collect();
        cg = sg.iter().map(|k| keys[k]).collect();
        ch = sh.iter().map(|k| keys[k]).collect();
        if keys.len() == count {
            return (cg, ch);
        }
        count = keys.len();
    }
}

fn verify(g: &MultiGraph, h: &MultiGraph, iso: &Isomorphism) -> Result<()> {
    let mut hit = vec![false; h.num_edges()];
    for e in g.edges() {
        let f = iso.edge_map[e];
        if f == usize::MAX || hit[f] {
            return Err(Error::Verification(format!("edge map is not a bijection at `{}`", g.edge_id(e))));
        }
        hit[f] = true;
        if h.source(f) != iso.state_map[g.source(e)] || h.target(f) != iso.state_map[g.target(e)] {
            return Err(Error::Verification(format!("edge `{}` is not mapped consistently", g.edge_id(e))));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeled_cycle() {
        let c = MultiGraph::from_ids(&["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "a")]).unwrap();
        let d = MultiGraph::from_ids(&["p", "q", "r"], &[("u", "q", "p"), ("v", "r", "q"), ("w", "p", "r")]).unwrap();
        let iso = graph_isomorphic(&c, &d).unwrap().expect("isomorphic");
        assert_eq!(iso.state_map.len(), 3);
    }

    #[test]
    fn different_degrees_are_not_isomorphic() {
        let m2 = MultiGraph::from_counts(&[vec![2]]).unwrap();
        let m3 = MultiGraph::from_counts(&[vec![3]]).unwrap();
        assert!(graph_isomorphic(&m2, &m3).unwrap().is_none());
    }

    #[test]
    fn rotated_cycle_of_bunches() {
        let a = MultiGraph::from_counts(&[vec![0, 2], vec![3, 0]]).unwrap();
        let b = MultiGraph::from_counts(&[vec![0, 3], vec![2, 0]]).unwrap();
        let iso = graph_isomorphic(&a, &b).unwrap().expect("rotation");
        assert_eq!(iso.state_map, vec![1, 0]);
    }

    #[test]
    fn size_guard() {
        let big = MultiGraph::from_counts(&vec![vec![1; 13]; 13]).unwrap();
        assert!(matches!(graph_isomorphic(&big, &big), Err(Error::SizeGuard { .. })));
        assert!(graph_isomorphic_with(&big, &big, 13).unwrap().is_some());
    }
}
