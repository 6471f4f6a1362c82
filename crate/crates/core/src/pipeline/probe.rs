use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::bunchy::classify;
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, EdgeIx, MultiGraph, StateIx};
use crate::hom::{minimal_factor, GraphHom, RightResolver};
use crate::stability::{stability_relation, StabilityRelation};

/// Right-resolvers with a fixed state map, one per class under pre- and
/// post-composition with parallel-edge permutations.
#[derive(Debug, Clone)]
pub struct ResolverClasses {
    pub resolvers: Vec<RightResolver>,
    /// False when the budget cut the enumeration short.
    pub exhaustive: bool,
}

type Columns = Vec<Vec<StateIx>>;

/// A class is fixed by, for each pair of codomain states `(I, J)`, the
/// multiset of columns `k ↦ (target of the lift of a_k at each I' over I)`
/// with `a_k` ranging over `E_{IJ}(H)`.
pub fn resolver_classes(
    g: &Arc<MultiGraph>,
    h: &Arc<MultiGraph>,
    state_map: &[StateIx],
    budget: u64,
) -> Result<ResolverClasses> {
    if state_map.len() != g.num_states() || state_map.iter().any(|&i| i >= h.num_states()) {
        return Err(Error::Mismatch("state map does not fit the graphs".into()));
    }
    let mut fibers = vec![Vec::new(); h.num_states()];
    for s in g.states() {
        fibers[state_map[s]].push(s);
    }
    if let Some(i) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::Mismatch(format!("state map misses `{}`", h.state_id(i))));
    }
    let mut spent = 0u64;
    let mut exhaustive = true;
    // Per group: the codomain edges, the fiber, and the distinct column multisets.
    let mut groups: Vec<(Vec<EdgeIx>, Vec<StateIx>, Vec<Columns>)> = Vec::new();
    for i in h.states() {
        for j in h.followers(i) {
            let letters: Vec<EdgeIx> = h.out_edges(i).iter().copied().filter(|&a| h.target(a) == j).collect();
            let rows: Vec<Vec<StateIx>> = fibers[i]
                .iter()
                .map(|&s| {
                    let mut t: Vec<StateIx> = g
                        .out_edges(s)
                        .iter()
                        .map(|&e| g.target(e))
                        .filter(|&t| state_map[t] == j)
                        .collect();
                    t.sort_unstable();
                    t
                })
                .collect();
            if let Some(k) = rows.iter().position(|r| r.len() != letters.len()) {
                return Err(Error::Mismatch(format!(
                    "`{}` has {} edges over `{}`, its image has {}",
                    g.state_id(fibers[i][k]),
                    rows[k].len(),
                    h.state_id(j),
                    letters.len()
                )));
            }
            let (classes, complete) = column_multisets(&rows, budget.saturating_sub(spent), &mut spent);
            exhaustive &= complete;
            groups.push((letters, fibers[i].clone(), classes));
        }
    }
    // Edges whose target's image has no codomain edge are caught above, so
    // every edge belongs to some group.
    let mut resolvers = Vec::new();
    let mut pick = vec![0usize; groups.len()];
    if groups.iter().any(|g| g.2.is_empty()) {
        return Ok(ResolverClasses { resolvers, exhaustive: false });
    }
    loop {
        if spent >= budget {
            exhaustive = false;
            break;
        }
        spent += 1;
        let mut pool: Vec<VecDeque<EdgeIx>> = g.states().map(|s| g.out_edges(s).iter().copied().collect()).collect();
        let mut edge_map = vec![usize::MAX; g.num_edges()];
        for (gi, (letters, members, classes)) in groups.iter().enumerate() {
            for (k, &a) in letters.iter().enumerate() {
                let column = &classes[pick[gi]][k];
                for (x, &s) in members.iter().enumerate() {
                    let at = pool[s].iter().position(|&e| g.target(e) == column[x]).expect("row has this target");
                    let e = pool[s].remove(at).expect("in range");
                    edge_map[e] = a;
                }
            }
        }
        resolvers.push(RightResolver::new(GraphHom::new(g.clone(), h.clone(), edge_map, state_map.to_vec())?)?);
        let mut gi = 0;
        while gi < groups.len() {
            pick[gi] += 1;
            if pick[gi] < groups[gi].2.len() {
                break;
            }
            pick[gi] = 0;
            gi += 1;
        }
        if gi == groups.len() {
            break;
        }
    }
    Ok(ResolverClasses { resolvers, exhaustive })
}

/// Distinct sorted column lists over all arrangements of the rows, with the
/// first row held fixed (post-permutations absorb its order).
fn column_multisets(rows: &[Vec<StateIx>], budget: u64, spent: &mut u64) -> (Vec<Vec<Vec<StateIx>>>, bool) {
    let n = rows[0].len();
    let mut seen = BTreeSet::new();
    let mut arrangement: Vec<Vec<StateIx>> = vec![rows[0].clone()];
    let start = *spent;
    let complete = arrange(rows, 1, &mut arrangement, &mut seen, n, &mut || {
        *spent += 1;
        *spent - start <= budget
    });
    (seen.into_iter().collect(), complete)
}

fn arrange(
    rows: &[Vec<StateIx>],
    r: usize,
    current: &mut Vec<Vec<StateIx>>,
    seen: &mut BTreeSet<Vec<Vec<StateIx>>>,
    n: usize,
    tick: &mut dyn FnMut() -> bool,
) -> bool {
    if r == rows.len() {
        if !tick() {
            return false;
        }
        let mut cols: Vec<Vec<StateIx>> = (0..n).map(|k| current.iter().map(|row| row[k]).collect()).collect();
        cols.sort_unstable();
        seen.insert(cols);
        return true;
    }
    let mut perm = rows[r].clone();
    loop {
        current.push(perm.clone());
        let ok = arrange(rows, r + 1, current, seen, n, tick);
        current.pop();
        if !ok {
            return false;
        }
        if !next_permutation(&mut perm) {
            return true;
        }
    }
}

/// Lexicographic successor; false after the last permutation.
fn next_permutation(v: &mut [StateIx]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeVerdict {
    WitnessFound,
    /// The budget ran out before a witness turned up.
    Inconclusive,
    /// Every class has trivial stability: the graph would refute the bunchy
    /// factor conjecture.
    Counterexample,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub classes_examined: usize,
    pub exhaustive: bool,
    pub witness: Option<(RightResolver, StabilityRelation)>,
}

/// Searches `hom_R(G, M(G))` for a resolver with nontrivial stability.
pub fn probe_bunchy_factor_conjecture(g: &Arc<MultiGraph>, budget: u64) -> Result<ProbeReport> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    if classify(g)?.bunchy {
        return Err(Error::Precondition("graph is bunchy".into()));
    }
    let mf = minimal_factor(g)?;
    let classes = resolver_classes(g, &mf.graph, &mf.sigma, budget)?;
    for (k, phi) in classes.resolvers.iter().enumerate() {
        let rel = stability_relation(phi)?;
        if !rel.is_trivial() {
            return Ok(ProbeReport {
                verdict: ProbeVerdict::WitnessFound,
                classes_examined: k + 1,
                exhaustive: classes.exhaustive,
                witness: Some((phi.clone(), rel)),
            });
        }
    }
    let verdict = if classes.exhaustive { ProbeVerdict::Counterexample } else { ProbeVerdict::Inconclusive };
    Ok(ProbeReport { verdict, classes_examined: classes.resolvers.len(), exhaustive: classes.exhaustive, witness: None })
}
