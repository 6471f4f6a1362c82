//! Test and benchmark graphs: named examples, exhaustive enumeration up to
//! isomorphism, and seeded random strongly connected graphs.
//!
//! Graphs are handled as count matrices here; [`MultiGraph::from_counts`]
//! turns them into graphs with states `0..n` and edges `e0, e1, ...`.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;

use crate::graph::{is_strongly_connected, MultiGraph};

pub type Counts = Vec<Vec<usize>>;

/// A corpus entry with a stable name.
#[derive(Debug, Clone)]
pub struct CorpusGraph {
    pub name: String,
    pub graph: Arc<MultiGraph>,
}

impl CorpusGraph {
    pub fn from_counts(name: impl Into<String>, counts: &[Vec<usize>]) -> Self {
        let graph = Arc::new(MultiGraph::from_counts(counts).expect("corpus counts are valid"));
        Self { name: name.into(), graph }
    }
}

/// Two states, every pair joined by one edge.
pub fn g_merge() -> Counts {
    vec![vec![1, 1], vec![1, 1]]
}

/// One state branching to two states that each return twice.
pub fn g_ab() -> Counts {
    vec![vec![0, 1, 1], vec![2, 0, 0], vec![2, 0, 0]]
}

/// One state with `d` loops.
pub fn m_d(d: usize) -> Counts {
    vec![vec![d]]
}

/// The simple cycle on `n` states.
pub fn cycle(n: usize) -> Counts {
    (0..n)
        .map(|i| {
            let mut row = vec![0; n];
            row[(i + 1) % n] = 1;
            row
        })
        .collect()
}

/// Černý's automaton on `n` states: `a` rotates, `b` fixes every state but
/// 0, which it sends to 1.
pub fn cerny(n: usize) -> Counts {
    assert!(n >= 2, "cerny needs at least two states");
    (0..n)
        .map(|i| {
            let mut row = vec![0; n];
            row[(i + 1) % n] += 1;
            row[if i == 0 { 1 } else { i }] += 1;
            row
        })
        .collect()
}

pub fn named() -> Vec<CorpusGraph> {
    let mut out = vec![
        CorpusGraph::from_counts("G_merge", &g_merge()),
        CorpusGraph::from_counts("G_ab", &g_ab()),
        CorpusGraph::from_counts("O22", &[vec![0, 2], vec![2, 0]]),
        CorpusGraph::from_counts("M2", &m_d(2)),
        CorpusGraph::from_counts("M3", &m_d(3)),
        CorpusGraph::from_counts("C2", &cycle(2)),
        CorpusGraph::from_counts("C3", &cycle(3)),
        CorpusGraph::from_counts("C23", &[vec![0, 2], vec![3, 0]]),
    ];
    for n in 4..=6 {
        out.push(CorpusGraph::from_counts(format!("Cerny{n}"), &cerny(n)));
    }
    out
}

/// Per-state invariant used to order states before comparing codes.
fn invariants(c: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let n = c.len();
    (0..n).map(|i| (c[i][i], c[i].iter().sum(), (0..n).map(|j| c[j][i]).sum())).collect()
}

/// Calls `f` with every permutation (new position → old state) that keeps
/// `order` sorted by key.
fn for_each_block_permutation(order: &[usize], keys: &[(usize, usize, usize)], f: &mut dyn FnMut(&[usize])) {
    fn go(
        k: usize,
        order: &[usize],
        keys: &[(usize, usize, usize)],
        used: &mut [bool],
        perm: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if k == order.len() {
            f(perm);
            return;
        }
        let want = keys[order[k]];
        for &s in order {
            if !used[s] && keys[s] == want {
                used[s] = true;
                perm.push(s);
                go(k + 1, order, keys, used, perm, f);
                perm.pop();
                used[s] = false;
            }
        }
    }
    let mut used = vec![false; order.len()];
    go(0, order, keys, &mut used, &mut Vec::with_capacity(order.len()), f);
}

fn code_under(c: &[Vec<usize>], perm: &[usize]) -> Vec<usize> {
    perm.iter().flat_map(|&i| perm.iter().map(move |&j| c[i][j])).collect()
}

/// The least row-major code over state orders sorted by (loops,
/// out-degree, in-degree). Equal codes iff isomorphic.
pub fn canonical_code(c: &[Vec<usize>]) -> Vec<usize> {
    let keys = invariants(c);
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by_key(|&i| keys[i]);
    let mut best: Option<Vec<usize>> = None;
    for_each_block_permutation(&order, &keys, &mut |perm| {
        let code = code_under(c, perm);
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    });
    best.unwrap_or_default()
}

/// True iff `c` is its own canonical representative.
fn is_canonical(c: &[Vec<usize>]) -> bool {
    let keys = invariants(c);
    if keys.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    let order: Vec<usize> = (0..c.len()).collect();
    let own: Vec<usize> = c.iter().flatten().copied().collect();
    let mut minimal = true;
    for_each_block_permutation(&order, &keys, &mut |perm| {
        if minimal && code_under(c, perm) < own {
            minimal = false;
        }
    });
    minimal
}

/// Count vectors of length `n` summing to `d`.
fn rows_with_sum(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, left: usize, row: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == row.len() {
            row[i] = left;
            out.push(row.clone());
            return;
        }
        for x in (0..=left).rev() {
            row[i] = x;
            go(i + 1, left - x, row, out);
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(0, d, &mut vec![0; n], &mut out);
    }
    out
}

/// Orderly enumeration: rows are drawn from `options(state)`, and partial
/// matrices whose (loops, out-degree) keys are already out of order are
/// pruned.
fn enumerate_canonical(n: usize, options: &[Vec<Vec<usize>>], keep: &mut dyn FnMut(&Counts)) {
    fn go(i: usize, options: &[Vec<Vec<usize>>], c: &mut Counts, keep: &mut dyn FnMut(&Counts)) {
        let n = c.len();
        if i == n {
            if is_canonical(c) {
                keep(c);
            }
            return;
        }
        for row in &options[i] {
            let key = (row[i], row.iter().sum::<usize>());
            if i > 0 && key < (c[i - 1][i - 1], c[i - 1].iter().sum()) {
                continue;
            }
            c[i] = row.clone();
            go(i + 1, options, c, keep);
        }
    }
    let mut c = vec![vec![0; n]; n];
    go(0, options, &mut c, keep);
}

/// Strongly connected graphs on `n` states with every out-degree `d`, one
/// per isomorphism class.
pub fn constant_degree(n: usize, d: usize) -> Vec<Counts> {
    let rows = rows_with_sum(n, d);
    let options = vec![rows; n];
    let mut out = Vec::new();
    enumerate_canonical(n, &options, &mut |c| {
        if strongly_connected(c) {
            out.push(c.clone());
        }
    });
    out
}

/// Strongly connected graphs on `n` states with out-degrees in
/// `1..=max_degree`, one per isomorphism class.
pub fn all_graphs(n: usize, max_degree: usize) -> Vec<Counts> {
    let rows: Vec<Vec<usize>> = (1..=max_degree).flat_map(|d| rows_with_sum(n, d)).collect();
    let options = vec![rows; n];
    let mut out = Vec::new();
    enumerate_canonical(n, &options, &mut |c| {
        if strongly_connected(c) {
            out.push(c.clone());
        }
    });
    out
}

/// Strongly connected graphs on `n` states whose minimal factor is a cycle
/// of bunches with at least two distinct degrees, one per isomorphism
/// class. Together with [`constant_degree`] this covers every graph whose
/// minimal factor is a cycle of bunches.
///
/// Such a graph splits into layers `L_0, …, L_{p-1}` with every edge from
/// `L_i` landing in `L_{i+1}` and a common out-degree per layer.
pub fn cycle_fibered(n: usize, max_degree: usize) -> Vec<Counts> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in 2..=n {
        for sizes in compositions(n, p) {
            let starts: Vec<usize> = sizes.iter().scan(0, |acc, &s| Some(std::mem::replace(acc, *acc + s))).collect();
            for degrees in tuples(p, max_degree) {
                if degrees.iter().all(|&d| d == degrees[0]) {
                    continue;
                }
                let options: Vec<Vec<Vec<usize>>> = (0..n)
                    .map(|s| {
                        let layer = starts.iter().rposition(|&st| st <= s).expect("layer");
                        let next = (layer + 1) % p;
                        rows_with_sum(sizes[next], degrees[layer])
                            .into_iter()
                            .map(|part| {
                                let mut row = vec![0; n];
                                row[starts[next]..starts[next] + sizes[next]].copy_from_slice(&part);
                                row
                            })
                            .collect()
                    })
                    .collect();
                product(&options, &mut |c| {
                    if strongly_connected(c) && seen.insert(canonical_code(c)) {
                        out.push(c.clone());
                    }
                });
            }
        }
    }
    out
}

fn compositions(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 1 {
        return vec![vec![n]];
    }
    (1..n)
        .flat_map(|first| {
            compositions(n - first, p - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .filter(|c| c.len() == p)
        .collect()
}

fn tuples(p: usize, max: usize) -> Vec<Vec<usize>> {
    (0..p).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                (1..=max).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect()
    })
}

fn product(options: &[Vec<Vec<usize>>], f: &mut dyn FnMut(&Counts)) {
    fn go(i: usize, options: &[Vec<Vec<usize>>], c: &mut Counts, f: &mut dyn FnMut(&Counts)) {
        if i == options.len() {
            f(c);
            return;
        }
        for row in &options[i] {
            c[i] = row.clone();
            go(i + 1, options, c, f);
        }
    }
    let mut c = vec![Vec::new(); options.len()];
    go(0, options, &mut c, f);
}

fn strongly_connected(c: &[Vec<usize>]) -> bool {
    let n = c.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let edge = if forward { c[i][j] } else { c[j][i] };
                if edge > 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n > 0 && reach(true) && reach(false)
}

/// A uniformly seeded strongly connected graph: each state draws an
/// out-degree in `1..=max_degree` and uniform targets, retried until
/// strongly connected.
pub fn random_strongly_connected<R: Rng>(n: usize, max_degree: usize, rng: &mut R) -> MultiGraph {
    loop {
        let c: Counts = (0..n)
            .map(|_| {
                let mut row = vec![0; n];
                for _ in 0..rng.gen_range(1..=max_degree) {
                    row[rng.gen_range(0..n)] += 1;
                }
                row
            })
            .collect();
        let g = MultiGraph::from_counts(&c).expect("valid counts");
        if is_strongly_connected(&g) {
            return g;
        }
    }
}
