use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::colouring::{tree_analysis, TotalOrderColouring, TreeAnalysis};
use crate::bunchy::as_cycle_of_bunches;
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, EdgeIx, MultiGraph, StateIx};
use crate::hom::{construct_right_resolver, minimal_factor, GraphHom, MinimalFactor, RightResolver};
use crate::stability::{stability_relation, StabilityRelation};

/// Seed and effort limits for stable-pair search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Maximum number of colourings evaluated, over all phases.
    pub budget: u64,
    pub restarts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { seed: 0, budget: 1 << 20, restarts: 8 }
    }
}

/// Fiber-mates with identical rows of the count matrix
/// become stable once `Φ` on `E_{I2}` is copied from `E_{I1}`.
///
/// The rewired map changes `Φ` only on `E_{I2}`, and only by a permutation
/// of parallel codomain edges; both facts are checked.
pub fn in_amalgamation_stable_pair(phi: &RightResolver) -> Result<Option<(RightResolver, (StateIx, StateIx))>> {
    let g = phi.domain();
    let h = phi.codomain();
    let counts = g.count_matrix();
    for fiber in phi.fibers().iter() {
        for (x, &i1) in fiber.iter().enumerate() {
            let Some(&i2) = fiber[x + 1..].iter().find(|&&i2| counts[i1] == counts[i2]) else {
                continue;
            };
            let mut edge_map = phi.edge_map().to_vec();
            for j in g.followers(i2) {
                let from1 = g.out_edges(i1).iter().filter(|&&e| g.target(e) == j);
                let from2 = g.out_edges(i2).iter().filter(|&&e| g.target(e) == j);
                // Θ_J pairs the k-th edge into J from I2 with the k-th from I1.
                for (&e2, &e1) in from2.zip(from1) {
                    edge_map[e2] = phi.map_edge(e1);
                }
            }
            for e in g.edges() {
                let same = edge_map[e] == phi.map_edge(e);
                let parallel = h.target(edge_map[e]) == h.target(phi.map_edge(e));
                if (g.source(e) != i2 && !same) || !parallel {
                    return Err(Error::Verification(format!("rewiring changed `{}` illegally", g.edge_id(e))));
                }
            }
            let rewired = RightResolver::new(GraphHom::new(
                g.clone(),
                h.clone(),
                edge_map,
                phi.state_map().to_vec(),
            )?)?;
            if !stability_relation(&rewired)?.stable(i1, i2) {
                return Err(Error::Verification(format!(
                    "in-amalgamated pair `{}`, `{}` is not stable",
                    g.state_id(i1),
                    g.state_id(i2)
                )));
            }
            return Ok(Some((rewired, (i1, i2))));
        }
    }
    Ok(None)
}

/// How the stable pair was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum StabilitySource {
    InAmalgamation { pair: (StateIx, StateIx) },
    HillClimb { position: usize },
    Exhaustive { position: usize },
}

#[derive(Debug, Clone)]
pub struct NontrivialStability {
    pub resolver: RightResolver,
    pub relation: StabilityRelation,
    pub source: StabilitySource,
    pub colourings_evaluated: u64,
    /// Unique-tallest-tree colourings whose relation came out trivial.
    /// Always zero unless a unique tallest tree fails to force stability.
    pub rejected_candidates: u64,
}

/// A resolver onto M(G) with nontrivial stability, for strongly connected
/// G whose minimal factor is a cycle of bunches and which is not one itself.
pub fn find_nontrivial_stability(g: &Arc<MultiGraph>, config: &SearchConfig) -> Result<NontrivialStability> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let mf = minimal_factor(g)?;
    if as_cycle_of_bunches(&mf.graph).is_none() {
        return Err(Error::Precondition("M(G) is not a cycle of bunches".into()));
    }
    if as_cycle_of_bunches(g).is_some() {
        return Err(Error::Precondition("graph is already a cycle of bunches".into()));
    }
    let phi = construct_right_resolver(g, &mf, None)?;
    if let Some((resolver, pair)) = in_amalgamation_stable_pair(&phi)? {
        let relation = stability_relation(&resolver)?;
        return Ok(NontrivialStability {
            resolver,
            relation,
            source: StabilitySource::InAmalgamation { pair },
            colourings_evaluated: 0,
            rejected_candidates: 0,
        });
    }
    TreeSearch::new(g, &mf, config).run()
}

struct TreeSearch<'a> {
    g: &'a Arc<MultiGraph>,
    mf: &'a MinimalFactor,
    config: &'a SearchConfig,
    /// One representative edge per distinct follower, per state.
    choices: Vec<Vec<EdgeIx>>,
    evaluated: u64,
    rejected: u64,
}

impl<'a> TreeSearch<'a> {
    fn new(g: &'a Arc<MultiGraph>, mf: &'a MinimalFactor, config: &'a SearchConfig) -> Self {
        let choices = g
            .states()
            .map(|s| {
                let mut reps: Vec<EdgeIx> = Vec::new();
                for &e in g.out_edges(s) {
                    if reps.iter().all(|&r| g.target(r) != g.target(e)) {
                        reps.push(e);
                    }
                }
                reps
            })
            .collect();
        Self { g, mf, config, choices, evaluated: 0, rejected: 0 }
    }

    fn evaluate(&mut self, pick: &[usize]) -> Result<(TotalOrderColouring, TreeAnalysis)> {
        if self.evaluated >= self.config.budget {
            return Err(Error::BudgetExhausted { budget: self.config.budget });
        }
        self.evaluated += 1;
        let zero: Vec<EdgeIx> = pick.iter().enumerate().map(|(s, &k)| self.choices[s][k]).collect();
        let c = TotalOrderColouring::from_zero_edges(self.g, &self.mf.graph, &self.mf.sigma, &zero)?;
        let t = tree_analysis(&c)?;
        Ok((c, t))
    }

    /// The stability search has the final say on every candidate.
    fn accept(&mut self, c: &TotalOrderColouring, t: &TreeAnalysis, exhaustive: bool) -> Result<Option<NontrivialStability>> {
        let Some(position) = t.unique_tallest_tree_at else { return Ok(None) };
        let relation = stability_relation(c.resolver())?;
        if relation.is_trivial() {
            self.rejected += 1;
            return Ok(None);
        }
        let source = if exhaustive {
            StabilitySource::Exhaustive { position }
        } else {
            StabilitySource::HillClimb { position }
        };
        Ok(Some(NontrivialStability {
            resolver: c.resolver().clone(),
            relation,
            source,
            colourings_evaluated: self.evaluated,
            rejected_candidates: self.rejected,
        }))
    }

    fn run(mut self) -> Result<NontrivialStability> {
        if let Some(found) = self.hill_climb()? {
            return Ok(found);
        }
        self.exhaustive()
    }

    /// First-improvement descent on the tie score over single 0-edge swaps,
    /// restarting from random colourings at local minima.
    fn hill_climb(&mut self) -> Result<Option<NontrivialStability>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let n = self.g.num_states();
        let mut pick = vec![0; n];
        for restart in 0..=self.config.restarts {
            if restart > 0 {
                for (p, opts) in pick.iter_mut().zip(&self.choices) {
                    *p = rng.gen_range(0..opts.len());
                }
            }
            let (c, t) = self.evaluate(&pick)?;
            if let Some(found) = self.accept(&c, &t, false)? {
                return Ok(Some(found));
            }
            let mut score = t.tie_score();
            let mut order: Vec<StateIx> = (0..n).collect();
            'descend: loop {
                order.shuffle(&mut rng);
                for &s in &order {
                    let old = pick[s];
                    for k in 0..self.choices[s].len() {
                        if k == old {
                            continue;
                        }
                        pick[s] = k;
                        let (c, t) = self.evaluate(&pick)?;
                        if let Some(found) = self.accept(&c, &t, false)? {
                            return Ok(Some(found));
                        }
                        if t.tie_score() < score {
                            score = t.tie_score();
                            continue 'descend;
                        }
                    }
                    pick[s] = old;
                }
                break;
            }
        }
        Ok(None)
    }

    /// Every choice of followers for the 0-edges, in mixed-radix order.
    fn exhaustive(&mut self) -> Result<NontrivialStability> {
        let n = self.g.num_states();
        let mut pick = vec![0; n];
        loop {
            let (c, t) = self.evaluate(&pick)?;
            if let Some(found) = self.accept(&c, &t, true)? {
                return Ok(found);
            }
            let mut s = 0;
            while s < n {
                pick[s] += 1;
                if pick[s] < self.choices[s].len() {
                    break;
                }
                pick[s] = 0;
                s += 1;
            }
            if s == n {
                return Err(Error::Verification(format!(
                    "no colouring with a unique tallest tree and nontrivial stability among {} evaluated",
                    self.evaluated
                )));
            }
        }
    }
}
