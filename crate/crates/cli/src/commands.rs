use std::collections::BTreeSet;
use std::path::Path;

use rrgraph::bunchy::{as_cycle_of_bunches, build_o, classify, max_bunchy_factor, og_almost_bunchy};
use rrgraph::corpus::{self, CorpusGraph};
use rrgraph::graph::{
    graph_isomorphic, higher_edge_graph, is_strongly_connected, principal_components, to_dot, to_json,
};
use rrgraph::hom::{check_right_resolver, is_congruence, minimal_factor, resolver_to_minimal, RightResolver};
use rrgraph::pipeline::{
    decide_og_iso_bfc, decide_og_iso_bunchy, probe_bunchy_factor_conjecture, road_colour,
    synchronize_to_cycle_of_bunches, ProbeVerdict, SearchConfig,
};
use rrgraph::stability::{
    fiber_product, is_synchronizing, minimal_images_bruteforce, stability_relation, synchronizing_word,
};
use serde_json::{json, Value};

use crate::{
    CliError, CliResult, Command, CorpusKind, Ctx, DecideMethod, HomArgs, EXIT_INCONCLUSIVE, EXIT_NO, EXIT_YES,
};

/// Fibers larger than this skip the minimal-image subset search.
const IMAGE_FIBER_LIMIT: usize = 12;

pub(crate) fn execute(command: &Command, ctx: &mut Ctx) -> CliResult<i32> {
    match command {
        Command::Minimize { graph } => minimize(ctx, graph),
        Command::Stability(args) => stability(ctx, args),
        Command::SyncCheck(args) => sync_check(ctx, args),
        Command::Fiber { g1, hom1, g2, hom2, codomain } => fiber(ctx, [g1, g2], [hom1, hom2], codomain),
        Command::HigherEdge { graph, k } => higher_edge(ctx, graph, *k),
        Command::Bunchy { graph } => bunchy(ctx, graph),
        Command::Bg { graph } => bg(ctx, graph),
        Command::Og { graph } => og(ctx, graph),
        Command::RoadColor { graph, budget } => road_color(ctx, graph, *budget),
        Command::SyncFactor { graph, budget } => sync_factor(ctx, graph, *budget),
        Command::DecideOg { g1, g2, method, bunchy, bfc } => {
            let method = match (method, bunchy, bfc) {
                (Some(m), _, _) => Some(*m),
                (None, true, _) => Some(DecideMethod::Bunchy),
                (None, _, true) => Some(DecideMethod::Bfc),
                _ => None,
            };
            decide_og(ctx, g1, g2, method)
        }
        Command::ProbeBfc { graph, budget } => probe_bfc(ctx, graph, *budget),
        Command::ExportDot { graph, hom, codomain } => export_dot(ctx, graph, hom.as_deref(), codomain.as_deref()),
        Command::Corpus { kind, states, max_degree } => write_corpus(ctx, *kind, *states, *max_degree),
    }
}

fn search_config(ctx: &Ctx, budget: Option<u64>) -> SearchConfig {
    let default = SearchConfig::default();
    SearchConfig { seed: ctx.global.seed, budget: budget.unwrap_or(default.budget), ..default }
}

fn state_map_json(phi: &RightResolver) -> Value {
    let (g, h) = (phi.domain(), phi.codomain());
    g.states().map(|s| (g.state_id(s).to_string(), json!(h.state_id(phi.map_state(s))))).collect()
}

fn load_resolver(ctx: &mut Ctx, args: &HomArgs) -> CliResult<RightResolver> {
    let g = ctx.load_graph(&args.graph)?;
    let codomain = args.codomain.as_deref().map(|p| ctx.load_graph(p)).transpose()?;
    let hom = ctx.load_hom(&args.hom, g, codomain)?;
    RightResolver::new(hom).map_err(|e| CliError::Usage(format!("{}: {e}", args.hom.display())))
}

fn minimize(ctx: &mut Ctx, path: &Path) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let (mf, phi) = resolver_to_minimal(&g)?;
    ctx.require("right_resolving", check_right_resolver(phi.hom()).ok);
    let again = minimal_factor(&mf.graph)?;
    ctx.require("codomain_is_minimal", again.graph == mf.graph);
    ctx.emit_graph("minimal.graph", &mf.graph)?;
    ctx.emit_hom("to_minimal.hom", phi.hom())?;
    ctx.emit_dot(&mf.graph, None)?;
    ctx.report.result = json!({
        "states": mf.graph.num_states(),
        "edges": mf.graph.num_edges(),
        "sigma": state_map_json(&phi),
        "graph": to_json(&mf.graph),
    });
    Ok(EXIT_YES)
}

fn stability(ctx: &mut Ctx, args: &HomArgs) -> CliResult<i32> {
    let phi = load_resolver(ctx, args)?;
    let (g, h) = (phi.domain().clone(), phi.codomain().clone());
    let rel = stability_relation(&phi)?;
    ctx.require("congruence", is_congruence(&rel.partition, &phi));
    ctx.require("refines_fibers", rel.partition.refines(&rel.fibers));
    ctx.verdict("trivial", rel.is_trivial());
    ctx.verdict("synchronizing", rel.is_total_on_fibers());
    let mut images = Vec::new();
    let mut sizes = BTreeSet::new();
    for i in h.states() {
        if phi.fiber(i).len() > IMAGE_FIBER_LIMIT {
            images.push(json!({ "state": h.state_id(i), "skipped": "fiber too large" }));
            continue;
        }
        let found = minimal_images_bruteforce(&phi, i, IMAGE_FIBER_LIMIT)?;
        let first = &found[0];
        sizes.extend(found.iter().map(|m| m.image.len()));
        images.push(json!({
            "state": h.state_id(i),
            "size": first.image.len(),
            "count": found.len(),
            "word": first.word.iter().map(|&a| h.edge_id(a)).collect::<Vec<_>>(),
            "image": first.image.iter().map(|&s| g.state_id(s)).collect::<Vec<_>>(),
        }));
    }
    if is_strongly_connected(&g) && !sizes.is_empty() {
        ctx.require("minimal_images_one_size", sizes.len() == 1);
        ctx.require("size_one_iff_synchronizing", sizes.contains(&1) == rel.is_total_on_fibers());
    }
    ctx.report.result = json!({
        "classes": rel.partition.to_ids(&g),
        "fibers": rel.fibers.to_ids(&g),
        "minimal_images": images,
    });
    Ok(EXIT_YES)
}

fn sync_check(ctx: &mut Ctx, args: &HomArgs) -> CliResult<i32> {
    let phi = load_resolver(ctx, args)?;
    let sync = is_synchronizing(&phi)?;
    ctx.verdict("synchronizing", sync);
    if !sync {
        let rel = stability_relation(&phi)?;
        ctx.report.result = json!({ "classes": rel.partition.to_ids(phi.domain()) });
        return Ok(EXIT_NO);
    }
    let h = phi.codomain().clone();
    let mut words = serde_json::Map::new();
    let mut collapse = true;
    for i in h.states() {
        let w = synchronizing_word(&phi, i)?;
        let ends: BTreeSet<usize> = phi.fiber(i).iter().map(|&s| phi.transition(s, &w)).collect::<Result<_, _>>()?;
        collapse &= ends.len() == 1;
        words.insert(h.state_id(i).to_string(), json!(w.iter().map(|&a| h.edge_id(a)).collect::<Vec<_>>()));
    }
    ctx.require("words_collapse_fibers", collapse);
    ctx.report.result = json!({ "words": words });
    Ok(EXIT_YES)
}

fn fiber(ctx: &mut Ctx, graphs: [&Path; 2], homs: [&Path; 2], codomain: &Path) -> CliResult<i32> {
    let h = ctx.load_graph(codomain)?;
    let mut resolvers = Vec::new();
    for (g, hom) in graphs.into_iter().zip(homs) {
        let g = ctx.load_graph(g)?;
        let hom = ctx.load_hom(hom, g, Some(h.clone()))?;
        resolvers.push(RightResolver::new(hom).map_err(|e| CliError::Usage(e.to_string()))?);
    }
    let fp = fiber_product(&resolvers[0], &resolvers[1])?;
    ctx.require("proj1_right_resolving", check_right_resolver(fp.proj1.hom()).ok);
    ctx.require("proj2_right_resolving", check_right_resolver(fp.proj2.hom()).ok);
    ctx.require("sink_free", fp.product.sinks().is_empty());
    ctx.emit_graph("product.graph", &fp.product)?;
    ctx.emit_hom("proj1.hom", fp.proj1.hom())?;
    ctx.emit_hom("proj2.hom", fp.proj2.hom())?;
    ctx.emit_dot(&fp.product, None)?;
    ctx.report.result = json!({
        "states": fp.product.num_states(),
        "edges": fp.product.num_edges(),
        "principal_components": principal_components(&fp.product).to_ids(&fp.product),
        "graph": to_json(&fp.product),
    });
    Ok(EXIT_YES)
}

fn higher_edge(ctx: &mut Ctx, path: &Path, k: usize) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let h = higher_edge_graph(&g, k)?;
    ctx.require("strong_connectivity_preserved", is_strongly_connected(&h) == is_strongly_connected(&g));
    ctx.emit_graph("higher_edge.graph", &h)?;
    ctx.emit_dot(&h, None)?;
    ctx.report.result = json!({ "k": k, "states": h.num_states(), "edges": h.num_edges(), "graph": to_json(&h) });
    Ok(EXIT_YES)
}

fn bunchy(ctx: &mut Ctx, path: &Path) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let c = classify(&g)?;
    ctx.verdict("bunchy", c.bunchy);
    ctx.verdict("almost_bunchy", c.almost_bunchy);
    ctx.verdict("cycle_of_bunches", c.cycle_of_bunches);
    let mf = minimal_factor(&g)?;
    let mut result = serde_json::to_value(&c).expect("classification serializes");
    result["minimal_cycle_of_bunches"] = json!(as_cycle_of_bunches(&mf.graph));
    ctx.report.result = result;
    Ok(EXIT_YES)
}

fn bg(ctx: &mut Ctx, path: &Path) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let b = max_bunchy_factor(&g)?;
    ctx.require("bunchy", classify(&b.graph)?.bunchy);
    ctx.require("idempotent", max_bunchy_factor(&b.graph)?.graph.num_states() == b.graph.num_states());
    let composite = b.to_minimal.compose(&b.quotient_map)?;
    ctx.require("factors_through_minimal", composite.state_map() == minimal_factor(&g)?.sigma.as_slice());
    ctx.emit_graph("bg.graph", &b.graph)?;
    ctx.emit_hom("to_bg.hom", b.quotient_map.hom())?;
    ctx.emit_dot(&b.graph, None)?;
    ctx.report.result = json!({
        "states": b.graph.num_states(),
        "classes": b.partition.to_ids(&g),
        "graph": to_json(&b.graph),
    });
    Ok(EXIT_YES)
}

fn og(ctx: &mut Ctx, path: &Path) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let o = og_almost_bunchy(&g)?;
    ctx.require("synchronizing", is_synchronizing(&o.synchronizer)?);
    let bunchy = classify(&o.graph)?.bunchy;
    if is_strongly_connected(&g) {
        ctx.require("bunchy", bunchy);
    } else {
        ctx.verdict("bunchy", bunchy);
    }
    ctx.emit_graph("og.graph", &o.graph)?;
    ctx.emit_hom("to_og.hom", o.synchronizer.hom())?;
    ctx.emit_dot(&o.graph, None)?;
    ctx.report.result = json!({
        "states": o.graph.num_states(),
        "classes": o.relation.partition.to_ids(&g),
        "graph": to_json(&o.graph),
    });
    Ok(EXIT_YES)
}

fn road_color(ctx: &mut Ctx, path: &Path, budget: Option<u64>) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let config = search_config(ctx, budget);
    let r = road_colour(&g, &config)?;
    let phi = r.colouring.resolver();
    ctx.require("synchronizing", is_synchronizing(phi)?);
    let fiber = phi.fiber(0);
    let ends: BTreeSet<usize> = fiber.iter().map(|&s| phi.transition(s, &r.word)).collect::<Result<_, _>>()?;
    ctx.require("word_collapses_fiber", ends.len() == 1);
    ctx.report.budget.insert("colourings_evaluated".into(), r.steps.iter().map(|s| s.colourings_evaluated).sum());
    let labels: Vec<String> = r.colouring.labels().iter().map(usize::to_string).collect();
    ctx.emit_hom("colouring.hom", phi.hom())?;
    ctx.emit_graph("codomain.graph", phi.codomain())?;
    ctx.emit_dot(&g, Some(&labels))?;
    let h = phi.codomain();
    ctx.report.result = json!({
        "out_degree": r.out_degree,
        "period": r.period,
        "labels": g.edges().map(|e| (g.edge_id(e).to_string(), json!(r.colouring.labels()[e]))).collect::<serde_json::Map<_, _>>(),
        "word": r.word.iter().map(|&a| h.edge_id(a)).collect::<Vec<_>>(),
        "steps": r.steps.iter().map(|s| json!({"source": s.source, "states_before": s.states_before, "states_after": s.states_after})).collect::<Vec<_>>(),
    });
    Ok(EXIT_YES)
}

fn sync_factor(ctx: &mut Ctx, path: &Path, budget: Option<u64>) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let config = search_config(ctx, budget);
    let s = synchronize_to_cycle_of_bunches(&g, &config)?;
    ctx.require("synchronizing", is_synchronizing(&s.synchronizer)?);
    let expected = build_o(&s.minimal, s.q)?;
    ctx.require("target_is_o_mq", graph_isomorphic(&s.target, &expected)?.is_some());
    ctx.require("chain_composes", s.chain.compose()? == s.synchronizer);
    ctx.report.budget.insert("colourings_evaluated".into(), s.steps.iter().map(|x| x.colourings_evaluated).sum());
    ctx.emit_graph("sync_factor.graph", &s.target)?;
    ctx.emit_hom("synchronizer.hom", s.synchronizer.hom())?;
    ctx.emit_dot(&s.target, None)?;
    ctx.report.result = json!({
        "minimal_degree_sequence": s.minimal.degree_sequence,
        "q": s.q,
        "states": s.target.num_states(),
        "steps": s.steps.iter().map(|x| json!({"source": x.source, "states_before": x.states_before, "states_after": x.states_after})).collect::<Vec<_>>(),
        "graph": to_json(&s.target),
    });
    Ok(EXIT_YES)
}

fn decide_og(ctx: &mut Ctx, p1: &Path, p2: &Path, method: Option<DecideMethod>) -> CliResult<i32> {
    let g1 = ctx.load_graph(p1)?;
    let g2 = ctx.load_graph(p2)?;
    let method = match method {
        Some(m) => m,
        None if classify(&g1)?.bunchy && classify(&g2)?.bunchy => DecideMethod::Bunchy,
        None => DecideMethod::Bfc,
    };
    let d = match method {
        DecideMethod::Bunchy => decide_og_iso_bunchy(&g1, &g2)?,
        DecideMethod::Bfc => decide_og_iso_bfc(&g1, &g2)?,
    };
    ctx.verdict("isomorphic", d.isomorphic);
    ctx.verdict("conditional", d.conditional);
    if let Some(w) = &d.witness {
        let sync = is_synchronizing(&w.to_g1)? && is_synchronizing(&w.to_g2)?;
        ctx.require("witness_synchronizing", sync);
        ctx.emit_graph("extension.graph", &w.graph)?;
        ctx.emit_dot(&w.graph, None)?;
    }
    let mut result = serde_json::to_value(d.summary()).expect("summary serializes");
    result["method"] = json!(if method == DecideMethod::Bunchy { "bunchy" } else { "bfc" });
    ctx.report.result = result;
    Ok(if d.isomorphic { EXIT_YES } else { EXIT_NO })
}

fn probe_bfc(ctx: &mut Ctx, path: &Path, budget: u64) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let r = probe_bunchy_factor_conjecture(&g, budget)?;
    ctx.report.budget.insert("budget".into(), budget);
    ctx.report.budget.insert("classes_examined".into(), r.classes_examined as u64);
    let mut result = json!({ "verdict": r.verdict, "classes_examined": r.classes_examined, "exhaustive": r.exhaustive });
    if let Some((phi, rel)) = &r.witness {
        ctx.require("witness_nontrivial", !stability_relation(phi)?.is_trivial());
        ctx.emit_hom("witness.hom", phi.hom())?;
        result["classes"] = json!(rel.partition.to_ids(&g));
    }
    ctx.report.result = result;
    Ok(match r.verdict {
        ProbeVerdict::WitnessFound => EXIT_YES,
        ProbeVerdict::Counterexample => EXIT_NO,
        ProbeVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn export_dot(ctx: &mut Ctx, path: &Path, hom: Option<&Path>, codomain: Option<&Path>) -> CliResult<i32> {
    let g = ctx.load_graph(path)?;
    let colours = match hom {
        Some(hp) => {
            let c = codomain.map(|p| ctx.load_graph(p)).transpose()?;
            let h = ctx.load_hom(hp, g.clone(), c)?;
            Some(g.edges().map(|e| h.codomain().edge_id(h.map_edge(e)).to_string()).collect::<Vec<_>>())
        }
        None => None,
    };
    if ctx.global.dot.is_some() {
        ctx.emit_dot(&g, colours.as_deref())?;
    } else {
        ctx.report.result = Value::String(to_dot(&g, colours.as_deref()));
    }
    Ok(EXIT_YES)
}

fn write_corpus(ctx: &mut Ctx, kind: CorpusKind, n: usize, d: usize) -> CliResult<i32> {
    if ctx.global.out.is_none() {
        return Err(CliError::Usage("corpus needs --out".into()));
    }
    let graphs: Vec<CorpusGraph> = match kind {
        CorpusKind::Named => corpus::named(),
        CorpusKind::All => numbered("all", corpus::all_graphs(n, d)),
        CorpusKind::Constant => numbered("const", corpus::constant_degree(n, d)),
        CorpusKind::CycleFibered => numbered("fibered", corpus::cycle_fibered(n, d)),
    };
    for cg in &graphs {
        ctx.emit_graph(&format!("{}.graph", cg.name), &cg.graph)?;
    }
    ctx.report.result = json!({ "graphs": graphs.len() });
    Ok(EXIT_YES)
}

fn numbered(prefix: &str, counts: Vec<corpus::Counts>) -> Vec<CorpusGraph> {
    counts.iter().enumerate().map(|(k, c)| CorpusGraph::from_counts(format!("{prefix}{k:05}"), c)).collect()
}
