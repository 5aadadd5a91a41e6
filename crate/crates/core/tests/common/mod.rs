#![allow(dead_code)]

use std::path::PathBuf;

use coopsync::context::{load_project, ContextGraph};
use coopsync::metamodel::{parse_domain_model, DomainModel};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use coopsync::sync::{propagate, CorrelationConfig, HighlightDirective, Rendering, SelectionEvent, Workspace};
use coopsync::transform::{parse_rules, RoleFilter, RuleSet, TraceMap};
use coopsync::views::{builtin_views, ViewConceptModel};
use rand::seq::IteratorRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MODEL: &str = include_str!("../../fixtures/chantier.cdm");
pub const PROJECT: &str = include_str!("../../fixtures/blenod.cpj");
pub const RULES: &str = include_str!("../../fixtures/chantier.cvt");

pub const TRADE_ROLES: [&str; 3] = ["gros_oeuvre", "plomberie", "electricite"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn model() -> DomainModel {
    parse_domain_model(MODEL).expect("fixture model parses")
}

pub fn graph() -> ContextGraph {
    load_project(&model(), PROJECT).expect("fixture project loads")
}

pub fn rules() -> RuleSet {
    parse_rules(RULES).expect("fixture rules parse")
}

pub fn views() -> Vec<ViewConceptModel> {
    builtin_views()
}

pub fn view(id: &str) -> ViewConceptModel {
    views().into_iter().find(|v| v.view_id == id).expect("builtin view")
}

pub fn workspace() -> Workspace {
    let dm = model();
    let c = CorrelationConfig::defaults_for(&dm);
    Workspace::new(dm, graph(), rules(), views(), c).expect("fixture workspace")
}

/// Every view rendered for `role`, returning the graph and its traces.
pub fn rendering(rs: &RuleSet, g: ContextGraph, role: &str) -> Rendering {
    Rendering::build(rs, Arc::new(g), &views(), RoleFilter::new(role)).expect("rendering succeeds")
}

pub fn highlight_strings(d: &HighlightDirective) -> BTreeMap<String, BTreeSet<String>> {
    d.highlights.iter().map(|(v, ks)| (v.clone(), ks.iter().map(|k| k.to_string()).collect())).collect()
}

/// Every `(view, key)` a user could select.
pub fn selectable(traces: &TraceMap) -> Vec<(String, coopsync::views::ElementKey)> {
    traces.iter().flat_map(|(v, t)| t.elements.keys().map(move |k| (v.clone(), k.clone()))).collect()
}

/// Compares `propagate` with the brute-force oracle for one selection.
pub fn propagation_matches(
    g: &ContextGraph,
    traces: &TraceMap,
    view: &str,
    key: &coopsync::views::ElementKey,
    c: &CorrelationConfig,
) -> Result<(), String> {
    let e = SelectionEvent { view_id: view.to_string(), element_key: key.clone(), graph_version: g.version() };
    let got = propagate(&e, traces, g, c).map_err(|e| e.to_string())?;
    let want = oracles::highlights(g, traces, view, &key.to_string(), &c.relations, c.max_hops);
    if highlight_strings(&got) == want {
        Ok(())
    } else {
        Err(format!("select {view} {key} with {c:?}: got {:?}, want {want:?}", highlight_strings(&got)))
    }
}

/// A random correlation config over the fixture relations.
pub fn random_correlation(r: &mut ChaCha8Rng) -> CorrelationConfig {
    let dm = model();
    let n = r.gen_range(0..=dm.relations.len());
    let rels = dm.relations.iter().map(|x| x.name.clone()).choose_multiple(r, n);
    CorrelationConfig::new(rels, r.gen_range(0..=4))
}

pub mod client;
pub mod gen;
pub mod oracles;
pub mod rulegen;
