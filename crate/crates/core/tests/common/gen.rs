//! Seeded random instances.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use coopsync::context::{ContextGraph, Direction, Edge, Node, PathExpression, PathStep};
use coopsync::value::Value;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ROLES: [&str; 4] = ["coordinator", "gros_oeuvre", "plomberie", "electricite"];
const STATES: [&str; 4] = ["planned", "in_progress", "done", "late"];
const WORDS: [&str; 10] = ["Mur", "Dalle", "Réseau", "Cloison", "étage", "RDC", "nord", "\"sud\"", "a\\b", "n°3"];

fn text(r: &mut ChaCha8Rng) -> String {
    let n = r.gen_range(1..4);
    (0..n).map(|_| *WORDS.choose(r).unwrap()).collect::<Vec<_>>().join(" ")
}

fn date(r: &mut ChaCha8Rng) -> Value {
    let d = NaiveDate::from_ymd_opt(2007, 1, 1).unwrap() + chrono::Days::new(r.gen_range(0..365));
    Value::Date(d)
}

/// Sizes of a random building-site graph.
#[derive(Debug, Clone, Copy)]
pub struct Sizes {
    pub actors: usize,
    pub ouvrages: usize,
    pub tasks: usize,
    pub reports: usize,
    pub remarks: usize,
}

impl Sizes {
    /// Random sizes with at most `max_nodes` nodes in total. Every task
    /// gets one company and up to three parts and every remark one part and
    /// one report, so edges stay under 400 for 150 nodes.
    pub fn random(r: &mut ChaCha8Rng, max_nodes: usize) -> Sizes {
        loop {
            let s = Sizes {
                actors: r.gen_range(1..=8),
                ouvrages: r.gen_range(1..=30),
                tasks: r.gen_range(0..=60),
                reports: r.gen_range(1..=6),
                remarks: r.gen_range(0..=40),
            };
            if s.total() <= max_nodes {
                return s;
            }
        }
    }

    pub fn total(&self) -> usize {
        self.actors + self.ouvrages + self.tasks + self.reports + self.remarks
    }
}

/// A random graph conforming to the fixture domain model, on which the
/// fixture rules always succeed.
pub fn chantier_graph(r: &mut ChaCha8Rng, s: Sizes) -> ContextGraph {
    let mut nodes = Vec::new();
    let mut edges: BTreeMap<String, Edge> = BTreeMap::new();
    let mut add = |e: Edge| {
        edges.insert(e.id.as_str().to_string(), e);
    };
    let actors: Vec<String> = (0..s.actors).map(|i| format!("acteur:A{i}")).collect();
    let ouvrages: Vec<String> = (0..s.ouvrages).map(|i| format!("ouvrage:M{i}")).collect();
    let tasks: Vec<String> = (0..s.tasks).map(|i| format!("tache:T{i}")).collect();
    let reports: Vec<String> = (0..s.reports).map(|i| format!("cr:CR{i}")).collect();
    let remarks: Vec<String> = (0..s.remarks).map(|i| format!("remarque:R{i}")).collect();

    // The first actor is always a trade; tasks go to trades only.
    let mut trades = Vec::new();
    for (i, a) in actors.iter().enumerate() {
        let role = if i == 0 { ROLES[r.gen_range(1..4)] } else { *ROLES.choose(r).unwrap() };
        if role != "coordinator" {
            trades.push(a.clone());
        }
        nodes.push(
            Node::new(a.as_str(), "Entreprise")
                .with("name", Value::Str(text(r)))
                .with("role", Value::Sym(role.to_string())),
        );
    }
    for o in &ouvrages {
        let g = format!("box:{},{},0,{},1,2.5", r.gen_range(0..20), r.gen_range(0..20), r.gen_range(1..9));
        nodes.push(Node::new(o.as_str(), "Ouvrage").with("name", Value::Str(text(r))).with("geom", Value::Str(g)));
    }
    for t in &tasks {
        let (a, b) = (date(r), date(r));
        let (start, end) = if a <= b { (a, b) } else { (b, a) };
        nodes.push(
            Node::new(t.as_str(), "TacheConstruction")
                .with("label", Value::Str(text(r)))
                .with("start", start)
                .with("end", end)
                .with("state", Value::Sym(STATES.choose(r).unwrap().to_string())),
        );
        add(Edge::new("realise", trades.choose(r).unwrap().as_str(), t.as_str()));
        for _ in 0..r.gen_range(1..=3) {
            add(Edge::new("concerne", t.as_str(), ouvrages.choose(r).unwrap().as_str()));
        }
    }
    for _ in 0..tasks.len() / 2 {
        let a = tasks.choose(r).unwrap();
        let b = tasks.choose(r).unwrap();
        add(Edge::new("precede", a.as_str(), b.as_str()));
    }
    for c in &reports {
        nodes.push(Node::new(c.as_str(), "CompteRendu").with("date", date(r)).with("info", Value::Str(text(r))));
        for _ in 0..r.gen_range(0..=2) {
            add(Edge::new("redige", actors.choose(r).unwrap().as_str(), c.as_str()));
        }
    }
    for (i, m) in remarks.iter().enumerate() {
        nodes.push(
            Node::new(m.as_str(), "Remarque")
                .with("number", Value::Int(i as i64 + 1))
                .with("text", Value::Str(text(r)))
                .with("status", Value::Sym(if r.gen_bool(0.5) { "open" } else { "closed" }.into())),
        );
        add(Edge::new("porte_sur", m.as_str(), ouvrages.choose(r).unwrap().as_str()));
        add(Edge::new("consigne_dans", m.as_str(), reports.choose(r).unwrap().as_str()));
    }
    ContextGraph::build(1, nodes, edges.into_values()).expect("generated graph is well formed")
}

pub const PLAIN_RELATIONS: [&str; 4] = ["r0", "r1", "r2", "r3"];

/// An untyped random graph: `n` nodes of types `T0..T2`, `m` edges over
/// relations `r0..r3`, duplicates collapsed.
pub fn plain_graph(r: &mut ChaCha8Rng, n: usize, m: usize) -> ContextGraph {
    let ids: Vec<String> = (0..n).map(|i| format!("n{i:03}")).collect();
    let nodes: Vec<Node> = ids.iter().map(|id| Node::new(id.as_str(), format!("T{}", r.gen_range(0..3)))).collect();
    let mut edges: BTreeMap<String, Edge> = BTreeMap::new();
    if n > 0 {
        for _ in 0..m {
            let e = Edge::new(
                *PLAIN_RELATIONS.choose(r).unwrap(),
                ids.choose(r).unwrap().as_str(),
                ids.choose(r).unwrap().as_str(),
            );
            edges.insert(e.id.as_str().to_string(), e);
        }
    }
    ContextGraph::build(1, nodes, edges.into_values()).unwrap()
}

pub fn plain_path(r: &mut ChaCha8Rng, len: usize) -> PathExpression {
    PathExpression::new(
        (0..len)
            .map(|_| {
                let dir = if r.gen_bool(0.5) { Direction::Forward } else { Direction::Backward };
                PathStep::new(*PLAIN_RELATIONS.choose(r).unwrap(), dir)
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_chantier(r: &mut ChaCha8Rng, max_nodes: usize) -> ContextGraph {
    let s = Sizes::random(r, max_nodes);
    chantier_graph(r, s)
}
