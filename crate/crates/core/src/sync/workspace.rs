use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::propagate::{
    propagate_indexed, CorrelationConfig, HighlightDirective, SelectionEvent, SyncError, TraceIndex,
};
use crate::context::{ContextGraph, ContextStore, DeltaOp, PublishError};
use crate::metamodel::DomainModel;
use crate::transform::{
    check_rules, declared_roles, generate, GenerateError, RoleFilter, RuleIssue, RuleSet, TraceMap,
};
use crate::views::{emit_schema, ElementKey, ViewConceptModel, ViewContent, ViewSchema};

/// Generates the content of `view` for `role` and serializes it. Every
/// producer of content documents goes through here, so the command line
/// and the server emit identical bytes for identical inputs.
pub fn render_document(
    rs: &RuleSet,
    g: &ContextGraph,
    view: &ViewConceptModel,
    role: &RoleFilter,
) -> Result<String, GenerateError> {
    generate(rs, g, view, role).map(|(content, _)| content.to_document())
}

/// All views generated for one role from one graph version.
#[derive(Debug)]
pub struct Rendering {
    pub graph: Arc<ContextGraph>,
    pub role: RoleFilter,
    pub contents: BTreeMap<String, ViewContent>,
    pub documents: BTreeMap<String, String>,
    pub traces: TraceMap,
    index: TraceIndex,
}

impl Rendering {
    pub fn build(
        rs: &RuleSet,
        g: Arc<ContextGraph>,
        views: &[ViewConceptModel],
        role: RoleFilter,
    ) -> Result<Self, GenerateError> {
        let mut contents = BTreeMap::new();
        let mut documents = BTreeMap::new();
        let mut traces = TraceMap::new();
        for v in views {
            let (content, trace) = generate(rs, &g, v, &role)?;
            documents.insert(v.view_id.clone(), content.to_document());
            contents.insert(v.view_id.clone(), content);
            traces.insert(v.view_id.clone(), trace);
        }
        let index = TraceIndex::new(&traces);
        Ok(Rendering { graph: g, role, contents, documents, traces, index })
    }

    pub fn version(&self) -> u64 {
        self.graph.version()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WorkspaceError {
    #[error("rule file does not check:\n{}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n"))]
    Rules(Vec<RuleIssue>),
    #[error(transparent)]
    Correlation(#[from] SyncError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Publish(#[from] PublishError),
}

#[derive(Debug, Clone)]
struct Session {
    role: RoleFilter,
    arrangement: Vec<String>,
}

/// What a session currently displays.
#[derive(Debug, Clone)]
pub struct SessionSnapshot {
    pub session_id: u64,
    pub role: RoleFilter,
    pub graph_version: u64,
    /// In arrangement order.
    pub contents: Vec<ViewContent>,
    pub documents: Vec<String>,
}

/// Shared engine state: the versioned context, the rules and views, a cache
/// of renderings keyed by (graph version, role), and the open sessions.
pub struct Workspace {
    store: ContextStore,
    rules: RuleSet,
    views: Vec<ViewConceptModel>,
    schemas: BTreeMap<String, ViewSchema>,
    correlation: CorrelationConfig,
    roles: BTreeSet<String>,
    cache: Mutex<HashMap<(u64, RoleFilter), Arc<Rendering>>>,
    sessions: Mutex<HashMap<u64, Session>>,
    next_session: AtomicU64,
}

impl Workspace {
    /// Checks the rules and correlation config, and renders the initial
    /// graph for the coordinator so broken inputs fail here, not later.
    pub fn new(
        model: DomainModel,
        graph: ContextGraph,
        rules: RuleSet,
        views: Vec<ViewConceptModel>,
        correlation: CorrelationConfig,
    ) -> Result<Self, WorkspaceError> {
        let issues = check_rules(&rules, &model, &views);
        if !issues.is_empty() {
            return Err(WorkspaceError::Rules(issues));
        }
        correlation.check(&model)?;
        let roles = declared_roles(&model);
        let schemas = views.iter().map(|v| (v.view_id.clone(), emit_schema(v))).collect();
        let ws = Workspace {
            store: ContextStore::new(Arc::new(model), graph),
            rules,
            views,
            schemas,
            correlation,
            roles,
            cache: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
            next_session: AtomicU64::new(1),
        };
        ws.render(&RoleFilter::coordinator())?;
        Ok(ws)
    }

    pub fn model(&self) -> &DomainModel {
        self.store.model()
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn views(&self) -> &[ViewConceptModel] {
        &self.views
    }

    pub fn view(&self, id: &str) -> Option<&ViewConceptModel> {
        self.views.iter().find(|v| v.view_id == id)
    }

    pub fn schema(&self, id: &str) -> Option<&ViewSchema> {
        self.schemas.get(id)
    }

    pub fn correlation(&self) -> &CorrelationConfig {
        &self.correlation
    }

    /// `coordinator` plus every value the domain model allows for an
    /// actor's `role` attribute.
    pub fn roles(&self) -> &BTreeSet<String> {
        &self.roles
    }

    pub fn graph(&self) -> Arc<ContextGraph> {
        self.store.current()
    }

    pub fn version(&self) -> u64 {
        self.store.current().version()
    }

    pub fn role_filter(&self, role: &str) -> Result<RoleFilter, SyncError> {
        if self.roles.contains(role) {
            Ok(RoleFilter::new(role))
        } else {
            Err(SyncError::UnknownRole(role.to_string()))
        }
    }

    /// Rendering of the current graph for `role`, cached per version.
    pub fn render(&self, role: &RoleFilter) -> Result<Arc<Rendering>, GenerateError> {
        self.render_graph(self.store.current(), role)
    }

    fn render_graph(&self, g: Arc<ContextGraph>, role: &RoleFilter) -> Result<Arc<Rendering>, GenerateError> {
        let key = (g.version(), role.clone());
        if let Some(r) = self.cache.lock().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(r));
        }
        let r = Arc::new(Rendering::build(&self.rules, g, &self.views, role.clone())?);
        let mut cache = self.cache.lock().expect("cache lock poisoned");
        // Only the newest version is ever asked for again.
        cache.retain(|(v, _), _| *v >= key.0);
        Ok(Arc::clone(cache.entry(key).or_insert(r)))
    }

    /// Canonical content document of one view for one role.
    pub fn content_document(&self, view: &str, role: &str) -> Result<(u64, String), SyncError> {
        if self.view(view).is_none() {
            return Err(SyncError::UnknownView(view.to_string()));
        }
        let role = self.role_filter(role)?;
        let r = self.render(&role).map_err(|e| SyncError::Generate(e.to_string()))?;
        Ok((r.version(), r.documents[view].clone()))
    }

    /// Applies a delta. The new snapshot must conform and must render for
    /// the coordinator (which covers every role); otherwise nothing changes.
    pub fn publish(&self, delta: &[DeltaOp]) -> Result<u64, WorkspaceError> {
        let g = self.store.publish_if(delta, |candidate| {
            Rendering::build(&self.rules, Arc::new(candidate.clone()), &self.views, RoleFilter::coordinator())
                .map(|_| ())
                .map_err(WorkspaceError::from)
        })?;
        Ok(g.version())
    }

    fn check_arrangement(&self, views: &[String]) -> Result<(), SyncError> {
        if views.is_empty() {
            return Err(SyncError::EmptyArrangement);
        }
        let mut seen = BTreeSet::new();
        for v in views {
            if self.view(v).is_none() {
                return Err(SyncError::UnknownView(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(SyncError::DuplicateView(v.clone()));
            }
        }
        Ok(())
    }

    /// Opens a session for `role` showing `arrangement`.
    pub fn open_session(&self, role: &str, arrangement: Vec<String>) -> Result<u64, SyncError> {
        let role = self.role_filter(role)?;
        self.check_arrangement(&arrangement)?;
        let id = self.next_session.fetch_add(1, Ordering::Relaxed);
        self.sessions.lock().expect("session lock poisoned").insert(id, Session { role, arrangement });
        Ok(id)
    }

    pub fn close_session(&self, id: u64) {
        self.sessions.lock().expect("session lock poisoned").remove(&id);
    }

    fn session(&self, id: u64) -> Result<Session, SyncError> {
        self.sessions.lock().expect("session lock poisoned").get(&id).cloned().ok_or(SyncError::UnknownSession(id))
    }

    pub fn register_arrangement(&self, id: u64, arrangement: Vec<String>) -> Result<(), SyncError> {
        self.check_arrangement(&arrangement)?;
        let mut sessions = self.sessions.lock().expect("session lock poisoned");
        let s = sessions.get_mut(&id).ok_or(SyncError::UnknownSession(id))?;
        s.arrangement = arrangement;
        Ok(())
    }

    pub fn arrangement(&self, id: u64) -> Result<Vec<String>, SyncError> {
        Ok(self.session(id)?.arrangement)
    }

    pub fn session_snapshot(&self, id: u64) -> Result<SessionSnapshot, SyncError> {
        let s = self.session(id)?;
        let r = self.render(&s.role).map_err(|e| SyncError::Generate(e.to_string()))?;
        Ok(SessionSnapshot {
            session_id: id,
            role: s.role,
            graph_version: r.version(),
            contents: s.arrangement.iter().map(|v| r.contents[v].clone()).collect(),
            documents: s.arrangement.iter().map(|v| r.documents[v].clone()).collect(),
        })
    }

    /// Propagates a selection made in session `id`. Only views of the
    /// session's arrangement take part, and only elements its role sees.
    pub fn select(
        &self,
        id: u64,
        view: &str,
        key: &ElementKey,
        graph_version: u64,
    ) -> Result<HighlightDirective, SyncError> {
        let s = self.session(id)?;
        if !s.arrangement.iter().any(|v| v == view) {
            return Err(SyncError::UnknownView(view.to_string()));
        }
        let r = self.render(&s.role).map_err(|e| SyncError::Generate(e.to_string()))?;
        let e = SelectionEvent { view_id: view.to_string(), element_key: key.clone(), graph_version };
        let mut d = propagate_indexed(&e, &r.traces, &r.index, &r.graph, &self.correlation)?;
        d.highlights.retain(|v, _| s.arrangement.contains(v));
        Ok(d)
    }
}
