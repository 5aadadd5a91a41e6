//! Fixed cooperation metamodel: actors take part in activities and handle
//! artifacts (documents and objects to build). Domain models declare their
//! own types and relations against this vocabulary, and context graphs are
//! checked against a domain model.

mod conformance;
mod domain;

use std::fmt;

pub use conformance::{validate_graph, ValidationReport, Violation};
pub use domain::{
    parse_domain_model, print_domain_model, AttributeDecl, Cardinality, DomainModel, DomainRelation, DomainType,
    ID_ATTRIBUTE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArtifactKind {
    Document,
    Object,
}

/// One of the three root entity kinds. Artifacts always carry a subkind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaEntityKind {
    Actor,
    Activity,
    Artifact(ArtifactKind),
}

impl MetaEntityKind {
    pub const ALL: [MetaEntityKind; 4] = [
        MetaEntityKind::Actor,
        MetaEntityKind::Activity,
        MetaEntityKind::Artifact(ArtifactKind::Document),
        MetaEntityKind::Artifact(ArtifactKind::Object),
    ];

    pub fn root_name(self) -> &'static str {
        match self {
            MetaEntityKind::Actor => "Actor",
            MetaEntityKind::Activity => "Activity",
            MetaEntityKind::Artifact(_) => "Artifact",
        }
    }

    pub fn artifact_subkind(self) -> Option<ArtifactKind> {
        match self {
            MetaEntityKind::Artifact(k) => Some(k),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<MetaEntityKind> {
        match s {
            "Actor" => Some(MetaEntityKind::Actor),
            "Activity" => Some(MetaEntityKind::Activity),
            "Artifact.Document" => Some(MetaEntityKind::Artifact(ArtifactKind::Document)),
            "Artifact.Object" => Some(MetaEntityKind::Artifact(ArtifactKind::Object)),
            _ => None,
        }
    }

    fn bit(self) -> u8 {
        match self {
            MetaEntityKind::Actor => 1,
            MetaEntityKind::Activity => 2,
            MetaEntityKind::Artifact(ArtifactKind::Document) => 4,
            MetaEntityKind::Artifact(ArtifactKind::Object) => 8,
        }
    }
}

impl fmt::Display for MetaEntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaEntityKind::Artifact(ArtifactKind::Document) => f.write_str("Artifact.Document"),
            MetaEntityKind::Artifact(ArtifactKind::Object) => f.write_str("Artifact.Object"),
            k => f.write_str(k.root_name()),
        }
    }
}

/// The set of entity kinds allowed at one end of a relation kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KindSet(u8);

impl KindSet {
    pub const ACTOR: KindSet = KindSet(1);
    pub const ACTIVITY: KindSet = KindSet(2);
    pub const DOCUMENT: KindSet = KindSet(4);
    pub const OBJECT: KindSet = KindSet(8);
    pub const ARTIFACT: KindSet = KindSet(4 | 8);

    pub const fn union(self, other: KindSet) -> KindSet {
        KindSet(self.0 | other.0)
    }

    pub fn contains(self, kind: MetaEntityKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn kinds(self) -> impl Iterator<Item = MetaEntityKind> {
        MetaEntityKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }
}

impl fmt::Display for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.contains(MetaEntityKind::Actor) {
            parts.push("Actor".to_string());
        }
        if self.contains(MetaEntityKind::Activity) {
            parts.push("Activity".to_string());
        }
        if self.0 & KindSet::ARTIFACT.0 == KindSet::ARTIFACT.0 {
            parts.push("Artifact".to_string());
        } else {
            for k in [ArtifactKind::Document, ArtifactKind::Object] {
                if self.contains(MetaEntityKind::Artifact(k)) {
                    parts.push(MetaEntityKind::Artifact(k).to_string());
                }
            }
        }
        f.write_str(&parts.join("|"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaRelationKind {
    pub name: &'static str,
    pub source: KindSet,
    pub target: KindSet,
    pub variability_tag: &'static str,
}

impl MetaRelationKind {
    pub fn admits(&self, source: MetaEntityKind, target: MetaEntityKind) -> bool {
        self.source.contains(source) && self.target.contains(target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metamodel {
    relations: Vec<MetaRelationKind>,
}

impl Metamodel {
    pub fn entity_kinds(&self) -> &'static [MetaEntityKind] {
        &MetaEntityKind::ALL
    }

    /// Root kind names: `Actor`, `Activity`, `Artifact`.
    pub fn root_kinds(&self) -> Vec<&'static str> {
        let mut roots: Vec<_> = MetaEntityKind::ALL.iter().map(|k| k.root_name()).collect();
        roots.dedup();
        roots
    }

    pub fn relation_kinds(&self) -> &[MetaRelationKind] {
        &self.relations
    }

    pub fn relation_kind(&self, name: &str) -> Option<&MetaRelationKind> {
        self.relations.iter().find(|r| r.name == name)
    }
}

const fn rel(name: &'static str, source: KindSet, target: KindSet, variability_tag: &'static str) -> MetaRelationKind {
    MetaRelationKind { name, source, target, variability_tag }
}

/// The fixed metamodel.
pub fn builtin_metamodel() -> Metamodel {
    Metamodel {
        relations: vec![
            rel("hierarchy", KindSet::ACTOR, KindSet::ACTOR, "hierarchy"),
            rel("mutual_adjustment", KindSet::ACTOR, KindSet::ACTOR, "mutual adjustment"),
            rel("depends_on", KindSet::ACTIVITY, KindSet::ACTIVITY, "interdependence"),
            rel("participates_in", KindSet::ACTOR, KindSet::ACTIVITY, "participation"),
            rel("responsible_for", KindSet::ACTOR, KindSet::ACTIVITY, "responsibility"),
            rel("manipulates", KindSet::ACTOR, KindSet::ARTIFACT, "manipulation"),
            rel("produces", KindSet::ACTOR.union(KindSet::ACTIVITY), KindSet::ARTIFACT, "production"),
            rel("concerns", KindSet::ACTIVITY, KindSet::ARTIFACT, "realization"),
            rel("refers_to", KindSet::DOCUMENT, KindSet::ARTIFACT, "reference"),
        ],
    }
}
