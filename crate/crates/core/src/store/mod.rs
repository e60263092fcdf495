//! Schema-enforcing triple store.
//!
//! Entities are indexed by id; triples are kept in a sorted map plus three
//! secondary indexes (subject, predicate, object). Every mutation goes
//! through the schema table in [`RelationKind::signature`].

mod persist;
mod relation;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{
    Entity, EntityId, GeoEvent, GeoObject, GeoSituation, ModelError, PreconditionRef, Role,
    SpatioTemporalRegion,
};

pub use relation::{RelationKind, UnknownRelation};
pub use validate::ValidationReport;

/// Identity of a triple; orders lexicographically by (subject, predicate, object).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleKey {
    pub subject: EntityId,
    pub predicate: RelationKind,
    pub object: EntityId,
}

impl TripleKey {
    pub fn new(subject: EntityId, predicate: RelationKind, object: EntityId) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }
}

impl fmt::Display for TripleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Asserted,
    Derived {
        rule: String,
        premises: Vec<TripleKey>,
    },
}

impl Provenance {
    pub fn is_derived(&self) -> bool {
        matches!(self, Provenance::Derived { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub subject: EntityId,
    pub predicate: RelationKind,
    pub object: EntityId,
    pub provenance: Provenance,
}

impl Triple {
    pub fn key(&self) -> TripleKey {
        TripleKey::new(self.subject.clone(), self.predicate, self.object.clone())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)?;
        if let Provenance::Derived { rule, .. } = &self.provenance {
            write!(f, " [derived {rule}]")?;
        }
        Ok(())
    }
}

/// Triple pattern; `None` is a wildcard.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub subject: Option<EntityId>,
    pub predicate: Option<RelationKind>,
    pub object: Option<EntityId>,
}

impl Pattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn subject(mut self, id: EntityId) -> Self {
        self.subject = Some(id);
        self
    }

    pub fn predicate(mut self, p: RelationKind) -> Self {
        self.predicate = Some(p);
        self
    }

    pub fn object(mut self, id: EntityId) -> Self {
        self.object = Some(id);
        self
    }

    pub fn matches(&self, key: &TripleKey) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == key.subject)
            && self.predicate.is_none_or(|p| p == key.predicate)
            && self.object.as_ref().is_none_or(|o| *o == key.object)
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("duplicate entity id {0}")]
    DuplicateId(EntityId),
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error(
        "schema violation: `{predicate}` does not admit ({subject_role}, {object_role}) for {subject} -> {object}; allowed: {}",
        allowed(*predicate)
    )]
    SchemaViolation {
        predicate: RelationKind,
        subject: EntityId,
        subject_role: Role,
        object: EntityId,
        object_role: Role,
    },
    #[error("unknown triple `{0}`")]
    UnknownTriple(TripleKey),
    #[error("premise `{premise}` of derived triple `{triple}` is not in the graph")]
    MissingPremise {
        triple: Box<TripleKey>,
        premise: Box<TripleKey>,
    },
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("{0}")]
    Syntax(String),
    #[error("line {line}: {source}")]
    Load {
        line: usize,
        #[source]
        source: Box<StoreError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn allowed(p: RelationKind) -> String {
    p.signature()
        .iter()
        .map(|(s, o)| format!("({s}, {o})"))
        .collect::<Vec<_>>()
        .join(" | ")
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::DuplicateId(_) => "E-STORE-DUPID",
            StoreError::UnknownEntity(_) => "E-STORE-UNKNOWN",
            StoreError::SchemaViolation { .. } => "E-STORE-SCHEMA",
            StoreError::UnknownTriple(_) => "E-STORE-NOTRIPLE",
            StoreError::MissingPremise { .. } => "E-STORE-PREMISE",
            StoreError::Invalid(e) => e.code(),
            StoreError::Syntax(_) => "E-STORE-PARSE",
            StoreError::Load { source, .. } => source.code(),
            StoreError::Io(_) => "E-STORE-IO",
        }
    }

    /// Strips `Load` wrappers.
    pub fn root(&self) -> &StoreError {
        match self {
            StoreError::Load { source, .. } => source.root(),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entities: BTreeMap<EntityId, Entity>,
    triples: BTreeMap<TripleKey, Provenance>,
    by_subject: BTreeMap<EntityId, BTreeSet<TripleKey>>,
    by_predicate: BTreeMap<RelationKind, BTreeSet<TripleKey>>,
    by_object: BTreeMap<EntityId, BTreeSet<TripleKey>>,
}

/// Graphs are equal when they hold the same entities and the same triples
/// with the same provenance.
impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.entities == other.entities && self.triples == other.triples
    }
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.triples.is_empty()
    }

    pub fn add_entity(&mut self, entity: impl Into<Entity>) -> Result<(), StoreError> {
        let entity = entity.into();
        if self.entities.contains_key(entity.id()) {
            return Err(StoreError::DuplicateId(entity.id().clone()));
        }
        self.entities.insert(entity.id().clone(), entity);
        Ok(())
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains_entity(&self, id: &str) -> bool {
        self.entities.contains_key(id)
    }

    pub fn role_of(&self, id: &str) -> Option<Role> {
        self.entities.get(id).map(Entity::role)
    }

    /// All entities in id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn events(&self) -> impl Iterator<Item = &GeoEvent> {
        self.entities.values().filter_map(|e| match e {
            Entity::Event(ev) => Some(ev),
            _ => None,
        })
    }

    pub fn objects(&self) -> impl Iterator<Item = &GeoObject> {
        self.entities.values().filter_map(|e| match e {
            Entity::Object(o) => Some(o),
            _ => None,
        })
    }

    pub fn situations(&self) -> impl Iterator<Item = &GeoSituation> {
        self.entities.values().filter_map(|e| match e {
            Entity::Situation(s) => Some(s),
            _ => None,
        })
    }

    pub fn regions(&self) -> impl Iterator<Item = &SpatioTemporalRegion> {
        self.entities.values().filter_map(|e| match e {
            Entity::Region(r) => Some(r),
            _ => None,
        })
    }

    pub fn preconditions(&self) -> impl Iterator<Item = &PreconditionRef> {
        self.entities.values().filter_map(|e| match e {
            Entity::Precondition(p) => Some(p),
            _ => None,
        })
    }

    pub fn event(&self, id: &str) -> Option<&GeoEvent> {
        match self.entities.get(id) {
            Some(Entity::Event(e)) => Some(e),
            _ => None,
        }
    }

    pub fn situation(&self, id: &str) -> Option<&GeoSituation> {
        match self.entities.get(id) {
            Some(Entity::Situation(s)) => Some(s),
            _ => None,
        }
    }

    pub fn precondition(&self, id: &str) -> Option<&PreconditionRef> {
        match self.entities.get(id) {
            Some(Entity::Precondition(p)) => Some(p),
            _ => None,
        }
    }

    fn check_schema(&self, key: &TripleKey) -> Result<(), StoreError> {
        let subject_role = self
            .role_of(key.subject.as_str())
            .ok_or_else(|| StoreError::UnknownEntity(key.subject.clone()))?;
        let object_role = self
            .role_of(key.object.as_str())
            .ok_or_else(|| StoreError::UnknownEntity(key.object.clone()))?;
        if key.predicate.admits(subject_role, object_role) {
            Ok(())
        } else {
            Err(StoreError::SchemaViolation {
                predicate: key.predicate,
                subject: key.subject.clone(),
                subject_role,
                object: key.object.clone(),
                object_role,
            })
        }
    }

    fn insert(&mut self, key: TripleKey, provenance: Provenance) {
        self.by_subject
            .entry(key.subject.clone())
            .or_default()
            .insert(key.clone());
        self.by_predicate
            .entry(key.predicate)
            .or_default()
            .insert(key.clone());
        self.by_object
            .entry(key.object.clone())
            .or_default()
            .insert(key.clone());
        self.triples.insert(key, provenance);
    }

    /// Adds an asserted triple. Returns `false` if the triple was already
    /// present, in which case its existing provenance is kept.
    pub fn assert(
        &mut self,
        subject: &EntityId,
        predicate: RelationKind,
        object: &EntityId,
    ) -> Result<bool, StoreError> {
        self.assert_key(TripleKey::new(subject.clone(), predicate, object.clone()))
    }

    pub fn assert_key(&mut self, key: TripleKey) -> Result<bool, StoreError> {
        self.check_schema(&key)?;
        if self.triples.contains_key(&key) {
            return Ok(false);
        }
        self.insert(key, Provenance::Asserted);
        Ok(true)
    }

    /// Adds a derived triple. Premises must already be in the graph, which
    /// keeps provenance acyclic. Returns `false` if the triple already existed.
    pub fn insert_derived(
        &mut self,
        key: TripleKey,
        rule: impl Into<String>,
        premises: Vec<TripleKey>,
    ) -> Result<bool, StoreError> {
        self.check_schema(&key)?;
        if self.triples.contains_key(&key) {
            return Ok(false);
        }
        if let Some(missing) = premises.iter().find(|p| !self.triples.contains_key(*p)) {
            return Err(StoreError::MissingPremise {
                triple: Box::new(key),
                premise: Box::new(missing.clone()),
            });
        }
        self.insert(
            key,
            Provenance::Derived {
                rule: rule.into(),
                premises,
            },
        );
        Ok(true)
    }

    /// Inserts a batch in dependency order: asserted triples first, then
    /// derived ones as their premises appear. A derived triple whose premises
    /// never appear (missing or cyclic) fails with `MissingPremise`. Errors
    /// carry the index of the offending item.
    pub fn insert_all(
        &mut self,
        items: Vec<(TripleKey, Provenance)>,
    ) -> Result<(), (usize, StoreError)> {
        let mut derived = Vec::new();
        for (i, (key, prov)) in items.into_iter().enumerate() {
            match prov {
                Provenance::Asserted => {
                    self.assert_key(key).map_err(|e| (i, e))?;
                }
                Provenance::Derived { rule, premises } => derived.push((i, key, rule, premises)),
            }
        }
        while !derived.is_empty() {
            let before = derived.len();
            let mut rest = Vec::new();
            for (i, key, rule, premises) in derived {
                if premises.iter().all(|k| self.contains(k)) {
                    self.insert_derived(key, rule, premises)
                        .map_err(|e| (i, e))?;
                } else {
                    rest.push((i, key, rule, premises));
                }
            }
            if rest.len() == before {
                let (i, key, _, premises) = rest.swap_remove(0);
                let missing = premises
                    .into_iter()
                    .find(|k| !self.contains(k))
                    .expect("blocked on a premise");
                return Err((
                    i,
                    StoreError::MissingPremise {
                        triple: Box::new(key),
                        premise: Box::new(missing),
                    },
                ));
            }
            derived = rest;
        }
        Ok(())
    }

    pub fn contains(&self, key: &TripleKey) -> bool {
        self.triples.contains_key(key)
    }

    pub fn provenance(&self, key: &TripleKey) -> Option<&Provenance> {
        self.triples.get(key)
    }

    pub fn triple(&self, key: &TripleKey) -> Option<Triple> {
        self.triples.get(key).map(|p| make_triple(key, p))
    }

    /// All triples in (subject, predicate, object) order.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().map(|(k, p)| make_triple(k, p))
    }

    pub fn triple_keys(&self) -> impl Iterator<Item = &TripleKey> {
        self.triples.keys()
    }

    /// Keys matching `pattern`, in sorted order, using the most selective index.
    pub fn find_keys<'a>(
        &'a self,
        pattern: &'a Pattern,
    ) -> Box<dyn Iterator<Item = &'a TripleKey> + 'a> {
        let candidates: Box<dyn Iterator<Item = &TripleKey>> = if let Some(s) = &pattern.subject {
            match self.by_subject.get(s) {
                Some(set) => Box::new(set.iter()),
                None => Box::new(std::iter::empty()),
            }
        } else if let Some(o) = &pattern.object {
            match self.by_object.get(o) {
                Some(set) => Box::new(set.iter()),
                None => Box::new(std::iter::empty()),
            }
        } else if let Some(p) = pattern.predicate {
            match self.by_predicate.get(&p) {
                Some(set) => Box::new(set.iter()),
                None => Box::new(std::iter::empty()),
            }
        } else {
            Box::new(self.triples.keys())
        };
        Box::new(candidates.filter(move |k| pattern.matches(k)))
    }

    pub fn find(&self, pattern: &Pattern) -> Vec<Triple> {
        self.find_keys(pattern)
            .map(|k| make_triple(k, &self.triples[k]))
            .collect()
    }

    /// Objects `o` with `(subject, predicate, o)` in the graph, sorted.
    pub fn objects_of(&self, subject: &EntityId, predicate: RelationKind) -> Vec<&EntityId> {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .filter(|k| k.predicate == predicate)
            .map(|k| &k.object)
            .collect()
    }

    /// Subjects `s` with `(s, predicate, object)` in the graph, sorted.
    pub fn subjects_of(&self, predicate: RelationKind, object: &EntityId) -> Vec<&EntityId> {
        self.by_object
            .get(object)
            .into_iter()
            .flatten()
            .filter(|k| k.predicate == predicate)
            .map(|k| &k.subject)
            .collect()
    }

    /// The region reached through `spatio-temporally-present`; the
    /// lexicographically first one if several are asserted.
    pub fn region_of(&self, id: &EntityId) -> Result<Option<&SpatioTemporalRegion>, StoreError> {
        if !self.entities.contains_key(id) {
            return Err(StoreError::UnknownEntity(id.clone()));
        }
        Ok(self
            .region_triple(id)
            .and_then(|k| match self.entities.get(&k.object) {
                Some(Entity::Region(r)) => Some(r),
                _ => None,
            }))
    }

    /// The `spatio-temporally-present` triple backing [`Self::region_of`].
    pub fn region_triple(&self, id: &EntityId) -> Option<&TripleKey> {
        self.by_subject
            .get(id)?
            .iter()
            .find(|k| k.predicate == RelationKind::SpatioTemporallyPresent)
    }

    /// Every region reached through `spatio-temporally-present`, with its
    /// triple, in key order.
    pub fn regions_of(&self, id: &EntityId) -> Vec<(&TripleKey, &SpatioTemporalRegion)> {
        let Some(keys) = self.by_subject.get(id) else {
            return Vec::new();
        };
        keys.iter()
            .filter(|k| k.predicate == RelationKind::SpatioTemporallyPresent)
            .filter_map(|k| match self.entities.get(&k.object) {
                Some(Entity::Region(r)) => Some((k, r)),
                _ => None,
            })
            .collect()
    }

    /// True when every secondary index holds exactly the triple set.
    pub fn indexes_consistent(&self) -> bool {
        let all: BTreeSet<&TripleKey> = self.triples.keys().collect();
        let check = |flat: BTreeSet<&TripleKey>, count: usize| flat == all && count == all.len();
        let subj: Vec<&TripleKey> = self.by_subject.values().flatten().collect();
        let pred: Vec<&TripleKey> = self.by_predicate.values().flatten().collect();
        let obj: Vec<&TripleKey> = self.by_object.values().flatten().collect();
        self.by_subject
            .iter()
            .all(|(s, set)| set.iter().all(|k| &k.subject == s))
            && self
                .by_predicate
                .iter()
                .all(|(p, set)| set.iter().all(|k| &k.predicate == p))
            && self
                .by_object
                .iter()
                .all(|(o, set)| set.iter().all(|k| &k.object == o))
            && check(subj.iter().copied().collect(), subj.len())
            && check(pred.iter().copied().collect(), pred.len())
            && check(obj.iter().copied().collect(), obj.len())
    }
}

fn make_triple(key: &TripleKey, provenance: &Provenance) -> Triple {
    Triple {
        subject: key.subject.clone(),
        predicate: key.predicate,
        object: key.object.clone(),
        provenance: provenance.clone(),
    }
}
