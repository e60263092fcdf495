//! Forward-chaining inference of `satisfies`, `effects`, `causes` and
//! `affects` edges.
//!
//! Each pass evaluates every rule against a snapshot of the graph and then
//! inserts the new triples; passes repeat until one adds nothing. All rules
//! are monotone and the candidate edge set is finite, so this reaches the
//! least fixpoint. Enumeration follows id order, so the result (including
//! which premises are recorded) is deterministic.

mod explain;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{Duration, Entity, EntityId, GeoSituation, PreconditionRef, Role};
use crate::rules::{evaluate, CauseConstraint, CauseRule, RuleSet, Truth};
use crate::spatiotemporal::{co_occurs, precedes, spatial_overlap};
use crate::store::{KnowledgeGraph, RelationKind, StoreError, Triple, TripleKey};

pub use explain::{explain, ProvenanceTree};

pub const RULE_SATISFIES: &str = "R-SAT";
pub const RULE_EFFECTS: &str = "R-EFF";
pub const RULE_CAUSES: &str = "R-CAU";
pub const RULE_AFFECTS: &str = "R-AFF";

/// Provenance label for a `causes` edge produced by cause rule `id`.
pub fn cause_rule_label(id: &str) -> String {
    format!("{RULE_CAUSES}:{id}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest allowed gap between a situation's end and the start of the
    /// event it effects.
    pub max_gap: Duration,
    pub require_spatial_overlap: bool,
}

impl EngineConfig {
    pub fn check(&self) -> Result<(), EngineError> {
        if self.max_gap.is_negative() {
            return Err(EngineError::Config(format!(
                "max_gap must be non-negative, got {}",
                self.max_gap
            )));
        }
        Ok(())
    }
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_gap: Duration::hours(24),
            require_spatial_overlap: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("graph failed validation: {}", .0.join("; "))]
    ValidationFailure(Vec<String>),
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("precondition `{id}` conflicts with an existing graph entity")]
    PreconditionConflict { id: EntityId },
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::ValidationFailure(_) => "E-ENGINE-VALIDATION",
            EngineError::Config(_) => "E-ENGINE-CONFIG",
            EngineError::PreconditionConflict { .. } => "E-ENGINE-PRECONDITION",
            EngineError::Store(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SkipReason {
    UnknownSatisfaction,
    MixedSetting,
    NoTemporalAdjacency,
    NoSpatialOverlap,
}

impl SkipReason {
    pub fn code(self) -> &'static str {
        match self {
            SkipReason::UnknownSatisfaction => "unknown-satisfaction",
            SkipReason::MixedSetting => "mixed-setting",
            SkipReason::NoTemporalAdjacency => "no-temporal-adjacency",
            SkipReason::NoSpatialOverlap => "no-spatial-overlap",
        }
    }
}

/// A rule instance that was considered but not fired.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub rule: String,
    pub entities: Vec<EntityId>,
    pub reason: SkipReason,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SKIP {}", self.rule)?;
        for e in &self.entities {
            write!(f, " {e}")?;
        }
        write!(f, " reason={}", self.reason.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub derived: Vec<Triple>,
    pub iterations: usize,
    pub diagnostics: Vec<Diagnostic>,
}

struct Candidate {
    rule: String,
    premises: Vec<TripleKey>,
}

#[derive(Default)]
struct Pass {
    candidates: BTreeMap<TripleKey, Candidate>,
    diagnostics: BTreeSet<Diagnostic>,
}

impl Pass {
    fn propose(
        &mut self,
        graph: &KnowledgeGraph,
        key: TripleKey,
        rule: impl Into<String>,
        premises: Vec<TripleKey>,
    ) {
        if graph.contains(&key) {
            return;
        }
        self.candidates.entry(key).or_insert_with(|| Candidate {
            rule: rule.into(),
            premises,
        });
    }

    fn skip(&mut self, rule: &str, entities: &[&EntityId], reason: SkipReason) {
        self.diagnostics.insert(Diagnostic {
            rule: rule.to_string(),
            entities: entities.iter().map(|e| (*e).clone()).collect(),
            reason,
        });
    }
}

pub fn infer(
    graph: &mut KnowledgeGraph,
    rules: &RuleSet,
    config: &EngineConfig,
) -> Result<InferenceResult, EngineError> {
    config.check()?;
    let report = graph.validate();
    if !report.is_valid() {
        return Err(EngineError::ValidationFailure(report.errors));
    }
    register_preconditions(graph, rules)?;

    let mut derived = Vec::new();
    let mut diagnostics = BTreeSet::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut pass = Pass::default();
        satisfies_rule(graph, rules, &mut pass);
        effects_rule(graph, config, &mut pass);
        for rule in rules.cause_rules() {
            causes_rule(graph, rule, config, &mut pass);
        }
        affects_rule(graph, &mut pass);
        diagnostics.extend(pass.diagnostics);
        if pass.candidates.is_empty() {
            break;
        }
        for (key, c) in pass.candidates {
            graph.insert_derived(key.clone(), c.rule, c.premises)?;
            derived.push(key);
        }
    }
    derived.sort();
    let derived = derived
        .iter()
        .map(|k| graph.triple(k).expect("derived triple was just inserted"))
        .collect();
    Ok(InferenceResult {
        derived,
        iterations,
        diagnostics: diagnostics.into_iter().collect(),
    })
}

fn register_preconditions(graph: &mut KnowledgeGraph, rules: &RuleSet) -> Result<(), EngineError> {
    for pc in rules.preconditions() {
        match graph.entity(pc.id().as_str()) {
            None => graph.add_entity(
                PreconditionRef::new(pc.id().clone(), pc.event_kind())
                    .map_err(StoreError::Invalid)?,
            )?,
            Some(Entity::Precondition(p)) if p.event_kind() == pc.event_kind() => {}
            Some(_) => {
                return Err(EngineError::PreconditionConflict {
                    id: pc.id().clone(),
                })
            }
        }
    }
    Ok(())
}

fn satisfies_rule(graph: &KnowledgeGraph, rules: &RuleSet, pass: &mut Pass) {
    for situation in graph.situations() {
        for pc in rules.preconditions() {
            let key = TripleKey::new(
                situation.id().clone(),
                RelationKind::Satisfies,
                pc.id().clone(),
            );
            match evaluate(pc, situation).satisfied {
                Truth::True => pass.propose(graph, key, RULE_SATISFIES, Vec::new()),
                Truth::Unknown => pass.skip(
                    RULE_SATISFIES,
                    &[situation.id(), pc.id()],
                    SkipReason::UnknownSatisfaction,
                ),
                Truth::False => {}
            }
        }
    }
}

fn effects_rule(graph: &KnowledgeGraph, config: &EngineConfig, pass: &mut Pass) {
    let satisfied: Vec<TripleKey> = graph
        .find_keys(&crate::store::Pattern::any().predicate(RelationKind::Satisfies))
        .cloned()
        .collect();
    for sat in satisfied {
        let (Some(situation), Some(pc)) = (
            graph.situation(sat.subject.as_str()),
            graph.precondition(sat.object.as_str()),
        ) else {
            continue;
        };
        let setting = graph.subjects_of(RelationKind::Setting, situation.id());
        if setting
            .iter()
            .any(|x| graph.role_of(x.as_str()) != Some(Role::Object))
        {
            pass.skip(
                RULE_EFFECTS,
                &[situation.id(), pc.id()],
                SkipReason::MixedSetting,
            );
            continue;
        }
        for event in graph.events().filter(|e| e.kind() == pc.event_kind()) {
            effects_candidate(graph, config, pass, &sat, situation, &setting, event.id());
        }
    }
}

/// An event with several regions qualifies through any of them, and any
/// overlapping setting region is enough, which keeps the rule monotone.
fn effects_candidate(
    graph: &KnowledgeGraph,
    config: &EngineConfig,
    pass: &mut Pass,
    sat: &TripleKey,
    situation: &GeoSituation,
    setting: &[&EntityId],
    event: &EntityId,
) {
    let ids = [situation.id(), event];
    let during = situation.holds_during();
    let adjacent: Vec<_> = graph
        .regions_of(event)
        .into_iter()
        .filter(|(_, r)| {
            precedes(&during, &r.interval)
                && r.interval.start().unix() - during.end().unix() <= config.max_gap.secs()
        })
        .collect();
    if adjacent.is_empty() {
        pass.skip(RULE_EFFECTS, &ids, SkipReason::NoTemporalAdjacency);
        return;
    }
    for (region_key, region) in adjacent {
        let mut premises = vec![sat.clone()];
        premises.extend(
            setting.iter().map(|x| {
                TripleKey::new((*x).clone(), RelationKind::Setting, situation.id().clone())
            }),
        );
        premises.push(region_key.clone());
        if config.require_spatial_overlap {
            let overlapping: Vec<TripleKey> = setting
                .iter()
                .flat_map(|x| graph.regions_of(x))
                .filter(|(_, r)| spatial_overlap(&r.geometry, &region.geometry))
                .map(|(k, _)| k.clone())
                .collect();
            if overlapping.is_empty() {
                continue;
            }
            premises.extend(overlapping);
        }
        let key = TripleKey::new(situation.id().clone(), RelationKind::Effects, event.clone());
        pass.propose(graph, key, RULE_EFFECTS, premises);
        return;
    }
    pass.skip(RULE_EFFECTS, &ids, SkipReason::NoSpatialOverlap);
}

/// Whether regions `a` (cause) and `b` (effect) satisfy a cause-rule constraint.
pub fn constraint_holds(
    constraint: CauseConstraint,
    a: &crate::model::SpatioTemporalRegion,
    b: &crate::model::SpatioTemporalRegion,
    config: &EngineConfig,
) -> bool {
    let spatial_ok =
        || !config.require_spatial_overlap || spatial_overlap(&a.geometry, &b.geometry);
    match constraint {
        CauseConstraint::CoOccurs => co_occurs(a, b),
        CauseConstraint::Precedes => precedes(&a.interval, &b.interval) && spatial_ok(),
        CauseConstraint::PrecedesWithin(gap) => {
            precedes(&a.interval, &b.interval)
                && b.interval.start().unix() - a.interval.end().unix() <= gap.secs()
                && spatial_ok()
        }
    }
}

fn causes_rule(graph: &KnowledgeGraph, rule: &CauseRule, config: &EngineConfig, pass: &mut Pass) {
    let with_region = |kind: &str| {
        graph
            .events()
            .filter(|e| e.kind() == kind)
            .flat_map(|e| {
                graph
                    .regions_of(e.id())
                    .into_iter()
                    .map(move |(k, r)| (e.id(), r, k.clone()))
            })
            .collect::<Vec<_>>()
    };
    let causes = with_region(rule.cause_kind());
    let effects = with_region(rule.effect_kind());
    for (a, ra, ka) in &causes {
        for (b, rb, kb) in &effects {
            if a == b || !constraint_holds(rule.constraint(), ra, rb, config) {
                continue;
            }
            // with several regions per event the first qualifying pair is cited
            let key = TripleKey::new((*a).clone(), RelationKind::Causes, (*b).clone());
            pass.propose(
                graph,
                key,
                cause_rule_label(rule.id()),
                vec![ka.clone(), kb.clone()],
            );
        }
    }
}

fn affects_rule(graph: &KnowledgeGraph, pass: &mut Pass) {
    let settings: Vec<TripleKey> = graph
        .find_keys(&crate::store::Pattern::any().predicate(RelationKind::Setting))
        .filter(|k| graph.role_of(k.subject.as_str()) == Some(Role::Event))
        .cloned()
        .collect();
    for setting in settings {
        for participant in graph.subjects_of(RelationKind::ParticipantIn, &setting.subject) {
            let key = TripleKey::new(
                setting.object.clone(),
                RelationKind::Affects,
                participant.clone(),
            );
            let premise = TripleKey::new(
                participant.clone(),
                RelationKind::ParticipantIn,
                setting.subject.clone(),
            );
            pass.propose(graph, key, RULE_AFFECTS, vec![setting.clone(), premise]);
        }
    }
}
