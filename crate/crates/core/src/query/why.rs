//! Backward traversal over `causes` and `effects` edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::QueryError;
use crate::engine::{explain, ProvenanceTree};
use crate::model::{EntityId, Role};
use crate::rules::{evaluate, ConditionOutcome, ConditionStatus, RuleSet, Truth};
use crate::store::{KnowledgeGraph, Provenance, RelationKind, Triple, TripleKey};

pub const DEFAULT_MAX_DEPTH: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationNode {
    pub id: EntityId,
    pub role: Role,
    /// Distance from the root at first discovery.
    pub level: usize,
}

/// The precondition set behind an `effects` edge and, when the rule text is
/// available, how each of its conditions fared against the situation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub precondition: EntityId,
    pub satisfied: Option<Truth>,
    pub conditions: Vec<ConditionOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationEdge {
    pub triple: Triple,
    pub provenance: ProvenanceTree,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub root: EntityId,
    pub nodes: Vec<ExplanationNode>,
    pub edges: Vec<ExplanationEdge>,
    /// `affects` edges leaving situations in the explanation.
    pub side: Vec<Triple>,
    pub depth_reached: usize,
    /// Some node at the depth limit still has incoming causal edges.
    pub truncated: bool,
}

impl Explanation {
    pub fn edge_keys(&self) -> BTreeSet<TripleKey> {
        self.edges.iter().map(|e| e.triple.key()).collect()
    }
}

/// Explains `event` by walking `causes` and `effects` edges backwards,
/// breadth first, up to `max_depth` hops. Situations end a branch. An edge
/// that would close a cycle among the edges already collected is dropped,
/// so the result is a DAG and grows monotonically with `max_depth`.
/// `rules` supplies the condition text for `effects` evidence.
pub fn why(
    graph: &KnowledgeGraph,
    event: &EntityId,
    max_depth: usize,
    rules: Option<&RuleSet>,
) -> Result<Explanation, QueryError> {
    match graph.role_of(event.as_str()) {
        None => return Err(QueryError::UnknownEntity(event.clone())),
        Some(Role::Event) => {}
        Some(role) => {
            return Err(QueryError::NotAnEvent {
                id: event.clone(),
                role,
            })
        }
    }

    let mut level: BTreeMap<EntityId, usize> = BTreeMap::from([(event.clone(), 0)]);
    let mut nodes = vec![ExplanationNode {
        id: event.clone(),
        role: Role::Event,
        level: 0,
    }];
    let mut forward: BTreeMap<EntityId, Vec<EntityId>> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut queue = VecDeque::from([event.clone()]);

    while let Some(n) = queue.pop_front() {
        let depth = level[&n];
        let incoming = incoming(graph, &n);
        if depth >= max_depth {
            truncated |= !incoming.is_empty();
            continue;
        }
        for key in incoming {
            let x = key.subject.clone();
            if reaches(&forward, &n, &x) {
                continue;
            }
            if !level.contains_key(&x) {
                let role = graph.role_of(x.as_str()).expect("triple subjects exist");
                level.insert(x.clone(), depth + 1);
                nodes.push(ExplanationNode {
                    id: x.clone(),
                    role,
                    level: depth + 1,
                });
                if role == Role::Event {
                    queue.push_back(x.clone());
                }
            }
            forward.entry(x).or_default().push(n.clone());
            let provenance = explain(graph, &key).expect("edge comes from the graph");
            let evidence = if key.predicate == RelationKind::Effects {
                evidence(graph, &key, rules)
            } else {
                Vec::new()
            };
            edges.push(ExplanationEdge {
                triple: graph.triple(&key).expect("edge comes from the graph"),
                provenance,
                evidence,
            });
        }
    }

    let side = nodes
        .iter()
        .filter(|n| n.role == Role::Situation)
        .flat_map(|n| {
            graph
                .objects_of(&n.id, RelationKind::Affects)
                .into_iter()
                .map(|o| (n.id.clone(), o.clone()))
        })
        .filter_map(|(s, o)| graph.triple(&TripleKey::new(s, RelationKind::Affects, o)))
        .collect();

    Ok(Explanation {
        root: event.clone(),
        depth_reached: nodes.iter().map(|n| n.level).max().unwrap_or(0),
        nodes,
        edges,
        side,
        truncated,
    })
}

/// Incoming `causes` then `effects` edges of `n`, each sorted by subject.
fn incoming(graph: &KnowledgeGraph, n: &EntityId) -> Vec<TripleKey> {
    [RelationKind::Causes, RelationKind::Effects]
        .into_iter()
        .flat_map(|p| {
            graph
                .subjects_of(p, n)
                .into_iter()
                .map(move |s| TripleKey::new(s.clone(), p, n.clone()))
        })
        .collect()
}

/// Whether `to` is reachable from `from` along collected cause-to-effect edges.
fn reaches(forward: &BTreeMap<EntityId, Vec<EntityId>>, from: &EntityId, to: &EntityId) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = vec![from];
    while let Some(cur) = stack.pop() {
        if cur == to {
            return true;
        }
        if seen.insert(cur) {
            stack.extend(forward.get(cur).into_iter().flatten());
        }
    }
    false
}

/// Preconditions satisfied by the situation of an `effects` edge: the ones
/// cited in its derivation, or for asserted edges, those whose event kind
/// matches the effected event.
fn evidence(graph: &KnowledgeGraph, key: &TripleKey, rules: Option<&RuleSet>) -> Vec<Evidence> {
    let pcs: Vec<EntityId> = match graph.provenance(key) {
        Some(Provenance::Derived { premises, .. }) => premises
            .iter()
            .filter(|p| p.predicate == RelationKind::Satisfies && p.subject == key.subject)
            .map(|p| p.object.clone())
            .collect(),
        _ => {
            let kind = graph.event(key.object.as_str()).map(|e| e.kind());
            graph
                .objects_of(&key.subject, RelationKind::Satisfies)
                .into_iter()
                .filter(|pc| graph.precondition(pc.as_str()).map(|p| p.event_kind()) == kind)
                .cloned()
                .collect()
        }
    };
    let situation = graph.situation(key.subject.as_str());
    pcs.into_iter()
        .map(|pc| {
            let result = rules
                .and_then(|r| r.precondition(pc.as_str()))
                .zip(situation)
                .map(|(set, s)| evaluate(set, s));
            Evidence {
                precondition: pc,
                satisfied: result.as_ref().map(|r| r.satisfied),
                conditions: result.map(|r| r.per_condition).unwrap_or_default(),
            }
        })
        .collect()
}

pub(super) fn status_word(status: &ConditionStatus) -> String {
    match status {
        ConditionStatus::True => "true".into(),
        ConditionStatus::False => "false".into(),
        ConditionStatus::Unknown => "unknown".into(),
        ConditionStatus::Error(e) => format!("error: {e}"),
    }
}

impl Evidence {
    /// One `evidence` line per condition, or a single summary line when the
    /// conditions are unavailable.
    pub fn lines(&self) -> Vec<String> {
        if self.conditions.is_empty() {
            return vec![format!("evidence {}: satisfied", self.precondition)];
        }
        self.conditions
            .iter()
            .map(|c| {
                let observed = c
                    .observed
                    .as_ref()
                    .map_or("not observed".to_string(), |v| format!("observed {v}"));
                format!(
                    "evidence {}: {} ({observed}) -> {}",
                    self.precondition,
                    c.condition,
                    status_word(&c.status)
                )
            })
            .collect()
    }
}

impl fmt::Display for Explanation {
    /// Indented tree, one edge per line; summary lines start with `#`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut children: BTreeMap<&EntityId, Vec<&ExplanationEdge>> = BTreeMap::new();
        for e in &self.edges {
            children.entry(&e.triple.object).or_default().push(e);
        }
        writeln!(f, "{}", self.root)?;
        let mut expanded = BTreeSet::new();
        write_children(f, &self.root, &children, 1, &mut expanded)?;
        for t in &self.side {
            writeln!(f, "side: {} {} {}", t.subject, t.predicate, t.object)?;
        }
        writeln!(
            f,
            "# {} edge(s), depth {}{}",
            self.edges.len(),
            self.depth_reached,
            if self.truncated { ", truncated" } else { "" }
        )
    }
}

fn write_children(
    f: &mut fmt::Formatter<'_>,
    node: &EntityId,
    children: &BTreeMap<&EntityId, Vec<&ExplanationEdge>>,
    depth: usize,
    expanded: &mut BTreeSet<EntityId>,
) -> fmt::Result {
    if !expanded.insert(node.clone()) {
        return Ok(());
    }
    let pad = "  ".repeat(depth);
    for edge in children.get(node).into_iter().flatten() {
        let t = &edge.triple;
        let origin = edge.provenance.rule().unwrap_or("asserted");
        let again = if expanded.contains(&t.subject) && children.contains_key(&t.subject) {
            " (see above)"
        } else {
            ""
        };
        writeln!(
            f,
            "{pad}<- {} -- {} [{origin}]{again}",
            t.predicate, t.subject
        )?;
        for ev in &edge.evidence {
            for line in ev.lines() {
                writeln!(f, "{pad}     {line}")?;
            }
        }
        write_children(f, &t.subject, children, depth + 1, expanded)?;
    }
    Ok(())
}
