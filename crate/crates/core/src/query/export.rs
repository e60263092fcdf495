//! DOT and JSON renderings. Both are deterministic: entities and triples are
//! emitted in id / key order and JSON object keys in a fixed order.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Evidence, Explanation, QueryError};
use crate::engine::ProvenanceTree;
use crate::model::{
    Entity, EntityId, GeoEvent, GeoObject, GeoSituation, Geometry, Measurement, PreconditionRef,
    Role, SpatioTemporalRegion, TimeInterval, Value,
};
use crate::store::{KnowledgeGraph, Provenance, RelationKind, TripleKey};

fn shape(role: Role) -> &'static str {
    match role {
        Role::Event => "ellipse",
        Role::Object => "box",
        Role::Situation => "diamond",
        Role::Region => "note",
        Role::Precondition => "hexagon",
        Role::Geometry | Role::Time => "plaintext",
    }
}

fn quote(s: &str) -> String {
    let escaped = s
        .replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n");
    format!("\"{escaped}\"")
}

fn node_label(entity: &Entity) -> String {
    match entity {
        Entity::Region(r) => format!("{}\n{}", r.id, r.geometry),
        Entity::Situation(s) => format!("{}\n{}", s.id(), s.holds_during()),
        other => match other.kind() {
            Some(kind) => format!("{}\n{kind}", other.id()),
            None => other.id().to_string(),
        },
    }
}

fn edge_line(out: &mut String, key: &TripleKey, derived: bool) {
    let style = if derived { ", style=dashed" } else { "" };
    writeln!(
        out,
        "  {} -> {} [label={}{style}];",
        quote(key.subject.as_str()),
        quote(key.object.as_str()),
        quote(key.predicate.token())
    )
    .unwrap();
}

/// Nodes are shaped by role; derived edges are dashed.
pub fn graph_to_dot(graph: &KnowledgeGraph) -> String {
    let mut out = String::from("digraph geocausal {\n");
    for e in graph.entities() {
        writeln!(
            out,
            "  {} [shape={}, label={}];",
            quote(e.id().as_str()),
            shape(e.role()),
            quote(&node_label(e))
        )
        .unwrap();
    }
    for t in graph.triples() {
        edge_line(&mut out, &t.key(), t.provenance.is_derived());
    }
    out.push_str("}\n");
    out
}

/// The explanation's nodes and causal edges; the root is drawn bold.
pub fn explanation_to_dot(graph: &KnowledgeGraph, ex: &Explanation) -> String {
    let mut out = String::from("digraph why {\n");
    for n in &ex.nodes {
        let label = graph
            .entity(n.id.as_str())
            .map_or_else(|| n.id.to_string(), node_label);
        let bold = if n.id == ex.root { ", style=bold" } else { "" };
        writeln!(
            out,
            "  {} [shape={}, label={}{bold}];",
            quote(n.id.as_str()),
            shape(n.role),
            quote(&label)
        )
        .unwrap();
    }
    for e in &ex.edges {
        edge_line(&mut out, &e.triple.key(), e.triple.provenance.is_derived());
    }
    for t in &ex.side {
        writeln!(
            out,
            "  {} -> {} [label={}, style=dotted];",
            quote(t.subject.as_str()),
            quote(t.object.as_str()),
            quote(t.predicate.token())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    entities: Vec<EntityDoc>,
    triples: Vec<TripleDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
enum EntityDoc {
    Object {
        id: String,
        kind: String,
        attributes: BTreeMap<String, String>,
    },
    Event {
        id: String,
        kind: String,
    },
    Situation {
        id: String,
        start: String,
        end: String,
        observations: BTreeMap<String, String>,
    },
    Region {
        id: String,
        geometry: String,
        start: String,
        end: String,
    },
    Precondition {
        id: String,
        event_kind: String,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct KeyDoc {
    subject: String,
    predicate: String,
    object: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct TripleDoc {
    subject: String,
    predicate: String,
    object: String,
    provenance: ProvenanceDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ProvenanceDoc {
    Asserted,
    Derived { rule: String, premises: Vec<KeyDoc> },
}

fn key_doc(k: &TripleKey) -> KeyDoc {
    KeyDoc {
        subject: k.subject.to_string(),
        predicate: k.predicate.to_string(),
        object: k.object.to_string(),
    }
}

fn values(map: &BTreeMap<String, Value>) -> BTreeMap<String, String> {
    map.iter()
        .map(|(k, v)| (k.clone(), v.to_string()))
        .collect()
}

fn entity_doc(e: &Entity) -> EntityDoc {
    match e {
        Entity::Object(o) => EntityDoc::Object {
            id: o.id().to_string(),
            kind: o.kind().to_string(),
            attributes: values(o.attributes()),
        },
        Entity::Event(ev) => EntityDoc::Event {
            id: ev.id().to_string(),
            kind: ev.kind().to_string(),
        },
        Entity::Situation(s) => EntityDoc::Situation {
            id: s.id().to_string(),
            start: s.holds_during().start().to_string(),
            end: s.holds_during().end().to_string(),
            observations: values(s.observations()),
        },
        Entity::Region(r) => EntityDoc::Region {
            id: r.id.to_string(),
            geometry: r.geometry.to_string(),
            start: r.interval.start().to_string(),
            end: r.interval.end().to_string(),
        },
        Entity::Precondition(p) => EntityDoc::Precondition {
            id: p.id().to_string(),
            event_kind: p.event_kind().to_string(),
        },
    }
}

/// `{"entities": [...], "triples": [...]}`; see `docs/graph.schema.json`.
pub fn graph_to_json(graph: &KnowledgeGraph) -> String {
    let doc = GraphDoc {
        entities: graph.entities().map(entity_doc).collect(),
        triples: graph
            .triples()
            .map(|t| TripleDoc {
                subject: t.subject.to_string(),
                predicate: t.predicate.to_string(),
                object: t.object.to_string(),
                provenance: match t.provenance {
                    Provenance::Asserted => ProvenanceDoc::Asserted,
                    Provenance::Derived { rule, premises } => ProvenanceDoc::Derived {
                        rule,
                        premises: premises.iter().map(key_doc).collect(),
                    },
                },
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph document serializes");
    s.push('\n');
    s
}

fn import_err(what: impl std::fmt::Display) -> QueryError {
    QueryError::Import(what.to_string())
}

fn measurements(map: BTreeMap<String, String>) -> Result<Vec<Measurement>, QueryError> {
    map.into_iter()
        .map(|(k, v)| {
            Value::parse(&v)
                .and_then(|v| Measurement::new(k, v))
                .map_err(import_err)
        })
        .collect()
}

fn entity_from_doc(doc: EntityDoc) -> Result<Entity, QueryError> {
    let id = |s: String| EntityId::new(s).map_err(import_err);
    let entity: Entity = match doc {
        EntityDoc::Object {
            id: i,
            kind,
            attributes,
        } => GeoObject::new(id(i)?, kind, measurements(attributes)?)
            .map_err(import_err)?
            .into(),
        EntityDoc::Event { id: i, kind } => GeoEvent::new(id(i)?, kind).map_err(import_err)?.into(),
        EntityDoc::Situation {
            id: i,
            start,
            end,
            observations,
        } => {
            let during = TimeInterval::parse(&start, &end).map_err(import_err)?;
            GeoSituation::new(id(i)?, during, measurements(observations)?)
                .map_err(import_err)?
                .into()
        }
        EntityDoc::Region {
            id: i,
            geometry,
            start,
            end,
        } => {
            let geometry: Geometry = geometry.parse().map_err(import_err)?;
            let interval = TimeInterval::parse(&start, &end).map_err(import_err)?;
            SpatioTemporalRegion::new(id(i)?, geometry, interval).into()
        }
        EntityDoc::Precondition { id: i, event_kind } => PreconditionRef::new(id(i)?, event_kind)
            .map_err(import_err)?
            .into(),
    };
    Ok(entity)
}

fn key_from_doc(k: KeyDoc) -> Result<TripleKey, QueryError> {
    Ok(TripleKey::new(
        EntityId::new(k.subject).map_err(import_err)?,
        k.predicate.parse::<RelationKind>().map_err(import_err)?,
        EntityId::new(k.object).map_err(import_err)?,
    ))
}

/// Rebuilds a graph from [`graph_to_json`] output, with the same schema and
/// provenance checks as the text loader.
pub fn graph_from_json(text: &str) -> Result<KnowledgeGraph, QueryError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(import_err)?;
    let mut graph = KnowledgeGraph::new();
    for (i, e) in doc.entities.into_iter().enumerate() {
        let entity = entity_from_doc(e).map_err(|e| import_err(format!("entities[{i}]: {e}")))?;
        graph
            .add_entity(entity)
            .map_err(|e| import_err(format!("entities[{i}]: {e}")))?;
    }
    let mut items = Vec::new();
    for (i, t) in doc.triples.into_iter().enumerate() {
        let at = |e: QueryError| import_err(format!("triples[{i}]: {e}"));
        let key = key_from_doc(KeyDoc {
            subject: t.subject,
            predicate: t.predicate,
            object: t.object,
        })
        .map_err(at)?;
        let prov = match t.provenance {
            ProvenanceDoc::Asserted => Provenance::Asserted,
            ProvenanceDoc::Derived { rule, premises } => Provenance::Derived {
                rule,
                premises: premises
                    .into_iter()
                    .map(key_from_doc)
                    .collect::<Result<_, _>>()
                    .map_err(at)?,
            },
        };
        items.push((key, prov));
    }
    graph
        .insert_all(items)
        .map_err(|(i, e)| import_err(format!("triples[{i}]: {e}")))?;
    Ok(graph)
}

#[derive(Serialize)]
struct ExplanationDoc {
    root: String,
    depth_reached: usize,
    truncated: bool,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
    side: Vec<KeyDoc>,
}

#[derive(Serialize)]
struct NodeDoc {
    id: String,
    role: String,
    level: usize,
}

#[derive(Serialize)]
struct EdgeDoc {
    subject: String,
    predicate: String,
    object: String,
    provenance: TreeDoc,
    evidence: Vec<EvidenceDoc>,
}

#[derive(Serialize)]
struct TreeDoc {
    triple: KeyDoc,
    rule: Option<String>,
    premises: Vec<TreeDoc>,
}

#[derive(Serialize)]
struct EvidenceDoc {
    precondition: String,
    satisfied: Option<String>,
    conditions: Vec<ConditionDoc>,
}

#[derive(Serialize)]
struct ConditionDoc {
    condition: String,
    observed: Option<String>,
    status: String,
}

fn tree_doc(t: &ProvenanceTree) -> TreeDoc {
    match t {
        ProvenanceTree::Asserted(k) => TreeDoc {
            triple: key_doc(k),
            rule: None,
            premises: Vec::new(),
        },
        ProvenanceTree::Derived {
            triple,
            rule,
            premises,
        } => TreeDoc {
            triple: key_doc(triple),
            rule: Some(rule.clone()),
            premises: premises.iter().map(tree_doc).collect(),
        },
    }
}

fn evidence_doc(e: &Evidence) -> EvidenceDoc {
    EvidenceDoc {
        precondition: e.precondition.to_string(),
        satisfied: e.satisfied.map(|t| t.to_string()),
        conditions: e
            .conditions
            .iter()
            .map(|c| ConditionDoc {
                condition: c.condition.to_string(),
                observed: c.observed.as_ref().map(|v| v.to_string()),
                status: super::why::status_word(&c.status),
            })
            .collect(),
    }
}

/// See `docs/explanation.schema.json`.
pub fn explanation_to_json(ex: &Explanation) -> String {
    let doc = ExplanationDoc {
        root: ex.root.to_string(),
        depth_reached: ex.depth_reached,
        truncated: ex.truncated,
        nodes: ex
            .nodes
            .iter()
            .map(|n| NodeDoc {
                id: n.id.to_string(),
                role: n.role.to_string(),
                level: n.level,
            })
            .collect(),
        edges: ex
            .edges
            .iter()
            .map(|e| {
                let k = e.triple.key();
                EdgeDoc {
                    subject: k.subject.to_string(),
                    predicate: k.predicate.to_string(),
                    object: k.object.to_string(),
                    provenance: tree_doc(&e.provenance),
                    evidence: e.evidence.iter().map(evidence_doc).collect(),
                }
            })
            .collect(),
        side: ex.side.iter().map(|t| key_doc(&t.key())).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("explanation serializes");
    s.push('\n');
    s
}
