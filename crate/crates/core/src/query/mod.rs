//! Read-side operations: pattern queries, why-explanations and exports.

mod export;
mod why;

use thiserror::Error;

use crate::model::{EntityId, Role};
use crate::store::{KnowledgeGraph, Pattern, RelationKind, Triple};

pub use export::{
    explanation_to_dot, explanation_to_json, graph_from_json, graph_to_dot, graph_to_json,
};
pub use why::{why, Evidence, Explanation, ExplanationEdge, ExplanationNode, DEFAULT_MAX_DEPTH};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("{id} is a {role}, not an event")]
    NotAnEvent { id: EntityId, role: Role },
    #[error("bad pattern {input:?}: {message}")]
    PatternParse { input: String, message: String },
    #[error("invalid graph document: {0}")]
    Import(String),
}

impl QueryError {
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::UnknownEntity(_) => "E-QUERY-UNKNOWN",
            QueryError::NotAnEvent { .. } => "E-QUERY-NOTEVENT",
            QueryError::PatternParse { .. } => "E-QUERY-PATTERN",
            QueryError::Import(_) => "E-QUERY-IMPORT",
        }
    }
}

/// Parses `<id|?> <relation|?> <id|?>`. Any token starting with `?` is a
/// wildcard.
pub fn parse_pattern(input: &str) -> Result<Pattern, QueryError> {
    let fail = |message: String| QueryError::PatternParse {
        input: input.to_string(),
        message,
    };
    let tokens: Vec<&str> = input.split_whitespace().collect();
    let [s, p, o] = tokens[..] else {
        return Err(fail(format!("expected 3 terms, found {}", tokens.len())));
    };
    let term = |t: &str| -> Result<Option<EntityId>, QueryError> {
        if t.starts_with('?') {
            Ok(None)
        } else {
            EntityId::new(t).map(Some).map_err(|e| fail(e.to_string()))
        }
    };
    let mut pattern = Pattern::any();
    if let Some(id) = term(s)? {
        pattern = pattern.subject(id);
    }
    if !p.starts_with('?') {
        pattern = pattern.predicate(p.parse::<RelationKind>().map_err(|e| fail(e.to_string()))?);
    }
    if let Some(id) = term(o)? {
        pattern = pattern.object(id);
    }
    Ok(pattern)
}

/// Triples matching a pattern expression, in key order.
pub fn query(graph: &KnowledgeGraph, expr: &str) -> Result<Vec<Triple>, QueryError> {
    Ok(graph.find(&parse_pattern(expr)?))
}
