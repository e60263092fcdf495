//! Three-valued evaluation of a precondition set against a situation.

use std::fmt;

use super::{Condition, PreconditionSet};
use crate::model::{compare, GeoSituation, Value};

/// Ordered `False < Unknown < True`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::False => "false",
            Truth::Unknown => "unknown",
            Truth::True => "true",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionStatus {
    True,
    False,
    /// The situation has no observation for the attribute.
    Unknown,
    /// Observation and threshold cannot be compared (dimension or type).
    Error(String),
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionStatus::True => f.write_str("true"),
            ConditionStatus::False => f.write_str("false"),
            ConditionStatus::Unknown => f.write_str("unknown (not observed)"),
            ConditionStatus::Error(e) => write!(f, "error ({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionOutcome {
    pub condition: Condition,
    pub observed: Option<Value>,
    pub status: ConditionStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SatisfactionResult {
    pub satisfied: Truth,
    pub per_condition: Vec<ConditionOutcome>,
}

pub fn evaluate(pc: &PreconditionSet, situation: &GeoSituation) -> SatisfactionResult {
    let per_condition: Vec<ConditionOutcome> = pc
        .conditions()
        .iter()
        .map(|c| {
            let observed = situation.observation(c.attribute()).cloned();
            let status = match &observed {
                None => ConditionStatus::Unknown,
                Some(v) => match compare(v, c.comparator(), c.threshold()) {
                    Ok(true) => ConditionStatus::True,
                    Ok(false) => ConditionStatus::False,
                    Err(e) => ConditionStatus::Error(e.to_string()),
                },
            };
            ConditionOutcome {
                condition: c.clone(),
                observed,
                status,
            }
        })
        .collect();
    let satisfied = per_condition
        .iter()
        .map(|o| match o.status {
            ConditionStatus::True => Truth::True,
            ConditionStatus::Unknown => Truth::Unknown,
            ConditionStatus::False | ConditionStatus::Error(_) => Truth::False,
        })
        .min()
        .unwrap_or(Truth::True);
    SatisfactionResult {
        satisfied,
        per_condition,
    }
}
