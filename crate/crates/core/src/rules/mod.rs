//! Rule language: observation precondition sets and event-to-event cause
//! rules.
//!
//! ```text
//! precondition PC_TC effects TropicalCyclone {
//!   SeaSurfaceTemp > 82 degF;
//!   CoriolisForce present;
//! }
//! rule R1: HeavyRain causes FlashFlood when co-occurs
//! rule R2: TropicalStorm causes HeavyRain when precedes within 24h
//! ```

mod eval;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{validate_label, Comparator, Duration, EntityId, ModelError, Value};

pub use eval::{evaluate, ConditionOutcome, ConditionStatus, SatisfactionResult, Truth};
pub use parse::parse_rules;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("parse error at {line}:{column}: expected {expected}, found {found}")]
    Parse {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("unknown unit `{unit}` at {line}:{column}")]
    UnknownUnit {
        line: usize,
        column: usize,
        unit: String,
    },
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("invalid rule `{id}`: {message}")]
    Invalid { id: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl RuleError {
    pub fn code(&self) -> &'static str {
        match self {
            RuleError::Parse { .. } => "E-RULES-PARSE",
            RuleError::UnknownUnit { .. } => "E-RULES-UNIT",
            RuleError::DuplicateRuleId(_) => "E-RULES-DUPID",
            RuleError::Invalid { .. } => "E-RULES-INVALID",
            RuleError::Model(e) => e.code(),
        }
    }
}

/// `attribute comparator [threshold]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    attribute: String,
    comparator: Comparator,
    threshold: Option<Value>,
}

impl Condition {
    pub fn new(
        attribute: impl Into<String>,
        comparator: Comparator,
        threshold: Option<Value>,
    ) -> Result<Self, ModelError> {
        let attribute = attribute.into();
        validate_label("attribute name", &attribute)?;
        match (&threshold, comparator) {
            (None, c) if c.is_unary() => {}
            (Some(Value::Quantity(_)), c) if !c.is_unary() => {}
            (Some(Value::Categorical(_)), Comparator::Eq | Comparator::Ne) => {}
            (None, c) => return Err(ModelError::TypeMismatch(format!("`{c}` needs a threshold"))),
            (Some(v), c) => {
                return Err(ModelError::TypeMismatch(format!(
                    "`{c}` cannot take threshold {v}"
                )))
            }
        }
        Ok(Self {
            attribute,
            comparator,
            threshold,
        })
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn comparator(&self) -> Comparator {
        self.comparator
    }

    pub fn threshold(&self) -> Option<&Value> {
        self.threshold.as_ref()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.threshold {
            Some(t) => write!(f, "{} {} {}", self.attribute, self.comparator, t),
            None => write!(f, "{} {}", self.attribute, self.comparator),
        }
    }
}

/// Conjunction of conditions which, once satisfied by a situation, effects
/// an event of `event_kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionSet {
    id: EntityId,
    event_kind: String,
    conditions: Vec<Condition>,
}

impl PreconditionSet {
    pub fn new(
        id: EntityId,
        event_kind: impl Into<String>,
        conditions: Vec<Condition>,
    ) -> Result<Self, RuleError> {
        let event_kind = event_kind.into();
        validate_label("event kind", &event_kind)?;
        let invalid = |message: String| RuleError::Invalid {
            id: id.to_string(),
            message,
        };
        if conditions.is_empty() {
            return Err(invalid(
                "a precondition set needs at least one condition".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for c in &conditions {
            if !seen.insert(c.attribute()) {
                return Err(invalid(format!(
                    "attribute `{}` appears twice",
                    c.attribute()
                )));
            }
        }
        Ok(Self {
            id,
            event_kind,
            conditions,
        })
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }

    pub fn event_kind(&self) -> &str {
        &self.event_kind
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }
}

/// Temporal/spatial relation the two event regions must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauseConstraint {
    CoOccurs,
    Precedes,
    PrecedesWithin(Duration),
}

impl fmt::Display for CauseConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CauseConstraint::CoOccurs => f.write_str("co-occurs"),
            CauseConstraint::Precedes => f.write_str("precedes"),
            CauseConstraint::PrecedesWithin(d) => write!(f, "precedes within {d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseRule {
    id: String,
    cause_kind: String,
    effect_kind: String,
    constraint: CauseConstraint,
}

impl CauseRule {
    pub fn new(
        id: impl Into<String>,
        cause_kind: impl Into<String>,
        effect_kind: impl Into<String>,
        constraint: CauseConstraint,
    ) -> Result<Self, RuleError> {
        let (id, cause_kind, effect_kind) = (id.into(), cause_kind.into(), effect_kind.into());
        validate_label("rule id", &id)?;
        validate_label("event kind", &cause_kind)?;
        validate_label("event kind", &effect_kind)?;
        if cause_kind == effect_kind && constraint == CauseConstraint::CoOccurs {
            return Err(RuleError::Invalid {
                id,
                message: "an event kind cannot cause itself by mere co-occurrence".into(),
            });
        }
        if let CauseConstraint::PrecedesWithin(d) = constraint {
            if d.is_negative() {
                return Err(RuleError::Invalid {
                    id,
                    message: format!("negative gap {d}"),
                });
            }
        }
        Ok(Self {
            id,
            cause_kind,
            effect_kind,
            constraint,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn cause_kind(&self) -> &str {
        &self.cause_kind
    }

    pub fn effect_kind(&self) -> &str {
        &self.effect_kind
    }

    pub fn constraint(&self) -> CauseConstraint {
        self.constraint
    }
}

/// Preconditions and cause rules, each kept sorted by id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleSet {
    preconditions: Vec<PreconditionSet>,
    cause_rules: Vec<CauseRule>,
}

impl RuleSet {
    pub fn new(
        mut preconditions: Vec<PreconditionSet>,
        mut cause_rules: Vec<CauseRule>,
    ) -> Result<Self, RuleError> {
        let mut ids = BTreeSet::new();
        let all = preconditions
            .iter()
            .map(|p| p.id().as_str())
            .chain(cause_rules.iter().map(CauseRule::id));
        for id in all {
            if !ids.insert(id) {
                return Err(RuleError::DuplicateRuleId(id.to_string()));
            }
        }
        preconditions.sort_by(|a, b| a.id().cmp(b.id()));
        cause_rules.sort_by(|a, b| a.id().cmp(b.id()));
        Ok(Self {
            preconditions,
            cause_rules,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn preconditions(&self) -> &[PreconditionSet] {
        &self.preconditions
    }

    pub fn cause_rules(&self) -> &[CauseRule] {
        &self.cause_rules
    }

    pub fn precondition(&self, id: &str) -> Option<&PreconditionSet> {
        self.preconditions.iter().find(|p| p.id().as_str() == id)
    }

    pub fn is_empty(&self) -> bool {
        self.preconditions.is_empty() && self.cause_rules.is_empty()
    }
}
