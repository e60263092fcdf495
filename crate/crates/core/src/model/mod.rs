//! Domain vocabulary: identifiers, time, geometry, units, measurements and
//! the geo-entities built from them.
//!
//! Every public constructor validates its invariants, so a value of any of
//! these types is well-formed by construction.

mod entity;
mod geometry;
mod id;
mod measurement;
mod time;
mod units;

pub use entity::{
    Entity, GeoEvent, GeoObject, GeoSituation, PreconditionRef, Role, SpatioTemporalRegion,
};
pub use geometry::Geometry;
pub use id::{validate_label, EntityId};
pub use measurement::{compare, Comparator, Measurement, Quantity, Value, EQ_TOLERANCE};
pub use time::{Duration, TimeInterval, Timestamp};
pub use units::{Dimension, Unit, UNITS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(
        "invalid identifier {0:?}: must be non-empty without whitespace or control characters"
    )]
    InvalidId(String),
    #[error("invalid {what} {value:?}")]
    InvalidLabel { what: &'static str, value: String },
    #[error("interval start {start} is after end {end}")]
    OrderViolation { start: Timestamp, end: Timestamp },
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: Dimension, right: Dimension },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("non-finite magnitude {0}")]
    NonFinite(f64),
    #[error("invalid coordinate: {0}")]
    InvalidCoordinate(String),
    #[error("duplicate attribute {0:?}")]
    DuplicateAttribute(String),
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::InvalidId(_) => "E-MODEL-ID",
            ModelError::InvalidLabel { .. } => "E-MODEL-LABEL",
            ModelError::OrderViolation { .. } => "E-MODEL-ORDER",
            ModelError::Parse { .. } => "E-MODEL-PARSE",
            ModelError::DimensionMismatch { .. } => "E-MODEL-DIMENSION",
            ModelError::TypeMismatch(_) => "E-MODEL-TYPE",
            ModelError::UnknownUnit(_) => "E-MODEL-UNIT",
            ModelError::NonFinite(_) => "E-MODEL-NONFINITE",
            ModelError::InvalidCoordinate(_) => "E-MODEL-COORD",
            ModelError::DuplicateAttribute(_) => "E-MODEL-DUPATTR",
        }
    }
}
