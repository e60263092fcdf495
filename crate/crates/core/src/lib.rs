//! Knowledge graph for geographic events.
//!
//! Stores geo-objects, geo-events and geo-situations with their
//! spatio-temporal regions, evaluates observation preconditions, derives
//! `causes` / `effects` / `affects` edges by forward chaining, and answers
//! "why did this event happen?" from the resulting provenance.

pub mod engine;
pub mod error;
pub mod ingest;
pub mod model;
pub mod query;
pub mod rules;
pub mod spatiotemporal;
pub mod store;
pub mod workspace;

pub use error::Error;
pub use store::{KnowledgeGraph, Pattern, Provenance, RelationKind, Triple, TripleKey};
