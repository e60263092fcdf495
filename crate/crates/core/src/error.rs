//! Crate-wide error with stable codes and CLI exit statuses.

use thiserror::Error;

use crate::engine::EngineError;
use crate::ingest::IngestError;
use crate::model::ModelError;
use crate::query::QueryError;
use crate::rules::RuleError;
use crate::store::StoreError;
use crate::workspace::WorkspaceError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    /// The graph breaks one of its own invariants.
    #[error("{0}")]
    Invariant(String),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::Model(e) => e.code(),
            Error::Store(e) => e.code(),
            Error::Rules(e) => e.code(),
            Error::Engine(e) => e.code(),
            Error::Ingest(e) => e.code(),
            Error::Query(e) => e.code(),
            Error::Workspace(e) => e.code(),
            Error::Io { .. } => "E-IO",
            Error::Invariant(_) => "E-INVARIANT",
        }
    }

    /// 1 for bad input or arguments, 2 when persisted state or the graph
    /// itself violates an invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Engine(EngineError::ValidationFailure(_))
            | Error::Workspace(WorkspaceError::Load { .. })
            | Error::Invariant(_) => 2,
            _ => 1,
        }
    }
}
