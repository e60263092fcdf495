//! The CLI's on-disk state: the graph in its text format, preceded by a
//! header naming the rules file in use.
//!
//! ```text
//! # geocausal workspace
//! # rules: /abs/path/to/rules.gcr
//! ENT ...
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::rules::{parse_rules, RuleSet};
use crate::store::{KnowledgeGraph, StoreError};

pub const DEFAULT_WORKSPACE: &str = "geocausal.kg";
const MAGIC: &str = "# geocausal workspace";
const RULES_PREFIX: &str = "# rules: ";

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("workspace {}: {source}", path.display())]
    Load {
        path: PathBuf,
        #[source]
        source: StoreError,
    },
    #[error("workspace {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("no rules file recorded in the workspace; pass --rules <file>")]
    NoRules,
}

impl WorkspaceError {
    pub fn code(&self) -> &'static str {
        match self {
            WorkspaceError::Load { source, .. } => source.code(),
            WorkspaceError::Io { .. } => "E-WORKSPACE-IO",
            WorkspaceError::NoRules => "E-WORKSPACE-RULES",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    path: PathBuf,
    pub rules: Option<PathBuf>,
    pub graph: KnowledgeGraph,
}

impl Workspace {
    /// Opens `path`, or starts an empty workspace if it does not exist yet.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, WorkspaceError> {
        let path = path.into();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(WorkspaceError::Io { path, source }),
        };
        let rules = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix(RULES_PREFIX))
            .map(PathBuf::from);
        let graph = KnowledgeGraph::from_text(&text).map_err(|source| WorkspaceError::Load {
            path: path.clone(),
            source,
        })?;
        Ok(Self { path, rules, graph })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\n");
        if let Some(r) = &self.rules {
            out.push_str(&format!("{RULES_PREFIX}{}\n", r.display()));
        }
        out.push_str(&self.graph.to_text());
        out
    }

    /// Writes to a sibling temp file and renames it over the workspace, so
    /// an interrupted save never leaves a truncated file.
    pub fn save(&self) -> Result<(), WorkspaceError> {
        let io_err = |source| WorkspaceError::Io {
            path: self.path.clone(),
            source,
        };
        let mut tmp = self.path.clone().into_os_string();
        tmp.push(".tmp");
        fs::write(&tmp, self.to_text()).map_err(io_err)?;
        fs::rename(&tmp, &self.path).map_err(io_err)
    }

    /// Records `path` as the workspace's rules file, made absolute so later
    /// invocations from another directory still find it.
    pub fn set_rules(&mut self, path: &Path) {
        self.rules = Some(fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf()));
    }

    /// Parses the recorded rules file.
    pub fn load_rules(&self) -> Result<RuleSet, crate::Error> {
        let path = self.rules.as_ref().ok_or(WorkspaceError::NoRules)?;
        let text = fs::read_to_string(path)
            .map_err(|e| crate::Error::io(format!("rules file {}", path.display()), e))?;
        Ok(parse_rules(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_file_is_empty_workspace() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path().join("none.kg")).unwrap();
        assert!(ws.graph.is_empty());
        assert!(ws.rules.is_none());
    }

    #[test]
    fn header_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let rules = dir.path().join("r.gcr");
        fs::write(&rules, "rule R1: A causes B when co-occurs\n").unwrap();
        let path = dir.path().join("ws.kg");
        let mut ws = Workspace::open(&path).unwrap();
        ws.graph = KnowledgeGraph::from_text("ENT ev:a event A\n").unwrap();
        ws.set_rules(&rules);
        ws.save().unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# geocausal workspace\n# rules: /"));
        let again = Workspace::open(&path).unwrap();
        assert_eq!(again.graph, ws.graph);
        assert_eq!(again.rules, ws.rules);
        assert_eq!(again.load_rules().unwrap().cause_rules().len(), 1);
        assert_eq!(again.to_text(), text);
    }

    #[test]
    fn corrupt_workspace_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ws.kg");
        fs::write(
            &path,
            "# geocausal workspace\nENT ev:a event A\nTRI ev:a causes ev:missing\n",
        )
        .unwrap();
        let err = Workspace::open(&path).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert_eq!(crate::Error::from(err).exit_code(), 2);
    }

    #[test]
    fn no_rules_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path().join("ws.kg")).unwrap();
        assert_eq!(ws.load_rules().unwrap_err().code(), "E-WORKSPACE-RULES");
    }
}
