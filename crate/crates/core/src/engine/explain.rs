use std::fmt;

use crate::store::{KnowledgeGraph, Provenance, StoreError, TripleKey};

/// Justification of a triple: a leaf for asserted facts, otherwise the rule
/// and the justifications of its premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProvenanceTree {
    Asserted(TripleKey),
    Derived {
        triple: TripleKey,
        rule: String,
        premises: Vec<ProvenanceTree>,
    },
}

impl ProvenanceTree {
    pub fn triple(&self) -> &TripleKey {
        match self {
            ProvenanceTree::Asserted(t) => t,
            ProvenanceTree::Derived { triple, .. } => triple,
        }
    }

    pub fn rule(&self) -> Option<&str> {
        match self {
            ProvenanceTree::Asserted(_) => None,
            ProvenanceTree::Derived { rule, .. } => Some(rule),
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            ProvenanceTree::Asserted(t) => writeln!(f, "{pad}{t} [asserted]"),
            ProvenanceTree::Derived {
                triple,
                rule,
                premises,
            } => {
                writeln!(f, "{pad}{triple} [{rule}]")?;
                premises
                    .iter()
                    .try_for_each(|p| p.write_indented(f, depth + 1))
            }
        }
    }
}

impl fmt::Display for ProvenanceTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

/// Provenance premises always predate the triple they justify, so the
/// recursion terminates.
pub fn explain(graph: &KnowledgeGraph, key: &TripleKey) -> Result<ProvenanceTree, StoreError> {
    match graph.provenance(key) {
        None => Err(StoreError::UnknownTriple(key.clone())),
        Some(Provenance::Asserted) => Ok(ProvenanceTree::Asserted(key.clone())),
        Some(Provenance::Derived { rule, premises }) => Ok(ProvenanceTree::Derived {
            triple: key.clone(),
            rule: rule.clone(),
            premises: premises
                .iter()
                .map(|p| explain(graph, p))
                .collect::<Result<_, _>>()?,
        }),
    }
}
