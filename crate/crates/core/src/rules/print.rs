//! Canonical pretty-printer; its output re-parses to an equal rule set.

use std::fmt;

use super::{CauseRule, PreconditionSet, RuleSet};

impl fmt::Display for PreconditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "precondition {} effects {} {{",
            self.id(),
            self.event_kind()
        )?;
        for c in self.conditions() {
            writeln!(f, "  {c};")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for CauseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {}: {} causes {} when {}",
            self.id(),
            self.cause_kind(),
            self.effect_kind(),
            self.constraint()
        )
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pc in self.preconditions() {
            writeln!(f, "{pc}")?;
        }
        if !self.preconditions().is_empty() && !self.cause_rules().is_empty() {
            writeln!(f)?;
        }
        for rule in self.cause_rules() {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}
