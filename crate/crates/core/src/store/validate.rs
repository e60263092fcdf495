use serde::Serialize;

use super::{KnowledgeGraph, Provenance, RelationKind};
use crate::spatiotemporal::co_occurs;

/// Hard errors break graph invariants; warnings flag data that is legal
/// but suspicious (participants whose footprints do not overlap the event).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl KnowledgeGraph {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (key, provenance) in &self.triples {
            if let Err(e) = self.check_schema(key) {
                report.errors.push(e.to_string());
            }
            if let Provenance::Derived { premises, .. } = provenance {
                for p in premises.iter().filter(|p| !self.contains(p)) {
                    report
                        .errors
                        .push(format!("derived `{key}` cites missing premise `{p}`"));
                }
            }
        }
        if !self.indexes_consistent() {
            report
                .errors
                .push("secondary indexes disagree with the triple set".into());
        }
        for key in self
            .by_predicate
            .get(&RelationKind::ParticipantIn)
            .into_iter()
            .flatten()
        {
            let (Ok(Some(obj)), Ok(Some(ev))) =
                (self.region_of(&key.subject), self.region_of(&key.object))
            else {
                continue;
            };
            if !co_occurs(obj, ev) {
                report.warnings.push(format!(
                    "participant {} (region {}) does not overlap event {} (region {})",
                    key.subject, obj.id, key.object, ev.id
                ));
            }
        }
        report
    }
}
