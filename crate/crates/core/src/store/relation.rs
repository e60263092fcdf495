use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::model::Role;

/// The closed set of schema relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    PartOf,
    SpatioTemporallyPresent,
    ParticipantIn,
    HasGeometry,
    Time,
    Setting,
    Satisfies,
    Causes,
    Effects,
    Affects,
}

use Role::{Event, Geometry, Object, Precondition, Region, Situation};

impl RelationKind {
    pub const ALL: [RelationKind; 10] = [
        RelationKind::PartOf,
        RelationKind::SpatioTemporallyPresent,
        RelationKind::ParticipantIn,
        RelationKind::HasGeometry,
        RelationKind::Time,
        RelationKind::Setting,
        RelationKind::Satisfies,
        RelationKind::Causes,
        RelationKind::Effects,
        RelationKind::Affects,
    ];

    pub fn token(self) -> &'static str {
        match self {
            RelationKind::PartOf => "part-of",
            RelationKind::SpatioTemporallyPresent => "spatio-temporally-present",
            RelationKind::ParticipantIn => "participant-in",
            RelationKind::HasGeometry => "has-geometry",
            RelationKind::Time => "time",
            RelationKind::Setting => "setting",
            RelationKind::Satisfies => "satisfies",
            RelationKind::Causes => "causes",
            RelationKind::Effects => "effects",
            RelationKind::Affects => "affects",
        }
    }

    /// Allowed (subject role, object role) pairs.
    pub fn signature(self) -> &'static [(Role, Role)] {
        match self {
            RelationKind::PartOf => &[(Event, Event), (Situation, Situation)],
            RelationKind::SpatioTemporallyPresent => &[(Object, Region), (Event, Region)],
            RelationKind::ParticipantIn => &[(Object, Event)],
            RelationKind::HasGeometry => &[(Region, Geometry)],
            RelationKind::Time => &[(Region, Role::Time)],
            RelationKind::Setting => &[(Object, Situation), (Event, Situation)],
            RelationKind::Satisfies => &[(Situation, Precondition)],
            RelationKind::Causes => &[(Event, Event)],
            RelationKind::Effects => &[(Situation, Event)],
            RelationKind::Affects => &[(Situation, Object)],
        }
    }

    pub fn admits(self, subject: Role, object: Role) -> bool {
        self.signature().contains(&(subject, object))
    }

    pub fn is_causal(self) -> bool {
        matches!(
            self,
            RelationKind::Causes | RelationKind::Effects | RelationKind::Affects
        )
    }

    pub fn valid_tokens() -> String {
        Self::ALL
            .iter()
            .map(|r| r.token())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRelation(pub String);

impl fmt::Display for UnknownRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown relation `{}`; expected one of: {}",
            self.0,
            RelationKind::valid_tokens()
        )
    }
}

impl std::error::Error for UnknownRelation {}

impl FromStr for RelationKind {
    type Err = UnknownRelation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.token() == s)
            .ok_or_else(|| UnknownRelation(s.to_string()))
    }
}

// Relations order by their text token so sorted output is plain lexicographic.
impl Ord for RelationKind {
    fn cmp(&self, other: &Self) -> Ordering {
        self.token().cmp(other.token())
    }
}

impl PartialOrd for RelationKind {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
