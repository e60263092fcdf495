//! The node roles of the geo-event schema.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{validate_label, EntityId, Geometry, Measurement, ModelError, TimeInterval, Value};

/// Role of a graph node; determines which relations it may take part in.
/// `Geometry` and `Time` only occur as ranges of region relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Object,
    Event,
    Situation,
    Region,
    Precondition,
    Geometry,
    Time,
}

impl Role {
    pub fn token(self) -> &'static str {
        match self {
            Role::Object => "object",
            Role::Event => "event",
            Role::Situation => "situation",
            Role::Region => "region",
            Role::Precondition => "precondition",
            Role::Geometry => "geometry",
            Role::Time => "time",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Role {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Role::Object,
            Role::Event,
            Role::Situation,
            Role::Region,
            Role::Precondition,
            Role::Geometry,
            Role::Time,
        ]
        .into_iter()
        .find(|r| r.token() == s)
        .ok_or_else(|| ModelError::Parse {
            what: "role",
            input: s.to_string(),
        })
    }
}

fn measurement_map(
    items: impl IntoIterator<Item = Measurement>,
) -> Result<BTreeMap<String, Value>, ModelError> {
    let mut map = BTreeMap::new();
    for m in items {
        if map.contains_key(&m.attribute) {
            return Err(ModelError::DuplicateAttribute(m.attribute));
        }
        map.insert(m.attribute, m.value);
    }
    Ok(map)
}

/// An endurant: dam, river, atmosphere snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoObject {
    id: EntityId,
    kind: String,
    attributes: BTreeMap<String, Value>,
}

impl GeoObject {
    pub fn new(
        id: EntityId,
        kind: impl Into<String>,
        attributes: impl IntoIterator<Item = Measurement>,
    ) -> Result<Self, ModelError> {
        let kind = kind.into();
        validate_label("kind", &kind)?;
        Ok(Self {
            id,
            kind,
            attributes: measurement_map(attributes)?,
        })
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn attributes(&self) -> &BTreeMap<String, Value> {
        &self.attributes
    }
}

/// A perdurant: hurricane, flash flood.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoEvent {
    id: EntityId,
    kind: String,
}

impl GeoEvent {
    pub fn new(id: EntityId, kind: impl Into<String>) -> Result<Self, ModelError> {
        let kind = kind.into();
        validate_label("kind", &kind)?;
        Ok(Self { id, kind })
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }
}

/// A state of the world over an interval, described by observations.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoSituation {
    id: EntityId,
    holds_during: TimeInterval,
    observations: BTreeMap<String, Value>,
}

impl GeoSituation {
    pub fn new(
        id: EntityId,
        holds_during: TimeInterval,
        observations: impl IntoIterator<Item = Measurement>,
    ) -> Result<Self, ModelError> {
        Ok(Self {
            id,
            holds_during,
            observations: measurement_map(observations)?,
        })
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }

    pub fn holds_during(&self) -> TimeInterval {
        self.holds_during
    }

    pub fn observations(&self) -> &BTreeMap<String, Value> {
        &self.observations
    }

    pub fn observation(&self, attribute: &str) -> Option<&Value> {
        self.observations.get(attribute)
    }
}

/// Spatial footprint plus temporal extent.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatioTemporalRegion {
    pub id: EntityId,
    pub geometry: Geometry,
    pub interval: TimeInterval,
}

impl SpatioTemporalRegion {
    pub fn new(id: EntityId, geometry: Geometry, interval: TimeInterval) -> Self {
        Self {
            id,
            geometry,
            interval,
        }
    }
}

/// Graph-side handle for a precondition set; the conditions themselves live
/// in the rule set.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionRef {
    id: EntityId,
    event_kind: String,
}

impl PreconditionRef {
    pub fn new(id: EntityId, event_kind: impl Into<String>) -> Result<Self, ModelError> {
        let event_kind = event_kind.into();
        validate_label("event kind", &event_kind)?;
        Ok(Self { id, event_kind })
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }

    pub fn event_kind(&self) -> &str {
        &self.event_kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entity {
    Object(GeoObject),
    Event(GeoEvent),
    Situation(GeoSituation),
    Region(SpatioTemporalRegion),
    Precondition(PreconditionRef),
}

impl Entity {
    pub fn id(&self) -> &EntityId {
        match self {
            Entity::Object(o) => o.id(),
            Entity::Event(e) => e.id(),
            Entity::Situation(s) => s.id(),
            Entity::Region(r) => &r.id,
            Entity::Precondition(p) => p.id(),
        }
    }

    pub fn role(&self) -> Role {
        match self {
            Entity::Object(_) => Role::Object,
            Entity::Event(_) => Role::Event,
            Entity::Situation(_) => Role::Situation,
            Entity::Region(_) => Role::Region,
            Entity::Precondition(_) => Role::Precondition,
        }
    }

    /// Type label for objects and events, effected kind for preconditions.
    pub fn kind(&self) -> Option<&str> {
        match self {
            Entity::Object(o) => Some(o.kind()),
            Entity::Event(e) => Some(e.kind()),
            Entity::Precondition(p) => Some(p.event_kind()),
            Entity::Situation(_) | Entity::Region(_) => None,
        }
    }
}

impl From<GeoObject> for Entity {
    fn from(v: GeoObject) -> Self {
        Entity::Object(v)
    }
}

impl From<GeoEvent> for Entity {
    fn from(v: GeoEvent) -> Self {
        Entity::Event(v)
    }
}

impl From<GeoSituation> for Entity {
    fn from(v: GeoSituation) -> Self {
        Entity::Situation(v)
    }
}

impl From<SpatioTemporalRegion> for Entity {
    fn from(v: SpatioTemporalRegion) -> Self {
        Entity::Region(v)
    }
}

impl From<PreconditionRef> for Entity {
    fn from(v: PreconditionRef) -> Self {
        Entity::Precondition(v)
    }
}
