use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// Opaque, IRI-like node identifier such as `ev:Katrina`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        if is_token(&value) && !value.contains('"') {
            Ok(Self(value))
        } else {
            Err(ModelError::InvalidId(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for EntityId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for EntityId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c.is_control())
}

/// Checks a type label, attribute name or categorical token: non-empty,
/// no whitespace, no quotes, no `=`.
pub fn validate_label(what: &'static str, value: &str) -> Result<(), ModelError> {
    if is_token(value) && !value.contains(['"', '=']) {
        Ok(())
    } else {
        Err(ModelError::InvalidLabel {
            what,
            value: value.to_string(),
        })
    }
}
