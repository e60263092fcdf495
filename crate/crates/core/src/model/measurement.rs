use std::fmt;
use std::str::FromStr;

use super::units::{Dimension, Unit};
use super::{validate_label, ModelError};

/// Absolute tolerance, in canonical units, applied to every numeric comparison.
pub const EQ_TOLERANCE: f64 = 1e-9;

/// A finite magnitude paired with a registered unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    magnitude: f64,
    unit: &'static Unit,
}

impl Quantity {
    pub fn new(magnitude: f64, unit: &'static Unit) -> Result<Self, ModelError> {
        if !magnitude.is_finite() {
            return Err(ModelError::NonFinite(magnitude));
        }
        Ok(Self { magnitude, unit })
    }

    /// Convenience for `Quantity::new(m, Unit::lookup(symbol)?)`.
    pub fn of(magnitude: f64, symbol: &str) -> Result<Self, ModelError> {
        Self::new(magnitude, Unit::lookup(symbol)?)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn unit(&self) -> &'static Unit {
        self.unit
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension
    }

    pub fn canonical_magnitude(&self) -> f64 {
        self.unit.to_canonical(self.magnitude)
    }

    pub fn convert(&self, target: &'static Unit) -> Result<Quantity, ModelError> {
        if self.unit.dimension != target.dimension {
            return Err(ModelError::DimensionMismatch {
                left: self.unit.dimension,
                right: target.dimension,
            });
        }
        if std::ptr::eq(self.unit, target) {
            return Ok(*self);
        }
        Quantity::new(target.from_canonical(self.canonical_magnitude()), target)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit.symbol)
    }
}

impl FromStr for Quantity {
    type Err = ModelError;

    /// `"<magnitude> <unit-symbol>"`, e.g. `82 degF`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(mag), Some(sym), None) => {
                let magnitude = mag.parse::<f64>().map_err(|_| ModelError::Parse {
                    what: "quantity",
                    input: s.to_string(),
                })?;
                Quantity::of(magnitude, sym)
            }
            _ => Err(ModelError::Parse {
                what: "quantity",
                input: s.to_string(),
            }),
        }
    }
}

/// Observed or threshold value: a dimensioned quantity or a categorical token.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Quantity(Quantity),
    Categorical(String),
}

impl Value {
    pub fn categorical(token: impl Into<String>) -> Result<Self, ModelError> {
        let token = token.into();
        validate_label("categorical token", &token)?;
        Ok(Value::Categorical(token))
    }

    /// A string containing whitespace is read as a quantity, anything else
    /// as a categorical token.
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let s = s.trim();
        if s.contains(char::is_whitespace) {
            s.parse().map(Value::Quantity)
        } else {
            Value::categorical(s)
        }
    }
}

impl From<Quantity> for Value {
    fn from(q: Quantity) -> Self {
        Value::Quantity(q)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Quantity(q) => q.fmt(f),
            Value::Categorical(t) => f.write_str(t),
        }
    }
}

/// An attribute name with its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub attribute: String,
    pub value: Value,
}

impl Measurement {
    pub fn new(attribute: impl Into<String>, value: impl Into<Value>) -> Result<Self, ModelError> {
        let attribute = attribute.into();
        validate_label("attribute name", &attribute)?;
        Ok(Self {
            attribute,
            value: value.into(),
        })
    }

    pub fn quantity(attribute: &str, magnitude: f64, unit: &str) -> Result<Self, ModelError> {
        Self::new(attribute, Quantity::of(magnitude, unit)?)
    }

    pub fn categorical(attribute: &str, token: &str) -> Result<Self, ModelError> {
        Self::new(attribute, Value::categorical(token)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Present,
    Absent,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Present => "present",
            Comparator::Absent => "absent",
        }
    }

    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            Comparator::Lt | Comparator::Le | Comparator::Gt | Comparator::Ge
        )
    }

    pub fn is_unary(self) -> bool {
        matches!(self, Comparator::Present | Comparator::Absent)
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Comparator {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "<" => Comparator::Lt,
            "<=" | "≤" => Comparator::Le,
            ">" => Comparator::Gt,
            ">=" | "≥" => Comparator::Ge,
            "=" | "==" => Comparator::Eq,
            "!=" | "≠" => Comparator::Ne,
            "present" => Comparator::Present,
            "absent" => Comparator::Absent,
            _ => {
                return Err(ModelError::Parse {
                    what: "comparator",
                    input: s.to_string(),
                })
            }
        })
    }
}

fn canonical_pair(a: &Quantity, b: &Quantity) -> Result<(f64, f64), ModelError> {
    if a.dimension() != b.dimension() {
        return Err(ModelError::DimensionMismatch {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    Ok((a.canonical_magnitude(), b.canonical_magnitude()))
}

/// Evaluates `observed <op> threshold`. Numeric comparisons happen in
/// canonical units with [`EQ_TOLERANCE`]; strict comparators stay strict
/// at equality. `present`/`absent` read a categorical token and ignore
/// `threshold`.
pub fn compare(
    observed: &Value,
    op: Comparator,
    threshold: Option<&Value>,
) -> Result<bool, ModelError> {
    use Comparator::*;
    if op.is_unary() {
        return match observed {
            Value::Categorical(token) => {
                let want = if op == Present { "present" } else { "absent" };
                Ok(token.eq_ignore_ascii_case(want))
            }
            Value::Quantity(q) => Err(ModelError::TypeMismatch(format!(
                "`{op}` needs a categorical observation, got quantity {q}"
            ))),
        };
    }
    let Some(threshold) = threshold else {
        return Err(ModelError::TypeMismatch(format!(
            "`{op}` needs a threshold"
        )));
    };
    match (observed, threshold) {
        (Value::Quantity(a), Value::Quantity(b)) => {
            let (x, y) = canonical_pair(a, b)?;
            let d = x - y;
            Ok(match op {
                Lt => d < -EQ_TOLERANCE,
                Le => d <= EQ_TOLERANCE,
                Gt => d > EQ_TOLERANCE,
                Ge => d >= -EQ_TOLERANCE,
                Eq => d.abs() <= EQ_TOLERANCE,
                Ne => d.abs() > EQ_TOLERANCE,
                Present | Absent => unreachable!(),
            })
        }
        (Value::Categorical(a), Value::Categorical(b)) => match op {
            Eq => Ok(a == b),
            Ne => Ok(a != b),
            _ => Err(ModelError::TypeMismatch(format!(
                "`{op}` is not defined on categorical values"
            ))),
        },
        (a, b) => Err(ModelError::TypeMismatch(format!(
            "cannot compare {a} with {b}"
        ))),
    }
}
