//! Fixed unit registry. Each unit maps affinely into its dimension's
//! canonical unit: `canonical = magnitude * scale + offset`.

use std::fmt;

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Temperature,
    Pressure,
    Speed,
    Length,
    Dimensionless,
}

#[derive(Debug, PartialEq)]
pub struct Unit {
    pub symbol: &'static str,
    pub dimension: Dimension,
    pub scale: f64,
    pub offset: f64,
}

const fn unit(symbol: &'static str, dimension: Dimension, scale: f64, offset: f64) -> Unit {
    Unit {
        symbol,
        dimension,
        scale,
        offset,
    }
}

use Dimension::*;

/// Canonical units: K, hPa, m/s, m, and `1` for dimensionless counts.
pub static UNITS: &[Unit] = &[
    unit("K", Temperature, 1.0, 0.0),
    unit("degC", Temperature, 1.0, 273.15),
    unit("degF", Temperature, 5.0 / 9.0, 273.15 - 32.0 * 5.0 / 9.0),
    unit("hPa", Pressure, 1.0, 0.0),
    unit("mb", Pressure, 1.0, 0.0),
    unit("Pa", Pressure, 0.01, 0.0),
    unit("atm", Pressure, 1013.25, 0.0),
    unit("m/s", Speed, 1.0, 0.0),
    unit("kn", Speed, 1852.0 / 3600.0, 0.0),
    unit("mph", Speed, 0.44704, 0.0),
    unit("km/h", Speed, 1.0 / 3.6, 0.0),
    unit("m", Length, 1.0, 0.0),
    unit("km", Length, 1000.0, 0.0),
    unit("mi", Length, 1609.344, 0.0),
    unit("in", Length, 0.0254, 0.0),
    unit("1", Dimensionless, 1.0, 0.0),
    unit("USD", Dimensionless, 1.0, 0.0),
];

const ALIASES: &[(&str, &str)] = &[
    ("°F", "degF"),
    ("°C", "degC"),
    ("knots", "kn"),
    ("kt", "kn"),
];

impl Unit {
    pub fn lookup(symbol: &str) -> Result<&'static Unit, ModelError> {
        let symbol = ALIASES
            .iter()
            .find(|(alias, _)| *alias == symbol)
            .map_or(symbol, |(_, canonical)| canonical);
        UNITS
            .iter()
            .find(|u| u.symbol == symbol)
            .ok_or_else(|| ModelError::UnknownUnit(symbol.to_string()))
    }

    pub fn canonical(dimension: Dimension) -> &'static Unit {
        UNITS
            .iter()
            .find(|u| u.dimension == dimension && u.scale == 1.0 && u.offset == 0.0)
            .expect("every dimension has a canonical unit")
    }

    pub fn to_canonical(&self, magnitude: f64) -> f64 {
        magnitude * self.scale + self.offset
    }

    pub fn from_canonical(&self, canonical: f64) -> f64 {
        (canonical - self.offset) / self.scale
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol)
    }
}
