use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// WGS-84 footprint: a point or a lat/lon-aligned box (no antimeridian wrap).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Point {
        lat: f64,
        lon: f64,
    },
    BBox {
        min_lat: f64,
        min_lon: f64,
        max_lat: f64,
        max_lon: f64,
    },
}

fn check_lat(v: f64) -> Result<(), ModelError> {
    if v.is_finite() && (-90.0..=90.0).contains(&v) {
        Ok(())
    } else {
        Err(ModelError::InvalidCoordinate(format!("latitude {v}")))
    }
}

fn check_lon(v: f64) -> Result<(), ModelError> {
    if v.is_finite() && (-180.0..=180.0).contains(&v) {
        Ok(())
    } else {
        Err(ModelError::InvalidCoordinate(format!("longitude {v}")))
    }
}

impl Geometry {
    pub fn point(lat: f64, lon: f64) -> Result<Self, ModelError> {
        check_lat(lat)?;
        check_lon(lon)?;
        Ok(Geometry::Point { lat, lon })
    }

    pub fn bbox(
        min_lat: f64,
        min_lon: f64,
        max_lat: f64,
        max_lon: f64,
    ) -> Result<Self, ModelError> {
        check_lat(min_lat)?;
        check_lat(max_lat)?;
        check_lon(min_lon)?;
        check_lon(max_lon)?;
        if min_lat > max_lat || min_lon > max_lon {
            return Err(ModelError::InvalidCoordinate(format!(
                "bbox min ({min_lat}, {min_lon}) exceeds max ({max_lat}, {max_lon})"
            )));
        }
        Ok(Geometry::BBox {
            min_lat,
            min_lon,
            max_lat,
            max_lon,
        })
    }

    /// The whole globe.
    pub fn world() -> Self {
        Geometry::BBox {
            min_lat: -90.0,
            min_lon: -180.0,
            max_lat: 90.0,
            max_lon: 180.0,
        }
    }

    /// `(min_lat, min_lon, max_lat, max_lon)`; a point is a degenerate box.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Geometry::Point { lat, lon } => (lat, lon, lat, lon),
            Geometry::BBox {
                min_lat,
                min_lon,
                max_lat,
                max_lon,
            } => (min_lat, min_lon, max_lat, max_lon),
        }
    }

    /// Smallest box covering both; two identical points stay a point.
    pub fn envelope(&self, other: &Geometry) -> Geometry {
        if self == other {
            return *self;
        }
        let (a0, a1, a2, a3) = self.bounds();
        let (b0, b1, b2, b3) = other.bounds();
        Geometry::BBox {
            min_lat: a0.min(b0),
            min_lon: a1.min(b1),
            max_lat: a2.max(b2),
            max_lon: a3.max(b3),
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Point { lat, lon } => write!(f, "POINT({lat} {lon})"),
            Geometry::BBox {
                min_lat,
                min_lon,
                max_lat,
                max_lon,
            } => write!(f, "BBOX({min_lat} {min_lon} {max_lat} {max_lon})"),
        }
    }
}

impl FromStr for Geometry {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ModelError::Parse {
            what: "geometry",
            input: s.to_string(),
        };
        let (tag, rest) = s.trim().split_once('(').ok_or_else(err)?;
        let body = rest.strip_suffix(')').ok_or_else(err)?;
        let nums = body
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        match (tag, nums.as_slice()) {
            ("POINT", [lat, lon]) => Geometry::point(*lat, *lon),
            ("BBOX", [a, b, c, d]) => Geometry::bbox(*a, *b, *c, *d),
            _ => Err(err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        for g in [
            Geometry::point(30.0, -90.0).unwrap(),
            Geometry::bbox(29.0, -91.5, 31.25, -89.0).unwrap(),
        ] {
            assert_eq!(g.to_string().parse::<Geometry>().unwrap(), g);
        }
        assert_eq!(
            Geometry::point(30.0, -90.0).unwrap().to_string(),
            "POINT(30 -90)"
        );
    }

    #[test]
    fn invalid_coordinates() {
        assert!(Geometry::point(91.0, 0.0).is_err());
        assert!(Geometry::point(0.0, -180.5).is_err());
        assert!(Geometry::point(f64::NAN, 0.0).is_err());
        assert!(Geometry::bbox(31.0, -91.0, 29.0, -89.0).is_err());
        // would need antimeridian wrap
        assert!(Geometry::bbox(0.0, 170.0, 1.0, -170.0).is_err());
        assert!("POINT(1)".parse::<Geometry>().is_err());
        assert!("CIRCLE(1 2)".parse::<Geometry>().is_err());
    }
}
