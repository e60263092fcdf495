//! UTC timestamps at second resolution, durations, and closed intervals.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};

use super::ModelError;

/// UTC instant, seconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_unix(secs: i64) -> Self {
        Self(secs)
    }

    pub const fn unix(self) -> i64 {
        self.0
    }

    /// Accepts RFC 3339 (`2005-08-29T11:10:00Z`, any offset), a naive
    /// `YYYY-MM-DDTHH:MM:SS` / `YYYY-MM-DD HH:MM:SS` read as UTC, or a bare
    /// date read as UTC midnight. Sub-second parts are truncated.
    pub fn parse(input: &str) -> Result<Self, ModelError> {
        let s = input.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Ok(Self(dt.timestamp()));
        }
        for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
            if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
                return Ok(Self(dt.and_utc().timestamp()));
            }
        }
        if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            return Ok(Self(d.and_time(Default::default()).and_utc().timestamp()));
        }
        Err(ModelError::Parse {
            what: "timestamp",
            input: input.to_string(),
        })
    }

    pub fn saturating_add(self, d: Duration) -> Self {
        Self(self.0.saturating_add(d.secs()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match DateTime::<Utc>::from_timestamp(self.0, 0) {
            Some(dt) => f.write_str(&dt.to_rfc3339_opts(SecondsFormat::Secs, true)),
            None => write!(f, "@{}", self.0),
        }
    }
}

impl FromStr for Timestamp {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Signed span of time in whole seconds. Written as `<n><s|min|h|d>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Duration(i64);

impl Duration {
    pub const fn seconds(secs: i64) -> Self {
        Self(secs)
    }

    pub const fn minutes(m: i64) -> Self {
        Self(m * 60)
    }

    pub const fn hours(h: i64) -> Self {
        Self(h * 3600)
    }

    pub const fn days(d: i64) -> Self {
        Self(d * 86_400)
    }

    pub const fn secs(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

const DURATION_UNITS: [(&str, i64); 4] = [("d", 86_400), ("h", 3600), ("min", 60), ("s", 1)];

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // largest unit that divides exactly
        for (suffix, n) in DURATION_UNITS {
            if self.0 != 0 && self.0 % n == 0 {
                return write!(f, "{}{}", self.0 / n, suffix);
            }
        }
        write!(f, "{}s", self.0)
    }
}

impl FromStr for Duration {
    type Err = ModelError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = || ModelError::Parse {
            what: "duration",
            input: input.to_string(),
        };
        let s = input.trim();
        let split = s
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+'))))
            .map(|(i, _)| i)
            .ok_or_else(err)?;
        let (num, suffix) = s.split_at(split);
        let n: i64 = num.parse().map_err(|_| err())?;
        let mult = DURATION_UNITS
            .iter()
            .find(|(u, _)| *u == suffix)
            .map(|(_, m)| *m)
            .ok_or_else(err)?;
        n.checked_mul(mult).map(Self).ok_or_else(err)
    }
}

/// Closed interval `[start, end]`; `start == end` is a point instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeInterval {
    start: Timestamp,
    end: Timestamp,
}

impl TimeInterval {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self, ModelError> {
        if start > end {
            return Err(ModelError::OrderViolation { start, end });
        }
        Ok(Self { start, end })
    }

    /// Parses both endpoints and builds the interval.
    pub fn parse(start: &str, end: &str) -> Result<Self, ModelError> {
        Self::new(Timestamp::parse(start)?, Timestamp::parse(end)?)
    }

    pub fn point(t: Timestamp) -> Self {
        Self { start: t, end: t }
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn envelope(&self, other: &TimeInterval) -> TimeInterval {
        TimeInterval {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.start, self.end)
    }
}

impl FromStr for TimeInterval {
    type Err = ModelError;

    /// ISO-8601 `start/end` form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('/').ok_or_else(|| ModelError::Parse {
            what: "interval",
            input: s.to_string(),
        })?;
        Self::parse(a, b)
    }
}
