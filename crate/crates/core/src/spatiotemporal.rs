//! Allen interval relations and the spatial / spatio-temporal predicates
//! built on them.
//!
//! Intervals are closed and may be points. Classification compares start
//! with start and end with end first, then splits the two "staggered" cells
//! on the gap between them, so every pair lands in exactly one relation.

use std::cmp::Ordering;
use std::fmt;

use crate::model::{Geometry, SpatioTemporalRegion, TimeInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalRelation {
    Before,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    FinishedBy,
    Contains,
    StartedBy,
    OverlappedBy,
    MetBy,
    After,
}

impl IntervalRelation {
    pub const ALL: [IntervalRelation; 13] = [
        IntervalRelation::Before,
        IntervalRelation::Meets,
        IntervalRelation::Overlaps,
        IntervalRelation::Starts,
        IntervalRelation::During,
        IntervalRelation::Finishes,
        IntervalRelation::Equals,
        IntervalRelation::FinishedBy,
        IntervalRelation::Contains,
        IntervalRelation::StartedBy,
        IntervalRelation::OverlappedBy,
        IntervalRelation::MetBy,
        IntervalRelation::After,
    ];

    pub fn inverse(self) -> IntervalRelation {
        use IntervalRelation::*;
        match self {
            Before => After,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            Starts => StartedBy,
            During => Contains,
            Finishes => FinishedBy,
            Equals => Equals,
            FinishedBy => Finishes,
            Contains => During,
            StartedBy => Starts,
            OverlappedBy => Overlaps,
            MetBy => Meets,
            After => Before,
        }
    }
}

impl fmt::Display for IntervalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn interval_relation(a: &TimeInterval, b: &TimeInterval) -> IntervalRelation {
    use IntervalRelation::*;
    use Ordering::*;
    match (a.start().cmp(&b.start()), a.end().cmp(&b.end())) {
        (Equal, Equal) => Equals,
        (Equal, Less) => Starts,
        (Equal, Greater) => StartedBy,
        (Greater, Equal) => Finishes,
        (Less, Equal) => FinishedBy,
        (Greater, Less) => During,
        (Less, Greater) => Contains,
        (Less, Less) => match a.end().cmp(&b.start()) {
            Less => Before,
            Equal => Meets,
            Greater => Overlaps,
        },
        (Greater, Greater) => match a.start().cmp(&b.end()) {
            Greater => After,
            Equal => MetBy,
            Less => OverlappedBy,
        },
    }
}

/// `a` lies entirely before `b`, possibly touching it (Before or Meets).
pub fn precedes(a: &TimeInterval, b: &TimeInterval) -> bool {
    matches!(
        interval_relation(a, b),
        IntervalRelation::Before | IntervalRelation::Meets
    )
}

/// `inner` is a temporal part of `outer`.
pub fn temporally_nested(inner: &TimeInterval, outer: &TimeInterval) -> bool {
    matches!(
        interval_relation(inner, outer),
        IntervalRelation::During
            | IntervalRelation::Starts
            | IntervalRelation::Finishes
            | IntervalRelation::Equals
    )
}

/// Closed-rectangle intersection; points are degenerate boxes.
pub fn spatial_overlap(a: &Geometry, b: &Geometry) -> bool {
    let (a_lat0, a_lon0, a_lat1, a_lon1) = a.bounds();
    let (b_lat0, b_lon0, b_lat1, b_lon1) = b.bounds();
    a_lat0 <= b_lat1 && b_lat0 <= a_lat1 && a_lon0 <= b_lon1 && b_lon0 <= a_lon1
}

/// Overlapping footprints and shared duration (touching in time is not enough).
pub fn co_occurs(a: &SpatioTemporalRegion, b: &SpatioTemporalRegion) -> bool {
    spatial_overlap(&a.geometry, &b.geometry)
        && !matches!(
            interval_relation(&a.interval, &b.interval),
            IntervalRelation::Before
                | IntervalRelation::After
                | IntervalRelation::Meets
                | IntervalRelation::MetBy
        )
}
