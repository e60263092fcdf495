//! NOAA Storm Events bulk CSV.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::{DateTime, NaiveDateTime};
use csv::StringRecord;

use super::{
    locate, reader, record_line, record_or_reject, IngestError, IngestReport, RowError, Strictness,
};
use crate::model::{
    EntityId, GeoEvent, GeoObject, Geometry, Measurement, SpatioTemporalRegion, TimeInterval,
    Timestamp,
};
use crate::store::{KnowledgeGraph, RelationKind};

pub const STORM_COLUMNS: [&str; 14] = [
    "EPISODE_ID",
    "EVENT_ID",
    "EVENT_TYPE",
    "BEGIN_DATE_TIME",
    "END_DATE_TIME",
    "CZ_TIMEZONE",
    "BEGIN_LAT",
    "BEGIN_LON",
    "END_LAT",
    "END_LON",
    "DAMAGE_PROPERTY",
    "DEATHS_DIRECT",
    "MAGNITUDE",
    "MAGNITUDE_TYPE",
];

const EPISODE_ID: usize = 0;
const EVENT_ID: usize = 1;
const EVENT_TYPE: usize = 2;
const BEGIN: usize = 3;
const END: usize = 4;
const TIMEZONE: usize = 5;
const BEGIN_LAT: usize = 6;
const BEGIN_LON: usize = 7;
const END_LAT: usize = 8;
const END_LON: usize = 9;
const DAMAGE: usize = 10;
const DEATHS: usize = 11;
const MAGNITUDE: usize = 12;
const MAGNITUDE_TYPE: usize = 13;

/// Wind magnitude types (estimated/measured gust, sustained); anything else
/// with a magnitude is a hail size in inches.
const WIND_TYPES: [&str; 4] = ["EG", "ES", "MG", "MS"];

#[derive(Debug)]
struct StormRow {
    line: u64,
    episode: EntityId,
    episode_region: EntityId,
    event: EntityId,
    region: EntityId,
    impact: EntityId,
    kind: String,
    interval: TimeInterval,
    geometry: Option<Geometry>,
    impacts: Vec<Measurement>,
}

pub fn ingest_storm_csv<R: Read>(
    graph: &mut KnowledgeGraph,
    source: R,
    strictness: Strictness,
) -> Result<IngestReport, IngestError> {
    let mut rdr = reader(source);
    let cols = locate(rdr.headers()?, &STORM_COLUMNS)?;
    let mut report = IngestReport::new(strictness);
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();

    for rec in rdr.records() {
        report.rows_read += 1;
        let line = record_line(&rec);
        let parsed = record_or_reject(rec)?
            .and_then(|r| parse_row(&r, &cols, line))
            .and_then(|row| {
                for id in [&row.event, &row.region, &row.impact] {
                    if graph.contains_entity(id.as_str()) {
                        return Err(RowError::DuplicateId(id.to_string()));
                    }
                }
                if !seen.insert(row.event.clone()) {
                    return Err(RowError::DuplicateId(row.event.to_string()));
                }
                for id in [&row.episode, &row.episode_region] {
                    if graph.contains_entity(id.as_str()) {
                        return Err(RowError::DuplicateId(id.to_string()));
                    }
                }
                Ok(row)
            });
        match parsed {
            Ok(row) => rows.push(row),
            Err(reason) => report.reject(line, reason)?,
        }
    }

    let default_region = rows
        .iter()
        .filter_map(|r| r.geometry)
        .reduce(|a, b| a.envelope(&b))
        .unwrap_or_else(Geometry::world);

    let mut work = graph.clone();
    let before = work.triple_count();
    let mut episodes: BTreeMap<EntityId, (EntityId, Geometry, TimeInterval)> = BTreeMap::new();
    for row in rows {
        let geometry = row.geometry.unwrap_or_else(|| {
            report.warn(
                row.line,
                "W-INGEST-DEFAULT-REGION",
                format!("{} has no coordinates; using {default_region}", row.event),
            );
            default_region
        });
        if !work.contains_entity(row.episode.as_str()) {
            work.add_entity(GeoEvent::new(row.episode.clone(), "Episode")?)?;
        }
        episodes
            .entry(row.episode.clone())
            .and_modify(|(_, g, iv)| {
                *g = g.envelope(&geometry);
                *iv = iv.envelope(&row.interval);
            })
            .or_insert((row.episode_region.clone(), geometry, row.interval));

        work.add_entity(GeoEvent::new(row.event.clone(), row.kind)?)?;
        work.add_entity(SpatioTemporalRegion::new(
            row.region.clone(),
            geometry,
            row.interval,
        ))?;
        work.assert(
            &row.event,
            RelationKind::SpatioTemporallyPresent,
            &row.region,
        )?;
        work.assert(&row.event, RelationKind::PartOf, &row.episode)?;
        if !row.impacts.is_empty() {
            work.add_entity(GeoObject::new(
                row.impact.clone(),
                "ImpactRecord",
                row.impacts,
            )?)?;
            work.assert(
                &row.impact,
                RelationKind::SpatioTemporallyPresent,
                &row.region,
            )?;
            work.assert(&row.impact, RelationKind::ParticipantIn, &row.event)?;
        }
        report.entities_created += 1;
    }
    for (episode, (region, geometry, interval)) in episodes {
        work.add_entity(SpatioTemporalRegion::new(
            region.clone(),
            geometry,
            interval,
        ))?;
        work.assert(&episode, RelationKind::SpatioTemporallyPresent, &region)?;
    }
    report.triples_created = work.triple_count() - before;
    *graph = work;
    Ok(report)
}

fn parse_row(rec: &StringRecord, cols: &[usize], line: u64) -> Result<StormRow, RowError> {
    let get = |i: usize| rec.get(cols[i]).unwrap_or("");
    let ident = |i: usize| {
        let raw = get(i);
        if raw.is_empty() {
            return Err(RowError::field(STORM_COLUMNS[i], "empty identifier"));
        }
        Ok(raw)
    };
    let episode = ident(EPISODE_ID)?;
    let event = ident(EVENT_ID)?;
    let id =
        |i: usize, s: String| EntityId::new(s).map_err(|e| RowError::model(STORM_COLUMNS[i], e));

    let kind = sanitize_kind(get(EVENT_TYPE))
        .ok_or_else(|| RowError::field("EVENT_TYPE", "no usable event type"))?;
    let tz = get(TIMEZONE);
    let begin =
        parse_local_time(get(BEGIN), tz).map_err(|m| RowError::field("BEGIN_DATE_TIME", m))?;
    let end = parse_local_time(get(END), tz).map_err(|m| RowError::field("END_DATE_TIME", m))?;
    let interval =
        TimeInterval::new(begin, end).map_err(|e| RowError::model("END_DATE_TIME", e))?;

    let begin_pt = coordinate(get(BEGIN_LAT), get(BEGIN_LON), "BEGIN_LAT")?;
    let end_pt = coordinate(get(END_LAT), get(END_LON), "END_LAT")?;
    let geometry = match (begin_pt, end_pt) {
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(a), Some(b)) => Some(a.envelope(&b)),
        (a, b) => a.or(b),
    };

    let mut impacts = Vec::new();
    let damage = get(DAMAGE);
    if !damage.is_empty() {
        let usd = parse_damage(damage)
            .ok_or_else(|| RowError::field("DAMAGE_PROPERTY", format!("bad amount {damage:?}")))?;
        impacts.push(
            Measurement::quantity("DamageProperty", usd, "USD")
                .map_err(|e| RowError::model("DAMAGE_PROPERTY", e))?,
        );
    }
    let deaths = get(DEATHS);
    if !deaths.is_empty() {
        let n: u32 = deaths.parse().map_err(|_| {
            RowError::field("DEATHS_DIRECT", format!("expected a count, got {deaths:?}"))
        })?;
        impacts.push(
            Measurement::quantity("DeathsDirect", f64::from(n), "1")
                .map_err(|e| RowError::model("DEATHS_DIRECT", e))?,
        );
    }
    let magnitude = get(MAGNITUDE);
    if !magnitude.is_empty() {
        let m = number(magnitude, "MAGNITUDE")?;
        let mtype = get(MAGNITUDE_TYPE).to_ascii_uppercase();
        let (attr, unit) = if WIND_TYPES.contains(&mtype.as_str()) {
            ("WindSpeed", "kn")
        } else {
            ("HailSize", "in")
        };
        impacts.push(
            Measurement::quantity(attr, m, unit).map_err(|e| RowError::model("MAGNITUDE", e))?,
        );
    }

    Ok(StormRow {
        line,
        episode: id(EPISODE_ID, format!("ev:episode-{episode}"))?,
        episode_region: id(EPISODE_ID, format!("reg:episode-{episode}"))?,
        event: id(EVENT_ID, format!("ev:event-{event}"))?,
        region: id(EVENT_ID, format!("reg:event-{event}"))?,
        impact: id(EVENT_ID, format!("obj:impact-{event}"))?,
        kind,
        interval,
        geometry,
        impacts,
    })
}

fn number(raw: &str, column: &'static str) -> Result<f64, RowError> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| RowError::field(column, format!("expected a number, got {raw:?}")))
}

fn coordinate(lat: &str, lon: &str, column: &'static str) -> Result<Option<Geometry>, RowError> {
    match (lat.is_empty(), lon.is_empty()) {
        (true, true) => Ok(None),
        (false, false) => Geometry::point(number(lat, column)?, number(lon, column)?)
            .map(Some)
            .map_err(|e| RowError::model(column, e)),
        _ => Err(RowError::field(
            column,
            "latitude and longitude must both be given",
        )),
    }
}

/// UTC offset in seconds for a `CZ_TIMEZONE` token. NOAA writes these with
/// an hour suffix (`CST-6`); the suffix is ignored. An empty token is UTC.
pub fn timezone_offset(token: &str) -> Option<i64> {
    let name = token.split(['-', '+']).next().unwrap_or("").trim();
    let hours = match name.to_ascii_uppercase().as_str() {
        "" | "UTC" => 0,
        "EDT" => -4,
        "EST" | "CDT" => -5,
        "CST" | "MDT" => -6,
        "MST" | "PDT" => -7,
        "PST" => -8,
        _ => return None,
    };
    Some(hours * 3600)
}

const LOCAL_FORMATS: [&str; 6] = [
    "%d-%b-%y %H:%M:%S",
    "%d-%b-%Y %H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S",
    "%m/%d/%Y %H:%M:%S",
    "%m/%d/%Y %H:%M",
];

/// Reads a local wall-clock time in zone `tz` and returns the UTC instant.
/// Timestamps carrying their own offset (RFC 3339) ignore `tz`.
/// Two-digit years pivot at 1969, so `55` means 2055.
pub fn parse_local_time(raw: &str, tz: &str) -> Result<Timestamp, String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(Timestamp::from_unix(dt.timestamp()));
    }
    let offset = timezone_offset(tz).ok_or_else(|| format!("unknown timezone {tz:?}"))?;
    LOCAL_FORMATS
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(raw, fmt).ok())
        .map(|dt| Timestamp::from_unix(dt.and_utc().timestamp() - offset))
        .ok_or_else(|| format!("unrecognised date-time {raw:?}"))
}

/// NOAA damage amounts: a number with an optional K/M/B multiplier.
pub fn parse_damage(raw: &str) -> Option<f64> {
    let raw = raw.trim();
    let (digits, mult) = match raw.chars().last()?.to_ascii_uppercase() {
        'K' => (&raw[..raw.len() - 1], 1e3),
        'M' => (&raw[..raw.len() - 1], 1e6),
        'B' => (&raw[..raw.len() - 1], 1e9),
        _ => (raw, 1.0),
    };
    // A bare suffix ("K") means zero in older exports.
    let value = if digits.is_empty() {
        0.0
    } else {
        digits.parse::<f64>().ok()?
    };
    (value.is_finite() && value >= 0.0).then_some(value * mult)
}

/// `"Flash Flood"` becomes `FlashFlood`; all-caps words are title-cased and
/// punctuation is dropped. Returns `None` when nothing alphanumeric remains.
pub fn sanitize_kind(raw: &str) -> Option<String> {
    let mut out = String::new();
    for word in raw
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
    {
        let mut chars = word.chars();
        let first = chars.next()?;
        out.push(first.to_ascii_uppercase());
        let rest: String = chars.collect();
        if word.len() > 1 && word.chars().all(|c| !c.is_ascii_lowercase()) {
            out.push_str(&rest.to_ascii_lowercase());
        } else {
            out.push_str(&rest);
        }
    }
    (!out.is_empty()).then_some(out)
}
