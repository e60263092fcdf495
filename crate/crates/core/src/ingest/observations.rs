//! Generic observation tables: one measurement per row, grouped into
//! situations by `situation_id`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use csv::StringRecord;

use super::{
    find, locate, reader, record_line, record_or_reject, IngestError, IngestReport, RowError,
    Strictness,
};
use crate::model::{
    validate_label, EntityId, GeoSituation, Geometry, Measurement, Quantity, TimeInterval,
    Timestamp, Unit, Value,
};
use crate::store::KnowledgeGraph;

pub const OBSERVATION_COLUMNS: [&str; 6] = [
    "situation_id",
    "timestamp_start",
    "timestamp_end",
    "attribute",
    "value",
    "unit",
];

const SITUATION: usize = 0;
const START: usize = 1;
const END: usize = 2;
const ATTRIBUTE: usize = 3;
const VALUE: usize = 4;
const UNIT: usize = 5;

struct ObservationRow {
    situation: EntityId,
    interval: TimeInterval,
    measurement: Measurement,
}

#[derive(Default)]
struct Group {
    interval: Option<TimeInterval>,
    attributes: BTreeSet<String>,
    measurements: Vec<Measurement>,
}

/// Optional `lat`/`lon` columns are validated but not stored: situations
/// carry no region of their own.
pub fn ingest_observations_csv<R: Read>(
    graph: &mut KnowledgeGraph,
    source: R,
    strictness: Strictness,
) -> Result<IngestReport, IngestError> {
    let mut rdr = reader(source);
    let headers = rdr.headers()?.clone();
    let cols = locate(&headers, &OBSERVATION_COLUMNS)?;
    let coords = (find(&headers, "lat"), find(&headers, "lon"));
    let mut report = IngestReport::new(strictness);
    let mut groups: BTreeMap<EntityId, Group> = BTreeMap::new();

    for rec in rdr.records() {
        report.rows_read += 1;
        let line = record_line(&rec);
        let parsed = record_or_reject(rec)?
            .and_then(|r| parse_row(&r, &cols, coords))
            .and_then(|row| {
                if graph.contains_entity(row.situation.as_str()) {
                    return Err(RowError::DuplicateId(row.situation.to_string()));
                }
                let attr = row.measurement.attribute.clone();
                if groups
                    .get(&row.situation)
                    .is_some_and(|g| g.attributes.contains(&attr))
                {
                    return Err(RowError::DuplicateAttribute {
                        situation: row.situation.to_string(),
                        attribute: attr,
                    });
                }
                Ok(row)
            });
        match parsed {
            Ok(row) => {
                let group = groups.entry(row.situation).or_default();
                group.interval = Some(match group.interval {
                    Some(iv) => iv.envelope(&row.interval),
                    None => row.interval,
                });
                group.attributes.insert(row.measurement.attribute.clone());
                group.measurements.push(row.measurement);
            }
            Err(reason) => report.reject(line, reason)?,
        }
    }

    let mut work = graph.clone();
    for (id, group) in groups {
        let interval = group.interval.expect("groups hold at least one row");
        work.add_entity(GeoSituation::new(id, interval, group.measurements)?)?;
        report.entities_created += 1;
    }
    *graph = work;
    Ok(report)
}

fn parse_row(
    rec: &StringRecord,
    cols: &[usize],
    coords: (Option<usize>, Option<usize>),
) -> Result<ObservationRow, RowError> {
    let get = |i: usize| rec.get(cols[i]).unwrap_or("");
    let model = |i: usize| move |e| RowError::model(OBSERVATION_COLUMNS[i], e);

    let situation = EntityId::new(get(SITUATION)).map_err(model(SITUATION))?;
    let start = Timestamp::parse(get(START)).map_err(model(START))?;
    let end = Timestamp::parse(get(END)).map_err(model(END))?;
    let interval = TimeInterval::new(start, end).map_err(model(END))?;
    let attribute = get(ATTRIBUTE);
    validate_label("attribute", attribute).map_err(model(ATTRIBUTE))?;

    let raw = get(VALUE);
    let unit = get(UNIT);
    let value = if unit.is_empty() {
        Value::categorical(raw).map_err(model(VALUE))?
    } else {
        let unit = Unit::lookup(unit).map_err(model(UNIT))?;
        let magnitude: f64 = raw
            .parse()
            .map_err(|_| RowError::field("value", format!("expected a number, got {raw:?}")))?;
        Value::Quantity(Quantity::new(magnitude, unit).map_err(model(VALUE))?)
    };

    let coord = |i: Option<usize>| i.and_then(|i| rec.get(i)).unwrap_or("");
    match (coord(coords.0), coord(coords.1)) {
        ("", "") => {}
        (lat, lon) => {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| RowError::field("lat", format!("bad coordinate {s:?}")))
            };
            Geometry::point(parse(lat)?, parse(lon)?).map_err(|e| RowError::model("lat", e))?;
        }
    }

    Ok(ObservationRow {
        situation,
        interval,
        measurement: Measurement::new(attribute, value).map_err(model(ATTRIBUTE))?,
    })
}
