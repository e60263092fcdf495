//! Line-oriented text persistence.
//!
//! ```text
//! ENT <id> object <Kind> [Attr=token | Attr="<magnitude> <unit>"]...
//! ENT <id> event <Kind>
//! ENT <id> situation <start>/<end> [Attr=...]...
//! ENT <id> precondition <EventKind>
//! REG <id> POINT(lat lon)|BBOX(minlat minlon maxlat maxlon) <start> <end>
//! TRI <subject> <predicate> <object> [DERIVED rule=<id> premises=<n>]
//! PRE <subject> <predicate> <object>      (n lines after a DERIVED triple)
//! ```
//!
//! Entities are written in id order, then triples in key order. `#` starts
//! a comment line; blank lines are ignored.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{KnowledgeGraph, Provenance, RelationKind, StoreError, TripleKey};
use crate::model::{
    Entity, EntityId, GeoEvent, GeoObject, GeoSituation, Geometry, Measurement, PreconditionRef,
    SpatioTemporalRegion, TimeInterval, Timestamp, Value,
};

fn write_attributes(out: &mut String, attrs: &BTreeMap<String, Value>) {
    for (name, value) in attrs {
        match value {
            Value::Quantity(q) => out.push_str(&format!(" {name}=\"{q}\"")),
            Value::Categorical(t) => out.push_str(&format!(" {name}={t}")),
        }
    }
}

pub(crate) fn entity_line(entity: &Entity) -> String {
    let mut line = String::new();
    match entity {
        Entity::Object(o) => {
            line.push_str(&format!("ENT {} object {}", o.id(), o.kind()));
            write_attributes(&mut line, o.attributes());
        }
        Entity::Event(e) => line.push_str(&format!("ENT {} event {}", e.id(), e.kind())),
        Entity::Situation(s) => {
            line.push_str(&format!("ENT {} situation {}", s.id(), s.holds_during()));
            write_attributes(&mut line, s.observations());
        }
        Entity::Precondition(p) => {
            line.push_str(&format!("ENT {} precondition {}", p.id(), p.event_kind()))
        }
        Entity::Region(r) => line.push_str(&format!(
            "REG {} {} {} {}",
            r.id,
            r.geometry,
            r.interval.start(),
            r.interval.end()
        )),
    }
    line
}

impl KnowledgeGraph {
    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), StoreError> {
        sink.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entity in self.entities() {
            out.push_str(&entity_line(entity));
            out.push('\n');
        }
        for (key, provenance) in &self.triples {
            out.push_str(&format!("TRI {key}"));
            match provenance {
                Provenance::Asserted => out.push('\n'),
                Provenance::Derived { rule, premises } => {
                    out.push_str(&format!(
                        " DERIVED rule={rule} premises={}\n",
                        premises.len()
                    ));
                    for p in premises {
                        out.push_str(&format!("PRE {p}\n"));
                    }
                }
            }
        }
        out
    }

    pub fn load<R: BufRead>(source: R) -> Result<KnowledgeGraph, StoreError> {
        let mut lines = Vec::new();
        for line in source.lines() {
            lines.push(line?);
        }
        parse_document(lines.iter().map(String::as_str))
    }

    pub fn from_text(text: &str) -> Result<KnowledgeGraph, StoreError> {
        parse_document(text.lines())
    }
}

struct PendingTriple {
    line: usize,
    key: TripleKey,
    derived: Option<(String, usize, Vec<TripleKey>)>,
}

fn at(line: usize, err: impl Into<StoreError>) -> StoreError {
    StoreError::Load {
        line,
        source: Box::new(err.into()),
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> StoreError {
    at(line, StoreError::Syntax(msg.into()))
}

fn parse_document<'a>(lines: impl Iterator<Item = &'a str>) -> Result<KnowledgeGraph, StoreError> {
    let mut graph = KnowledgeGraph::new();
    let mut pending: Vec<PendingTriple> = Vec::new();

    for (idx, raw) in lines.enumerate() {
        let n = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens = tokenize(line).map_err(|m| syntax(n, m))?;
        match tokens[0].as_str() {
            "ENT" => {
                let entity = parse_entity(&tokens).map_err(|e| at(n, e))?;
                graph.add_entity(entity).map_err(|e| at(n, e))?;
            }
            "REG" => {
                let region = parse_region(&tokens).map_err(|e| at(n, e))?;
                graph.add_entity(region).map_err(|e| at(n, e))?;
            }
            "TRI" => {
                if let Some(open) = pending.last() {
                    if let Some((_, want, got)) = &open.derived {
                        if got.len() < *want {
                            return Err(syntax(
                                n,
                                format!("expected PRE line ({} of {want})", got.len() + 1),
                            ));
                        }
                    }
                }
                pending.push(parse_triple(&tokens).map_err(|e| at(n, e)).map(
                    |(key, derived)| PendingTriple {
                        line: n,
                        key,
                        derived: derived.map(|(rule, count)| (rule, count, Vec::new())),
                    },
                )?);
            }
            "PRE" => {
                let key = parse_key(&tokens[1..]).map_err(|e| at(n, e))?;
                match pending.last_mut().and_then(|p| p.derived.as_mut()) {
                    Some((_, want, got)) if got.len() < *want => got.push(key),
                    _ => return Err(syntax(n, "PRE line without an open DERIVED triple")),
                }
            }
            other => return Err(syntax(n, format!("unknown record type `{other}`"))),
        }
    }
    if let Some(PendingTriple {
        line,
        derived: Some((_, want, got)),
        ..
    }) = pending.last()
    {
        if got.len() < *want {
            return Err(syntax(
                *line,
                format!("DERIVED triple lists {want} premises, found {}", got.len()),
            ));
        }
    }

    let lines: Vec<usize> = pending.iter().map(|p| p.line).collect();
    let items = pending
        .into_iter()
        .map(|p| {
            let prov = match p.derived {
                None => Provenance::Asserted,
                Some((rule, _, premises)) => Provenance::Derived { rule, premises },
            };
            (p.key, prov)
        })
        .collect();
    graph.insert_all(items).map_err(|(i, e)| at(lines[i], e))?;
    Ok(graph)
}

/// Splits on whitespace, keeping `"..."` and `(...)` groups intact.
fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut in_quote = false;
    let mut depth = 0usize;
    for c in line.chars() {
        match c {
            '"' => {
                in_quote = !in_quote;
                cur.push(c);
            }
            '(' if !in_quote => {
                depth += 1;
                cur.push(c);
            }
            ')' if !in_quote => {
                depth = depth.checked_sub(1).ok_or("unbalanced `)`")?;
                cur.push(c);
            }
            c if c.is_whitespace() && !in_quote && depth == 0 => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if in_quote {
        return Err("unterminated quote".into());
    }
    if depth != 0 {
        return Err("unbalanced `(`".into());
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    Ok(tokens)
}

fn parse_attributes(tokens: &[String]) -> Result<Vec<Measurement>, StoreError> {
    tokens
        .iter()
        .map(|tok| {
            let (name, raw) = tok
                .split_once('=')
                .ok_or_else(|| StoreError::Syntax(format!("expected attr=value, got `{tok}`")))?;
            let value = match raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
                Some(q) => Value::Quantity(q.parse()?),
                None => Value::categorical(raw)?,
            };
            Ok(Measurement::new(name, value)?)
        })
        .collect()
}

fn parse_entity(tokens: &[String]) -> Result<Entity, StoreError> {
    if tokens.len() < 4 {
        return Err(StoreError::Syntax("ENT needs <id> <role> <kind>".into()));
    }
    let id = EntityId::new(tokens[1].as_str())?;
    let kind = tokens[3].as_str();
    let rest = &tokens[4..];
    let no_extra = |role: &str| {
        if rest.is_empty() {
            Ok(())
        } else {
            Err(StoreError::Syntax(format!(
                "{role} entities take no attributes"
            )))
        }
    };
    Ok(match tokens[2].as_str() {
        "object" => GeoObject::new(id, kind, parse_attributes(rest)?)?.into(),
        "event" => {
            no_extra("event")?;
            GeoEvent::new(id, kind)?.into()
        }
        "situation" => {
            let during: TimeInterval = kind.parse()?;
            GeoSituation::new(id, during, parse_attributes(rest)?)?.into()
        }
        "precondition" => {
            no_extra("precondition")?;
            PreconditionRef::new(id, kind)?.into()
        }
        other => return Err(StoreError::Syntax(format!("unknown entity role `{other}`"))),
    })
}

fn parse_region(tokens: &[String]) -> Result<Entity, StoreError> {
    if tokens.len() != 5 {
        return Err(StoreError::Syntax(
            "REG needs <id> <geometry> <start> <end>".into(),
        ));
    }
    let id = EntityId::new(tokens[1].as_str())?;
    let geometry: Geometry = tokens[2].parse()?;
    let interval = TimeInterval::new(Timestamp::parse(&tokens[3])?, Timestamp::parse(&tokens[4])?)?;
    Ok(SpatioTemporalRegion::new(id, geometry, interval).into())
}

fn parse_key(tokens: &[String]) -> Result<TripleKey, StoreError> {
    if tokens.len() != 3 {
        return Err(StoreError::Syntax(
            "expected <subject> <predicate> <object>".into(),
        ));
    }
    let predicate: RelationKind = tokens[1]
        .parse()
        .map_err(|e: super::UnknownRelation| StoreError::Syntax(e.to_string()))?;
    Ok(TripleKey::new(
        EntityId::new(tokens[0].as_str())?,
        predicate,
        EntityId::new(tokens[2].as_str())?,
    ))
}

type Derivation = Option<(String, usize)>;

fn parse_triple(tokens: &[String]) -> Result<(TripleKey, Derivation), StoreError> {
    match tokens.len() {
        4 => Ok((parse_key(&tokens[1..4])?, None)),
        7 if tokens[4] == "DERIVED" => {
            let key = parse_key(&tokens[1..4])?;
            let rule = tokens[5]
                .strip_prefix("rule=")
                .filter(|r| !r.is_empty())
                .ok_or_else(|| StoreError::Syntax("expected rule=<id>".into()))?;
            let count = tokens[6]
                .strip_prefix("premises=")
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| StoreError::Syntax("expected premises=<n>".into()))?;
            Ok((key, Some((rule.to_string(), count))))
        }
        _ => Err(StoreError::Syntax(
            "TRI needs <subject> <predicate> <object> [DERIVED rule=<id> premises=<n>]".into(),
        )),
    }
}
