//! Shared helpers for integration tests: fixtures, random graph generators
//! and a brute-force closure oracle that shares no code with the engine.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use geocausal::engine::EngineConfig;
use geocausal::model::{
    Comparator, Duration, Entity, EntityId, GeoEvent, GeoObject, GeoSituation, Geometry,
    Measurement, PreconditionRef, SpatioTemporalRegion, TimeInterval, Timestamp, Value,
};
use geocausal::rules::{parse_rules, CauseConstraint, RuleSet};
use geocausal::{KnowledgeGraph, RelationKind, TripleKey};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn id(s: &str) -> EntityId {
    EntityId::new(s).unwrap()
}

const BASE: i64 = 1_125_000_000; // 2005-08-25T20:00:00Z
const KINDS: [&str; 2] = ["A", "B"];

fn hours(h: i64) -> Timestamp {
    Timestamp::from_unix(BASE + h * 3600)
}

fn random_interval(rng: &mut impl Rng) -> TimeInterval {
    span(rng, 0..40, 1..12)
}

/// Starts in `starts`; zero length about one time in seven.
fn span(
    rng: &mut impl Rng,
    starts: std::ops::Range<i64>,
    lens: std::ops::Range<i64>,
) -> TimeInterval {
    let start = rng.gen_range(starts);
    let len = if rng.gen_bool(0.15) {
        0
    } else {
        rng.gen_range(lens)
    };
    TimeInterval::new(hours(start), hours(start + len)).unwrap()
}

fn random_geometry(rng: &mut impl Rng) -> Geometry {
    let lat = rng.gen_range(0..4) as f64;
    let lon = rng.gen_range(0..4) as f64;
    if rng.gen_bool(0.3) {
        Geometry::point(lat, lon).unwrap()
    } else {
        Geometry::bbox(
            lat,
            lon,
            lat + rng.gen_range(0..3) as f64,
            lon + rng.gen_range(0..3) as f64,
        )
        .unwrap()
    }
}

/// Temperatures are drawn so that canonical values are integral kelvin,
/// sometimes landing exactly on a rule threshold.
fn random_temperature(rng: &mut impl Rng) -> Value {
    let kelvin = rng.gen_range(295..306) as f64;
    let q = match rng.gen_range(0..3) {
        0 => format!("{kelvin} K"),
        1 => format!("{} degC", kelvin - 273.15),
        _ => format!("{} degF", (kelvin - 273.15) * 9.0 / 5.0 + 32.0),
    };
    Value::parse(&q).unwrap()
}

fn random_pressure(rng: &mut impl Rng) -> Value {
    let hpa = rng.gen_range(995..1010);
    let unit = if rng.gen_bool(0.5) { "hPa" } else { "mb" };
    Value::parse(&format!("{hpa} {unit}")).unwrap()
}

/// A random small scenario: at most 8 events, objects and situations (each
/// event and object with one or two regions) and at most 4 rules.
pub fn random_scenario(rng: &mut impl Rng) -> (KnowledgeGraph, RuleSet, EngineConfig) {
    let mut g = KnowledgeGraph::new();
    let n_events = rng.gen_range(2..=4);
    let n_objects = rng.gen_range(1..=2);
    let n_situations = rng.gen_range(0..=(8 - n_events - n_objects).min(3));
    let mut events = Vec::new();
    let mut objects = Vec::new();
    let mut situations = Vec::new();

    for i in 0..n_events {
        let e = id(&format!("ev:{i}"));
        g.add_entity(GeoEvent::new(e.clone(), *KINDS.choose(rng).unwrap()).unwrap())
            .unwrap();
        events.push(e);
    }
    for i in 0..n_objects {
        let o = id(&format!("obj:{i}"));
        g.add_entity(GeoObject::new(o.clone(), "Thing", []).unwrap())
            .unwrap();
        objects.push(o);
    }
    // objects endure; events tend to follow the situations below; now and
    // then an entity gets a second region
    let present: Vec<(EntityId, &str)> = events
        .iter()
        .chain(&objects)
        .flat_map(|x| {
            let extra = rng.gen_bool(0.15);
            [(x.clone(), ""), (x.clone(), ":b")]
                .into_iter()
                .take(1 + extra as usize)
        })
        .collect();
    for (x, suffix) in &present {
        let during = if x.as_str().starts_with("ev:") {
            span(rng, 8..44, 1..12)
        } else {
            span(rng, 0..10, 20..48)
        };
        let r = id(&format!("reg:{x}{suffix}"));
        g.add_entity(SpatioTemporalRegion::new(
            r.clone(),
            random_geometry(rng),
            during,
        ))
        .unwrap();
        g.assert(x, RelationKind::SpatioTemporallyPresent, &r)
            .unwrap();
    }
    for i in 0..n_situations {
        let s = id(&format!("sit:{i}"));
        let mut obs = Vec::new();
        if rng.gen_bool(0.9) {
            obs.push(Measurement::new("T", random_temperature(rng)).unwrap());
        }
        if rng.gen_bool(0.85) {
            obs.push(Measurement::new("P", random_pressure(rng)).unwrap());
        }
        if rng.gen_bool(0.5) {
            let flag = *["present", "absent", "Present"].choose(rng).unwrap();
            obs.push(Measurement::categorical("Flag", flag).unwrap());
        }
        g.add_entity(GeoSituation::new(s.clone(), span(rng, 0..16, 1..10), obs).unwrap())
            .unwrap();
        situations.push(s);
    }
    for s in &situations {
        for o in &objects {
            if rng.gen_bool(0.8) {
                g.assert(o, RelationKind::Setting, s).unwrap();
            }
        }
        for e in &events {
            if rng.gen_bool(0.1) {
                g.assert(e, RelationKind::Setting, s).unwrap();
            }
        }
    }
    for o in &objects {
        for e in &events {
            if rng.gen_bool(0.3) {
                g.assert(o, RelationKind::ParticipantIn, e).unwrap();
            }
        }
    }
    for a in &events {
        for b in &events {
            if a != b && rng.gen_bool(0.05) {
                g.assert(a, RelationKind::Causes, b).unwrap();
            }
        }
    }

    let mut text = String::new();
    for i in 0..rng.gen_range(0..=4) {
        if rng.gen_bool(0.5) {
            let mut conds = Vec::new();
            if rng.gen_bool(0.8) {
                let op = *[">", ">=", "<", "<=", "=", "!="].choose(rng).unwrap();
                conds.push(format!("T {op} {} K", rng.gen_range(297..304)));
            }
            if rng.gen_bool(0.5) {
                let op = *[">", "<="].choose(rng).unwrap();
                conds.push(format!("P {op} {} hPa", rng.gen_range(998..1008)));
            }
            if conds.is_empty() || rng.gen_bool(0.3) {
                conds.push(format!(
                    "Flag {}",
                    ["present", "absent"].choose(rng).unwrap()
                ));
            }
            text.push_str(&format!(
                "precondition PC{i} effects {} {{ {} }}\n",
                KINDS.choose(rng).unwrap(),
                conds.join("; ")
            ));
        } else {
            let cause = *KINDS.choose(rng).unwrap();
            let effect = *KINDS.choose(rng).unwrap();
            let when = match rng.gen_range(0..3) {
                0 if cause != effect => "co-occurs".to_string(),
                0 | 1 => "precedes".to_string(),
                _ => format!("precedes within {}h", rng.gen_range(0..10)),
            };
            text.push_str(&format!("rule R{i}: {cause} causes {effect} when {when}\n"));
        }
    }
    let rules = parse_rules(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let config = EngineConfig {
        max_gap: Duration::hours(rng.gen_range(0..40)),
        require_spatial_overlap: rng.gen_bool(0.7),
    };
    (g, rules, config)
}

// ---- oracle --------------------------------------------------------------

fn kelvin_or_canonical(v: &Value) -> Option<f64> {
    let Value::Quantity(q) = v else { return None };
    let m = q.magnitude();
    Some(match q.unit().symbol {
        "K" | "hPa" | "mb" => m,
        "degC" => m + 273.15,
        "degF" => (m - 32.0) * 5.0 / 9.0 + 273.15,
        other => panic!("oracle has no conversion for {other}"),
    })
}

/// `Some(true|false)` for a decided condition, `None` when unobserved.
fn oracle_condition(
    obs: Option<&Value>,
    op: Comparator,
    threshold: Option<&Value>,
) -> Option<bool> {
    let obs = obs?;
    Some(match op {
        Comparator::Present => {
            matches!(obs, Value::Categorical(t) if t.eq_ignore_ascii_case("present"))
        }
        Comparator::Absent => {
            matches!(obs, Value::Categorical(t) if t.eq_ignore_ascii_case("absent"))
        }
        _ => {
            let (x, y) = (
                kelvin_or_canonical(obs).unwrap(),
                kelvin_or_canonical(threshold.unwrap()).unwrap(),
            );
            let tol = 1e-9;
            match op {
                Comparator::Lt => x < y - tol,
                Comparator::Le => x <= y + tol,
                Comparator::Gt => x > y + tol,
                Comparator::Ge => x >= y - tol,
                Comparator::Eq => (x - y).abs() <= tol,
                Comparator::Ne => (x - y).abs() > tol,
                _ => unreachable!(),
            }
        }
    })
}

fn boxes_overlap(a: &Geometry, b: &Geometry) -> bool {
    let (a0, a1, a2, a3) = a.bounds();
    let (b0, b1, b2, b3) = b.bounds();
    a0 <= b2 && b0 <= a2 && a1 <= b3 && b1 <= a3
}

/// Allen's before-or-meets on closed intervals, written directly from the
/// endpoint conditions.
fn before_or_meets(a: &TimeInterval, b: &TimeInterval) -> bool {
    let (s1, e1, s2, e2) = (a.start(), a.end(), b.start(), b.end());
    e1 <= s2 && s1 < s2 && e1 < e2
}

/// Least fixpoint of the four derivation rules by naive enumeration of all
/// candidate tuples, repeated until nothing changes.
pub fn oracle_closure(
    g: &KnowledgeGraph,
    rules: &RuleSet,
    cfg: &EngineConfig,
) -> BTreeSet<TripleKey> {
    let mut facts: BTreeSet<TripleKey> = g.triple_keys().cloned().collect();
    let role: BTreeMap<EntityId, &str> = g
        .entities()
        .map(|e| {
            let r = match e {
                Entity::Event(_) => "event",
                Entity::Object(_) => "object",
                Entity::Situation(_) => "situation",
                Entity::Region(_) => "region",
                Entity::Precondition(_) => "precondition",
            };
            (e.id().clone(), r)
        })
        .collect();
    let regions = |x: &EntityId| -> Vec<&SpatioTemporalRegion> {
        g.regions()
            .filter(|r| {
                g.contains(&TripleKey::new(
                    x.clone(),
                    RelationKind::SpatioTemporallyPresent,
                    r.id.clone(),
                ))
            })
            .collect()
    };
    let events: Vec<&GeoEvent> = g.events().collect();
    let pc_id = |p: &str| id(p);

    loop {
        let mut new = BTreeSet::new();
        for s in g.situations() {
            for pc in rules.preconditions() {
                let all_true = pc.conditions().iter().all(|c| {
                    oracle_condition(s.observation(c.attribute()), c.comparator(), c.threshold())
                        == Some(true)
                });
                if all_true {
                    new.insert(TripleKey::new(
                        s.id().clone(),
                        RelationKind::Satisfies,
                        pc_id(pc.id().as_str()),
                    ));
                }
            }
        }
        for s in g.situations() {
            let setting: Vec<&EntityId> = facts
                .iter()
                .filter(|k| k.predicate == RelationKind::Setting && &k.object == s.id())
                .map(|k| &k.subject)
                .collect();
            if setting.iter().any(|x| role[*x] != "object") {
                continue;
            }
            for pc in rules.preconditions() {
                let sat = TripleKey::new(
                    s.id().clone(),
                    RelationKind::Satisfies,
                    pc_id(pc.id().as_str()),
                );
                if !facts.contains(&sat) {
                    continue;
                }
                for e in events.iter().filter(|e| e.kind() == pc.event_kind()) {
                    for re in regions(e.id()) {
                        let during = s.holds_during();
                        let gap = re.interval.start().unix() - during.end().unix();
                        if !before_or_meets(&during, &re.interval) || gap > cfg.max_gap.secs() {
                            continue;
                        }
                        let spatial = setting.iter().any(|x| {
                            regions(x)
                                .iter()
                                .any(|r| boxes_overlap(&r.geometry, &re.geometry))
                        });
                        if cfg.require_spatial_overlap && !spatial {
                            continue;
                        }
                        new.insert(TripleKey::new(
                            s.id().clone(),
                            RelationKind::Effects,
                            e.id().clone(),
                        ));
                    }
                }
            }
        }
        for rule in rules.cause_rules() {
            for a in events.iter().filter(|e| e.kind() == rule.cause_kind()) {
                for b in events.iter().filter(|e| e.kind() == rule.effect_kind()) {
                    if a.id() == b.id() {
                        continue;
                    }
                    for (ra, rb) in regions(a.id())
                        .into_iter()
                        .flat_map(|ra| regions(b.id()).into_iter().map(move |rb| (ra, rb)))
                    {
                        let overlap = boxes_overlap(&ra.geometry, &rb.geometry);
                        let spatial_ok = !cfg.require_spatial_overlap || overlap;
                        let holds = match rule.constraint() {
                            CauseConstraint::CoOccurs => {
                                overlap
                                    && !before_or_meets(&ra.interval, &rb.interval)
                                    && !before_or_meets(&rb.interval, &ra.interval)
                            }
                            CauseConstraint::Precedes => {
                                before_or_meets(&ra.interval, &rb.interval) && spatial_ok
                            }
                            CauseConstraint::PrecedesWithin(max) => {
                                before_or_meets(&ra.interval, &rb.interval)
                                    && rb.interval.start().unix() - ra.interval.end().unix()
                                        <= max.secs()
                                    && spatial_ok
                            }
                        };
                        if holds {
                            new.insert(TripleKey::new(
                                a.id().clone(),
                                RelationKind::Causes,
                                b.id().clone(),
                            ));
                        }
                    }
                }
            }
        }
        for st in facts
            .iter()
            .filter(|k| k.predicate == RelationKind::Setting && role[&k.subject] == "event")
        {
            for p in facts
                .iter()
                .filter(|k| k.predicate == RelationKind::ParticipantIn && k.object == st.subject)
            {
                new.insert(TripleKey::new(
                    st.object.clone(),
                    RelationKind::Affects,
                    p.subject.clone(),
                ));
            }
        }
        let before = facts.len();
        facts.extend(new);
        if facts.len() == before {
            return facts;
        }
    }
}

// ---- persistence stress graphs ------------------------------------------

fn random_value(rng: &mut impl Rng) -> Value {
    match rng.gen_range(0..5) {
        0 => Value::parse(&format!("{} m", rng.gen_range(-1e6..1e6))).unwrap(),
        1 => Value::parse(&format!(
            "{} degF",
            0.1 + 0.2 * rng.gen_range(0..100) as f64
        ))
        .unwrap(),
        2 => Value::parse(&format!("{:e} Pa", rng.gen_range(1e-300..1e300))).unwrap(),
        3 => Value::parse("-0 K").unwrap(),
        _ => Value::categorical(
            *["present", "absent", "overflowing", "CAT-5"]
                .choose(rng)
                .unwrap(),
        )
        .unwrap(),
    }
}

/// A schema-valid graph with up to `max_triples` triples, about a third of
/// them derived from earlier triples.
pub fn random_store_graph(rng: &mut impl Rng, max_triples: usize) -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new();
    let n = rng.gen_range(1..=150);
    let mut by_role: BTreeMap<&str, Vec<EntityId>> = BTreeMap::new();
    for i in 0..n {
        let attrs: Vec<Measurement> = (0..rng.gen_range(0..3))
            .map(|j| Measurement::new(format!("Attr{j}"), random_value(rng)).unwrap())
            .collect();
        let (role, entity): (&str, Entity) = match rng.gen_range(0..5) {
            0 => (
                "event",
                GeoEvent::new(id(&format!("ev:{i}")), *KINDS.choose(rng).unwrap())
                    .unwrap()
                    .into(),
            ),
            1 => (
                "object",
                GeoObject::new(id(&format!("obj:{i}")), "Dam", attrs)
                    .unwrap()
                    .into(),
            ),
            2 => (
                "situation",
                GeoSituation::new(id(&format!("sit:{i}")), random_interval(rng), attrs)
                    .unwrap()
                    .into(),
            ),
            3 => (
                "region",
                SpatioTemporalRegion::new(
                    id(&format!("reg:{i}")),
                    random_geometry(rng),
                    random_interval(rng),
                )
                .into(),
            ),
            _ => (
                "precondition",
                PreconditionRef::new(id(&format!("PC_{i}")), "Flood")
                    .unwrap()
                    .into(),
            ),
        };
        by_role.entry(role).or_default().push(entity.id().clone());
        g.add_entity(entity).unwrap();
    }
    let target = if rng.gen_bool(0.2) {
        max_triples
    } else {
        rng.gen_range(0..=max_triples)
    };
    let mut keys: Vec<TripleKey> = Vec::new();
    let mut attempts = 0;
    while keys.len() < target && attempts < target * 20 + 50 {
        attempts += 1;
        let p = *RelationKind::ALL.choose(rng).unwrap();
        let Some(&(sr, or)) = p.signature().choose(rng) else {
            continue;
        };
        let (Some(ss), Some(os)) = (by_role.get(sr.token()), by_role.get(or.token())) else {
            continue;
        };
        let key = TripleKey::new(
            ss.choose(rng).unwrap().clone(),
            p,
            os.choose(rng).unwrap().clone(),
        );
        if g.contains(&key) {
            continue;
        }
        if !keys.is_empty() && rng.gen_bool(0.35) {
            let premises: Vec<TripleKey> = (0..rng.gen_range(0..4))
                .map(|_| keys.choose(rng).unwrap().clone())
                .collect();
            let rule = format!("R-{}", rng.gen_range(0..5));
            g.insert_derived(key.clone(), rule, premises).unwrap();
        } else {
            g.assert_key(key.clone()).unwrap();
        }
        keys.push(key);
    }
    g
}
