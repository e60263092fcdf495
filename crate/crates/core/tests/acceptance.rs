//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration as StdDuration, Instant};

use common::{fixture, fixture_path, id, oracle_closure, random_scenario, random_store_graph};
use geocausal::engine::{infer, EngineConfig};
use geocausal::ingest::{ingest_storm_csv, Strictness};
use geocausal::model::{GeoSituation, Measurement, Quantity, TimeInterval, Unit, UNITS};
use geocausal::query::{graph_to_json, query};
use geocausal::rules::{evaluate, parse_rules, ConditionStatus, Truth};
use geocausal::spatiotemporal::{interval_relation, precedes, IntervalRelation};
use geocausal::store::StoreError;
use geocausal::{KnowledgeGraph, RelationKind, TripleKey};
use rand::rngs::StdRng;
use rand::SeedableRng;

type Check = fn() -> Result<String, String>;

// negated so that a NaN comparison fails the check
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: StdDuration, start: Instant) -> Result<StdDuration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

fn cli(workspace: &std::path::Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_geocausal"))
        .arg("--workspace")
        .arg(workspace)
        .args(args)
        .output()
        .expect("run geocausal");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn katrina_structure() -> Result<String, String> {
    let csv = fixture("katrina.csv");
    let start = Instant::now();
    let mut g = KnowledgeGraph::new();
    let report =
        ingest_storm_csv(&mut g, csv.as_bytes(), Strictness::Strict).map_err(|e| e.to_string())?;
    let took = within(StdDuration::from_secs(1), start)?;

    ensure!(
        report.rows_read == 23 && report.entities_created == 23,
        "report {report:?}"
    );
    let parents: Vec<_> = g.events().filter(|e| e.kind() == "Episode").collect();
    ensure!(parents.len() == 1, "{} parent events", parents.len());
    let part_of = g.find(&geocausal::Pattern::any().predicate(RelationKind::PartOf));
    ensure!(part_of.len() == 23, "{} part-of edges", part_of.len());
    let event_regions = g
        .regions()
        .filter(|r| r.id.as_str().starts_with("reg:event-"))
        .count();
    ensure!(event_regions == 23, "{event_regions} event regions");
    for kind in ["HeavyRain", "FlashFlood", "DebrisFlow", "TropicalStorm"] {
        ensure!(g.events().any(|e| e.kind() == kind), "no {kind} event");
    }
    let hits = query(&g, "? part-of ev:episode-1").map_err(|e| e.to_string())?;
    ensure!(hits.len() == 23, "query returned {}", hits.len());

    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("ws.kg");
    let (code, _, err) = cli(
        &ws,
        &[
            "ingest",
            "storm",
            fixture_path("katrina.csv").to_str().unwrap(),
        ],
    );
    ensure!(code == 0, "cli ingest exit {code}: {err}");
    let (code, out, err) = cli(&ws, &["query", "? part-of ev:episode-1"]);
    ensure!(code == 0, "cli query exit {code}: {err}");
    ensure!(
        out.lines().count() == 23,
        "cli query printed {} lines",
        out.lines().count()
    );
    Ok(format!(
        "1 parent, 23 part-of, 23 event regions (+1 episode envelope), query 23 hits; ingest {took:?}"
    ))
}

fn situation(sst: &str, wind_shear: Option<&str>) -> GeoSituation {
    let mut obs = vec![
        Measurement::new("SeaSurfaceTemp", sst.parse::<Quantity>().unwrap()).unwrap(),
        Measurement::quantity("AtmosphericPressure", 1005.0, "hPa").unwrap(),
        Measurement::categorical("CoriolisForce", "present").unwrap(),
    ];
    if let Some(ws) = wind_shear {
        obs.push(Measurement::new("WindShear", ws.parse::<Quantity>().unwrap()).unwrap());
    }
    let during = TimeInterval::parse("2005-08-24T00:00:00Z", "2005-08-25T00:00:00Z").unwrap();
    GeoSituation::new(id("sit:gulf"), during, obs).unwrap()
}

fn tropical_cyclone_precondition() -> Result<String, String> {
    let rules = parse_rules(&fixture("pc_tc.gcr")).map_err(|e| e.to_string())?;
    let pc = rules.precondition("PC_TC").ok_or("PC_TC missing")?;
    ensure!(
        pc.conditions().len() == 4,
        "{} conditions",
        pc.conditions().len()
    );

    let cases = [
        ("83 degF", Some("12 m/s"), Truth::True),
        ("80 degF", Some("12 m/s"), Truth::False),
        ("83 degF", None, Truth::Unknown),
        ("28.33 degC", Some("12 m/s"), Truth::True),
        ("27 degC", Some("12 m/s"), Truth::False),
        ("83 degF", Some("23.326 mph"), Truth::True),
    ];
    for (sst, shear, want) in cases {
        let got = evaluate(pc, &situation(sst, shear)).satisfied;
        ensure!(
            got == want,
            "SST {sst}, shear {shear:?}: got {got}, want {want}"
        );
    }
    let missing = evaluate(pc, &situation("83 degF", None));
    let unknown: Vec<_> = missing
        .per_condition
        .iter()
        .filter(|c| c.status == ConditionStatus::Unknown)
        .map(|c| c.condition.attribute().to_string())
        .collect();
    ensure!(unknown == ["WindShear"], "unknown conditions {unknown:?}");

    // the same three situations with SST restated in every temperature unit
    for (sst_f, shear) in [(83.0, Some("12 m/s")), (80.0, Some("12 m/s")), (83.0, None)] {
        let base = evaluate(pc, &situation(&format!("{sst_f} degF"), shear)).satisfied;
        for unit in ["degC", "K"] {
            let q = Quantity::of(sst_f, "degF")
                .unwrap()
                .convert(Unit::lookup(unit).unwrap())
                .unwrap();
            let got = evaluate(pc, &situation(&q.to_string(), shear)).satisfied;
            ensure!(got == base, "{q} gave {got}, {sst_f} degF gave {base}");
        }
    }
    Ok("true / false / unknown as expected; 28.33 degC and converted inputs agree".into())
}

fn flood_dichotomy() -> Result<String, String> {
    let run = |kg: &str, gcr: &str| -> Result<KnowledgeGraph, String> {
        let mut g = KnowledgeGraph::from_text(&fixture(kg)).map_err(|e| e.to_string())?;
        let rules = parse_rules(&fixture(gcr)).map_err(|e| e.to_string())?;
        infer(&mut g, &rules, &EngineConfig::default()).map_err(|e| e.to_string())?;
        Ok(g)
    };
    let a = run("flood_a.kg", "flood_a.gcr")?;
    ensure!(
        a.contains(&TripleKey::new(
            id("ev:heavyrain"),
            RelationKind::Causes,
            id("ev:flashflood")
        )),
        "fixture A: causes(heavyrain, flashflood) missing"
    );
    let mut b = run("flood_b.kg", "flood_b.gcr")?;
    ensure!(
        b.contains(&TripleKey::new(
            id("sit:dam-overflow"),
            RelationKind::Satisfies,
            id("PC_FLOOD")
        )),
        "fixture B: satisfies missing"
    );
    ensure!(
        b.contains(&TripleKey::new(
            id("sit:dam-overflow"),
            RelationKind::Effects,
            id("ev:flood")
        )),
        "fixture B: effects missing"
    );
    let from_dam: Vec<_> = b
        .triples()
        .filter(|t| t.subject == id("obj:dam") && t.predicate.is_causal())
        .collect();
    ensure!(from_dam.is_empty(), "dam is causal subject of {from_dam:?}");
    match b.assert(&id("obj:dam"), RelationKind::Causes, &id("ev:flood")) {
        Err(StoreError::SchemaViolation { .. }) => {}
        other => return Err(format!("manual causes(dam, flood) gave {other:?}")),
    }
    Ok("A derives causes; B derives satisfies + effects; causes(dam, flood) rejected".into())
}

fn fixpoint_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut derived_total = 0;
    for seed in 0..200u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let (g, rules, cfg) = random_scenario(&mut rng);
        let expected = oracle_closure(&g, &rules, &cfg);
        let mut first = g.clone();
        let result = infer(&mut first, &rules, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let got: BTreeSet<TripleKey> = first.triple_keys().cloned().collect();
        // precondition nodes registered by the engine are not triples
        if got != expected {
            let missing: Vec<_> = expected.difference(&got).map(|k| k.to_string()).collect();
            let extra: Vec<_> = got.difference(&expected).map(|k| k.to_string()).collect();
            return Err(format!("seed {seed}: missing {missing:?}, extra {extra:?}"));
        }
        ensure!(
            result.iterations <= 1 + result.derived.len(),
            "seed {seed}: {} iterations",
            result.iterations
        );
        derived_total += result.derived.len();
        let mut second = g.clone();
        infer(&mut second, &rules, &cfg).map_err(|e| e.to_string())?;
        ensure!(
            graph_to_json(&first) == graph_to_json(&second),
            "seed {seed}: JSON exports differ"
        );
        ensure!(
            first.to_text() == second.to_text(),
            "seed {seed}: text exports differ"
        );
    }
    let took = within(StdDuration::from_secs(30), start)?;
    Ok(format!("200 graphs match the oracle ({derived_total} derived triples); exports identical; {took:?}"))
}

/// Thirteen relations as independent endpoint predicates on closed
/// intervals `[s1, e1]`, `[s2, e2]` with `s <= e`.
fn allen_predicates(s1: i32, e1: i32, s2: i32, e2: i32) -> [(IntervalRelation, bool); 13] {
    use IntervalRelation::*;
    [
        (Before, e1 < s2),
        (Meets, e1 == s2 && s1 < s2 && e1 < e2),
        (Overlaps, s1 < s2 && s2 < e1 && e1 < e2),
        (Starts, s1 == s2 && e1 < e2),
        (During, s2 < s1 && e1 < e2),
        (Finishes, s2 < s1 && e1 == e2),
        (Equals, s1 == s2 && e1 == e2),
        (FinishedBy, s1 < s2 && e1 == e2),
        (Contains, s1 < s2 && e2 < e1),
        (StartedBy, s1 == s2 && e2 < e1),
        (OverlappedBy, s2 < s1 && s1 < e2 && e2 < e1),
        (MetBy, s1 == e2 && s2 < s1 && e2 < e1),
        (After, e2 < s1),
    ]
}

fn allen_algebra() -> Result<String, String> {
    let start = Instant::now();
    let t = |h: i32| geocausal::model::Timestamp::from_unix(i64::from(h) * 3600);
    let mut spans = Vec::new();
    for s in 0..=6 {
        for e in s..=6 {
            spans.push((s, e, TimeInterval::new(t(s), t(e)).unwrap()));
        }
    }
    let mut pairs = 0;
    for (s1, e1, a) in &spans {
        for (s2, e2, b) in &spans {
            pairs += 1;
            let holding: Vec<_> = allen_predicates(*s1, *e1, *s2, *e2)
                .into_iter()
                .filter(|(_, h)| *h)
                .map(|(r, _)| r)
                .collect();
            ensure!(
                holding.len() == 1,
                "[{s1},{e1}] vs [{s2},{e2}]: {holding:?} hold"
            );
            let r = interval_relation(a, b);
            ensure!(
                r == holding[0],
                "[{s1},{e1}] vs [{s2},{e2}]: computed {r:?}, predicates say {:?}",
                holding[0]
            );
            ensure!(
                interval_relation(b, a) == r.inverse(),
                "inverse fails for [{s1},{e1}] vs [{s2},{e2}]"
            );
        }
    }
    let mut triples = 0;
    for (_, _, a) in &spans {
        for (_, _, b) in &spans {
            if !precedes(a, b) {
                continue;
            }
            for (_, _, c) in &spans {
                triples += 1;
                ensure!(
                    !precedes(b, c) || precedes(a, c),
                    "precedes not transitive on {a} {b} {c}"
                );
            }
        }
    }
    let took = within(StdDuration::from_secs(1), start)?;
    Ok(format!(
        "{} intervals, {pairs} pairs unique + inverse, {triples} chains transitive; {took:?}",
        spans.len()
    ))
}

fn persistence_roundtrip() -> Result<String, String> {
    let start = Instant::now();
    let mut largest = 0;
    let mut derived = 0;
    for seed in 0..100u64 {
        let mut rng = StdRng::seed_from_u64(1_000 + seed);
        let g = random_store_graph(&mut rng, 1000);
        largest = largest.max(g.triple_count());
        derived += g.triples().filter(|t| t.provenance.is_derived()).count();
        let mut buf = Vec::new();
        g.save(&mut buf).map_err(|e| e.to_string())?;
        let back = KnowledgeGraph::load(buf.as_slice()).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(back == g, "seed {seed}: reloaded graph differs");
        let mut again = Vec::new();
        back.save(&mut again).map_err(|e| e.to_string())?;
        ensure!(again == buf, "seed {seed}: re-export not byte-identical");
    }
    let took = within(StdDuration::from_secs(10), start)?;
    Ok(format!("100 graphs (max {largest} triples, {derived} derived) round-trip byte-identically; {took:?}"))
}

fn why_query() -> Result<String, String> {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("ws.kg");
    std::fs::write(&ws, fixture("chain.kg")).unwrap();
    let (code, _, err) = cli(
        &ws,
        &[
            "infer",
            "--rules",
            fixture_path("chain.gcr").to_str().unwrap(),
        ],
    );
    ensure!(code == 0, "infer exit {code}: {err}");
    let (code, deep, err) = cli(&ws, &["why", "ev:flashflood", "--depth", "3"]);
    ensure!(code == 0, "why exit {code}: {err}");
    let edges: Vec<&str> = deep
        .lines()
        .filter(|l| l.trim_start().starts_with("<- "))
        .collect();
    ensure!(edges.len() == 3, "{} edges:\n{deep}", edges.len());
    ensure!(
        deep.contains("evidence PC_DAM: WaterLevel > 10 m (observed 12 m) -> true"),
        "no WaterLevel evidence:\n{deep}"
    );

    let g = KnowledgeGraph::from_text(&std::fs::read_to_string(&ws).unwrap())
        .map_err(|e| e.to_string())?;
    let ex3 =
        geocausal::query::why(&g, &id("ev:flashflood"), 3, None).map_err(|e| e.to_string())?;
    let ex1 =
        geocausal::query::why(&g, &id("ev:flashflood"), 1, None).map_err(|e| e.to_string())?;
    ensure!(
        ex3.edges.len() == 3 && !ex3.truncated,
        "library depth 3: {} edges",
        ex3.edges.len()
    );
    ensure!(
        ex1.edge_keys().is_subset(&ex3.edge_keys()),
        "depth-1 edges not within depth-3"
    );
    for e in &ex3.edges {
        ensure!(
            g.contains(&e.triple.key()),
            "edge {} not in graph",
            e.triple
        );
    }

    let (code, shallow, _) = cli(&ws, &["why", "ev:flashflood", "--depth", "1"]);
    ensure!(code == 0, "why --depth 1 exit {code}");
    let deep_lines: BTreeSet<&str> = deep.lines().filter(|l| !l.starts_with('#')).collect();
    for line in shallow.lines().filter(|l| !l.starts_with('#')) {
        ensure!(
            deep_lines.contains(line),
            "depth-1 line {line:?} missing at depth 3"
        );
    }
    Ok(format!(
        "3 causal edges, WaterLevel evidence, depth-1 ({} edges) within depth-3",
        ex1.edges.len()
    ))
}

fn unit_layer() -> Result<String, String> {
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    for u in UNITS {
        for v in UNITS.iter().filter(|v| v.dimension == u.dimension) {
            for m in [-1234.5, -40.0, 0.0, 1e-3, 1.0, 82.0, 1013.25, 98765.4321] {
                let q = Quantity::new(m, u).unwrap();
                let back = q
                    .convert(v)
                    .and_then(|r| r.convert(u))
                    .map_err(|e| e.to_string())?;
                let err = (back.magnitude() - m).abs() / m.abs().max(1.0);
                worst = worst.max(err);
                ensure!(
                    err < 1e-9,
                    "{m} {} via {} returned {}",
                    u.symbol,
                    v.symbol,
                    back.magnitude()
                );
            }
            pairs += 1;
        }
    }
    let k = Quantity::of(82.0, "degF")
        .unwrap()
        .convert(Unit::lookup("K").unwrap())
        .unwrap()
        .magnitude();
    let formula = (82.0 - 32.0) * 5.0 / 9.0 + 273.15;
    ensure!(
        (k - formula).abs() < 1e-9,
        "82 degF = {k} K, formula gives {formula}"
    );
    ensure!(
        (k - 300.9278).abs() < 5e-5,
        "82 degF = {k} K, expected 300.9278"
    );
    let f = Quantity::of(300.9278, "K")
        .unwrap()
        .convert(Unit::lookup("degF").unwrap())
        .unwrap()
        .magnitude();
    ensure!((f - 82.0).abs() < 1e-4, "300.9278 K = {f} degF");
    Ok(format!(
        "{pairs} unit pairs, worst relative round-trip error {worst:.1e}; 82 degF = {k:.4} K"
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 8] = [
        ("Katrina structure", katrina_structure),
        (
            "tropical-cyclone precondition",
            tropical_cyclone_precondition,
        ),
        ("flood dichotomy", flood_dichotomy),
        ("fixpoint oracle equivalence", fixpoint_oracle),
        ("Allen algebra", allen_algebra),
        ("persistence round-trip", persistence_roundtrip),
        ("why-query", why_query),
        ("unit layer", unit_layer),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
