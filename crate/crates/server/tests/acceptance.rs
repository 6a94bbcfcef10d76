//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every check compares against an oracle computed here.

mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use brickvrf::analytics::{fit_changepoint, fit_linear, AlignedSeries, BaselineModel};
use brickvrf::inference::{materialize, subclass_closure, InversePairTable, MaterializeOptions};
use brickvrf::ontology::{compile_ontology, default_ontology, validate_ontology, vrf_module_defs, ClassGraph};
use brickvrf::query::run_query;
use brickvrf::rdf::{
    default_namespaces, parse_turtle, parse_turtle_document, serialize_turtle, Graph, Term, Triple, BRICK, OWL, RDFS,
    XSD,
};
use brickvrf::timeseries::{Sample, SeriesStore};
use brickvrf::vrf::{
    application_meter, generate_application_model, generate_validation_model, system_mode_from_four_way,
    unit_mode_from_solenoids, FourWayValveState, ModelParams, SolenoidStates, SystemMode, UnitMode, APPLICATION_GRAPH,
    VALIDATION_QUERY,
};
use brickvrf_server::router;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn validation_query() -> Outcome {
    let started = Instant::now();
    let ontology = default_ontology();
    let model = generate_validation_model(&ModelParams::default());
    let m = materialize(&model, &ontology, MaterializeOptions::default()).map_err(|e| e.to_string())?;
    let table = run_query(VALIDATION_QUERY, &m.graph).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();
    let rows: BTreeSet<String> = table
        .rows
        .iter()
        .map(|r| r[0].as_iri().unwrap_or("").to_string())
        .collect();
    ensure(table.rows.len() == 50 && rows.len() == 50, || {
        format!("{} rows", table.rows.len())
    })?;
    for unit in ["Floor_1_Office_1_VRF_Indoor_2", "Floor_1_Office_2_VRF_Indoor_7"] {
        ensure(rows.contains(&format!("http://example.com/b66#{unit}")), || {
            format!("missing {unit}")
        })?;
    }
    ensure(elapsed < 1.0, || format!("took {elapsed:.3}s"))?;
    Ok(format!("50 distinct rows in {:.0} ms", elapsed * 1e3))
}

fn ontology_golden() -> Outcome {
    let g = default_ontology();
    let rdfs = |l: &str| Term::iri(format!("{RDFS}{l}"));
    let chiller = Term::brick("Chiller");
    let expected = [
        (Term::rdf_type(), Term::iri(format!("{OWL}Class"))),
        (rdfs("label"), Term::literal("Chiller")),
        (rdfs("subClassOf"), Term::brick("HVAC_Equipment")),
        (Term::brick("hasAssociatedTag"), Term::tag("Chiller")),
        (Term::brick("hasAssociatedTag"), Term::tag("Equipment")),
    ];
    for (p, o) in &expected {
        ensure(
            g.graph()
                .contains(&Triple::new(chiller.clone(), p.clone(), o.clone()).unwrap()),
            || format!("Chiller lacks {p} {o}"),
        )?;
    }
    let chiller_tags = g.graph().objects(&chiller, &Term::brick("hasAssociatedTag")).len();
    ensure(chiller_tags == 2, || format!("Chiller has {chiller_tags} tags"))?;

    let vrf: &[(&str, &[&str])] = &[
        ("Hydrofluorocarbon_System", &["Hydrofluorocarbon", "System"]),
        ("Four_way_Valve", &["Gas", "Valve", "Equipment"]),
        ("Hydrofluorocarbon_Gas", &["Fluid", "Gas", "Hydrofluorocarbon_Gas"]),
        ("R410A_Gas", &["Fluid", "Gas", "Hydrofluorocarbon_Gas", "R410A_Gas"]),
        ("Header", &["Gas", "Liquid", "Distribution", "Equipment"]),
        ("Separation_Tube", &["Gas", "Liquid", "Distribution", "Equipment"]),
        ("Hydrofluorocarbon", &["Fluid", "Liquid", "Hydrofluorocarbon"]),
        ("R410A", &["Fluid", "Liquid", "Hydrofluorocarbon", "R410A"]),
        (
            "VRF_Outdoor",
            &[
                "Equipment",
                "VRF_Outdoor",
                "Heat_Exchange",
                "Fan",
                "Compressor",
                "Check_Valve",
                "Four_way_Valve",
                "Cool",
                "Heat",
                "Hydrofluorocarbon",
                "Supply",
                "Return",
                "Point",
                "Pressure",
                "Setpoint",
                "Electronic_Expansion_Valve",
                "Sensor",
            ],
        ),
        (
            "VRF_Indoor",
            &[
                "Equipment",
                "VRF_Indoor",
                "Heat_Exchange",
                "Fan",
                "Cool",
                "Heat",
                "Hydrofluorocarbon",
                "Electromagnetic_Valve",
                "Volume",
                "Box",
                "Supply",
                "Return",
                "Setpoint",
                "Point",
                "Sensor",
                "Electronic_Expansion_Valve",
            ],
        ),
    ];
    let module = compile_ontology(&vrf_module_defs()).map_err(|e| e.to_string())?;
    for (class, tags) in vrf {
        let got: BTreeSet<Term> = module
            .graph()
            .objects(&Term::brick(class), &Term::brick("hasAssociatedTag"))
            .into_iter()
            .collect();
        let want: BTreeSet<Term> = tags.iter().map(|t| Term::tag(t)).collect();
        ensure(got == want, || format!("{class} tags differ"))?;
    }
    let violations = validate_ontology(&g);
    ensure(violations.is_empty(), || format!("{} violations", violations.len()))?;
    Ok(format!("Chiller axioms, {} VRF classes, 0 violations", vrf.len()))
}

mod oracle_query {
    use super::*;

    const NODES: usize = 6;
    const PREDS: usize = 3;
    const VARS: [&str; 4] = ["w", "x", "y", "z"];

    #[derive(Clone, Copy)]
    enum Slot {
        Var(usize),
        Node(usize),
        Pred(usize),
        Lit(usize),
    }

    fn node(i: usize) -> Term {
        Term::iri(format!("http://ex.org/n{i}"))
    }
    fn pred(i: usize) -> Term {
        Term::iri(format!("http://ex.org/p{i}"))
    }
    fn lit(i: usize) -> Term {
        Term::literal(format!("v{i}"))
    }

    impl Slot {
        fn text(self) -> String {
            match self {
                Slot::Var(v) => format!("?{}", VARS[v]),
                Slot::Node(i) => format!("ex:n{i}"),
                Slot::Pred(i) => format!("ex:p{i}"),
                Slot::Lit(i) => format!("\"v{i}\""),
            }
        }
        fn term(self, a: &[Term]) -> Term {
            match self {
                Slot::Var(v) => a[v].clone(),
                Slot::Node(i) => node(i),
                Slot::Pred(i) => pred(i),
                Slot::Lit(i) => lit(i),
            }
        }
    }

    fn slot(rng: &mut ChaCha8Rng, pos: usize) -> Slot {
        let r = rng.random_range(0..10);
        match pos {
            0 if r < 7 => Slot::Var(rng.random_range(0..4)),
            0 => Slot::Node(rng.random_range(0..NODES)),
            1 if r < 3 => Slot::Var(rng.random_range(0..4)),
            1 => Slot::Pred(rng.random_range(0..PREDS)),
            _ if r < 6 => Slot::Var(rng.random_range(0..4)),
            _ if r < 8 => Slot::Node(rng.random_range(0..NODES)),
            _ => Slot::Lit(rng.random_range(0..3)),
        }
    }

    /// One random case checked against brute force; `Ok(false)` when the
    /// drawn query has no variables and was skipped.
    pub fn case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
        let mut g = Graph::new();
        for _ in 0..rng.random_range(0..=60) {
            let o = if rng.random_bool(0.8) {
                node(rng.random_range(0..NODES))
            } else {
                lit(rng.random_range(0..3))
            };
            g.insert(Triple::new(node(rng.random_range(0..NODES)), pred(rng.random_range(0..PREDS)), o).unwrap());
        }
        let patterns: Vec<[Slot; 3]> = (0..rng.random_range(1..=4))
            .map(|_| [slot(rng, 0), slot(rng, 1), slot(rng, 2)])
            .collect();
        let values: Option<(usize, Vec<usize>)> = rng.random_bool(0.3).then(|| {
            (
                rng.random_range(0..4),
                (0..rng.random_range(1..4))
                    .map(|_| rng.random_range(0..NODES))
                    .collect(),
            )
        });
        let mut used: BTreeSet<usize> = patterns
            .iter()
            .flatten()
            .filter_map(|s| if let Slot::Var(v) = s { Some(*v) } else { None })
            .collect();
        if let Some((v, _)) = &values {
            used.insert(*v);
        }
        let used: Vec<usize> = used.into_iter().collect();
        if used.is_empty() {
            return Ok(false);
        }
        let mut projection: Vec<usize> = used.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        if projection.is_empty() {
            projection.push(used[0]);
        }
        let distinct = rng.random_bool(0.5);

        let mut q = format!(
            "PREFIX ex: <http://ex.org/>\nSELECT {}{} WHERE {{\n",
            if distinct { "DISTINCT " } else { "" },
            projection
                .iter()
                .map(|v| format!("?{}", VARS[*v]))
                .collect::<Vec<_>>()
                .join(" ")
        );
        if let Some((v, ns)) = &values {
            let terms: Vec<String> = ns.iter().map(|i| format!("ex:n{i}")).collect();
            q.push_str(&format!("VALUES ?{} {{ {} }}\n", VARS[*v], terms.join(" ")));
        }
        for [s, p, o] in &patterns {
            q.push_str(&format!("{} {} {} .\n", s.text(), p.text(), o.text()));
        }
        q.push('}');

        let mut domain: BTreeSet<Term> = BTreeSet::new();
        for t in g.iter() {
            domain.insert(t.subject);
            domain.insert(t.predicate);
            domain.insert(t.object);
        }
        if let Some((_, ns)) = &values {
            domain.extend(ns.iter().map(|&i| node(i)));
        }
        let domain: Vec<Term> = domain.into_iter().collect();
        let mut expected: Vec<Vec<Term>> = Vec::new();
        if !domain.is_empty() {
            let mut a = vec![Term::literal(""); VARS.len()];
            let mut counters = vec![0usize; used.len()];
            'enumerate: loop {
                for (k, &v) in used.iter().enumerate() {
                    a[v] = domain[counters[k]].clone();
                }
                let multiplicity = match &values {
                    Some((v, ns)) => ns.iter().filter(|&&i| a[*v] == node(i)).count(),
                    None => 1,
                };
                let holds = patterns
                    .iter()
                    .all(|[s, p, o]| Triple::new(s.term(&a), p.term(&a), o.term(&a)).is_ok_and(|t| g.contains(&t)));
                if holds {
                    for _ in 0..multiplicity {
                        expected.push(projection.iter().map(|&v| a[v].clone()).collect());
                    }
                }
                let mut k = 0;
                loop {
                    if k == counters.len() {
                        break 'enumerate;
                    }
                    counters[k] += 1;
                    if counters[k] < domain.len() {
                        break;
                    }
                    counters[k] = 0;
                    k += 1;
                }
            }
        }
        expected.sort_by(|x, y| {
            let kx: Vec<String> = x.iter().map(Term::sort_key).collect();
            let ky: Vec<String> = y.iter().map(Term::sort_key).collect();
            kx.cmp(&ky).then_with(|| x.cmp(y))
        });
        if distinct {
            expected.dedup();
        }
        let got = run_query(&q, &g).map_err(|e| format!("{e}\n{q}"))?.rows;
        ensure(got == expected, || {
            format!("mismatch ({} vs {} rows) on\n{q}", got.len(), expected.len())
        })?;
        Ok(true)
    }
}

fn query_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    while checked < 1000 {
        if oracle_query::case(&mut rng).map_err(|e| format!("case {checked}: {e}"))? {
            checked += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    ensure(elapsed < 60.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!("1000 cases match brute force in {elapsed:.2}s"))
}

fn class(i: usize) -> Term {
    Term::iri(format!("http://ex.org/C{i}"))
}

fn random_dag(rng: &mut ChaCha8Rng, n: usize) -> (ClassGraph, Vec<Vec<usize>>) {
    let mut g = Graph::new();
    let mut parents = vec![Vec::new(); n];
    for (i, ps) in parents.iter_mut().enumerate() {
        g.insert(Triple::new(class(i), Term::rdf_type(), Term::iri(format!("{OWL}Class"))).unwrap());
        if i == 0 {
            continue;
        }
        for _ in 0..rng.random_range(0..3) {
            let j = rng.random_range(0..i);
            ps.push(j);
            g.insert(Triple::new(class(i), Term::iri(format!("{RDFS}subClassOf")), class(j)).unwrap());
        }
    }
    (ClassGraph::from_graph(g), parents)
}

fn reachable(parents: &[Vec<usize>], from: usize) -> BTreeSet<Term> {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &p in &parents[x] {
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    seen.into_iter().map(class).collect()
}

fn inference() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let pairs = InversePairTable::default();
    for trial in 0..50 {
        let (ontology, parents) = random_dag(&mut rng, 50);
        let table = subclass_closure(&ontology).map_err(|e| e.to_string())?;
        for i in 0..50 {
            ensure(table.get(&class(i)) == Some(&reachable(&parents, i)), || {
                format!("dag {trial}: closure of C{i}")
            })?;
        }
        let mut model = Graph::new();
        let ent = |i: usize| Term::iri(format!("http://ex.org/e{i}"));
        let rels = ["feeds", "hasPart", "hasPoint", "isLocationOf"];
        for _ in 0..30 {
            model.insert(
                Triple::new(
                    ent(rng.random_range(0..15)),
                    Term::rdf_type(),
                    class(rng.random_range(0..50)),
                )
                .unwrap(),
            );
            let r = rels[rng.random_range(0..rels.len())];
            model.insert(
                Triple::new(
                    ent(rng.random_range(0..15)),
                    Term::brick(r),
                    ent(rng.random_range(0..15)),
                )
                .unwrap(),
            );
        }
        let mut fixpoint = model.triples();
        for t in model.matching(None, Some(&Term::rdf_type()), None) {
            let i: usize = t
                .object
                .sort_key()
                .trim_start_matches("http://ex.org/C")
                .parse()
                .unwrap();
            for a in reachable(&parents, i) {
                fixpoint.insert(Triple::new(t.subject.clone(), Term::rdf_type(), a).unwrap());
            }
        }
        for t in fixpoint.clone() {
            if let Some(q) = pairs.inverse(&t.predicate) {
                fixpoint.insert(Triple::new(t.object, q.clone(), t.subject).unwrap());
            }
        }
        let once = materialize(&model, &ontology, MaterializeOptions::default()).map_err(|e| e.to_string())?;
        ensure(once.graph.triples() == fixpoint, || {
            format!("dag {trial}: materialization differs from fixpoint")
        })?;
        let twice = materialize(&once.graph, &ontology, MaterializeOptions::default()).map_err(|e| e.to_string())?;
        ensure(twice.report.added == 0, || {
            format!("dag {trial}: second pass added {}", twice.report.added)
        })?;
    }

    let excerpt = include_str!("../../core/tests/fixtures/office_excerpt.ttl");
    let g = parse_turtle(excerpt, &default_namespaces()).map_err(|e| e.to_string())?;
    let m = materialize(&g, &default_ontology(), MaterializeOptions::default()).map_err(|e| e.to_string())?;
    let unit = Term::iri("http://example.com/b6#Office_1_VRF_Indoor_3");
    ensure(
        m.graph
            .contains(&Triple::new(Term::brick("Office_1_HVAC"), Term::brick("isFedBy"), unit.clone()).unwrap()),
        || "excerpt lacks isFedBy".into(),
    )?;
    let app = materialize(
        &generate_application_model(),
        &default_ontology(),
        MaterializeOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let zone = Term::iri("http://example.com/b6#Office_1_HVAC");
    ensure(
        app.graph
            .contains(&Triple::new(zone, Term::brick("isFedBy"), unit).unwrap()),
        || "application model lacks isFedBy".into(),
    )?;
    Ok("50 DAGs of 50 nodes match reachability, fixpoint and idempotence hold, isFedBy added".into())
}

fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    const CHARS: &[char] = &[
        'a', 'Z', '0', ' ', '"', '\\', '\n', '\t', '\r', '\'', '#', '<', '>', '.', ';', 'é', '漢',
    ];
    let b6 = "http://example.com/b6#";
    let mut ns = default_namespaces();
    ns.insert("b6".into(), b6.into());
    let mut g = Graph::new().with_namespaces(ns);
    let local = |rng: &mut ChaCha8Rng| -> String {
        let head = ['A', 'b', '_'][rng.random_range(0..3)];
        let tail: String = (0..rng.random_range(0..6))
            .map(|_| ['x', '1', '_', '-', '.'][rng.random_range(0..5)])
            .collect();
        format!("{head}{tail}z")
    };
    let iri = |rng: &mut ChaCha8Rng| -> Term {
        match rng.random_range(0..4) {
            0 => Term::iri(format!("{BRICK}{}", local(rng))),
            1 => Term::iri(format!("{b6}{}", local(rng))),
            2 => Term::iri(format!(
                "http://other.example/{}/{}",
                rng.random_range(0..9),
                rng.random_range(0..99)
            )),
            _ => Term::iri(format!("urn:item:{}", rng.random_range(0..999))),
        }
    };
    for _ in 0..rng.random_range(0..40) {
        let s = if rng.random_bool(0.2) {
            Term::blank(format!("b{}", rng.random_range(0..5)))
        } else {
            iri(rng)
        };
        let p = if rng.random_bool(0.2) {
            Term::rdf_type()
        } else {
            iri(rng)
        };
        let o = match rng.random_range(0..6) {
            0 => Term::blank(format!("b{}", rng.random_range(0..5))),
            1 | 2 => iri(rng),
            k => {
                let text: String = (0..rng.random_range(0..10))
                    .map(|_| CHARS[rng.random_range(0..CHARS.len())])
                    .collect();
                match k {
                    3 => Term::literal(text),
                    4 => Term::lang_literal(text, "en-GB"),
                    _ => Term::typed_literal(text, format!("{XSD}integer")),
                }
            }
        };
        g.insert(Triple::new(s, p, o).unwrap());
    }
    g
}

fn turtle_round_trip() -> Outcome {
    let excerpt = include_str!("../../core/tests/fixtures/office_excerpt.ttl");
    let doc = parse_turtle_document(excerpt, &default_namespaces()).map_err(|e| e.to_string())?;
    ensure(doc.graph.len() == 33, || {
        format!("excerpt parsed to {} triples", doc.graph.len())
    })?;
    let back = parse_turtle(&serialize_turtle(&doc.graph), &default_namespaces()).map_err(|e| e.to_string())?;
    ensure(back.triples() == doc.graph.triples(), || {
        "excerpt round trip differs".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let g = random_graph(&mut rng);
        let text = serialize_turtle(&g);
        let back = parse_turtle(&text, &default_namespaces()).map_err(|e| format!("graph {i}: {e}\n{text}"))?;
        ensure(back.triples() == g.triples(), || format!("graph {i} differs\n{text}"))?;
    }
    Ok("excerpt (33 triples) and 1000 random graphs round-trip".into())
}

fn timeseries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let ids = ["urn:a", "urn:b", "urn:c"];
    let mut rows: Vec<Sample> = (0..10_000)
        .map(|_| {
            Sample::new(
                ids[rng.random_range(0..3)],
                rng.random_range(0..5_000),
                rng.random_range(-1e3..1e3),
            )
        })
        .collect();
    rows.shuffle(&mut rng);
    let mut store = SeriesStore::new();
    let report = store.ingest(rows.clone());
    ensure(report.accepted == 10_000, || format!("accepted {}", report.accepted))?;
    let mut oracle: BTreeMap<&str, BTreeMap<i64, f64>> = BTreeMap::new();
    for s in &rows {
        oracle
            .entry(ids.iter().find(|i| **i == s.stream_id).unwrap())
            .or_default()
            .insert(s.timestamp, s.value);
    }
    for q in 0..100 {
        let (a, b) = (rng.random_range(0..5_000), rng.random_range(0..5_000));
        let (t0, t1) = (a.min(b), a.max(b));
        let id = ids[rng.random_range(0..3)];
        let mut want: Vec<(i64, f64)> = oracle[id]
            .iter()
            .filter(|(&t, _)| t0 <= t && t <= t1)
            .map(|(&t, &v)| (t, v))
            .collect();
        want.sort_by_key(|p| p.0);
        let got: Vec<(i64, f64)> = store
            .stream_range(id, t0, t1)
            .into_iter()
            .map(|s| (s.timestamp, s.value))
            .collect();
        ensure(got == want, || format!("range query {q} on {id} [{t0}, {t1}] differs"))?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("series.ndjson");
    store.persist(&path).map_err(|e| e.to_string())?;
    let loaded = SeriesStore::load(&path).map_err(|e| e.to_string())?;
    ensure(loaded == store, || "persisted store differs".into())?;
    Ok(format!(
        "10000 shuffled rows, 100 range queries, {} samples persisted",
        store.sample_count()
    ))
}

fn vrf_modes() -> Outcome {
    let four_way = [
        (FourWayValveState::AdBc, SystemMode::Cooling),
        (FourWayValveState::AbCd, SystemMode::Heating),
    ];
    for (state, mode) in four_way {
        ensure(system_mode_from_four_way(state) == mode, || format!("{state:?}"))?;
    }
    let solenoids = [
        ((false, false, false), UnitMode::Off),
        ((false, false, true), UnitMode::Invalid),
        ((false, true, false), UnitMode::Invalid),
        ((false, true, true), UnitMode::Invalid),
        ((true, false, false), UnitMode::Invalid),
        ((true, false, true), UnitMode::Condenser),
        ((true, true, false), UnitMode::Evaporator),
        ((true, true, true), UnitMode::Invalid),
    ];
    for ((l, s, h), mode) in solenoids {
        ensure(unit_mode_from_solenoids(SolenoidStates::new(l, s, h)) == mode, || {
            format!("solenoids {l} {s} {h}")
        })?;
    }
    Ok("2 four-way states and 8 solenoid combinations".into())
}

fn linear_of(fit: &brickvrf::BaselineFit) -> (f64, f64, f64, f64) {
    match fit.model {
        BaselineModel::Linear {
            intercept,
            slope,
            intercept_se,
            slope_se,
        } => (
            intercept,
            slope,
            intercept_se.unwrap_or(f64::NAN),
            slope_se.unwrap_or(f64::NAN),
        ),
        _ => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    }
}

fn analytics() -> Outcome {
    let exact = AlignedSeries::from_pairs((0..50).map(|i| (i as f64 * 0.6, 2.0 + 0.5 * i as f64 * 0.6)).collect());
    let (a, b, _, _) = linear_of(&fit_linear(&exact).map_err(|e| e.to_string())?);
    ensure((a - 2.0).abs() < 1e-9 && (b - 0.5).abs() < 1e-9, || {
        format!("linear recovered ({a}, {b})")
    })?;

    let hinge = AlignedSeries::from_pairs(
        (0..80)
            .map(|i| {
                let t = 8.0 + i as f64 * 0.25;
                (t, 3.0 + 0.8 * (t - 18.0).max(0.0))
            })
            .collect(),
    );
    let cp = fit_changepoint(&hinge, 0.5).map_err(|e| e.to_string())?;
    match cp.model {
        BaselineModel::Changepoint {
            base_load,
            breakpoint_temp,
            cooling_slope,
        } => ensure(
            breakpoint_temp == 18.0
                && (base_load - 3.0).abs() < 1e-9
                && (cooling_slope - 0.8).abs() < 1e-9
                && cp.sse < 1e-9,
            || {
                format!(
                    "changepoint recovered ({base_load}, {breakpoint_temp}, {cooling_slope}), sse {}",
                    cp.sse
                )
            },
        )?,
        _ => return Err("changepoint fit returned a linear model".into()),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut covered = 0;
    for _ in 0..200 {
        let (a0, b0) = (rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0));
        let pairs = (0..500)
            .map(|_| {
                let t: f64 = rng.random_range(5.0..35.0);
                (t, a0 + b0 * t + noise.sample(&mut rng))
            })
            .collect();
        let (a, b, sa, sb) = linear_of(&fit_linear(&AlignedSeries::from_pairs(pairs)).map_err(|e| e.to_string())?);
        if (a - a0).abs() <= 3.0 * sa && (b - b0).abs() <= 3.0 * sb {
            covered += 1;
        }
    }
    ensure(covered >= 190, || format!("{covered}/200 trials within 3 SE"))?;
    Ok(format!(
        "exact linear and change-point recovery, {covered}/200 noisy trials within 3 SE"
    ))
}

fn end_to_end() -> Outcome {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let started = Instant::now();
        let app = router(common::service(None));
        let up = common::send(&app, "POST", &common::upload_uri(), common::application_turtle()).await;
        ensure(up.status == 200, || format!("upload: {} {}", up.status, up.body))?;
        let ingest = common::send(&app, "POST", "/data", common::fixture_csv(5)).await;
        ensure(ingest.status == 200, || {
            format!("ingest: {} {}", ingest.status, ingest.body)
        })?;
        let r = common::send(&app, "POST", "/analysis/baseline", common::baseline_body("changepoint")).await;
        let elapsed = started.elapsed().as_secs_f64();
        ensure(r.status == 200, || format!("baseline: {} {}", r.status, r.body))?;
        let v = r.json();
        let zones = v["zones"].as_object().ok_or("no zones")?;
        ensure(zones.len() == 2, || format!("{} zones", zones.len()))?;
        for n in 1..=2 {
            let z = &zones[&format!("{APPLICATION_GRAPH}Office_{n}_HVAC")];
            ensure(z["fit"].is_object(), || format!("Office_{n} has no fit: {z}"))?;
            ensure(z["meters"] == serde_json::json!([application_meter(n)]), || {
                format!("Office_{n} meters {}", z["meters"])
            })?;
        }
        ensure(elapsed < 2.0, || format!("took {elapsed:.3}s"))?;
        Ok(format!("2 zone fits with their meters in {:.0} ms", elapsed * 1e3))
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("validation query returns 50 indoor units", validation_query),
        ("ontology golden", ontology_golden),
        ("query engine matches brute-force oracle", query_oracle),
        ("inference closure and materialization", inference),
        ("turtle round-trip", turtle_round_trip),
        ("timeseries ingest, range and persistence", timeseries),
        ("VRF mode truth tables", vrf_modes),
        ("analytics recovery", analytics),
        ("end-to-end application baseline", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
