//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use xpg::dlc::{compile_dl, parse_dl, DecisionList};
use xpg::enumerate::{check_duality, enumerate_tree_cxps, enumerate_xps, membership, union_of, MembershipKind};
use xpg::explain::{find_axp, DeletionOrder};
use xpg::features::FeatureSet;
use xpg::fixtures;
use xpg::model::{Atom, DecisionGraph, FeatureValue, Instance, NodeId};
use xpg::synth::{random_dag, random_dl, random_instance, random_svector, random_tree, ModelSpec};
use xpg::verify::{BruteForce, Caps};
use xpg::xpg::{SVector, Xpg};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn running_examples() -> Outcome {
    let limit = Duration::from_millis(10);
    let mut times = Vec::new();

    let (r, t) = timed(|| {
        let dt = fixtures::hardware_tree();
        let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
        dt.classify_label(&v).unwrap().clone()
    });
    ensure(r == Atom::from("T"), || format!("hardware class {r}"))?;
    times.push(t);

    let (r, t) = timed(|| {
        let dt = fixtures::hardware_tree();
        let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
        let x = Xpg::build(&dt, &v).unwrap();
        find_axp(&x, &FeatureSet::full(4), &DeletionOrder::Ascending).unwrap().features
    });
    ensure(r == FeatureSet::from([0, 3]), || format!("hardware AXp {r:?}"))?;
    times.push(t);

    let (r, t) = timed(|| {
        let dt = fixtures::hardware_tree();
        let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
        membership(&Xpg::build(&dt, &v).unwrap(), 3, MembershipKind::Either)
    });
    ensure(r, || "feature 4 should be a member".into())?;
    times.push(t);

    let (r, t) = timed(|| {
        let mdd = fixtures::rgb_omdd();
        let v = Instance::parse(&mdd, &["0", "1", "2"]).unwrap();
        mdd.classify_label(&v).unwrap().clone()
    });
    ensure(r == Atom::from("R"), || format!("rgb class {r}"))?;
    times.push(t);

    let (r, t) = timed(|| {
        let mdd = fixtures::rgb_omdd();
        let v = Instance::parse(&mdd, &["0", "1", "2"]).unwrap();
        let x = Xpg::build(&mdd, &v).unwrap();
        find_axp(&x, &FeatureSet::full(3), &DeletionOrder::Ascending).unwrap().features
    });
    ensure(r == FeatureSet::from([0]), || format!("rgb AXp {r:?}"))?;
    times.push(t);

    let (r, t) = timed(|| {
        let mdd = fixtures::rgb_omdd();
        let v = Instance::parse(&mdd, &["0", "1", "2"]).unwrap();
        membership(&Xpg::build(&mdd, &v).unwrap(), 1, MembershipKind::Either)
    });
    ensure(!r, || "feature 2 should not be a member".into())?;
    times.push(t);

    let worst = times.iter().max().copied().unwrap_or_default();
    ensure(worst < limit, || format!("slowest check took {:.3} ms", ms(worst)))?;
    Ok(format!("6 checks exact, slowest {:.3} ms", ms(worst)))
}

/// The activation equations of the hardware explanation graph, written out
/// node by node.
fn listed_activations(s: &[bool]) -> Vec<(i64, bool)> {
    let [s1, s2, s3, s4] = [s[0], s[1], s[2], s[3]];
    let e1 = true;
    let e2 = e1 && !s3;
    let e3 = e1;
    let e5 = e2 && !s1;
    let e6 = e3 && !s4;
    let e7 = e3;
    let e8 = e5 && !s2;
    let e9 = e5;
    let e11 = e7 && !s1;
    let e12 = e8 && !s1;
    let e13 = e8 && !s1;
    let e15 = e11;
    vec![
        (1, e1),
        (2, e2),
        (3, e3),
        (5, e5),
        (6, e6),
        (7, e7),
        (8, e8),
        (9, e9),
        (11, e11),
        (12, e12),
        (13, e13),
        (15, e15),
    ]
}

fn evaluation_semantics() -> Outcome {
    let dt = fixtures::hardware_tree();
    let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
    let x = Xpg::build(&dt, &v).unwrap();
    let sv = |b: [u8; 4]| SVector(b.iter().map(|&k| k == 1).collect());
    ensure(x.evaluate(&sv([1, 1, 1, 1])), || "sigma(1,1,1,1) != 1".into())?;
    ensure(!x.evaluate(&sv([0, 0, 0, 0])), || "sigma(0,0,0,0) != 0".into())?;
    ensure(x.evaluate(&sv([1, 0, 0, 1])), || "sigma(1,0,0,1) != 1".into())?;

    let mut rng = StdRng::seed_from_u64(0xE4);
    let mut checked = 0;
    for _ in 0..10 {
        let s = random_svector(&mut rng, 4);
        let act = x.activation(&s);
        let listed = listed_activations(&s.0);
        for &(id, want) in &listed {
            let p = x.node_index(&NodeId::Int(id)).ok_or(format!("node {id} missing"))?;
            ensure(act[p] == want, || format!("eps({id}) under {:?}: got {}, want {want}", s.0, act[p]))?;
            checked += 1;
        }
        let sigma = [6, 9, 12, 13, 15]
            .iter()
            .all(|id| !listed.iter().find(|(k, _)| k == id).unwrap().1);
        ensure(x.evaluate(&s) == sigma, || format!("sigma under {:?}", s.0))?;
    }
    Ok(format!("3 sigma values and {checked} activations exact"))
}

struct Case {
    dg: DecisionGraph,
    v: Instance,
    x: Xpg,
}

fn oracle_cases() -> Vec<Case> {
    let mut rng = StdRng::seed_from_u64(0xC3);
    (0..240)
        .map(|k| {
            let spec = ModelSpec {
                features: rng.gen_range(1..=8),
                max_domain: 4,
                max_nodes: rng.gen_range(3..=60),
                classes: rng.gen_range(2..=3),
            };
            let dg = if k % 2 == 0 { random_tree(&mut rng, &spec) } else { random_dag(&mut rng, &spec) };
            let v = random_instance(&mut rng, &dg);
            let x = Xpg::build(&dg, &v).unwrap();
            Case { dg, v, x }
        })
        .collect()
}

struct OracleRun {
    axps: Vec<FeatureSet>,
    cxps: Vec<FeatureSet>,
    bf_axps: Vec<FeatureSet>,
    bf_cxps: Vec<FeatureSet>,
    solve_calls: usize,
    count: usize,
}

fn run_case(c: &Case) -> OracleRun {
    let e = enumerate_xps(&c.x);
    let bf = BruteForce::with_caps(&c.dg, &c.v, Caps::default()).unwrap();
    OracleRun {
        axps: e.axps(),
        cxps: e.cxps(),
        bf_axps: bf.axps().unwrap(),
        bf_cxps: bf.cxps().unwrap(),
        solve_calls: e.solve_calls,
        count: e.len(),
    }
}

fn oracle_equivalence(cases: &[Case], runs: &[OracleRun], elapsed: Duration) -> Outcome {
    let dags = cases.iter().filter(|c| !c.dg.is_tree()).count();
    for (k, (c, r)) in cases.iter().zip(runs).enumerate() {
        ensure(r.axps == r.bf_axps, || format!("case {k}: AXps {:?} vs brute force {:?}", r.axps, r.bf_axps))?;
        ensure(r.cxps == r.bf_cxps, || format!("case {k}: CXps {:?} vs brute force {:?}", r.cxps, r.bf_cxps))?;
        ensure(c.dg.nodes().len() <= 60, || format!("case {k} has {} nodes", c.dg.nodes().len()))?;
    }
    ensure(elapsed < Duration::from_secs(60), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!(
        "{} models ({} DAGs, {} trees) match brute force in {:.2} s",
        cases.len(),
        dags,
        cases.len() - dags,
        elapsed.as_secs_f64()
    ))
}

fn duality(runs: &[OracleRun]) -> Outcome {
    for (k, r) in runs.iter().enumerate() {
        ensure(check_duality(&r.axps, &r.cxps), || format!("case {k}: hitting-set duality fails"))?;
        ensure(union_of(&r.axps) == union_of(&r.cxps), || format!("case {k}: unions differ"))?;
    }
    Ok(format!("{} cases dual with equal unions", runs.len()))
}

fn tree_cxps() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC5);
    for k in 0..220 {
        let spec = ModelSpec {
            features: rng.gen_range(1..=10),
            max_domain: 4,
            max_nodes: rng.gen_range(3..=120),
            classes: rng.gen_range(2..=3),
        };
        let dt = random_tree(&mut rng, &spec);
        let v = random_instance(&mut rng, &dt);
        let x = Xpg::build(&dt, &v).unwrap();
        let listed = enumerate_tree_cxps(&x).unwrap();
        let enumerated = enumerate_xps(&x).cxps();
        ensure(listed == enumerated, || format!("tree {k}: {listed:?} vs {enumerated:?}"))?;
    }

    let sizes = [50usize, 500, 5000];
    let mut per_size = Vec::new();
    for &n in &sizes {
        let mut samples = Vec::new();
        for _ in 0..9 {
            let spec = ModelSpec { features: 16, max_domain: 4, max_nodes: n, classes: 2 };
            let dt = random_tree(&mut rng, &spec);
            let v = random_instance(&mut rng, &dt);
            let x = Xpg::build(&dt, &v).unwrap();
            let mut reps = 0u32;
            let t = Instant::now();
            while reps < 3 || t.elapsed() < Duration::from_millis(20) {
                std::hint::black_box(enumerate_tree_cxps(&x).unwrap());
                reps += 1;
            }
            samples.push((t.elapsed() / reps, dt.nodes().len()));
        }
        samples.sort();
        let (median, nodes) = samples[samples.len() / 2];
        per_size.push((nodes as f64, median.as_secs_f64()));
    }
    let pts: Vec<(f64, f64)> = per_size.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let detail = per_size
        .iter()
        .map(|(n, t)| format!("{n}:{:.3}ms", t * 1e3))
        .collect::<Vec<_>>()
        .join(" ");
    ensure(slope <= 1.3, || format!("fitted exponent {slope:.2} ({detail})"))?;
    Ok(format!("220 trees agree; fitted exponent {slope:.2} ({detail})"))
}

fn monotonicity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC6);
    let mut pairs = 0;
    while pairs < 10_000 {
        let spec = ModelSpec {
            features: rng.gen_range(1..=10),
            max_domain: 4,
            max_nodes: rng.gen_range(3..=80),
            classes: rng.gen_range(2..=3),
        };
        let dg = if rng.gen_bool(0.5) { random_tree(&mut rng, &spec) } else { random_dag(&mut rng, &spec) };
        let v = random_instance(&mut rng, &dg);
        let x = Xpg::build(&dg, &v).unwrap();
        for _ in 0..50 {
            let s = random_svector(&mut rng, spec.features);
            let mut t = s.clone();
            for b in t.0.iter_mut() {
                *b |= rng.gen_bool(0.3);
            }
            ensure(s.precedes(&t), || "generated pair is not ordered".into())?;
            ensure(!x.evaluate(&s) || x.evaluate(&t), || format!("violation at {:?} <= {:?}", s.0, t.0))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} ordered pairs, 0 violations"))
}

fn call_economy(runs: &[OracleRun]) -> Outcome {
    for (k, r) in runs.iter().enumerate() {
        ensure(r.solve_calls == r.count + 1, || {
            format!("case {k}: {} calls for {} explanations", r.solve_calls, r.count)
        })?;
    }
    let total: usize = runs.iter().map(|r| r.count).sum();
    Ok(format!("{} enumerations, {total} explanations, calls = XPs + 1 throughout", runs.len()))
}

fn desk_scale() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC8);
    let mut times = Vec::new();
    let mut xps = 0;
    for k in 0..24 {
        let spec = ModelSpec {
            features: [20, 40, 60][k % 3],
            max_domain: 4,
            max_nodes: 300,
            classes: 2,
        };
        let dg = if k % 2 == 0 { random_tree(&mut rng, &spec) } else { random_dag(&mut rng, &spec) };
        ensure(dg.nodes().len() <= 300, || format!("model {k} has {} nodes", dg.nodes().len()))?;
        for _ in 0..5 {
            let v = random_instance(&mut rng, &dg);
            let x = Xpg::build(&dg, &v).unwrap();
            let (e, t) = timed(|| enumerate_xps(&x));
            xps += e.len();
            times.push(t);
        }
    }
    let max = times.iter().max().copied().unwrap_or_default();
    let avg = times.iter().sum::<Duration>() / times.len() as u32;
    ensure(avg < Duration::from_millis(500), || format!("average {:.3} s", avg.as_secs_f64()))?;
    ensure(max < Duration::from_secs(2), || format!("maximum {:.3} s", max.as_secs_f64()))?;
    Ok(format!(
        "{} instances, {xps} explanations; avg {:.2} ms, max {:.2} ms",
        times.len(),
        ms(avg),
        ms(max)
    ))
}

fn points(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |b| (0..n).map(|i| b >> i & 1 == 1).collect())
}

fn check_dl(dl: &DecisionList) -> Result<usize, String> {
    let bdd = compile_dl(dl, None).map_err(|e| e.to_string())?;
    ensure(bdd.is_reduced(), || "not reduced".into())?;
    ensure(bdd.is_ordered(), || "not ordered".into())?;
    let dg = bdd.to_decision_graph();
    let n = dl.num_features();
    let mut count = 0;
    for x in points(n) {
        let want = dl.eval(&x);
        ensure(bdd.eval(&x) == want, || format!("OBDD disagrees at {x:?}"))?;
        let v = Instance::new(x.iter().map(|&b| FeatureValue::Category(b as usize)).collect());
        let got = dg.classify_label(&v).map_err(|e| e.to_string())?;
        ensure(*got == Atom::Int(want as i64), || format!("graph disagrees at {x:?}"))?;
        count += 1;
    }
    Ok(count)
}

fn dl_compiler() -> Outcome {
    let example = parse_dl(
        r#"[{"literals":[1,2],"class":1},{"literals":[-1,2],"class":0},{"literals":[],"class":0}]"#,
    )
    .unwrap();
    let mut points_checked = check_dl(&example).map_err(|e| format!("example list: {e}"))?;
    let mut rng = StdRng::seed_from_u64(0xC9);
    for k in 0..50 {
        let n = rng.gen_range(1..=12);
        let rules = rng.gen_range(0..=15);
        let dl = random_dl(&mut rng, n, rules, 4);
        points_checked += check_dl(&dl).map_err(|e| format!("list {k}: {e}"))?;
    }
    Ok(format!("51 lists, {points_checked} points agree; all diagrams reduced and ordered"))
}

fn membership_consistency(cases: &[Case], runs: &[OracleRun]) -> Outcome {
    let mut queries = 0;
    for (k, (c, r)) in cases.iter().zip(runs).enumerate() {
        let union = union_of(&r.bf_axps);
        for i in 0..c.x.num_vars() {
            let got = membership(&c.x, i, MembershipKind::Either);
            ensure(got == union.contains(i), || format!("case {k}, feature {}: membership {got}", i + 1))?;
            queries += 1;
        }
    }
    Ok(format!("{queries} membership queries agree"))
}

fn main() -> ExitCode {
    let cases = oracle_cases();
    let (runs, oracle_time) = timed(|| cases.iter().map(run_case).collect::<Vec<_>>());

    let results: Vec<(&str, Outcome)> = vec![
        ("1 running examples", running_examples()),
        ("2 evaluation semantics", evaluation_semantics()),
        ("3 oracle equivalence", oracle_equivalence(&cases, &runs, oracle_time)),
        ("4 duality", duality(&runs)),
        ("5 tree CXp enumeration", tree_cxps()),
        ("6 monotonicity", monotonicity()),
        ("7 oracle-call economy", call_economy(&runs)),
        ("8 desk-scale performance", desk_scale()),
        ("9 decision-list compiler", dl_compiler()),
        ("10 membership consistency", membership_consistency(&cases, &runs)),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
