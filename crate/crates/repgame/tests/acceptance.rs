//! End-to-end acceptance checks, one line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nonstd::{rat, ExtReal, NonStdNum, Rational, Residue, Segmented, ViewKind};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use repgame::catalog::{self, CatalogEntry};
use repgame::criteria::{eval_discounted, eval_limit_means, eval_simple, Criterion, Payload, PayoffModel, WholeHistory};
use repgame::equilibria::{family_simple_sum, verify_symbolic_spe, Scope};
use repgame::game::PayoffTable;
use repgame::repeated::{hasse, lift_preferences, Horizon, LiftOptions, RepeatedGameSpec};

/// Wall-clock limit for criteria 1 and 2.
const SMALL_LIMIT: Duration = Duration::from_secs(1);
/// Wall-clock limit for the whole acceptance run.
const TOTAL_LIMIT: Duration = Duration::from_secs(60);

const PERSPECTIVE: Horizon = Horizon::Huge(ViewKind::Perspective);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs a named catalog expectation and demands its golden value.
fn expect(entry: &CatalogEntry, name: &str) -> Result<String, String> {
    let x = entry.expectations.iter().find(|x| x.name == name).ok_or_else(|| format!("no expectation {name:?}"))?;
    let actual = x.evaluate(entry)?;
    ensure(actual == x.expected, || format!("{}: expected {:?}, got {actual:?}", name, x.expected))?;
    Ok(actual)
}

fn entry(id: &str) -> Result<CatalogEntry, String> {
    catalog::get(id).map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:?}, limit {limit:?}"))
}

fn chain_store() -> Outcome {
    let start = Instant::now();
    let cs = entry("chain-store")?;
    let spe = expect(&cs, "spe n=2 (lifted preferences)")?;
    expect(&cs, "hasse CS n=2")?;
    expect(&cs, "hasse LS n=2")?;
    let spec = cs.spec(Horizon::Finite(2));
    for p in 0..2 {
        let h = hasse(&lift_preferences(&spec, p, &LiftOptions::default()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(h.labels.len() == 9, || format!("player {p}: {} nodes", h.labels.len()))?;
    }
    within(start, SMALL_LIMIT)?;
    Ok(spe)
}

fn centipede_finite() -> Outcome {
    let start = Instant::now();
    let cp = entry("centipede")?;
    let leaves = expect(&cp, "leaf payoffs n=5")?;
    expect(&cp, "dynamic consistency, simple")?;
    let spe = expect(&cp, "spe n=5 simple")?;
    within(start, SMALL_LIMIT)?;
    Ok(format!("{spe}; leaves {leaves}"))
}

fn pd_discounted() -> Outcome {
    let pd = entry("pd-positive")?;
    let discounted = |sc: i64| -> Result<(Rational, Rational), String> {
        let rows = vec![
            ("CS", vec![rat(0, 1), rat(sc, 1)]),
            ("SS", vec![rat(-1, 1), rat(-1, 1)]),
            ("CC", vec![rat(-3, 1), rat(-3, 1)]),
            ("SC", vec![rat(sc, 1), rat(0, 1)]),
        ];
        let table = PayoffTable::from_named(&pd.game, &rows).map_err(|e| e.to_string())?;
        let g = pd.game.clone().with_payoffs(&table).map_err(|e| e.to_string())?;
        let spec = RepeatedGameSpec::new(g, Some(table.clone().into()), &pd.connected, Horizon::Finite(2))
            .map_err(|e| e.to_string())?;
        let leaf = |name: &str| spec.constituent.leaf_index(spec.constituent.leaf_by_name(name).unwrap()).unwrap();
        let model = PayoffModel::from(table);
        let value = |seq: [&str; 2]| -> Result<Rational, String> {
            let idx: Vec<usize> = seq.iter().map(|s| leaf(s)).collect();
            let h = spec.finite_history(&idx, 2);
            let v = eval_discounted(&h, &model, 0, &rat(1, 5)).map_err(|e| e.to_string())?;
            // oracle: u(first) + delta * u(second)
            let oracle = model.table.get(idx[0], 0) + rat(1, 5) * model.table.get(idx[1], 0);
            ensure(v == ExtReal::Finite(oracle.clone()), || format!("{seq:?}: {v} vs oracle {oracle}"))?;
            Ok(oracle)
        };
        Ok((value(["CS", "SC"])?, value(["CC", "CS"])?))
    };
    let (a, b) = discounted(-5)?;
    ensure(a == rat(-1, 1) && b == rat(-3, 1), || format!("U_d = {a}, {b}"))?;
    ensure(a > b, || "order not (CS,SC) over (CC,CS)".into())?;
    let (c, d) = discounted(-25)?;
    ensure(c == rat(-5, 1) && d == rat(-3, 1), || format!("with SC=-25: {c}, {d}"))?;
    ensure(c < d, || "order not reversed".into())?;
    Ok(format!("(CS,SC)={a}, (CC,CS)={b}; with SC=-25: {c} vs {d}"))
}

fn huge_run(view: ViewKind, runs: &[(&str, Payload)]) -> Result<WholeHistory, String> {
    let parsed: Result<Vec<(NonStdNum, Payload)>, String> =
        runs.iter().map(|(l, p)| Ok((l.parse::<NonStdNum>().map_err(|e| e.to_string())?, p.clone()))).collect();
    Segmented::from_runs(view, parsed?).map_err(|e| e.to_string())
}

fn centipede_simple_sum() -> Outcome {
    let cp = entry("centipede")?;
    let model = cp.model();
    // leaves: Rr = 0, Rd = 1, D = 2
    let paths = [
        huge_run(ViewKind::Perspective, &[("tau", Payload::Term(0))])?,
        huge_run(ViewKind::Perspective, &[("tau - 1", Payload::Term(0)), ("1", Payload::Term(2))])?,
        huge_run(ViewKind::Perspective, &[("tau - 1", Payload::Term(0)), ("1", Payload::Term(1))])?,
    ];
    for h in &paths {
        for p in 0..2 {
            let v = eval_simple(h, &model, p).map_err(|e| e.to_string())?;
            ensure(v == ExtReal::PosInf, || format!("player {p} gets {v}"))?;
        }
    }
    expect(&cp, "simple sum, always continue")
}

fn pd_simple_sum() -> Outcome {
    let pos = entry("pd-positive")?;
    let verdict = expect(&pos, "simple sum, cooperate")?;
    let path = expect(&pos, "cooperate path")?;
    let neg = entry("pd-negative")?;
    let refusal = expect(&neg, "cooperate constructor")?;
    let forced = expect(&neg, "forced cooperate witness")?;
    Ok(format!("{verdict}, path {path}; {refusal}; forced: {forced}"))
}

fn discounting() -> Outcome {
    let cp = entry("centipede")?;
    expect(&cp, "discounted, discount family")?;
    expect(&entry("chain-store")?, "discounted, discount family")?;
    let spec = cp.spec(PERSPECTIVE);
    let fam = family_simple_sum(&spec, "Rr").map_err(|e| e.to_string())?;
    let report = verify_symbolic_spe(&spec, &fam, &Criterion::Discounted(rat(1, 5)), None).map_err(|e| e.to_string())?;
    let w = report.witness().ok_or("always continue survives discounting")?;
    ensure(w.deviation.position.starts_with("near-future") && w.deviation.scope == Scope::OneShot, || {
        format!("witness at {} ({})", w.deviation.position, w.deviation.scope)
    })?;
    Ok(format!("discount family verified twice; always continue refuted at {} ({})", w.deviation.position, w.deviation.scope))
}

fn overtaking() -> Outcome {
    let cp = entry("centipede")?;
    let spec = cp.spec(PERSPECTIVE);
    let mut refuted = Vec::new();
    for fam in cp.families(PERSPECTIVE) {
        let report = verify_symbolic_spe(&spec, &fam, &Criterion::Overtaking, None).map_err(|e| e.to_string())?;
        if fam.name == "spe" {
            ensure(report.verified(), || report.summary())?;
        } else {
            ensure(!report.verified(), || format!("{} survives overtaking", fam.name))?;
            refuted.push(fam.name);
        }
    }
    ensure(!refuted.is_empty(), || "no other family to refute".into())?;
    Ok(format!("spe verified; refuted {}", refuted.join(", ")))
}

fn limit_of_means() -> Outcome {
    let cs = entry("chain-store")?;
    expect(&cs, "limit of means, repeat (out;A)")?;
    let model = cs.model();
    // leaves: (in,C) = 0, (in,A) = 1, (out) = 2
    let plain = huge_run(ViewKind::BirdsEye, &[("tau", Payload::Term(2))])?;
    let patched = huge_run(
        ViewKind::BirdsEye,
        &[("1", Payload::Term(0)), ("1/2*tau - 1", Payload::Term(2)), ("1", Payload::Term(1)), ("1/2*tau - 1", Payload::Term(2))],
    )?;
    let mut diffs = Vec::new();
    for p in 0..2 {
        let d = eval_limit_means(&patched, &model, p).map_err(|e| e.to_string())?
            - eval_limit_means(&plain, &model, p).map_err(|e| e.to_string())?;
        ensure(d == rat(0, 1), || format!("player {p}: patch moves the mean by {d}"))?;
        diffs.push(d.to_string());
    }
    Ok(format!("repeat (out;A) verified; patched differences {}", diffs.join(", ")))
}

fn bos() -> Outcome {
    let b = entry("bos")?;
    let unit = expect(&b, "mixed unit")?;
    // oracle: plain 9-period average over the unit
    let names: Vec<&str> = unit.split(',').collect();
    ensure(names.len() == 9, || format!("unit of length {}", names.len()))?;
    for p in 0..2 {
        let total: Rational = names
            .iter()
            .map(|n| b.table.get(b.game.leaf_index(b.game.leaf_by_name(n).unwrap()).unwrap(), p).clone())
            .sum();
        let mean = total / rat(9, 1);
        ensure(mean == rat(2, 3), || format!("player {p}: 9-period mean {mean}"))?;
    }
    let verdict = expect(&b, "limit of means, mixed")?;
    Ok(format!("unit {unit}; {verdict}"))
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=8).prop_map(|(n, d)| rat(n, d))
}

fn nsn() -> impl Strategy<Value = NonStdNum> {
    let residue = prop_oneof![Just(Residue::NegEps), Just(Residue::Zero), Just(Residue::PosEps)];
    (small_rat(), small_rat(), residue).prop_map(|(a, b, r)| NonStdNum::new(a, b, r))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn model_of(values: &[Rational]) -> PayoffModel {
    PayoffTable::from_rows(values.iter().map(|v| vec![v.clone()]).collect()).into()
}

fn finite(seq: &[usize]) -> WholeHistory {
    let segs = seq.iter().map(|l| nonstd::Segment::new(NonStdNum::int(1), Payload::Term(*l))).collect();
    Segmented::finite(seq.len() as u64, segs).unwrap()
}

fn tables() -> impl Strategy<Value = (Vec<Rational>, Vec<usize>, usize, usize)> {
    prop::collection::vec(small_rat(), 2..6).prop_flat_map(|v| {
        let n = v.len();
        (Just(v), prop::collection::vec(0..n, 0..4), 0..n, 0..n)
    })
}

fn property_suites(started: Instant) -> Outcome {
    let laws = runner(1000).run(&(nsn(), nsn(), nsn()), |(x, y, z)| {
        prop_assert_eq!([x < y, x == y, x > y].iter().filter(|b| **b).count(), 1);
        if x <= y && y <= z {
            prop_assert!(x <= z);
        }
        prop_assert!(x.indiscernible(&x));
        prop_assert_eq!(x.indiscernible(&y), y.indiscernible(&x));
        if x.indiscernible(&y) && y.indiscernible(&z) {
            prop_assert!(x.indiscernible(&z));
        }
        Ok(())
    });
    laws.map_err(|e| format!("nonstd laws: {e}"))?;

    let delta = rat(1, 5);
    let lemmas = runner(500).run(&tables(), |(vals, ctx, a, b)| {
        let u = model_of(&vals);
        let (j, k) = if vals[a] >= vals[b] { (a, b) } else { (b, a) };
        let seq = |x: usize, y: usize| ctx.iter().copied().chain([x, y]).chain(ctx.iter().copied()).collect::<Vec<_>>();
        let soon = eval_discounted(&finite(&seq(j, k)), &u, 0, &delta).unwrap();
        let late = eval_discounted(&finite(&seq(k, j)), &u, 0, &delta).unwrap();
        prop_assert!(soon >= late);
        prop_assert_eq!(eval_simple(&finite(&seq(a, b)), &u, 0).unwrap(), eval_simple(&finite(&seq(b, a)), &u, 0).unwrap());
        Ok(())
    });
    lemmas.map_err(|e| format!("criterion lemmas: {e}"))?;

    let cases = catalog::cross_validate(2..=5)?;
    let bad: Vec<String> = cases.iter().filter(|c| !c.agrees()).map(|c| c.to_string()).collect();
    ensure(bad.is_empty(), || format!("disagreements: {}", bad.join("; ")))?;
    within(started, TOTAL_LIMIT)?;
    Ok(format!("1000 law cases, 500 tables, {} finite cross-checks, 0 disagreements", cases.len()))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let criteria: [(&str, Box<dyn Fn() -> Outcome>); 10] = [
        ("chain store n=2", Box::new(chain_store)),
        ("centipede n=5 simple sum", Box::new(centipede_finite)),
        ("prisoner's dilemma discounting", Box::new(pd_discounted)),
        ("centipede huge simple sum", Box::new(centipede_simple_sum)),
        ("prisoner's dilemma huge simple sum", Box::new(pd_simple_sum)),
        ("discounting families", Box::new(discounting)),
        ("overtaking centipede", Box::new(overtaking)),
        ("limit of means chain store", Box::new(limit_of_means)),
        ("bach or stravinsky mixed unit", Box::new(bos)),
        ("property suites", Box::new(move || property_suites(started))),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} pass  {name} ({secs:.2}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria pass in {:.2}s", 10 - failed, started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
