//! One line per acceptance criterion, then a single assertion over all.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use actol::abstraction::{abstract_post, alpha, gamma_contains, PredicateSet};
use actol::adders::{preset, presets, AdderModel};
use actol::checkers::{
    bitblast, check_adherence, check_exhaustive, check_sat, sat_solve, side_ranges, CheckOptions, Engine, SatResult,
    Verdict,
};
use actol::concrete::{reach_error_bounded, step, ExecBounds, Verdict as Reach};
use actol::frontend::{parse_predicates, BinOp, Expr, Statement};
use actol::logic::{substitute, Conjunction, Operand};
use actol::pipeline::{analyze, load_corpus, Analysis, Sources};
use actol::tolerance::MappedConstraint;
use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn program(name: &str) -> Analysis {
    let d = corpus_dir();
    let rank = d.join(format!("{}.rank", name));
    let src = Sources::load(
        &d.join(format!("{}.acp", name)),
        &d.join(format!("{}.preds", name)),
        rank.exists().then_some(rank.as_path()),
    )
    .unwrap();
    analyze(&src, BinOp::Add).unwrap()
}

fn conj(src: &str) -> Conjunction {
    let p = PredicateSet::from_comparisons(&parse_predicates(src).unwrap()).unwrap();
    Conjunction::from_literals(p.atoms().iter().cloned())
}

fn approximate() -> Vec<AdderModel> {
    presets().into_iter().filter(|m| !m.is_exact()).collect()
}

fn verdicts(mapped: &[MappedConstraint], engine: Engine) -> Vec<(String, Verdict)> {
    presets()
        .iter()
        .map(|m| (m.name.clone(), check_adherence(m, mapped, engine, 16, &CheckOptions::default()).unwrap()))
        .collect()
}

fn within(start: Instant, limit: u64) -> Result<(), String> {
    ensure(start.elapsed() < Duration::from_secs(limit), || format!("took {:.1?}, limit {} s", start.elapsed(), limit))
}

fn array() -> Outcome {
    let t = Instant::now();
    let a = program("array");
    ensure(a.safe, || "not SAFE".into())?;
    let mapped = a.mapped().map_err(|e| e.to_string())?;
    ensure(mapped.len() == 1, || format!("{} constraints", mapped.len()))?;
    let p = &mapped[0].pairs;
    ensure(p.len() == 1, || format!("{} pairs", p.len()))?;
    ensure(p[0].pre == conj("0 <= x\nx <= 989\ny == 10"), || format!("pre {}", p[0].pre))?;
    ensure(p[0].post == conj("0 <= z\nz <= 999"), || format!("post {}", p[0].post))?;
    for engine in [Engine::Exhaustive, Engine::Sat] {
        for (name, v) in verdicts(&mapped, engine) {
            ensure(v.holds(), || format!("{} {}: {}", name, engine.name(), v))?;
        }
    }
    within(t, 10)?;
    Ok("pre {0<=x, x<=989, y=10}, post {0<=z, z<=999}; 6/6 presets hold, both engines".into())
}

fn add_one() -> Outcome {
    let t = Instant::now();
    let a = program("add_one");
    ensure(a.safe, || "not SAFE".into())?;
    let mapped = a.mapped().map_err(|e| e.to_string())?;
    ensure(mapped.len() == 1 && mapped[0].pairs.len() == 1, || "expected one pair".into())?;
    let p = &mapped[0].pairs[0];
    ensure(p.pre == conj("1 <= x\ny == 1") && p.post == conj("z != 0"), || format!("({}, {})", p.pre, p.post))?;
    let opts = CheckOptions::default();
    let rca = preset("rca_16").unwrap();
    ensure(check_adherence(&rca, &mapped, Engine::Auto, 16, &opts).unwrap().holds(), || "rca_16 fails".into())?;
    for m in approximate() {
        match check_adherence(&m, &mapped, Engine::Auto, 16, &opts).unwrap() {
            Verdict::Violated { witness: w } => {
                let z = m.evaluate(w.x(), w.y()).unwrap();
                ensure(z == 0 && w.z() == 0, || format!("{}: witness gives z = {}", m.name, z))?;
            }
            v => return Err(format!("{}: {}", m.name, v)),
        }
    }
    within(t, 30)?;
    Ok("(1<=x & y=1, z!=0); rca holds; 5/5 approximate violated with z = 0".into())
}

fn specific_add() -> Outcome {
    let t = Instant::now();
    let a = program("specific_add");
    ensure(a.safe, || "not SAFE".into())?;
    let mapped = a.mapped().map_err(|e| e.to_string())?;
    let p = &mapped[0].pairs[0];
    ensure(mapped.len() == 1 && p.pre == conj("x == 30\ny == 50") && p.post == conj("z == 80"), || {
        format!("({}, {})", p.pre, p.post)
    })?;
    for (name, v) in verdicts(&mapped, Engine::Auto) {
        if name == "gda_16" {
            continue;
        }
        let expect_violated = name == "aca_ii_16_4";
        ensure(v.is_violated() == expect_violated, || format!("{}: {}", name, v))?;
    }
    let z = preset("aca_ii_16_4").unwrap().evaluate(30, 50).unwrap();
    ensure(z != 80, || "aca_ii_16_4 adds 30 + 50 exactly".into())?;
    within(t, 5)?;
    Ok(format!("({{x=30, y=50}}, {{z=80}}); only aca_ii_16_4 violated; 30 + 50 = {} there", z))
}

fn termination() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    for (name, loops, tcs) in [("sum", 1, 2), ("quotient", 1, 2), ("mirror_matrix", 2, 2)] {
        let a = program(name);
        let added = a.cfa.errors.len() - a.source_cfa.errors.len();
        ensure(added == 2 * loops, || format!("{}: {} guards added", name, added))?;
        let copies = a
            .cfa
            .edges
            .iter()
            .filter(|e| matches!(&e.stmt, Statement::Assign(v, Expr::Var(w)) if *v == format!("old_{}", w)))
            .count();
        ensure(copies >= loops, || format!("{}: {} old-value copies", name, copies))?;
        ensure(a.safe, || format!("{}: not SAFE", name))?;
        let mapped = a.mapped().map_err(|e| e.to_string())?;
        ensure(mapped.len() == tcs, || format!("{}: {} constraints", name, mapped.len()))?;
        for (m, v) in verdicts(&mapped, Engine::Auto) {
            let exact = m == "rca_16";
            ensure(v.holds() == exact && (exact || v.is_violated()), || format!("{} {}: {}", name, m, v))?;
        }
        notes.push(format!("{} #tc={}", name, mapped.len()));
    }
    within(t, 60)?;
    Ok(format!("{}; rca holds, all approximate violated", notes.join(", ")))
}

fn soundness() -> Outcome {
    let t = Instant::now();
    let corpus = load_corpus(&corpus_dir()).map_err(|e| e.to_string())?;
    let bounds = ExecBounds::new(10_000, 0, 255).unwrap().with_width(8);
    let opts = CheckOptions::default();
    let (mut runs, mut held) = (0, 0);
    for entry in &corpus {
        let a = analyze(&entry.sources().unwrap(), BinOp::Add).unwrap();
        if !a.safe {
            continue;
        }
        let precise = reach_error_bounded(&a.cfa, &bounds, None).unwrap();
        ensure(precise.verdict == Reach::NoErrorFound, || format!("{} precise: {:?}", entry.name, precise.verdict))?;
        let mapped = a.mapped().map_err(|e| e.to_string())?;
        for m in presets() {
            runs += 1;
            let holds = mapped.is_empty() || check_adherence(&m, &mapped, Engine::Auto, 8, &opts).unwrap().holds();
            if !holds {
                continue;
            }
            held += 1;
            let r = reach_error_bounded(&a.cfa, &bounds, Some(&m)).unwrap();
            ensure(r.verdict == Reach::NoErrorFound, || {
                format!("{} with {} at W=8: {:?}", entry.name, m.name, r.verdict)
            })?;
        }
    }
    within(t, 300)?;
    Ok(format!("{} (program, preset) cells, {} adhere, none reaches ERR", runs, held))
}

fn abstraction() -> Outcome {
    let t = Instant::now();
    let vars3: &'static [&'static str] = &["a", "b", "c"];
    runner(1000)
        .run(
            &(
                prop::collection::vec(atom(vars3, 30), 1..=4),
                prop::collection::vec(prop::collection::vec(-50i128..=50, 3), 1..=6),
            ),
            |(atoms, states)| {
                let p = PredicateSet::new(atoms);
                let s: Vec<_> = states.iter().map(|v| state(vars3, v)).collect();
                let a = alpha(&s, &p);
                for st in &s {
                    prop_assert!(gamma_contains(&a, st), "{:?} not in gamma({})", st, a);
                }
                Ok(())
            },
        )
        .map_err(|e| format!("galois: {}", e))?;

    let vars2: &'static [&'static str] = &["a", "b"];
    runner(500)
        .run(
            &(prop::collection::vec(atom(vars2, 20), 1..=3), prop::collection::vec(0u8..3, 3), statement()),
            |(atoms, pol, stm)| {
                let p = PredicateSet::new(atoms);
                let a = cube(p.atoms(), &pol);
                let post = abstract_post(&a, &stm, &p);
                for va in -40..=40 {
                    for vb in -40..=40 {
                        let s = state(vars2, &[va, vb]);
                        if !gamma_contains(&a, &s) {
                            continue;
                        }
                        if let Ok(Some(s2)) = step(&stm, &s) {
                            prop_assert!(
                                gamma_contains(&post, &s2),
                                "{} from {} gives {:?}, outside {}",
                                stm,
                                a,
                                s2,
                                post
                            );
                        }
                    }
                }
                Ok(())
            },
        )
        .map_err(|e| format!("post: {}", e))?;

    runner(1000)
        .run(
            &(atom(vars3, 30), prop::collection::vec(-30i128..=30, 3), prop::sample::select(vars3), -30i64..=30),
            |(q, vals, u, c)| {
                let s = state(vars3, &vals);
                let q = Conjunction::from_literals([q]);
                let holds = |c: &Conjunction, s: &actol::concrete::ConcreteState| c.holds(|v| s.get(v).copied());
                let renamed = substitute(&q, &[(Operand::Var(u.to_string()), "x".into())]).unwrap();
                let mut sx = s.clone();
                sx.insert("x".into(), s[u]);
                prop_assert_eq!(holds(&renamed, &sx), holds(&q, &s));
                // A constant operand adds `x = c`; with x bound to c it is neutral.
                let fixed = substitute(&q, &[(Operand::Const(c), "x".into())]).unwrap();
                let mut sc = s.clone();
                sc.insert("x".into(), c as i128);
                prop_assert_eq!(holds(&fixed, &sc), holds(&q, &s));
                Ok(())
            },
        )
        .map_err(|e| format!("substitution: {}", e))?;
    Ok(format!("1000 Galois sets, 500 post boxes, 1000 substitutions in {:.1?}", t.elapsed()))
}

fn engines() -> Outcome {
    let t = Instant::now();
    let opts = CheckOptions::default();
    let violated = std::cell::Cell::new(0);
    runner(50)
        .run(&(model(4..=10), constraint(10)), |(m, mc)| {
            let e = check_exhaustive(&m, &mc, &opts).unwrap();
            let s = check_sat(&m, &mc, &opts).unwrap();
            prop_assert_eq!(e.label(), s.label(), "{} on {:?}", m.name, mc);
            prop_assert!(e.label() != "unknown", "exhaustive gave {}", e);
            for v in [&e, &s] {
                if let Verdict::Violated { witness: w } = v {
                    violated.set(violated.get() + 1);
                    let z = m.evaluate(w.x(), w.y()).unwrap();
                    let env = |v: &str| match v {
                        "x" => Some(w.x() as i128),
                        "y" => Some(w.y() as i128),
                        "z" => Some(z as i128),
                        other => w.side().get(other).copied(),
                    };
                    prop_assert_eq!(mc.violates(env), Some(true));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("agreement: {}", e))?;

    let sat = std::cell::Cell::new(0);
    runner(60)
        .run(&(model(2..=6), constraint(6)), |(m, mc)| {
            let f = bitblast(&m, &mc, &opts).unwrap();
            prop_assert!(f.is_well_formed());
            let by_sat = sat_solve(&f).is_sat();
            let by_search = brute_violation(&m, &mc, &side_ranges(&mc, m.width, &opts));
            sat.set(sat.get() + by_sat as u32);
            prop_assert_eq!(by_sat, by_search, "{} on {:?}", m.name, mc);
            Ok(())
        })
        .map_err(|e| format!("equisatisfiability: {}", e))?;
    within(t, 120)?;
    Ok(format!(
        "50 instances agree ({} witnesses checked); 60 encodings equisatisfiable ({} SAT)",
        violated.get(),
        sat.get()
    ))
}

fn sat_solver() -> Outcome {
    let t = Instant::now();
    ensure(sat_solve(&pigeonhole(4, 3)) == SatResult::Unsat, || "PHP(4,3) satisfiable".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut n_sat = 0;
    for i in 0..200 {
        let vars = rng.gen_range(3..=20);
        let f = random_3sat(&mut rng, vars);
        let r = sat_solve(&f);
        if let SatResult::Sat(model) = &r {
            ensure(f.satisfied_by(model), || format!("instance {}: bad model", i))?;
            n_sat += 1;
        }
        ensure(r.is_sat() == enumerate_sat(&f), || format!("instance {} ({} vars) disagrees", i, vars))?;
    }
    within(t, 60)?;
    Ok(format!("PHP(4,3) unsat; 200 random 3-SAT match enumeration ({} sat)", n_sat))
}

fn adders() -> Outcome {
    let t = Instant::now();
    let mut models: Vec<AdderModel> = presets().iter().map(|m| m.with_width(8).unwrap()).collect();
    for r in [1, 2, 4, 8] {
        for p in 0..=8 {
            models.extend(AdderModel::slice_sum(8, r, p).ok());
        }
        models.extend(AdderModel::generate_only(8, r).ok());
    }
    for m in &models {
        let net = m.to_netlist();
        for x in 0..256u64 {
            for y in 0..256u64 {
                let z = m.evaluate(x, y).unwrap();
                ensure(z <= x + y, || format!("{}: {} + {} gives {}", m.name, x, y, z))?;
                ensure(x & y != 0 || z == x + y, || format!("{}: carry-free {} + {} gives {}", m.name, x, y, z))?;
                ensure(net.evaluate(x, y) == z, || format!("{}: netlist differs at ({}, {})", m.name, x, y))?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for m in presets() {
        let net = m.to_netlist();
        for _ in 0..100_000 {
            let (x, y) = (rng.gen_range(0..1 << 16), rng.gen_range(0..1 << 16));
            ensure(net.evaluate(x, y) == m.evaluate(x, y).unwrap(), || {
                format!("{} netlist at ({}, {})", m.name, x, y)
            })?;
        }
    }
    within(t, 120)?;
    Ok(format!("{} models exhaustive at N=8; 6 presets x 10^5 vectors at N=16", models.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("array end-to-end", array),
        ("add_one", add_one),
        ("specific_add", specific_add),
        ("termination pipeline", termination),
        ("soundness at W=8", soundness),
        ("abstraction correctness", abstraction),
        ("engine cross-validation", engines),
        ("SAT solver", sat_solver),
        ("adder invariants", adders),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let (mark, detail) = match &r {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        // Written to the raw handle so the lines survive libtest's capture.
        let line = format!("criterion {} {} {} [{:.2?}]: {}\n", i + 1, mark, name, t.elapsed(), detail);
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        if r.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}
