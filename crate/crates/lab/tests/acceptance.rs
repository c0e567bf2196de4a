//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use contraction_core::falsifier::{generate, random_spec, InstanceGenerator, Target};
use contraction_core::phi::Property2Verdict;
use contraction_core::{
    cauchy_diagnostics, certify, check_phi_property2, corpus, iterate, CertifyOptions,
    ContractionSpec, PhiSpec, Rational, VariantKind, Verdict,
};
use contraction_lab::commands::{self, FalsifyArgs, Globals};
use contraction_lab::corpus_run::{corpus_run, render_corpus, CorpusSettings};
use contraction_lab::parallel::certify_parallel;
use contraction_lab::{parse_instance, LoadOptions, Status};
use oracle::*;

const RANDOM_INSTANCES: u64 = 10_000;

const EXAMPLE10_FILE: &str = r#"{
  "space": {"kind": "absdiff-window", "naturals": {"max": 200, "exclude": [3]}},
  "map": {"kind": "rule", "name": "example10"},
  "phi": {"family": "parity-linear", "k": "5/6"},
  "contraction": {"variant": "type2", "alpha": "0", "beta": "0", "gamma": "0", "delta": "5/6"}
}"#;

type Check = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn example10_file() -> contraction_core::Instance {
    parse_instance(EXAMPLE10_FILE, "example10", LoadOptions::default()).unwrap()
}

fn criterion1() -> Check {
    let start = Instant::now();
    let inst = example10_file();
    let spec = inst.spec.clone().unwrap();
    let report = commands::certify(&inst, &spec, CertifyOptions::default(), None)
        .map_err(|e| e.to_string())?;
    let fix = commands::fixpoints(&inst);
    let elapsed = start.elapsed();
    ensure(report.status == Status::Success, || {
        format!("certify exit status {:?}", report.status)
    })?;
    ensure(report.json["verdict"] == "certified on window", || {
        format!("verdict {}", report.json["verdict"])
    })?;
    ensure(report.json["violation_count"] == 0, || {
        format!("{} violations", report.json["violation_count"])
    })?;
    ensure(fix.json["fixed_points"] == serde_json::json!(["1"]), || {
        format!("Fix(f) = {}", fix.json["fixed_points"])
    })?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;

    // reference: |f x - f y| <= δ φ(M_f(x, y)) on every ordered pair, Fix(f) = {1}
    let delta = q("5/6");
    let window = ex10_window(200);
    for &x in &window {
        for &y in &window {
            let lhs = int((ex10_f(x) - ex10_f(y)).abs());
            let (_, _, _, m) = ex10_diameters(x, y);
            ensure(lhs <= &delta * ex10_phi(&m), || {
                format!("reference inequality fails at ({x}, {y})")
            })?;
        }
    }
    let fixed: Vec<i64> = window.iter().copied().filter(|&n| ex10_f(n) == n).collect();
    ensure(fixed == [1], || format!("reference Fix(f) = {fixed:?}"))?;
    Ok(format!(
        "{} pairs, 0 violations, Fix(f) = {{1}}, {:.2?}",
        report.json["pairs_checked"], elapsed
    ))
}

fn criterion2() -> Check {
    let inst = example10_file();
    let tm = certify(
        &inst.space,
        &inst.map,
        &inst.phi,
        &ContractionSpec::TmMax,
        CertifyOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(tm.verdict == Verdict::Violated, || {
        format!("tmmax verdict {:?}", tm.verdict)
    })?;
    let w = &tm.violations[0];
    let label = |p| inst.space.label(p).parse::<i64>().unwrap();
    let (x, y) = (label(w.x), label(w.y));
    ensure(ex10_in_a(x) != ex10_in_a(y), || {
        format!("witness ({x}, {y}) does not split A and B")
    })?;
    ensure(w.lhs == int(1), || format!("witness LHS {}", w.lhs))?;
    ensure(w.rhs.as_exact() == Some(&int(0)), || {
        format!("witness RHS {}", w.rhs)
    })?;
    let (dx, dy, dxy, _) = ex10_diameters(x, y);
    for d in [&dx, &dy, &dxy] {
        ensure(ex10_phi(d) == int(0), || {
            format!("reference φ({d}) is not 0")
        })?;
    }
    ensure(int((ex10_f(x) - ex10_f(y)).abs()) == int(1), || {
        "reference LHS is not 1".into()
    })?;
    let t3 = certify(
        &inst.space,
        &inst.map,
        &inst.phi,
        &ContractionSpec::TypeIII,
        CertifyOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(t3.certified(), || format!("type3 verdict {:?}", t3.verdict))?;
    Ok(format!(
        "tmmax violated at ({x}, {y}) with LHS 1, RHS 0; type3 certified"
    ))
}

fn criterion3() -> Check {
    let inst = corpus::example7_grid(&int(1), &int(2)).unwrap();
    ensure(inst.space.len() == 21, || {
        format!("grid has {} points", inst.space.len())
    })?;
    for c in ["1/4", "1/10"] {
        let spec = ContractionSpec::type_i(q(c), q(c), q(c)).unwrap();
        let r = commands::certify(&inst, &spec, CertifyOptions::default(), None)
            .map_err(|e| e.to_string())?;
        ensure(r.json["verdict"] == "certified on window", || {
            format!("type1 at {c}: {}", r.json["verdict"])
        })?;
    }
    // reference: f(x) = 2 for every x != 1, so D(fx, fy) = 0 off the fixed points
    let grid: Vec<Rational> = (0..=20).map(|i| int(i) / int(2)).collect();
    let f = |x: &Rational| if *x == int(1) { int(1) } else { int(2) };
    let domain: Vec<&Rational> = grid.iter().filter(|x| f(x) != **x).collect();
    ensure(domain.len() == 19, || {
        format!("reference domain has {} points", domain.len())
    })?;
    for x in &domain {
        for y in &domain {
            ensure(f(x) == f(y), || {
                format!("reference LHS nonzero at ({x}, {y})")
            })?;
        }
    }
    let fix = commands::fixpoints(&inst);
    ensure(
        fix.json["fixed_points"] == serde_json::json!(["1", "2"]),
        || format!("Fix(f) = {}", fix.json["fixed_points"]),
    )?;
    Ok("type1 certified for 1/4 and 1/10, LHS = 0 on 19 domain points, Fix(f) = {1, 2}".into())
}

fn criterion4() -> Check {
    let inst = corpus::example10(200).unwrap();
    let start = Instant::now();
    let traces: Vec<_> = inst
        .space
        .points()
        .map(|p| iterate(&inst.map, p, 100))
        .collect();
    let elapsed = start.elapsed();
    let one = inst.space.find("1").unwrap();
    for t in &traces {
        let x: i64 = inst.space.label(t.start).parse().unwrap();
        let path: Vec<i64> = t
            .steps
            .iter()
            .map(|&p| inst.space.label(p).parse().unwrap())
            .collect();
        let expected = match x {
            1 => vec![1],
            _ if ex10_in_a(x) => vec![x, 2, 1],
            _ => vec![x, 1],
        };
        ensure(t.limit() == Some(one), || {
            format!("trace from {x} does not converge to 1")
        })?;
        ensure(path == expected, || format!("trace from {x} is {path:?}"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} traces converge to 1 within 2 steps, {elapsed:.2?}",
        traces.len()
    ))
}

fn criterion5() -> Check {
    let settings = CorpusSettings::default();
    let report = corpus_run(&settings);
    let rendered = render_corpus(&report, &settings);
    ensure(report.passed(), || "corpus run reports failures".into())?;
    ensure(rendered.text.contains("printed"), || {
        "table lacks the printed column".into()
    })?;
    ensure(report.case_table.len() == 4, || {
        format!("{} cases", report.case_table.len())
    })?;

    // reference: min over each case of δ φ(M_f(x, y)) and max of |f x - f y|
    let window = ex10_window(200);
    let mut bound: [Option<Rational>; 4] = Default::default();
    let mut lhs = [int(0), int(0), int(0), int(0)];
    for &x in &window {
        for &y in &window {
            if x == y {
                continue;
            }
            let case = if ex10_in_a(x) == ex10_in_a(y) {
                0
            } else {
                let other = if ex10_in_a(x) { y } else { x };
                match other {
                    1 => 1,
                    _ if other % 2 == 0 => 2,
                    _ => 3,
                }
            };
            let (_, _, _, m) = ex10_diameters(x, y);
            let b = q("5/6") * ex10_phi(&m);
            if bound[case].as_ref().is_none_or(|v| b < *v) {
                bound[case] = Some(b);
            }
            lhs[case] = lhs[case].clone().max(int((ex10_f(x) - ex10_f(y)).abs()));
        }
    }
    let mut parts = Vec::new();
    for (row, (b, l)) in report.case_table.iter().zip(bound.iter().zip(&lhs)) {
        let b = b.clone().unwrap();
        ensure(row.bound == b, || {
            format!("case {}: table {} vs reference {b}", row.case, row.bound)
        })?;
        ensure(row.max_lhs == *l, || {
            format!("case {}: LHS {} vs reference {l}", row.case, row.max_lhs)
        })?;
        ensure(row.bound >= row.max_lhs, || {
            format!("case {}: bound below LHS", row.case)
        })?;
        let note = if row.matches_printed {
            String::new()
        } else {
            format!(", printed {} differs", row.printed)
        };
        parts.push(format!(
            "case {} bound {} >= {}{note}",
            row.case, row.bound, row.max_lhs
        ));
    }
    Ok(parts.join("; "))
}

fn criterion6() -> Check {
    let gen = InstanceGenerator::new(20_240_601);
    let mut points = 0usize;
    let mut converged = 0usize;
    for index in 0..RANDOM_INSTANCES {
        let inst = generate(&gen, index);
        let n = inst.space.len();
        for x in inst.space.points() {
            let diag =
                cauchy_diagnostics(&inst.space, &inst.map, x, n).map_err(|e| e.to_string())?;
            ensure(diag.nonincreasing, || {
                format!("instance {index}, point {x}: diameters increase")
            })?;
            ensure(diag.reaches_zero == diag.trace.converged(), || {
                format!("instance {index}, point {x}: zero-reaching and convergence disagree")
            })?;
            // reference diameters along the sequence
            let mut p = x;
            for (k, d) in diag.diameters.iter().enumerate() {
                let reference = brute_diameter(&inst.space, &brute_orbit(&inst.map, p));
                ensure(*d == reference, || {
                    format!("instance {index}, point {x}, step {k}: {d} vs {reference}")
                })?;
                p = inst.map.apply(p);
            }
            points += 1;
            converged += usize::from(diag.trace.converged());
        }
    }
    Ok(format!(
        "{RANDOM_INSTANCES} instances, {points} start points ({converged} converging), 0 failures"
    ))
}

fn criterion7() -> Check {
    let gen = InstanceGenerator::new(20_240_602);
    let options = CertifyOptions::default();
    let (mut type2, mut tmmax) = (0, 0);
    for index in 0..RANDOM_INSTANCES {
        let inst = generate(&gen, index);
        let spec2 = random_spec(&mut gen.rng(index ^ (1 << 62)), VariantKind::TypeII);
        let run = |spec: &ContractionSpec| {
            certify_parallel(&inst.space, &inst.map, &inst.phi, spec, options.clone())
                .map_err(|e| e.to_string())
        };
        let t3 = run(&ContractionSpec::TypeIII)?;
        if run(&spec2)?.certified() {
            type2 += 1;
            ensure(t3.certified(), || {
                format!("instance {index}: type2 certified, type3 {:?}", t3.verdict)
            })?;
        }
        if run(&ContractionSpec::TmMax)?.certified() {
            tmmax += 1;
            ensure(t3.certified(), || {
                format!("instance {index}: tmmax certified, type3 {:?}", t3.verdict)
            })?;
        }
    }
    ensure(type2 > 0 && tmmax > 0, || {
        "no certified instances to test".into()
    })?;
    Ok(format!("{RANDOM_INSTANCES} instances: {type2} type2-certified and {tmmax} tmmax-certified, all type3-certified"))
}

fn criterion8() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let globals = Globals {
        seed: Some(1),
        ..Globals::default()
    };
    let mut parts = Vec::new();
    for kind in [
        VariantKind::TypeII,
        VariantKind::TypeIII,
        VariantKind::TypeI,
    ] {
        let target = Target::Theorem(kind);
        let args = FalsifyArgs {
            trials: RANDOM_INSTANCES,
            target,
            out_dir: Some(dir.path().join(kind.name())),
            inject: Vec::new(),
            points: None,
        };
        let r = commands::falsify(&globals, &args).map_err(|e| e.to_string())?;
        ensure(r.json["finding_count"] == 0, || {
            format!(
                "{target}: {} findings, files in {}",
                r.json["finding_count"],
                dir.path().display()
            )
        })?;
        // how often the hypothesis was met, over a prefix of the same stream
        let gen = InstanceGenerator::new(1);
        let certified = (0..1000)
            .filter(|&i| {
                let inst = generate(&gen, i);
                let spec = random_spec(&mut gen.rng(i ^ (1 << 63)), kind);
                certify(
                    &inst.space,
                    &inst.map,
                    &inst.phi,
                    &spec,
                    CertifyOptions::default(),
                )
                .is_ok_and(|r| r.certified())
            })
            .count();
        parts.push(format!(
            "{target}: 0 findings ({certified} of the first 1000 certified)"
        ));
    }
    Ok(parts.join("; "))
}

type PhiOracle = fn(&Rational) -> Rational;

fn criterion9() -> Check {
    let epsilons = [q("1/10"), q("1"), q("10")];
    let cases: [(PhiSpec, Rational, PhiOracle); 2] = [
        (PhiSpec::linear(q("1/2")).unwrap(), int(1), |t| t / int(2)),
        (
            PhiSpec::parity_linear(q("5/6")).unwrap(),
            q("1/5"),
            ex10_phi,
        ),
    ];
    let mut scanned = 0;
    for (phi, ratio, reference) in &cases {
        let Property2Verdict::Evidence(ev) = check_phi_property2(phi, &epsilons) else {
            return Err(format!("{}: no evidence", phi.family_name()));
        };
        for (e, eps) in ev.iter().zip(&epsilons) {
            ensure(e.delta == eps * ratio, || {
                format!("{}: 𝔡 = {} at ε = {eps}", phi.family_name(), e.delta)
            })?;
            for i in 1..=1000 {
                let t = eps + &e.delta * int(i) / int(1001);
                let value = reference(&t);
                ensure(phi.eval(&t).unwrap() == value, || {
                    format!("{}: φ({t}) disagrees", phi.family_name())
                })?;
                ensure(value <= *eps, || {
                    format!("{}: φ({t}) = {value} > {eps}", phi.family_name())
                })?;
                scanned += 1;
            }
        }
    }
    Ok(format!(
        "𝔡 = ε (linear 1/2), 𝔡 = ε/5 (parity-linear 5/6); {scanned} scan points, 0 violations"
    ))
}

type Criterion = fn() -> Check;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("example 10 type2 certification and Fix(f)", criterion1),
        ("tmmax separation on example 10", criterion2),
        ("example 7 type1 certification and Fix(f)", criterion3),
        ("Picard convergence on example 10", criterion4),
        ("example 10 case table", criterion5),
        ("orbit diameter monotonicity", criterion6),
        ("class inclusions", criterion7),
        ("theorem falsification", criterion8),
        ("Φ evidence", criterion9),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| *f == n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {n} PASS  {title}: {detail} [{elapsed:.1?}]"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL  {title}: {why} [{elapsed:.1?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
