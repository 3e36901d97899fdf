//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;

use loopchart::{
    chart_of, check_properties, collapse, labeled_onechart_of, lee, llee_elimination_strategy,
    onechart_of, parse_star_expr, replay, run_to_labeling, successful_runs, verify_llee,
    verify_projection, Chart, CorpusConfig, LeeOutcome, MutationTally, StarExpr, DEFAULT_BUDGET,
    PROPERTIES,
};

const E: &str = "(a*.b*)*";
const F: &str = "(a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0))*.0";
const G0: &str = "((1.a).(c.a+a.(b+b.a))*).0";

/// Vertex cap for every chart built here.
const CAP: usize = 10_000;
/// Successful elimination runs the search must find for g0.
const MIN_G0_RUNS: usize = 3;
/// Upper limit on runs collected during full enumeration.
const RUN_LIMIT: usize = 1_000;
/// Share of random single-marking mutants both verifiers must reject.
const MIN_MUTANT_REJECTION: f64 = 0.90;
const CORPUS: CorpusConfig = CorpusConfig {
    seed: 42,
    count: 200,
    max_depth: 5,
    alphabet_size: 3,
    vertex_cap: CAP,
};

type Verdict = Result<String, String>;

fn expr(text: &str) -> StarExpr {
    parse_star_expr(text).expect("golden expressions parse")
}

fn chart(text: &str) -> Chart {
    chart_of(&expr(text), CAP).expect("golden charts fit the cap")
}

fn canon(text: &str) -> String {
    expr(text).render()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_loopchart"))
        .args(args)
        .env_remove("LOOPCHART_CAP")
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn edges(g: &Chart) -> BTreeSet<(String, String, String)> {
    g.transitions()
        .iter()
        .map(|t| {
            (
                g.id(t.src).to_string(),
                t.label.to_string(),
                g.id(t.dst).to_string(),
            )
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let g = chart(E);
    let e = canon(E);
    let e1 = canon("((1.a*).b*).(a*.b*)*");
    let e2 = canon("(1.b*).(a*.b*)*");
    ensure(g.len() == 3, format!("{} vertices", g.len()))?;
    ensure(
        (0..g.len()).all(|v| g.is_terminating(v)),
        "a vertex does not terminate",
    )?;
    let expected: BTreeSet<(String, String, String)> = [
        (&e, "a", &e1),
        (&e, "b", &e2),
        (&e1, "a", &e1),
        (&e1, "b", &e2),
        (&e2, "a", &e1),
        (&e2, "b", &e2),
    ]
    .into_iter()
    .map(|(s, l, d)| (s.clone(), l.to_string(), d.clone()))
    .collect();
    ensure(
        edges(&g) == expected,
        format!("transitions {:?}", edges(&g)),
    )?;
    let explored = match lee(&g, DEFAULT_BUDGET) {
        Ok(LeeOutcome::Failure { explored }) => explored,
        other => return Err(format!("lee: {other:?}")),
    };
    let (code, _) = cli(&["lee", "--expr", E]);
    ensure(code == Some(1), format!("`lee --expr` exit {code:?}"))?;
    Ok(format!(
        "3 vertices, 6 transitions, LEE fails after {explored} states"
    ))
}

fn criterion_2() -> Verdict {
    let g = chart(G0);
    let ids: BTreeSet<String> = g.vertices().iter().map(|v| v.id.clone()).collect();
    let g1 = "1.(c.a+a.(b+b.a))*.0";
    let g2 = "1.(b+b.a).(c.a+a.(b+b.a))*.0";
    let expected: BTreeSet<String> = [canon(G0), canon(g1), canon(g2)].into();
    ensure(ids == expected, format!("vertices {ids:?}"))?;
    ensure(
        lee(&g, DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?
            .is_success(),
        "lee finds no run",
    )?;
    let runs = successful_runs(&g, RUN_LIMIT, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let distinct: BTreeSet<String> = runs.iter().map(|r| r.to_json_string()).collect();
    ensure(
        distinct.len() >= MIN_G0_RUNS,
        format!("{} distinct runs", distinct.len()),
    )?;
    let mut witnesses = 0;
    for run in &runs {
        let h = run_to_labeling(&g, run).map_err(|e| e.to_string())?;
        if verify_llee(&h).passed() {
            witnesses += 1;
        }
    }
    ensure(witnesses >= 1, "no recorded run yields a witness")?;
    Ok(format!(
        "{} successful runs, {witnesses} recorded labelings are LLEE-witnesses",
        distinct.len()
    ))
}

fn criterion_3() -> Verdict {
    let g = chart(F);
    let body = "a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0)";
    let mut expected: BTreeSet<String> = [canon(F), canon(&format!("((1.0).({body})*).0"))].into();
    for i in 1..=3 {
        expected.insert(canon(&format!("((1.(1+b{i}.0)).({body})*).0")));
    }
    let ids: BTreeSet<String> = g.vertices().iter().map(|v| v.id.clone()).collect();
    ensure(ids == expected, format!("vertices {ids:?}"))?;
    match lee(&g, DEFAULT_BUDGET) {
        Ok(LeeOutcome::Failure { .. }) => {}
        other => return Err(format!("lee: {other:?}")),
    }
    let (q, _) = collapse(&g);
    ensure(q.len() == 5, format!("collapse has {} vertices", q.len()))?;
    Ok("5 vertices, LEE fails, collapse keeps 5 vertices".into())
}

fn criterion_4() -> Verdict {
    let one = onechart_of(&expr(E), CAP).map_err(|e| e.to_string())?;
    let ids: BTreeSet<&str> = one.vertices().iter().map(|v| v.id.as_str()).collect();
    let expected: BTreeSet<&str> = [
        "(a*.b*)*",
        "((1 * a*).b*) * (a*.b*)*",
        "(a*.b*) * (a*.b*)*",
        "b* * (a*.b*)*",
        "(1 * b*) * (a*.b*)*",
    ]
    .into();
    ensure(ids == expected, format!("1-chart of e: {ids:?}"))?;
    let one_f = onechart_of(&expr(F), CAP).map_err(|e| e.to_string())?;
    ensure(
        one_f.len() == 5,
        format!("1-chart of f: {} vertices", one_f.len()),
    )?;
    for text in [E, F] {
        let report = verify_projection(&expr(text), CAP).map_err(|e| e.to_string())?;
        ensure(report.passed(), format!("{text}: {:?}", report.failure))?;
        ensure(
            report.bijective && report.induced_vertices == report.chart_vertices,
            format!("{text}: projection not a bijection ({report:?})"),
        )?;
    }
    Ok("5 + 5 vertices, projection is an isomorphism for e and f".into())
}

fn criterion_5() -> Verdict {
    let exprs = [E, F, G0, "0", "1", "a", "a*", "(a+1).b*", "a*.0"];
    for text in exprs {
        for cmd in ["thm59", "thm514"] {
            let (code, _) = cli(&[cmd, text]);
            ensure(code == Some(0), format!("`{cmd} {text}` exit {code:?}"))?;
        }
    }
    let (code, _) = cli(&["thm514", E]);
    ensure(code == Some(0), "thm514 on e")?;
    let (code, out) = cli(&["parse", G0]);
    ensure(
        code == Some(0) && String::from_utf8_lossy(&out).trim() == canon(G0),
        "parse g0",
    )?;
    Ok(format!(
        "{} expressions x 2 end-to-end checks exit 0",
        exprs.len()
    ))
}

fn criterion_6() -> Verdict {
    let (q, _) = collapse(&chart(E));
    ensure(q.len() == 1, format!("{} vertices", q.len()))?;
    ensure(q.is_terminating(0), "not terminating")?;
    let labels: Vec<String> = q
        .transitions()
        .iter()
        .map(|t| t.label.to_string())
        .collect();
    ensure(labels == ["a", "b"], format!("labels {labels:?}"))?;
    ensure(
        q.transitions().iter().all(|t| t.src == 0 && t.dst == 0),
        "not self-loops",
    )?;
    Ok("1 terminating vertex with an a-loop and a b-loop".into())
}

fn criterion_7() -> Verdict {
    let mut failed: Vec<String> = Vec::new();
    let mut tally = MutationTally::default();
    for (i, e) in CORPUS.exprs().enumerate() {
        let p = verify_projection(&e, CAP).map_err(|err| format!("#{i}: {err}"))?;
        if !p.passed() {
            failed.push(format!("#{i} thm59"));
        }
        let w = loopchart::verify_witness(&e, CAP).map_err(|err| format!("#{i}: {err}"))?;
        if !w.passed() {
            failed.push(format!("#{i} thm514"));
        }
        let r = check_properties(&e, CAP, CORPUS.seed ^ i as u64)
            .map_err(|err| format!("#{i}: {err}"))?;
        failed.extend(r.failures.iter().map(|f| format!("#{i} {}", f.property)));
        tally.add(r.mutations);
    }
    ensure(failed.is_empty(), format!("failures {failed:?}"))?;
    let rate = tally.rejected as f64 / tally.tried as f64;
    ensure(
        rate >= MIN_MUTANT_REJECTION,
        format!("only {:.1}% of mutants rejected", 100.0 * rate),
    )?;
    Ok(format!(
        "{} expressions, {} properties all hold; {}/{} mutants rejected ({:.1}%), {} disagreements",
        CORPUS.count,
        PROPERTIES.len() + 2,
        tally.rejected,
        tally.tried,
        100.0 * rate,
        tally.disagreements
    ))
}

fn criterion_8() -> Verdict {
    let mut steps = 0;
    for (i, e) in CORPUS.exprs().enumerate() {
        let h = labeled_onechart_of(&e, CAP).map_err(|err| format!("#{i}: {err}"))?;
        let run = llee_elimination_strategy(&h).map_err(|err| format!("#{i} {e}: {err}"))?;
        let replayed =
            replay(&h.erase_markings(), &run.steps).map_err(|err| format!("#{i}: {err}"))?;
        ensure(
            replayed.residual.canonical() == run.residual.canonical(),
            format!("#{i}: run does not replay"),
        )?;
        ensure(
            !run.residual.restrict_reachable().has_infinite_path(),
            format!("#{i}: residual has a cycle"),
        )?;
        steps += run.steps.len();
    }
    Ok(format!(
        "{} valid runs ({steps} eliminations), all residuals acyclic",
        CORPUS.count
    ))
}

fn criterion_9() -> Verdict {
    let commands: &[&[&str]] = &[
        &["parse", G0],
        &["chart", E],
        &["chart", F, "--format", "dot"],
        &["onechart", E],
        &["labeled", F, "--format", "dot"],
        &["induce", E, "--gc"],
        &["lee", "--expr", E],
        &["lee", "--expr", G0],
        &["collapse", F],
        &["thm59", E],
        &["thm514", F],
        &["corpus", "--count", "25", "--check", "thm59,thm514,props"],
    ];
    for args in commands {
        let first = cli(args);
        let second = cli(args);
        ensure(first == second, format!("{args:?} differs between runs"))?;
        ensure(
            matches!(first.0, Some(0) | Some(1)) && !first.1.is_empty(),
            format!("{args:?} exit {:?}", first.0),
        )?;
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        commands.len()
    ))
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failures = 0;
    for (n, check) in criteria {
        match check() {
            Ok(msg) => println!("criterion {n}: PASS ({msg})"),
            Err(msg) => {
                failures += 1;
                println!("criterion {n}: FAIL ({msg})");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
