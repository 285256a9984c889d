use msr_core::MonomialOrder;
use msr_scenario::builtins::{builtin_source, multicotangent_source, BUILTINS};
use msr_scenario::model::analyze;
use msr_scenario::parser::parse;
use msr_scenario::run::{run_source, Report, Status};
use msr_scenario::ScenarioError;

fn sources() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = BUILTINS
        .iter()
        .map(|n| (n.to_string(), builtin_source(n).unwrap()))
        .collect();
    for (n, dim) in [(1, 2), (2, 4), (3, 3)] {
        out.push((
            format!("multicotangent n={n} dim={dim}"),
            multicotangent_source(n, dim).unwrap(),
        ));
    }
    out
}

fn run(src: &str) -> Report {
    run_source(src, None, MonomialOrder::GrevLex).unwrap()
}

fn without_timing(r: &Report) -> String {
    let mut r = r.clone();
    for v in &mut r.verdicts {
        v.elapsed_ms = 0;
    }
    serde_json::to_string(&r).unwrap()
}

#[test]
fn printed_fixtures_reparse_to_the_same_tree() {
    for (name, src) in sources() {
        let tree = parse(&src).unwrap();
        let printed = tree.to_string();
        assert_eq!(parse(&printed).unwrap(), tree, "{name}");
        assert_eq!(parse(&printed).unwrap().to_string(), printed, "{name}");
    }
}

#[test]
fn every_fixture_passes_all_queries() {
    for (name, src) in sources() {
        let report = run(&src);
        let bad: Vec<_> = report
            .verdicts
            .iter()
            .filter(|v| v.status != Status::Pass && v.status != Status::Info)
            .map(|v| format!("{}: {:?} {:?}", v.query, v.status, v.details))
            .collect();
        assert!(bad.is_empty(), "{name}: {bad:#?}");
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn runs_are_byte_identical_apart_from_timing() {
    for (name, src) in sources() {
        assert_eq!(
            without_timing(&run(&src)),
            without_timing(&run(&src)),
            "{name}"
        );
    }
}

#[test]
fn lex_order_gives_the_same_verdicts() {
    for name in ["cross2d", "symplectic_r2", "slab3d"] {
        let src = builtin_source(name).unwrap();
        let lex = run_source(&src, None, MonomialOrder::Lex).unwrap();
        let statuses: Vec<_> = lex.verdicts.iter().map(|v| v.status).collect();
        assert!(
            statuses.iter().all(|s| *s == Status::Pass),
            "{name}: {statuses:?}"
        );
    }
}

#[test]
fn cross_reduced_basis_is_one_and_xy() {
    let src = "chart R2(x, y) omega = d(x)^d(y) action (x*e(x) + y*e(y)) constraints (x*y) \
               reduced-basis degree=4";
    let report = run(src);
    let v = report.verdict(0);
    assert_eq!(v.status, Status::Info);
    assert_eq!(v.result["representatives"], serde_json::json!(["1", "x*y"]));
}

#[test]
fn failing_and_negated_queries() {
    let src = "chart R2(x, y) omega = d(x)^d(y) action (x*e(x) + y*e(y)) constraints (x*y) \
               check tangent e(x) check not tangent e(x) reduced-basis degree=2 expect (1)";
    let report = run(src);
    let statuses: Vec<_> = report.verdicts.iter().map(|v| v.status).collect();
    assert_eq!(statuses, vec![Status::Fail, Status::Pass, Status::Fail]);
    assert_eq!(report.exit_code(), 1);
    assert!(report.verdict(0).details[0].contains("v(g0) = y"));
    assert!(report.verdict(2).details[0].contains("unexpected representative x*y"));
}

#[test]
fn engine_errors_stay_inside_their_query() {
    let src = "chart R2(x, y) omega = d(x)^d(y) constraints (x*y) \
               check vanishing x check member x*y";
    let report = run(src);
    assert_eq!(report.verdict(0).status, Status::Error);
    assert!(report.verdict(0).details[0].contains("not reducible"));
    assert_eq!(report.verdict(1).status, Status::Pass);
    assert_eq!(report.exit_code(), 2);
}

#[test]
fn missing_declarations_are_reported_per_query() {
    let report = run("chart R2(x, y) omega = d(x)^d(y) check member x check moment");
    assert!(report.verdicts.iter().all(|v| v.status == Status::Error));
    assert!(report.verdict(0).details[0].contains("constraints"));
}

#[test]
fn empty_query_list_gives_no_verdicts() {
    let report = run("chart R2(x, y) omega = d(x)^d(y)");
    assert!(report.verdicts.is_empty());
    assert_eq!(report.exit_code(), 0);
}

fn semantic(src: &str) -> (String, u32, u32) {
    let tree = parse(src).unwrap();
    match analyze(&tree, MonomialOrder::GrevLex).unwrap_err() {
        ScenarioError::Semantic { span, message } => (message, span.line, span.column),
        other => panic!("expected a semantic error, got {other}"),
    }
}

#[test]
fn semantic_errors_carry_spans() {
    let (msg, line, col) = semantic("chart R2(x, y)\nomega n=2 = d(x)^d(y)");
    assert!(msg.contains("degree mismatch"), "{msg}");
    assert_eq!((line, col), (2, 13));
    let (msg, line, col) = semantic("chart R2(x, y)\nomega = d(x)^d(y)\npoly f = x + z");
    assert!(msg.contains("unknown name 'z'"), "{msg}");
    assert_eq!((line, col), (3, 14));
    let (msg, ..) = semantic("chart R2(x, y) form a = d(x) + x");
    assert!(msg.contains("degree mismatch"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) poly f = x/y");
    assert!(msg.contains("nonzero number"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) poly f = x^300");
    assert!(msg.contains("exponent"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) poly f = (x + y + 1)^256");
    assert!(msg.contains("too expensive"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) poly f = 7^256^256^256");
    assert!(msg.contains("too large"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) field v = e(z)");
    assert!(msg.contains("unknown variable 'z'"), "{msg}");
    let (msg, ..) = semantic("omega = d(x)");
    assert!(msg.contains("chart"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) poly x = 1");
    assert!(msg.contains("already in use"), "{msg}");
    let (msg, ..) = semantic("chart R2(x, y) observable o = x");
    assert!(msg.contains("structure form"), "{msg}");
}

#[test]
fn expression_semantics() {
    let src = "chart R2(x, y) omega = d(x)^d(y) \
               show x^2*(x - y)/2 \
               show d(x*y) \
               show iota(e(x), d(x)^d(y)) \
               show lie(x*e(x), y*e(y)) \
               show lie(x*e(x), x^2) \
               show lie(x*e(x), d(x)) \
               show field_of(ham(x*y)) \
               show bracket(x, y) \
               show d(x)^d(x)";
    let report = run(src);
    let values: Vec<String> = report
        .verdicts
        .iter()
        .map(|v| v.result["value"].as_str().unwrap_or("?").to_string())
        .collect();
    assert_eq!(report.verdicts[0].result["kind"], "function");
    assert_eq!(values[0], "1/2*x^3 - 1/2*x^2*y");
    assert_eq!(values[1], "y*d(x) + x*d(y)");
    assert_eq!(values[2], "d(y)");
    assert_eq!(values[3], "0");
    assert_eq!(values[4], "2*x^2");
    assert_eq!(values[5], "d(x)");
    assert_eq!(values[6], "-x*e(x) + y*e(y)");
    assert_eq!(report.verdicts[8].result["kind"], "form");
}
