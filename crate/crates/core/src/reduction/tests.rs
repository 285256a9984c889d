use super::*;
use crate::cartan::{exterior_derivative, wedge};
use crate::polyalg::{ratio, Chart};
use crate::symmetry::{moment_from_potential, prolong_field};

fn var(c: &ChartRef, n: &str) -> Poly {
    Poly::var(c, n).unwrap()
}

fn dx(c: &ChartRef, n: &str) -> FormExpr {
    FormExpr::differential(c, c.index_of(n).unwrap())
}

fn e(c: &ChartRef, n: &str) -> FieldExpr {
    FieldExpr::coordinate(c, c.index_of(n).unwrap())
}

fn func(f: Poly) -> FormExpr {
    FormExpr::function(f)
}

fn same_span(ca: &ConstraintAction, fields: Vec<FieldExpr>) -> bool {
    let chart = ca.chart();
    let expected = SubmoduleBasis::new(
        chart,
        chart.dim(),
        fields.iter().map(|f| f.components().to_vec()).collect(),
    )
    .unwrap();
    ca.tangent_module().same_module(&expected).unwrap()
}

/// `(R², dx∧dy)` constrained to the coordinate cross, acted on by the
/// Euler field.
fn cross() -> (ChartRef, ConstraintAction) {
    let c = Chart::from_names("R2", &["x", "y"]).unwrap();
    let p = PlecticStructure::new(wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap()).unwrap();
    let (x, y) = (var(&c, "x"), var(&c, "y"));
    let euler = &e(&c, "x").mul_fn(&x) + &e(&c, "y").mul_fn(&y);
    let action = LieAlgebraAction::abelian(&c, vec![euler]).unwrap();
    let ideal = Ideal::new(&c, vec![&x * &y]).unwrap();
    let ca = ConstraintAction::new(p, ideal, action).unwrap();
    (c, ca)
}

/// `(R³, dx∧dy∧dz)` constrained to `z = 0`, acted on by `∂y`.
fn slab() -> (ChartRef, ConstraintAction) {
    let c = Chart::from_names("R3", &["x", "y", "z"]).unwrap();
    let omega = wedge(&wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap(), &dx(&c, "z")).unwrap();
    let p = PlecticStructure::new(omega).unwrap();
    let action = LieAlgebraAction::abelian(&c, vec![e(&c, "y")]).unwrap();
    let ideal = Ideal::new(&c, vec![var(&c, "z")]).unwrap();
    (c.clone(), ConstraintAction::new(p, ideal, action).unwrap())
}

struct Scalar {
    base: ChartRef,
    total: ChartRef,
    theta: FormExpr,
    p: PlecticStructure,
    action: LieAlgebraAction,
}

fn scalar() -> Scalar {
    let base = Chart::from_names("E", &["s1", "s2", "q"]).unwrap();
    let total = Chart::from_names("M", &["s1", "s2", "q", "p", "p1", "p2"]).unwrap();
    let m = &total;
    let t1 = wedge(&dx(m, "s1"), &dx(m, "s2"))
        .unwrap()
        .mul_fn(&var(m, "p"));
    let t2 = wedge(&dx(m, "s1"), &dx(m, "q"))
        .unwrap()
        .mul_fn(&var(m, "p1"));
    let t3 = wedge(&dx(m, "s2"), &dx(m, "q"))
        .unwrap()
        .mul_fn(&var(m, "p2"));
    let theta = &(&t1 + &t2) + &t3;
    let p = PlecticStructure::new(exterior_derivative(&theta)).unwrap();
    let q = var(m, "q");
    let v = &e(m, "q").mul_fn(&q.pow(2))
        - &(&e(m, "p1").mul_fn(&var(m, "p1")) + &e(m, "p2").mul_fn(&var(m, "p2")))
            .mul_fn(&(&q * &Poly::from_int(m, 2)));
    let action = LieAlgebraAction::abelian(m, vec![v]).unwrap();
    Scalar {
        base,
        total,
        theta,
        p,
        action,
    }
}

fn lift(s: &Scalar, w: FieldExpr) -> Observable {
    let horizontal = vec!["s1".to_string(), "s2".to_string()];
    let tilde = prolong_field(&s.base, &s.total, &s.theta, &w, Some(&horizontal)).unwrap();
    let form = interior_product(&tilde, &s.theta).unwrap();
    Observable::pair(&s.p, tilde, form).unwrap()
}

#[test]
fn cross_tangent_module() {
    let (c, ca) = cross();
    let x = var(&c, "x");
    let y = var(&c, "y");
    assert!(same_span(
        &ca,
        vec![e(&c, "x").mul_fn(&x), e(&c, "y").mul_fn(&y)]
    ));
    let t = ca.is_tangent(&e(&c, "x")).unwrap();
    assert!(!t.tangent);
    assert_eq!(t.witnesses, vec![(0, y.clone())]);
    assert!(ca.is_tangent(&e(&c, "x").mul_fn(&x)).unwrap().tangent);
}

#[test]
fn cross_reduced_basis() {
    let (c, ca) = cross();
    let basis = ca.reduced_basis_upto_degree(4).unwrap();
    let xy = &var(&c, "x") * &var(&c, "y");
    assert_eq!(basis.functions().unwrap(), vec![Poly::one(&c), xy]);
    let trivial = ca.reduced_basis_upto_degree(0).unwrap();
    assert_eq!(trivial.functions().unwrap(), vec![Poly::one(&c)]);
}

#[test]
fn cross_vanishing_observables() {
    let (c, ca) = cross();
    let p = ca.plectic().clone();
    let (x, y) = (var(&c, "x"), var(&c, "y"));
    let xy = Observable::hamiltonian(&p, func(&x * &y)).unwrap();
    let v = ca.in_vanishing_observable_ideal(&xy).unwrap();
    assert!(v.reducible);
    assert_eq!(v.in_vanishing_ideal, Some(false));
    let x2y = Observable::hamiltonian(&p, func(&(&x * &x) * &y)).unwrap();
    assert_eq!(
        ca.in_vanishing_observable_ideal(&x2y)
            .unwrap()
            .in_vanishing_ideal,
        Some(true)
    );
    let xobs = Observable::hamiltonian(&p, func(x.clone())).unwrap();
    assert!(!ca.is_reducible_observable(&xobs).unwrap().reducible);
    assert!(matches!(
        ca.in_vanishing_observable_ideal(&xobs),
        Err(Error::NotReducible(_))
    ));
    let sq = Observable::hamiltonian(&p, func((&x * &y).pow(2))).unwrap();
    assert!(ca.reduced_equal(&sq, &Observable::zero(&p, 0)).unwrap());
    assert!(!ca.reduced_equal(&xy, &Observable::zero(&p, 0)).unwrap());
}

#[test]
fn cross_symplectic_predicates() {
    let (c, ca) = cross();
    let (x, y) = (var(&c, "x"), var(&c, "y"));
    let zero = ca.symplectic_predicates(&Poly::zero(&c)).unwrap();
    assert!(zero.first_class && zero.casimir_along_constraints && zero.reducible && zero.vanishing);
    assert_eq!(zero.in_momentum_ideal, None);
    let xy = ca.symplectic_predicates(&(&x * &y)).unwrap();
    assert!(xy.first_class && xy.reducible && !xy.vanishing && !xy.casimir_along_constraints);
    assert_eq!(
        poisson_bracket(ca.plectic(), &(&x + &y), &(&x * &y)).unwrap(),
        &x - &y
    );
    let sample: Vec<Poly> = vec![
        Poly::one(&c),
        &x * &y,
        (&x * &y).pow(2),
        &(&x * &x) * &y,
        x.clone(),
    ];
    let report = ca.check_poisson_descent(&sample).unwrap();
    assert!(report.holds(), "{:?}", report.violations);
    assert_eq!(report.skipped, vec![4]);
    assert_eq!(report.pairs_checked, 10);
}

#[test]
fn slab_example() {
    let (c, ca) = slab();
    let z = var(&c, "z");
    let y = var(&c, "y");
    assert!(same_span(
        &ca,
        vec![e(&c, "z").mul_fn(&z), e(&c, "x"), e(&c, "y")]
    ));
    let alpha = dx(&c, "y").mul_fn(&(&y * &z));
    assert!(ca.is_reducible_form(&alpha).unwrap().reducible);
    let o = Observable::hamiltonian(ca.plectic(), alpha).unwrap();
    assert_eq!(o.field().unwrap(), &e(&c, "x").mul_fn(&y));
    let verdict = ca.is_reducible_observable(&o).unwrap();
    assert!(!verdict.reducible);
    assert!(verdict.certificates.iter().any(|s| s.contains("[v, xi0]")));
    assert!(!ca.is_reducible_field(o.field().unwrap()).unwrap().reducible);
}

#[test]
fn slab_form_membership() {
    let (c, ca) = slab();
    assert_eq!(
        ca.in_vanishing_form_ideal(&dx(&c, "z")).unwrap(),
        FormMembership::Member
    );
    assert!(ca
        .in_vanishing_form_ideal(&func(var(&c, "z")))
        .unwrap()
        .is_member());
    match ca.in_vanishing_form_ideal(&dx(&c, "x")).unwrap() {
        FormMembership::Refuted {
            residual, point, ..
        } => {
            assert!(!residual.evaluate(&point).unwrap().is_zero());
            assert!(var(&c, "z").evaluate(&point).unwrap().is_zero());
        }
        other => panic!("expected refutation, got {other:?}"),
    }
    let forms = vec![
        dx(&c, "z"),
        wedge(&dx(&c, "x"), &dx(&c, "z")).unwrap(),
        dx(&c, "x").mul_fn(&var(&c, "z")),
        dx(&c, "x"),
    ];
    let report = ca.check_vanishing_form_closure(&forms).unwrap();
    assert!(report.holds(), "{:?}", report.violations);
    assert_eq!(report.skipped, vec![3]);
}

#[test]
fn non_radical_contraction_is_not_certified() {
    let c = Chart::from_names("R2", &["x", "y"]).unwrap();
    let p = PlecticStructure::new(wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap()).unwrap();
    let action = LieAlgebraAction::abelian(&c, vec![]).unwrap();
    let ideal = Ideal::new(&c, vec![var(&c, "x").pow(2)]).unwrap();
    let ca = ConstraintAction::new(p, ideal, action).unwrap();
    assert!(matches!(
        ca.in_vanishing_form_ideal(&func(var(&c, "x"))).unwrap(),
        FormMembership::NotCertified { .. }
    ));
}

#[test]
fn rejects_non_tangent_action() {
    let c = Chart::from_names("R2", &["x", "y"]).unwrap();
    let p = PlecticStructure::new(wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap()).unwrap();
    let action = LieAlgebraAction::abelian(&c, vec![e(&c, "x")]).unwrap();
    let ideal = Ideal::new(&c, vec![&var(&c, "x") * &var(&c, "y")]).unwrap();
    assert!(matches!(
        ConstraintAction::new(p, ideal, action),
        Err(Error::VerificationFailed(_))
    ));
}

#[test]
fn full_space_without_symmetry() {
    let c = Chart::from_names("R2", &["x", "y"]).unwrap();
    let p = PlecticStructure::new(wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap()).unwrap();
    let action = LieAlgebraAction::abelian(&c, vec![]).unwrap();
    let ca = ConstraintAction::new(p, Ideal::zero(&c), action).unwrap();
    assert_eq!(ca.tangent_generators().len(), 2);
    let basis = ca.reduced_basis_upto_degree(2).unwrap();
    assert_eq!(basis.representatives.len(), 6);
    assert_eq!(basis.vanishing_dim, 0);
}

#[test]
fn scalar_field_level_set() {
    let s = scalar();
    let moment = moment_from_potential(&s.p, &s.action, &s.theta).unwrap();
    let ca =
        ConstraintAction::from_level_set(s.p.clone(), &moment, MonomialOrder::GrevLex).unwrap();
    let m = &s.total;
    let q2 = var(m, "q").pow(2);
    let expected = Ideal::new(m, vec![&q2 * &var(m, "p1"), &q2 * &var(m, "p2")]).unwrap();
    assert!(ca.ideal().same_ideal(&expected).unwrap());
    assert!(ca.momentum().is_some());
}

#[test]
fn scalar_field_with_product_constraints() {
    let s = scalar();
    let m = &s.total;
    let q = var(m, "q");
    let ideal = Ideal::new(m, vec![&q * &var(m, "p1"), &q * &var(m, "p2")]).unwrap();
    let ca = ConstraintAction::new(s.p.clone(), ideal, s.action.clone()).unwrap();
    let mut expected = vec![e(m, "q").mul_fn(&q), e(m, "s1"), e(m, "s2"), e(m, "p")];
    for i in ["p1", "p2"] {
        for j in ["p1", "p2"] {
            expected.push(e(m, j).mul_fn(&var(m, i)));
        }
    }
    assert!(same_span(&ca, expected));

    let b = &s.base;
    let bq = var(b, "q");
    for w in [e(b, "s1"), e(b, "q").mul_fn(&bq)] {
        let o = lift(&s, w);
        let v = ca.in_vanishing_observable_ideal(&o).unwrap();
        assert!(v.reducible);
        assert_eq!(v.in_vanishing_ideal, Some(false), "{}", o);
    }
    let o = lift(&s, e(b, "q").mul_fn(&bq.pow(2)));
    assert_eq!(
        ca.in_vanishing_observable_ideal(&o)
            .unwrap()
            .in_vanishing_ideal,
        Some(true)
    );
    let o = lift(&s, e(b, "q").mul_fn(&(&bq.pow(3) * &var(b, "s1"))));
    assert_eq!(
        ca.in_vanishing_observable_ideal(&o)
            .unwrap()
            .in_vanishing_ideal,
        Some(true)
    );
    let half = e(b, "q").mul_fn(&bq.pow(2).scale(&ratio(1, 2)));
    let o1 = lift(&s, half.clone());
    let o2 = lift(&s, &half + &e(b, "q").mul_fn(&bq));
    assert!(!ca.reduced_equal(&o1, &o2).unwrap());
}

#[test]
fn cross_closure() {
    let (c, ca) = cross();
    let p = ca.plectic().clone();
    let (x, y) = (var(&c, "x"), var(&c, "y"));
    let sample: Vec<Observable> = [Poly::one(&c), &x * &y, &(&x * &x) * &y, x.clone()]
        .into_iter()
        .map(|f| Observable::hamiltonian(&p, func(f)).unwrap())
        .collect();
    let report = ca.check_closure(&sample, 3).unwrap();
    assert!(report.holds(), "{report:?}");
    assert_eq!(report.skipped, vec![3]);
}

#[test]
fn cross_membership_examples() {
    let (c, ca) = cross();
    let (x, y) = (var(&c, "x"), var(&c, "y"));
    let p = ca.plectic().clone();
    let iota = &dx(&c, "y").mul_fn(&x) - &dx(&c, "x").mul_fn(&y);
    assert!(ca.in_vanishing_form_ideal(&iota).unwrap().is_member());
    assert!(!ca
        .in_vanishing_form_ideal(&dx(&c, "x"))
        .unwrap()
        .is_member());
    assert!(ca
        .in_vanishing_field_ideal(&e(&c, "x").mul_fn(&(&x * &y)))
        .unwrap());
    assert!(!ca.in_vanishing_field_ideal(&e(&c, "x").mul_fn(&x)).unwrap());
    assert!(ca.in_vanishing_field_ideal(&FieldExpr::zero(&c)).unwrap());
    let euler = &e(&c, "x").mul_fn(&x) + &e(&c, "y").mul_fn(&y);
    assert!(ca.in_fundamental_plus_vanishing(&euler).unwrap().is_some());
    let hyperbolic = &e(&c, "y").mul_fn(&y) - &e(&c, "x").mul_fn(&x);
    assert!(ca
        .in_fundamental_plus_vanishing(&hyperbolic)
        .unwrap()
        .is_none());
    assert!(ca.is_reducible_field(&euler).unwrap().reducible);

    let obs = |f: Poly| Observable::hamiltonian(&p, func(f)).unwrap();
    let one_xy = &Poly::one(&c) + &(&x * &y);
    let a = obs(one_xy.clone());
    let b = obs(&one_xy + &(&x * &y).pow(2));
    assert!(ca.reduced_equal(&a, &b).unwrap());
    assert!(ca.reduced_equal(&a, &a).unwrap());
    assert!(!ca
        .reduced_equal(&obs(Poly::one(&c)), &obs(&x * &y))
        .unwrap());
    let low = ca.reduced_basis_upto_degree(1).unwrap();
    assert_eq!(low.functions().unwrap(), vec![Poly::one(&c)]);
    let zero = Observable::zero(&p, 0);
    assert_eq!(
        ca.in_vanishing_observable_ideal(&zero)
            .unwrap()
            .in_vanishing_ideal,
        Some(true)
    );
}

#[test]
fn translation_breaks_reducibility_of_its_dual() {
    let c = Chart::from_names("R2", &["x", "y"]).unwrap();
    let p = PlecticStructure::new(wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap()).unwrap();
    let action = LieAlgebraAction::abelian(&c, vec![e(&c, "y")]).unwrap();
    let ideal = Ideal::new(&c, vec![var(&c, "x")]).unwrap();
    let ca = ConstraintAction::new(p, ideal, action).unwrap();
    assert!(!ca.is_reducible_form(&dx(&c, "y")).unwrap().reducible);
    assert!(ca.is_reducible_form(&dx(&c, "x")).unwrap().reducible);
}
