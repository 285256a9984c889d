//! Query evaluation and verdict reports.

use std::time::Instant;

use msr_core::cartan::FormExpr;
use msr_core::groebner::SubmoduleBasis;
use msr_core::plectic::{check_higher_jacobi, Nondegeneracy, Observable};
use msr_core::reduction::{ConstraintAction, FormMembership, ReductionVerdict};
use msr_core::symmetry::{check_covariant_moment_map, level_set_ideal, verify_action};
use msr_core::{MonomialOrder, Poly};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::ast::{BasisSource, Expr, Query, QueryKind};
use crate::error::{Result, ScenarioError, Span};
use crate::model::{analyze, Model, Value};
use crate::parser::parse;

/// Version of the verdict record layout.
pub const SCHEMA: u32 = 1;
/// Random combinations per arity when a `jacobi` query does not say.
pub const DEFAULT_RANDOM: u32 = 20;
const JACOBI_SEED: u64 = 0x1ac0_b100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub index: usize,
    pub line: u32,
    pub query: String,
    pub kind: String,
    pub status: Status,
    pub result: Json,
    pub details: Vec<String>,
    pub certificates: Vec<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    /// 0 when every query passed or was informational, 1 when a query failed,
    /// 2 when a query could not be evaluated.
    pub fn exit_code(&self) -> i32 {
        let has = |s: Status| self.verdicts.iter().any(|v| v.status == s);
        if has(Status::Error) {
            2
        } else if has(Status::Fail) {
            1
        } else {
            0
        }
    }

    pub fn verdict(&self, index: usize) -> &Verdict {
        &self.verdicts[index]
    }

    /// One line per query for terminal output.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.scenario {
            out.push_str(&format!("scenario {name}\n"));
        }
        for v in &self.verdicts {
            let status = match v.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
                Status::Info => "INFO",
            };
            out.push_str(&format!("[{status}] line {}: {}\n", v.line, v.query));
            if matches!(v.status, Status::Info | Status::Error) && !v.result.is_null() {
                out.push_str(&format!("    result: {}\n", v.result));
            }
            for d in &v.details {
                out.push_str(&format!("    {d}\n"));
            }
            for c in &v.certificates {
                out.push_str(&format!("    certificate: {c}\n"));
            }
        }
        let count = |s: Status| self.verdicts.iter().filter(|v| v.status == s).count();
        out.push_str(&format!(
            "{} passed, {} failed, {} errors, {} informational\n",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Error),
            count(Status::Info)
        ));
        out
    }
}

/// Parses, analyzes and runs a scenario source.
pub fn run_source(src: &str, name: Option<&str>, order: MonomialOrder) -> Result<Report> {
    let scenario = parse(src)?;
    let model = analyze(&scenario, order)?;
    Ok(run_model(&model, name))
}

/// Runs every query of the model in parallel; verdicts keep source order.
pub fn run_model(model: &Model, name: Option<&str>) -> Report {
    let verdicts = model
        .queries()
        .par_iter()
        .enumerate()
        .map(|(index, (query, span))| run_query(model, index, query, *span))
        .collect();
    Report {
        schema: SCHEMA,
        scenario: name.map(str::to_string),
        verdicts,
    }
}

/// Result of one query before the expectation is applied. `holds` is `None`
/// for informational queries.
struct Outcome {
    holds: Option<bool>,
    result: Json,
    details: Vec<String>,
    certificates: Vec<String>,
}

impl Outcome {
    fn check(holds: bool, result: Json) -> Outcome {
        Outcome {
            holds: Some(holds),
            result,
            details: Vec::new(),
            certificates: Vec::new(),
        }
    }

    fn info(result: Json) -> Outcome {
        Outcome {
            holds: None,
            result,
            details: Vec::new(),
            certificates: Vec::new(),
        }
    }

    fn details(mut self, details: Vec<String>) -> Outcome {
        self.details = details;
        self
    }

    fn certificates(mut self, certificates: Vec<String>) -> Outcome {
        self.certificates = certificates;
        self
    }
}

/// A query-level failure to evaluate, reported as an `error` verdict.
struct QueryError(String);

impl From<ScenarioError> for QueryError {
    fn from(e: ScenarioError) -> Self {
        QueryError(e.to_string())
    }
}

impl From<msr_core::Error> for QueryError {
    fn from(e: msr_core::Error) -> Self {
        QueryError(e.to_string())
    }
}

type QResult<T> = std::result::Result<T, QueryError>;

fn run_query(model: &Model, index: usize, query: &Query, span: Span) -> Verdict {
    let start = Instant::now();
    let outcome = evaluate(model, index, query, span);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let (status, result, details, certificates) = match outcome {
        Ok(o) => {
            let status = match o.holds {
                None => Status::Info,
                Some(h) if h == query.expect => Status::Pass,
                Some(_) => Status::Fail,
            };
            (status, o.result, o.details, o.certificates)
        }
        Err(QueryError(message)) => (Status::Error, Json::Null, vec![message], Vec::new()),
    };
    Verdict {
        index,
        line: span.line,
        query: query.to_string(),
        kind: query.kind.name().to_string(),
        status,
        result,
        details,
        certificates,
        elapsed_ms,
    }
}

fn reduction(model: &Model) -> QResult<std::sync::Arc<ConstraintAction>> {
    model
        .reduction()
        .map_err(|e| QueryError(format!("reduction data unavailable: {e}")))
}

fn verdict_outcome(v: ReductionVerdict, vanishing: bool) -> Outcome {
    let holds = if vanishing {
        v.in_vanishing_ideal.unwrap_or(false)
    } else {
        v.reducible
    };
    Outcome::check(
        holds,
        json!({
            "subject": v.subject,
            "reducible": v.reducible,
            "vanishing": v.in_vanishing_ideal,
        }),
    )
    .certificates(v.certificates)
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(T::to_string).collect()
}

fn evaluate(model: &Model, index: usize, query: &Query, span: Span) -> QResult<Outcome> {
    Ok(match &query.kind {
        QueryKind::Nondegenerate => {
            let p = model.plectic_at(span)?;
            match p.nondegeneracy() {
                Nondegeneracy::Yes {
                    columns,
                    determinant,
                } => Outcome::check(true, json!("yes")).certificates(vec![format!(
                    "maximal minor on columns {columns:?} has constant determinant {determinant}"
                )]),
                Nondegeneracy::No { point, kernel } => Outcome::check(false, json!("no"))
                    .certificates(vec![format!(
                        "kernel vector {} at point {}",
                        join(kernel),
                        join(point)
                    )]),
                Nondegeneracy::Unknown(why) => {
                    return Err(QueryError(format!("nondegeneracy undecided: {why}")))
                }
            }
        }
        QueryKind::Action => {
            let a = model
                .action()
                .ok_or_else(|| QueryError("no action declared".into()))?;
            let r = verify_action(a)?;
            let mut details = Vec::new();
            for b in &r.bracket_violations {
                details.push(format!(
                    "[xi{}, xi{}] differs from the declared bracket by {}",
                    b.i, b.j, b.residual
                ));
            }
            for (i, j) in &r.antisymmetry_violations {
                details.push(format!(
                    "structure constants of ({i}, {j}) are not antisymmetric"
                ));
            }
            for (i, j, k) in &r.jacobi_violations {
                details.push(format!(
                    "structure constants fail the Jacobi identity on ({i}, {j}, {k})"
                ));
            }
            Outcome::check(r.passes(), json!({ "dimension": a.dim() })).details(details)
        }
        QueryKind::Moment => {
            let p = model.plectic_at(span)?;
            let m = model
                .moment()
                .ok_or_else(|| QueryError("no moment map declared".into()))?;
            let r = check_covariant_moment_map(p, m)?;
            let mut details = Vec::new();
            for (i, res) in &r.derivative_violations {
                details.push(format!("d(mu{i}) + i_xi{i} omega = {res}"));
            }
            for (i, j, res) in &r.equivariance_violations {
                details.push(format!(
                    "L_xi{i} mu{j} differs from the declared combination by {res}"
                ));
            }
            Outcome::check(
                r.passes(),
                json!({
                    "components": strings(&m.components),
                    "derivative": r.derivative_holds(),
                    "equivariance": r.equivariance_holds(),
                }),
            )
            .details(details)
        }
        QueryKind::Tangent(e) => {
            let v = model.eval_field(e)?;
            let t = reduction(model)?.is_tangent(&v)?;
            let details = t
                .witnesses
                .iter()
                .map(|(j, image)| format!("v(g{j}) = {image} is not in the constraint ideal"))
                .collect();
            Outcome::check(t.tangent, json!(v.to_string())).details(details)
        }
        QueryKind::TangentModule(es) => {
            let ca = reduction(model)?;
            let chart = model.chart();
            let fields = es
                .iter()
                .map(|e| model.eval_field(e))
                .collect::<Result<Vec<_>>>()?;
            let vectors = fields.iter().map(|f| f.components().to_vec()).collect();
            let expected = SubmoduleBasis::new(chart, chart.dim(), vectors)?
                .with_order(ca.order(), Default::default());
            let computed = ca.tangent_module();
            let mut details = Vec::new();
            for (g, f) in computed.generators().iter().zip(ca.tangent_generators()) {
                if !expected.contains(g)? {
                    details.push(format!("computed generator {f} is not in the given module"));
                }
            }
            for f in &fields {
                if !computed.contains(f.components())? {
                    details.push(format!("{f} is not tangent"));
                }
            }
            Outcome::check(
                details.is_empty(),
                json!({ "generators": strings(ca.tangent_generators()) }),
            )
            .details(details)
        }
        QueryKind::VanishingField(e) => {
            let v = model.eval_field(e)?;
            let holds = reduction(model)?.in_vanishing_field_ideal(&v)?;
            Outcome::check(holds, json!(v.to_string()))
        }
        QueryKind::VanishingForm(e) => {
            let a = model.eval_form(e)?;
            form_membership(&*reduction(model)?, &a)?
        }
        QueryKind::Fundamental(e) => {
            let v = model.eval_field(e)?;
            let ca = reduction(model)?;
            match ca.in_fundamental_plus_vanishing(&v)? {
                Some(cofactors) => {
                    let certificate = format!("cofactors ({})", join(&cofactors));
                    Outcome::check(true, json!(v.to_string())).certificates(vec![certificate])
                }
                None => Outcome::check(false, json!(v.to_string())),
            }
        }
        QueryKind::Reducible(e) => {
            let ca = reduction(model)?;
            let verdict = match model.eval(e)? {
                Value::Field(v) => ca.is_reducible_field(&v)?,
                Value::Form(a) if a.degree() > 0 => ca.is_reducible_form(&a)?,
                other => {
                    let o = model.to_observable(other, e.span)?;
                    ca.is_reducible_observable(&o)?
                }
            };
            verdict_outcome(verdict, false)
        }
        QueryKind::Vanishing(e) => {
            let ca = reduction(model)?;
            match model.eval(e)? {
                Value::Field(v) => {
                    let holds = ca.in_vanishing_field_ideal(&v)?;
                    Outcome::check(holds, json!(v.to_string()))
                }
                Value::Form(a) if a.degree() > 0 => form_membership(&ca, &a)?,
                other => {
                    let o = model.to_observable(other, e.span)?;
                    verdict_outcome(ca.in_vanishing_observable_ideal(&o)?, true)
                }
            }
        }
        QueryKind::Hamiltonian(e) => {
            let p = model.plectic_at(span)?;
            let a = model.eval_form(e)?;
            match p.hamiltonian_field_for(&a) {
                Ok(v) => Outcome::check(true, json!({ "field": v.to_string() }))
                    .certificates(vec![format!("i_v omega = -d({a}) for v = {v}")]),
                Err(msr_core::Error::NotHamiltonian(why)) => {
                    Outcome::check(false, Json::Null).details(vec![why])
                }
                Err(e) => return Err(e.into()),
            }
        }
        QueryKind::Predicates(e) => {
            let f = model.eval_poly(e)?;
            let s = reduction(model)?.symplectic_predicates(&f)?;
            Outcome::info(json!({
                "function": f.to_string(),
                "first_class": s.first_class,
                "in_momentum_ideal": s.in_momentum_ideal,
                "casimir_along_constraints": s.casimir_along_constraints,
                "reducible": s.reducible,
                "vanishing": s.vanishing,
            }))
        }
        QueryKind::PoissonDescent(es) => {
            let fs = es
                .iter()
                .map(|e| model.eval_poly(e))
                .collect::<Result<Vec<_>>>()?;
            let r = reduction(model)?.check_poisson_descent(&fs)?;
            Outcome::check(
                r.holds(),
                json!({ "pairs_checked": r.pairs_checked, "skipped": r.skipped }),
            )
            .details(r.violations)
        }
        QueryKind::Closure { arity } => {
            let ca = reduction(model)?;
            let sample = model.sample();
            let r = ca.check_closure(sample, *arity as usize)?;
            let forms: Vec<FormExpr> = sample
                .iter()
                .filter_map(|o| o.form_part().cloned())
                .collect();
            let f = ca.check_vanishing_form_closure(&forms)?;
            let mut details = r.reducible_violations.clone();
            details.extend(r.vanishing_violations.iter().cloned());
            details.extend(r.tangent_violations.iter().cloned());
            details.extend(f.violations.iter().cloned());
            Outcome::check(
                r.holds() && f.holds(),
                json!({
                    "tuples_checked": r.tuples_checked,
                    "skipped": r.skipped,
                    "vanishing_forms_checked": f.forms_checked,
                }),
            )
            .details(details)
        }
        QueryKind::LevelSet => {
            let m = model
                .moment()
                .ok_or_else(|| QueryError("no moment map declared".into()))?;
            let level = level_set_ideal(m)?;
            let ca = reduction(model)?;
            let holds = ca.ideal().same_ideal(&level)?;
            Outcome::check(
                holds,
                json!({ "level_set_ideal": strings(level.generators()) }),
            )
        }
        QueryKind::Equal(a, b) => {
            let x = model.eval(a)?;
            let y = model.eval(b)?;
            let holds = values_equal(model, x.clone(), y.clone(), span);
            let details = if holds {
                Vec::new()
            } else {
                vec![format!("left = {x}"), format!("right = {y}")]
            };
            Outcome::check(holds, Json::Null).details(details)
        }
        QueryKind::Member(e) => {
            let f = model.eval_poly(e)?;
            let ca = reduction(model)?;
            match ca.ideal().membership_witness(&f)? {
                Some(cofactors) => Outcome::check(true, json!(f.to_string()))
                    .certificates(vec![format!("cofactors ({})", join(&cofactors))]),
                None => Outcome::check(false, json!(f.to_string()))
                    .details(vec![format!("normal form {}", ca.ideal().normal_form(&f)?)]),
            }
        }
        QueryKind::Reduce(a, b) => {
            let (x, y) = observable_pair(model, a, b)?;
            let ca = reduction(model)?;
            let holds = ca.reduced_equal(&x, &y)?;
            Outcome::check(holds, Json::Null)
        }
        QueryKind::ReducedBasis { source, expected } => {
            let ca = reduction(model)?;
            let basis = match source {
                BasisSource::Degree(d) => ca.reduced_basis_upto_degree(*d)?,
                BasisSource::Ansatz(es) => {
                    let cands = es
                        .iter()
                        .map(|e| model.eval_observable(e))
                        .collect::<Result<Vec<_>>>()?;
                    ca.reduced_basis_from_candidates(&cands)?
                }
            };
            let reps: Vec<String> = basis.representatives.iter().map(label).collect();
            let result = json!({
                "representatives": reps,
                "candidates": basis.candidates,
                "reducible_dim": basis.reducible_dim,
                "vanishing_dim": basis.vanishing_dim,
            });
            match expected {
                None => Outcome::info(result),
                Some(es) => {
                    let want = es
                        .iter()
                        .map(|e| model.eval_observable(e))
                        .collect::<Result<Vec<_>>>()?;
                    let (holds, details) = same_set(&basis.representatives, &want);
                    Outcome::check(holds, result).details(details)
                }
            }
        }
        QueryKind::Jacobi { arity, random } => {
            let p = model.plectic_at(span)?;
            let r = check_higher_jacobi(
                p,
                model.sample(),
                *arity as usize,
                random.unwrap_or(DEFAULT_RANDOM) as usize,
                JACOBI_SEED + index as u64,
            )?;
            let details = r
                .violations
                .iter()
                .take(5)
                .map(|v| match &v.indices {
                    Some(ix) => format!("arity {} on sample {ix:?}: {}", v.arity, v.residual),
                    None => format!("arity {} on a random combination: {}", v.arity, v.residual),
                })
                .collect();
            Outcome::check(
                r.holds(),
                json!({
                    "identities_checked": r.identities_checked,
                    "random_combinations": r.random_combinations,
                    "violations": r.violations.len(),
                }),
            )
            .details(details)
        }
        QueryKind::Show(e) => {
            let v = model.eval(e)?;
            Outcome::info(json!({ "kind": v.kind(), "value": v.to_string() }))
        }
    })
}

fn form_membership(ca: &ConstraintAction, a: &FormExpr) -> QResult<Outcome> {
    Ok(match ca.in_vanishing_form_ideal(a)? {
        FormMembership::Member => Outcome::check(true, json!(a.to_string())),
        FormMembership::Refuted {
            tuple,
            residual,
            point,
        } => Outcome::check(false, json!(a.to_string())).certificates(vec![format!(
            "contraction with tangent generators {tuple:?} is {residual}, nonzero at ({})",
            join(&point)
        )]),
        FormMembership::NotCertified { tuple, residual } => {
            return Err(QueryError(format!(
                "undecided: contraction with tangent generators {tuple:?} is {residual}, \
                 outside the constraint ideal but zero on every sample point"
            )))
        }
    })
}

/// Both sides as observables; a side that is not already an observable is
/// read in the degree of the other side.
fn observable_pair(model: &Model, a: &Expr, b: &Expr) -> QResult<(Observable, Observable)> {
    let x = model.eval(a)?;
    let y = model.eval(b)?;
    Ok(match (x, y) {
        (Value::Obs(x), y) => {
            let y = model.observable_of_degree(y, x.degree(), b.span)?;
            (x, y)
        }
        (x, Value::Obs(y)) => {
            let x = model.observable_of_degree(x, y.degree(), a.span)?;
            (x, y)
        }
        (x, y) => (
            model.to_observable(x, a.span)?,
            model.to_observable(y, b.span)?,
        ),
    })
}

/// Degree-0 observables are named by their form, which determines the field.
fn label(o: &Observable) -> String {
    match o {
        Observable::Pair { form, .. } => form.to_string(),
        Observable::Form { degree, form } => format!("{form} (degree {degree})"),
        Observable::Zero { degree } => format!("0 (degree {degree})"),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    strings(items).join(", ")
}

/// Structural equality after promoting numbers and functions to forms.
fn values_equal(model: &Model, a: Value, b: Value, span: Span) -> bool {
    let as_form = |v: Value| match v {
        Value::Num(n) => Some(FormExpr::function(Poly::constant(model.chart(), n))),
        Value::Poly(p) => Some(FormExpr::function(p)),
        Value::Form(f) => Some(f),
        _ => None,
    };
    match (a, b) {
        (Value::Field(x), Value::Field(y)) => x == y,
        (Value::Obs(x), Value::Obs(y)) => x == y,
        (Value::Obs(x), other) | (other, Value::Obs(x)) => model
            .observable_of_degree(other, x.degree(), span)
            .is_ok_and(|y| x == y),
        (Value::Field(x), Value::Num(n)) | (Value::Num(n), Value::Field(x)) => {
            x.is_zero() && n == msr_core::rat(0)
        }
        (x, y) => match (as_form(x), as_form(y)) {
            (Some(x), Some(y)) => x == y || (x.is_zero() && y.is_zero()),
            _ => false,
        },
    }
}

/// Order-insensitive comparison of two observable lists.
fn same_set(got: &[Observable], want: &[Observable]) -> (bool, Vec<String>) {
    let mut details = Vec::new();
    for g in got {
        if !want.contains(g) {
            details.push(format!("unexpected representative {}", label(g)));
        }
    }
    for w in want {
        if !got.contains(w) {
            details.push(format!("missing representative {}", label(w)));
        }
    }
    if got.len() != want.len() && details.is_empty() {
        details.push(format!(
            "expected {} representatives, got {}",
            want.len(),
            got.len()
        ));
    }
    (details.is_empty(), details)
}
