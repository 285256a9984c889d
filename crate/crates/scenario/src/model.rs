//! Semantic analysis: resolves names, evaluates declarations into engine
//! objects and collects the queries of a scenario.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use msr_core::cartan::{
    exterior_derivative, interior_product, lie_bracket, lie_derivative, wedge, FieldExpr, FormExpr,
};
use msr_core::groebner::Ideal;
use msr_core::plectic::{multibracket, Observable, PlecticStructure};
use msr_core::reduction::ConstraintAction;
use msr_core::symmetry::{
    level_set_ideal, moment_from_potential, prolong_field, LieAlgebraAction, MomentMap,
};
use msr_core::{Chart, ChartRef, MonomialOrder, Poly, Rational};

use crate::ast::*;
use crate::error::{Result, ScenarioError, Span};

/// Largest exponent accepted in `p^k`.
pub const MAX_EXPONENT: u32 = 256;
/// Largest number of terms an intermediate value may have.
pub const MAX_TERMS: usize = 20_000;
/// Largest total size, in bits, of the numbers in an intermediate value.
pub const MAX_COEFFICIENT_BITS: u64 = 1 << 20;
/// Largest number of term products a single multiplication may perform.
const MAX_PRODUCT_WORK: usize = 300_000;

/// A typed value of the expression language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Num(Rational),
    Poly(Poly),
    Form(FormExpr),
    Field(FieldExpr),
    Obs(Observable),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Poly(_) => "function",
            Value::Form(_) => "form",
            Value::Field(_) => "vector field",
            Value::Obs(_) => "observable",
        }
    }

    fn bits(&self) -> u64 {
        let form = |f: &FormExpr| f.terms().map(|(_, c)| poly_bits(c)).sum::<u64>();
        let field = |v: &FieldExpr| v.components().iter().map(poly_bits).sum::<u64>();
        match self {
            Value::Num(n) => rational_bits(n),
            Value::Poly(p) => poly_bits(p),
            Value::Form(f) => form(f),
            Value::Field(v) => field(v),
            Value::Obs(o) => o.field().map_or(0, field) + o.form_part().map_or(0, form),
        }
    }

    fn size(&self) -> usize {
        match self {
            Value::Num(_) => 1,
            Value::Poly(p) => p.num_terms(),
            Value::Form(f) => f.terms().map(|(_, c)| c.num_terms()).sum(),
            Value::Field(v) => v.components().iter().map(Poly::num_terms).sum(),
            Value::Obs(o) => {
                o.field()
                    .map_or(0, |v| v.components().iter().map(Poly::num_terms).sum())
                    + o.form_part()
                        .map_or(0, |f| f.terms().map(|(_, c)| c.num_terms()).sum())
            }
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{n}"),
            Value::Poly(p) => write!(f, "{p}"),
            Value::Form(a) => write!(f, "{a}"),
            Value::Field(v) => write!(f, "{v}"),
            Value::Obs(o) => write!(f, "{o}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Fibration {
    base: ChartRef,
}

#[derive(Debug, Clone)]
enum Constraints {
    Explicit(Ideal),
    Level,
    None,
}

/// An analyzed scenario: every declaration evaluated, queries pending.
#[derive(Debug)]
pub struct Model {
    chart: ChartRef,
    order: MonomialOrder,
    fibration: Option<Fibration>,
    horizontal: Vec<String>,
    names: BTreeMap<String, Value>,
    plectic: Option<PlecticStructure>,
    potential: Option<FormExpr>,
    action: Option<LieAlgebraAction>,
    moment: Option<MomentMap>,
    constraints: Option<Constraints>,
    reduction: OnceLock<std::result::Result<Arc<ConstraintAction>, String>>,
    sample: Vec<Observable>,
    queries: Vec<(Query, Span)>,
}

fn sem(span: Span, message: impl Into<String>) -> ScenarioError {
    ScenarioError::semantic(span, message)
}

fn engine(span: Span) -> impl Fn(msr_core::Error) -> ScenarioError {
    move |e| sem(span, e.to_string())
}

const FUNCTIONS: &[&str] = &[
    "d", "e", "iota", "lie", "bracket", "ham", "pair", "obs", "field_of", "form_of", "prolong",
    "lift", "mu",
];

/// Builds the model of a parsed scenario.
pub fn analyze(s: &Scenario, order: MonomialOrder) -> Result<Model> {
    let mut statements = s.statements.iter();
    let Some(first) = statements.next() else {
        return Err(sem(
            Span::default(),
            "empty scenario: expected a chart declaration",
        ));
    };
    let StatementKind::Chart { name, variables } = &first.kind else {
        return Err(sem(
            first.span,
            "the first statement must declare the chart",
        ));
    };
    let chart = Chart::new(
        name.name.clone(),
        variables.iter().map(|v| v.name.clone()).collect(),
    )
    .map_err(engine(first.span))?;
    let mut m = Model {
        chart,
        order,
        fibration: None,
        horizontal: Vec::new(),
        names: BTreeMap::new(),
        plectic: None,
        potential: None,
        action: None,
        moment: None,
        constraints: None,
        reduction: OnceLock::new(),
        sample: Vec::new(),
        queries: Vec::new(),
    };
    for st in statements {
        m.declare(st)?;
    }
    Ok(m)
}

impl Model {
    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn queries(&self) -> &[(Query, Span)] {
        &self.queries
    }

    pub fn sample(&self) -> &[Observable] {
        &self.sample
    }

    pub fn action(&self) -> Option<&LieAlgebraAction> {
        self.action.as_ref()
    }

    pub fn moment(&self) -> Option<&MomentMap> {
        self.moment.as_ref()
    }

    pub fn potential(&self) -> Option<&FormExpr> {
        self.potential.as_ref()
    }

    pub fn plectic_at(&self, span: Span) -> Result<&PlecticStructure> {
        self.plectic.as_ref().ok_or_else(|| {
            sem(
                span,
                "no structure form declared: add an 'omega' or 'potential' statement",
            )
        })
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.names.get(name)
    }

    /// The reduction data, built on first use.
    pub fn reduction(&self) -> std::result::Result<Arc<ConstraintAction>, String> {
        self.reduction
            .get_or_init(|| self.build_reduction().map(Arc::new))
            .clone()
    }

    fn build_reduction(&self) -> std::result::Result<ConstraintAction, String> {
        let p = self.plectic.clone().ok_or("no structure form declared")?;
        let constraints = self
            .constraints
            .as_ref()
            .ok_or("no constraints declared: add a 'constraints' statement")?;
        let action = match &self.action {
            Some(a) => a.clone(),
            None => {
                LieAlgebraAction::abelian(&self.chart, Vec::new()).map_err(|e| e.to_string())?
            }
        };
        let ca = match constraints {
            Constraints::Level => {
                let moment = self
                    .moment
                    .as_ref()
                    .ok_or("'constraints level' needs a moment map")?;
                return ConstraintAction::from_level_set(p, moment, self.order)
                    .map_err(|e| e.to_string());
            }
            Constraints::Explicit(ideal) => {
                ConstraintAction::with_order(p, ideal.clone(), action, self.order)
            }
            Constraints::None => {
                ConstraintAction::with_order(p, Ideal::zero(&self.chart), action, self.order)
            }
        }
        .map_err(|e| e.to_string())?;
        match &self.moment {
            Some(moment) => {
                let ideal = level_set_ideal(moment).map_err(|e| e.to_string())?;
                ca.with_momentum(ideal).map_err(|e| e.to_string())
            }
            None => Ok(ca),
        }
    }

    fn declare(&mut self, st: &Statement) -> Result<()> {
        let span = st.span;
        match &st.kind {
            StatementKind::Chart { .. } => return Err(sem(span, "the chart is already declared")),
            StatementKind::Fibration { base, horizontal } => {
                if self.fibration.is_some() {
                    return Err(sem(span, "the fibration is already declared"));
                }
                for v in base.iter().chain(horizontal) {
                    if self.chart.index_of(&v.name).is_none() {
                        return Err(sem(v.span, format!("unknown variable '{}'", v.name)));
                    }
                }
                for h in horizontal {
                    if !base.iter().any(|b| b.name == h.name) {
                        return Err(sem(
                            h.span,
                            format!("horizontal variable '{}' is not a base variable", h.name),
                        ));
                    }
                }
                let base_chart = Chart::new(
                    format!("{}_base", self.chart.name()),
                    base.iter().map(|b| b.name.clone()).collect(),
                )
                .map_err(engine(span))?;
                self.fibration = Some(Fibration { base: base_chart });
                self.horizontal = horizontal.iter().map(|h| h.name.clone()).collect();
            }
            StatementKind::Define { kind, name, value } => {
                if self.names.contains_key(&name.name)
                    || self.chart.index_of(&name.name).is_some()
                    || ["omega", "theta"].contains(&name.name.as_str())
                {
                    return Err(sem(
                        name.span,
                        format!("name '{}' is already in use", name.name),
                    ));
                }
                let v = self.eval(value)?;
                let v = self.coerce(v, *kind, value.span)?;
                self.names.insert(name.name.clone(), v);
            }
            StatementKind::Omega { n, value } => {
                self.require_no_structure(span)?;
                let omega = self.eval_form(value)?;
                if let Some(n) = n {
                    if omega.degree() != *n as usize + 1 {
                        return Err(sem(
                            value.span,
                            format!(
                                "degree mismatch: n={n} needs a {}-form, got a {}-form",
                                n + 1,
                                omega.degree()
                            ),
                        ));
                    }
                }
                self.plectic = Some(PlecticStructure::new(omega).map_err(engine(value.span))?);
            }
            StatementKind::Potential { n, value } => {
                self.require_no_structure(span)?;
                let theta = self.eval_form(value)?;
                if let Some(n) = n {
                    if theta.degree() != *n as usize {
                        return Err(sem(
                            value.span,
                            format!(
                                "degree mismatch: n={n} needs a potential of degree {n}, got {}",
                                theta.degree()
                            ),
                        ));
                    }
                }
                let omega = exterior_derivative(&theta);
                self.plectic = Some(PlecticStructure::new(omega).map_err(engine(value.span))?);
                self.potential = Some(theta);
            }
            StatementKind::Action(fields) => {
                if self.action.is_some() {
                    return Err(sem(span, "the action is already declared"));
                }
                let fields = fields
                    .iter()
                    .map(|f| self.eval_field(f))
                    .collect::<Result<Vec<_>>>()?;
                self.action =
                    Some(LieAlgebraAction::abelian(&self.chart, fields).map_err(engine(span))?);
            }
            StatementKind::StructConst { i, j, k, value } => {
                let c = self.eval_number(value)?;
                let a = self
                    .action
                    .as_mut()
                    .ok_or_else(|| sem(span, "structure constants need a preceding 'action'"))?;
                let dim = a.dim();
                if [*i, *j, *k].iter().any(|&x| x as usize >= dim) {
                    return Err(sem(
                        span,
                        format!("index out of range for an action of dimension {dim}"),
                    ));
                }
                a.set_constant(*i as usize, *j as usize, *k as usize, c)
                    .map_err(engine(span))?;
            }
            StatementKind::Moment(source) => {
                if self.moment.is_some() {
                    return Err(sem(span, "the moment map is already declared"));
                }
                let action = self
                    .action
                    .clone()
                    .ok_or_else(|| sem(span, "a moment map needs a preceding 'action'"))?;
                let moment = match source {
                    MomentSource::Explicit(forms) => {
                        let comps = forms
                            .iter()
                            .map(|f| self.eval_form(f))
                            .collect::<Result<Vec<_>>>()?;
                        MomentMap::new(action, comps).map_err(engine(span))?
                    }
                    MomentSource::FromPotential => {
                        let theta = self.potential.as_ref().ok_or_else(|| {
                            sem(
                                span,
                                "'moment from potential' needs a 'potential' statement",
                            )
                        })?;
                        let p = self.plectic_at(span)?;
                        moment_from_potential(p, &action, theta).map_err(engine(span))?
                    }
                };
                self.moment = Some(moment);
            }
            StatementKind::Level(forms) => {
                let comps = forms
                    .iter()
                    .map(|f| self.eval_form(f))
                    .collect::<Result<Vec<_>>>()?;
                let moment = self
                    .moment
                    .take()
                    .ok_or_else(|| sem(span, "a level needs a preceding 'moment'"))?;
                self.moment = Some(moment.with_level(comps).map_err(engine(span))?);
            }
            StatementKind::Constraints(source) => {
                if self.constraints.is_some() {
                    return Err(sem(span, "the constraints are already declared"));
                }
                self.constraints = Some(match source {
                    ConstraintSource::Explicit(gens) => {
                        let gens = gens
                            .iter()
                            .map(|g| self.eval_poly(g))
                            .collect::<Result<Vec<_>>>()?;
                        Constraints::Explicit(Ideal::new(&self.chart, gens).map_err(engine(span))?)
                    }
                    ConstraintSource::Level => {
                        if self.moment.is_none() {
                            return Err(sem(
                                span,
                                "'constraints level' needs a preceding 'moment'",
                            ));
                        }
                        Constraints::Level
                    }
                    ConstraintSource::None => Constraints::None,
                });
            }
            StatementKind::Sample(items) => {
                for item in items {
                    let v = self.eval(item)?;
                    let o = self.to_observable(v, item.span)?;
                    self.sample.push(o);
                }
            }
            StatementKind::Query(q) => self.queries.push((q.clone(), span)),
        }
        Ok(())
    }

    fn require_no_structure(&self, span: Span) -> Result<()> {
        if self.plectic.is_some() {
            return Err(sem(span, "the structure form is already declared"));
        }
        Ok(())
    }

    fn coerce(&self, v: Value, kind: DefKind, span: Span) -> Result<Value> {
        Ok(match kind {
            DefKind::Poly => Value::Poly(self.as_poly(v, span)?),
            DefKind::Form => Value::Form(self.as_form(v, span)?),
            DefKind::Field => Value::Field(self.as_field(v, span)?),
            DefKind::Observable => Value::Obs(self.to_observable(v, span)?),
        })
    }

    // ---- typed evaluation ----

    pub fn eval_poly(&self, e: &Expr) -> Result<Poly> {
        let v = self.eval(e)?;
        self.as_poly(v, e.span)
    }

    pub fn eval_form(&self, e: &Expr) -> Result<FormExpr> {
        let v = self.eval(e)?;
        self.as_form(v, e.span)
    }

    pub fn eval_field(&self, e: &Expr) -> Result<FieldExpr> {
        let v = self.eval(e)?;
        self.as_field(v, e.span)
    }

    pub fn eval_observable(&self, e: &Expr) -> Result<Observable> {
        let v = self.eval(e)?;
        self.to_observable(v, e.span)
    }

    pub fn eval_number(&self, e: &Expr) -> Result<Rational> {
        match self.eval(e)? {
            Value::Num(n) => Ok(n),
            other => Err(sem(
                e.span,
                format!("expected a number, found a {}", other.kind()),
            )),
        }
    }

    fn as_poly(&self, v: Value, span: Span) -> Result<Poly> {
        match v {
            Value::Num(n) => Ok(Poly::constant(&self.chart, n)),
            Value::Poly(p) => Ok(p),
            Value::Form(f) if f.degree() == 0 => Ok(f.as_function().expect("degree-0 form")),
            other => Err(sem(
                span,
                format!("expected a function, found a {}", other.kind()),
            )),
        }
    }

    fn as_form(&self, v: Value, span: Span) -> Result<FormExpr> {
        match v {
            Value::Num(_) | Value::Poly(_) => Ok(FormExpr::function(self.as_poly(v, span)?)),
            Value::Form(f) => Ok(f),
            other => Err(sem(
                span,
                format!("expected a form, found a {}", other.kind()),
            )),
        }
    }

    fn as_field(&self, v: Value, span: Span) -> Result<FieldExpr> {
        match v {
            Value::Field(f) => Ok(f),
            Value::Num(n) if n == Rational::from_integer(0.into()) => {
                Ok(FieldExpr::zero(&self.chart))
            }
            other => Err(sem(
                span,
                format!("expected a vector field, found a {}", other.kind()),
            )),
        }
    }

    /// Like [`Model::to_observable`], but forms are read in the given degree;
    /// used to compare against an observable of known degree.
    pub fn observable_of_degree(&self, v: Value, degree: i32, span: Span) -> Result<Observable> {
        let p = self.plectic_at(span)?;
        match v {
            Value::Obs(o) => Ok(o),
            Value::Field(_) => Err(sem(span, "expected an observable, found a vector field")),
            other => {
                let f = self.as_form(other, span)?;
                if degree == 0 {
                    Observable::hamiltonian(p, f).map_err(engine(span))
                } else if f.is_zero() {
                    Ok(Observable::zero(p, degree))
                } else {
                    Observable::form(p, degree, f).map_err(engine(span))
                }
            }
        }
    }

    /// Forms of degree `n - 1` become Hamiltonian pairs with a solved field,
    /// lower-degree forms become negative-degree observables.
    pub fn to_observable(&self, v: Value, span: Span) -> Result<Observable> {
        let p = self.plectic_at(span)?;
        match v {
            Value::Obs(o) => Ok(o),
            Value::Num(_) | Value::Poly(_) | Value::Form(_) => {
                let f = self.as_form(v, span)?;
                let top = p.n() - 1;
                if f.degree() == top || (f.is_zero() && f.degree() == 0 && top == 0) {
                    Observable::hamiltonian(p, f).map_err(engine(span))
                } else if f.degree() < top {
                    let degree = f.degree() as i32 - top as i32;
                    Observable::form(p, degree, f).map_err(engine(span))
                } else {
                    Err(sem(
                        span,
                        format!("degree mismatch: observables are forms of degree at most {top}, got {}", f.degree()),
                    ))
                }
            }
            Value::Field(_) => Err(sem(span, "expected an observable, found a vector field")),
        }
    }

    fn check_size(&self, v: Value, span: Span) -> Result<Value> {
        if v.size() > MAX_TERMS {
            return Err(sem(span, format!("expression exceeds {MAX_TERMS} terms")));
        }
        if v.bits() > MAX_COEFFICIENT_BITS {
            return Err(sem(span, "expression coefficients are too large"));
        }
        Ok(v)
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        let span = e.span;
        let v = match &e.kind {
            ExprKind::Int(d) => Value::Num(
                d.parse::<Rational>()
                    .map_err(|_| sem(span, format!("invalid integer {d}")))?,
            ),
            ExprKind::Name(n) => self.name(n, span)?,
            ExprKind::Neg(inner) => scale(self.eval(inner)?, &-Rational::from_integer(1.into())),
            ExprKind::Call { func, args } => self.call(func, args, span)?,
            ExprKind::Binary { op, lhs, rhs } => {
                if *op == BinOp::Caret {
                    if let ExprKind::Int(k) = &rhs.kind {
                        let base = self.eval(lhs)?;
                        return self.power(base, k, lhs.span, rhs.span);
                    }
                }
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                self.binary(*op, a, b, span, rhs.span)?
            }
        };
        self.check_size(v, span)
    }

    fn name(&self, n: &str, span: Span) -> Result<Value> {
        if let Some(v) = self.names.get(n) {
            return Ok(v.clone());
        }
        if let Some(i) = self.chart.index_of(n) {
            return Ok(Value::Poly(Poly::coordinate(&self.chart, i)));
        }
        match n {
            "omega" => Ok(Value::Form(self.plectic_at(span)?.omega().clone())),
            "theta" => self
                .potential
                .clone()
                .map(Value::Form)
                .ok_or_else(|| sem(span, "'theta' needs a 'potential' statement")),
            _ if FUNCTIONS.contains(&n) => Err(sem(
                span,
                format!("'{n}' is a function and needs arguments"),
            )),
            _ => Err(sem(span, format!("unknown name '{n}'"))),
        }
    }

    fn power(&self, base: Value, k: &str, base_span: Span, span: Span) -> Result<Value> {
        let k: u32 = k
            .parse()
            .ok()
            .filter(|&k| k <= MAX_EXPONENT)
            .ok_or_else(|| {
                sem(
                    span,
                    format!("exponent {k} exceeds the limit of {MAX_EXPONENT}"),
                )
            })?;
        match base {
            Value::Num(n) => {
                if rational_bits(&n).saturating_mul(k as u64) > 2 * MAX_COEFFICIENT_BITS {
                    return Err(sem(base_span, "power coefficients are too large"));
                }
                Ok(Value::Num(n.pow(k as i32)))
            }
            Value::Field(_) | Value::Obs(_) => {
                Err(sem(base_span, format!("cannot raise a {} to a power", base.kind())))
            }
            Value::Form(ref f) if f.degree() > 0 => Err(sem(
                base_span,
                "cannot raise a form of positive degree to a power; use '^' between forms for the wedge product",
            )),
            other => {
                let p = self.as_poly(other, base_span)?;
                if poly_bits(&p).saturating_mul(k as u64) > 64 * MAX_COEFFICIENT_BITS {
                    return Err(sem(base_span, "power coefficients are too large"));
                }
                let mut acc = Poly::one(&self.chart);
                let mut work = 0usize;
                for _ in 0..k {
                    work += acc.num_terms() * p.num_terms();
                    if work > MAX_PRODUCT_WORK || poly_bits(&acc) > MAX_COEFFICIENT_BITS {
                        return Err(sem(base_span, "power is too expensive to expand"));
                    }
                    acc = &acc * &p;
                    if acc.num_terms() > MAX_TERMS {
                        return Err(sem(base_span, format!("power exceeds {MAX_TERMS} terms")));
                    }
                }
                Ok(Value::Poly(acc))
            }
        }
    }

    fn binary(&self, op: BinOp, a: Value, b: Value, span: Span, rhs_span: Span) -> Result<Value> {
        if a.size().saturating_mul(b.size()) > MAX_PRODUCT_WORK
            && matches!(op, BinOp::Mul | BinOp::Caret)
        {
            return Err(sem(span, format!("product exceeds {MAX_TERMS} terms")));
        }
        let mismatch = |a: &Value, b: &Value, verb: &str| {
            sem(
                span,
                format!("cannot {verb} a {} and a {}", a.kind(), b.kind()),
            )
        };
        match op {
            BinOp::Add | BinOp::Sub => {
                let b = if op == BinOp::Sub {
                    scale(b, &-Rational::from_integer(1.into()))
                } else {
                    b
                };
                Ok(match (a, b) {
                    (Value::Num(x), Value::Num(y)) => Value::Num(x + y),
                    (Value::Field(u), Value::Field(v)) => {
                        Value::Field(u.try_add(&v).map_err(engine(span))?)
                    }
                    (Value::Obs(x), Value::Obs(y)) => {
                        Value::Obs(x.try_add(&y).map_err(engine(span))?)
                    }
                    (
                        a @ (Value::Num(_) | Value::Poly(_)),
                        b @ (Value::Num(_) | Value::Poly(_)),
                    ) => {
                        let x = self.as_poly(a, span)?;
                        let y = self.as_poly(b, span)?;
                        Value::Poly(&x + &y)
                    }
                    (
                        a @ (Value::Num(_) | Value::Poly(_) | Value::Form(_)),
                        b @ (Value::Num(_) | Value::Poly(_) | Value::Form(_)),
                    ) => {
                        let x = self.as_form(a, span)?;
                        let y = self.as_form(b, span)?;
                        if !x.is_zero() && !y.is_zero() && x.degree() != y.degree() {
                            return Err(sem(
                                span,
                                format!(
                                    "degree mismatch: cannot add a {}-form and a {}-form",
                                    x.degree(),
                                    y.degree()
                                ),
                            ));
                        }
                        Value::Form(x.try_add(&y).map_err(engine(span))?)
                    }
                    (a, b) => return Err(mismatch(&a, &b, "add")),
                })
            }
            BinOp::Mul => Ok(match (a, b) {
                (Value::Num(x), Value::Num(y)) => Value::Num(x * y),
                (Value::Num(c), v) | (v, Value::Num(c)) => scale(v, &c),
                (Value::Poly(x), Value::Poly(y)) => Value::Poly(&x * &y),
                (Value::Poly(f), Value::Form(a)) | (Value::Form(a), Value::Poly(f)) => {
                    Value::Form(a.mul_fn(&f))
                }
                (Value::Poly(f), Value::Field(v)) | (Value::Field(v), Value::Poly(f)) => {
                    Value::Field(v.mul_fn(&f))
                }
                (Value::Form(x), Value::Form(y)) if x.degree() == 0 || y.degree() == 0 => {
                    Value::Form(wedge(&x, &y).map_err(engine(span))?)
                }
                (a @ Value::Form(_), b @ Value::Form(_)) => {
                    return Err(sem(
                        span,
                        format!(
                            "{}; use '^' for the wedge product",
                            mismatch(&a, &b, "multiply")
                        ),
                    ))
                }
                (a, b) => return Err(mismatch(&a, &b, "multiply")),
            }),
            BinOp::Div => match b {
                Value::Num(c) if c != Rational::from_integer(0.into()) => Ok(scale(a, &c.recip())),
                Value::Num(_) => Err(sem(rhs_span, "division by zero")),
                other => Err(sem(
                    rhs_span,
                    format!(
                        "can only divide by a nonzero number, found a {}",
                        other.kind()
                    ),
                )),
            },
            BinOp::Caret => match (a, b) {
                (
                    a @ (Value::Num(_) | Value::Poly(_) | Value::Form(_)),
                    b @ (Value::Num(_) | Value::Poly(_) | Value::Form(_)),
                ) => {
                    let x = self.as_form(a, span)?;
                    let y = self.as_form(b, span)?;
                    Ok(Value::Form(wedge(&x, &y).map_err(engine(span))?))
                }
                (a, b) => Err(mismatch(&a, &b, "wedge")),
            },
        }
    }

    fn arity(&self, func: &Ident, args: &[Expr], n: usize) -> Result<()> {
        if args.len() != n {
            return Err(sem(
                func.span,
                format!(
                    "'{}' takes {n} argument{}, got {}",
                    func.name,
                    if n == 1 { "" } else { "s" },
                    args.len()
                ),
            ));
        }
        Ok(())
    }

    fn call(&self, func: &Ident, args: &[Expr], span: Span) -> Result<Value> {
        match func.name.as_str() {
            "d" => {
                self.arity(func, args, 1)?;
                Ok(Value::Form(exterior_derivative(&self.eval_form(&args[0])?)))
            }
            "e" => {
                self.arity(func, args, 1)?;
                let ExprKind::Name(v) = &args[0].kind else {
                    return Err(sem(args[0].span, "'e' takes a coordinate name"));
                };
                let i = self
                    .chart
                    .index_of(v)
                    .ok_or_else(|| sem(args[0].span, format!("unknown variable '{v}'")))?;
                Ok(Value::Field(FieldExpr::coordinate(&self.chart, i)))
            }
            "iota" => {
                self.arity(func, args, 2)?;
                let v = self.eval_field(&args[0])?;
                let a = self.eval_form(&args[1])?;
                if a.degree() == 0 {
                    return Err(sem(
                        args[1].span,
                        "degree mismatch: cannot contract a function",
                    ));
                }
                Ok(Value::Form(interior_product(&v, &a).map_err(engine(span))?))
            }
            "lie" => {
                self.arity(func, args, 2)?;
                let v = self.eval_field(&args[0])?;
                match self.eval(&args[1])? {
                    Value::Field(u) => Ok(Value::Field(lie_bracket(&v, &u).map_err(engine(span))?)),
                    Value::Poly(f) => Ok(Value::Poly(v.apply(&f))),
                    Value::Num(_) => Ok(Value::Poly(Poly::zero(&self.chart))),
                    Value::Form(a) => {
                        Ok(Value::Form(lie_derivative(&v, &a).map_err(engine(span))?))
                    }
                    Value::Obs(_) => Err(sem(
                        args[1].span,
                        "cannot take the Lie derivative of an observable",
                    )),
                }
            }
            "bracket" => {
                if args.is_empty() {
                    return Err(sem(func.span, "'bracket' takes at least one argument"));
                }
                let p = self.plectic_at(span)?;
                let obs = args
                    .iter()
                    .map(|a| self.eval_observable(a))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Value::Obs(multibracket(p, &obs).map_err(engine(span))?))
            }
            "ham" => {
                self.arity(func, args, 1)?;
                let p = self.plectic_at(span)?;
                let a = self.eval_form(&args[0])?;
                Ok(Value::Obs(
                    Observable::hamiltonian(p, a).map_err(engine(span))?,
                ))
            }
            "pair" => {
                self.arity(func, args, 2)?;
                let p = self.plectic_at(span)?;
                let v = self.eval_field(&args[0])?;
                let a = self.eval_form(&args[1])?;
                Ok(Value::Obs(Observable::pair(p, v, a).map_err(engine(span))?))
            }
            "obs" => {
                self.arity(func, args, 2)?;
                let p = self.plectic_at(span)?;
                let k = self.eval_number(&args[0])?;
                if !k.is_integer() {
                    return Err(sem(args[0].span, "observable degrees are integers"));
                }
                let k: i32 = k
                    .to_integer()
                    .try_into()
                    .map_err(|_| sem(args[0].span, "degree out of range"))?;
                let a = self.eval_form(&args[1])?;
                Ok(Value::Obs(Observable::form(p, k, a).map_err(engine(span))?))
            }
            "field_of" | "form_of" => {
                self.arity(func, args, 1)?;
                let o = self.eval_observable(&args[0])?;
                if func.name == "field_of" {
                    o.field()
                        .cloned()
                        .map(Value::Field)
                        .ok_or_else(|| sem(args[0].span, "only degree-0 observables have a field"))
                } else {
                    o.form_part()
                        .cloned()
                        .map(Value::Form)
                        .ok_or_else(|| sem(args[0].span, "this observable has no form"))
                }
            }
            "prolong" => {
                self.arity(func, args, 1)?;
                Ok(Value::Field(self.prolong(&args[0])?))
            }
            "lift" => {
                self.arity(func, args, 1)?;
                let p = self.plectic_at(span)?;
                let tilde = self.prolong(&args[0])?;
                let theta = self
                    .potential
                    .as_ref()
                    .expect("prolong checked the potential");
                let form = interior_product(&tilde, theta).map_err(engine(span))?;
                Ok(Value::Obs(
                    Observable::pair(p, tilde, form).map_err(engine(span))?,
                ))
            }
            "mu" => {
                self.arity(func, args, 1)?;
                let moment = self
                    .moment
                    .as_ref()
                    .ok_or_else(|| sem(span, "'mu' needs a moment map"))?;
                let i = self.eval_number(&args[0])?;
                let idx = (i.is_integer() && i >= Rational::from_integer(0.into()))
                    .then(|| usize::try_from(i.to_integer()).ok())
                    .flatten()
                    .filter(|&i| i < moment.components.len())
                    .ok_or_else(|| sem(args[0].span, "moment component index out of range"))?;
                Ok(Value::Form(moment.components[idx].clone()))
            }
            other => Err(sem(func.span, format!("unknown function '{other}'"))),
        }
    }

    fn prolong(&self, arg: &Expr) -> Result<FieldExpr> {
        let fib = self
            .fibration
            .as_ref()
            .ok_or_else(|| sem(arg.span, "'prolong' needs a 'fibration' statement"))?;
        let theta = self
            .potential
            .as_ref()
            .ok_or_else(|| sem(arg.span, "'prolong' needs a 'potential' statement"))?;
        let w = self.eval_field(arg)?;
        let base_field = w.to_chart(&fib.base).map_err(|e| {
            sem(
                arg.span,
                format!("the field must live on the base variables: {e}"),
            )
        })?;
        let horizontal = (!self.horizontal.is_empty()).then_some(self.horizontal.as_slice());
        prolong_field(&fib.base, &self.chart, theta, &base_field, horizontal)
            .map_err(engine(arg.span))
    }
}

fn rational_bits(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

fn poly_bits(p: &Poly) -> u64 {
    p.terms().map(|(_, c)| rational_bits(c)).sum()
}

fn scale(v: Value, c: &Rational) -> Value {
    match v {
        Value::Num(n) => Value::Num(n * c),
        Value::Poly(p) => Value::Poly(p.scale(c)),
        Value::Form(f) => Value::Form(f.scale(c)),
        Value::Field(f) => Value::Field(f.scale(c)),
        Value::Obs(o) => Value::Obs(o.scale(c)),
    }
}
