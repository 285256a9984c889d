//! Reduction of the observable algebra along a constraint ideal and a Lie
//! algebra action: tangent fields, the vanishing ideals of fields and forms,
//! reducibility and equality in the reduced algebra.

mod basis;
mod closure;
mod symplectic;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::{contract, interior_product, lie_bracket, lie_derivative, FieldExpr, FormExpr};
use crate::error::{Error, Result};
use crate::groebner::{Ideal, ModuleOrder, SubmoduleBasis};
use crate::plectic::{Observable, PlecticStructure};
use crate::polyalg::{rat, ChartRef, MonomialOrder, Poly, Rational};
use crate::symmetry::{
    check_covariant_moment_map, isotropy_subalgebra, level_set_ideal, LieAlgebraAction, MomentMap,
};

pub use basis::ReducedBasis;
pub use closure::{ClosureReport, FormClosureReport};
pub use symplectic::{poisson_bracket, DescentReport, SymplecticPredicates};

const MAX_REPORTED: usize = 5;
const MAX_SAMPLE_POINTS: usize = 64;
const POINT_SEED: u64 = 0x5eed_0001;

/// Outcome of a reducibility or vanishing query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionVerdict {
    pub subject: String,
    pub reducible: bool,
    /// `None` when the query did not decide vanishing.
    pub in_vanishing_ideal: Option<bool>,
    pub certificates: Vec<String>,
}

/// Membership of a form in the vanishing form ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormMembership {
    Member,
    /// Some contraction with tangent generators is not in the constraint
    /// ideal, but no point of the constraint set separates it.
    NotCertified {
        tuple: Vec<usize>,
        residual: Poly,
    },
    /// The contraction with the listed tangent generators is nonzero at a
    /// point of the constraint set.
    Refuted {
        tuple: Vec<usize>,
        residual: Poly,
        point: Vec<Rational>,
    },
}

impl FormMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, FormMembership::Member)
    }
}

/// `v(g_j)` for every constraint generator, with the ones outside the ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangencyReport {
    pub tangent: bool,
    /// `(j, v(g_j))` for generators whose image is not in the ideal.
    pub witnesses: Vec<(usize, Poly)>,
}

/// A normal form that must vanish for a condition to hold.
#[derive(Debug, Clone)]
pub(crate) enum Residual {
    Poly(Poly),
    Vector(Vec<Poly>),
}

impl Residual {
    fn is_zero(&self) -> bool {
        match self {
            Residual::Poly(p) => p.is_zero(),
            Residual::Vector(v) => v.iter().all(Poly::is_zero),
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Poly(p) => write!(f, "{p}"),
            Residual::Vector(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// One linear condition: `residual` is zero iff the condition holds.
#[derive(Debug, Clone)]
pub(crate) struct Check {
    pub condition: String,
    pub residual: Residual,
    /// Tangent generators contracted, for form conditions.
    pub tuple: Option<Vec<usize>>,
    /// The quantity tested, shown when the condition fails.
    pub value: Option<String>,
}

impl Check {
    pub(crate) fn residual_is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Flattened residual coordinates keyed by condition, slot and exponent.
pub(crate) type Coordinates = BTreeMap<(String, usize, Vec<u32>), Rational>;

pub(crate) fn flatten(checks: &[Check]) -> Coordinates {
    let mut out = Coordinates::new();
    for c in checks {
        let slots: Vec<&Poly> = match &c.residual {
            Residual::Poly(p) => vec![p],
            Residual::Vector(v) => v.iter().collect(),
        };
        for (slot, p) in slots.into_iter().enumerate() {
            for (e, coeff) in p.terms() {
                out.insert((c.condition.clone(), slot, e.clone()), coeff.clone());
            }
        }
    }
    out
}

fn failures(checks: &[Check]) -> Vec<&Check> {
    checks.iter().filter(|c| !c.residual.is_zero()).collect()
}

fn describe_failures(checks: &[&Check]) -> Vec<String> {
    let mut out: Vec<String> = checks
        .iter()
        .take(MAX_REPORTED)
        .map(|c| match &c.value {
            Some(v) => format!(
                "{}: {v} has nonzero normal form {}",
                c.condition, c.residual
            ),
            None => format!("{}: normal form {} is nonzero", c.condition, c.residual),
        })
        .collect();
    if checks.len() > MAX_REPORTED {
        out.push(format!(
            "... and {} more failing conditions",
            checks.len() - MAX_REPORTED
        ));
    }
    out
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A plectic structure with a constraint ideal `I_N` and a Lie algebra
/// action whose fundamental fields are tangent to `N` and preserve the
/// reducibility of `ω`.
#[derive(Debug, Clone)]
pub struct ConstraintAction {
    plectic: PlecticStructure,
    ideal: Ideal,
    action: LieAlgebraAction,
    momentum: Option<Ideal>,
    order: MonomialOrder,
    tangent: SubmoduleBasis,
    tangent_fields: Vec<FieldExpr>,
    fundamental_plus_vanishing: SubmoduleBasis,
    points: OnceLock<Vec<Vec<Rational>>>,
}

impl ConstraintAction {
    /// Builds the reduction data and verifies that every fundamental field
    /// is tangent to `N` and that `ω` is a reducible form.
    pub fn new(plectic: PlecticStructure, ideal: Ideal, action: LieAlgebraAction) -> Result<Self> {
        Self::with_order(plectic, ideal, action, MonomialOrder::default())
    }

    pub fn with_order(
        plectic: PlecticStructure,
        ideal: Ideal,
        action: LieAlgebraAction,
        order: MonomialOrder,
    ) -> Result<Self> {
        let chart = plectic.chart().clone();
        if ideal.chart() != &chart || action.chart() != &chart {
            return Err(Error::IncompatibleCharts);
        }
        let ideal = ideal.with_order(order);
        let tangent_vectors = tangent_module_generators(&ideal, order)?;
        let tangent_fields = tangent_vectors
            .iter()
            .map(|v| FieldExpr::new(&chart, v.clone()))
            .collect::<Result<Vec<_>>>()?;
        let tangent = SubmoduleBasis::new(&chart, chart.dim(), tangent_vectors)?
            .with_order(order, ModuleOrder::PositionOverTerm);
        let mut generators: Vec<Vec<Poly>> = action
            .fields()
            .iter()
            .map(|f| f.components().to_vec())
            .collect();
        generators.extend(vanishing_field_generators(&ideal));
        let fundamental_plus_vanishing = SubmoduleBasis::new(&chart, chart.dim(), generators)?
            .with_order(order, ModuleOrder::PositionOverTerm);
        let ca = ConstraintAction {
            plectic,
            ideal,
            action,
            momentum: None,
            order,
            tangent,
            tangent_fields,
            fundamental_plus_vanishing,
            points: OnceLock::new(),
        };
        for (i, xi) in ca.action.fields().iter().enumerate() {
            let t = ca.is_tangent(xi)?;
            if !t.tangent {
                let (j, image) = &t.witnesses[0];
                return Err(Error::VerificationFailed(format!(
                    "fundamental field {i} ({xi}) is not tangent: it maps generator {j} to {image}"
                )));
            }
        }
        let omega = ca.plectic.omega().clone();
        let checks = ca.form_reducible_checks(&omega, "omega")?;
        let failed = failures(&checks);
        if !failed.is_empty() {
            return Err(Error::NotReducible(format!(
                "omega is not reducible: {}",
                describe_failures(&failed).join("; ")
            )));
        }
        Ok(ca)
    }

    /// Attaches the momentum ideal used by the symplectic predicates.
    pub fn with_momentum(mut self, momentum: Ideal) -> Result<Self> {
        if momentum.chart() != self.plectic.chart() {
            return Err(Error::IncompatibleCharts);
        }
        self.momentum = Some(momentum.with_order(self.order));
        Ok(self)
    }

    /// Reduction data for the level set of a covariant moment map, acted on
    /// by the isotropy subalgebra of the level. The momentum ideal is the
    /// level-set ideal.
    pub fn from_level_set(
        plectic: PlecticStructure,
        moment: &MomentMap,
        order: MonomialOrder,
    ) -> Result<Self> {
        let report = check_covariant_moment_map(&plectic, moment)?;
        if !report.passes() {
            return Err(Error::VerificationFailed(format!(
                "not a covariant moment map: {} derivative and {} equivariance violations",
                report.derivative_violations.len(),
                report.equivariance_violations.len()
            )));
        }
        let isotropy = isotropy_subalgebra(moment)?;
        let ideal = level_set_ideal(moment)?;
        ConstraintAction::with_order(plectic, ideal.clone(), isotropy, order)?.with_momentum(ideal)
    }

    pub fn plectic(&self) -> &PlecticStructure {
        &self.plectic
    }

    pub fn chart(&self) -> &ChartRef {
        self.plectic.chart()
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn action(&self) -> &LieAlgebraAction {
        &self.action
    }

    pub fn momentum(&self) -> Option<&Ideal> {
        self.momentum.as_ref()
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    /// Generators of the module of polynomial fields tangent to `N`.
    pub fn tangent_generators(&self) -> &[FieldExpr] {
        &self.tangent_fields
    }

    pub fn tangent_module(&self) -> &SubmoduleBasis {
        &self.tangent
    }

    /// The module spanned by the fundamental fields and `I_N·X(M)`.
    pub fn fundamental_plus_vanishing_module(&self) -> &SubmoduleBasis {
        &self.fundamental_plus_vanishing
    }

    fn nf(&self, p: &Poly) -> Result<Poly> {
        self.ideal.normal_form(p)
    }

    fn check_field_chart(&self, v: &FieldExpr) -> Result<()> {
        if v.chart() != self.chart() {
            return Err(Error::IncompatibleCharts);
        }
        Ok(())
    }

    fn check_form_chart(&self, a: &FormExpr) -> Result<()> {
        if a.chart() != self.chart() {
            return Err(Error::IncompatibleCharts);
        }
        Ok(())
    }

    /// `v(g) ∈ I_N` for every generator `g`.
    pub fn is_tangent(&self, v: &FieldExpr) -> Result<TangencyReport> {
        self.check_field_chart(v)?;
        let mut witnesses = Vec::new();
        for (j, g) in self.ideal.generators().iter().enumerate() {
            let image = v.apply(g);
            if !self.nf(&image)?.is_zero() {
                witnesses.push((j, image));
            }
        }
        Ok(TangencyReport {
            tangent: witnesses.is_empty(),
            witnesses,
        })
    }

    /// Every component of `v` lies in `I_N`.
    pub fn in_vanishing_field_ideal(&self, v: &FieldExpr) -> Result<bool> {
        self.check_field_chart(v)?;
        for c in v.components() {
            if !self.nf(c)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cofactors over the fundamental fields followed by the generators
    /// `g_l ∂_i` (ordered by `l` then `i`), or `None` when `v` is outside
    /// the module.
    pub fn in_fundamental_plus_vanishing(&self, v: &FieldExpr) -> Result<Option<Vec<Poly>>> {
        self.check_field_chart(v)?;
        self.fundamental_plus_vanishing
            .membership_witness(v.components())
    }

    /// Decides `α ∈ I_Ω(N)` through its contractions with the tangent
    /// generators.
    pub fn in_vanishing_form_ideal(&self, alpha: &FormExpr) -> Result<FormMembership> {
        self.check_form_chart(alpha)?;
        let checks = self.form_checks(alpha, "alpha")?;
        let Some(failed) = checks.iter().find(|c| !c.residual.is_zero()) else {
            return Ok(FormMembership::Member);
        };
        let Residual::Poly(residual) = &failed.residual else {
            unreachable!("form conditions have scalar residuals");
        };
        let tuple = failed.tuple.clone().unwrap_or_default();
        for c in &checks {
            let Residual::Poly(r) = &c.residual else {
                continue;
            };
            if r.is_zero() {
                continue;
            }
            for pt in self.points_on_constraint_set()? {
                if !r.evaluate(pt)?.is_zero() {
                    return Ok(FormMembership::Refuted {
                        tuple: c.tuple.clone().unwrap_or_default(),
                        residual: r.clone(),
                        point: pt.clone(),
                    });
                }
            }
        }
        Ok(FormMembership::NotCertified {
            tuple,
            residual: residual.clone(),
        })
    }

    pub fn is_reducible_form(&self, alpha: &FormExpr) -> Result<ReductionVerdict> {
        self.check_form_chart(alpha)?;
        let checks = self.form_reducible_checks(alpha, "alpha")?;
        Ok(verdict(alpha.to_string(), &checks))
    }

    pub fn is_reducible_field(&self, v: &FieldExpr) -> Result<ReductionVerdict> {
        self.check_field_chart(v)?;
        let checks = self.field_reducible_checks(v)?;
        Ok(verdict(v.to_string(), &checks))
    }

    pub fn is_reducible_observable(&self, o: &Observable) -> Result<ReductionVerdict> {
        let checks = self.observable_reducible_checks(o)?;
        Ok(verdict(o.to_string(), &checks))
    }

    /// Membership in the vanishing ideal of a reducible observable. Fails
    /// with [`Error::NotReducible`] when `o` is not reducible.
    pub fn in_vanishing_observable_ideal(&self, o: &Observable) -> Result<ReductionVerdict> {
        let reducible = self.observable_reducible_checks(o)?;
        let failed = failures(&reducible);
        if !failed.is_empty() {
            return Err(Error::NotReducible(format!(
                "{o}: {}",
                describe_failures(&failed).join("; ")
            )));
        }
        let checks = self.observable_vanishing_checks(o)?;
        let failed = failures(&checks);
        let vanishing = failed.is_empty();
        let certificates = if vanishing {
            vec![format!(
                "all {} vanishing conditions reduce to zero",
                checks.len()
            )]
        } else {
            describe_failures(&failed)
        };
        Ok(ReductionVerdict {
            subject: o.to_string(),
            reducible: true,
            in_vanishing_ideal: Some(vanishing),
            certificates,
        })
    }

    /// Equality of two reducible observables in the reduced algebra.
    pub fn reduced_equal(&self, a: &Observable, b: &Observable) -> Result<bool> {
        for o in [a, b] {
            let checks = self.observable_reducible_checks(o)?;
            let failed = failures(&checks);
            if !failed.is_empty() {
                return Err(Error::NotReducible(format!(
                    "{o}: {}",
                    describe_failures(&failed).join("; ")
                )));
            }
        }
        let diff = a.try_sub(b)?;
        Ok(failures(&self.observable_vanishing_checks(&diff)?).is_empty())
    }

    // ---- conditions ----

    /// Contractions of `alpha` with every set of `deg α` tangent generators,
    /// reduced modulo `I_N`.
    pub(crate) fn form_checks(&self, alpha: &FormExpr, label: &str) -> Result<Vec<Check>> {
        let k = alpha.degree();
        let mut out = Vec::new();
        for tuple in subsets(self.tangent_fields.len(), k) {
            let fields: Vec<FieldExpr> = tuple
                .iter()
                .map(|&i| self.tangent_fields[i].clone())
                .collect();
            let value = contract(&fields, alpha)?
                .as_function()
                .expect("full contraction is a function");
            out.push(Check {
                condition: format!("{label} on tangent generators {tuple:?} lies in I_N"),
                residual: Residual::Poly(self.nf(&value)?),
                tuple: Some(tuple),
                value: None,
            });
        }
        Ok(out)
    }

    pub(crate) fn form_reducible_checks(
        &self,
        alpha: &FormExpr,
        label: &str,
    ) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for (i, xi) in self.action.fields().iter().enumerate() {
            out.extend(self.form_checks(&lie_derivative(xi, alpha)?, &format!("L_xi{i} {label}"))?);
            if alpha.degree() > 0 {
                out.extend(
                    self.form_checks(&interior_product(xi, alpha)?, &format!("i_xi{i} {label}"))?,
                );
            }
        }
        Ok(out)
    }

    pub(crate) fn field_reducible_checks(&self, v: &FieldExpr) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for (j, g) in self.ideal.generators().iter().enumerate() {
            let image = v.apply(g);
            out.push(Check {
                condition: format!("v(g{j}) lies in I_N"),
                residual: Residual::Poly(self.nf(&image)?),
                tuple: None,
                value: Some(image.to_string()),
            });
        }
        for (i, xi) in self.action.fields().iter().enumerate() {
            let b = lie_bracket(v, xi)?;
            out.push(Check {
                condition: format!("[v, xi{i}] lies in X_g + I_X"),
                residual: Residual::Vector(
                    self.fundamental_plus_vanishing
                        .normal_form(b.components())?,
                ),
                tuple: None,
                value: Some(b.to_string()),
            });
        }
        Ok(out)
    }

    pub(crate) fn observable_reducible_checks(&self, o: &Observable) -> Result<Vec<Check>> {
        match o {
            Observable::Pair { field, form } => {
                self.check_field_chart(field)?;
                self.check_form_chart(form)?;
                let mut out = self.field_reducible_checks(field)?;
                out.extend(self.form_reducible_checks(form, "alpha")?);
                Ok(out)
            }
            Observable::Form { form, .. } => {
                self.check_form_chart(form)?;
                self.form_reducible_checks(form, "alpha")
            }
            Observable::Zero { .. } => Ok(Vec::new()),
        }
    }

    pub(crate) fn observable_vanishing_checks(&self, o: &Observable) -> Result<Vec<Check>> {
        match o {
            Observable::Pair { field, form } => {
                let mut out = vec![Check {
                    condition: "v lies in X_g + I_X".into(),
                    residual: Residual::Vector(
                        self.fundamental_plus_vanishing
                            .normal_form(field.components())?,
                    ),
                    tuple: None,
                    value: Some(field.to_string()),
                }];
                out.extend(self.form_checks(form, "alpha")?);
                Ok(out)
            }
            Observable::Form { form, .. } => self.form_checks(form, "alpha"),
            Observable::Zero { .. } => Ok(Vec::new()),
        }
    }

    /// Deterministic rational points of `N`: coordinates outside a small
    /// subset are drawn at random, the subset is set to zero, and points
    /// where some generator does not vanish are discarded.
    pub fn points_on_constraint_set(&self) -> Result<&[Vec<Rational>]> {
        if let Some(p) = self.points.get() {
            return Ok(p);
        }
        let m = self.chart().dim();
        let mut rng = ChaCha8Rng::seed_from_u64(POINT_SEED);
        let mut patterns: Vec<Vec<usize>> = (0..=m.min(3)).flat_map(|k| subsets(m, k)).collect();
        if m > 3 {
            patterns.push((0..m).collect());
        }
        let mut points: Vec<Vec<Rational>> = Vec::new();
        'outer: for pattern in patterns {
            for _ in 0..2 {
                let pt: Vec<Rational> = (0..m)
                    .map(|i| {
                        if pattern.contains(&i) {
                            Rational::zero()
                        } else {
                            rat(rng.gen_range(1..=7) * if rng.gen_bool(0.5) { 1 } else { -1 })
                        }
                    })
                    .collect();
                if points.contains(&pt) {
                    continue;
                }
                let mut on = true;
                for g in self.ideal.generators() {
                    if !g.evaluate(&pt)?.is_zero() {
                        on = false;
                        break;
                    }
                }
                if on {
                    points.push(pt);
                    if points.len() >= MAX_SAMPLE_POINTS {
                        break 'outer;
                    }
                }
            }
        }
        Ok(self.points.get_or_init(|| points))
    }
}

fn verdict(subject: String, checks: &[Check]) -> ReductionVerdict {
    let failed = failures(checks);
    let certificates = if failed.is_empty() {
        vec![format!(
            "all {} reducibility conditions reduce to zero",
            checks.len()
        )]
    } else {
        describe_failures(&failed)
    };
    ReductionVerdict {
        subject,
        reducible: failed.is_empty(),
        in_vanishing_ideal: None,
        certificates,
    }
}

/// `g_l ∂_i` for every generator and coordinate.
fn vanishing_field_generators(ideal: &Ideal) -> Vec<Vec<Poly>> {
    let chart = ideal.chart();
    let m = chart.dim();
    let mut out = Vec::new();
    for g in ideal.generators() {
        for i in 0..m {
            let mut v = vec![Poly::zero(chart); m];
            v[i] = g.clone();
            out.push(v);
        }
    }
    out
}

/// Fields `a` with `a(g_j) ∈ I` for every generator, as a syzygy
/// elimination: the vectors `(J e_i | e_i)` and `(g_l e_j | 0)` generate a
/// module whose elements with vanishing first block are exactly the tangent
/// fields. Redundant generators are pruned.
fn tangent_module_generators(ideal: &Ideal, order: MonomialOrder) -> Result<Vec<Vec<Poly>>> {
    let chart = ideal.chart();
    let m = chart.dim();
    let gens = ideal.generators();
    let k = gens.len();
    if k == 0 {
        return Ok((0..m)
            .map(|i| FieldExpr::coordinate(chart, i).components().to_vec())
            .collect());
    }
    let rank = k + m;
    let mut vectors = Vec::new();
    for i in 0..m {
        let mut v = vec![Poly::zero(chart); rank];
        for (j, g) in gens.iter().enumerate() {
            v[j] = g.derivative(i);
        }
        v[k + i] = Poly::one(chart);
        vectors.push(v);
    }
    for j in 0..k {
        for g in gens {
            let mut v = vec![Poly::zero(chart); rank];
            v[j] = g.clone();
            vectors.push(v);
        }
    }
    let module = SubmoduleBasis::new(chart, rank, vectors)?;
    let gb = module.module_basis(order, ModuleOrder::PositionOverTerm);
    let mut candidates: Vec<Vec<Poly>> = gb
        .vectors()
        .filter(|v| v[..k].iter().all(Poly::is_zero))
        .map(|v| v[k..].to_vec())
        .collect();
    candidates.extend(vanishing_field_generators(ideal));
    prune(chart, candidates, order)
}

fn vector_degree(v: &[Poly]) -> u32 {
    v.iter().filter_map(Poly::total_degree).max().unwrap_or(0)
}

/// Drops generators that lie in the module spanned by the others, trying the
/// highest-degree ones first, and normalizes the survivors.
fn prune(
    chart: &ChartRef,
    mut candidates: Vec<Vec<Poly>>,
    order: MonomialOrder,
) -> Result<Vec<Vec<Poly>>> {
    let m = chart.dim();
    candidates.retain(|v| v.iter().any(|c| !c.is_zero()));
    let mut unique: Vec<Vec<Poly>> = Vec::new();
    for v in candidates.into_iter().map(|v| normalize(v, order)) {
        if !unique.contains(&v) {
            unique.push(v);
        }
    }
    unique.sort_by_key(|v| {
        std::cmp::Reverse((
            vector_degree(v),
            v.iter().map(Poly::num_terms).sum::<usize>(),
        ))
    });
    let mut kept = unique;
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Vec<Poly>> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect();
        let redundant = !others.is_empty()
            && SubmoduleBasis::new(chart, m, others)?
                .with_order(order, ModuleOrder::PositionOverTerm)
                .contains(&kept[i])?;
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept.reverse();
    Ok(kept)
}

/// Scales a vector so that its leading coefficient (first nonzero slot,
/// leading term in `order`) is one.
fn normalize(v: Vec<Poly>, order: MonomialOrder) -> Vec<Poly> {
    let lead = v
        .iter()
        .find(|c| !c.is_zero())
        .and_then(|c| c.leading_term(order).map(|(_, c)| c.clone()));
    match lead {
        Some(c) => {
            let inv = c.recip();
            v.iter().map(|p| p.scale(&inv)).collect()
        }
        None => v,
    }
}

#[cfg(test)]
mod tests;
