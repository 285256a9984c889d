//! Differential forms and vector fields with polynomial coefficients, and the
//! Cartan calculus on them: wedge, d, interior product, Lie bracket, Lie
//! derivative and restriction to coordinate-aligned subspaces.
//!
//! Forms are stored in the basis `dx_I` with `I` strictly increasing; every
//! sign comes from the parity of the sorting permutation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::polyalg::{ChartRef, Poly, Rational};

/// Strictly increasing coframe multi-index.
pub type MultiIndex = Vec<usize>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FormExpr {
    chart: ChartRef,
    degree: usize,
    terms: BTreeMap<MultiIndex, Poly>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldExpr {
    chart: ChartRef,
    components: Vec<Poly>,
}

fn parity_sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl FormExpr {
    pub fn zero(chart: &ChartRef, degree: usize) -> FormExpr {
        FormExpr {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form of a function.
    pub fn function(f: Poly) -> FormExpr {
        let mut out = FormExpr::zero(f.chart(), 0);
        out.add_term(Vec::new(), f);
        out
    }

    pub fn constant(chart: &ChartRef, c: Rational) -> FormExpr {
        FormExpr::function(Poly::constant(chart, c))
    }

    /// The coordinate differential `dx_i`.
    pub fn differential(chart: &ChartRef, index: usize) -> FormExpr {
        let mut out = FormExpr::zero(chart, 1);
        out.add_term(vec![index], Poly::one(chart));
        out
    }

    /// `coefficient * dx_I` for an arbitrary (unsorted) index list.
    pub fn monomial(coefficient: Poly, indices: &[usize]) -> FormExpr {
        let chart = coefficient.chart().clone();
        let mut out = FormExpr::zero(&chart, indices.len());
        let mut sorted = indices.to_vec();
        let mut odd = false;
        // bubble sort to track parity; index lists are tiny
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return out;
        }
        out.add_term(sorted, coefficient.scale(&parity_sign(odd)));
        out
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, index: &[usize]) -> Poly {
        self.terms
            .get(index)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.chart))
    }

    /// All nonzero coefficient polynomials.
    pub fn coefficients(&self) -> Vec<Poly> {
        self.terms.values().cloned().collect()
    }

    /// Flattened rational coordinates: one entry per (multi-index, monomial).
    pub fn coordinates(&self) -> BTreeMap<(MultiIndex, Vec<u32>), Rational> {
        let mut out = BTreeMap::new();
        for (idx, c) in &self.terms {
            for (e, q) in c.terms() {
                out.insert((idx.clone(), e.clone()), q.clone());
            }
        }
        out
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> Option<Poly> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    fn add_term(&mut self, index: MultiIndex, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&index) {
            Some(old) => {
                let sum = &old + &coeff;
                if !sum.is_zero() {
                    self.terms.insert(index, sum);
                }
            }
            None => {
                self.terms.insert(index, coeff);
            }
        }
    }

    fn check_chart(&self, chart: &ChartRef) -> Result<()> {
        if &self.chart == chart {
            Ok(())
        } else {
            Err(Error::IncompatibleCharts)
        }
    }

    /// Sum of two forms. A zero summand adopts the other's degree.
    pub fn try_add(&self, other: &FormExpr) -> Result<FormExpr> {
        self.check_chart(&other.chart)?;
        if other.is_zero() && (self.degree == other.degree || !self.is_zero()) {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &FormExpr) -> Result<FormExpr> {
        self.try_add(&-other)
    }

    /// Multiplication by a function.
    pub fn mul_fn(&self, f: &Poly) -> FormExpr {
        let mut out = FormExpr::zero(&self.chart, self.degree);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c * f);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> FormExpr {
        let mut out = FormExpr::zero(&self.chart, self.degree);
        for (i, p) in &self.terms {
            out.add_term(i.clone(), p.scale(c));
        }
        out
    }

    /// Same form, relabelled with another degree; only meaningful for zero forms.
    pub fn with_degree(mut self, degree: usize) -> FormExpr {
        if self.is_zero() {
            self.degree = degree;
        }
        self
    }

    /// Re-expresses the form on another chart, matching coordinates by name.
    pub fn to_chart(&self, target: &ChartRef) -> Result<FormExpr> {
        let mut map = Vec::with_capacity(self.chart.dim());
        for v in self.chart.variables() {
            map.push(target.index_of(v));
        }
        let mut out = FormExpr::zero(target, self.degree);
        for (idx, c) in &self.terms {
            let mut new_idx = Vec::with_capacity(idx.len());
            for &i in idx {
                match map[i] {
                    Some(j) => new_idx.push(j),
                    None => return Err(Error::UnknownVariable(self.chart.variable(i).to_string())),
                }
            }
            let piece = FormExpr::monomial(c.to_chart(target)?, &new_idx);
            out = out.try_add(&piece)?;
        }
        Ok(out)
    }
}

pub fn wedge(a: &FormExpr, b: &FormExpr) -> Result<FormExpr> {
    a.check_chart(&b.chart)?;
    let mut out = FormExpr::zero(&a.chart, a.degree + b.degree);
    for (i, ca) in &a.terms {
        for (j, cb) in &b.terms {
            if i.iter().any(|x| j.contains(x)) {
                continue;
            }
            let inversions = i
                .iter()
                .map(|x| j.iter().filter(|y| *y < x).count())
                .sum::<usize>();
            let mut merged: MultiIndex = i.iter().chain(j).copied().collect();
            merged.sort_unstable();
            out.add_term(merged, (ca * cb).scale(&parity_sign(inversions % 2 == 1)));
        }
    }
    Ok(out)
}

pub fn exterior_derivative(a: &FormExpr) -> FormExpr {
    let m = a.chart.dim();
    let mut out = FormExpr::zero(&a.chart, a.degree + 1);
    for (idx, c) in &a.terms {
        for k in 0..m {
            if idx.contains(&k) {
                continue;
            }
            let dc = c.derivative(k);
            if dc.is_zero() {
                continue;
            }
            let before = idx.iter().filter(|&&i| i < k).count();
            let mut merged = idx.clone();
            merged.insert(before, k);
            out.add_term(merged, dc.scale(&parity_sign(before % 2 == 1)));
        }
    }
    out
}

/// Contraction in the first slot: `(i_v a)(w_2, ..) = a(v, w_2, ..)`.
pub fn interior_product(v: &FieldExpr, a: &FormExpr) -> Result<FormExpr> {
    a.check_chart(&v.chart)?;
    if a.degree == 0 {
        return Ok(FormExpr::zero(&a.chart, 0));
    }
    let mut out = FormExpr::zero(&a.chart, a.degree - 1);
    for (idx, c) in &a.terms {
        for (r, &i) in idx.iter().enumerate() {
            let vi = &v.components[i];
            if vi.is_zero() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(r);
            out.add_term(rest, (c * vi).scale(&parity_sign(r % 2 == 1)));
        }
    }
    Ok(out)
}

/// `i(v_1 ∧ ... ∧ v_k) a = i_{v_k} ... i_{v_1} a`.
pub fn contract(fields: &[FieldExpr], a: &FormExpr) -> Result<FormExpr> {
    let mut out = a.clone();
    for v in fields {
        if out.degree == 0 {
            return Err(Error::DegreeMismatch(format!(
                "cannot contract a {}-form with {} fields",
                a.degree,
                fields.len()
            )));
        }
        out = interior_product(v, &out)?;
    }
    Ok(out)
}

pub fn lie_bracket(u: &FieldExpr, v: &FieldExpr) -> Result<FieldExpr> {
    if u.chart != v.chart {
        return Err(Error::IncompatibleCharts);
    }
    let components = u
        .components
        .iter()
        .zip(&v.components)
        .map(|(ui, vi)| &u.apply(vi) - &v.apply(ui))
        .collect();
    Ok(FieldExpr {
        chart: u.chart.clone(),
        components,
    })
}

/// `L_v a = i_v da + d i_v a`.
pub fn lie_derivative(v: &FieldExpr, a: &FormExpr) -> Result<FormExpr> {
    a.check_chart(&v.chart)?;
    let first = interior_product(v, &exterior_derivative(a))?;
    if a.degree == 0 {
        return Ok(first);
    }
    let second = exterior_derivative(&interior_product(v, a)?);
    first.try_add(&second)
}

/// Pulls a form back to the subspace where some coordinates are given as
/// polynomials in the remaining ones.
///
/// The result lives on the chart of the remaining coordinates. Substituted
/// values may only depend on remaining coordinates; anything else is not
/// coordinate aligned and is rejected.
pub fn restrict(a: &FormExpr, substitution: &BTreeMap<String, Poly>) -> Result<FormExpr> {
    let chart = &a.chart;
    let mut fixed = BTreeSet::new();
    for (name, value) in substitution {
        fixed.insert(chart.require_index(name)?);
        if value.chart() != chart {
            return Err(Error::IncompatibleCharts);
        }
    }
    for value in substitution.values() {
        if fixed.iter().any(|&i| value.depends_on(i)) {
            return Err(Error::Unsupported(
                "restriction values must depend only on the remaining coordinates".into(),
            ));
        }
    }
    let keep: Vec<usize> = (0..chart.dim()).filter(|i| !fixed.contains(i)).collect();
    let sub = chart.sub_chart(&format!("{}|sub", chart.name()), &keep);
    let images: Vec<Poly> = (0..chart.dim())
        .map(|i| match substitution.get(chart.variable(i)) {
            Some(value) => value.to_chart(&sub),
            None => Poly::var(&sub, chart.variable(i)),
        })
        .collect::<Result<_>>()?;
    let differentials: Vec<FormExpr> = images
        .iter()
        .map(|p| exterior_derivative(&FormExpr::function(p.clone())))
        .collect();
    let mut out = FormExpr::zero(&sub, a.degree);
    for (idx, c) in &a.terms {
        let mut piece = FormExpr::function(c.compose(&sub, &images));
        for &i in idx {
            piece = wedge(&piece, &differentials[i])?;
        }
        out = out.try_add(&piece.with_degree(a.degree))?;
    }
    Ok(out)
}

impl FieldExpr {
    pub fn zero(chart: &ChartRef) -> FieldExpr {
        FieldExpr {
            chart: chart.clone(),
            components: vec![Poly::zero(chart); chart.dim()],
        }
    }

    pub fn new(chart: &ChartRef, components: Vec<Poly>) -> Result<FieldExpr> {
        if components.len() != chart.dim() {
            return Err(Error::LengthMismatch {
                expected: chart.dim(),
                found: components.len(),
            });
        }
        for c in &components {
            if c.chart() != chart {
                return Err(Error::IncompatibleCharts);
            }
        }
        Ok(FieldExpr {
            chart: chart.clone(),
            components,
        })
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(chart: &ChartRef, index: usize) -> FieldExpr {
        let mut f = FieldExpr::zero(chart);
        f.components[index] = Poly::one(chart);
        f
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// Flattened rational coordinates: one entry per (component, monomial).
    pub fn coordinates(&self) -> BTreeMap<(usize, Vec<u32>), Rational> {
        let mut out = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            for (e, q) in c.terms() {
                out.insert((i, e.clone()), q.clone());
            }
        }
        out
    }

    /// The derivation `f ↦ Σ v^i ∂_i f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(&self.chart);
        for (i, vi) in self.components.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            let df = f.derivative(i);
            if !df.is_zero() {
                out = &out + &(vi * &df);
            }
        }
        out
    }

    pub fn mul_fn(&self, f: &Poly) -> FieldExpr {
        FieldExpr {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c * f).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> FieldExpr {
        FieldExpr {
            chart: self.chart.clone(),
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn try_add(&self, other: &FieldExpr) -> Result<FieldExpr> {
        if self.chart != other.chart {
            return Err(Error::IncompatibleCharts);
        }
        Ok(FieldExpr {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &FieldExpr) -> Result<FieldExpr> {
        self.try_add(&-other)
    }

    pub fn to_chart(&self, target: &ChartRef) -> Result<FieldExpr> {
        let mut out = FieldExpr::zero(target);
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = target.require_index(self.chart.variable(i))?;
            out.components[j] = c.to_chart(target)?;
        }
        Ok(out)
    }
}

impl Neg for &FormExpr {
    type Output = FormExpr;

    fn neg(self) -> FormExpr {
        self.scale(&-Rational::one())
    }
}

impl Neg for &FieldExpr {
    type Output = FieldExpr;

    fn neg(self) -> FieldExpr {
        self.scale(&-Rational::one())
    }
}

impl Add for &FormExpr {
    type Output = FormExpr;

    /// Panics on chart or degree mismatch; use [`FormExpr::try_add`] for checked sums.
    fn add(self, rhs: &FormExpr) -> FormExpr {
        self.try_add(rhs).expect("form sum")
    }
}

impl Sub for &FormExpr {
    type Output = FormExpr;

    fn sub(self, rhs: &FormExpr) -> FormExpr {
        self.try_sub(rhs).expect("form difference")
    }
}

impl Add for &FieldExpr {
    type Output = FieldExpr;

    fn add(self, rhs: &FieldExpr) -> FieldExpr {
        self.try_add(rhs).expect("field sum")
    }
}

impl Sub for &FieldExpr {
    type Output = FieldExpr;

    fn sub(self, rhs: &FieldExpr) -> FieldExpr {
        self.try_sub(rhs).expect("field difference")
    }
}

/// Writes `coefficient*basis` terms joined with signs, in the DSL syntax.
fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(Poly, String)]) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (n, (c, basis)) in terms.iter().enumerate() {
        let mut body = if basis.is_empty() {
            c.to_string()
        } else if c.is_compound() {
            format!("({c})*{basis}")
        } else {
            let (_, lc) = c.terms().next().expect("nonzero coefficient");
            let monomial = c.scale(&lc.abs().recip());
            let sign = if lc.is_negative() { "-" } else { "" };
            let abs = lc.abs();
            match (monomial.as_constant().is_some(), abs.is_one()) {
                (true, true) => format!("{sign}{basis}"),
                (true, false) => format!("{sign}{abs}*{basis}"),
                (false, _) => format!("{c}*{basis}"),
            }
        };
        let negative = body.starts_with('-');
        if n > 0 {
            if negative {
                body.remove(0);
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
        }
        f.write_str(&body)?;
    }
    Ok(())
}

impl fmt::Display for FormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Poly, String)> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                let basis = idx
                    .iter()
                    .map(|&i| format!("d({})", self.chart.variable(i)))
                    .collect::<Vec<_>>()
                    .join("^");
                (c.clone(), basis)
            })
            .collect();
        write_terms(f, &terms)
    }
}

impl fmt::Debug for FormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form{}[{}]({})", self.degree, self.chart.name(), self)
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Poly, String)> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.clone(), format!("e({})", self.chart.variable(i))))
            .collect();
        write_terms(f, &terms)
    }
}

impl fmt::Debug for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field[{}]({})", self.chart.name(), self)
    }
}
