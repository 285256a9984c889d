//! Exact multivariate polynomials over the rationals on a named chart.
//!
//! A [`Poly`] stores a dense exponent vector per term in a `BTreeMap`, so two
//! equal polynomials always have identical term maps and structural equality
//! is mathematical equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient.
pub type Rational = BigRational;

/// Exponent vector; its length always equals the chart dimension.
pub type Exponent = Vec<u32>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A coordinate chart: an ordered list of distinct coordinate names.
///
/// The variable order fixes the coframe `dx_1, ..., dx_m` used by forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    name: String,
    variables: Vec<String>,
}

pub type ChartRef = Arc<Chart>;

impl Chart {
    pub fn new<S: Into<String>>(name: S, variables: Vec<String>) -> Result<ChartRef> {
        let mut seen = HashSet::new();
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        Ok(Arc::new(Chart {
            name: name.into(),
            variables,
        }))
    }

    /// Convenience constructor for literal variable lists.
    pub fn from_names(name: &str, variables: &[&str]) -> Result<ChartRef> {
        Chart::new(name, variables.iter().map(|v| v.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &str {
        &self.variables[index]
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    pub fn require_index(&self, var: &str) -> Result<usize> {
        self.index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// The chart spanned by a subset of this chart's variables, in this chart's order.
    pub fn sub_chart(&self, name: &str, keep: &[usize]) -> ChartRef {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        Arc::new(Chart {
            name: name.to_string(),
            variables: keep.iter().map(|&i| self.variables[i].clone()).collect(),
        })
    }
}

/// Admissible monomial orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    Lex,
    #[default]
    GrevLex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => {
                for (x, y) in a.iter().zip(b) {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::GrevLex => {
                let da: u64 = a.iter().map(|&e| e as u64).sum();
                let db: u64 = b.iter().map(|&e| e as u64).sum();
                if da != db {
                    return da.cmp(&db);
                }
                for (x, y) in a.iter().zip(b).rev() {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::Lex => f.write_str("lex"),
            MonomialOrder::GrevLex => f.write_str("grevlex"),
        }
    }
}

impl std::str::FromStr for MonomialOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(MonomialOrder::Lex),
            "grevlex" => Ok(MonomialOrder::GrevLex),
            other => Err(Error::Unsupported(format!(
                "unknown monomial order `{other}`"
            ))),
        }
    }
}

pub fn exp_divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn exp_lcm(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn exp_sub(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn exp_add(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn exp_coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Exact polynomial with rational coefficients on a chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    chart: ChartRef,
    terms: BTreeMap<Exponent, Rational>,
}

/// The three ring operations exposed through [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring operation; fails when the operands live on different charts.
pub fn arith(p: &Poly, q: &Poly, op: ArithOp) -> Result<Poly> {
    p.same_chart(q)?;
    Ok(match op {
        ArithOp::Add => p + q,
        ArithOp::Sub => p - q,
        ArithOp::Mul => p * q,
    })
}

impl Poly {
    pub fn zero(chart: &ChartRef) -> Poly {
        Poly {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &ChartRef) -> Poly {
        Poly::constant(chart, Rational::one())
    }

    pub fn constant(chart: &ChartRef, c: Rational) -> Poly {
        Poly::monomial(chart, vec![0; chart.dim()], c)
    }

    pub fn from_int(chart: &ChartRef, c: i64) -> Poly {
        Poly::constant(chart, rat(c))
    }

    pub fn monomial(chart: &ChartRef, exp: Exponent, c: Rational) -> Poly {
        debug_assert_eq!(exp.len(), chart.dim());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly {
            chart: chart.clone(),
            terms,
        }
    }

    /// The coordinate function of the `index`-th chart variable.
    pub fn coordinate(chart: &ChartRef, index: usize) -> Poly {
        let mut exp = vec![0; chart.dim()];
        exp[index] = 1;
        Poly::monomial(chart, exp, Rational::one())
    }

    pub fn var(chart: &ChartRef, name: &str) -> Result<Poly> {
        Ok(Poly::coordinate(chart, chart.require_index(name)?))
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(chart: &ChartRef, terms: I) -> Poly
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = Poly::zero(chart);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if this polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Whether the variable with the given index occurs in some term.
    pub fn depends_on(&self, index: usize) -> bool {
        self.terms.keys().any(|e| e[index] > 0)
    }

    pub fn same_chart(&self, other: &Poly) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || self.chart == other.chart {
            Ok(())
        } else {
            Err(Error::IncompatibleCharts)
        }
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn remove_term(&mut self, exp: &[u32]) -> Option<Rational> {
        self.terms.remove(exp)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.chart);
        }
        Poly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the single term `c * x^exp`.
    pub fn mul_term(&self, exp: &[u32], c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.chart);
        }
        Poly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (exp_add(e, exp), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one(&self.chart);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to the variable at `index`.
    pub fn derivative(&self, index: usize) -> Poly {
        let mut out = Poly::zero(&self.chart);
        for (e, c) in &self.terms {
            if e[index] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[index] -= 1;
            out.add_term(e2, c * rat(e[index] as i64));
        }
        out
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Poly> {
        Ok(self.derivative(self.chart.require_index(var)?))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.chart.dim() {
            return Err(Error::LengthMismatch {
                expected: self.chart.dim(),
                found: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Simultaneous substitution of variables by polynomials.
    ///
    /// Every replacement must live on one common target chart. Variables that
    /// are not replaced are carried over by name and must exist on the target.
    pub fn substitute(&self, assignments: &BTreeMap<String, Poly>) -> Result<Poly> {
        let target = match assignments.values().next() {
            Some(p) => p.chart.clone(),
            None => return Ok(self.clone()),
        };
        for (name, p) in assignments {
            self.chart.require_index(name)?;
            if p.chart != target {
                return Err(Error::IncompatibleCharts);
            }
        }
        let images: Vec<Poly> = self
            .chart
            .variables()
            .iter()
            .map(|v| match assignments.get(v) {
                Some(p) => Ok(p.clone()),
                None => Poly::var(&target, v),
            })
            .collect::<Result<_>>()?;
        Ok(self.compose(&target, &images))
    }

    /// Substitutes `images[i]` for the `i`-th variable; all images live on `target`.
    pub fn compose(&self, target: &ChartRef, images: &[Poly]) -> Poly {
        let mut out = Poly::zero(target);
        let mut powers: Vec<Vec<Poly>> = vec![Vec::new(); images.len()];
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() < k as usize {
                    let next = match cache.last() {
                        Some(last) => last * &images[i],
                        None => images[i].clone(),
                    };
                    cache.push(next);
                }
                t = &t * &cache[k as usize - 1];
            }
            out = &out + &t;
        }
        out
    }

    /// Re-expresses this polynomial on another chart, matching variables by name.
    pub fn to_chart(&self, target: &ChartRef) -> Result<Poly> {
        let mut map = Vec::with_capacity(self.chart.dim());
        for (i, v) in self.chart.variables().iter().enumerate() {
            match target.index_of(v) {
                Some(j) => map.push(Some(j)),
                None if self.depends_on(i) => return Err(Error::UnknownVariable(v.clone())),
                None => map.push(None),
            }
        }
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.dim()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    e2[j] = k;
                }
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Terms sorted descending in the given order.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Exponent, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    /// Divides every coefficient so the grevlex-leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading_term(MonomialOrder::GrevLex) {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Whether a display of this polynomial needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, chart: &Chart, e: &[u32]) -> fmt::Result {
    let mut first = true;
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(chart.variable(i))?;
        if k > 1 {
            write!(f, "^{k}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self
            .sorted_terms(MonomialOrder::GrevLex)
            .into_iter()
            .enumerate()
        {
            let negative = c.is_negative();
            let abs = c.abs();
            match (n == 0, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            let is_unit = e.iter().all(|&k| k == 0);
            if is_unit {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, &self.chart, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.chart.name(), self)
    }
}

fn assert_same_chart(a: &Poly, b: &Poly) {
    if let Err(e) = a.same_chart(b) {
        panic!("{e}: `{}` vs `{}`", a.chart.name(), b.chart.name());
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        assert_same_chart(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        assert_same_chart(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        assert_same_chart(self, rhs);
        let mut out = Poly::zero(&self.chart);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(exp_add(e1, e2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        -&self
    }
}
