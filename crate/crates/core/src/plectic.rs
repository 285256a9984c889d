//! Pre-n-plectic structures, Hamiltonian pairs, and the L∞-algebra of
//! observables with its multibrackets, Leibniz bracket and higher Jacobi check.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::{
    contract, exterior_derivative, interior_product, lie_bracket, lie_derivative, FieldExpr,
    FormExpr, MultiIndex,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polyalg::{rat, ChartRef, Poly, Rational};

/// Outcome of the nondegeneracy test, with its evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nondegeneracy {
    /// A maximal minor of the flat map that is a nonzero constant.
    Yes {
        columns: Vec<MultiIndex>,
        determinant: Rational,
    },
    /// A nonzero kernel vector of the flat map at a point.
    No {
        point: Vec<Rational>,
        kernel: Vec<Rational>,
    },
    Unknown(String),
}

impl Nondegeneracy {
    pub fn is_yes(&self) -> bool {
        matches!(self, Nondegeneracy::Yes { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Nondegeneracy::Yes { .. } => "yes",
            Nondegeneracy::No { .. } => "no",
            Nondegeneracy::Unknown(_) => "unknown",
        }
    }
}

/// A chart with a closed `(n+1)`-form.
#[derive(Debug, Clone)]
pub struct PlecticStructure {
    chart: ChartRef,
    omega: FormExpr,
    n: usize,
    status: OnceLock<Nondegeneracy>,
}

pub fn koszul_sign(k: usize) -> i32 {
    assert!(k >= 1, "Koszul sign is defined for k >= 1");
    let t = k * (k + 1) / 2;
    if t.is_multiple_of(2) {
        -1
    } else {
        1
    }
}

fn sign_rational(s: i32) -> Rational {
    rat(s as i64)
}

fn subsets(m: usize, k: usize) -> Vec<MultiIndex> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant of a square polynomial matrix by Laplace expansion along rows,
/// memoized over the set of columns still available.
pub fn poly_determinant(chart: &ChartRef, rows: &[Vec<Poly>]) -> Poly {
    let m = rows.len();
    assert!(m <= 63, "determinant size limited to 63");
    fn rec(chart: &ChartRef, rows: &[Vec<Poly>], mask: u64, memo: &mut HashMap<u64, Poly>) -> Poly {
        if mask == 0 {
            return Poly::one(chart);
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let k = rows.len() - mask.count_ones() as usize;
        let mut acc = Poly::zero(chart);
        let mut position = 0;
        for c in 0..rows.len() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let entry = &rows[k][c];
            if !entry.is_zero() {
                let minor = rec(chart, rows, mask & !(1 << c), memo);
                let term = entry * &minor;
                acc = if position % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            position += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let full = if m == 0 { 0 } else { (1u64 << m) - 1 };
    rec(chart, rows, full, &mut HashMap::new())
}

impl PlecticStructure {
    /// Fails unless `omega` has degree at least two and is closed.
    pub fn new(omega: FormExpr) -> Result<PlecticStructure> {
        if omega.degree() < 2 {
            return Err(Error::DegreeMismatch(format!(
                "a pre-n-plectic form needs degree n+1 >= 2, got {}",
                omega.degree()
            )));
        }
        let d = exterior_derivative(&omega);
        if !d.is_zero() {
            return Err(Error::NotClosed(d.to_string()));
        }
        Ok(PlecticStructure {
            chart: omega.chart().clone(),
            n: omega.degree() - 1,
            omega,
            status: OnceLock::new(),
        })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn omega(&self) -> &FormExpr {
        &self.omega
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Lowest observable degree, `1 - n`.
    pub fn min_degree(&self) -> i32 {
        1 - self.n as i32
    }

    /// Columns of the flat map: n-subsets of coordinates; rows: coordinate fields.
    fn flat_matrix(&self) -> (Vec<MultiIndex>, Vec<Vec<Poly>>) {
        let m = self.chart.dim();
        let columns = subsets(m, self.n);
        let rows = (0..m)
            .map(|i| {
                let c = interior_product(&FieldExpr::coordinate(&self.chart, i), &self.omega)
                    .expect("same chart");
                columns.iter().map(|j| c.coefficient(j)).collect()
            })
            .collect();
        (columns, rows)
    }

    fn sample_points(&self) -> Vec<Vec<Rational>> {
        let m = self.chart.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e_ed0f_f1a7);
        let mut points = vec![vec![Rational::zero(); m]];
        for _ in 0..8 {
            points.push((0..m).map(|_| rat(rng.gen_range(-4..=4))).collect());
        }
        points
    }

    pub fn nondegeneracy(&self) -> &Nondegeneracy {
        self.status.get_or_init(|| self.compute_nondegeneracy())
    }

    fn compute_nondegeneracy(&self) -> Nondegeneracy {
        let m = self.chart.dim();
        let (columns, rows) = self.flat_matrix();
        if columns.len() < m {
            let mut kernel = vec![Rational::zero(); m];
            kernel[0] = Rational::one();
            return Nondegeneracy::No {
                point: vec![Rational::zero(); m],
                kernel,
            };
        }
        // Prefer columns whose entries are all constant when choosing pivots.
        let mut order: Vec<usize> = (0..columns.len()).collect();
        order.sort_by_key(|&c| rows.iter().any(|r| r[c].as_constant().is_none()));
        let points = self.sample_points();
        let evaluated: Vec<Matrix> = points
            .iter()
            .map(|pt| {
                Matrix::from_rows(
                    rows.iter()
                        .map(|r| {
                            order
                                .iter()
                                .map(|&c| r[c].evaluate(pt).expect("point length"))
                                .collect()
                        })
                        .collect(),
                )
            })
            .collect();
        let mut tried: Vec<Vec<usize>> = Vec::new();
        for mat in &evaluated {
            let pivots = mat.clone().rref();
            if pivots.len() < m {
                continue;
            }
            let chosen: Vec<usize> = pivots.iter().map(|&p| order[p]).collect();
            if tried.contains(&chosen) {
                continue;
            }
            let square: Vec<Vec<Poly>> = rows
                .iter()
                .map(|r| chosen.iter().map(|&c| r[c].clone()).collect())
                .collect();
            let det = poly_determinant(&self.chart, &square);
            if let Some(d) = det.as_constant() {
                if !d.is_zero() {
                    return Nondegeneracy::Yes {
                        columns: chosen.iter().map(|&c| columns[c].clone()).collect(),
                        determinant: d,
                    };
                }
            }
            tried.push(chosen);
        }
        for (pt, mat) in points.iter().zip(&evaluated) {
            // The flat map is v ↦ vᵀ M, so its kernel is the left kernel of M.
            let mut transpose = Matrix::zeros(mat.cols(), mat.rows());
            for r in 0..mat.rows() {
                for c in 0..mat.cols() {
                    transpose.set(c, r, mat.get(r, c).clone());
                }
            }
            if let Some(k) = transpose.kernel().into_iter().next() {
                return Nondegeneracy::No {
                    point: pt.clone(),
                    kernel: k,
                };
            }
        }
        Nondegeneracy::Unknown(
            "full rank at every sample point but no constant maximal minor".into(),
        )
    }

    pub fn check_nondegenerate(&self) -> &Nondegeneracy {
        self.nondegeneracy()
    }

    /// `d alpha + i_v omega == 0`.
    pub fn is_hamiltonian_pair(&self, v: &FieldExpr, alpha: &FormExpr) -> Result<bool> {
        if !alpha.is_zero() && alpha.degree() + 1 != self.n {
            return Err(Error::DegreeMismatch(format!(
                "Hamiltonian forms have degree {}, got {}",
                self.n - 1,
                alpha.degree()
            )));
        }
        let lhs = exterior_derivative(&alpha.clone().with_degree(self.n - 1));
        let rhs = interior_product(v, &self.omega)?;
        Ok(lhs.try_add(&rhs)?.is_zero())
    }

    /// The unique field `v` with `i_v omega = -d alpha`.
    ///
    /// Solved by Cramer's rule on the certified constant maximal minor, so the
    /// solution is polynomial whenever it exists; the full system is then
    /// verified exactly.
    pub fn hamiltonian_field_for(&self, alpha: &FormExpr) -> Result<FieldExpr> {
        if !alpha.is_zero() && alpha.degree() + 1 != self.n {
            return Err(Error::DegreeMismatch(format!(
                "Hamiltonian forms have degree {}, got {}",
                self.n - 1,
                alpha.degree()
            )));
        }
        let (columns, determinant) = match self.nondegeneracy() {
            Nondegeneracy::Yes {
                columns,
                determinant,
            } => (columns.clone(), determinant.clone()),
            other => {
                return Err(Error::Degenerate(format!(
                    "nondegeneracy is `{}`; supply the Hamiltonian field explicitly",
                    other.label()
                )))
            }
        };
        let m = self.chart.dim();
        let rhs = -&exterior_derivative(&alpha.clone().with_degree(self.n - 1));
        let flats: Vec<FormExpr> = (0..m)
            .map(|i| interior_product(&FieldExpr::coordinate(&self.chart, i), &self.omega))
            .collect::<Result<_>>()?;
        // A[J][i] = coefficient of dx_J in i_{∂_i} omega
        let a: Vec<Vec<Poly>> = columns
            .iter()
            .map(|j| flats.iter().map(|f| f.coefficient(j)).collect())
            .collect();
        let b: Vec<Poly> = columns.iter().map(|j| rhs.coefficient(j)).collect();
        let inv = determinant.recip();
        let mut components = Vec::with_capacity(m);
        for i in 0..m {
            if b.iter().all(Poly::is_zero) {
                components.push(Poly::zero(&self.chart));
                continue;
            }
            let replaced: Vec<Vec<Poly>> = a
                .iter()
                .zip(&b)
                .map(|(row, bj)| {
                    let mut row = row.clone();
                    row[i] = bj.clone();
                    row
                })
                .collect();
            components.push(poly_determinant(&self.chart, &replaced).scale(&inv));
        }
        let v = FieldExpr::new(&self.chart, components)?;
        if !self.is_hamiltonian_pair(&v, alpha)? {
            return Err(Error::NotHamiltonian(format!(
                "no field v satisfies i_v omega = -d({alpha})"
            )));
        }
        Ok(v)
    }
}

/// A graded element of the L∞-algebra of observables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observable {
    /// Degree 0: a Hamiltonian pair `(v, alpha)`.
    Pair { field: FieldExpr, form: FormExpr },
    /// Degree in `[1-n, -1]`: a form of degree `n - 1 + degree`.
    Form { degree: i32, form: FormExpr },
    /// The zero element in a degree where the graded space vanishes.
    Zero { degree: i32 },
}

impl Observable {
    pub fn degree(&self) -> i32 {
        match self {
            Observable::Pair { .. } => 0,
            Observable::Form { degree, .. } | Observable::Zero { degree } => *degree,
        }
    }

    pub fn zero(p: &PlecticStructure, degree: i32) -> Observable {
        if degree == 0 {
            Observable::Pair {
                field: FieldExpr::zero(&p.chart),
                form: FormExpr::zero(&p.chart, p.n - 1),
            }
        } else if degree < 0 && degree >= p.min_degree() {
            Observable::Form {
                degree,
                form: FormExpr::zero(&p.chart, (p.n as i32 - 1 + degree) as usize),
            }
        } else {
            Observable::Zero { degree }
        }
    }

    /// Checked Hamiltonian pair.
    pub fn pair(p: &PlecticStructure, field: FieldExpr, form: FormExpr) -> Result<Observable> {
        if !p.is_hamiltonian_pair(&field, &form)? {
            return Err(Error::NotHamiltonian(format!(
                "d({form}) != -i_v omega for v = {field}"
            )));
        }
        Ok(Observable::Pair {
            field,
            form: form.with_degree(p.n - 1),
        })
    }

    /// Degree-0 observable whose field is solved from the form.
    pub fn hamiltonian(p: &PlecticStructure, form: FormExpr) -> Result<Observable> {
        let field = p.hamiltonian_field_for(&form)?;
        Ok(Observable::Pair {
            field,
            form: form.with_degree(p.n - 1),
        })
    }

    /// Negative-degree observable; the form degree must be `n - 1 + degree`.
    pub fn form(p: &PlecticStructure, degree: i32, form: FormExpr) -> Result<Observable> {
        if degree >= 0 || degree < p.min_degree() {
            return Err(Error::DegreeMismatch(format!(
                "form observables have degrees in [{}, -1], got {degree}",
                p.min_degree()
            )));
        }
        let expected = (p.n as i32 - 1 + degree) as usize;
        if !form.is_zero() && form.degree() != expected {
            return Err(Error::DegreeMismatch(format!(
                "an observable of degree {degree} is a {expected}-form, got a {}-form",
                form.degree()
            )));
        }
        Ok(Observable::Form {
            degree,
            form: form.with_degree(expected),
        })
    }

    pub fn field(&self) -> Option<&FieldExpr> {
        match self {
            Observable::Pair { field, .. } => Some(field),
            _ => None,
        }
    }

    pub fn form_part(&self) -> Option<&FormExpr> {
        match self {
            Observable::Pair { form, .. } | Observable::Form { form, .. } => Some(form),
            Observable::Zero { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Observable::Pair { field, form } => field.is_zero() && form.is_zero(),
            Observable::Form { form, .. } => form.is_zero(),
            Observable::Zero { .. } => true,
        }
    }

    pub fn scale(&self, c: &Rational) -> Observable {
        match self {
            Observable::Pair { field, form } => Observable::Pair {
                field: field.scale(c),
                form: form.scale(c),
            },
            Observable::Form { degree, form } => Observable::Form {
                degree: *degree,
                form: form.scale(c),
            },
            Observable::Zero { degree } => Observable::Zero { degree: *degree },
        }
    }

    pub fn try_add(&self, other: &Observable) -> Result<Observable> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(format!(
                "cannot add observables of degree {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(match (self, other) {
            (
                Observable::Pair {
                    field: f1,
                    form: a1,
                },
                Observable::Pair {
                    field: f2,
                    form: a2,
                },
            ) => Observable::Pair {
                field: f1.try_add(f2)?,
                form: a1.try_add(a2)?,
            },
            (Observable::Form { degree, form: a1 }, Observable::Form { form: a2, .. }) => {
                Observable::Form {
                    degree: *degree,
                    form: a1.try_add(a2)?,
                }
            }
            (Observable::Zero { .. }, x) | (x, Observable::Zero { .. }) => x.clone(),
            _ => unreachable!("equal degrees imply equal variants"),
        })
    }

    pub fn try_sub(&self, other: &Observable) -> Result<Observable> {
        self.try_add(&other.scale(&-Rational::one()))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Pair { field, form } => write!(f, "({field}, {form})"),
            Observable::Form { degree, form } => write!(f, "[{degree}] {form}"),
            Observable::Zero { degree } => write!(f, "[{degree}] 0"),
        }
    }
}

/// The multibracket `l_k` of the L∞-algebra of observables.
pub fn multibracket(p: &PlecticStructure, args: &[Observable]) -> Result<Observable> {
    let k = args.len();
    if k == 0 {
        return Err(Error::Arity(
            "multibrackets take at least one argument".into(),
        ));
    }
    let out_degree = args.iter().map(Observable::degree).sum::<i32>() + 2 - k as i32;
    if k == 1 {
        return Ok(match &args[0] {
            Observable::Form { degree, form } => {
                let d = exterior_derivative(form);
                if *degree == -1 {
                    Observable::Pair {
                        field: FieldExpr::zero(&p.chart),
                        form: d,
                    }
                } else {
                    Observable::Form {
                        degree: degree + 1,
                        form: d,
                    }
                }
            }
            other => Observable::zero(p, other.degree() + 1),
        });
    }
    let fields: Option<Vec<FieldExpr>> = args.iter().map(|a| a.field().cloned()).collect();
    let Some(fields) = fields else {
        return Ok(Observable::zero(p, out_degree));
    };
    if out_degree < p.min_degree() {
        return Ok(Observable::zero(p, out_degree));
    }
    let form = contract(&fields, &p.omega)?.scale(&sign_rational(koszul_sign(k)));
    if k == 2 {
        Ok(Observable::Pair {
            field: lie_bracket(&fields[0], &fields[1])?,
            form,
        })
    } else {
        Ok(Observable::Form {
            degree: out_degree,
            form,
        })
    }
}

/// `{(u, alpha), (v, beta)} = ([u, v], L_u beta)`.
pub fn leibniz_bracket(p: &PlecticStructure, a: &Observable, b: &Observable) -> Result<Observable> {
    match (a, b) {
        (
            Observable::Pair { field: u, .. },
            Observable::Pair {
                field: v,
                form: beta,
            },
        ) => Ok(Observable::Pair {
            field: lie_bracket(u, v)?,
            form: lie_derivative(u, beta)?.with_degree(p.n - 1),
        }),
        _ => Err(Error::DegreeMismatch(
            "the Leibniz bracket takes two degree-0 observables".into(),
        )),
    }
}

/// One failed higher Jacobi identity.
#[derive(Debug, Clone)]
pub struct JacobiViolation {
    pub arity: usize,
    /// Sample indices of the tuple, or `None` for a random combination.
    pub indices: Option<Vec<usize>>,
    pub residual: String,
}

#[derive(Debug, Clone, Default)]
pub struct JacobiReport {
    pub identities_checked: usize,
    pub random_combinations: usize,
    pub violations: Vec<JacobiViolation>,
}

impl JacobiReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The left side of the arity-`m` higher Jacobi identity on `xs`:
/// `Σ_{i+j=m+1} Σ_{σ ∈ Sh(i,m-i)} sgn(σ) ε(σ) (-1)^{i(j-1)} l_j(l_i(x_σ..), x_σ..)`.
pub fn jacobi_sum(p: &PlecticStructure, xs: &[Observable]) -> Result<Observable> {
    let m = xs.len();
    let total_degree = xs.iter().map(Observable::degree).sum::<i32>() + 3 - m as i32;
    let mut acc = Observable::zero(p, total_degree);
    for i in 1..=m {
        let j = m + 1 - i;
        for chosen in subsets(m, i) {
            let rest: Vec<usize> = (0..m).filter(|x| !chosen.contains(x)).collect();
            let mut odd = false;
            for &a in &chosen {
                for &b in &rest {
                    if a > b {
                        // moving x_a past x_b: permutation sign times Koszul sign
                        let koszul = xs[a].degree() * xs[b].degree();
                        odd ^= (1 + koszul) % 2 != 0;
                    }
                }
            }
            if (i * (j - 1)) % 2 == 1 {
                odd = !odd;
            }
            let inner_args: Vec<Observable> = chosen.iter().map(|&c| xs[c].clone()).collect();
            let inner = multibracket(p, &inner_args)?;
            let mut outer_args = vec![inner];
            outer_args.extend(rest.iter().map(|&c| xs[c].clone()));
            let term = multibracket(p, &outer_args)?;
            let term = if odd {
                term.scale(&-Rational::one())
            } else {
                term
            };
            acc = acc.try_add(&term)?;
        }
    }
    Ok(acc)
}

pub(crate) fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Checks the higher Jacobi identities up to `max_arity` on every multiset
/// of sample elements, and on `random_per_arity` tuples of random rational
/// combinations of same-degree sample elements per arity and degree pattern.
pub fn check_higher_jacobi(
    p: &PlecticStructure,
    sample: &[Observable],
    max_arity: usize,
    random_per_arity: usize,
    seed: u64,
) -> Result<JacobiReport> {
    let mut report = JacobiReport::default();
    for m in 1..=max_arity {
        for tuple in multisets(sample.len(), m) {
            let xs: Vec<Observable> = tuple.iter().map(|&i| sample[i].clone()).collect();
            let r = jacobi_sum(p, &xs)?;
            report.identities_checked += 1;
            if !r.is_zero() {
                report.violations.push(JacobiViolation {
                    arity: m,
                    indices: Some(tuple),
                    residual: r.to_string(),
                });
            }
        }
    }
    if sample.is_empty() || random_per_arity == 0 {
        return Ok(report);
    }
    let mut degrees: Vec<i32> = sample.iter().map(Observable::degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 1..=max_arity {
        for pattern in multisets(degrees.len(), m) {
            for _ in 0..random_per_arity {
                let xs: Vec<Observable> = pattern
                    .iter()
                    .map(|&d| random_combination(p, sample, degrees[d], &mut rng))
                    .collect::<Result<_>>()?;
                let r = jacobi_sum(p, &xs)?;
                report.random_combinations += 1;
                if !r.is_zero() {
                    report.violations.push(JacobiViolation {
                        arity: m,
                        indices: None,
                        residual: r.to_string(),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn random_combination(
    p: &PlecticStructure,
    sample: &[Observable],
    degree: i32,
    rng: &mut ChaCha8Rng,
) -> Result<Observable> {
    let mut acc = Observable::zero(p, degree);
    for x in sample.iter().filter(|x| x.degree() == degree) {
        let c = Rational::new(
            rng.gen_range(-7i64..=7).into(),
            rng.gen_range(1i64..=5).into(),
        );
        acc = acc.try_add(&x.scale(&c))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::wedge;
    use crate::polyalg::Chart;

    fn var(c: &ChartRef, n: &str) -> Poly {
        Poly::var(c, n).unwrap()
    }

    fn dx(c: &ChartRef, n: &str) -> FormExpr {
        FormExpr::differential(c, c.index_of(n).unwrap())
    }

    fn e(c: &ChartRef, n: &str) -> FieldExpr {
        FieldExpr::coordinate(c, c.index_of(n).unwrap())
    }

    fn plane() -> PlecticStructure {
        let c = Chart::from_names("R2", &["x", "y"]).unwrap();
        PlecticStructure::new(wedge(&dx(&c, "x"), &dx(&c, "y")).unwrap()).unwrap()
    }

    fn scalar_field() -> (PlecticStructure, FormExpr) {
        let m = Chart::from_names("M", &["s1", "s2", "q", "p", "p1", "p2"]).unwrap();
        let t1 = wedge(&dx(&m, "s1"), &dx(&m, "s2"))
            .unwrap()
            .mul_fn(&var(&m, "p"));
        let t2 = wedge(&dx(&m, "s1"), &dx(&m, "q"))
            .unwrap()
            .mul_fn(&var(&m, "p1"));
        let t3 = wedge(&dx(&m, "s2"), &dx(&m, "q"))
            .unwrap()
            .mul_fn(&var(&m, "p2"));
        let theta = &(&t1 + &t2) + &t3;
        (
            PlecticStructure::new(exterior_derivative(&theta)).unwrap(),
            theta,
        )
    }

    #[test]
    fn koszul_table() {
        let t: Vec<i32> = (1..=5).map(koszul_sign).collect();
        assert_eq!(t, vec![1, 1, -1, -1, 1]);
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(plane().nondegeneracy().is_yes());
        let (s, _) = scalar_field();
        assert!(s.nondegeneracy().is_yes());
        let c = Chart::from_names("R2", &["x", "y"]).unwrap();
        let z = PlecticStructure::new(FormExpr::zero(&c, 2)).unwrap();
        match z.nondegeneracy() {
            Nondegeneracy::No { kernel, .. } => assert_eq!(kernel, &vec![rat(1), rat(0)]),
            other => panic!("expected a kernel witness, got {other:?}"),
        }
        let degenerate_at_origin = PlecticStructure::new(
            wedge(&dx(&c, "x"), &dx(&c, "y"))
                .unwrap()
                .mul_fn(&var(&c, "x")),
        )
        .unwrap();
        assert_eq!(degenerate_at_origin.nondegeneracy().label(), "no");
    }

    #[test]
    fn not_closed_is_rejected() {
        let c = Chart::from_names("R3", &["x", "y", "z"]).unwrap();
        let w = wedge(&dx(&c, "x"), &dx(&c, "y"))
            .unwrap()
            .mul_fn(&var(&c, "z"));
        assert!(matches!(PlecticStructure::new(w), Err(Error::NotClosed(_))));
    }

    #[test]
    fn hamiltonian_solver_examples() {
        let p = plane();
        let c = p.chart().clone();
        let v = p
            .hamiltonian_field_for(&FormExpr::function(var(&c, "x")))
            .unwrap();
        assert_eq!(v, e(&c, "y"));
        assert!(p
            .is_hamiltonian_pair(&e(&c, "y"), &FormExpr::function(var(&c, "x")))
            .unwrap());
        assert!(!p
            .is_hamiltonian_pair(&e(&c, "x"), &FormExpr::function(var(&c, "x")))
            .unwrap());
        let v0 = p
            .hamiltonian_field_for(&FormExpr::constant(&c, rat(3)))
            .unwrap();
        assert!(v0.is_zero());

        let (s, theta) = scalar_field();
        let m = s.chart().clone();
        let q = var(&m, "q");
        let vfield = &e(&m, "q").mul_fn(&(&q * &q))
            - &(&e(&m, "p1").mul_fn(&var(&m, "p1")) + &e(&m, "p2").mul_fn(&var(&m, "p2")))
                .mul_fn(&q.scale(&rat(2)));
        let mu = interior_product(&vfield, &theta).unwrap();
        assert_eq!(s.hamiltonian_field_for(&mu).unwrap(), vfield);
        assert!(s.is_hamiltonian_pair(&vfield, &mu).unwrap());

        // d(q dp) = dq^dp, and no term of omega contains both dq and dp
        let bad = dx(&m, "p").mul_fn(&q);
        assert!(matches!(
            s.hamiltonian_field_for(&bad),
            Err(Error::NotHamiltonian(_))
        ));
    }

    #[test]
    fn degenerate_structure_disables_solver() {
        let c = Chart::from_names("R2", &["x", "y"]).unwrap();
        let z = PlecticStructure::new(FormExpr::zero(&c, 2)).unwrap();
        assert!(matches!(
            z.hamiltonian_field_for(&FormExpr::function(var(&c, "x"))),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bracket_examples() {
        let p = plane();
        let c = p.chart().clone();
        let ox = Observable::hamiltonian(&p, FormExpr::function(var(&c, "x"))).unwrap();
        let oy = Observable::hamiltonian(&p, FormExpr::function(var(&c, "y"))).unwrap();
        let b = multibracket(&p, &[ox.clone(), oy.clone()]).unwrap();
        assert_eq!(b.field().unwrap(), &FieldExpr::zero(&c));
        assert_eq!(b.form_part().unwrap().as_function().unwrap(), Poly::one(&c));
        assert!(multibracket(&p, std::slice::from_ref(&ox))
            .unwrap()
            .is_zero());
        assert!(multibracket(&p, &[]).is_err());

        let lb = leibniz_bracket(&p, &ox, &oy).unwrap();
        assert!(lb.field().unwrap().is_zero());
        assert_eq!(
            lb.form_part().unwrap().as_function().unwrap(),
            Poly::one(&c)
        );
        assert!(leibniz_bracket(&p, &ox, &ox).unwrap().is_zero());

        let (s, theta) = scalar_field();
        let m = s.chart().clone();
        // Hamiltonian 1-forms for the translations: i_{∂s1} omega = -dp^ds2 - dp1^dq etc.
        let h1 = Observable::hamiltonian(
            &s,
            &dx(&m, "s2").mul_fn(&var(&m, "p")) + &dx(&m, "q").mul_fn(&var(&m, "p1")),
        )
        .unwrap();
        assert_eq!(h1.field().unwrap(), &e(&m, "s1"));
        let h2 = Observable::hamiltonian(
            &s,
            &(-&dx(&m, "s1").mul_fn(&var(&m, "p"))) + &dx(&m, "q").mul_fn(&var(&m, "p2")),
        )
        .unwrap();
        assert_eq!(h2.field().unwrap(), &e(&m, "s2"));
        let hq = Observable::hamiltonian(
            &s,
            &(-&dx(&m, "s1").mul_fn(&var(&m, "p1"))) - &dx(&m, "s2").mul_fn(&var(&m, "p2")),
        )
        .unwrap();
        assert_eq!(hq.field().unwrap(), &e(&m, "q"));
        let l3 = multibracket(&s, &[h1.clone(), h2.clone(), hq.clone()]).unwrap();
        // oracle: omega(∂s1, ∂s2, ∂q) has no dp... term without dp, so zero
        let direct = contract(&[e(&m, "s1"), e(&m, "s2"), e(&m, "q")], s.omega()).unwrap();
        assert!(direct.is_zero());
        assert_eq!(l3.degree(), -1);
        assert!(l3.is_zero());
        let hp = Observable::hamiltonian(&s, (-&dx(&m, "s2")).mul_fn(&var(&m, "s1"))).unwrap();
        assert_eq!(hp.field().unwrap(), &e(&m, "p"));
        let l3p = multibracket(&s, &[h1, h2, hp]).unwrap();
        // omega(∂s1, ∂s2, ∂p) = +1 from dp^ds1^ds2, times the sign -1
        assert_eq!(
            l3p.form_part().unwrap().as_function().unwrap(),
            Poly::from_int(&m, -1)
        );
        let vobs = Observable::hamiltonian(
            &s,
            interior_product(
                &(&e(&m, "q").mul_fn(&(&var(&m, "q") * &var(&m, "q")))
                    - &(&e(&m, "p1").mul_fn(&var(&m, "p1")) + &e(&m, "p2").mul_fn(&var(&m, "p2")))
                        .mul_fn(&var(&m, "q").scale(&rat(2)))),
                &theta,
            )
            .unwrap(),
        )
        .unwrap();
        assert!(leibniz_bracket(&s, &vobs, &vobs).unwrap().is_zero());
    }

    #[test]
    fn jacobi_on_plane() {
        let p = plane();
        let c = p.chart().clone();
        let (x, y) = (var(&c, "x"), var(&c, "y"));
        let sample: Vec<Observable> = [x.clone(), y.clone(), &x + &y, &x * &y]
            .into_iter()
            .map(|f| Observable::hamiltonian(&p, FormExpr::function(f)).unwrap())
            .collect();
        let report = check_higher_jacobi(&p, &sample, 3, 20, 7).unwrap();
        assert!(report.holds(), "{:?}", report.violations);
        assert!(check_higher_jacobi(&p, &[], 3, 20, 7).unwrap().holds());
    }

    #[test]
    fn jacobi_on_scalar_field_with_forms() {
        let (s, theta) = scalar_field();
        let m = s.chart().clone();
        let q = var(&m, "q");
        let lifts = [
            e(&m, "s1"),
            e(&m, "q")
                .mul_fn(&(&q * &q))
                .try_sub(
                    &(&e(&m, "p1").mul_fn(&var(&m, "p1")) + &e(&m, "p2").mul_fn(&var(&m, "p2")))
                        .mul_fn(&q.scale(&rat(2))),
                )
                .unwrap(),
            e(&m, "q")
                .mul_fn(&q)
                .try_sub(
                    &(&e(&m, "p1").mul_fn(&var(&m, "p1")) + &e(&m, "p2").mul_fn(&var(&m, "p2"))),
                )
                .unwrap(),
            e(&m, "s2"),
        ];
        let mut sample: Vec<Observable> = lifts
            .iter()
            .map(|v| Observable::hamiltonian(&s, interior_product(v, &theta).unwrap()).unwrap())
            .collect();
        sample.push(Observable::form(&s, -1, FormExpr::function(&q * &var(&m, "p1"))).unwrap());
        let report = check_higher_jacobi(&s, &sample, 4, 2, 11).unwrap();
        assert!(report.holds(), "{:?}", report.violations);
    }

    #[test]
    fn antisymmetry_of_binary_bracket() {
        let (s, theta) = scalar_field();
        let m = s.chart().clone();
        let a =
            Observable::hamiltonian(&s, interior_product(&e(&m, "s1"), &theta).unwrap()).unwrap();
        let q = var(&m, "q");
        let v = e(&m, "q")
            .mul_fn(&q)
            .try_sub(&(&e(&m, "p1").mul_fn(&var(&m, "p1")) + &e(&m, "p2").mul_fn(&var(&m, "p2"))))
            .unwrap();
        let b = Observable::hamiltonian(&s, interior_product(&v, &theta).unwrap()).unwrap();
        let ab = multibracket(&s, &[a.clone(), b.clone()]).unwrap();
        let ba = multibracket(&s, &[b, a]).unwrap();
        assert_eq!(ab, ba.scale(&-Rational::one()));
    }
}
