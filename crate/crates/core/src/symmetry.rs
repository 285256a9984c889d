//! Infinitesimal Lie algebra actions, covariant moment maps, level-set ideals
//! and prolongation of vector fields to multicotangent charts.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::cartan::{
    exterior_derivative, interior_product, lie_bracket, lie_derivative, FieldExpr, FormExpr,
};
use crate::error::{Error, Result};
use crate::groebner::Ideal;
use crate::linalg::Matrix;
use crate::plectic::PlecticStructure;
use crate::polyalg::{ChartRef, Exponent, Poly, Rational};

/// A Lie algebra acting through fundamental vector fields, with
/// `[ξ_i, ξ_j] = Σ_k c[i][j][k] ξ_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraAction {
    chart: ChartRef,
    fields: Vec<FieldExpr>,
    constants: Vec<Vec<Vec<Rational>>>,
}

/// `[ξ_i, ξ_j]` differs from the declared combination by `residual`.
#[derive(Debug, Clone)]
pub struct BracketViolation {
    pub i: usize,
    pub j: usize,
    pub residual: FieldExpr,
}

#[derive(Debug, Clone, Default)]
pub struct ActionReport {
    pub bracket_violations: Vec<BracketViolation>,
    /// Index pairs `(i, j)` with `c_ij != -c_ji`.
    pub antisymmetry_violations: Vec<(usize, usize)>,
    /// Index triples failing the Jacobi constraint on the structure constants.
    pub jacobi_violations: Vec<(usize, usize, usize)>,
}

impl ActionReport {
    pub fn passes(&self) -> bool {
        self.bracket_violations.is_empty()
            && self.antisymmetry_violations.is_empty()
            && self.jacobi_violations.is_empty()
    }
}

impl LieAlgebraAction {
    /// An abelian action: all structure constants zero.
    pub fn abelian(chart: &ChartRef, fields: Vec<FieldExpr>) -> Result<LieAlgebraAction> {
        let m = fields.len();
        LieAlgebraAction::new(chart, fields, vec![vec![vec![Rational::zero(); m]; m]; m])
    }

    pub fn new(
        chart: &ChartRef,
        fields: Vec<FieldExpr>,
        constants: Vec<Vec<Vec<Rational>>>,
    ) -> Result<LieAlgebraAction> {
        let m = fields.len();
        for f in &fields {
            if f.chart() != chart {
                return Err(Error::IncompatibleCharts);
            }
        }
        let shape_ok = constants.len() == m
            && constants
                .iter()
                .all(|row| row.len() == m && row.iter().all(|c| c.len() == m));
        if !shape_ok {
            return Err(Error::LengthMismatch {
                expected: m,
                found: constants.len(),
            });
        }
        Ok(LieAlgebraAction {
            chart: chart.clone(),
            fields,
            constants,
        })
    }

    /// Sets `c_ij^k = value` and `c_ji^k = -value`.
    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, value: Rational) -> Result<()> {
        let m = self.fields.len();
        if i >= m || j >= m || k >= m {
            return Err(Error::LengthMismatch {
                expected: m,
                found: i.max(j).max(k) + 1,
            });
        }
        if i == j && !value.is_zero() {
            return Err(Error::VerificationFailed(format!(
                "structure constant c_{i}{i}^{k} must vanish, got {value}"
            )));
        }
        self.constants[j][i][k] = -value.clone();
        self.constants[i][j][k] = value;
        Ok(())
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[FieldExpr] {
        &self.fields
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.constants[i][j][k]
    }

    /// `Σ_k c_ij^k ξ_k`.
    pub fn declared_bracket(&self, i: usize, j: usize) -> FieldExpr {
        let mut out = FieldExpr::zero(&self.chart);
        for (k, f) in self.fields.iter().enumerate() {
            let c = &self.constants[i][j][k];
            if !c.is_zero() {
                out = &out + &f.scale(c);
            }
        }
        out
    }
}

pub fn verify_action(a: &LieAlgebraAction) -> Result<ActionReport> {
    let m = a.dim();
    let mut report = ActionReport::default();
    for i in 0..m {
        for j in 0..m {
            if i < j {
                let actual = lie_bracket(&a.fields[i], &a.fields[j])?;
                let residual = actual.try_sub(&a.declared_bracket(i, j))?;
                if !residual.is_zero() {
                    report
                        .bracket_violations
                        .push(BracketViolation { i, j, residual });
                }
            }
            if i <= j {
                let ok = (0..m).all(|k| (&a.constants[i][j][k] + &a.constants[j][i][k]).is_zero());
                if !ok {
                    report.antisymmetry_violations.push((i, j));
                }
            }
        }
    }
    // Σ_l (c_ij^l c_lk^r + c_jk^l c_li^r + c_ki^l c_lj^r) = 0
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let ok = (0..m).all(|r| {
                    let mut s = Rational::zero();
                    for l in 0..m {
                        s += &a.constants[i][j][l] * &a.constants[l][k][r];
                        s += &a.constants[j][k][l] * &a.constants[l][i][r];
                        s += &a.constants[k][i][l] * &a.constants[l][j][r];
                    }
                    s.is_zero()
                });
                if !ok {
                    report.jacobi_violations.push((i, j, k));
                }
            }
        }
    }
    Ok(report)
}

/// Components `μ_i` of a covariant moment map and the level `φ_i`.
#[derive(Debug, Clone)]
pub struct MomentMap {
    pub action: LieAlgebraAction,
    pub components: Vec<FormExpr>,
    pub level: Vec<FormExpr>,
}

impl MomentMap {
    /// A moment map at level zero.
    pub fn new(action: LieAlgebraAction, components: Vec<FormExpr>) -> Result<MomentMap> {
        if components.len() != action.dim() {
            return Err(Error::LengthMismatch {
                expected: action.dim(),
                found: components.len(),
            });
        }
        let level = components
            .iter()
            .map(|c| FormExpr::zero(c.chart(), c.degree()))
            .collect();
        Ok(MomentMap {
            action,
            components,
            level,
        })
    }

    pub fn with_level(mut self, level: Vec<FormExpr>) -> Result<MomentMap> {
        if level.len() != self.components.len() {
            return Err(Error::LengthMismatch {
                expected: self.components.len(),
                found: level.len(),
            });
        }
        for l in &level {
            if !exterior_derivative(l).is_zero() {
                return Err(Error::NotClosed(format!("level component {l}")));
            }
        }
        self.level = level;
        Ok(self)
    }
}

#[derive(Debug, Clone, Default)]
pub struct MomentReport {
    /// `(i, dμ_i + i_{ξ_i} ω)` for every failing component.
    pub derivative_violations: Vec<(usize, FormExpr)>,
    /// `(i, j, L_{ξ_i} μ_j - Σ_k c_ij^k μ_k)` for every failing pair.
    pub equivariance_violations: Vec<(usize, usize, FormExpr)>,
}

impl MomentReport {
    pub fn derivative_holds(&self) -> bool {
        self.derivative_violations.is_empty()
    }

    pub fn equivariance_holds(&self) -> bool {
        self.equivariance_violations.is_empty()
    }

    pub fn passes(&self) -> bool {
        self.derivative_holds() && self.equivariance_holds()
    }
}

/// Checks `dμ_ξ = -i_ξ ω` and `L_{ξ_i} μ_j = Σ_k c_ij^k μ_k` for all basis elements.
pub fn check_covariant_moment_map(p: &PlecticStructure, m: &MomentMap) -> Result<MomentReport> {
    let a = &m.action;
    if m.components.len() != a.dim() {
        return Err(Error::LengthMismatch {
            expected: a.dim(),
            found: m.components.len(),
        });
    }
    let mut report = MomentReport::default();
    for (i, (xi, mu)) in a.fields.iter().zip(&m.components).enumerate() {
        let residual = exterior_derivative(mu).try_add(&interior_product(xi, p.omega())?)?;
        if !residual.is_zero() {
            report.derivative_violations.push((i, residual));
        }
    }
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let lhs = lie_derivative(&a.fields[i], &m.components[j])?;
            let mut rhs = FormExpr::zero(p.chart(), m.components[j].degree());
            for (k, mu) in m.components.iter().enumerate() {
                let c = a.constant(i, j, k);
                if !c.is_zero() {
                    rhs = rhs.try_add(&mu.scale(c))?;
                }
            }
            let residual = lhs.try_sub(&rhs)?;
            if !residual.is_zero() {
                report.equivariance_violations.push((i, j, residual));
            }
        }
    }
    Ok(report)
}

/// `μ_i = i_{ξ_i} θ` for an invariant potential `θ` of `ω`.
pub fn moment_from_potential(
    p: &PlecticStructure,
    a: &LieAlgebraAction,
    theta: &FormExpr,
) -> Result<MomentMap> {
    let residual = exterior_derivative(theta).try_sub(p.omega())?;
    if !residual.is_zero() {
        return Err(Error::NotAPotential(residual.to_string()));
    }
    let mut components = Vec::with_capacity(a.dim());
    for (index, xi) in a.fields.iter().enumerate() {
        let l = lie_derivative(xi, theta)?;
        if !l.is_zero() {
            return Err(Error::NotInvariant {
                index,
                residual: l.to_string(),
            });
        }
        components.push(interior_product(xi, theta)?);
    }
    MomentMap::new(a.clone(), components)
}

/// The ideal generated by every coefficient of every `μ_i - φ_i`.
pub fn level_set_ideal(m: &MomentMap) -> Result<Ideal> {
    let chart = m.action.chart();
    let mut gens = Vec::new();
    for (mu, phi) in m.components.iter().zip(&m.level) {
        gens.extend(mu.try_sub(phi)?.coefficients());
    }
    Ideal::new(chart, gens)
}

/// The subalgebra of `ξ` with `L_ξ φ_ζ = φ_[ξ,ζ]` for every basis `ζ`,
/// returned as an action by the corresponding combinations of fields.
pub fn isotropy_subalgebra(m: &MomentMap) -> Result<LieAlgebraAction> {
    let a = &m.action;
    let dim = a.dim();
    if m.level.iter().all(FormExpr::is_zero) {
        return Ok(a.clone());
    }
    // condition_i = (L_{ξ_i} φ_j - Σ_k c_ij^k φ_k)_j, linear in the coefficient of ξ_i
    let mut columns: Vec<BTreeMap<(usize, Vec<usize>, Exponent), Rational>> = Vec::new();
    for i in 0..dim {
        let mut col = BTreeMap::new();
        for j in 0..dim {
            let mut r = lie_derivative(&a.fields[i], &m.level[j])?;
            for k in 0..dim {
                let c = a.constant(i, j, k);
                if !c.is_zero() {
                    r = r.try_sub(&m.level[k].scale(c))?;
                }
            }
            for ((idx, e), q) in r.coordinates() {
                col.insert((j, idx, e), q);
            }
        }
        columns.push(col);
    }
    let keys: BTreeSet<_> = columns.iter().flat_map(|c| c.keys().cloned()).collect();
    let rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|k| {
            columns
                .iter()
                .map(|c| c.get(k).cloned().unwrap_or_else(Rational::zero))
                .collect()
        })
        .collect();
    let kernel = if rows.is_empty() {
        Matrix::zeros(0, dim).kernel()
    } else {
        Matrix::from_rows(rows).kernel()
    };
    let fields: Vec<FieldExpr> = kernel
        .iter()
        .map(|v| {
            let mut f = FieldExpr::zero(a.chart());
            for (c, xi) in v.iter().zip(&a.fields) {
                if !c.is_zero() {
                    f = &f + &xi.scale(c);
                }
            }
            f
        })
        .collect();
    let sub_dim = kernel.len();
    let mut basis = Matrix::zeros(dim, sub_dim);
    for (s, v) in kernel.iter().enumerate() {
        for (i, c) in v.iter().enumerate() {
            basis.set(i, s, c.clone());
        }
    }
    let mut constants = vec![vec![vec![Rational::zero(); sub_dim]; sub_dim]; sub_dim];
    for s in 0..sub_dim {
        for t in 0..sub_dim {
            let mut coords = vec![Rational::zero(); dim];
            for i in 0..dim {
                for j in 0..dim {
                    let w = &kernel[s][i] * &kernel[t][j];
                    if w.is_zero() {
                        continue;
                    }
                    for (k, slot) in coords.iter_mut().enumerate() {
                        *slot += &w * a.constant(i, j, k);
                    }
                }
            }
            let x = basis.solve(&coords).ok_or_else(|| {
                Error::VerificationFailed(
                    "isotropy directions are not closed under brackets".into(),
                )
            })?;
            constants[s][t] = x;
        }
    }
    LieAlgebraAction::new(a.chart(), fields, constants)
}

/// The lift `ṽ` of a base field with base components `v` and `L_ṽ θ = 0`.
///
/// Fiber coordinates are the total-chart coordinates not on the base. The
/// potential must not involve fiber differentials, which makes the defining
/// equation `L_v θ + Σ_j A^j i_{∂_j} dθ = 0` algebraic in the fiber components
/// `A^j`; their coefficients `i_{∂_j} dθ` must be constant. When `horizontal`
/// coordinates are given, the horizontal components of `v` may depend only on
/// them.
pub fn prolong_field(
    base: &ChartRef,
    total: &ChartRef,
    theta: &FormExpr,
    v: &FieldExpr,
    horizontal: Option<&[String]>,
) -> Result<FieldExpr> {
    if v.chart() != base || theta.chart() != total {
        return Err(Error::IncompatibleCharts);
    }
    let base_in_total: Vec<usize> = base
        .variables()
        .iter()
        .map(|name| total.require_index(name))
        .collect::<Result<_>>()?;
    let fiber: Vec<usize> = (0..total.dim())
        .filter(|i| !base_in_total.contains(i))
        .collect();
    if let Some(h) = horizontal {
        let h_idx: Vec<usize> = h
            .iter()
            .map(|name| base.require_index(name))
            .collect::<Result<_>>()?;
        for &hi in &h_idx {
            let comp = v.component(hi);
            if let Some(bad) = (0..base.dim()).find(|j| !h_idx.contains(j) && comp.depends_on(*j)) {
                return Err(Error::NotProjectable(format!(
                    "the {} component depends on {}",
                    base.variable(hi),
                    base.variable(bad)
                )));
            }
        }
    }
    for (idx, _) in theta.terms() {
        if idx.iter().any(|i| fiber.contains(i)) {
            return Err(Error::Unsupported(
                "prolongation needs a potential without fiber differentials".into(),
            ));
        }
    }
    let lifted_base = v.to_chart(total)?;
    let omega = exterior_derivative(theta);
    let target = lie_derivative(&lifted_base, theta)?;
    let directions: Vec<FormExpr> = fiber
        .iter()
        .map(|&j| interior_product(&FieldExpr::coordinate(total, j), &omega))
        .collect::<Result<_>>()?;
    let mut index_keys: BTreeSet<Vec<usize>> = BTreeSet::new();
    for d in &directions {
        for (idx, c) in d.terms() {
            if c.as_constant().is_none() {
                return Err(Error::Unsupported(
                    "prolongation needs constant fiber contractions of d(theta)".into(),
                ));
            }
            index_keys.insert(idx.clone());
        }
    }
    for (idx, _) in target.terms() {
        index_keys.insert(idx.clone());
    }
    let index_keys: Vec<Vec<usize>> = index_keys.into_iter().collect();
    let matrix = Matrix::from_rows(
        index_keys
            .iter()
            .map(|idx| {
                directions
                    .iter()
                    .map(|d| d.coefficient(idx).as_constant().expect("checked constant"))
                    .collect()
            })
            .collect(),
    );
    // Solve monomial by monomial: Σ_j A^j_e c_{jJ} = -(L_v θ)_{J,e}.
    let mut monomials: BTreeSet<Exponent> = BTreeSet::new();
    for (_, c) in target.terms() {
        monomials.extend(c.terms().map(|(e, _)| e.clone()));
    }
    let mut components: Vec<Poly> = vec![Poly::zero(total); fiber.len()];
    for e in monomials {
        let rhs: Vec<Rational> = index_keys
            .iter()
            .map(|idx| -target.coefficient(idx).coefficient(&e))
            .collect();
        let x = matrix.solve(&rhs).ok_or_else(|| {
            Error::NoInvariantLift(format!(
                "L_v theta = {target} is not cancelled by fiber terms"
            ))
        })?;
        for (comp, c) in components.iter_mut().zip(x) {
            *comp = &*comp + &Poly::monomial(total, e.clone(), c);
        }
    }
    let mut lifted = lifted_base;
    for (&j, a) in fiber.iter().zip(components) {
        lifted = &lifted + &FieldExpr::coordinate(total, j).mul_fn(&a);
    }
    let check = lie_derivative(&lifted, theta)?;
    if !check.is_zero() {
        return Err(Error::NoInvariantLift(format!("residual {check}")));
    }
    Ok(lifted)
}
