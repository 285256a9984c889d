//! Bases of the reduced algebra in a fixed degree, by linear algebra over a
//! finite family of candidate observables. Every condition is a normal form,
//! and normal forms are linear, so reducible and vanishing combinations are
//! kernels of rational matrices.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{flatten, ConstraintAction, Coordinates};
use crate::cartan::FormExpr;
use crate::error::{Error, Result};
use crate::linalg::{row_space, Matrix};
use crate::plectic::{Nondegeneracy, Observable};
use crate::polyalg::{Poly, Rational};

/// Representatives of a basis of the reduced space spanned by a candidate
/// family, with the dimensions of the reducible and vanishing subspaces.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    pub representatives: Vec<Observable>,
    pub candidates: usize,
    pub reducible_dim: usize,
    pub vanishing_dim: usize,
}

impl ReducedBasis {
    /// The functions of the representatives when they are Hamiltonian pairs
    /// with function forms.
    pub fn functions(&self) -> Option<Vec<Poly>> {
        self.representatives
            .iter()
            .map(|o| o.form_part().and_then(FormExpr::as_function))
            .collect()
    }
}

fn matrix_of(columns: &[Coordinates]) -> Matrix {
    let keys: BTreeSet<_> = columns.iter().flat_map(|c| c.keys().cloned()).collect();
    let mut m = Matrix::zeros(keys.len(), columns.len());
    for (r, key) in keys.iter().enumerate() {
        for (c, col) in columns.iter().enumerate() {
            if let Some(v) = col.get(key) {
                m.set(r, c, v.clone());
            }
        }
    }
    m
}

fn combine(columns: &[Coordinates], weights: &[Rational]) -> Coordinates {
    let mut out = Coordinates::new();
    for (col, w) in columns.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (k, v) in col {
            let e = out.entry(k.clone()).or_insert_with(Rational::zero);
            *e += v * w;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Kernel of a family of linear conditions given column by column.
fn kernel(columns: &[Coordinates]) -> Vec<Vec<Rational>> {
    matrix_of(columns).kernel()
}

impl ConstraintAction {
    /// A basis of the reduced degree-0 algebra restricted to functions of
    /// total degree at most `degree`. Only symplectic structures are
    /// supported; use [`ConstraintAction::reduced_basis_from_candidates`]
    /// otherwise.
    pub fn reduced_basis_upto_degree(&self, degree: u32) -> Result<ReducedBasis> {
        let p = self.plectic();
        if p.n() != 1 {
            return Err(Error::Unsupported(format!(
                "degree-bounded bases need a symplectic form; this form has degree {}, \
                 supply candidate observables instead",
                p.n() + 1
            )));
        }
        if !matches!(p.nondegeneracy(), Nondegeneracy::Yes { .. }) {
            return Err(Error::NotSymplectic(format!(
                "nondegeneracy of {} is not certified",
                p.omega()
            )));
        }
        let chart = self.chart();
        let mut monomials: Vec<Vec<u32>> = Vec::new();
        let m = chart.dim();
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
        rec(0, degree, &mut vec![0; m], &mut monomials);
        let order = self.order();
        monomials.sort_by(|a, b| order.cmp(a, b));
        let candidates = monomials
            .into_iter()
            .map(|e| {
                let f = Poly::monomial(chart, e, Rational::from_integer(1.into()));
                Observable::hamiltonian(p, FormExpr::function(f))
            })
            .collect::<Result<Vec<_>>>()?;
        self.reduced_basis_from_candidates(&candidates)
    }

    /// A basis of (reducible combinations of `candidates`) modulo (vanishing
    /// ones). Later candidates count as larger: each representative is
    /// reduced so that the vanishing subspace cannot cancel any of its
    /// largest candidates, and is scaled to have leading coefficient one.
    pub fn reduced_basis_from_candidates(&self, candidates: &[Observable]) -> Result<ReducedBasis> {
        let n = candidates.len();
        if n == 0 {
            return Ok(ReducedBasis {
                representatives: Vec::new(),
                candidates: 0,
                reducible_dim: 0,
                vanishing_dim: 0,
            });
        }
        let degree = candidates[0].degree();
        if candidates.iter().any(|c| c.degree() != degree) {
            return Err(Error::DegreeMismatch(
                "candidate observables must share one degree".into(),
            ));
        }
        let reducible_cols: Vec<Coordinates> = candidates
            .iter()
            .map(|c| Ok(flatten(&self.observable_reducible_checks(c)?)))
            .collect::<Result<_>>()?;
        let reducible = kernel(&reducible_cols);

        let vanishing_cols: Vec<Coordinates> = candidates
            .iter()
            .map(|c| Ok(flatten(&self.observable_vanishing_checks(c)?)))
            .collect::<Result<_>>()?;
        let restricted: Vec<Coordinates> = reducible
            .iter()
            .map(|r| combine(&vanishing_cols, r))
            .collect();
        let vanishing: Vec<Vec<Rational>> = kernel(&restricted)
            .iter()
            .map(|t| {
                let mut v = vec![Rational::zero(); n];
                for (r, w) in reducible.iter().zip(t) {
                    for (x, y) in v.iter_mut().zip(r) {
                        *x += y * w;
                    }
                }
                v
            })
            .collect();

        // Reverse coordinates so that pivots land on the largest candidates.
        let rev = |v: &Vec<Rational>| v.iter().rev().cloned().collect::<Vec<_>>();
        let (v_rows, v_pivots) = row_space(&vanishing.iter().map(rev).collect::<Vec<_>>(), n);
        let reduced: Vec<Vec<Rational>> = reducible
            .iter()
            .map(|r| {
                let mut r = rev(r);
                for (row, &p) in v_rows.iter().zip(&v_pivots) {
                    if r[p].is_zero() {
                        continue;
                    }
                    let f = r[p].clone();
                    for (x, y) in r.iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
                r
            })
            .collect();
        let (q_rows, q_pivots) = row_space(&reduced, n);
        let mut reps: Vec<(usize, Vec<Rational>)> = q_rows
            .into_iter()
            .zip(q_pivots)
            .map(|(row, p)| (n - 1 - p, rev(&row)))
            .collect();
        reps.sort_by_key(|(lead, _)| *lead);

        let p = self.plectic();
        let representatives = reps
            .into_iter()
            .map(|(_, weights)| {
                let mut acc = Observable::zero(p, degree);
                for (c, w) in candidates.iter().zip(&weights) {
                    if !w.is_zero() {
                        acc = acc.try_add(&c.scale(w))?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReducedBasis {
            representatives,
            candidates: n,
            reducible_dim: reducible.len(),
            vanishing_dim: vanishing.len(),
        })
    }
}
