//! Closure properties of the reducible observables and of the vanishing
//! ideals, checked exhaustively over sample tuples.

use super::ConstraintAction;
use crate::cartan::{exterior_derivative, interior_product, lie_bracket, lie_derivative, FormExpr};
use crate::error::Result;
use crate::plectic::{multibracket, multisets, Observable};

#[derive(Debug, Clone, Default)]
pub struct ClosureReport {
    pub tuples_checked: usize,
    /// Sample indices skipped because the observable is not reducible.
    pub skipped: Vec<usize>,
    /// Brackets of reducible observables that are not reducible.
    pub reducible_violations: Vec<String>,
    /// Brackets with a vanishing argument that do not vanish.
    pub vanishing_violations: Vec<String>,
    /// Brackets of tangent generators that are not tangent.
    pub tangent_violations: Vec<String>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.reducible_violations.is_empty()
            && self.vanishing_violations.is_empty()
            && self.tangent_violations.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct FormClosureReport {
    pub forms_checked: usize,
    /// Sample indices skipped because the form is not in the ideal.
    pub skipped: Vec<usize>,
    pub violations: Vec<String>,
}

impl FormClosureReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ConstraintAction {
    /// Tangent generators close under the bracket, multibrackets of
    /// reducible samples are reducible, and multibrackets with a vanishing
    /// argument vanish, for every multiset of samples up to `max_arity`.
    pub fn check_closure(&self, sample: &[Observable], max_arity: usize) -> Result<ClosureReport> {
        let mut report = ClosureReport::default();
        let gens = self.tangent_generators();
        for (i, u) in gens.iter().enumerate() {
            for (j, v) in gens.iter().enumerate().skip(i + 1) {
                let b = lie_bracket(u, v)?;
                if !self.is_tangent(&b)?.tangent {
                    report
                        .tangent_violations
                        .push(format!("[u{i}, u{j}] = {b} is not tangent"));
                }
            }
        }
        let mut entries = Vec::new();
        for (i, o) in sample.iter().enumerate() {
            if !self.all_zero(&self.observable_reducible_checks(o)?) {
                report.skipped.push(i);
                continue;
            }
            let vanishing = self.all_zero(&self.observable_vanishing_checks(o)?);
            entries.push((i, o, vanishing));
        }
        let p = self.plectic();
        for k in 1..=max_arity {
            for tuple in multisets(entries.len(), k) {
                report.tuples_checked += 1;
                let args: Vec<Observable> = tuple.iter().map(|&t| entries[t].1.clone()).collect();
                let indices: Vec<usize> = tuple.iter().map(|&t| entries[t].0).collect();
                let out = multibracket(p, &args)?;
                if !self.all_zero(&self.observable_reducible_checks(&out)?) {
                    report.reducible_violations.push(format!(
                        "l{k} on samples {indices:?} = {out} is not reducible"
                    ));
                    continue;
                }
                let any_vanishing = tuple.iter().any(|&t| entries[t].2);
                if any_vanishing && !self.all_zero(&self.observable_vanishing_checks(&out)?) {
                    report.vanishing_violations.push(format!(
                        "l{k} on samples {indices:?} = {out} does not vanish"
                    ));
                }
            }
        }
        Ok(report)
    }

    /// Forms of the vanishing form ideal stay in it under `d`, contraction
    /// and Lie derivative along tangent generators.
    pub fn check_vanishing_form_closure(&self, sample: &[FormExpr]) -> Result<FormClosureReport> {
        let mut report = FormClosureReport::default();
        for (i, a) in sample.iter().enumerate() {
            if !self.all_zero(&self.form_checks(a, "alpha")?) {
                report.skipped.push(i);
                continue;
            }
            report.forms_checked += 1;
            let mut images = vec![(format!("d(sample {i})"), exterior_derivative(a))];
            for (j, u) in self.tangent_generators().iter().enumerate() {
                if a.degree() > 0 {
                    images.push((format!("i_u{j}(sample {i})"), interior_product(u, a)?));
                }
                images.push((format!("L_u{j}(sample {i})"), lie_derivative(u, a)?));
            }
            for (name, b) in images {
                if !self.all_zero(&self.form_checks(&b, "image")?) {
                    report
                        .violations
                        .push(format!("{name} = {b} left the ideal"));
                }
            }
        }
        Ok(report)
    }

    fn all_zero(&self, checks: &[super::Check]) -> bool {
        checks.iter().all(super::Check::residual_is_zero)
    }
}
