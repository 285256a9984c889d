//! Predicates for functions on a symplectic chart (`n = 1`), where degree-0
//! observables are functions with their Hamiltonian fields.

use super::ConstraintAction;
use crate::cartan::{contract, FormExpr};
use crate::error::{Error, Result};
use crate::plectic::{Nondegeneracy, Observable, PlecticStructure};
use crate::polyalg::Poly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticPredicates {
    /// `{f, g} ∈ I_N` for every constraint generator `g`.
    pub first_class: bool,
    /// `f` lies in the momentum ideal; `None` when none is attached.
    pub in_momentum_ideal: Option<bool>,
    /// The Hamiltonian field of `f` vanishes along `N`.
    pub casimir_along_constraints: bool,
    pub reducible: bool,
    /// `false` whenever `f` is not reducible.
    pub vanishing: bool,
}

/// Products and brackets checked on pairs of sample functions.
#[derive(Debug, Clone, Default)]
pub struct DescentReport {
    pub pairs_checked: usize,
    /// Sample indices skipped because the function is not reducible.
    pub skipped: Vec<usize>,
    pub violations: Vec<String>,
}

impl DescentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn require_symplectic(p: &PlecticStructure) -> Result<()> {
    if p.n() != 1 {
        return Err(Error::NotSymplectic(format!(
            "the structure form has degree {}",
            p.n() + 1
        )));
    }
    if !matches!(p.nondegeneracy(), Nondegeneracy::Yes { .. }) {
        return Err(Error::NotSymplectic(format!(
            "nondegeneracy of {} is not certified",
            p.omega()
        )));
    }
    Ok(())
}

/// `{f, g} = ω(v_f, v_g)` with `ι_{v_f} ω = -df`.
pub fn poisson_bracket(p: &PlecticStructure, f: &Poly, g: &Poly) -> Result<Poly> {
    require_symplectic(p)?;
    let vf = p.hamiltonian_field_for(&FormExpr::function(f.clone()))?;
    let vg = p.hamiltonian_field_for(&FormExpr::function(g.clone()))?;
    Ok(contract(&[vf, vg], p.omega())?
        .as_function()
        .expect("full contraction is a function"))
}

impl ConstraintAction {
    fn function_observable(&self, f: &Poly) -> Result<Observable> {
        require_symplectic(self.plectic())?;
        Observable::hamiltonian(self.plectic(), FormExpr::function(f.clone()))
    }

    fn function_vanishes(&self, o: &Observable) -> Result<bool> {
        Ok(self
            .observable_vanishing_checks(o)?
            .iter()
            .all(|c| c.residual_is_zero()))
    }

    fn function_reducible(&self, o: &Observable) -> Result<bool> {
        Ok(self
            .observable_reducible_checks(o)?
            .iter()
            .all(|c| c.residual_is_zero()))
    }

    pub fn symplectic_predicates(&self, f: &Poly) -> Result<SymplecticPredicates> {
        let o = self.function_observable(f)?;
        let p = self.plectic();
        let mut first_class = true;
        for g in self.ideal().generators() {
            if !self.ideal().contains(&poisson_bracket(p, f, g)?)? {
                first_class = false;
                break;
            }
        }
        let in_momentum_ideal = match self.momentum() {
            Some(m) => Some(m.contains(f)?),
            None => None,
        };
        let field = o.field().expect("function observables are pairs");
        let casimir_along_constraints = self.in_vanishing_field_ideal(field)?;
        let reducible = self.function_reducible(&o)?;
        let vanishing = reducible && self.function_vanishes(&o)?;
        Ok(SymplecticPredicates {
            first_class,
            in_momentum_ideal,
            casimir_along_constraints,
            reducible,
            vanishing,
        })
    }

    /// For every pair of reducible sample functions, `fg` and `{f, g}` are
    /// reducible, and vanish whenever `f` or `g` does.
    pub fn check_poisson_descent(&self, sample: &[Poly]) -> Result<DescentReport> {
        let p = self.plectic();
        let mut report = DescentReport::default();
        let mut entries = Vec::new();
        for (i, f) in sample.iter().enumerate() {
            let o = self.function_observable(f)?;
            if !self.function_reducible(&o)? {
                report.skipped.push(i);
                continue;
            }
            let vanishing = self.function_vanishes(&o)?;
            entries.push((i, f, vanishing));
        }
        for (a, &(i, f, vf)) in entries.iter().enumerate() {
            for &(j, g, vg) in &entries[a..] {
                report.pairs_checked += 1;
                let results = [("f*g", f * g), ("{f, g}", poisson_bracket(p, f, g)?)];
                for (name, h) in results {
                    let o = self.function_observable(&h)?;
                    if !self.function_reducible(&o)? {
                        report
                            .violations
                            .push(format!("{name} for samples {i}, {j} is not reducible: {h}"));
                    } else if (vf || vg) && !self.function_vanishes(&o)? {
                        report.violations.push(format!(
                            "{name} for samples {i}, {j} does not vanish though a factor does: {h}"
                        ));
                    }
                }
            }
        }
        Ok(report)
    }
}
