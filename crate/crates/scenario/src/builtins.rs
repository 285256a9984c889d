//! Scenarios shipped with the tool.

use crate::ast::Scenario;
use crate::error::{Result, ScenarioError};
use crate::parser::parse;

pub const CROSS2D: &str = include_str!("../fixtures/cross2d.msr");
pub const SCALARFIELD2D: &str = include_str!("../fixtures/scalarfield2d.msr");
pub const SCALARFIELD2D_PRODUCTS: &str = include_str!("../fixtures/scalarfield2d_products.msr");
pub const SYMPLECTIC_R2: &str = include_str!("../fixtures/symplectic_r2.msr");
pub const SLAB3D: &str = include_str!("../fixtures/slab3d.msr");

/// Names accepted by [`builtin_source`].
pub const BUILTINS: &[&str] = &[
    "cross2d",
    "scalarfield2d",
    "scalarfield2d_products",
    "multicotangent",
    "symplectic_r2",
    "slab3d",
];

/// Default form degree and base dimension of the `multicotangent` builtin.
pub const MULTICOTANGENT_DEFAULT: (usize, usize) = (2, 3);

pub fn builtin_source(name: &str) -> Result<String> {
    Ok(match name {
        "cross2d" => CROSS2D.to_string(),
        "scalarfield2d" => SCALARFIELD2D.to_string(),
        "scalarfield2d_products" => SCALARFIELD2D_PRODUCTS.to_string(),
        "symplectic_r2" => SYMPLECTIC_R2.to_string(),
        "slab3d" => SLAB3D.to_string(),
        "multicotangent" => {
            let (n, dim) = MULTICOTANGENT_DEFAULT;
            multicotangent_source(n, dim)?
        }
        _ => {
            return Err(ScenarioError::UnknownBuiltin {
                name: name.to_string(),
                available: BUILTINS.to_vec(),
            })
        }
    })
}

pub fn builtin(name: &str) -> Result<Scenario> {
    parse(&builtin_source(name)?)
}

/// Increasing `k`-element subsets of `1..=dim`.
fn increasing(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=dim {
            cur.push(i);
            rec(i + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, dim, k, &mut Vec::new(), &mut out);
    out
}

fn momentum_name(index: &[usize], dim: usize) -> String {
    let parts: Vec<String> = index.iter().map(usize::to_string).collect();
    if dim < 10 {
        format!("p{}", parts.concat())
    } else {
        format!("p{}", parts.join("_"))
    }
}

fn wedge_of(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|i| format!("d(e{i})"))
        .collect::<Vec<_>>()
        .join("^")
}

/// The bundle of `n`-forms over `R^dim` with its canonical potential
/// `sum_I p_I de_I`, sampled with prolonged base fields and a few
/// negative-degree observables.
pub fn multicotangent_source(n: usize, dim: usize) -> Result<String> {
    if n == 0 || dim < n || dim > 6 {
        return Err(ScenarioError::semantic(
            Default::default(),
            format!("multicotangent needs 1 <= n <= dim <= 6, got n={n}, dim={dim}"),
        ));
    }
    let base: Vec<String> = (1..=dim).map(|i| format!("e{i}")).collect();
    let indices = increasing(dim, n);
    let momenta: Vec<String> = indices.iter().map(|i| momentum_name(i, dim)).collect();
    let theta: Vec<String> = indices
        .iter()
        .zip(&momenta)
        .map(|(i, p)| format!("{p}*{}", wedge_of(i)))
        .collect();
    let mut sample = vec![
        "lift(e(e1))".to_string(),
        format!("lift(e1*e(e{dim}))"),
        "lift(e1^2*e(e1))".to_string(),
    ];
    if n >= 2 {
        let low = if n == 2 {
            momenta[0].clone()
        } else {
            format!(
                "{}*{}",
                momenta[0],
                wedge_of(&(1..=n - 2).collect::<Vec<_>>())
            )
        };
        sample.push(format!("obs(-1, {low})"));
        sample.push(format!("obs({}, e1)", 1 - n as i64));
    }
    let mut src = String::new();
    src.push_str(&format!(
        "# Multisymplectic {n}-forms over R^{dim} with the canonical potential.\n"
    ));
    src.push_str(&format!(
        "chart T({}, {})\n",
        base.join(", "),
        momenta.join(", ")
    ));
    src.push_str(&format!(
        "fibration base({}) horizontal()\n",
        base.join(", ")
    ));
    src.push_str(&format!("potential n={n} = {}\n", theta.join(" + ")));
    src.push_str("constraints none\n");
    src.push_str(&format!("sample ({})\n\n", sample.join(", ")));
    src.push_str("check nondegenerate\n");
    src.push_str("check equal iota(prolong(e(e1)), omega) == -d(iota(prolong(e(e1)), theta))\n");
    src.push_str("check reducible lift(e(e1))\n");
    src.push_str(&format!("jacobi arity={}\n", n + 2));
    Ok(src)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_parses() {
        for name in BUILTINS {
            builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn multicotangent_layout() {
        let src = multicotangent_source(2, 3).unwrap();
        assert!(src.contains("chart T(e1, e2, e3, p12, p13, p23)"));
        assert!(src.contains("p12*d(e1)^d(e2) + p13*d(e1)^d(e3) + p23*d(e2)^d(e3)"));
        assert!(multicotangent_source(3, 2).is_err());
    }

    #[test]
    fn unknown_builtin_lists_names() {
        let err = builtin_source("torus").unwrap_err().to_string();
        assert!(err.contains("cross2d") && err.contains("multicotangent"));
    }
}
