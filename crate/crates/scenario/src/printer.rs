//! Canonical source text for syntax trees: one statement per line, minimal
//! parentheses. Printing and reparsing yields an equal tree.

use std::fmt::{self, Display, Formatter, Write};

use crate::ast::*;

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op_precedence(*op),
        ExprKind::Neg(_) => 3,
        ExprKind::Int(_) | ExprKind::Name(_) | ExprKind::Call { .. } => 5,
    }
}

fn op_precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul | BinOp::Div => 2,
        BinOp::Caret => 4,
    }
}

fn symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => " + ",
        BinOp::Sub => " - ",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Caret => "^",
    }
}

fn wrapped(f: &mut Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Int(d) => f.write_str(d),
            ExprKind::Name(n) => f.write_str(n),
            ExprKind::Call { func, args } => {
                write!(f, "{}(", func.name)?;
                list(f, args)?;
                f.write_char(')')
            }
            ExprKind::Neg(inner) => {
                f.write_char('-')?;
                wrapped(f, inner, precedence(inner) < 3)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let p = op_precedence(*op);
                // every operator is left-associative; caret operands are atoms or carets
                let lhs_parens = if *op == BinOp::Caret {
                    precedence(lhs) < 4
                } else {
                    precedence(lhs) < p
                };
                let rhs_parens = if *op == BinOp::Caret {
                    precedence(rhs) < 5
                } else {
                    precedence(rhs) <= p
                };
                wrapped(f, lhs, lhs_parens)?;
                f.write_str(symbol(*op))?;
                wrapped(f, rhs, rhs_parens)
            }
        }
    }
}

fn list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

struct Paren<'a, T>(&'a [T]);

impl<T: Display> Display for Paren<'_, T> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        list(f, self.0)?;
        f.write_char(')')
    }
}

impl Display for Ident {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn n_setting(n: &Option<u32>) -> String {
    n.map(|n| format!(" n={n}")).unwrap_or_default()
}

impl Display for Query {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let not = if self.expect { "" } else { "not " };
        match &self.kind {
            QueryKind::Reduce(a, b) => write!(f, "reduce {not}{a} == {b}"),
            QueryKind::ReducedBasis { source, expected } => {
                match source {
                    BasisSource::Degree(d) => write!(f, "reduced-basis degree={d}")?,
                    BasisSource::Ansatz(c) => write!(f, "reduced-basis ansatz {}", Paren(c))?,
                }
                if let Some(e) = expected {
                    write!(f, " expect {}", Paren(e))?;
                }
                Ok(())
            }
            QueryKind::Jacobi { arity, random } => {
                write!(f, "jacobi arity={arity}")?;
                if let Some(r) = random {
                    write!(f, " random={r}")?;
                }
                Ok(())
            }
            QueryKind::Show(e) => write!(f, "show {e}"),
            kind => {
                write!(f, "check {not}{}", kind.name())?;
                match kind {
                    QueryKind::Tangent(e)
                    | QueryKind::VanishingField(e)
                    | QueryKind::VanishingForm(e)
                    | QueryKind::Fundamental(e)
                    | QueryKind::Reducible(e)
                    | QueryKind::Vanishing(e)
                    | QueryKind::Hamiltonian(e)
                    | QueryKind::Predicates(e)
                    | QueryKind::Member(e) => write!(f, " {e}"),
                    QueryKind::TangentModule(es) | QueryKind::PoissonDescent(es) => {
                        write!(f, " {}", Paren(es))
                    }
                    QueryKind::Closure { arity } => write!(f, " arity={arity}"),
                    QueryKind::Equal(a, b) => write!(f, " {a} == {b}"),
                    _ => Ok(()),
                }
            }
        }
    }
}

impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StatementKind::Chart { name, variables } => {
                write!(f, "chart {name}{}", Paren(variables))
            }
            StatementKind::Fibration { base, horizontal } => {
                write!(
                    f,
                    "fibration base{} horizontal{}",
                    Paren(base),
                    Paren(horizontal)
                )
            }
            StatementKind::Define { kind, name, value } => {
                write!(f, "{} {name} = {value}", kind.keyword())
            }
            StatementKind::Omega { n, value } => write!(f, "omega{} = {value}", n_setting(n)),
            StatementKind::Potential { n, value } => {
                write!(f, "potential{} = {value}", n_setting(n))
            }
            StatementKind::Action(fields) => write!(f, "action {}", Paren(fields)),
            StatementKind::StructConst { i, j, k, value } => {
                write!(f, "structconst {i} {j} {k} = {value}")
            }
            StatementKind::Moment(MomentSource::FromPotential) => {
                f.write_str("moment from potential")
            }
            StatementKind::Moment(MomentSource::Explicit(forms)) => {
                write!(f, "moment {}", Paren(forms))
            }
            StatementKind::Level(forms) => write!(f, "level {}", Paren(forms)),
            StatementKind::Constraints(ConstraintSource::Level) => f.write_str("constraints level"),
            StatementKind::Constraints(ConstraintSource::None) => f.write_str("constraints none"),
            StatementKind::Constraints(ConstraintSource::Explicit(gens)) => {
                write!(f, "constraints {}", Paren(gens))
            }
            StatementKind::Sample(items) => write!(f, "sample {}", Paren(items)),
            StatementKind::Query(q) => write!(f, "{q}"),
        }
    }
}

impl Display for Scenario {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
