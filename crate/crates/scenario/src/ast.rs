//! Syntax tree of a scenario file.

use crate::error::Span;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub kind: StatementKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefKind {
    Poly,
    Form,
    Field,
    Observable,
}

impl DefKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DefKind::Poly => "poly",
            DefKind::Form => "form",
            DefKind::Field => "field",
            DefKind::Observable => "observable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MomentSource {
    Explicit(Vec<Expr>),
    FromPotential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintSource {
    Explicit(Vec<Expr>),
    /// The level-set ideal of the moment map, acted on by the isotropy
    /// subalgebra of the level.
    Level,
    /// No constraints: `N` is the whole chart.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Chart {
        name: Ident,
        variables: Vec<Ident>,
    },
    Fibration {
        base: Vec<Ident>,
        horizontal: Vec<Ident>,
    },
    Define {
        kind: DefKind,
        name: Ident,
        value: Expr,
    },
    Omega {
        n: Option<u32>,
        value: Expr,
    },
    Potential {
        n: Option<u32>,
        value: Expr,
    },
    Action(Vec<Expr>),
    StructConst {
        i: u32,
        j: u32,
        k: u32,
        value: Expr,
    },
    Moment(MomentSource),
    Level(Vec<Expr>),
    Constraints(ConstraintSource),
    Sample(Vec<Expr>),
    Query(Query),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// `false` for `check not ...` and `reduce not ...`: the query passes
    /// when the predicate is false.
    pub expect: bool,
    pub kind: QueryKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisSource {
    Degree(u32),
    Ansatz(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Nondegenerate,
    Action,
    Moment,
    Tangent(Expr),
    TangentModule(Vec<Expr>),
    VanishingField(Expr),
    VanishingForm(Expr),
    Fundamental(Expr),
    Reducible(Expr),
    Vanishing(Expr),
    Hamiltonian(Expr),
    Predicates(Expr),
    PoissonDescent(Vec<Expr>),
    Closure {
        arity: u32,
    },
    LevelSet,
    Equal(Expr, Expr),
    Member(Expr),
    Reduce(Expr, Expr),
    ReducedBasis {
        source: BasisSource,
        expected: Option<Vec<Expr>>,
    },
    Jacobi {
        arity: u32,
        random: Option<u32>,
    },
    Show(Expr),
}

impl QueryKind {
    /// Short machine-readable name used in verdict records.
    pub fn name(&self) -> &'static str {
        match self {
            QueryKind::Nondegenerate => "nondegenerate",
            QueryKind::Action => "action",
            QueryKind::Moment => "moment",
            QueryKind::Tangent(_) => "tangent",
            QueryKind::TangentModule(_) => "tangent-module",
            QueryKind::VanishingField(_) => "vanishing-field",
            QueryKind::VanishingForm(_) => "vanishing-form",
            QueryKind::Fundamental(_) => "fundamental",
            QueryKind::Reducible(_) => "reducible",
            QueryKind::Vanishing(_) => "vanishing",
            QueryKind::Hamiltonian(_) => "hamiltonian",
            QueryKind::Predicates(_) => "predicates",
            QueryKind::PoissonDescent(_) => "poisson-descent",
            QueryKind::Closure { .. } => "closure",
            QueryKind::LevelSet => "level-set",
            QueryKind::Equal(..) => "equal",
            QueryKind::Member(_) => "member",
            QueryKind::Reduce(..) => "reduce",
            QueryKind::ReducedBasis { .. } => "reduced-basis",
            QueryKind::Jacobi { .. } => "jacobi",
            QueryKind::Show(_) => "show",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Power when the right operand is an integer literal, wedge otherwise.
    Caret,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(String),
    Name(String),
    Call {
        func: Ident,
        args: Vec<Expr>,
    },
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}
