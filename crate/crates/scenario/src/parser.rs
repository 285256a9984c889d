//! LL(1) recursive-descent parser. Every statement starts with a keyword, so
//! statements need no separators.
//!
//! ```text
//! expr    := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | caret
//! caret   := atom ('^' atom)*
//! atom    := INT | NAME | NAME '(' [expr (',' expr)*] ')' | '(' expr ')'
//! ```

use crate::ast::*;
use crate::error::{Result, ScenarioError, Span};
use crate::lexer::{describe, tokenize, Token, TokenKind};

/// Maximum nesting depth of expressions.
pub const MAX_DEPTH: usize = 512;

pub fn parse(src: &str) -> Result<Scenario> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let mut statements = Vec::new();
    while !p.at_eof() {
        statements.push(p.statement()?);
    }
    Ok(Scenario { statements })
}

/// Parses a single expression, rejecting trailing input.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn unexpected(&self, wanted: &str) -> ScenarioError {
        let t = self.peek();
        ScenarioError::syntax(
            t.span,
            format!("expected {wanted}, found {}", describe(&t.kind)),
        )
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Word(x) if x == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<Span> {
        if self.is_word(w) {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&format!("'{w}'")))
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Span> {
        if self.peek().kind == kind {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&describe(&kind)))
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        match &self.peek().kind {
            TokenKind::Word(w) => {
                let name = w.clone();
                let span = self.next().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn small_int(&mut self) -> Result<u32> {
        match &self.peek().kind {
            TokenKind::Int(digits) => {
                let span = self.peek().span;
                let v = digits.parse::<u32>().map_err(|_| {
                    ScenarioError::syntax(span, format!("integer {digits} is too large"))
                })?;
                self.next();
                Ok(v)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    /// `key = INT`
    fn setting(&mut self, key: &str) -> Result<u32> {
        self.expect_word(key)?;
        self.expect(TokenKind::Assign)?;
        self.small_int()
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>> {
        self.expect(TokenKind::LParen)?;
        let mut out = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            out.push(self.ident()?);
            while self.peek().kind == TokenKind::Comma {
                self.next();
                out.push(self.ident()?);
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(out)
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>> {
        self.expect(TokenKind::LParen)?;
        let mut out = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            out.push(self.expr()?);
            while self.peek().kind == TokenKind::Comma {
                self.next();
                out.push(self.expr()?);
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(out)
    }

    fn optional_n(&mut self) -> Result<Option<u32>> {
        if self.is_word("n") {
            Ok(Some(self.setting("n")?))
        } else {
            Ok(None)
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        let start = self.peek().span;
        let TokenKind::Word(keyword) = self.peek().kind.clone() else {
            return Err(self.unexpected("a statement keyword"));
        };
        self.next();
        let kind = match keyword.as_str() {
            "chart" => {
                let name = self.ident()?;
                let variables = self.ident_list()?;
                StatementKind::Chart { name, variables }
            }
            "fibration" => {
                self.expect_word("base")?;
                let base = self.ident_list()?;
                self.expect_word("horizontal")?;
                let horizontal = self.ident_list()?;
                StatementKind::Fibration { base, horizontal }
            }
            "poly" | "form" | "field" | "observable" => {
                let kind = match keyword.as_str() {
                    "poly" => DefKind::Poly,
                    "form" => DefKind::Form,
                    "field" => DefKind::Field,
                    _ => DefKind::Observable,
                };
                let name = self.ident()?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                StatementKind::Define { kind, name, value }
            }
            "omega" | "potential" => {
                let n = self.optional_n()?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                if keyword == "omega" {
                    StatementKind::Omega { n, value }
                } else {
                    StatementKind::Potential { n, value }
                }
            }
            "action" => StatementKind::Action(self.expr_list()?),
            "structconst" => {
                let i = self.small_int()?;
                let j = self.small_int()?;
                let k = self.small_int()?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                StatementKind::StructConst { i, j, k, value }
            }
            "moment" => {
                if self.eat_word("from") {
                    self.expect_word("potential")?;
                    StatementKind::Moment(MomentSource::FromPotential)
                } else {
                    StatementKind::Moment(MomentSource::Explicit(self.expr_list()?))
                }
            }
            "level" => StatementKind::Level(self.expr_list()?),
            "constraints" => {
                if self.eat_word("level") {
                    StatementKind::Constraints(ConstraintSource::Level)
                } else if self.eat_word("none") {
                    StatementKind::Constraints(ConstraintSource::None)
                } else if self.peek().kind == TokenKind::LParen {
                    StatementKind::Constraints(ConstraintSource::Explicit(self.expr_list()?))
                } else {
                    return Err(self.unexpected("'(', 'level' or 'none'"));
                }
            }
            "sample" => StatementKind::Sample(self.expr_list()?),
            "check" => {
                let expect = !self.eat_word("not");
                StatementKind::Query(Query {
                    expect,
                    kind: self.check_query()?,
                })
            }
            "reduce" => {
                let expect = !self.eat_word("not");
                let a = self.expr()?;
                self.expect(TokenKind::EqEq)?;
                let b = self.expr()?;
                StatementKind::Query(Query {
                    expect,
                    kind: QueryKind::Reduce(a, b),
                })
            }
            "reduced-basis" => {
                let source = if self.is_word("degree") {
                    BasisSource::Degree(self.setting("degree")?)
                } else if self.eat_word("ansatz") {
                    BasisSource::Ansatz(self.expr_list()?)
                } else {
                    return Err(self.unexpected("'degree' or 'ansatz'"));
                };
                let expected = if self.eat_word("expect") {
                    Some(self.expr_list()?)
                } else {
                    None
                };
                StatementKind::Query(Query {
                    expect: true,
                    kind: QueryKind::ReducedBasis { source, expected },
                })
            }
            "jacobi" => {
                let arity = self.setting("arity")?;
                let random = if self.is_word("random") {
                    Some(self.setting("random")?)
                } else {
                    None
                };
                StatementKind::Query(Query {
                    expect: true,
                    kind: QueryKind::Jacobi { arity, random },
                })
            }
            "show" => StatementKind::Query(Query {
                expect: true,
                kind: QueryKind::Show(self.expr()?),
            }),
            other => {
                return Err(ScenarioError::syntax(
                    start,
                    format!("unknown statement keyword '{other}'"),
                ))
            }
        };
        Ok(Statement {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn check_query(&mut self) -> Result<QueryKind> {
        let TokenKind::Word(w) = self.peek().kind.clone() else {
            return Err(self.unexpected("a check name"));
        };
        let span = self.next().span;
        Ok(match w.as_str() {
            "nondegenerate" => QueryKind::Nondegenerate,
            "action" => QueryKind::Action,
            "moment" => QueryKind::Moment,
            "tangent" => QueryKind::Tangent(self.expr()?),
            "tangent-module" => QueryKind::TangentModule(self.expr_list()?),
            "vanishing-field" => QueryKind::VanishingField(self.expr()?),
            "vanishing-form" => QueryKind::VanishingForm(self.expr()?),
            "fundamental" => QueryKind::Fundamental(self.expr()?),
            "reducible" => QueryKind::Reducible(self.expr()?),
            "vanishing" => QueryKind::Vanishing(self.expr()?),
            "hamiltonian" => QueryKind::Hamiltonian(self.expr()?),
            "predicates" => QueryKind::Predicates(self.expr()?),
            "poisson-descent" => QueryKind::PoissonDescent(self.expr_list()?),
            "closure" => QueryKind::Closure {
                arity: self.setting("arity")?,
            },
            "level-set" => QueryKind::LevelSet,
            "equal" => {
                let a = self.expr()?;
                self.expect(TokenKind::EqEq)?;
                QueryKind::Equal(a, self.expr()?)
            }
            "member" => QueryKind::Member(self.expr()?),
            other => {
                return Err(ScenarioError::syntax(
                    span,
                    format!("unknown check '{other}'"),
                ));
            }
        })
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ScenarioError::syntax(
                self.peek().span,
                format!("expression nested deeper than {MAX_DEPTH} levels"),
            ));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let entered = self.depth;
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.next();
            // operator chains nest to the left, so each link counts as a level
            self.enter()?;
            let rhs = self.product()?;
            lhs = binary(op, lhs, rhs);
        }
        self.depth = entered - 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let entered = self.depth;
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            self.next();
            self.enter()?;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
        self.depth = entered;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().kind == TokenKind::Minus {
            let span = self.next().span;
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            let span = span.to(inner.span);
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.caret()
    }

    fn caret(&mut self) -> Result<Expr> {
        let entered = self.depth;
        let mut lhs = self.atom()?;
        while self.peek().kind == TokenKind::Caret {
            self.next();
            self.enter()?;
            let rhs = self.atom()?;
            lhs = binary(BinOp::Caret, lhs, rhs);
        }
        self.depth = entered;
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match t.kind {
            TokenKind::Int(digits) => {
                self.next();
                Ok(Expr {
                    kind: ExprKind::Int(digits),
                    span: t.span,
                })
            }
            TokenKind::Word(name) => {
                self.next();
                if self.peek().kind == TokenKind::LParen {
                    self.enter()?;
                    let args = self.expr_list()?;
                    self.depth -= 1;
                    Ok(Expr {
                        kind: ExprKind::Call {
                            func: Ident { name, span: t.span },
                            args,
                        },
                        span: t.span.to(self.prev_span()),
                    })
                } else {
                    Ok(Expr {
                        kind: ExprKind::Name(name),
                        span: t.span,
                    })
                }
            }
            TokenKind::LParen => {
                self.next();
                let mut inner = self.expr()?;
                let end = self.expect(TokenKind::RParen)?;
                inner.span = t.span.to(end);
                Ok(inner)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    Expr {
        kind: ExprKind::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        },
        span,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2*d(y) + 3").unwrap();
        let ExprKind::Binary {
            op: BinOp::Add,
            lhs,
            ..
        } = e.kind
        else {
            panic!("sum expected")
        };
        let ExprKind::Binary {
            op: BinOp::Mul,
            lhs: neg,
            ..
        } = lhs.kind
        else {
            panic!("product expected")
        };
        let ExprKind::Neg(inner) = neg.kind else {
            panic!("negation expected")
        };
        assert!(matches!(
            inner.kind,
            ExprKind::Binary {
                op: BinOp::Caret,
                ..
            }
        ));
    }

    #[test]
    fn statements() {
        let s = parse(
            "chart M(x, y)\nomega n=1 = d(x)^d(y)\ncheck not tangent e(x)\n\
             reduced-basis degree=4 expect (1, x*y) jacobi arity=3 random=5",
        )
        .unwrap();
        assert_eq!(s.statements.len(), 5);
        let StatementKind::Query(q) = &s.statements[2].kind else {
            panic!()
        };
        assert!(!q.expect);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("chart M(x, y)\nform a = (x + ").unwrap_err();
        let span = err.span().unwrap();
        assert_eq!(span.line, 2);
        assert!(err.to_string().contains("expected an expression"));
        assert!(parse("frobnicate x").is_err());
        let deep = format!("show {}x{}", "(".repeat(600), ")".repeat(600));
        assert!(parse(&deep).unwrap_err().to_string().contains("nested"));
        let chain = format!("show x{}", "+x".repeat(1000));
        assert!(parse(&chain).unwrap_err().to_string().contains("nested"));
        let product = format!("show x{}", "*x^2".repeat(600));
        assert!(parse(&product).unwrap_err().to_string().contains("nested"));
        assert!(parse(&format!("show x{}", "+x".repeat(200))).is_ok());
    }
}
