//! Tokenizer for scenario files. Whitespace and newlines separate tokens and
//! are otherwise ignored; `#` starts a comment running to the end of the line.

use crate::error::{Result, ScenarioError, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// An identifier or keyword. Keywords such as `reduced-basis` contain a
    /// hyphen.
    Word(String),
    /// A nonnegative integer literal.
    Int(String),
    LParen,
    RParen,
    Comma,
    Assign,
    EqEq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Keywords spelled with a hyphen; the lexer joins `word-word` only for these.
pub const HYPHENATED: &[&str] = &[
    "reduced-basis",
    "tangent-module",
    "vanishing-field",
    "vanishing-form",
    "poisson-descent",
    "level-set",
];

pub fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Word(w) => format!("'{w}'"),
        TokenKind::Int(n) => format!("integer {n}"),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
        TokenKind::Comma => "','".into(),
        TokenKind::Assign => "'='".into(),
        TokenKind::EqEq => "'=='".into(),
        TokenKind::Plus => "'+'".into(),
        TokenKind::Minus => "'-'".into(),
        TokenKind::Star => "'*'".into(),
        TokenKind::Slash => "'/'".into(),
        TokenKind::Caret => "'^'".into(),
        TokenKind::Eof => "end of input".into(),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(offset)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            column: self.column,
        }
    }
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.here();
        let Some(c) = cur.bump() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: start,
            });
            return Ok(tokens);
        };
        let kind = match c {
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ',' => TokenKind::Comma,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '=' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    TokenKind::EqEq
                } else {
                    TokenKind::Assign
                }
            }
            c if c.is_ascii_digit() => {
                let mut digits = c.to_string();
                while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                    digits.push(d);
                    cur.bump();
                }
                if cur.peek().is_some_and(is_word_start) {
                    return Err(ScenarioError::syntax(
                        start,
                        format!("a number cannot run into a name after {digits}"),
                    ));
                }
                TokenKind::Int(digits)
            }
            c if is_word_start(c) => {
                let mut word = c.to_string();
                while let Some(d) = cur.peek().filter(|&d| is_word_char(d)) {
                    word.push(d);
                    cur.bump();
                }
                if cur.peek() == Some('-') && cur.peek_at(1).is_some_and(is_word_start) {
                    let rest: String = cur.src[cur.pos + 1..]
                        .chars()
                        .take_while(|&d| is_word_char(d))
                        .collect();
                    let joined = format!("{word}-{rest}");
                    if HYPHENATED.contains(&joined.as_str()) {
                        for _ in 0..=rest.chars().count() {
                            cur.bump();
                        }
                        word = joined;
                    }
                }
                TokenKind::Word(word)
            }
            other => {
                return Err(ScenarioError::syntax(
                    start,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        let mut span = start;
        span.end = cur.pos;
        tokens.push(Token { kind, span });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn words_numbers_and_symbols() {
        use TokenKind::*;
        assert_eq!(
            kinds("form a = 3*x^2 - d(y) # comment\n== reduced-basis x-y"),
            vec![
                Word("form".into()),
                Word("a".into()),
                Assign,
                Int("3".into()),
                Star,
                Word("x".into()),
                Caret,
                Int("2".into()),
                Minus,
                Word("d".into()),
                LParen,
                Word("y".into()),
                RParen,
                EqEq,
                Word("reduced-basis".into()),
                Word("x".into()),
                Minus,
                Word("y".into()),
                Eof,
            ]
        );
    }

    #[test]
    fn positions_and_errors() {
        let toks = tokenize("chart\n  R2").unwrap();
        assert_eq!((toks[1].span.line, toks[1].span.column), (2, 3));
        let err = tokenize("x = 2 $").unwrap_err();
        assert_eq!(err.span().map(|s| (s.line, s.column)), Some((1, 7)));
        assert!(tokenize("2x").is_err());
    }
}
