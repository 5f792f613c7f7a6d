//! Poset-building expressions.
//!
//! Grammar, with `*` binding tighter than `+` and both left-associative:
//!
//! ```text
//! expr := term ('+' term)*
//! term := atom ('*' atom)*
//! atom := E | B | D3 | Q | R | S | S' | Sp | @path | '(' expr ')'
//! ```
//!
//! `+` is the series sum (everything on the left below everything on the
//! right) and `*` the glued product (greatest of the left identified with
//! least of the right). `@path` pulls a custom poset from a `poset <n>`
//! text file.

use crate::poset::{BaseName, Poset, PosetError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("cannot load poset file `{path}`: {msg}")]
    File { path: String, msg: String },
    #[error("cannot evaluate `{expr}` at {at}: {source}")]
    Eval { expr: String, at: String, source: PosetError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetExpr {
    Base(BaseName),
    /// A poset loaded from `@path`.
    Custom { path: String, poset: Poset },
    Oplus(Box<PosetExpr>, Box<PosetExpr>),
    Otimes(Box<PosetExpr>, Box<PosetExpr>),
}

impl PosetExpr {
    pub fn oplus(a: PosetExpr, b: PosetExpr) -> PosetExpr {
        PosetExpr::Oplus(Box::new(a), Box::new(b))
    }

    pub fn otimes(a: PosetExpr, b: PosetExpr) -> PosetExpr {
        PosetExpr::Otimes(Box::new(a), Box::new(b))
    }

    /// True when every leaf is one of the seven named posets.
    pub fn all_bases(&self) -> bool {
        match self {
            PosetExpr::Base(_) => true,
            PosetExpr::Custom { .. } => false,
            PosetExpr::Oplus(a, b) | PosetExpr::Otimes(a, b) => a.all_bases() && b.all_bases(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            PosetExpr::Oplus(..) => 1,
            PosetExpr::Otimes(..) => 2,
            PosetExpr::Base(_) | PosetExpr::Custom { .. } => 3,
        }
    }
}

impl fmt::Display for PosetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, e: &PosetExpr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            PosetExpr::Base(name) => write!(f, "{name}"),
            PosetExpr::Custom { path, .. } => write!(f, "@{path}"),
            PosetExpr::Oplus(a, b) => {
                side(f, a, 1)?;
                write!(f, " + ")?;
                side(f, b, 2)
            }
            PosetExpr::Otimes(a, b) => {
                side(f, a, 2)?;
                write!(f, " * ")?;
                side(f, b, 3)
            }
        }
    }
}

/// Parses an expression, loading any `@path` atoms from disk.
pub fn parse_expr(text: &str) -> Result<PosetExpr, ExprError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, at: 0 };
    let expr = p.expr()?;
    match p.peek() {
        None => Ok(expr),
        Some((pos, t)) => Err(ExprError::Parse {
            pos,
            msg: format!("unexpected `{}` after a complete expression", t.text()),
        }),
    }
}

/// Evaluates an expression to a poset. A `*` whose left factor has no
/// greatest element (or right factor no least) is rejected, naming the
/// failing subexpression and its position in the tree.
pub fn eval_expr(expr: &PosetExpr) -> Result<Poset, ExprError> {
    eval_at(expr, &mut vec!["root"])
}

fn eval_at(expr: &PosetExpr, path: &mut Vec<&'static str>) -> Result<Poset, ExprError> {
    match expr {
        PosetExpr::Base(name) => Ok(Poset::base(*name)),
        PosetExpr::Custom { poset, .. } => Ok(poset.clone()),
        PosetExpr::Oplus(a, b) => {
            path.push(".lhs");
            let pa = eval_at(a, path)?;
            path.pop();
            path.push(".rhs");
            let pb = eval_at(b, path)?;
            path.pop();
            Ok(pa.oplus(&pb))
        }
        PosetExpr::Otimes(a, b) => {
            path.push(".lhs");
            let pa = eval_at(a, path)?;
            path.pop();
            path.push(".rhs");
            let pb = eval_at(b, path)?;
            path.pop();
            pa.otimes(&pb).map_err(|source| ExprError::Eval {
                expr: expr.to_string(),
                at: path.concat(),
                source,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Base(BaseName),
    File(String),
    Plus,
    Star,
    Open,
    Close,
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Base(b) => b.as_str().to_string(),
            Token::File(p) => format!("@{p}"),
            Token::Plus => "+".into(),
            Token::Star => "*".into(),
            Token::Open => "(".into(),
            Token::Close => ")".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && !b" \t\n\r+*()".contains(&bytes[j]) {
                    j += 1;
                }
                if j == start {
                    return Err(ExprError::Parse { pos: i, msg: "`@` needs a file path".into() });
                }
                out.push((i, Token::File(text[start..j].to_string())));
                i = j;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'\'')
                {
                    j += 1;
                }
                let name = &text[start..j];
                let base = BaseName::parse(name).map_err(|_| ExprError::Parse {
                    pos: start,
                    msg: format!("unknown poset name `{name}`"),
                })?;
                out.push((start, Token::Base(base)));
                i = j;
            }
            other => {
                return Err(ExprError::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Token)> {
        self.tokens.get(self.at).map(|(p, t)| (*p, t))
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<PosetExpr, ExprError> {
        let mut left = self.term()?;
        while matches!(self.peek(), Some((_, Token::Plus))) {
            self.bump();
            let right = self.term()?;
            left = PosetExpr::oplus(left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<PosetExpr, ExprError> {
        let mut left = self.atom()?;
        while matches!(self.peek(), Some((_, Token::Star))) {
            self.bump();
            let right = self.atom()?;
            left = PosetExpr::otimes(left, right);
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<PosetExpr, ExprError> {
        let end = self.tokens.last().map_or(0, |(p, t)| p + t.text().len());
        match self.bump() {
            None => Err(ExprError::Parse { pos: end, msg: "expected a poset atom".into() }),
            Some((_, Token::Base(b))) => Ok(PosetExpr::Base(b)),
            Some((_, Token::File(path))) => {
                let text = std::fs::read_to_string(&path).map_err(|e| ExprError::File {
                    path: path.clone(),
                    msg: e.to_string(),
                })?;
                let poset = Poset::parse_text(&text).map_err(|e| ExprError::File {
                    path: path.clone(),
                    msg: e.to_string(),
                })?;
                Ok(PosetExpr::Custom { path, poset })
            }
            Some((_, Token::Open)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Token::Close)) => Ok(inner),
                    Some((pos, t)) => Err(ExprError::Parse {
                        pos,
                        msg: format!("expected `)`, got `{}`", t.text()),
                    }),
                    None => Err(ExprError::Parse { pos: end, msg: "unclosed `(`".into() }),
                }
            }
            Some((pos, t)) => Err(ExprError::Parse {
                pos,
                msg: format!("expected a poset atom, got `{}`", t.text()),
            }),
        }
    }
}
