//! Boolean expressions: AST, text syntax, and evaluation.
//!
//! Grammar, loosest binding first, all binary operators left-associative:
//!
//! ```text
//! expr  := xor ('|' xor)*        -- sugar for ~(~a & ~b)
//! xor   := and ('^' and)*
//! and   := unary ('&' unary)*
//! unary := '~' unary | atom
//! atom  := 't' | 'f' | ident | '(' expr ')'
//! ident := [a-zA-Z_][a-zA-Z0-9_]*   (except 't' and 'f')
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bexp {
    Var(String),
    True,
    False,
    Not(Box<Bexp>),
    And(Box<Bexp>, Box<Bexp>),
    Xor(Box<Bexp>, Box<Bexp>),
}

impl Bexp {
    pub fn var(name: &str) -> Self {
        Bexp::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: Bexp) -> Self {
        Bexp::Not(Box::new(b))
    }

    pub fn and(a: Bexp, b: Bexp) -> Self {
        Bexp::And(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Bexp, b: Bexp) -> Self {
        Bexp::Xor(Box::new(a), Box::new(b))
    }

    /// `a | b`, encoded as `~(~a & ~b)`.
    pub fn or(a: Bexp, b: Bexp) -> Self {
        Bexp::not(Bexp::and(Bexp::not(a), Bexp::not(b)))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Bexp::Var(_) | Bexp::True | Bexp::False => 1,
            Bexp::Not(b) => 1 + b.size(),
            Bexp::And(a, b) | Bexp::Xor(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Bexp::Var(_) | Bexp::True | Bexp::False => 1,
            Bexp::Not(b) => 1 + b.depth(),
            Bexp::And(a, b) | Bexp::Xor(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Distinct variables in first-occurrence order.
    pub fn vars(&self) -> Vec<&str> {
        fn go<'a>(b: &'a Bexp, out: &mut Vec<&'a str>) {
            match b {
                Bexp::Var(v) => {
                    if !out.contains(&v.as_str()) {
                        out.push(v);
                    }
                }
                Bexp::True | Bexp::False => {}
                Bexp::Not(b) => go(b, out),
                Bexp::And(a, b) | Bexp::Xor(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Value of the expression under `f`.
    pub fn interp(&self, f: &Valuation) -> Result<bool, UnboundVariable> {
        Ok(match self {
            Bexp::Var(v) => f.get(v).ok_or_else(|| UnboundVariable(v.clone()))?,
            Bexp::True => true,
            Bexp::False => false,
            Bexp::Not(b) => !b.interp(f)?,
            Bexp::And(a, b) => a.interp(f)? & b.interp(f)?,
            Bexp::Xor(a, b) => a.interp(f)? ^ b.interp(f)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Bexp::Xor(..) => 1,
            Bexp::And(..) => 2,
            Bexp::Not(_) => 3,
            Bexp::Var(_) | Bexp::True | Bexp::False => 4,
        }
    }
}

/// Prints with the minimum parentheses needed to parse back to the same tree.
impl fmt::Display for Bexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, b: &Bexp, min: u8| {
            if b.precedence() < min {
                write!(f, "({b})")
            } else {
                write!(f, "{b}")
            }
        };
        match self {
            Bexp::Var(v) => write!(f, "{v}"),
            Bexp::True => write!(f, "t"),
            Bexp::False => write!(f, "f"),
            Bexp::Not(b) => {
                write!(f, "~")?;
                child(f, b, 3)
            }
            Bexp::And(a, b) => {
                child(f, a, 2)?;
                write!(f, " & ")?;
                child(f, b, 3)
            }
            Bexp::Xor(a, b) => {
                child(f, a, 1)?;
                write!(f, " ^ ")?;
                child(f, b, 2)
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unbound variable {0:?}")]
pub struct UnboundVariable(pub String);

/// Ordered, duplicate-free variable list. Variable `v` lives on wire
/// `1 + index(v)` of a compiled oracle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarContext(Vec<String>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("duplicate variable {0:?} in context")]
    Duplicate(String),
    #[error("invalid variable name {0:?}")]
    BadName(String),
}

impl VarContext {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ContextError> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(ContextError::BadName(n.to_string()));
            }
            if out.iter().any(|m| m == n) {
                return Err(ContextError::Duplicate(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(VarContext(out))
    }

    /// Comma-separated names, surrounding whitespace ignored.
    pub fn parse_list(s: &str) -> Result<Self, ContextError> {
        let names: Vec<&str> = s.split(',').map(str::trim).filter(|n| !n.is_empty()).collect();
        Self::new(&names)
    }

    pub fn index(&self, v: &str) -> Option<usize> {
        self.0.iter().position(|n| n == v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    /// Every valuation of the context's variables, in binary counting order
    /// with the first variable most significant.
    pub fn valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        let n = self.0.len();
        (0..1u64 << n).map(move |k| {
            let bits = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1);
            Valuation(self.0.iter().cloned().zip(bits).collect())
        })
    }

    /// The values `f` assigns to the context, in context order.
    pub fn bits(&self, f: &Valuation) -> Result<Vec<bool>, UnboundVariable> {
        self.0
            .iter()
            .map(|v| f.get(v).ok_or_else(|| UnboundVariable(v.clone())))
            .collect()
    }
}

/// Assignment of booleans to variable names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Valuation(BTreeMap<String, bool>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &str) -> Option<bool> {
        self.0.get(v).copied()
    }

    pub fn set(&mut self, v: &str, b: bool) {
        self.0.insert(v.to_string(), b);
    }

    pub fn from_ctx(ctx: &VarContext, bits: &[bool]) -> Self {
        Valuation(ctx.0.iter().cloned().zip(bits.iter().copied()).collect())
    }
}

impl<S: Into<String>> FromIterator<(S, bool)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (S, bool)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "t"
        && s != "f"
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

pub fn parse_bexp(text: &str) -> Result<Bexp, SyntaxError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl std::str::FromStr for Bexp {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, SyntaxError> {
        parse_bexp(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> SyntaxError {
        SyntaxError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Bexp, SyntaxError> {
        let mut lhs = self.xor()?;
        while self.eat(b'|') {
            lhs = Bexp::or(lhs, self.xor()?);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Bexp, SyntaxError> {
        let mut lhs = self.and()?;
        while self.eat(b'^') {
            lhs = Bexp::xor(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Bexp, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat(b'&') {
            lhs = Bexp::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Bexp, SyntaxError> {
        if self.eat(b'~') {
            return Ok(Bexp::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Bexp, SyntaxError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(&c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(match word {
                    "t" => Bexp::True,
                    "f" => Bexp::False,
                    v => Bexp::var(v),
                })
            }
            Some(_) => Err(self.error("expected a variable, constant, '~' or '('")),
        }
    }
}
