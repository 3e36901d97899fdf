//! Star expressions, stacked star expressions, their concrete syntax,
//! star height and projection.
//!
//! Concrete syntax for plain expressions:
//!
//! ```text
//! expr   ::= term ('+' term)*
//! term   ::= factor ('.' factor)*
//! factor ::= atom '*'*
//! atom   ::= '0' | '1' | ident | '(' expr ')'
//! ```
//!
//! `+` and `.` associate to the left. Stacked expressions are printed with
//! an infix ` * ` for the stacked product and are never parsed.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("`{0}` is a reserved literal and cannot name an action")]
    ReservedLiteral(String),
    #[error("invalid action symbol `{0}`")]
    InvalidAction(String),
}

/// A proper action symbol, matching `[a-zA-Z][a-zA-Z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(String);

impl Action {
    pub fn new(symbol: impl Into<String>) -> Result<Self, SyntaxError> {
        let symbol = symbol.into();
        if symbol == "0" || symbol == "1" {
            return Err(SyntaxError::ReservedLiteral(symbol));
        }
        let mut chars = symbol.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(SyntaxError::InvalidAction(symbol));
        }
        Ok(Action(symbol))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Star expression. The derived order compares the case tag in declaration
/// order first, then the children left to right.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StarExpr {
    Zero,
    One,
    Act(Action),
    Plus(Box<StarExpr>, Box<StarExpr>),
    Dot(Box<StarExpr>, Box<StarExpr>),
    Star(Box<StarExpr>),
}

impl StarExpr {
    pub fn act(symbol: &str) -> Result<Self, SyntaxError> {
        Action::new(symbol).map(StarExpr::Act)
    }

    pub fn plus(lhs: StarExpr, rhs: StarExpr) -> Self {
        StarExpr::Plus(Box::new(lhs), Box::new(rhs))
    }

    pub fn dot(lhs: StarExpr, rhs: StarExpr) -> Self {
        StarExpr::Dot(Box::new(lhs), Box::new(rhs))
    }

    pub fn star(body: StarExpr) -> Self {
        StarExpr::Star(Box::new(body))
    }

    pub fn is_star(&self) -> bool {
        matches!(self, StarExpr::Star(_))
    }

    pub fn star_height(&self) -> usize {
        match self {
            StarExpr::Zero | StarExpr::One | StarExpr::Act(_) => 0,
            StarExpr::Plus(l, r) | StarExpr::Dot(l, r) => l.star_height().max(r.star_height()),
            StarExpr::Star(body) => 1 + body.star_height(),
        }
    }

    /// Number of syntax tree nodes.
    pub fn size(&self) -> usize {
        match self {
            StarExpr::Zero | StarExpr::One | StarExpr::Act(_) => 1,
            StarExpr::Plus(l, r) | StarExpr::Dot(l, r) => 1 + l.size() + r.size(),
            StarExpr::Star(body) => 1 + body.size(),
        }
    }

    /// Minimal-parentheses canonical text.
    pub fn render(&self) -> String {
        self.to_string()
    }

    fn precedence(&self) -> u8 {
        match self {
            StarExpr::Plus(..) => 0,
            StarExpr::Dot(..) => 1,
            StarExpr::Star(_) => 2,
            StarExpr::Zero | StarExpr::One | StarExpr::Act(_) => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            StarExpr::Zero => f.write_str("0"),
            StarExpr::One => f.write_str("1"),
            StarExpr::Act(a) => write!(f, "{a}"),
            StarExpr::Plus(l, r) => {
                l.fmt_prec(f, 0)?;
                f.write_str("+")?;
                r.fmt_prec(f, 1)
            }
            StarExpr::Dot(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(".")?;
                r.fmt_prec(f, 2)
            }
            StarExpr::Star(body) => {
                body.fmt_prec(f, 2)?;
                f.write_str("*")
            }
        }
    }
}

impl fmt::Display for StarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl std::str::FromStr for StarExpr {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_star_expr(s)
    }
}

/// Stacked star expression.
///
/// Values are built through [`StackedExpr::dot`] and [`StackedExpr::stack`],
/// which keep two invariants: the right operand of `StarC` is an iteration,
/// and a `DotC` never has a `Lift` on its left (`e1 · e2` with plain `e1` is
/// the plain expression `Lift(e1 · e2)`, so each value has one representation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackedExpr {
    Lift(StarExpr),
    DotC(Box<StackedExpr>, StarExpr),
    StarC(Box<StackedExpr>, StarExpr),
}

impl StackedExpr {
    pub fn dot(lhs: StackedExpr, rhs: StarExpr) -> Self {
        match lhs {
            StackedExpr::Lift(e) => StackedExpr::Lift(StarExpr::dot(e, rhs)),
            other => StackedExpr::DotC(Box::new(other), rhs),
        }
    }

    /// The stacked product `lhs * iteration`.
    ///
    /// # Panics
    /// If `iteration` is not of the form `e*`.
    pub fn stack(lhs: StackedExpr, iteration: StarExpr) -> Self {
        assert!(
            iteration.is_star(),
            "stacked product needs an iteration on the right, got {iteration}"
        );
        StackedExpr::StarC(Box::new(lhs), iteration)
    }

    pub fn as_plain(&self) -> Option<&StarExpr> {
        match self {
            StackedExpr::Lift(e) => Some(e),
            _ => None,
        }
    }

    pub fn star_height(&self) -> usize {
        match self {
            StackedExpr::Lift(e) => e.star_height(),
            StackedExpr::DotC(l, r) | StackedExpr::StarC(l, r) => {
                l.star_height().max(r.star_height())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            StackedExpr::Lift(e) => e.size(),
            StackedExpr::DotC(l, r) | StackedExpr::StarC(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Reads every stacked product as a concatenation.
    pub fn project(&self) -> StarExpr {
        match self {
            StackedExpr::Lift(e) => e.clone(),
            StackedExpr::DotC(l, r) | StackedExpr::StarC(l, r) => {
                StarExpr::dot(l.project(), r.clone())
            }
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    fn fmt_left(&self, f: &mut fmt::Formatter<'_>, plain_min: u8) -> fmt::Result {
        match self {
            StackedExpr::Lift(e) => e.fmt_prec(f, plain_min),
            other => write!(f, "({other})"),
        }
    }
}

impl From<StarExpr> for StackedExpr {
    fn from(e: StarExpr) -> Self {
        StackedExpr::Lift(e)
    }
}

impl fmt::Display for StackedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackedExpr::Lift(e) => e.fmt_prec(f, 0),
            StackedExpr::DotC(l, r) => {
                l.fmt_left(f, 1)?;
                f.write_str(".")?;
                r.fmt_prec(f, 2)
            }
            StackedExpr::StarC(l, r) => {
                l.fmt_left(f, 2)?;
                f.write_str(" * ")?;
                r.fmt_prec(f, 2)
            }
        }
    }
}

pub fn parse_star_expr(text: &str) -> Result<StarExpr, SyntaxError> {
    let mut parser = Parser { text, pos: 0 };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> SyntaxError {
        SyntaxError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<StarExpr, SyntaxError> {
        let mut lhs = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            lhs = StarExpr::plus(lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<StarExpr, SyntaxError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some('.') {
            self.pos += 1;
            lhs = StarExpr::dot(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<StarExpr, SyntaxError> {
        let mut e = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            e = StarExpr::star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<StarExpr, SyntaxError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let word = self.word();
                match word {
                    "0" => Ok(StarExpr::Zero),
                    "1" => Ok(StarExpr::One),
                    _ => Err(SyntaxError::Syntax {
                        pos: start,
                        msg: format!("`{word}` is neither a literal nor an action"),
                    }),
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let word = self.word();
                StarExpr::act(word)
            }
            Some(_) => Err(self.error("expected `0`, `1`, an action or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn word(&mut self) -> &str {
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.text.len() - start);
        self.pos += len;
        &self.text[start..start + len]
    }
}
