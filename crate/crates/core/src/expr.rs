//! Scalar-field expressions over chart coordinates.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-"* base ("^" ["-"|"+"] number)?
//! base   := number | ident | "(" expr ")" | func "(" expr ")"
//! func   := "exp" | "ln" | "sqrt" | "sin" | "cos"
//! ```
//!
//! `^` binds tighter than unary minus, so `-y^2` parses as `-(y^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl UnaryOp {
    fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Ln => Some("ln"),
            UnaryOp::Sqrt => Some("sqrt"),
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
        }
    }

    fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// Parse tree of a scalar field. Coordinates are stored by index into the
/// chart's coordinate list.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Const(f64),
    Coord(usize),
    Unary(UnaryOp, Box<ScalarExpr>),
    Binary(BinaryOp, Box<ScalarExpr>, Box<ScalarExpr>),
    /// Power with a constant real exponent.
    Pow(Box<ScalarExpr>, f64),
}

impl ScalarExpr {
    pub fn constant(value: f64) -> Self {
        ScalarExpr::Const(value)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            ScalarExpr::Const(_) => None,
            ScalarExpr::Coord(i) => Some(*i),
            ScalarExpr::Unary(_, e) | ScalarExpr::Pow(e, _) => e.max_coord(),
            ScalarExpr::Binary(_, l, r) => match (l.max_coord(), r.max_coord()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    /// Replace every coordinate reference `i` by `replacements[i]`.
    pub fn substitute(&self, replacements: &[ScalarExpr]) -> ScalarExpr {
        match self {
            ScalarExpr::Const(c) => ScalarExpr::Const(*c),
            ScalarExpr::Coord(i) => replacements[*i].clone(),
            ScalarExpr::Unary(op, e) => ScalarExpr::Unary(*op, Box::new(e.substitute(replacements))),
            ScalarExpr::Binary(op, l, r) => ScalarExpr::Binary(
                *op,
                Box::new(l.substitute(replacements)),
                Box::new(r.substitute(replacements)),
            ),
            ScalarExpr::Pow(e, p) => ScalarExpr::Pow(Box::new(e.substitute(replacements)), *p),
        }
    }

    /// Render with explicit parentheses using the given coordinate names.
    /// The output parses back to an identical tree.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, coords }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a ScalarExpr,
    coords: &'a [String],
}

fn write_number(f: &mut fmt::Formatter<'_>, value: f64) -> fmt::Result {
    if value < 0.0 || (value == 0.0 && value.is_sign_negative()) {
        write!(f, "(-{})", -value)
    } else {
        write!(f, "{value}")
    }
}

impl<'a> fmt::Display for ExprDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = self.coords;
        let child = |e: &'a ScalarExpr| ExprDisplay { expr: e, coords };
        match self.expr {
            ScalarExpr::Const(c) => write_number(f, *c),
            ScalarExpr::Coord(i) => write!(f, "{}", self.coords[*i]),
            ScalarExpr::Unary(UnaryOp::Neg, e) => write!(f, "(-({}))", child(e)),
            ScalarExpr::Unary(op, e) => {
                write!(f, "{}({})", op.function_name().unwrap_or("?"), child(e))
            }
            ScalarExpr::Binary(op, l, r) => {
                write!(f, "({} {} {})", child(l), op.symbol(), child(r))
            }
            ScalarExpr::Pow(e, p) => write!(f, "({})^{}", child(e), p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

/// Tokens paired with their 1-based column.
fn tokenize(source: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((tok, column));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // optional exponent: e[+-]digits
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                column,
                message: format!("malformed number `{text}`"),
            })?;
            tokens.push((Token::Number(value), column));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push((Token::Ident(chars[start..i].iter().collect()), column));
            continue;
        }
        return Err(ParseError::Syntax {
            column,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    coords: &'a [String],
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_column)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinaryOp::Add,
                Some(Token::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ScalarExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinaryOp::Mul,
                Some(Token::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = ScalarExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            // A negated bare literal folds into a negative constant.
            if let Some(Token::Number(v)) = self.peek().cloned() {
                if self.tokens.get(self.pos + 1).map(|(t, _)| t) != Some(&Token::Caret) {
                    self.pos += 1;
                    return Ok(ScalarExpr::Const(-v));
                }
            }
            let inner = self.factor()?;
            return Ok(ScalarExpr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        let base = self.base()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let sign = match self.peek() {
                Some(Token::Minus) => {
                    self.pos += 1;
                    -1.0
                }
                Some(Token::Plus) => {
                    self.pos += 1;
                    1.0
                }
                _ => 1.0,
            };
            let exponent = match self.peek() {
                Some(Token::Number(v)) => *v,
                _ => return self.syntax("exponent must be a numeric constant"),
            };
            self.pos += 1;
            return Ok(ScalarExpr::Pow(Box::new(base), sign * exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ScalarExpr, ParseError> {
        let column = self.column();
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(ScalarExpr::Const(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if let Some(op) = UnaryOp::from_function_name(&name) {
                    if self.peek() == Some(&Token::LParen) {
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect(Token::RParen, "`)` after function argument")?;
                        return Ok(ScalarExpr::Unary(op, Box::new(arg)));
                    }
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(i) => Ok(ScalarExpr::Coord(i)),
                    None => Err(ParseError::UnknownIdentifier { name, column }),
                }
            }
            Some(_) => self.syntax("expected a number, coordinate, function or `(`"),
            None => self.syntax("unexpected end of expression"),
        }
    }
}

/// Parse `source` against the chart coordinate names `coords`.
pub fn parse_expr(source: &str, coords: &[String]) -> Result<ScalarExpr, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        coords,
        end_column: source.chars().count() + 1,
    };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.syntax("unexpected trailing input");
    }
    Ok(expr)
}
