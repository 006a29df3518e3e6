//! A small arithmetic expression language for user-supplied functions.
//!
//! Expressions are functions of `u` (the integration/point variable) and
//! `s` (the parameter). Supported: `+ - * / ^`, unary minus, parentheses,
//! and the calls `exp`, `log`, `sqrt`, `abs`, `pow`. `^` is right
//! associative and binds tighter than unary minus.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    S,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::S => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Lit(f64),
    Var(Var),
    Neg(Box<Expression>),
    Bin(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    /// Unexpected input at a byte position, with what was expected there.
    SyntaxError { position: usize, expected: String },
    UnknownIdentifier { position: usize, name: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::SyntaxError { position, expected } => {
                write!(f, "syntax error at position {position}: expected {expected}")
            }
            ParseError::UnknownIdentifier { position, name } => {
                write!(f, "unknown identifier `{name}` at position {position}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    UnboundVariable(Var),
    /// log of a non-positive value, 0^negative, negative base with a
    /// fractional exponent, division by zero, or a non-finite result.
    EvalDomainError(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundVariable(v) => write!(f, "unbound variable `{}`", v.name()),
            EvalError::EvalDomainError(msg) => write!(f, "domain error: {msg}"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Variable bindings for evaluation; either slot may be absent.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    pub u: Option<f64>,
    pub s: Option<f64>,
}

impl Bindings {
    pub fn u(u: f64) -> Self {
        Bindings { u: Some(u), s: None }
    }

    pub fn us(u: f64, s: f64) -> Self {
        Bindings {
            u: Some(u),
            s: Some(s),
        }
    }

    pub fn s(s: f64) -> Self {
        Bindings { u: None, s: Some(s) }
    }

    fn get(&self, v: Var) -> Result<f64, EvalError> {
        match v {
            Var::U => self.u.ok_or(EvalError::UnboundVariable(Var::U)),
            Var::S => self.s.ok_or(EvalError::UnboundVariable(Var::S)),
        }
    }
}

// ---- tokenizer ----

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'e'
                        || bytes[i] == b'E'
                        || ((bytes[i] == b'+' || bytes[i] == b'-')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                {
                    i += 1;
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::SyntaxError {
                    position: start,
                    expected: "a number".into(),
                })?;
                toks.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::SyntaxError {
                    position: i,
                    expected: "a token".into(),
                })
            }
        }
    }
    Ok(toks)
}

// ---- parser ----

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    src_len: usize,
    allowed: &'a [Var],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(_, p)| p)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::SyntaxError {
                position: self.here(),
                expected: expected.into(),
            })
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expression::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expression::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        // a leading minus negates the whole product chain: -s*u is -(s*u)
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.term()?;
            return Ok(Expression::Neg(Box::new(inner)));
        }
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expression::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expression::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            Ok(Expression::Neg(Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            // right associative; the exponent may carry a unary minus
            let exp = self.unary()?;
            Ok(Expression::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        let position = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expression::Lit(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let first = self.expr()?;
                    let e = match name.as_str() {
                        "exp" => Expression::Call(Func::Exp, Box::new(first)),
                        "log" => Expression::Call(Func::Log, Box::new(first)),
                        "sqrt" => Expression::Call(Func::Sqrt, Box::new(first)),
                        "abs" => Expression::Call(Func::Abs, Box::new(first)),
                        "pow" => {
                            self.expect(Tok::Comma, "`,` (pow takes two arguments)")?;
                            let second = self.expr()?;
                            Expression::Bin(BinOp::Pow, Box::new(first), Box::new(second))
                        }
                        _ => return Err(ParseError::UnknownIdentifier { position, name }),
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(e)
                } else {
                    let var = match name.as_str() {
                        "u" => Var::U,
                        "s" => Var::S,
                        _ => return Err(ParseError::UnknownIdentifier { position, name }),
                    };
                    if !self.allowed.contains(&var) {
                        return Err(ParseError::UnknownIdentifier {
                            position,
                            name: var.name().into(),
                        });
                    }
                    Ok(Expression::Var(var))
                }
            }
            _ => Err(ParseError::SyntaxError {
                position,
                expected: "a number, variable, call, or `(`".into(),
            }),
        }
    }
}

/// Parse with both `u` and `s` available.
pub fn parse(src: &str) -> Result<Expression, ParseError> {
    parse_with_vars(src, &[Var::U, Var::S])
}

/// Parse a single-variable slot; occurrences of other variables are rejected.
pub fn parse_with_vars(src: &str, allowed: &[Var]) -> Result<Expression, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError::SyntaxError {
            position: 0,
            expected: "a nonempty expression".into(),
        });
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        src_len: src.len(),
        allowed,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(ParseError::SyntaxError {
            position: p.here(),
            expected: "end of input".into(),
        });
    }
    Ok(e)
}

// ---- evaluation ----

fn checked(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::EvalDomainError(format!("non-finite result in {what}")))
    }
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 1e15
}

pub fn eval(e: &Expression, b: &Bindings) -> Result<f64, EvalError> {
    match e {
        Expression::Lit(v) => Ok(*v),
        Expression::Var(v) => b.get(*v),
        Expression::Neg(inner) => Ok(-eval(inner, b)?),
        Expression::Bin(op, l, r) => {
            let lv = eval(l, b)?;
            let rv = eval(r, b)?;
            match op {
                BinOp::Add => checked(lv + rv, "+"),
                BinOp::Sub => checked(lv - rv, "-"),
                BinOp::Mul => checked(lv * rv, "*"),
                BinOp::Div => {
                    if rv == 0.0 {
                        Err(EvalError::EvalDomainError("division by zero".into()))
                    } else {
                        checked(lv / rv, "/")
                    }
                }
                BinOp::Pow => {
                    if lv == 0.0 && rv < 0.0 {
                        return Err(EvalError::EvalDomainError("0^negative".into()));
                    }
                    if lv < 0.0 && !is_integer(rv) {
                        return Err(EvalError::EvalDomainError(
                            "negative base with fractional exponent".into(),
                        ));
                    }
                    checked(lv.powf(rv), "^")
                }
            }
        }
        Expression::Call(f, arg) => {
            let x = eval(arg, b)?;
            match f {
                Func::Exp => checked(x.exp(), "exp"),
                Func::Log => {
                    if x <= 0.0 {
                        Err(EvalError::EvalDomainError("log of non-positive value".into()))
                    } else {
                        Ok(x.ln())
                    }
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        Err(EvalError::EvalDomainError("sqrt of negative value".into()))
                    } else {
                        Ok(x.sqrt())
                    }
                }
                Func::Abs => Ok(x.abs()),
            }
        }
    }
}

// ---- smart constructors (used by the symbolic derivative and generators) ----

pub fn lit(v: f64) -> Expression {
    Expression::Lit(v)
}

pub fn var(v: Var) -> Expression {
    Expression::Var(v)
}

pub fn add(l: Expression, r: Expression) -> Expression {
    match (&l, &r) {
        (Expression::Lit(a), Expression::Lit(b)) => lit(a + b),
        (Expression::Lit(z), _) if *z == 0.0 => r,
        (_, Expression::Lit(z)) if *z == 0.0 => l,
        _ => Expression::Bin(BinOp::Add, Box::new(l), Box::new(r)),
    }
}

pub fn sub(l: Expression, r: Expression) -> Expression {
    match (&l, &r) {
        (Expression::Lit(a), Expression::Lit(b)) => lit(a - b),
        (_, Expression::Lit(z)) if *z == 0.0 => l,
        (Expression::Lit(z), _) if *z == 0.0 => Expression::Neg(Box::new(r)),
        _ => Expression::Bin(BinOp::Sub, Box::new(l), Box::new(r)),
    }
}

pub fn mul(l: Expression, r: Expression) -> Expression {
    match (&l, &r) {
        (Expression::Lit(a), Expression::Lit(b)) => lit(a * b),
        (Expression::Lit(z), _) | (_, Expression::Lit(z)) if *z == 0.0 => lit(0.0),
        (Expression::Lit(o), _) if *o == 1.0 => r,
        (_, Expression::Lit(o)) if *o == 1.0 => l,
        _ => Expression::Bin(BinOp::Mul, Box::new(l), Box::new(r)),
    }
}

pub fn div(l: Expression, r: Expression) -> Expression {
    match (&l, &r) {
        (Expression::Lit(z), _) if *z == 0.0 => lit(0.0),
        (_, Expression::Lit(o)) if *o == 1.0 => l,
        _ => Expression::Bin(BinOp::Div, Box::new(l), Box::new(r)),
    }
}

pub fn pow(l: Expression, r: Expression) -> Expression {
    match (&l, &r) {
        (_, Expression::Lit(o)) if *o == 1.0 => l,
        (_, Expression::Lit(z)) if *z == 0.0 => lit(1.0),
        _ => Expression::Bin(BinOp::Pow, Box::new(l), Box::new(r)),
    }
}

pub fn call(f: Func, arg: Expression) -> Expression {
    Expression::Call(f, Box::new(arg))
}

// ---- symbolic derivative with respect to s ----

fn depends_on_s(e: &Expression) -> bool {
    match e {
        Expression::Lit(_) => false,
        Expression::Var(v) => *v == Var::S,
        Expression::Neg(inner) => depends_on_s(inner),
        Expression::Bin(_, l, r) => depends_on_s(l) || depends_on_s(r),
        Expression::Call(_, arg) => depends_on_s(arg),
    }
}

/// Symbolic derivative with respect to `s`. Returns `None` when a node
/// has no symbolic rule (`abs`); callers fall back to finite differences.
pub fn derive_s(e: &Expression) -> Option<Expression> {
    if !depends_on_s(e) {
        return Some(lit(0.0));
    }
    match e {
        Expression::Lit(_) => Some(lit(0.0)),
        Expression::Var(v) => Some(lit(if *v == Var::S { 1.0 } else { 0.0 })),
        Expression::Neg(inner) => Some(Expression::Neg(Box::new(derive_s(inner)?))),
        Expression::Bin(op, l, r) => {
            let (l, r) = (l.as_ref(), r.as_ref());
            match op {
                BinOp::Add => Some(add(derive_s(l)?, derive_s(r)?)),
                BinOp::Sub => Some(sub(derive_s(l)?, derive_s(r)?)),
                BinOp::Mul => Some(add(
                    mul(derive_s(l)?, r.clone()),
                    mul(l.clone(), derive_s(r)?),
                )),
                BinOp::Div => Some(div(
                    sub(
                        mul(derive_s(l)?, r.clone()),
                        mul(l.clone(), derive_s(r)?),
                    ),
                    pow(r.clone(), lit(2.0)),
                )),
                BinOp::Pow => {
                    if !depends_on_s(r) {
                        // d/ds a^c = c * a^(c-1) * a'
                        Some(mul(
                            mul(r.clone(), pow(l.clone(), sub(r.clone(), lit(1.0)))),
                            derive_s(l)?,
                        ))
                    } else if !depends_on_s(l) {
                        // d/ds c^b = c^b * ln(c) * b'
                        Some(mul(
                            mul(e.clone(), call(Func::Log, l.clone())),
                            derive_s(r)?,
                        ))
                    } else {
                        // a^b * (b' ln a + b a'/a)
                        Some(mul(
                            e.clone(),
                            add(
                                mul(derive_s(r)?, call(Func::Log, l.clone())),
                                mul(r.clone(), div(derive_s(l)?, l.clone())),
                            ),
                        ))
                    }
                }
            }
        }
        Expression::Call(f, arg) => {
            let d_arg = derive_s(arg)?;
            let arg = arg.as_ref();
            match f {
                Func::Exp => Some(mul(e.clone(), d_arg)),
                Func::Log => Some(div(d_arg, arg.clone())),
                Func::Sqrt => Some(div(d_arg, mul(lit(2.0), e.clone()))),
                Func::Abs => None,
            }
        }
    }
}

// ---- printing ----

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Lit(v) => {
                // negative literals need parentheses so that e.g. a
                // folded (-0.3)^2 does not reparse as -(0.3^2)
                if v.is_sign_negative() {
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Expression::Var(v) => write!(f, "{}", v.name()),
            Expression::Neg(inner) => write!(f, "(-{inner})"),
            Expression::Bin(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l}{sym}{r})")
            }
            Expression::Call(func, arg) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sqrt => "sqrt",
                    Func::Abs => "abs",
                };
                write!(f, "{name}({arg})")
            }
        }
    }
}
