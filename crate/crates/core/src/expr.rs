//! Recursive-descent parser for curve expressions in the variable `s`.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! vector  := '(' expr ',' expr ',' expr ')'
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 's' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so
//! `-s^2 = -(s^2)`. Expressions are evaluated over [`Series`], which yields
//! exact derivatives without symbolic differentiation.

use std::fmt;

use thiserror::Error;

use crate::curve::{Curve, EvalError};
use crate::series::Series;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    /// 1-based column in the parsed text.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Atan,
    Atanh,
    Sqrt,
}

impl Func {
    const ALL: [(&'static str, Func); 12] = [
        ("sin", Func::Sin),
        ("cos", Func::Cos),
        ("tan", Func::Tan),
        ("sinh", Func::Sinh),
        ("cosh", Func::Cosh),
        ("tanh", Func::Tanh),
        ("exp", Func::Exp),
        ("log", Func::Log),
        ("ln", Func::Log),
        ("atan", Func::Atan),
        ("atanh", Func::Atanh),
        ("sqrt", Func::Sqrt),
    ];

    fn lookup(name: &str) -> Option<Func> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|&(_, f)| f)
    }

    pub fn name(self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(_, f)| *f == self)
            .map(|(n, _)| *n)
            .unwrap_or("?")
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

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Var => write!(f, "s"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when a digit follows (`2e` is `2 e`, an error later)
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let x = s.parse::<f64>().map_err(|_| ParseError {
                column: col,
                message: format!("malformed number `{s}`"),
            })?;
            toks.push((Tok::Num(x), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(c) {
            toks.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(ParseError {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    toks.push((Tok::End, chars.len() + 1));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{c}`, found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.bump() {
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "s" => Ok(Expr::Var),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                _ => match Func::lookup(&name) {
                    Some(func) => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                    None => Err(ParseError {
                        column: col,
                        message: format!("unknown identifier `{name}`"),
                    }),
                },
            },
            other => Err(ParseError {
                column: col,
                message: format!("expected a value, found {}", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(x) => format!("number {x}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parses a scalar expression in `s`.
pub fn parse_scalar(text: &str) -> Result<Expr, ParseError> {
    let mut lx = lex(text)?;
    let e = lx.expr()?;
    if *lx.peek() != Tok::End {
        return lx.error(format!("unexpected {}", describe(lx.peek())));
    }
    Ok(e)
}

/// Parses a vector literal `(ex, ey, ez)`.
pub fn parse_vector(text: &str) -> Result<[Expr; 3], ParseError> {
    let mut lx = lex(text)?;
    lx.expect('(')?;
    let x = lx.expr()?;
    lx.expect(',')?;
    let y = lx.expr()?;
    lx.expect(',')?;
    let z = lx.expr()?;
    lx.expect(')')?;
    if *lx.peek() != Tok::End {
        return lx.error(format!("unexpected {} after vector", describe(lx.peek())));
    }
    Ok([x, y, z])
}

impl Expr {
    /// Evaluates over a Taylor series in `s`, checking each elementary
    /// function's domain at the expansion point.
    pub fn eval<T: Real>(&self, s: &Series<T>) -> Result<Series<T>, EvalError> {
        let at = s.value().to_f64_lossy();
        let domain = |func: &str, arg: T| EvalError::Domain {
            func: func.to_string(),
            arg: arg.to_f64_lossy(),
            s: at,
        };
        Ok(match self {
            Expr::Num(x) => Series::constant(T::lit(*x), s.order()),
            Expr::Var => s.clone(),
            Expr::Neg(a) => -a.eval(s)?,
            Expr::Bin(op, a, b) => {
                let lhs = a.eval(s)?;
                if *op == BinOp::Pow {
                    if let Expr::Num(k) = **b {
                        if k.fract() == 0.0 && k.abs() <= i32::MAX as f64 {
                            if k < 0.0 && lhs.value() == T::zero() {
                                return Err(EvalError::DivisionByZero { s: at });
                            }
                            return Ok(lhs.powi(k as i32));
                        }
                    }
                    let rhs = b.eval(s)?;
                    if lhs.value() <= T::zero() {
                        return Err(domain("pow", lhs.value()));
                    }
                    return Ok((&rhs * &lhs.ln()).exp());
                }
                let rhs = b.eval(s)?;
                match op {
                    BinOp::Add => lhs + rhs,
                    BinOp::Sub => lhs - rhs,
                    BinOp::Mul => lhs * rhs,
                    BinOp::Div => {
                        if rhs.value() == T::zero() {
                            return Err(EvalError::DivisionByZero { s: at });
                        }
                        lhs / rhs
                    }
                    BinOp::Pow => unreachable!("handled above"),
                }
            }
            Expr::Call(func, a) => {
                let x = a.eval(s)?;
                let v = x.value();
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => {
                        if v.cos() == T::zero() {
                            return Err(domain("tan", v));
                        }
                        x.tan()
                    }
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if v <= T::zero() {
                            return Err(domain("log", v));
                        }
                        x.ln()
                    }
                    Func::Atan => x.atan(),
                    Func::Atanh => {
                        if v.abs() >= T::one() {
                            return Err(domain("atanh", v));
                        }
                        x.atanh()
                    }
                    Func::Sqrt => {
                        if v < T::zero() || (v == T::zero() && x.order() > 0) {
                            return Err(domain("sqrt", v));
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    pub fn eval_at<T: Real>(&self, s: T) -> Result<T, EvalError> {
        Ok(self.eval(&Series::constant(s, 0))?.value())
    }
}

/// A space curve given by three parsed component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprCurve {
    pub components: [Expr; 3],
    pub source: String,
}

impl<T: Real> Curve<T> for ExprCurve {
    fn taylor(&self, s: T, order: usize) -> Result<[Series<T>; 3], EvalError> {
        let var = Series::variable(s, order);
        let [x, y, z] = &self.components;
        let out = [x.eval(&var)?, y.eval(&var)?, z.eval(&var)?];
        if out.iter().all(Series::is_finite) {
            Ok(out)
        } else {
            Err(EvalError::NonFinite { s: s.to_f64_lossy() })
        }
    }
}

/// Parses `(ex, ey, ez)` into a curve whose jets come from Taylor arithmetic.
pub fn parse_surface_expr(text: &str) -> Result<ExprCurve, ParseError> {
    Ok(ExprCurve {
        components: parse_vector(text)?,
        source: text.to_string(),
    })
}
