//! A small arithmetic expression language over chart coordinates.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-' exponent | power
//! primary := number | 'pi' | coordinate | func '(' args ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin cos exp log sqrt` (one argument) and `pow` (two).

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
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

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the coordinate list the expression was parsed against.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit.parse().map_err(|_| Error::Parse {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("number `{lit}` is out of range"),
                });
            }
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::Parse {
                offset: i,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn eat(&mut self, sym: char) -> bool {
        if *self.peek() == Tok::Sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let found = match self.peek() {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        };
        Error::Parse {
            offset: self.offset(),
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            let exponent = self.exponent()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.pos += 1;
                Ok(Expr::Num(x))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected("`)`"));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(func) = Func::lookup(&name) {
                    if !self.eat('(') {
                        return Err(self.unexpected(&format!("`(` after `{name}`")));
                    }
                    let mut args = Vec::new();
                    if !self.eat(')') {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(')') {
                                break;
                            }
                            if !self.eat(',') {
                                return Err(self.unexpected("`,` or `)`"));
                            }
                        }
                    }
                    if args.len() != func.arity() {
                        return Err(Error::Arity {
                            name,
                            expected: func.arity(),
                            found: args.len(),
                            offset,
                        });
                    }
                    return Ok(Expr::Call(func, args));
                }
                if let Some(index) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(index));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                Err(Error::UnknownIdentifier { name, offset })
            }
            _ => Err(self.unexpected("a number, coordinate, function or `(`")),
        }
    }
}

/// Parses `text` with the given coordinate names.
pub fn parse_expression(text: &str, vars: &[String]) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

fn is_constant(j: &Jet) -> bool {
    j.coeffs()[1..].iter().all(|&c| c == 0.0)
}

fn jet_pow(base: &Jet, exponent: &Jet) -> Result<Jet> {
    if is_constant(exponent) {
        return base.powf(exponent.value());
    }
    Ok((&base.ln()? * exponent).exp())
}

fn real_pow(base: f64, exponent: f64) -> Result<f64> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(Error::domain(format!("non-integer power {exponent} of negative value {base}")));
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(Error::domain(format!("negative power {exponent} of zero")));
    }
    Ok(base.powf(exponent))
}

impl Expr {
    /// Evaluates on coordinate jets.
    pub fn eval_jet(&self, vars: &[Jet]) -> Result<Jet> {
        let like = vars
            .first()
            .ok_or_else(|| Error::invalid("evaluation needs at least one coordinate jet"))?;
        self.eval_jet_inner(vars, like)
    }

    fn eval_jet_inner(&self, vars: &[Jet], like: &Jet) -> Result<Jet> {
        Ok(match self {
            Expr::Num(x) => like.constant_like(*x),
            Expr::Var(i) => vars
                .get(*i)
                .cloned()
                .ok_or(Error::IndexOutOfRange {
                    index: *i,
                    dim: vars.len(),
                })?,
            Expr::Neg(e) => -e.eval_jet_inner(vars, like)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_jet_inner(vars, like)?;
                let b = b.eval_jet_inner(vars, like)?;
                match op {
                    BinOp::Add => a.try_add(&b)?,
                    BinOp::Sub => a.try_sub(&b)?,
                    BinOp::Mul => a.try_mul(&b)?,
                    BinOp::Div => a.try_div(&b)?,
                    BinOp::Pow => jet_pow(&a, &b)?,
                }
            }
            Expr::Call(func, args) => {
                let x = args[0].eval_jet_inner(vars, like)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln()?,
                    Func::Sqrt => x.sqrt()?,
                    Func::Pow => jet_pow(&x, &args[1].eval_jet_inner(vars, like)?)?,
                }
            }
        })
    }

    /// Evaluates on real coordinates.
    pub fn eval_real(&self, vars: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Num(x) => *x,
            Expr::Var(i) => *vars.get(*i).ok_or(Error::IndexOutOfRange {
                index: *i,
                dim: vars.len(),
            })?,
            Expr::Neg(e) => -e.eval_real(vars)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_real(vars)?;
                let b = b.eval_real(vars)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if !(b.abs() > crate::jet::RECIPROCAL_FLOOR) {
                            return Err(Error::domain(format!("division by {b}")));
                        }
                        a / b
                    }
                    BinOp::Pow => real_pow(a, b)?,
                }
            }
            Expr::Call(func, args) => {
                let x = args[0].eval_real(vars)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if !(x > 0.0) {
                            return Err(Error::domain(format!("log of non-positive value {x}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::domain(format!("sqrt of negative value {x}")));
                        }
                        x.sqrt()
                    }
                    Func::Pow => real_pow(x, args[1].eval_real(vars)?)?,
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::domain(format!("non-finite intermediate value {v}")));
        }
        Ok(v)
    }

    /// Fully parenthesized text that parses back to the same tree.
    pub fn display<'a>(&'a self, vars: &'a [String]) -> Display<'a> {
        Display { expr: self, vars }
    }
}

pub struct Display<'a> {
    expr: &'a Expr,
    vars: &'a [String],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e| Display { expr: e, vars: self.vars };
        match self.expr {
            Expr::Num(x) if *x < 0.0 || (*x == 0.0 && x.is_sign_negative()) => {
                write!(f, "(-{:?})", -x)
            }
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var(i) => match self.vars.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{i}"),
            },
            Expr::Neg(e) => write!(f, "(-{})", sub(e)),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", sub(a), op.symbol(), sub(b)),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", sub(a))?;
                }
                f.write_str(")")
            }
        }
    }
}
