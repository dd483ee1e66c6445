//! Expression language for metric components: numbers, the four coordinates,
//! arithmetic, powers and a handful of unary functions.
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary minus, `^`.
//! Everything is left associative except `^`, which associates to the right,
//! and `^` binds tighter than unary minus so `-x^2` is `-(x^2)`. Coordinates
//! are `x0..x3` with built-in aliases `t`, `r`, `th`, `ph`; custom coordinate
//! names can be supplied on top.
//!
//! Powers with an integer exponent are evaluated by repeated multiplication
//! and work for any base; fractional exponents go through exp(y ln x) and
//! require a positive base (scale factors like t^(2/3) on t > 0).

use std::fmt;

use crate::error::Error;
use crate::Result;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Exp,
    Ln,
}

impl Func {
    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Built-in aliases for the four coordinates.
pub const DEFAULT_COORD_ALIASES: [&str; 4] = ["t", "r", "th", "ph"];

/// Parse with the default coordinate names only.
pub fn parse(source: &str) -> Result<Expr> {
    parse_with_coords(source, &[])
}

/// Parse accepting additional coordinate aliases (`extra[i]` maps to x_i).
pub fn parse_with_coords(source: &str, extra: &[String]) -> Result<Expr> {
    let mut parser = Parser {
        src: source.as_bytes(),
        pos: 0,
        extra,
    };
    let expr = parser.parse_sum()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(Error::parse(parser.pos, "unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    extra: &'a [String],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_sum(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.parse_factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.parse_factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_sum()?;
                if self.peek() != Some(b')') {
                    return Err(Error::parse(self.pos, "expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.parse_ident(),
            Some(c) => Err(Error::parse(
                self.pos,
                format!("unexpected character `{}`", c as char),
            )),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }

    fn parse_number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // `e` was an identifier boundary, not an exponent
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::parse(start, format!("bad number literal `{text}`")))
    }

    fn parse_ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if self.peek() == Some(b'(') {
            let func = match name {
                "sin" => Func::Sin,
                "cos" => Func::Cos,
                "sqrt" => Func::Sqrt,
                "exp" => Func::Exp,
                "ln" => Func::Ln,
                _ => {
                    return Err(Error::parse(start, format!("unknown function `{name}`")));
                }
            };
            self.pos += 1;
            let arg = self.parse_sum()?;
            if self.peek() != Some(b')') {
                return Err(Error::parse(self.pos, "expected `)`"));
            }
            self.pos += 1;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if let Some(stripped) = name.strip_prefix('x') {
            if let Ok(i) = stripped.parse::<usize>() {
                if i < 4 {
                    return Ok(Expr::Coord(i));
                }
            }
        }
        if let Some(i) = DEFAULT_COORD_ALIASES.iter().position(|&a| a == name) {
            return Ok(Expr::Coord(i));
        }
        if let Some(i) = self.extra.iter().position(|a| a == name) {
            if i < 4 {
                return Ok(Expr::Coord(i));
            }
        }
        Err(Error::parse(start, format!("unknown identifier `{name}`")))
    }
}

impl Expr {
    /// Evaluate at a point; IEEE doubles with explicit domain errors for
    /// division by zero, sqrt of a negative, ln of a non-positive, fractional
    /// powers of a non-positive base, and any non-finite intermediate.
    pub fn eval(&self, point: &[f64; 4]) -> Result<f64> {
        let v = self.eval_inner(point)?;
        if !v.is_finite() {
            return Err(Error::domain(self.to_string(), "non-finite result"));
        }
        Ok(v)
    }

    fn eval_inner(&self, point: &[f64; 4]) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Coord(i) => point[*i],
            Expr::Neg(a) => -a.eval_inner(point)?,
            Expr::Add(a, b) => a.eval_inner(point)? + b.eval_inner(point)?,
            Expr::Sub(a, b) => a.eval_inner(point)? - b.eval_inner(point)?,
            Expr::Mul(a, b) => a.eval_inner(point)? * b.eval_inner(point)?,
            Expr::Div(a, b) => {
                let den = b.eval_inner(point)?;
                if den == 0.0 {
                    return Err(Error::domain(self.to_string(), "division by zero"));
                }
                a.eval_inner(point)? / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval_inner(point)?;
                let exp = b.eval_inner(point)?;
                if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
                    if base == 0.0 && exp < 0.0 {
                        return Err(Error::domain(self.to_string(), "zero to a negative power"));
                    }
                    base.powi(exp as i32)
                } else if base > 0.0 {
                    (exp * base.ln()).exp()
                } else {
                    return Err(Error::domain(
                        self.to_string(),
                        "fractional power of a non-positive base",
                    ));
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_inner(point)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::domain(
                                self.to_string(),
                                "square root of a negative value",
                            ));
                        }
                        x.sqrt()
                    }
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(Error::domain(
                                self.to_string(),
                                "logarithm of a non-positive value",
                            ));
                        }
                        x.ln()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::domain(self.to_string(), "non-finite intermediate"));
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            // a negative literal prints with a leading minus, so it binds
            // like a unary minus for parenthesization purposes
            Expr::Num(v) if *v < 0.0 => 3,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(..) | Expr::Coord(..) | Expr::Call(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, required: u8) -> fmt::Result {
        let parens = self.precedence() < required;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Num(v) => write!(f, "{v}")?,
            Expr::Coord(i) => write!(f, "x{i}")?,
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 4)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " / ")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Pow(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                b.fmt_prec(f, 4)?;
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 1)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
