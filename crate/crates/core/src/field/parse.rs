//! Expression grammar shared by exact and numeric inputs:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' ['-'] int | '^' '(' ['-'] int ')')?
//! atom  := number | ident | '(' expr ')'
//! ```
//!
//! Decimal literals are read exactly.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::Rational;
use super::ratfun::RatFun;
use super::var::Var;
use crate::error::{Error, Result};

/// What the parser builds.
pub trait Algebra: Sized + Clone {
    fn from_rational(r: Rational) -> Self;
    fn ident(name: &str) -> std::result::Result<Self, String>;
    fn add(a: Self, b: Self) -> Self;
    fn sub(a: Self, b: Self) -> Self;
    fn mul(a: Self, b: Self) -> Self;
    fn div(a: Self, b: Self) -> std::result::Result<Self, String>;
    fn powi(a: Self, n: i32) -> std::result::Result<Self, String>;
    fn neg(a: Self) -> Self;
}

impl Algebra for RatFun {
    fn from_rational(r: Rational) -> Self {
        RatFun::constant(r)
    }
    fn ident(name: &str) -> std::result::Result<Self, String> {
        name.parse::<Var>().map(RatFun::var).map_err(|e| e.to_string())
    }
    fn add(a: Self, b: Self) -> Self {
        a + b
    }
    fn sub(a: Self, b: Self) -> Self {
        a - b
    }
    fn mul(a: Self, b: Self) -> Self {
        a * b
    }
    fn div(a: Self, b: Self) -> std::result::Result<Self, String> {
        a.div_ref(&b).map_err(|e| e.to_string())
    }
    fn powi(a: Self, n: i32) -> std::result::Result<Self, String> {
        a.pow(n).map_err(|e| e.to_string())
    }
    fn neg(a: Self) -> Self {
        -a
    }
}

impl Algebra for Complex64 {
    fn from_rational(r: Rational) -> Self {
        Complex64::new(super::poly::rat_to_f64(&r), 0.0)
    }
    fn ident(name: &str) -> std::result::Result<Self, String> {
        match name {
            "i" | "I" => Ok(Complex64::i()),
            _ => Err(format!("unknown symbol `{name}` in numeric literal")),
        }
    }
    fn add(a: Self, b: Self) -> Self {
        a + b
    }
    fn sub(a: Self, b: Self) -> Self {
        a - b
    }
    fn mul(a: Self, b: Self) -> Self {
        a * b
    }
    fn div(a: Self, b: Self) -> std::result::Result<Self, String> {
        if b.is_zero() {
            Err("division by zero".into())
        } else {
            Ok(a / b)
        }
    }
    fn powi(a: Self, n: i32) -> std::result::Result<Self, String> {
        if n < 0 && a.is_zero() {
            return Err("division by zero".into());
        }
        Ok(a.powi(n))
    }
    fn neg(a: Self) -> Self {
        -a
    }
}

pub fn parse_ratfun(s: &str) -> Result<RatFun> {
    parse::<RatFun>(s)
}

/// Parses a complex number such as `0.8+0.3*i`, `-2*i` or `1/3`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    parse::<Complex64>(s)
}

pub fn parse<A: Algebra>(s: &str) -> Result<A> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let v = p.expr::<A>()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr<A: Algebra>(&mut self) -> Result<A> {
        let mut acc = self.term::<A>()?;
        loop {
            if self.eat(b'+') {
                acc = A::add(acc, self.term()?);
            } else if self.eat(b'-') {
                acc = A::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<A: Algebra>(&mut self) -> Result<A> {
        let mut acc = self.unary::<A>()?;
        loop {
            if self.eat(b'*') {
                acc = A::mul(acc, self.unary()?);
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                acc = A::div(acc, d).map_err(|m| Error::Parse { pos: at, msg: m })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary<A: Algebra>(&mut self) -> Result<A> {
        if self.eat(b'-') {
            return Ok(A::neg(self.unary()?));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power<A: Algebra>(&mut self) -> Result<A> {
        let base = self.atom::<A>()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let txt = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: i32 = txt.parse().map_err(|_| Error::Parse { pos: start, msg: "exponent too large".into() })?;
        if paren && !self.eat(b')') {
            return Err(self.err("expected `)`"));
        }
        let n = if neg { -n } else { n };
        A::powi(base, n).map_err(|m| Error::Parse { pos: start, msg: m })
    }

    fn atom<A: Algebra>(&mut self) -> Result<A> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number().map(A::from_rational),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                A::ident(name).map_err(|m| Error::Parse { pos: start, msg: m })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Rational> {
        let start = self.pos;
        let mut int = String::new();
        let mut frac = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int.is_empty() && frac.is_empty() {
            return Err(Error::Parse { pos: start, msg: "malformed number".into() });
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().unwrap();
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let mut r = Rational::new(n, d);
        // Exponent notation (1e-3) for numeric inputs.
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            let neg = if self.pos < self.src.len() && self.src[self.pos] == b'-' {
                self.pos += 1;
                true
            } else {
                if self.pos < self.src.len() && self.src[self.pos] == b'+' {
                    self.pos += 1;
                }
                false
            };
            let es = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if es == self.pos {
                self.pos = save;
            } else {
                let e: usize = std::str::from_utf8(&self.src[es..self.pos]).unwrap().parse().unwrap_or(0);
                let f = Rational::from_integer(num_traits::pow(BigInt::from(10), e));
                r = if neg { r / f } else { r * f };
            }
        }
        if r.is_zero() {
            return Ok(Rational::zero());
        }
        debug_assert!(!r.denom().is_zero() && r.denom() >= &BigInt::one());
        Ok(r)
    }
}
