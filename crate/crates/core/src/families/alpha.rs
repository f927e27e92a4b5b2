//! Fixed-point evaluation of real constants such as `4*pi`, `10+sqrt(2)` or
//! `e^4`, precise enough to floor `m·α` exactly for the sizes we generate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Fractional bits carried through evaluation.
const BITS: u32 = 384;
/// Bits of [`BITS`] that evaluation error may eat.
const GUARD: u32 = 64;
/// Denominators searched when deciding whether α is rational.
const MAX_DENOM_BITS: u64 = 32;

/// A real number `value / 2^BITS`, accurate to `2^(GUARD - BITS)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alpha {
    pub expr: String,
    value: BigInt,
}

impl Alpha {
    pub fn parse(expr: &str) -> Result<Alpha> {
        let mut p = Parser {
            src: expr,
            toks: tokenize(expr)?,
            pos: 0,
        };
        let value = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::parse(expr, "trailing input"));
        }
        Ok(Alpha {
            expr: expr.to_string(),
            value,
        })
    }

    pub fn to_f64(&self) -> f64 {
        let shift = BITS - 60;
        (&self.value >> shift).to_f64().unwrap_or(f64::NAN) / (1u64 << 60) as f64
    }

    /// `Some((p, q))` when α agrees with `p/q`, `q < 2^32`, to within half the working precision.
    pub fn rational_approximation(&self) -> Option<(BigInt, BigInt)> {
        let scale = BigInt::one() << BITS;
        let tol = BigInt::one() << (BITS / 2);
        let (mut num, mut den) = (self.value.clone(), scale.clone());
        let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
        while !den.is_zero() {
            let (a, r) = num.div_mod_floor(&den);
            let p2 = &a * &p1 + &p0;
            let q2 = &a * &q1 + &q0;
            if q2.bits() > MAX_DENOM_BITS {
                return None;
            }
            // |α - p/q| · q · 2^BITS = |value·q - p·2^BITS|.
            let diff = (&self.value * &q2 - &p2 * &scale).abs();
            if diff < &tol * &q2 {
                return Some((p2, q2));
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            (num, den) = (den, r);
        }
        None
    }

    /// `⌊m α⌋`, or an error when `m α` is too close to an integer to decide.
    pub fn floor_mul(&self, m: i64) -> Result<i64> {
        if m == 0 {
            return Ok(0);
        }
        let prod = &self.value * BigInt::from(m);
        let scale = BigInt::one() << BITS;
        let (q, r) = prod.div_mod_floor(&scale);
        let slack = BigInt::from(m.unsigned_abs().max(1)) << GUARD;
        if r < slack || &scale - &r <= slack {
            return Err(Error::invalid(format!(
                "floor of {m}·({}) is not decidable at the working precision",
                self.expr
            )));
        }
        q.to_i64().ok_or(Error::Overflow)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(decimal(s, &cs[start..i].iter().collect::<String>())?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::parse(s, format!("unexpected `{c}`")));
        }
    }
    Ok(out)
}

/// A decimal literal in fixed point.
fn decimal(src: &str, lit: &str) -> Result<BigInt> {
    let (int, frac) = lit.split_once('.').unwrap_or((lit, ""));
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return Err(Error::parse(src, format!("bad number `{lit}`")));
    }
    let digits: BigInt = format!("{int}{frac}")
        .parse()
        .map_err(|_| Error::parse(src, format!("bad number `{lit}`")))?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Ok((digits << BITS) / den)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, why: &str) -> Error {
        Error::parse(self.src, why.to_string())
    }

    fn expr(&mut self) -> Result<BigInt> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<BigInt> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v = mul(&v, &self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                v = (v << BITS) / d;
            } else {
                return Ok(v);
            }
        }
    }

    fn power(&mut self) -> Result<BigInt> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = match self.toks.get(self.pos) {
            Some(Tok::Num(n)) => (n >> BITS).to_u32().filter(|&k| BigInt::from(k) << BITS == *n),
            _ => None,
        }
        .filter(|&k| k <= 64)
        .ok_or_else(|| self.err("exponent must be an integer in 0..=64"))?;
        self.pos += 1;
        let mut acc = BigInt::one() << BITS;
        for _ in 0..k {
            acc = mul(&acc, &base);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<BigInt> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn atom(&mut self) -> Result<BigInt> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("missing `)`"));
                }
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => Ok(pi()),
                    "e" => Ok(euler()),
                    "sqrt" => {
                        if !self.eat('(') {
                            return Err(self.err("sqrt needs parentheses"));
                        }
                        let v = self.expr()?;
                        if !self.eat(')') {
                            return Err(self.err("missing `)`"));
                        }
                        if v.is_negative() {
                            return Err(self.err("sqrt of a negative number"));
                        }
                        Ok((v << BITS).sqrt())
                    }
                    other => Err(self.err(&format!("unknown name `{other}`"))),
                }
            }
            _ => Err(self.err("expected a number, name or `(`")),
        }
    }
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> BITS
}

/// `atan(1/x)` by its alternating series.
fn atan_inv(x: u32) -> BigInt {
    let x2 = BigInt::from(x) * x;
    let mut term = (BigInt::one() << BITS) / x;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        let t = &term / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &x2;
        k += 1;
    }
    sum
}

fn pi() -> BigInt {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    atan_inv(5) * 16 - atan_inv(239) * 4
}

fn euler() -> BigInt {
    let mut term = BigInt::one() << BITS;
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    while !term.is_zero() {
        sum += &term;
        term /= k;
        k += 1;
    }
    sum
}
