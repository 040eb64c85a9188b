//! Recursive-descent parser for classical Hamiltonians.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := primary ('^' exponent)?
//! exponent := ('-' | '+')? primary            -- must evaluate to a rational
//! primary  := number | name | 'x' | 'p' | '(' expr ')'
//! number   := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
//! ```
//!
//! Decimal literals are converted to rationals exactly. `p` may only appear
//! with a non-negative integer power, never in a denominator, and the total
//! momentum degree of any term is capped at 2.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::symbol::{ClassicalSymbol, MAX_P_POWER};
use crate::symbolic::{fmt_q, qi, Coeff, PolyX, Q};

const MAX_DEPTH: usize = 200;
const MAX_TERMS: usize = 4096;
const MAX_INT_POWER: i64 = 64;
const MAX_DECIMAL_EXPONENT: i64 = 400;
const MAX_EXPONENT_MAGNITUDE: i64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnboundName,
    PPowerTooHigh,
    PInDenominator,
    NonMonomialDenominator,
    DivisionByZero,
    UnsupportedExponent,
    TooLarge,
}

impl ParseErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Syntax => "syntax",
            Self::UnboundName => "unbound-name",
            Self::PPowerTooHigh => "p-power-too-high",
            Self::PInDenominator => "p-in-denominator",
            Self::NonMonomialDenominator => "non-monomial-denominator",
            Self::DivisionByZero => "division-by-zero",
            Self::UnsupportedExponent => "unsupported-exponent",
            Self::TooLarge => "too-large",
        }
    }
}

/// Failure with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} at byte {offset}: expected {expected}, found {found}", kind.code())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {}", fmt_q(v)),
            Tok::Name(n) => format!("name '{n}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn err(kind: ParseErrorKind, offset: usize, expected: impl Into<String>, found: impl Into<String>) -> ParseError {
    ParseError { kind, offset, expected: expected.into(), found: found.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                let (v, end) = lex_number(bytes, start)?;
                out.push((Tok::Num(v), start));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = i;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                out.push((Tok::Name(text[start..end].to_string()), start));
                i = end;
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(err(ParseErrorKind::Syntax, start, "expression", format!("character {ch:?}")));
            }
        }
        i += 1;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

fn digits(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn lex_number(bytes: &[u8], start: usize) -> Result<(Q, usize), ParseError> {
    let int_end = digits(bytes, start);
    let mut mantissa = String::from_utf8_lossy(&bytes[start..int_end]).into_owned();
    let mut scale: i64 = 0;
    let mut i = int_end;
    if i < bytes.len() && bytes[i] == b'.' {
        let frac_end = digits(bytes, i + 1);
        mantissa.push_str(&String::from_utf8_lossy(&bytes[i + 1..frac_end]));
        scale -= (frac_end - i - 1) as i64;
        i = frac_end;
    }
    if mantissa.is_empty() {
        return Err(err(ParseErrorKind::Syntax, start, "digits", "'.'"));
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let neg = j < bytes.len() && bytes[j] == b'-';
        if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
            j += 1;
        }
        let exp_end = digits(bytes, j);
        if exp_end > j {
            let text = std::str::from_utf8(&bytes[j..exp_end]).unwrap_or("0");
            let e: i64 = match text.parse::<i64>() {
                Ok(v) if v <= MAX_DECIMAL_EXPONENT => v,
                _ => return Err(err(ParseErrorKind::TooLarge, i, "decimal exponent up to 400", text)),
            };
            scale += if neg { -e } else { e };
            i = exp_end;
        }
    }
    if scale.abs() > 2 * MAX_DECIMAL_EXPONENT {
        return Err(err(ParseErrorKind::TooLarge, start, "shorter literal", "too many digits"));
    }
    let m: BigInt = mantissa.parse().map_err(|_| err(ParseErrorKind::Syntax, start, "number", "malformed literal"))?;
    let ten = BigInt::from(10);
    let v = if scale >= 0 {
        Q::from_integer(m * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(m, num_traits::pow(ten, (-scale) as usize))
    };
    Ok((v, i))
}

/// Intermediate value: momentum power → x-polynomial. Unlike
/// [`ClassicalSymbol`] this never holds a momentum power above the cap
/// because every product is checked.
#[derive(Clone, Debug, Default)]
struct Val {
    terms: BTreeMap<u32, PolyX>,
}

impl Val {
    fn poly(p: PolyX, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(k, p);
        }
        Self { terms }
    }

    fn constant(c: Coeff) -> Self {
        Self::poly(PolyX::constant(c), 0)
    }

    fn n_terms(&self) -> usize {
        self.terms.values().map(PolyX::len).sum()
    }

    fn add(&self, o: &Val) -> Val {
        let mut terms = self.terms.clone();
        for (k, f) in &o.terms {
            let slot = terms.entry(*k).or_default();
            *slot = &*slot + f;
        }
        terms.retain(|_, f| !f.is_zero());
        Val { terms }
    }

    fn neg(&self) -> Val {
        Val { terms: self.terms.iter().map(|(k, f)| (*k, -f)).collect() }
    }

    fn mul(&self, o: &Val, offset: usize) -> Result<Val, ParseError> {
        if self.n_terms() * o.n_terms() > MAX_TERMS * 4 {
            return Err(err(ParseErrorKind::TooLarge, offset, "smaller product", "expression too large"));
        }
        let mut out = Val::default();
        for (k1, f1) in &self.terms {
            for (k2, f2) in &o.terms {
                let k = k1 + k2;
                if k > MAX_P_POWER {
                    return Err(err(ParseErrorKind::PPowerTooHigh, offset, "momentum degree at most 2", format!("p^{k}")));
                }
                out = out.add(&Val::poly(f1 * f2, k));
            }
        }
        if out.n_terms() > MAX_TERMS {
            return Err(err(ParseErrorKind::TooLarge, offset, "smaller expression", "expression too large"));
        }
        Ok(out)
    }

    /// The single p-free monomial c·xᵉ, if that is what this value is.
    fn as_x_monomial(&self) -> Option<(Coeff, Q)> {
        match self.terms.len() {
            0 => Some((Coeff::zero(), Q::zero())),
            1 => {
                let p0 = self.terms.get(&0)?;
                p0.as_monomial().map(|(c, e)| (c.clone(), e.clone()))
            }
            _ => None,
        }
    }

    fn has_p(&self) -> bool {
        self.terms.keys().any(|&k| k > 0)
    }

    fn as_rational(&self) -> Option<Q> {
        let (c, e) = self.as_x_monomial()?;
        if !e.is_zero() && !c.is_zero() {
            return None;
        }
        c.as_rational().cloned()
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    bindings: &'a HashMap<String, Coeff>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(err(ParseErrorKind::TooLarge, self.offset(), "shallower nesting", "nesting too deep"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => break,
            }
            if acc.n_terms() > MAX_TERMS {
                return Err(err(ParseErrorKind::TooLarge, self.offset(), "smaller expression", "expression too large"));
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let (_, off) = self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs, off)?;
                }
                Tok::Slash => {
                    let (_, off) = self.bump();
                    let rhs_off = self.offset();
                    let rhs = self.unary()?;
                    acc = acc.mul(&reciprocal(&rhs, rhs_off)?, off)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val, ParseError> {
        self.enter()?;
        let v = match self.peek() {
            Tok::Minus => {
                self.bump();
                self.unary()?.neg()
            }
            Tok::Plus => {
                self.bump();
                self.unary()?
            }
            _ => self.power()?,
        };
        self.depth -= 1;
        Ok(v)
    }

    fn power(&mut self) -> Result<Val, ParseError> {
        let base_off = self.offset();
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_off = self.offset();
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let e = self.primary()?;
        let mut e = e
            .as_rational()
            .ok_or_else(|| err(ParseErrorKind::UnsupportedExponent, exp_off, "rational exponent", "non-constant exponent"))?;
        if negate {
            e = -e;
        }
        if e.numer().abs() > BigInt::from(MAX_EXPONENT_MAGNITUDE) || e.denom() > &BigInt::from(MAX_EXPONENT_MAGNITUDE) {
            return Err(err(ParseErrorKind::TooLarge, exp_off, "smaller exponent", fmt_q(&e)));
        }
        raise(&base, &e, base_off, exp_off)
    }

    fn primary(&mut self) -> Result<Val, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Val::constant(Coeff::rational(v))),
            Tok::Name(name) => match name.as_str() {
                "x" => Ok(Val::poly(PolyX::power(qi(1)), 0)),
                "p" => Ok(Val::poly(PolyX::one(), 1)),
                "sqrt2" => Ok(Val::constant(Coeff::sqrt2())),
                _ => match self.bindings.get(&name) {
                    Some(c) => Ok(Val::constant(c.clone())),
                    None => Err(err(ParseErrorKind::UnboundName, off, "bound name", format!("name '{name}'"))),
                },
            },
            Tok::LParen => {
                let inner = self.expr()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        Ok(inner)
                    }
                    other => Err(err(
                        ParseErrorKind::Syntax,
                        off,
                        "')' closing this parenthesis",
                        other.describe(),
                    )),
                }
            }
            other => Err(err(ParseErrorKind::Syntax, off, "number, name or '('", other.describe())),
        }
    }
}

fn reciprocal(v: &Val, off: usize) -> Result<Val, ParseError> {
    if v.has_p() {
        return Err(err(ParseErrorKind::PInDenominator, off, "p-free denominator", "p"));
    }
    let (c, e) = v
        .as_x_monomial()
        .ok_or_else(|| err(ParseErrorKind::NonMonomialDenominator, off, "single-term denominator", "sum of terms"))?;
    let inv = c.inv().ok_or_else(|| err(ParseErrorKind::DivisionByZero, off, "nonzero denominator", "zero"))?;
    Ok(Val::poly(PolyX::monomial(inv, -e), 0))
}

fn raise(base: &Val, e: &Q, base_off: usize, exp_off: usize) -> Result<Val, ParseError> {
    if e.is_integer() && !e.is_negative() {
        let k = e.to_integer().to_i64().unwrap_or(i64::MAX);
        if let Some((c, x_exp)) = base.as_x_monomial() {
            if c.is_one() || c.is_zero() {
                let c = if k == 0 { Coeff::one() } else { c };
                return Ok(Val::poly(PolyX::monomial(c, x_exp * e), 0));
            }
        }
        if k > MAX_INT_POWER {
            return Err(err(ParseErrorKind::TooLarge, exp_off, "integer power up to 64", fmt_q(e)));
        }
        let mut acc = Val::constant(Coeff::one());
        for _ in 0..k {
            acc = acc.mul(base, base_off)?;
        }
        return Ok(acc);
    }
    if base.has_p() {
        return Err(err(ParseErrorKind::UnsupportedExponent, exp_off, "non-negative integer power of p", fmt_q(e)));
    }
    let (c, x_exp) = base.as_x_monomial().ok_or_else(|| {
        err(ParseErrorKind::UnsupportedExponent, exp_off, "single-term base for non-integer or negative power", "sum of terms")
    })?;
    if c.is_zero() {
        return Err(err(ParseErrorKind::DivisionByZero, base_off, "nonzero base", "zero"));
    }
    let coeff = if c.is_one() {
        Coeff::one()
    } else if e.is_integer() {
        let k = (-e).to_integer().to_i64().unwrap_or(i64::MAX);
        if k > MAX_INT_POWER {
            return Err(err(ParseErrorKind::TooLarge, exp_off, "integer power up to 64", fmt_q(e)));
        }
        c.inv().expect("nonzero").pow_int(k as u32)
    } else {
        return Err(err(
            ParseErrorKind::UnsupportedExponent,
            base_off,
            "unit coefficient under a fractional power",
            format!("coefficient {c}"),
        ));
    };
    Ok(Val::poly(PolyX::monomial(coeff, x_exp * e), 0))
}

/// Parses a Hamiltonian expression; names other than `x`, `p` and `sqrt2`
/// resolve through `bindings`.
pub fn parse_hamiltonian(text: &str, bindings: &HashMap<String, Coeff>) -> Result<ClassicalSymbol, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, depth: 0, bindings };
    let v = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(err(ParseErrorKind::Syntax, parser.offset(), "operator or end of input", parser.peek().describe()));
    }
    Ok(ClassicalSymbol::from_terms(v.terms.into_iter().map(|(k, f)| (f, k))))
}

/// Bindings for the bubble Hamiltonian in symbolic units (M0 = U0 = 1).
pub fn unit_bindings() -> HashMap<String, Coeff> {
    ["M0", "U0", "hbar"].into_iter().map(|k| (k.to_string(), Coeff::one())).collect()
}
