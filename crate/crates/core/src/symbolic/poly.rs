//! Generalized polynomials Σ cₑ·xᵉ with exact coefficients and rational exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::field::{fmt_q, q_to_f64, qi, Coeff, Q};

/// Numeric evaluation hit a point where a coefficient is undefined.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("coefficient x^{exponent} is singular or undefined at x = {x}")]
pub struct DomainError {
    pub x: f64,
    pub exponent: String,
}

/// Canonical form: keyed by exponent (hence sorted and merged), no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyX {
    terms: BTreeMap<Q, Coeff>,
}

impl PolyX {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Coeff>) -> Self {
        Self::monomial(c, Q::zero())
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    /// `c·x^e`.
    pub fn monomial(c: impl Into<Coeff>, e: Q) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `x^e` with unit coefficient.
    pub fn power(e: Q) -> Self {
        Self::monomial(Coeff::one(), e)
    }

    /// Builds a polynomial from arbitrary (coefficient, exponent) pairs, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Coeff, Q)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (c, e) in it {
            out.add_term(c, e);
        }
        out
    }

    fn add_term(&mut self, c: Coeff, e: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Coeff::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Q) -> Coeff {
        self.terms.get(e).cloned().unwrap_or_else(Coeff::zero)
    }

    /// The single (coefficient, exponent) pair, if this is a monomial.
    pub fn as_monomial(&self) -> Option<(&Coeff, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (c, e))
        } else {
            None
        }
    }

    /// The constant value, if the polynomial has no x-dependence.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Q::zero()).cloned(),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coeff::is_real)
    }

    pub fn real_part(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (c.real_part(), e.clone())))
    }

    pub fn imag_part(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (c.imag_part(), e.clone())))
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (c.conj(), e.clone())))
    }

    pub fn scale(&self, k: &Coeff) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (c * k, e.clone())))
    }

    /// Multiplies by `x^s`.
    pub fn shift(&self, s: &Q) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect() }
    }

    /// Termwise d/dx.
    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| !e.is_zero())
                .map(|(e, c)| (c.scale(e), e - qi(1))),
        )
    }

    pub fn nth_derivative(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Termwise antiderivative with zero integration constant; `None` if an
    /// `x^{-1}` term would require a logarithm.
    pub fn antiderivative(&self) -> Option<Self> {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let e1 = e + qi(1);
            if e1.is_zero() {
                return None;
            }
            out.add_term(c.scale(&e1.recip()), e1);
        }
        Some(out)
    }

    /// Raises to a non-negative integer power.
    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Evaluates in floating point; principal branch only, so non-integer
    /// exponents require x > 0 and negative exponents require x ≠ 0.
    pub fn eval(&self, x: f64) -> Result<Complex64, DomainError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            acc += c.to_complex64() * pow_checked(x, e)?;
        }
        Ok(acc)
    }
}

pub(crate) fn pow_checked(x: f64, e: &Q) -> Result<f64, DomainError> {
    let err = || DomainError { x, exponent: fmt_q(e) };
    if e.is_integer() {
        if x == 0.0 && e.is_negative() {
            return Err(err());
        }
        let k = q_to_f64(e) as i32;
        Ok(x.powi(k))
    } else {
        if x < 0.0 || (x == 0.0 && e.is_negative()) {
            return Err(err());
        }
        Ok(x.powf(q_to_f64(e)))
    }
}

impl Add for &PolyX {
    type Output = PolyX;
    fn add(self, o: &PolyX) -> PolyX {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }
}

impl Sub for &PolyX {
    type Output = PolyX;
    fn sub(self, o: &PolyX) -> PolyX {
        self + &(-o)
    }
}

impl Neg for &PolyX {
    type Output = PolyX;
    fn neg(self) -> PolyX {
        PolyX { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &PolyX {
    type Output = PolyX;
    fn mul(self, o: &PolyX) -> PolyX {
        let mut out = PolyX::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        out
    }
}

impl Add for PolyX {
    type Output = PolyX;
    fn add(self, o: PolyX) -> PolyX {
        &self + &o
    }
}

impl Sub for PolyX {
    type Output = PolyX;
    fn sub(self, o: PolyX) -> PolyX {
        &self - &o
    }
}

impl Mul for PolyX {
    type Output = PolyX;
    fn mul(self, o: PolyX) -> PolyX {
        &self * &o
    }
}

impl Neg for PolyX {
    type Output = PolyX;
    fn neg(self) -> PolyX {
        -&self
    }
}

impl fmt::Display for PolyX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                if e.is_zero() {
                    format!("{c}")
                } else if e.is_one() {
                    format!("({c})·x")
                } else {
                    format!("({c})·x^({})", fmt_q(e))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::field::q;

    #[test]
    fn power_rule() {
        assert_eq!(PolyX::power(qi(-3)).derivative(), PolyX::monomial(Coeff::int(-3), qi(-4)));
        assert_eq!(
            PolyX::power(q(5, 2)).derivative(),
            PolyX::monomial(Coeff::ratio(5, 2), q(3, 2))
        );
        assert!(PolyX::one().derivative().is_zero());
    }

    #[test]
    fn canonical_merge_drops_zeros() {
        let p = PolyX::from_terms([(Coeff::int(2), qi(1)), (Coeff::int(-2), qi(1)), (Coeff::int(1), qi(0))]);
        assert_eq!(p, PolyX::one());
        let twice = PolyX::from_terms(p.terms().map(|(e, c)| (c.clone(), e.clone())));
        assert_eq!(twice, p);
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let p = PolyX::from_terms([(Coeff::sqrt2(), q(3, 2)), (Coeff::int(4), qi(-3))]);
        assert_eq!(p.antiderivative().unwrap().derivative(), p);
        assert!(PolyX::power(qi(-1)).antiderivative().is_none());
    }

    #[test]
    fn eval_domain() {
        let p = PolyX::power(q(1, 2));
        assert!((p.eval(4.0).unwrap().re - 2.0).abs() < 1e-15);
        assert!(p.eval(-1.0).is_err());
        assert!(PolyX::power(qi(-2)).eval(0.0).is_err());
        assert_eq!(PolyX::power(qi(2)).eval(-3.0).unwrap().re, 9.0);
    }
}
