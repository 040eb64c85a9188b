//! Positive real constants of the form ∏ pᵉ over primes p with rational
//! exponents e. The representation is canonical, so equality is exact:
//! `(5/2)^{2/5} · 2/5` and `(2/5)^{3/5}` compare equal.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{fmt_q, q_to_f64, qi, QSqrt2, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Radical {
    factors: BTreeMap<u64, Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RadicalError {
    #[error("radical base must be a positive rational, got {0}")]
    NonPositive(String),
    #[error("integer {0} too large to factor")]
    TooLarge(String),
}

fn factor_u64(mut n: u64, sign: i64, out: &mut BTreeMap<u64, Q>) {
    let push = |p: u64, k: i64, out: &mut BTreeMap<u64, Q>| {
        let e = out.entry(p).or_insert_with(Q::zero);
        *e += qi(k * sign);
    };
    let mut p = 2u64;
    while p * p <= n {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k > 0 {
            push(p, k, out);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        push(n, 1, out);
    }
}

impl Radical {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_rational(r: &Q) -> Result<Self, RadicalError> {
        if !r.is_positive() {
            return Err(RadicalError::NonPositive(fmt_q(r)));
        }
        let to_u64 = |b: &BigInt| b.to_u64().ok_or_else(|| RadicalError::TooLarge(b.to_string()));
        let mut factors = BTreeMap::new();
        factor_u64(to_u64(r.numer())?, 1, &mut factors);
        factor_u64(to_u64(r.denom())?, -1, &mut factors);
        let mut out = Self { factors };
        out.prune();
        Ok(out)
    }

    /// `base^exp` for a positive rational base.
    pub fn power_of(base: &Q, exp: &Q) -> Result<Self, RadicalError> {
        Ok(Self::from_rational(base)?.pow(exp))
    }

    fn prune(&mut self) {
        self.factors.retain(|_, e| !e.is_zero());
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn pow(&self, exp: &Q) -> Self {
        let mut out = Self {
            factors: self.factors.iter().map(|(p, e)| (*p, e * exp)).collect(),
        };
        out.prune();
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (p, e) in &o.factors {
            *factors.entry(*p).or_insert_with(Q::zero) += e;
        }
        let mut out = Self { factors };
        out.prune();
        out
    }

    pub fn inv(&self) -> Self {
        self.pow(&qi(-1))
    }

    pub fn to_f64(&self) -> f64 {
        self.factors
            .iter()
            .map(|(p, e)| (*p as f64).powf(q_to_f64(e)))
            .product()
    }

    /// The rational value, if all exponents are integers.
    pub fn to_rational(&self) -> Option<Q> {
        let mut out = Q::one();
        for (p, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer().to_i32()?;
            let base = Q::from_integer(BigInt::from(*p));
            out *= if k >= 0 { num_traits::pow(base, k as usize) } else { num_traits::pow(base.recip(), (-k) as usize) };
        }
        Some(out)
    }

    /// The value inside Q(√2), if it lies there: all exponents integral
    /// except that of 2, which may be half-integral.
    pub fn to_qsqrt2(&self) -> Option<QSqrt2> {
        let half = Q::new(BigInt::from(1), BigInt::from(2));
        let two_exp = self.factors.get(&2).cloned().unwrap_or_else(Q::zero);
        let (rest, surd) = if two_exp.is_integer() {
            (self.clone(), false)
        } else if (&two_exp - &half).is_integer() {
            let mut r = self.clone();
            r.factors.insert(2, &two_exp - &half);
            r.prune();
            (r, true)
        } else {
            return None;
        };
        let r = rest.to_rational()?;
        Some(if surd { QSqrt2::new(Q::zero(), r) } else { QSqrt2::rational(r) })
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, &Q)> {
        self.factors.iter().map(|(p, e)| (*p, e))
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if e.is_one() { p.to_string() } else { format!("{}^({})", p, fmt_q(e)) })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}
