//! Power-law masses m(x) = M₀·xⁿ and the (a, b) sandwich ordering family.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::diffop::DiffOp;
use super::field::{fmt_q, q, qi, Coeff, QSqrt2, Q};
use super::poly::PolyX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MassError {
    #[error("mass exponent must be non-negative, got {0}")]
    NegativeExponent(String),
    #[error("mass scale must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("sqrt of mass scale {0} is not in Q(sqrt2)")]
    IrrationalScale(String),
}

/// m(x) = m0·xⁿ. Symbolic work uses m0 = 1 unless a different exactly
/// representable scale is requested (√m0 must lie in Q(√2)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerLawMass {
    n: Q,
    m0: Q,
    sqrt_m0: QSqrt2,
}

impl PowerLawMass {
    pub fn new(n: Q) -> Result<Self, MassError> {
        Self::with_scale(n, Q::one())
    }

    pub fn with_scale(n: Q, m0: Q) -> Result<Self, MassError> {
        if n.is_negative() {
            return Err(MassError::NegativeExponent(fmt_q(&n)));
        }
        if !m0.is_positive() {
            return Err(MassError::NonPositiveScale(fmt_q(&m0)));
        }
        let sqrt_m0 = QSqrt2::sqrt_of(&m0).ok_or_else(|| MassError::IrrationalScale(fmt_q(&m0)))?;
        Ok(Self { n, m0, sqrt_m0 })
    }

    /// The bubble mass M₀x³.
    pub fn cubic() -> Self {
        Self::new(qi(3)).expect("n = 3 is valid")
    }

    pub fn n(&self) -> &Q {
        &self.n
    }

    pub fn m0(&self) -> &Q {
        &self.m0
    }

    pub fn sqrt_m0(&self) -> &QSqrt2 {
        &self.sqrt_m0
    }

    /// The x-dependent part of mˢ, i.e. x^{n·s} (the m0ˢ factor is tracked by callers).
    pub fn x_power(&self, s: &Q) -> PolyX {
        PolyX::power(&self.n * s)
    }

    /// m(x) itself as a polynomial.
    pub fn as_poly(&self) -> PolyX {
        PolyX::monomial(Coeff::rational(self.m0.clone()), self.n.clone())
    }
}

impl fmt::Display for PowerLawMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·x^({})", fmt_q(&self.m0), fmt_q(&self.n))
    }
}

/// Ordering parameter `a`; the partner exponent is `b = −1/2 − a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderingParam {
    pub a: Q,
}

impl OrderingParam {
    pub fn new(a: Q) -> Self {
        Self { a }
    }

    pub fn b(&self) -> Q {
        q(-1, 2) - &self.a
    }

    /// The ordering with the roles of a and b exchanged.
    pub fn swapped(&self) -> Self {
        Self { a: self.b() }
    }
}

impl fmt::Display for OrderingParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={}", fmt_q(&self.a))
    }
}

/// Expands −½·mᵃ·D·m²ᵇ·D·mᵃ to normal form by composition.
///
/// For m = xⁿ the result is −½[x⁻ⁿD² − n·x⁻ⁿ⁻¹D + γ·x⁻ⁿ⁻²]; γ is whatever the
/// composition produces.
pub fn expand_sandwich(mass: &PowerLawMass, ord: &OrderingParam) -> DiffOp {
    let a = &ord.a;
    let b = ord.b();
    let outer = DiffOp::multiply(mass.x_power(a));
    let inner = DiffOp::multiply(mass.x_power(&(qi(2) * &b)));
    let d = DiffOp::d();
    let core = outer.compose(&d).compose(&inner).compose(&d).compose(&outer);
    // m0^{2a+2b} = 1/m0
    let scale = Coeff::rational(q(-1, 2) / mass.m0());
    core.scale(&scale)
}

/// The derivative-free coefficient γ of the bracket, read back from [`expand_sandwich`].
pub fn sandwich_gamma(mass: &PowerLawMass, ord: &OrderingParam) -> Q {
    let op = expand_sandwich(mass, ord);
    let c0 = op.coeff(0);
    let e = -(mass.n() + qi(2));
    let c = c0.coeff(&e);
    // undo −½/m0
    let g = &c * &Coeff::rational(qi(-2) * mass.m0());
    g.as_rational().cloned().unwrap_or_else(Q::zero)
}
