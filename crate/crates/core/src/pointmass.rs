//! Point-mass coordinate change x = c·z^α, its measure, and conjugation of
//! a second-order operator back to unit measure.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::symbolic::{fmt_q, qi, Coeff, DiffOp, PolyX, Radical, RadicalError, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PointMassError {
    #[error("mass exponent n = {0} is not supported (need n > -2)")]
    UnsupportedExponent(String),
    #[error("operator order {0} exceeds 2")]
    OrderTooHigh(u32),
    #[error("coefficient {0} of x^{1} leaves Q(sqrt2) under the coordinate change")]
    OutsideField(String, String),
    #[error(transparent)]
    Radical(#[from] RadicalError),
}

/// x = c·z^α on (0, ∞).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMap {
    pub alpha: Q,
    pub c: Radical,
    /// 1/α, so that z = (x/c)^{1/α}.
    pub inv_alpha: Q,
}

impl CoordinateMap {
    pub fn identity() -> Self {
        Self { alpha: Q::one(), c: Radical::one(), inv_alpha: Q::one() }
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_one() && self.c.is_one()
    }

    /// c·α, the constant in dx/dz.
    pub fn jacobian_constant(&self) -> Result<Radical, PointMassError> {
        Ok(self.c.mul(&Radical::from_rational(&self.alpha)?))
    }

    /// Coefficient of ż² in ½m(x)ẋ² after the substitution, divided by M₀.
    /// Constant (and equal to 1) for the map returned by [`pm_map`].
    pub fn kinetic_factor(&self, n: &Q) -> Result<(Radical, Q), PointMassError> {
        let j = self.jacobian_constant()?;
        let constant = self.c.pow(n).mul(&j.pow(&qi(2)));
        let exponent = n * &self.alpha + qi(2) * (&self.alpha - qi(1));
        Ok((constant, exponent))
    }

    pub fn x_at(&self, z: f64) -> f64 {
        self.c.to_f64() * z.powf(crate::symbolic::field::q_to_f64(&self.alpha))
    }
}

impl fmt::Display for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x = {}·z^({})", self.c, fmt_q(&self.alpha))
    }
}

/// α = 2/(n+2), c = ((n+2)/2)^{2/(n+2)}.
pub fn pm_map(n: &Q) -> Result<CoordinateMap, PointMassError> {
    let np2 = n + qi(2);
    if !np2.is_positive() {
        return Err(PointMassError::UnsupportedExponent(fmt_q(n)));
    }
    let alpha = qi(2) / &np2;
    let c = Radical::power_of(&(&np2 / qi(2)), &alpha)?;
    let inv_alpha = &np2 / qi(2);
    Ok(CoordinateMap { alpha, c, inv_alpha })
}

/// Rewrites Σ f_k(x)·∂ₓᵏ (k ≤ 2) in z using ∂ₓ = z′∂_z and
/// ∂ₓ² = (z′)²∂_z² + z″∂_z.
pub fn transform_diffop(op: &DiffOp, map: &CoordinateMap) -> Result<DiffOp, PointMassError> {
    if op.order() > 2 {
        return Err(PointMassError::OrderTooHigh(op.order()));
    }
    let j_inv = map.jacobian_constant()?.inv();
    let alpha = &map.alpha;
    let one_minus = qi(1) - alpha;
    let mut out = DiffOp::zero();
    for (k, f) in op.terms() {
        for (e, coef) in f.terms() {
            let radical = map.c.pow(e).mul(&j_inv.pow(&qi(k as i64)));
            let m = radical
                .to_qsqrt2()
                .ok_or_else(|| PointMassError::OutsideField(coef.to_string(), fmt_q(e)))?;
            let c = coef * &Coeff::real(m);
            let base = alpha * e;
            let piece = match k {
                0 => DiffOp::multiply(PolyX::monomial(c, base)),
                1 => DiffOp::term(PolyX::monomial(c, &base + &one_minus), 1),
                _ => {
                    let second = DiffOp::term(PolyX::monomial(c.clone(), &base + qi(2) * &one_minus), 2);
                    let first = DiffOp::term(
                        PolyX::monomial(&c * &Coeff::rational(one_minus.clone()), &base + qi(1) - qi(2) * alpha),
                        1,
                    );
                    &second + &first
                }
            };
            out = &out + &piece;
        }
    }
    Ok(out)
}

/// μ(z) = constant·z^exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    pub constant: Radical,
    pub exponent: Q,
}

impl Measure {
    pub fn unit() -> Self {
        Self { constant: Radical::one(), exponent: Q::zero() }
    }

    pub fn is_unit(&self) -> bool {
        self.constant.is_one() && self.exponent.is_zero()
    }

    /// μ′/μ = e/z.
    pub fn log_derivative(&self) -> PolyX {
        PolyX::monomial(Coeff::rational(self.exponent.clone()), qi(-1))
    }

    /// μ″/μ = e(e−1)/z².
    pub fn second_ratio(&self) -> PolyX {
        let e = &self.exponent;
        PolyX::monomial(Coeff::rational(e * (e - qi(1))), qi(-2))
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.constant.to_f64() * z.powf(crate::symbolic::field::q_to_f64(&self.exponent))
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·z^({})", self.constant, fmt_q(&self.exponent))
    }
}

#[derive(Serialize)]
pub struct MeasureJson {
    /// Prime-power factorization of the constant, `[[p, "e"], ...]`.
    pub constant_factors: Vec<(u64, String)>,
    pub constant_value: f64,
    pub exponent: String,
}

impl From<&Measure> for MeasureJson {
    fn from(m: &Measure) -> Self {
        Self {
            constant_factors: m.constant.factors().map(|(p, e)| (p, fmt_q(e))).collect(),
            constant_value: m.constant.to_f64(),
            exponent: fmt_q(&m.exponent),
        }
    }
}

/// μ = dx/dz = c·α·z^{α−1}.
pub fn measure_of_map(map: &CoordinateMap) -> Result<Measure, PointMassError> {
    Ok(Measure { constant: map.jacobian_constant()?, exponent: &map.alpha - qi(1) })
}

/// Conjugation by √μ: Ã = A, B̃ = B − A·μ′/μ,
/// C̃ = A[¾(μ′/μ)² − ½μ″/μ] − ½B·μ′/μ + C.
pub fn unit_measure_restore(op: &DiffOp, mu: &Measure) -> Result<DiffOp, PointMassError> {
    if op.order() > 2 {
        return Err(PointMassError::OrderTooHigh(op.order()));
    }
    let a = op.coeff(2);
    let b = op.coeff(1);
    let c = op.coeff(0);
    let r = mu.log_derivative();
    let s = mu.second_ratio();
    let b_new = &b - &(&a * &r);
    let bracket = &(&r * &r).scale(&Coeff::ratio(3, 4)) - &s.scale(&Coeff::ratio(1, 2));
    let c_new = &(&(&a * &bracket) - &(&b * &r).scale(&Coeff::ratio(1, 2))) + &c;
    Ok(DiffOp::from_terms([(a, 2), (b_new, 1), (c_new, 0)]))
}
