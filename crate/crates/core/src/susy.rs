//! Ladder-operator factorization of the power-law PDM kinetic family.
//!
//! For m(x) = M₀xⁿ and ordering parameter a (b = −½ − a):
//!
//! ```text
//! A⁻ =  (1/√2)·mᵇ D mᵃ + W
//! A⁺ = −(1/√2)·mᵃ D mᵇ + W
//! W  = ½∫√(2m) dx + ((4a+1)/2)·(1/√(2m))′
//! ```
//!
//! Everything is expanded to normal form through [`DiffOp::compose`], so the
//! Heisenberg condition [A⁻, A⁺] = 1 and the partner potentials are checked
//! rather than assumed. Partner potentials come from two sources: the closed
//! formula in terms of m(x) (`ClosedForm`) and direct operator subtraction
//! A±A∓ − T± (`Expanded`). The two disagree in the x⁻⁽ⁿ⁺²⁾ coefficient of V⁺
//! unless a = −¼; both are kept so the disagreement stays visible.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::Serialize;

use crate::helium::DerivedParams;
use crate::pointmass::pm_map;
use crate::symbolic::{expand_sandwich, fmt_q, qi, Coeff, DiffOp, OrderingParam, PolyX, PowerLawMass, QSqrt2, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SusyError {
    #[error("partner potential still contains derivative terms of order {0}; operator algebra is inconsistent")]
    ResidualDerivative(u32),
    #[error("a W-type closed form needs ∫x^(-1) (n = {0}), which is logarithmic")]
    Logarithmic(String),
    #[error("the effective z-space Hamiltonian is defined for the cubic bubble mass only")]
    UnsupportedMass,
    #[error("unknown partner source {0:?} (expected paper or expanded)")]
    UnknownSource(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PartnerSource {
    /// Closed-form V± in terms of m(x).
    #[serde(rename = "paper-eq12")]
    ClosedForm,
    /// V± = A±A∓ − T± by operator subtraction.
    #[serde(rename = "expanded")]
    Expanded,
}

impl PartnerSource {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ClosedForm => "paper-eq12",
            Self::Expanded => "expanded",
        }
    }
}

impl fmt::Display for PartnerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PartnerSource {
    type Err = SusyError;
    fn from_str(s: &str) -> Result<Self, SusyError> {
        match s {
            "paper" | "paper-eq12" => Ok(Self::ClosedForm),
            "expanded" => Ok(Self::Expanded),
            other => Err(SusyError::UnknownSource(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LadderSign {
    /// A⁺
    #[serde(rename = "+")]
    Raising,
    /// A⁻
    #[serde(rename = "-")]
    Lowering,
}

impl LadderSign {
    pub fn opposite(self) -> Self {
        match self {
            Self::Raising => Self::Lowering,
            Self::Lowering => Self::Raising,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Raising => "+",
            Self::Lowering => "-",
        }
    }
}

/// W(x) as an exact generalized polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superpotential {
    pub w: PolyX,
}

impl Superpotential {
    /// Coefficient of x^{(n+2)/2}.
    pub fn growing_coeff(&self, mass: &PowerLawMass) -> Coeff {
        self.w.coeff(&((mass.n() + qi(2)) / qi(2)))
    }

    /// Coefficient of x^{−(n+2)/2}.
    pub fn singular_coeff(&self, mass: &PowerLawMass) -> Coeff {
        self.w.coeff(&(-(mass.n() + qi(2)) / qi(2)))
    }

    /// W with its x^{−(n+2)/2} term removed.
    pub fn without_singular(&self, mass: &PowerLawMass) -> Self {
        let e = -(mass.n() + qi(2)) / qi(2);
        Self { w: PolyX::from_terms(self.w.terms().filter(|(k, _)| **k != e).map(|(k, c)| (c.clone(), k.clone()))) }
    }
}

/// √(2m(x)) = √2·√M₀·x^{n/2}.
fn sqrt_two_m(mass: &PowerLawMass) -> PolyX {
    let c = &QSqrt2::sqrt2() * mass.sqrt_m0();
    PolyX::monomial(c, mass.n() / qi(2))
}

/// 1/√(2m(x)).
fn inv_sqrt_two_m(mass: &PowerLawMass) -> PolyX {
    let c = (&QSqrt2::sqrt2() * mass.sqrt_m0()).inv().expect("positive mass scale");
    PolyX::monomial(c, -(mass.n() / qi(2)))
}

/// W = ½∫√(2m) dx + ((4a+1)/2)(1/√(2m))′.
pub fn superpotential(mass: &PowerLawMass, ord: &OrderingParam) -> Result<Superpotential, SusyError> {
    let integral = sqrt_two_m(mass).antiderivative().ok_or_else(|| SusyError::Logarithmic(fmt_q(mass.n())))?;
    let first = integral.scale(&Coeff::ratio(1, 2));
    let slope = Coeff::rational((qi(4) * &ord.a + qi(1)) / qi(2));
    let second = inv_sqrt_two_m(mass).derivative().scale(&slope);
    Ok(Superpotential { w: &first + &second })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderOp {
    pub sign: LadderSign,
    pub op: DiffOp,
    pub w: Superpotential,
    pub ord: OrderingParam,
}

/// The derivative part ±(1/√2)·m^{s} D m^{t} with m0^{s+t} = m0^{-1/2} folded in.
fn derivative_part(mass: &PowerLawMass, ord: &OrderingParam, sign: LadderSign) -> DiffOp {
    let a = ord.a.clone();
    let b = ord.b();
    let (left, right, s) = match sign {
        LadderSign::Lowering => (b, a, Coeff::one()),
        LadderSign::Raising => (a, b, Coeff::int(-1)),
    };
    let inv_sqrt2_m0 = (&QSqrt2::sqrt2() * mass.sqrt_m0()).inv().expect("positive mass scale");
    let pre = &s * &Coeff::real(inv_sqrt2_m0);
    DiffOp::multiply(mass.x_power(&left))
        .compose(&DiffOp::d())
        .compose(&DiffOp::multiply(mass.x_power(&right)))
        .scale(&pre)
}

/// A± built from an explicit superpotential.
pub fn ladder_operator_with(mass: &PowerLawMass, ord: &OrderingParam, sign: LadderSign, w: &Superpotential) -> LadderOp {
    let op = &derivative_part(mass, ord, sign) + &DiffOp::multiply(w.w.clone());
    LadderOp { sign, op, w: w.clone(), ord: ord.clone() }
}

pub fn ladder_operator(mass: &PowerLawMass, ord: &OrderingParam, sign: LadderSign) -> Result<LadderOp, SusyError> {
    let w = superpotential(mass, ord)?;
    Ok(ladder_operator_with(mass, ord, sign, &w))
}

/// H⁺ = A⁺A⁻ (sign `Raising`) or H⁻ = A⁻A⁺ (sign `Lowering`).
pub fn ladder_product(mass: &PowerLawMass, ord: &OrderingParam, sign: LadderSign) -> Result<DiffOp, SusyError> {
    let first = ladder_operator(mass, ord, sign)?;
    let second = ladder_operator(mass, ord, sign.opposite())?;
    Ok(first.op.compose(&second.op))
}

/// A⁺ + A⁻, which reduces to a multiplication operator.
pub fn ladder_sum(mass: &PowerLawMass, ord: &OrderingParam) -> Result<DiffOp, SusyError> {
    let p = ladder_operator(mass, ord, LadderSign::Raising)?;
    let m = ladder_operator(mass, ord, LadderSign::Lowering)?;
    Ok(&p.op + &m.op)
}

/// [A⁻, A⁺] − 1 for a given superpotential; the zero operator when the
/// Heisenberg algebra holds.
pub fn commutator_residual_with(mass: &PowerLawMass, ord: &OrderingParam, w: &Superpotential) -> DiffOp {
    let lower = ladder_operator_with(mass, ord, LadderSign::Lowering, w);
    let raise = ladder_operator_with(mass, ord, LadderSign::Raising, w);
    &lower.op.commutator(&raise.op) - &DiffOp::identity()
}

pub fn commutator_check(mass: &PowerLawMass, ord: &OrderingParam) -> Result<DiffOp, SusyError> {
    Ok(commutator_residual_with(mass, ord, &superpotential(mass, ord)?))
}

/// Kinetic term T± of H±: the sandwich with (a, b) for `+` and (b, a) for `−`.
pub fn kinetic_term(mass: &PowerLawMass, ord: &OrderingParam, sign: LadderSign) -> DiffOp {
    match sign {
        LadderSign::Raising => expand_sandwich(mass, ord),
        LadderSign::Lowering => expand_sandwich(mass, &ord.swapped()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartnerPotential {
    pub v: PolyX,
    pub sign: LadderSign,
    pub source: PartnerSource,
}

/// V± = ½(∫√m dx)² + ((4a+1)/4)(1/√m)(1/√m)″ − ((4a+1)²/8)((1/√m)′)² ∓ ½.
fn closed_form_partner(mass: &PowerLawMass, ord: &OrderingParam, sign: LadderSign) -> Result<PolyX, SusyError> {
    let sqrt_m = PolyX::monomial(mass.sqrt_m0().clone(), mass.n() / qi(2));
    let inv_sqrt_m = PolyX::monomial(mass.sqrt_m0().inv().expect("positive"), -(mass.n() / qi(2)));
    let integral = sqrt_m.antiderivative().ok_or_else(|| SusyError::Logarithmic(fmt_q(mass.n())))?;
    let s = qi(4) * &ord.a + qi(1);
    let t1 = (&integral * &integral).scale(&Coeff::ratio(1, 2));
    let t2 = (&inv_sqrt_m * &inv_sqrt_m.nth_derivative(2)).scale(&Coeff::rational(&s / qi(4)));
    let d1 = inv_sqrt_m.derivative();
    let t3 = (&d1 * &d1).scale(&Coeff::rational(-(&s * &s) / qi(8)));
    let shift = match sign {
        LadderSign::Raising => Coeff::ratio(-1, 2),
        LadderSign::Lowering => Coeff::ratio(1, 2),
    };
    Ok(&(&(&t1 + &t2) + &t3) + &PolyX::constant(shift))
}

pub fn partner_potential(
    mass: &PowerLawMass,
    ord: &OrderingParam,
    sign: LadderSign,
    source: PartnerSource,
) -> Result<PartnerPotential, SusyError> {
    let v = match source {
        PartnerSource::ClosedForm => closed_form_partner(mass, ord, sign)?,
        PartnerSource::Expanded => {
            let diff = &ladder_product(mass, ord, sign)? - &kinetic_term(mass, ord, sign);
            if diff.order() > 0 {
                return Err(SusyError::ResidualDerivative(diff.order()));
            }
            diff.coeff(0)
        }
    };
    Ok(PartnerPotential { v, sign, source })
}

/// The x-space Hamiltonian rewritten in the oscillator coordinate z:
///
/// H = −k·D² + k·c_a/z² + U₀·z^{4/5}(1 − z^{2/5}) + c₀, with k = ħ²/(2M₀R_c²).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveHamiltonianZ {
    #[serde(skip)]
    pub ord: OrderingParam,
    pub source: PartnerSource,
    /// Kinetic prefactor, J.
    pub k: f64,
    /// Dimensionless inverse-square coefficient.
    #[serde(skip)]
    pub c_a: Q,
    /// Potential scale U₀, J.
    pub u0: f64,
    #[serde(skip)]
    pub sys_exponents: (Q, Q),
    /// Constant offset, J.
    pub c0: f64,
}

impl EffectiveHamiltonianZ {
    /// −½D² + ½c_a z⁻² in symbolic units (k = ½); multiply by 2k for joules.
    pub fn kinetic_op(&self) -> DiffOp {
        let half = Coeff::ratio(1, 2);
        &DiffOp::term(PolyX::constant(-&half), 2)
            + &DiffOp::multiply(PolyX::monomial(Coeff::rational(&self.c_a / qi(2)), qi(-2)))
    }

    /// Joules per symbolic energy unit of [`Self::kinetic_op`].
    pub fn energy_scale(&self) -> f64 {
        2.0 * self.k
    }

    pub fn c_a_f64(&self) -> f64 {
        crate::symbolic::field::q_to_f64(&self.c_a)
    }

    pub fn v_a(&self, z: f64) -> f64 {
        self.k * self.c_a_f64() / (z * z)
    }

    pub fn v_sys(&self, z: f64) -> f64 {
        let e1 = crate::symbolic::field::q_to_f64(&self.sys_exponents.0);
        let e2 = crate::symbolic::field::q_to_f64(&self.sys_exponents.1);
        self.u0 * (z.powf(e1) - z.powf(e2)) + self.c0
    }

    pub fn v_total(&self, z: f64) -> f64 {
        self.v_a(z) + self.v_sys(z)
    }
}

/// Maps the x⁻⁵ coefficient of V⁺ through x⁻⁵ = s²·(A⁺+A⁻)⁻² with
/// A⁺ + A⁻ = s·x^{5/2}, then (A⁺+A⁻)² = 2z².
pub fn inverse_square_coefficient(ord: &OrderingParam, source: PartnerSource) -> Result<Q, SusyError> {
    let mass = PowerLawMass::cubic();
    let v = partner_potential(&mass, ord, LadderSign::Raising, source)?;
    let e = v.v.coeff(&qi(-5));
    let sum = ladder_sum(&mass, ord)?.coeff(0);
    let (s, _) = sum.as_monomial().ok_or(SusyError::UnsupportedMass)?;
    let s2 = s * s;
    // −e·x⁻⁵ in H → −e·s²/(2z²) = k·c_a/z² with k = ½
    let c_a = -(&e * &s2);
    c_a.as_rational().cloned().ok_or(SusyError::UnsupportedMass)
}

pub fn effective_hamiltonian_z(
    ord: &OrderingParam,
    params: &DerivedParams,
    source: PartnerSource,
    c0: f64,
) -> Result<EffectiveHamiltonianZ, SusyError> {
    let c_a = inverse_square_coefficient(ord, source)?;
    let alpha = pm_map(&qi(3)).map_err(|_| SusyError::UnsupportedMass)?.alpha;
    Ok(EffectiveHamiltonianZ {
        ord: ord.clone(),
        source,
        k: params.k,
        c_a,
        u0: params.u0,
        sys_exponents: (qi(2) * &alpha, qi(3) * &alpha),
        c0,
    })
}
