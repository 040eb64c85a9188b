//! Which sandwich orderings reproduce a given kinetic operator.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::parser::ClassicalSymbol;
use crate::pointmass::{measure_of_map, pm_map, transform_diffop, unit_measure_restore, PointMassError};
use crate::susy::{inverse_square_coefficient, PartnerSource, SusyError};
use crate::symbolic::field::{q_to_f64, rational_sqrt};
use crate::symbolic::{
    expand_sandwich, fmt_q, qi, sandwich_gamma, Coeff, DiffOp, DiffOpJson, MassError, OrderingParam, PolyX,
    PowerLawMass, Q,
};
use crate::weyl::weyl_order;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderingError {
    #[error("target is not a kinetic operator for mass exponent {n}: {reason}")]
    InvalidTarget { n: String, reason: String },
    #[error("every ordering gives the same operator for n = 0")]
    Degenerate,
    #[error("the closed-form partner source is defined for n = 3 only, got n = {0}")]
    ClosedFormNeedsCubic(String),
    #[error("named orderings are tabulated for n = 3 only, got n = {0}")]
    NamedNeedsCubic(String),
    #[error(transparent)]
    Mass(#[from] MassError),
    #[error(transparent)]
    PointMass(#[from] PointMassError),
    #[error(transparent)]
    Susy(#[from] SusyError),
}

/// γ in −½[x⁻ⁿD² − n·x⁻ⁿ⁻¹D + γ·x⁻ⁿ⁻²] (M₀ = 1).
pub fn kinetic_family_coefficient(n: &Q, a: &Q) -> Result<Q, OrderingError> {
    let mass = PowerLawMass::new(n.clone())?;
    Ok(sandwich_gamma(&mass, &OrderingParam::new(a.clone())))
}

/// Weyl ordering of x⁻ⁿp²/2.
pub fn weyl_kinetic(n: &Q) -> DiffOp {
    let f = PolyX::monomial(Coeff::ratio(1, 2), -n.clone());
    weyl_order(&ClassicalSymbol::term(f, 2))
}

/// A real root of the ordering quadratic, exact when rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootValue {
    Rational(Q),
    /// p + s·scale·√d with s = ±1.
    Surd { p: Q, s: i8, d: Q, scale: Q },
}

impl RootValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Rational(r) => q_to_f64(r),
            Self::Surd { p, s, d, scale } => q_to_f64(p) + f64::from(*s) * q_to_f64(scale) * q_to_f64(d).sqrt(),
        }
    }

    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            Self::Rational(r) => Some(r),
            Self::Surd { .. } => None,
        }
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => f.write_str(&fmt_q(r)),
            Self::Surd { p, s, d, scale } => {
                let sign = if *s > 0 { "+" } else { "-" };
                write!(f, "{} {} ({})*sqrt({})", fmt_q(p), sign, fmt_q(scale), fmt_q(d))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport {
    pub a: RootValue,
    /// The sandwich at this a equals the target operator exactly.
    pub verified: bool,
    pub satisfies_quadratic: bool,
    /// sandwich(a) − target, in the target's normalization; `None` for surd roots.
    pub residual: Option<DiffOp>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingSolution {
    pub source: PartnerSource,
    pub n: Q,
    /// [c2, c1, c0] of c2·a² + c1·a + c0 = 0.
    pub quadratic: [Q; 3],
    pub discriminant: Q,
    pub roots: Vec<RootReport>,
}

#[derive(Serialize)]
pub struct RootJson {
    pub a: String,
    pub a_value: f64,
    pub verified: bool,
    pub satisfies_quadratic: bool,
    pub residual_terms: Option<DiffOpJson>,
}

#[derive(Serialize)]
pub struct OrderingSolutionJson {
    pub source: PartnerSource,
    pub n: String,
    pub quadratic: [String; 3],
    pub discriminant: String,
    pub roots: Vec<RootJson>,
}

impl OrderingSolution {
    pub fn rational_roots(&self) -> Vec<Q> {
        self.roots.iter().filter_map(|r| r.a.as_rational().cloned()).collect()
    }

    pub fn to_json(&self) -> OrderingSolutionJson {
        OrderingSolutionJson {
            source: self.source,
            n: fmt_q(&self.n),
            quadratic: self.quadratic.clone().map(|c| fmt_q(&c)),
            discriminant: fmt_q(&self.discriminant),
            roots: self
                .roots
                .iter()
                .map(|r| RootJson {
                    a: r.a.to_string(),
                    a_value: r.a.to_f64(),
                    verified: r.verified,
                    satisfies_quadratic: r.satisfies_quadratic,
                    residual_terms: r.residual.as_ref().map(DiffOp::to_json),
                })
                .collect(),
        }
    }
}

/// Real roots ascending; empty when the discriminant is negative.
fn solve_quadratic(c: &[Q; 3]) -> Vec<RootValue> {
    let [c2, c1, c0] = c;
    if c2.is_zero() {
        if c1.is_zero() {
            return Vec::new();
        }
        return vec![RootValue::Rational(-c0 / c1)];
    }
    let disc = c1 * c1 - qi(4) * c2 * c0;
    if disc.is_negative() {
        return Vec::new();
    }
    let two_a = qi(2) * c2;
    let p = -c1 / &two_a;
    let mut roots = match rational_sqrt(&disc) {
        Some(r) if r.is_zero() => vec![RootValue::Rational(p)],
        Some(r) => {
            let d = r / &two_a;
            vec![RootValue::Rational(&p - &d), RootValue::Rational(&p + &d)]
        }
        None => {
            let scale = (qi(1) / &two_a).abs();
            vec![
                RootValue::Surd { p: p.clone(), s: -1, d: disc.clone(), scale: scale.clone() },
                RootValue::Surd { p, s: 1, d: disc, scale },
            ]
        }
    };
    roots.sort_by(|x, y| x.to_f64().total_cmp(&y.to_f64()));
    roots
}

fn eval_quadratic(c: &[Q; 3], a: &Q) -> Q {
    &c[0] * a * a + &c[1] * a + &c[2]
}

/// Brings the target to −½x⁻ⁿD² + … and checks the first-order term.
fn normalize_target(n: &Q, target: &DiffOp) -> Result<(DiffOp, Coeff), OrderingError> {
    let bad = |reason: &str| OrderingError::InvalidTarget { n: fmt_q(n), reason: reason.to_string() };
    if target.order() != 2 {
        return Err(bad("second-order term missing or order above 2"));
    }
    let lead = target.coeff(2);
    let (c, e) = lead.as_monomial().ok_or_else(|| bad("leading coefficient is not a single power"))?;
    if *e != -n.clone() {
        return Err(bad(&format!("leading power is x^({}), expected x^({})", fmt_q(e), fmt_q(&-n.clone()))));
    }
    let s = Coeff::ratio(-1, 2).checked_div(c).ok_or_else(|| bad("zero leading coefficient"))?;
    let norm = target.scale(&s);
    let expected_b = PolyX::monomial(Coeff::rational(n / qi(2)), -(n + qi(1)));
    if norm.coeff(1) != expected_b {
        return Err(bad("first-order coefficient does not match the symmetric form"));
    }
    let rest = norm.coeff(0);
    if rest.terms().any(|(k, _)| *k != -(n + qi(2))) {
        return Err(bad("potential terms other than x^(-n-2)"));
    }
    Ok((norm, s))
}

fn verify(mass: &PowerLawMass, target_norm: &DiffOp, inv_scale: &Coeff, a: &RootValue) -> (bool, Option<DiffOp>) {
    match a {
        RootValue::Rational(r) => {
            let res = (&expand_sandwich(mass, &OrderingParam::new(r.clone())) - target_norm).scale(inv_scale);
            (res.is_zero(), Some(res))
        }
        RootValue::Surd { .. } => {
            // no exact arithmetic in Q(√d); compare γ numerically
            let n = q_to_f64(mass.n());
            let av = a.to_f64();
            let gamma = -n * av * (n * av + n + 1.0);
            let want = -2.0 * target_norm.coeff(0).coeff(&-(mass.n() + qi(2))).to_complex64().re;
            ((gamma - want).abs() < 1e-12 * want.abs().max(1.0), None)
        }
    }
}

/// Solves for orderings matching `target` (a kinetic operator for mass xⁿ).
///
/// `Expanded`: γ(a) = γ_target as n²a² + n(n+1)a + γ_target = 0.
/// `ClosedForm` (n = 3): c_a(a) = c_target in z-space, with c_a taken from
/// the closed-form partner potential and c_target from transforming and
/// restoring the target; scaled so the quadratic reads
/// −144a² + 48a + 21 − 100·(−c_target) = 0.
pub fn match_orderings(n: &Q, target: &DiffOp, source: PartnerSource) -> Result<OrderingSolution, OrderingError> {
    if n.is_zero() {
        return Err(OrderingError::Degenerate);
    }
    let mass = PowerLawMass::new(n.clone())?;
    let (norm, s) = normalize_target(n, target)?;
    let inv_scale = s.inv().expect("nonzero scale");
    let quadratic = match source {
        PartnerSource::Expanded => {
            let gamma_t = norm.coeff(0).coeff(&-(n + qi(2)));
            let gamma_t = (&gamma_t * &Coeff::int(-2))
                .as_rational()
                .cloned()
                .ok_or_else(|| OrderingError::InvalidTarget { n: fmt_q(n), reason: "irrational γ".into() })?;
            [n * n, n * (n + qi(1)), gamma_t]
        }
        PartnerSource::ClosedForm => {
            if *n != qi(3) {
                return Err(OrderingError::ClosedFormNeedsCubic(fmt_q(n)));
            }
            let map = pm_map(n)?;
            let restored = unit_measure_restore(&transform_diffop(&norm, &map)?, &measure_of_map(&map)?)?;
            let c_target = (&restored.coeff(0).coeff(&qi(-2)) * &Coeff::int(2))
                .as_rational()
                .cloned()
                .ok_or_else(|| OrderingError::InvalidTarget { n: fmt_q(n), reason: "irrational z-space term".into() })?;
            // −100·c_a(a) is quadratic in a; recover its coefficients from three samples
            let f = |a: i64| -> Result<Q, OrderingError> {
                Ok(-qi(100) * inverse_square_coefficient(&OrderingParam::new(qi(a)), source)?)
            };
            let (f0, f1, fm) = (f(0)?, f(1)?, f(-1)?);
            let c2 = (&f1 + &fm - qi(2) * &f0) / qi(2);
            let c1 = (&f1 - &fm) / qi(2);
            [c2, c1, f0 + qi(100) * c_target]
        }
    };
    let discriminant = &quadratic[1] * &quadratic[1] - qi(4) * &quadratic[0] * &quadratic[2];
    let roots = solve_quadratic(&quadratic)
        .into_iter()
        .map(|a| {
            let satisfies_quadratic = match &a {
                RootValue::Rational(r) => eval_quadratic(&quadratic, r).is_zero(),
                RootValue::Surd { .. } => {
                    let v = a.to_f64();
                    let q = |i: usize| q_to_f64(&quadratic[i]);
                    (q(0) * v * v + q(1) * v + q(2)).abs() < 1e-12 * (q(0).abs() + q(1).abs() + q(2).abs())
                }
            };
            let (verified, residual) = verify(&mass, &norm, &inv_scale, &a);
            RootReport { a, verified, satisfies_quadratic, residual }
        })
        .collect();
    Ok(OrderingSolution { source, n: n.clone(), quadratic, discriminant, roots })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedOrdering {
    pub label: &'static str,
    pub op: DiffOp,
    /// op − Weyl(x⁻³p²), ħ = 1.
    pub residual_vs_weyl: DiffOp,
}

/// The simplest hand-written orderings of x⁻³p², composed with P = −iD.
pub fn named_orderings(n: &Q) -> Result<Vec<NamedOrdering>, OrderingError> {
    if *n != qi(3) {
        return Err(OrderingError::NamedNeedsCubic(fmt_q(n)));
    }
    let p = DiffOp::d().scale(&-Coeff::i());
    let inv = |k: i64| DiffOp::multiply(PolyX::power(qi(-k)));
    let p2 = p.compose(&p);
    let candidates = [
        ("(1/x)p(1/x)p(1/x)", inv(1).compose(&p).compose(&inv(1)).compose(&p).compose(&inv(1))),
        ("p(1/x^3)p", p.compose(&inv(3)).compose(&p)),
        (
            "(p^2(1/x^3) + (1/x^3)p^2)/2",
            (&p2.compose(&inv(3)) + &inv(3).compose(&p2)).scale(&Coeff::ratio(1, 2)),
        ),
    ];
    let weyl = weyl_order(&ClassicalSymbol::term(PolyX::power(qi(-3)), 2));
    Ok(candidates
        .into_iter()
        .map(|(label, op)| {
            let residual_vs_weyl = &op - &weyl;
            NamedOrdering { label, op, residual_vs_weyl }
        })
        .collect())
}
