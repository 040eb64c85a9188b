//! Normal-ordered linear differential operators Σₖ fₖ(x)·Dᵏ.
//!
//! All derivatives stand to the right of their coefficient. Products are
//! brought back to normal form with the Leibniz rule, exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::field::{fmt_q, parse_q, Coeff, QSqrt2, Q};
use super::poly::{DomainError, PolyX};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffOp {
    terms: BTreeMap<u32, PolyX>,
}

fn binomial(m: u32, j: u32) -> i64 {
    (0..j).fold(1i64, |acc, i| acc * (m - i) as i64 / (i + 1) as i64)
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::multiply(PolyX::one())
    }

    /// The derivative operator D.
    pub fn d() -> Self {
        Self::term(PolyX::one(), 1)
    }

    /// Multiplication by `f`.
    pub fn multiply(f: PolyX) -> Self {
        Self::term(f, 0)
    }

    /// `f·Dᵏ`.
    pub fn term(f: PolyX, order: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(order, f);
        }
        Self { terms }
    }

    /// Builds from `(coefficient, order)` pairs; repeated orders are summed.
    pub fn from_terms<I: IntoIterator<Item = (PolyX, u32)>>(it: I) -> Self {
        it.into_iter().fold(Self::zero(), |acc, (f, k)| &acc + &Self::term(f, k))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order present; 0 for multiplication operators and the zero operator.
    pub fn order(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn coeff(&self, order: u32) -> PolyX {
        self.terms.get(&order).cloned().unwrap_or_default()
    }

    /// `(order, coefficient)` in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &PolyX)> {
        self.terms.iter().map(|(k, f)| (*k, f))
    }

    pub fn scale(&self, k: &Coeff) -> Self {
        Self::from_terms(self.terms.iter().map(|(o, f)| (f.scale(k), *o)))
    }

    /// Normal-ordered product `self ∘ other`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = BTreeMap::<u32, PolyX>::new();
        for (&m, f) in &self.terms {
            for (&n, g) in &other.terms {
                let mut gj = g.clone();
                for j in 0..=m {
                    if gj.is_zero() {
                        break;
                    }
                    let c = Coeff::int(binomial(m, j));
                    let piece = &(f * &gj).scale(&c);
                    let slot = out.entry(m + n - j).or_default();
                    *slot = &*slot + piece;
                    gj = gj.derivative();
                }
            }
        }
        out.retain(|_, f| !f.is_zero());
        DiffOp { terms: out }
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        &self.compose(other) - &other.compose(self)
    }

    /// Σₖ fₖ(x)·φ⁽ᵏ⁾(x) at one point, given the derivative values `derivs[k] = φ⁽ᵏ⁾(x)`.
    pub fn apply_at(&self, x: f64, derivs: &[f64]) -> Result<Complex64, DomainError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, f) in &self.terms {
            let dv = derivs.get(k as usize).copied().unwrap_or(0.0);
            acc += f.eval(x)? * dv;
        }
        Ok(acc)
    }

    /// Applies the operator numerically at each point; `phi(x, k)` returns φ⁽ᵏ⁾(x).
    pub fn apply_numeric<F>(&self, xs: &[f64], phi: F) -> Result<Vec<Complex64>, DomainError>
    where
        F: Fn(f64, u32) -> f64,
    {
        xs.iter()
            .map(|&x| {
                let derivs: Vec<f64> = (0..=self.order()).map(|k| phi(x, k)).collect();
                self.apply_at(x, &derivs)
            })
            .collect()
    }

    /// Splits off the leading coefficient (lowest-exponent term of the highest
    /// order) as a scalar prefactor, e.g. `−½x⁻³D² + …` → `(−½, x⁻³D² + …)`.
    pub fn factored(&self) -> Factored {
        let prefactor = self
            .terms
            .values()
            .next_back()
            .and_then(|f| f.terms().next().map(|(_, c)| c.clone()))
            .unwrap_or_else(Coeff::one);
        let inv = prefactor.inv().unwrap_or_else(Coeff::one);
        Factored { prefactor, bracket: self.scale(&inv) }
    }

    pub fn to_json(&self) -> DiffOpJson {
        self.factored().to_json()
    }
}

/// A scalar prefactor times a bracketed operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factored {
    pub prefactor: Coeff,
    pub bracket: DiffOp,
}

impl Factored {
    pub fn expand(&self) -> DiffOp {
        self.bracket.scale(&self.prefactor)
    }

    pub fn to_json(&self) -> DiffOpJson {
        DiffOpJson {
            prefactor: CoeffJson::from(&self.prefactor),
            terms: self
                .bracket
                .terms()
                .map(|(order, f)| TermJson {
                    order,
                    poly: poly_json(f),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·[{}]", self.prefactor, self.bracket)
    }
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, o: &DiffOp) -> DiffOp {
        let mut terms = self.terms.clone();
        for (k, f) in &o.terms {
            let slot = terms.entry(*k).or_default();
            *slot = &*slot + f;
        }
        terms.retain(|_, f| !f.is_zero());
        DiffOp { terms }
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, o: &DiffOp) -> DiffOp {
        self + &(-o)
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        DiffOp { terms: self.terms.iter().map(|(k, f)| (*k, -f)).collect() }
    }
}

/// Operator product, same as [`DiffOp::compose`].
impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, o: &DiffOp) -> DiffOp {
        self.compose(o)
    }
}

impl Add for DiffOp {
    type Output = DiffOp;
    fn add(self, o: DiffOp) -> DiffOp {
        &self + &o
    }
}

impl Sub for DiffOp {
    type Output = DiffOp;
    fn sub(self, o: DiffOp) -> DiffOp {
        &self - &o
    }
}

impl Mul for DiffOp {
    type Output = DiffOp;
    fn mul(self, o: DiffOp) -> DiffOp {
        self.compose(&o)
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        -&self
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, p)| match k {
                0 => format!("[{p}]"),
                1 => format!("[{p}]·D"),
                _ => format!("[{p}]·D^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub p: String,
    pub q: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ip: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iq: Option<String>,
}

impl From<&Coeff> for CoeffJson {
    fn from(c: &Coeff) -> Self {
        let (ip, iq) = if c.im.is_zero() {
            (None, None)
        } else {
            (Some(fmt_q(&c.im.p)), Some(fmt_q(&c.im.q)))
        };
        Self { p: fmt_q(&c.re.p), q: fmt_q(&c.re.q), ip, iq }
    }
}

impl CoeffJson {
    pub fn to_coeff(&self) -> Option<Coeff> {
        let opt = |s: &Option<String>| match s {
            Some(s) => parse_q(s),
            None => Some(Q::zero()),
        };
        Some(Coeff::new(
            QSqrt2::new(parse_q(&self.p)?, parse_q(&self.q)?),
            QSqrt2::new(opt(&self.ip)?, opt(&self.iq)?),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub p: String,
    pub q: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ip: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iq: Option<String>,
    pub exponent_num: i64,
    pub exponent_den: i64,
}

impl MonomialJson {
    pub fn new(c: &Coeff, e: &Q) -> Self {
        let cj = CoeffJson::from(c);
        use num_traits::ToPrimitive;
        Self {
            p: cj.p,
            q: cj.q,
            ip: cj.ip,
            iq: cj.iq,
            exponent_num: e.numer().to_i64().expect("exponent numerator fits i64"),
            exponent_den: e.denom().to_i64().expect("exponent denominator fits i64"),
        }
    }
}

/// Wire form of a polynomial, ascending exponent.
pub fn poly_json(f: &PolyX) -> Vec<MonomialJson> {
    f.terms().map(|(e, c)| MonomialJson::new(c, e)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub order: u32,
    pub poly: Vec<MonomialJson>,
}

/// Wire form `{prefactor, terms: [{order, poly: [{p, q, exponent_num, exponent_den}]}]}`.
/// Imaginary parts appear as optional `ip`/`iq` fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffOpJson {
    pub prefactor: CoeffJson,
    pub terms: Vec<TermJson>,
}

impl DiffOpJson {
    pub fn to_diffop(&self) -> Option<DiffOp> {
        let pre = self.prefactor.to_coeff()?;
        let mut out = DiffOp::zero();
        for t in &self.terms {
            let mut poly = PolyX::zero();
            for m in &t.poly {
                if m.exponent_den == 0 {
                    return None;
                }
                let c = CoeffJson { p: m.p.clone(), q: m.q.clone(), ip: m.ip.clone(), iq: m.iq.clone() }.to_coeff()?;
                let e = Q::new(m.exponent_num.into(), m.exponent_den.into());
                poly = &poly + &PolyX::monomial(c, e);
            }
            out = &out + &DiffOp::term(poly, t.order);
        }
        Some(out.scale(&pre))
    }
}
