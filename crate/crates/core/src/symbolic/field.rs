//! Exact scalars: the real quadratic field Q(√2) and its complexification.
//!
//! Every coefficient produced by the quantization pipeline (ladder operators,
//! partner potentials, Weyl-ordered kinetic terms) lives in Q(√2) once the
//! symbolic units M₀ = ħ = 1 are fixed. Degree-one momentum terms pick up a
//! factor of −i, so operator coefficients are carried in Q(√2)(i).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for coefficients and exponents alike.
pub type Q = BigRational;

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(v: &Q) -> f64 {
    // BigRational::to_f64 is exact-rounded for reasonable sizes
    v.to_f64().unwrap_or_else(|| {
        let n = v.numer().to_f64().unwrap_or(f64::NAN);
        let d = v.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `n` or `n/d` (as emitted by [`fmt_q`]).
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// A real number `p + q·√2` with rational `p`, `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub p: Q,
    pub q: Q,
}

impl QSqrt2 {
    pub fn new(p: Q, q: Q) -> Self {
        Self { p, q }
    }

    pub fn rational(p: Q) -> Self {
        Self { p, q: Q::zero() }
    }

    pub fn sqrt2() -> Self {
        Self { p: Q::zero(), q: Q::one() }
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { p: self.p.clone(), q: -&self.q }
    }

    /// Field norm `p² − 2q²`; nonzero for every nonzero element since √2 is irrational.
    pub fn norm(&self) -> Q {
        &self.p * &self.p - qi(2) * &self.q * &self.q
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Self { p: &self.p / &n, q: -&self.q / &n })
    }

    pub fn scale(&self, r: &Q) -> Self {
        Self { p: &self.p * r, q: &self.q * r }
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.p) + q_to_f64(&self.q) * std::f64::consts::SQRT_2
    }

    /// Exact square root of a rational within Q(√2): succeeds when `v` is a
    /// rational square or twice one.
    pub fn sqrt_of(v: &Q) -> Option<Self> {
        if let Some(r) = rational_sqrt(v) {
            return Some(Self::rational(r));
        }
        let half = v / qi(2);
        rational_sqrt(&half).map(|r| Self { p: Q::zero(), q: r })
    }

    /// Sign of the real value, computed exactly.
    pub fn signum(&self) -> i32 {
        // compare p against -q√2 by squaring with sign bookkeeping
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return if sp == 0 { sq } else { sp };
        }
        let lhs = &self.p * &self.p;
        let rhs = qi(2) * &self.q * &self.q;
        if lhs > rhs {
            sp
        } else {
            sq
        }
    }
}

fn sign_of(v: &Q) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        Self::rational(Q::one())
    }
}

impl From<Q> for QSqrt2 {
    fn from(p: Q) -> Self {
        Self::rational(p)
    }
}

impl From<i64> for QSqrt2 {
    fn from(v: i64) -> Self {
        Self::rational(qi(v))
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { p: &self.p + &o.p, q: &self.q + &o.q }
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { p: &self.p - &o.p, q: &self.q - &o.q }
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 {
            p: &self.p * &o.p + qi(2) * &self.q * &o.q,
            q: &self.p * &o.q + &self.q * &o.p,
        }
    }
}

impl Div for &QSqrt2 {
    type Output = QSqrt2;
    fn div(self, o: &QSqrt2) -> QSqrt2 {
        self * &o.inv().expect("division by zero in Q(sqrt2)")
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { p: -&self.p, q: -&self.q }
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.p)),
            (true, false) => write!(f, "{}√2", fmt_q(&self.q)),
            (false, false) => write!(f, "{} + {}√2", fmt_q(&self.p), fmt_q(&self.q)),
        }
    }
}

/// An element of Q(√2)(i): `re + i·im` with `re`, `im` in Q(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Coeff {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Coeff {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Self { re, im }
    }

    pub fn real(re: QSqrt2) -> Self {
        Self { re, im: QSqrt2::zero() }
    }

    pub fn rational(r: Q) -> Self {
        Self::real(QSqrt2::rational(r))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(q(n, d))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(qi(n))
    }

    pub fn i() -> Self {
        Self { re: QSqrt2::zero(), im: QSqrt2::one() }
    }

    pub fn sqrt2() -> Self {
        Self::real(QSqrt2::sqrt2())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn real_part(&self) -> Self {
        Self::real(self.re.clone())
    }

    pub fn imag_part(&self) -> Self {
        Self::real(self.im.clone())
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<&Q> {
        if self.im.is_zero() && self.re.q.is_zero() {
            Some(&self.re.p)
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Q) -> Self {
        Self { re: self.re.scale(r), im: self.im.scale(r) }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // |z|² = re² + im² is a positive element of Q(√2)
        let n = &(&self.re * &self.re) + &(&self.im * &self.im);
        let ninv = n.inv()?;
        Some(Self { re: &self.re * &ninv, im: -&(&self.im * &ninv) })
    }

    pub fn checked_div(&self, o: &Coeff) -> Option<Coeff> {
        o.inv().map(|inv| self * &inv)
    }

    pub fn pow_int(&self, k: u32) -> Coeff {
        let mut out = Coeff::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Coeff {
    fn one() -> Self {
        Self::int(1)
    }
}

impl From<QSqrt2> for Coeff {
    fn from(v: QSqrt2) -> Self {
        Self::real(v)
    }
}

impl From<Q> for Coeff {
    fn from(v: Q) -> Self {
        Self::rational(v)
    }
}

impl From<i64> for Coeff {
    fn from(v: i64) -> Self {
        Self::int(v)
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    fn div(self, o: &Coeff) -> Coeff {
        self.checked_div(o).expect("division by zero coefficient")
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -&self.re, im: -&self.im }
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { (&self).$m(&o) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t { (&self).$m(o) }
        }
    )*};
}

forward_owned!(QSqrt2, Add add, Sub sub, Mul mul, Div div);
forward_owned!(Coeff, Add add, Sub sub, Mul mul, Div div);

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -&self
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, o: &Coeff) {
        *self = &*self + o;
    }
}

impl SubAssign<&Coeff> for Coeff {
    fn sub_assign(&mut self, o: &Coeff) {
        *self = &*self - o;
    }
}

impl MulAssign<&Coeff> for Coeff {
    fn mul_assign(&mut self, o: &Coeff) {
        *self = &*self * o;
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i({})", self.im),
            (false, false) => write!(f, "({}) + i({})", self.re, self.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squared_is_two() {
        let s = QSqrt2::sqrt2();
        assert_eq!(&s * &s, QSqrt2::from(2));
    }

    #[test]
    fn inverse_of_surd() {
        // 1/(1 + √2) = √2 − 1
        let v = QSqrt2::new(qi(1), qi(1));
        assert_eq!(v.inv().unwrap(), QSqrt2::new(qi(-1), qi(1)));
        assert!(QSqrt2::zero().inv().is_none());
    }

    #[test]
    fn complex_inverse() {
        let z = Coeff::new(QSqrt2::from(1), QSqrt2::sqrt2());
        assert_eq!(&z * &z.inv().unwrap(), Coeff::one());
        assert_eq!(&Coeff::i() * &Coeff::i(), Coeff::int(-1));
    }

    #[test]
    fn exact_sqrt_in_field() {
        assert_eq!(QSqrt2::sqrt_of(&q(1, 4)), Some(QSqrt2::rational(q(1, 2))));
        assert_eq!(QSqrt2::sqrt_of(&qi(2)), Some(QSqrt2::sqrt2()));
        assert_eq!(QSqrt2::sqrt_of(&q(1, 2)), Some(QSqrt2::new(qi(0), q(1, 2))));
        assert_eq!(QSqrt2::sqrt_of(&qi(3)), None);
    }

    #[test]
    fn signum_is_exact() {
        assert_eq!(QSqrt2::new(qi(-1), qi(1)).signum(), 1); // √2 − 1 > 0
        assert_eq!(QSqrt2::new(qi(2), qi(-1)).signum(), 1); // 2 − √2 > 0
        assert_eq!(QSqrt2::new(qi(1), qi(-1)).signum(), -1);
        assert_eq!(QSqrt2::zero().signum(), 0);
    }

    #[test]
    fn rational_text_round_trip() {
        for v in [q(-3, 4), qi(7), q(0, 1)] {
            assert_eq!(parse_q(&fmt_q(&v)), Some(v));
        }
        assert_eq!(parse_q("1/0"), None);
    }
}
