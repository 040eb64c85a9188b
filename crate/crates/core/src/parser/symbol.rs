use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::symbolic::{fmt_q, Coeff, PolyX, QSqrt2, Q};

/// Highest momentum power a classical symbol may carry.
pub const MAX_P_POWER: u32 = 2;

/// A phase-space function Σ cₖ(x)·pᵏ with k ≤ 2.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClassicalSymbol {
    terms: BTreeMap<u32, PolyX>,
}

impl ClassicalSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `f(x)·pᵏ`. Panics if k exceeds [`MAX_P_POWER`].
    pub fn term(f: PolyX, p_power: u32) -> Self {
        assert!(p_power <= MAX_P_POWER, "p power {p_power} exceeds {MAX_P_POWER}");
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(p_power, f);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (PolyX, u32)>>(it: I) -> Self {
        it.into_iter().fold(Self::zero(), |acc, (f, k)| acc.add(&Self::term(f, k)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, f) in &o.terms {
            let slot = terms.entry(*k).or_default();
            *slot = &*slot + f;
        }
        terms.retain(|_, f| !f.is_zero());
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p_power: u32) -> PolyX {
        self.terms.get(&p_power).cloned().unwrap_or_default()
    }

    pub fn max_p_power(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// `(p_power, coefficient)` ascending.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &PolyX)> {
        self.terms.iter().map(|(k, f)| (*k, f))
    }

    /// Renders in the input DSL so that the output reparses to an equal symbol.
    pub fn to_dsl(&self) -> String {
        let mut parts = Vec::new();
        for (k, f) in &self.terms {
            for (e, c) in f.terms() {
                let mut s = dsl_coeff(c);
                if !e.is_zero() {
                    s.push_str(&format!("*x^({})", fmt_q(e)));
                }
                match k {
                    0 => {}
                    1 => s.push_str("*p"),
                    _ => s.push_str(&format!("*p^{k}")),
                }
                parts.push(s);
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn dsl_rational(v: &Q) -> String {
    format!("({})", fmt_q(v))
}

fn dsl_coeff(c: &Coeff) -> String {
    // symbols parsed from text are real; an imaginary part cannot be expressed
    debug_assert!(c.is_real());
    let QSqrt2 { p, q } = &c.re;
    match (p.is_zero(), q.is_zero()) {
        (_, true) => dsl_rational(p),
        (true, false) if q.is_one() => "sqrt2".to_string(),
        (true, false) => format!("{}*sqrt2", dsl_rational(q)),
        (false, false) => format!("({} + {}*sqrt2)", dsl_rational(p), dsl_rational(q)),
    }
}

impl fmt::Display for ClassicalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dsl())
    }
}
