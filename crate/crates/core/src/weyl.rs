//! Weyl ordering of symbols at most quadratic in p, an independent
//! symmetrization oracle, and Hermiticity checks for second-order operators.
//!
//! ħ = 1 throughout; physical ħ enters only in the helium numerics.

use serde::Serialize;

use crate::parser::ClassicalSymbol;
use crate::pointmass::Measure;
use crate::symbolic::{poly_json, Coeff, DiffOp, MonomialJson, PolyX};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeylError {
    #[error("Weyl ordering is implemented for p powers up to 2, got {0}")]
    UnsupportedDegree(u32),
}

/// Closed-form rules:
/// h → h, g·p → −i[gD + ½g′], f·p² → −[fD² + f′D + ¼f″].
pub fn weyl_order(sym: &ClassicalSymbol) -> DiffOp {
    let mut out = DiffOp::zero();
    for (k, f) in sym.terms() {
        let piece = match k {
            0 => DiffOp::multiply(f.clone()),
            1 => {
                let inner = DiffOp::from_terms([(f.clone(), 1), (f.derivative().scale(&Coeff::ratio(1, 2)), 0)]);
                inner.scale(&-Coeff::i())
            }
            _ => {
                let inner = DiffOp::from_terms([
                    (f.clone(), 2),
                    (f.derivative(), 1),
                    (f.nth_derivative(2).scale(&Coeff::ratio(1, 4)), 0),
                ]);
                -inner
            }
        };
        out = &out + &piece;
    }
    out
}

/// Brute-force symmetrization with P = −iD:
/// k = 2 → (P²f + 2PfP + fP²)/4, k = 1 → (Pf + fP)/2, k = 0 → f.
pub fn symmetrization_oracle(f: &PolyX, k: u32) -> Result<DiffOp, WeylError> {
    let p = DiffOp::d().scale(&-Coeff::i());
    let fm = DiffOp::multiply(f.clone());
    Ok(match k {
        0 => fm,
        1 => (&p.compose(&fm) + &fm.compose(&p)).scale(&Coeff::ratio(1, 2)),
        2 => {
            let p2 = p.compose(&p);
            let mid = p.compose(&fm).compose(&p).scale(&Coeff::int(2));
            (&(&p2.compose(&fm) + &mid) + &fm.compose(&p2)).scale(&Coeff::ratio(1, 4))
        }
        other => return Err(WeylError::UnsupportedDegree(other)),
    })
}

/// Inner-product weight for [`hermiticity_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    Unit,
    Measure(Measure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub residual: PolyX,
}

impl Condition {
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Conditions for A∂² + B∂ + C to be symmetric under weight μ:
/// (i) A real, (ii) Re B = A′ + (μ′/μ)A, (iii) Im C = ½(Im B′ + (μ′/μ)Im B).
/// With unit weight μ′/μ = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiticityReport {
    pub condition_i: Condition,
    pub condition_ii: Condition,
    pub condition_iii: Condition,
    pub measure_corrected: bool,
    /// Set when the operator has order above 2 and the check does not apply.
    pub order_exceeded: bool,
}

impl HermiticityReport {
    pub fn passed(&self) -> bool {
        !self.order_exceeded && self.condition_i.passed() && self.condition_ii.passed() && self.condition_iii.passed()
    }

    pub fn to_json(&self) -> HermiticityJson {
        let c = |x: &Condition| ConditionJson { passed: x.passed(), residual: poly_json(&x.residual) };
        HermiticityJson {
            passed: self.passed(),
            measure_corrected: self.measure_corrected,
            condition_i: c(&self.condition_i),
            condition_ii: c(&self.condition_ii),
            condition_iii: c(&self.condition_iii),
        }
    }
}

#[derive(Serialize)]
pub struct ConditionJson {
    pub passed: bool,
    pub residual: Vec<MonomialJson>,
}

#[derive(Serialize)]
pub struct HermiticityJson {
    pub passed: bool,
    pub measure_corrected: bool,
    pub condition_i: ConditionJson,
    pub condition_ii: ConditionJson,
    pub condition_iii: ConditionJson,
}

pub fn hermiticity_check(op: &DiffOp, weight: &Weight) -> HermiticityReport {
    let a = op.coeff(2);
    let b = op.coeff(1);
    let c = op.coeff(0);
    let r = match weight {
        Weight::Unit => PolyX::zero(),
        Weight::Measure(mu) => mu.log_derivative(),
    };
    let im_b = b.imag_part();
    let ii = &(&b.real_part() - &a.derivative()) - &(&r * &a);
    let iii = &c.imag_part() - &(&im_b.derivative() + &(&r * &im_b)).scale(&Coeff::ratio(1, 2));
    HermiticityReport {
        condition_i: Condition { residual: a.imag_part() },
        condition_ii: Condition { residual: ii },
        condition_iii: Condition { residual: iii },
        measure_corrected: matches!(weight, Weight::Measure(_)),
        order_exceeded: op.order() > 2,
    }
}
