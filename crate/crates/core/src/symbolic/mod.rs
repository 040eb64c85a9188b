//! Exact algebra: scalars in Q(√2)(i), rational-exponent polynomials and
//! normal-ordered differential operators.

pub mod diffop;
pub mod field;
pub mod mass;
pub mod poly;
pub mod radical;

pub use diffop::{poly_json, CoeffJson, DiffOp, DiffOpJson, Factored, MonomialJson, TermJson};
pub use field::{fmt_q, parse_q, q, qi, Coeff, QSqrt2, Q};
pub use mass::{expand_sandwich, sandwich_gamma, MassError, OrderingParam, PowerLawMass};
pub use poly::{DomainError, PolyX};
pub use radical::{Radical, RadicalError};
