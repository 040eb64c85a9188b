//! Text inputs: the Hamiltonian DSL and `key=value` parameter files.

pub mod hamiltonian;
pub mod params;
pub mod symbol;

pub use hamiltonian::{parse_hamiltonian, unit_bindings, ParseError, ParseErrorKind};
pub use params::{parse_params, ParamsError};
pub use symbol::{ClassicalSymbol, MAX_P_POWER};
