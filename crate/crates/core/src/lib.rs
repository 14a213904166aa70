//! Twisted traces of singular moduli of weakly holomorphic modular functions
//! on `Gamma_0(N)`, their weight 3/2 generating series, and the q-series
//! machinery used to test congruences among their coefficients.

pub mod arith;
pub mod cusps;
pub mod congruences;
pub mod cyclo;
pub mod error;
pub mod forms;
pub mod genus;
pub mod lattice;
pub mod modfn;
pub mod qseries;
pub mod serde_rational;
pub mod traces;

pub use error::{Error, Result};
