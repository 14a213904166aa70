//! Exact and certified arithmetic shared by every other module.

pub mod ball;
pub mod numtheory;
pub mod recognize;

pub use ball::{CertifiedComplex, Precision};
pub use numtheory::{is_fundamental_discriminant, kronecker, sqrt_classes_mod};
pub use recognize::recognize_rational;
