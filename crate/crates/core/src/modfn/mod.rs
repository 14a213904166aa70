//! Weakly holomorphic modular functions as expression trees in `eta(dz)` and `j(dz)`.

pub mod eval;
pub mod expand;
pub mod expr;

pub use eval::{eval, eval_cm, eval_eta, eval_j};
pub use expand::{constant_terms, principal_part_at, principal_parts, q_expansion, CuspExpansion};
pub use expr::{ModFuncExpr, Node};
