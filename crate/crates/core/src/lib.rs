//! Exact computation of complexity invariants of linear form systems over
//! F_p^n, Gowers uniformity norms, and configuration counts.

pub mod algebra;
pub mod budget;
pub mod counting;
pub mod error;
pub mod functions;
pub mod hypergraph;
pub mod sample;
pub mod systems;
pub mod verification;

pub use budget::Budget;
pub use error::{Error, Result};
