//! Exact arithmetic and linear algebra over F_p.

pub mod field;
pub mod linalg;
pub mod quadratic;

pub use field::{FpScalar, FpVector, Modulus};
pub use linalg::{in_span, rank, solve_affine, FpMatrix, Subspace};
pub use quadratic::{bilinear_of, restrict, QuadraticForm, SymmetricBilinearForm};
