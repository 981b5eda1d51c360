//! Numerical checks of the quantitative statements about Gauss sums,
//! quadratic factors, projections and uniformity norms.

mod factor;
mod gauss;
mod projection;
mod report;

pub use factor::{
    atom_distribution, factor_rank, in_relation_image, verify_completefactor, verify_quadfactor,
    AtomHistogram, QuadraticFactor, QuadraticMap,
};
pub use gauss::{gauss_sum, quadratic_zero_set, verify_badex, verify_gauss};
pub use projection::{
    linear_projection, quadratic_projection, verify_bound1, verify_gvn, verify_projection_lemmas,
    verify_pythagoras,
};
pub use report::{exact_power_bound_holds, Check, Evidence, ExperimentReport, Relation, FLOAT_TOLERANCE};
