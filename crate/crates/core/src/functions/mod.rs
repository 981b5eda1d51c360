//! Functions on F_p^n, their Fourier transforms and uniformity norms.

mod domain;
mod fourier;
mod function;
mod norms;

pub use domain::{GroupArith, GroupDomain};
pub use fourier::{convolve, convolve_direct, fourier, inverse_fourier};
pub use function::{
    balanced, balanced_exact, random_bounded_complex, random_bounded_real, random_signs,
    roots_of_unity, ExactFunction, FunctionFile, GroupFunction, IndicatorSet, LoadedFunction,
    BOUNDED_SLACK, EXACT_DOMAIN_LIMIT,
};
pub(crate) use function::same_domain;
pub use norms::{
    derivative_op_count, direct_op_count, norm_report, norm_report_exact, u2_norm_fast, u2_power_convolution,
    u2_power_fast, uk_norm, uk_power_derivative, uk_power_direct, uk_power_exact, NormMethod,
    NormReport,
};
