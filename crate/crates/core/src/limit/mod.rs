//! Limit problem on the base interval: coefficients, reduced operator and
//! correctors.

pub mod coeffs;
pub mod corrector;
pub mod reduce;

pub use coeffs::{assemble_abc, build_b_c, extract_slope, CoeffsAt, LimitCoefficients};
pub use corrector::{boundary_residual, corrector_expand, corrector_from_grid, BoundaryResidual, Corrector};
pub use reduce::{
    check_degenerate_ellipticity, check_dual_path, check_limit_continuity, reduce_bi, LimitOperator, ReducedFamily,
};
