//! Default numerical tolerances.

/// Hermiticity check, relative to the spectral norm.
pub const TOL_HERM: f64 = 1e-10;
/// PSD verdict tolerance, relative to `max(1, spectral radius)`.
pub const TOL_PSD: f64 = 1e-8;
/// Invertibility threshold on `σ_min / σ_max`.
pub const TOL_INV: f64 = 1e-10;
/// Affine residual accepted by PSD completion.
pub const TOL_AFF: f64 = 1e-9;
/// Square-root reconstruction tolerance, relative to `‖M‖`.
pub const TOL_SQRT: f64 = 1e-9;
/// Coefficients below this modulus are dropped after arithmetic.
pub const COEFF_DROP: f64 = 1e-14;
/// Relative rank cutoff used by minimization.
pub const RANK_RTOL: f64 = 1e-10;
/// Eigenvalue cutoff (relative to `λ_max`) in Gram factorizations.
pub const GRAM_CUTOFF: f64 = 1e-10;
/// Iteration cap for alternating projections.
pub const MAX_ITER: usize = 20_000;
