//! Numeric tolerances used across the crate, centralized so tests and
//! library code agree on one set of values.
//!
//! Wherever a tolerance scales with problem size, the constant here is the
//! per-unit factor and the call site multiplies by the dimension or norm.

/// Unitarity: ||U^H U - I||_F <= UNITARY_TOL_PER_DIM * d.
pub const UNITARY_TOL_PER_DIM: f64 = 1e-10;

/// Hermiticity: ||A - A^H||_F <= HERMITIAN_TOL_PER_DIM * d.
pub const HERMITIAN_TOL_PER_DIM: f64 = 1e-12;

/// State normalization: | ||psi|| - 1 | <= STATE_NORM_TOL.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Eigendecomposition residual: ||V L V^H - H||_F <= EIG_TOL_PER_FNORM * ||H||_F.
pub const EIG_TOL_PER_FNORM: f64 = 1e-10;

/// Survival probabilities may overshoot [0, 1] by at most this much before
/// clamping; larger overshoots are returned raw so callers can see the bug.
pub const CLAMP_TOL: f64 = 1e-12;

/// Variances below this floor mean the readout carries no signal and
/// correlation quantities are refused.
pub const VARIANCE_FLOOR: f64 = 1e-14;

/// Quartic-residual contraction window: halving t must shrink the
/// short-time expansion residual by a factor inside this window.
pub const QUARTIC_RATIO_WINDOW: (f64, f64) = (12.0, 20.0);

/// Quadratic-gap contraction window: halving t must shrink the distance
/// between the exact correlation and its variance limit by a factor inside
/// this window.
pub const QUADRATIC_GAP_WINDOW: (f64, f64) = (3.0, 5.0);

/// Small-time regime bound: the quartic/quadratic scaling claims are
/// asserted only when t * ||H||_2 <= SMALL_TIME_LIMIT.
pub const SMALL_TIME_LIMIT: f64 = 0.5;

/// Largest matrix dimension the JSON loaders accept. The engines target
/// desk-scale inputs; anything bigger is a mistake, not a workload.
pub const MAX_DIM: usize = 512;

/// Largest tensor order the permutation engine enumerates (8! = 40320).
pub const MAX_PERM_ORDER: usize = 8;
