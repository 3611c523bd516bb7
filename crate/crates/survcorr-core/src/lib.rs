//! Correlation structure of state-survival probabilities under fixed
//! unitary drives.
//!
//! The central object is the survival probability X(psi) = |<psi|U|psi>|^2
//! of a pure state under a drive U. Over uniformly random states, two
//! drives induce two correlated random variables X1, X2; this crate
//! computes their joint moments three independent ways and keeps the
//! routes separate so they can check each other:
//!
//! * closed forms in the drive's trace invariants ([`stats::exact_stats`]),
//! * permutation-sum tensor contractions ([`stats::exact_stats_permsum`]),
//! * chunked, reproducible Monte Carlo ([`sample::mc_stats`]).
//!
//! On top of the moments sit closed-form qubit fringes ([`qubit`]),
//! short-time echo analysis under Hamiltonian drives ([`echo`]), contrast
//! optimization ([`stats::optimal_contrast`]), and randomized probes for
//! overlap and complement-violation witnesses ([`sample`]).
//!
//! Numerical policy: every validated wrapper records the residual it
//! accepted, Monte Carlo results are bit-reproducible for a fixed
//! (seed, stream) at any thread count, and tolerances live in [`tol`]
//! rather than inline.

pub mod echo;
pub mod error;
pub mod json;
pub mod perm;
pub mod qubit;
pub mod sample;
pub mod stats;
pub mod tol;

mod linalg;

pub use error::{Error, Result};
pub use linalg::{
    evolve, herm_eig, max_abs_diff, self_fidelity, spectral_norm, trace_of_product, C64,
    ComplexMatrix, EigenDecomposition, HermitianMatrix, PureState, UnitaryMatrix,
};
pub use sample::{EnsembleSpec, RngStream};
pub use stats::{CorrelationReport, Method};
