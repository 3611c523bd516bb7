//! Matrix and state core: validated types plus the survival-probability
//! readout every other module builds on.

mod eig;
mod matrix;
mod state;

pub use eig::{evolve, herm_eig, spectral_norm, EigenDecomposition};
pub(crate) use eig::normal_eigenstate_candidates;
pub use matrix::{max_abs_diff, trace_of_product, C64, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
pub(crate) use matrix::{CONE, CZERO};
pub use state::PureState;

use crate::error::{Error, Result};
use crate::tol;

/// |<psi| U |psi>|^2 for an arbitrary square matrix, no clamping.
///
/// `scratch` must have length d; it receives U|psi>.
#[inline]
pub(crate) fn survival_raw(m: &ComplexMatrix, amp: &[C64], scratch: &mut [C64]) -> f64 {
    m.matvec_into(amp, scratch);
    let mut z = CZERO;
    for (a, b) in amp.iter().zip(scratch.iter()) {
        z += a.conj() * *b;
    }
    z.norm_sqr()
}

/// Clamp a survival probability into [0, 1], but only when the overshoot is
/// within CLAMP_TOL; larger overshoots are returned raw so bugs stay visible.
#[inline]
pub(crate) fn clamp_survival(x: f64) -> f64 {
    if x > 1.0 && x - 1.0 <= tol::CLAMP_TOL {
        1.0
    } else {
        x
    }
}

/// Survival probability X_U(psi) = |<psi| U |psi>|^2.
///
/// O(d^2): one matrix-vector product plus one inner product.
pub fn self_fidelity(u: &UnitaryMatrix, psi: &PureState) -> Result<f64> {
    if u.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: psi.dim() });
    }
    let mut scratch = vec![CZERO; psi.dim()];
    Ok(clamp_survival(survival_raw(u.matrix(), psi.amplitudes(), &mut scratch)))
}
