//! Normalized pure states.

use super::matrix::{C64, CZERO};
use crate::error::{Error, Result};
use crate::tol;

/// Unit-norm complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amp: Vec<C64>,
}

impl PureState {
    /// Validates finiteness and | ||psi|| - 1 | <= STATE_NORM_TOL.
    pub fn new(amp: Vec<C64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::WrongLength { expected: 1, got: 0 });
        }
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let deviation = (norm - 1.0).abs();
        if deviation > tol::STATE_NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amp })
    }

    /// Computational basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::OutOfRange(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amp = vec![CZERO; dim];
        amp[k] = C64::new(1.0, 0.0);
        Ok(Self { amp })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let mut acc = CZERO;
        for (a, b) in self.amp.iter().zip(&other.amp) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }
}
