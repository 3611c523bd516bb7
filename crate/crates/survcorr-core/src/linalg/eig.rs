//! Hermitian eigendecomposition and the matrix functions built on it.
//!
//! The factorization itself is delegated to nalgebra's `SymmetricEigen`;
//! this module owns the contract: ascending eigenvalues, a validated
//! unitary eigenvector matrix, and reconstruction within
//! EIG_TOL_PER_FNORM * ||H||_F.

use nalgebra::DMatrix;

use super::matrix::{C64, ComplexMatrix, HermitianMatrix, UnitaryMatrix, CZERO};
use super::state::PureState;
use crate::error::{Error, Result};

const MAX_EIG_ITERATIONS: usize = 50_000;

/// H = V diag(eigenvalues) V^H with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: UnitaryMatrix,
}

impl EigenDecomposition {
    /// Column k of V as a state.
    pub fn eigenstate(&self, k: usize) -> Result<PureState> {
        let d = self.eigenvectors.dim();
        if k >= d {
            return Err(Error::OutOfRange(format!(
                "eigenstate index {k} out of range for dimension {d}"
            )));
        }
        let amp = (0..d).map(|i| self.eigenvectors.get(i, k)).collect();
        PureState::new(amp)
    }

    /// V diag(eigenvalues) V^H.
    pub fn reconstruction(&self) -> ComplexMatrix {
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)).collect();
        self.apply_diagonal(&phases)
    }

    /// V diag(exp(-i * eigenvalue * t)) V^H. t = 0 returns the exact identity.
    pub fn propagator(&self, t: f64) -> Result<UnitaryMatrix> {
        if !t.is_finite() {
            return Err(Error::OutOfRange(format!("evolution time {t} is not finite")));
        }
        if t == 0.0 {
            return UnitaryMatrix::new(ComplexMatrix::identity(self.eigenvectors.dim()));
        }
        let phases: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| C64::new(0.0, -l * t).exp())
            .collect();
        UnitaryMatrix::new(self.apply_diagonal(&phases))
    }

    /// V diag(f) V^H.
    fn apply_diagonal(&self, f: &[C64]) -> ComplexMatrix {
        let v = self.eigenvectors.matrix();
        let d = v.dim();
        ComplexMatrix::from_fn(d, |i, j| {
            let mut acc = CZERO;
            for (k, &fk) in f.iter().enumerate() {
                acc += v.get(i, k) * fk * v.get(j, k).conj();
            }
            acc
        })
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<C64> {
    let d = m.dim();
    DMatrix::from_row_iterator(d, d, m.data().iter().copied())
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let d = h.dim();
    let eig = nalgebra::linalg::SymmetricEigen::try_new(
        to_nalgebra(h.matrix()),
        f64::EPSILON,
        MAX_EIG_ITERATIONS,
    )
    .ok_or(Error::ConvergenceFailure)?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(d, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: UnitaryMatrix::new(vectors)?,
    })
}

/// exp(-i H t), via the eigendecomposition.
pub fn evolve(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    herm_eig(h)?.propagator(t)
}

/// Largest |eigenvalue|.
pub fn spectral_norm(h: &HermitianMatrix) -> Result<f64> {
    let eig = herm_eig(h)?;
    Ok(eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l.abs())))
}

/// Eigenvector candidates of a (numerically) normal matrix M.
///
/// Eigenvectors of a * (M + M^H)/2 + b * (M - M^H)/(2i) are eigenvectors of
/// normal M whenever the combined real spectrum has no accidental collision;
/// two fixed angle combinations make collisions for both a measure-zero event.
/// Degenerate eigenspaces of M are mapped to themselves either way, so every
/// returned state is a valid candidate for witness searches.
pub(crate) fn normal_eigenstate_candidates(m: &ComplexMatrix) -> Result<Vec<PureState>> {
    let d = m.dim();
    let mut out = Vec::with_capacity(2 * d);
    for angle in [0.6154797086703873_f64, 2.2129797086703873_f64] {
        let (ca, sa) = (angle.cos(), angle.sin());
        let combo = ComplexMatrix::from_fn(d, |i, j| {
            let a = m.get(i, j);
            let b = m.get(j, i).conj();
            // ca*(M + M^H)/2 + sa*(M - M^H)/(2i)
            let herm = (a + b) * C64::new(0.5 * ca, 0.0);
            let skew = (a - b) * C64::new(0.0, -0.5 * sa);
            herm + skew
        });
        let eig = herm_eig(&HermitianMatrix::new(combo)?)?;
        for k in 0..d {
            out.push(eig.eigenstate(k)?);
        }
    }
    Ok(out)
}
