//! JSON encodings of matrices, states, and ensembles.
//!
//! A matrix is {"dim": d, "data": [[re, im], ...]} with d*d row-major
//! entries; a state uses the same shape with d entries. Dimensions outside
//! [2, 512] are rejected at this boundary regardless of payload.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, PureState, UnitaryMatrix, C64};
use crate::sample::EnsembleSpec;
use crate::tol::MAX_DIM;

#[derive(Debug, Serialize, Deserialize)]
struct RawArray {
    dim: usize,
    data: Vec<[f64; 2]>,
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::OutOfRange(format!(
            "dimension must lie in [2, {MAX_DIM}], got {dim}"
        )));
    }
    Ok(())
}

fn to_complex(data: Vec<[f64; 2]>) -> Vec<C64> {
    data.into_iter().map(|[re, im]| C64::new(re, im)).collect()
}

fn raw_matrix(text: &str) -> Result<ComplexMatrix> {
    let raw: RawArray = serde_json::from_str(text)?;
    check_dim(raw.dim)?;
    if raw.data.len() != raw.dim * raw.dim {
        return Err(Error::WrongLength {
            expected: raw.dim * raw.dim,
            got: raw.data.len(),
        });
    }
    ComplexMatrix::from_data(raw.dim, to_complex(raw.data))
}

/// Parse a general complex matrix.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    raw_matrix(text)
}

/// Parse a matrix and require it to be unitary.
pub fn parse_unitary(text: &str) -> Result<UnitaryMatrix> {
    UnitaryMatrix::new(raw_matrix(text)?)
}

/// Parse a matrix and require it to be Hermitian.
pub fn parse_hermitian(text: &str) -> Result<HermitianMatrix> {
    HermitianMatrix::new(raw_matrix(text)?)
}

fn state_from_raw(raw: RawArray) -> Result<PureState> {
    check_dim(raw.dim)?;
    if raw.data.len() != raw.dim {
        return Err(Error::WrongLength {
            expected: raw.dim,
            got: raw.data.len(),
        });
    }
    PureState::new(to_complex(raw.data))
}

/// Parse a normalized pure state.
pub fn parse_state(text: &str) -> Result<PureState> {
    state_from_raw(serde_json::from_str(text)?)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawEnsemble {
    Haar { n: usize },
    User { states: Vec<RawArray> },
}

/// Parse an ensemble description:
/// {"kind": "haar", "n": 100000} or {"kind": "user", "states": [...]}.
pub fn parse_ensemble(text: &str) -> Result<EnsembleSpec> {
    match serde_json::from_str::<RawEnsemble>(text)? {
        RawEnsemble::Haar { n } => Ok(EnsembleSpec::haar(n)),
        RawEnsemble::User { states } => {
            let parsed: Result<Vec<PureState>> =
                states.into_iter().map(state_from_raw).collect();
            EnsembleSpec::user(parsed?)
        }
    }
}

/// Serialize a matrix in the same shape `parse_matrix` accepts.
pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let raw = RawArray {
        dim: m.dim(),
        data: m.data().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&raw).expect("plain arrays of finite floats serialize")
}

/// Serialize a state in the same shape `parse_state` accepts.
pub fn state_to_json(s: &PureState) -> String {
    let raw = RawArray {
        dim: s.dim(),
        data: s.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&raw).expect("plain arrays of finite floats serialize")
}
