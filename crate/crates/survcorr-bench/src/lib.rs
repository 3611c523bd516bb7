//! Deterministic fixture builders shared by the criterion benches.
//!
//! Benches must not pay RNG or validation cost inside the measured loop,
//! so everything here is built once per benchmark from a fixed seed.

use survcorr_core::sample::{self};
use survcorr_core::{HermitianMatrix, RngStream, UnitaryMatrix};

pub const BENCH_SEED: u64 = 0xBE7C_4A11;

/// A Haar pair of the given dimension, reproducible across runs.
pub fn unitary_pair(dim: usize) -> (UnitaryMatrix, UnitaryMatrix) {
    let mut rng = RngStream::with_stream(BENCH_SEED, dim as u64).rng();
    let u1 = sample::haar_unitary(dim, &mut rng).expect("fixture dimension is valid");
    let u2 = sample::haar_unitary(dim, &mut rng).expect("fixture dimension is valid");
    (u1, u2)
}

/// A GUE pair of the given dimension, reproducible across runs.
pub fn hermitian_pair(dim: usize) -> (HermitianMatrix, HermitianMatrix) {
    let mut rng = RngStream::with_stream(BENCH_SEED, 1000 + dim as u64).rng();
    let h1 = sample::gue_hermitian(dim, &mut rng).expect("fixture dimension is valid");
    let h2 = sample::gue_hermitian(dim, &mut rng).expect("fixture dimension is valid");
    (h1, h2)
}
