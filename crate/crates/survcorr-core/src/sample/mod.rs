//! Monte Carlo estimation over random pure states.
//!
//! Sampling is organized in fixed-size chunks of 65536 draws. Each chunk
//! owns a counter-derived RNG, so chunk c always produces the same draws no
//! matter which thread runs it, and estimates are reproducible bit for bit
//! across thread counts.

mod streaming;

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

// Part of the public sampling API: the generator type callers hand to
// haar_state and friends.
pub use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_survival, normal_eigenstate_candidates, survival_raw, ComplexMatrix, HermitianMatrix,
    PureState, UnitaryMatrix, C64, CZERO,
};
use crate::stats::{clamp_variance, CorrelationReport, Method};
use crate::tol::VARIANCE_FLOOR;

pub(crate) use streaming::{pcc_stderr, BivariateAccumulator, BivariateMoments};

/// Samples per RNG chunk. A chunk is the atomic replay unit: Gaussian
/// rejection sampling consumes a variable number of raw draws per sample,
/// so per-sample counters would not be stable, but per-chunk ones are.
pub const CHUNK_SIZE: usize = 65_536;

/// Minimum Haar sample count accepted by the estimators.
pub const MIN_HAAR_SAMPLES: usize = 100;

/// A named position in the deterministic random sequence.
///
/// Equal (seed, stream_id) pairs always reproduce the same draws. Distinct
/// stream ids give statistically independent streams under one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A generator positioned at chunk 0 of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        chunk_rng(self.seed, self.stream_id, 0)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key a ChaCha8 generator from (seed, stream, chunk) via a SplitMix64
/// chain. Every coordinate feeds the chain before any key word is taken.
pub(crate) fn chunk_rng(seed: u64, stream: u64, chunk: u64) -> ChaCha8Rng {
    let mut state = seed;
    let _ = splitmix64(&mut state);
    state ^= stream.wrapping_mul(0xA24B_AED4_963E_E407);
    let _ = splitmix64(&mut state);
    state ^= chunk.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let mut key = [0u8; 32];
    for word in key.chunks_exact_mut(8) {
        word.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Fill `amp` with a Haar-random pure state: i.i.d. complex Gaussians,
/// normalized. Draw order is fixed (re then im, ascending index).
fn fill_haar_state(amp: &mut [C64], rng: &mut ChaCha8Rng) {
    loop {
        let mut norm_sq = 0.0f64;
        for a in amp.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *a = C64::new(re, im);
            norm_sq += re * re + im * im;
        }
        if norm_sq > 0.0 {
            let inv = norm_sq.sqrt().recip();
            for a in amp.iter_mut() {
                *a *= inv;
            }
            return;
        }
        // all-zero draw has probability zero; resample if it ever happens
    }
}

/// Draw one Haar-random pure state of dimension `dim`.
pub fn haar_state(dim: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::OutOfRange("state dimension must be positive".into()));
    }
    let mut amp = vec![CZERO; dim];
    fill_haar_state(&mut amp, rng);
    PureState::new(amp)
}

/// Draw a Haar-random unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phases pushed into Q so the distribution is exactly invariant.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(Error::OutOfRange("unitary dimension must be positive".into()));
    }
    // Draw in our own row-major order so the stream layout does not depend
    // on how the linear algebra backend iterates.
    let mut ginibre = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            ginibre.set(i, j, C64::new(re, im));
        }
    }
    let na = nalgebra::DMatrix::from_fn(dim, dim, |i, j| ginibre.get(i, j));
    let qr = na.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = ComplexMatrix::zeros(dim);
    for k in 0..dim {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            rkk / rkk.norm()
        };
        for i in 0..dim {
            u.set(i, k, q[(i, k)] * phase);
        }
    }
    UnitaryMatrix::new(u)
}

/// Draw a Gaussian-ensemble Hermitian matrix: N(0,1) on the diagonal,
/// complex N(0,1)/sqrt(2) entries above it, mirrored by conjugation.
pub fn gue_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> Result<HermitianMatrix> {
    if dim == 0 {
        return Err(Error::OutOfRange("matrix dimension must be positive".into()));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        let d: f64 = rng.sample(StandardNormal);
        h.set(i, i, C64::new(d, 0.0));
        for j in (i + 1)..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C64::new(re * inv_sqrt2, im * inv_sqrt2);
            h.set(i, j, z);
            h.set(j, i, z.conj());
        }
    }
    HermitianMatrix::new(h)
}

/// Which states the estimators average over.
#[derive(Clone, Debug)]
pub enum EnsembleSpec {
    /// `n_samples` Haar-random pure states.
    Haar { n_samples: usize },
    /// A caller-supplied list of states, used exactly once each.
    User { states: Vec<PureState> },
}

impl EnsembleSpec {
    pub fn haar(n_samples: usize) -> Self {
        EnsembleSpec::Haar { n_samples }
    }

    /// Wrap explicit states; they must be nonempty and share one dimension.
    pub fn user(states: Vec<PureState>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::OutOfRange("user ensemble must contain at least one state".into()))?
            .dim();
        for s in &states {
            if s.dim() != first {
                return Err(Error::DimensionMismatch {
                    left: first,
                    right: s.dim(),
                });
            }
        }
        Ok(EnsembleSpec::User { states })
    }

    pub fn len(&self) -> usize {
        match self {
            EnsembleSpec::Haar { n_samples } => *n_samples,
            EnsembleSpec::User { states } => states.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension pinned by the ensemble itself, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            EnsembleSpec::Haar { .. } => None,
            EnsembleSpec::User { states } => states.first().map(|s| s.dim()),
        }
    }
}

/// Visit every ensemble state in deterministic order, sequentially. Haar
/// draws follow the same per-chunk keying as the parallel estimators, so
/// for a given stream the visited states match what `mc_stats` consumes.
pub(crate) fn for_each_ensemble_state<F>(
    dim: usize,
    ensemble: &EnsembleSpec,
    stream: &RngStream,
    mut visit: F,
) where
    F: FnMut(&[C64]),
{
    match ensemble {
        EnsembleSpec::Haar { n_samples } => {
            let mut amp = vec![CZERO; dim];
            let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
            for c in 0..n_chunks {
                let lo = c * CHUNK_SIZE;
                let hi = (lo + CHUNK_SIZE).min(*n_samples);
                let mut rng = chunk_rng(stream.seed, stream.stream_id, c as u64);
                for _ in lo..hi {
                    fill_haar_state(&mut amp, &mut rng);
                    visit(&amp);
                }
            }
        }
        EnsembleSpec::User { states } => {
            for s in states {
                visit(s.amplitudes());
            }
        }
    }
}

/// Accumulate survival pairs for one chunk of the ensemble.
fn chunk_accumulate(
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    ensemble: &EnsembleSpec,
    stream: &RngStream,
    chunk_index: usize,
) -> BivariateAccumulator {
    let dim = u1.dim();
    let lo = chunk_index * CHUNK_SIZE;
    let hi = (lo + CHUNK_SIZE).min(ensemble.len());
    let mut acc = BivariateAccumulator::new();
    let mut scratch = vec![CZERO; dim];
    match ensemble {
        EnsembleSpec::Haar { .. } => {
            let mut rng = chunk_rng(stream.seed, stream.stream_id, chunk_index as u64);
            let mut amp = vec![CZERO; dim];
            for _ in lo..hi {
                fill_haar_state(&mut amp, &mut rng);
                let x1 = clamp_survival(survival_raw(u1, &amp, &mut scratch));
                let x2 = clamp_survival(survival_raw(u2, &amp, &mut scratch));
                acc.push(x1, x2);
            }
        }
        EnsembleSpec::User { states } => {
            for s in &states[lo..hi] {
                let amp = s.amplitudes();
                let x1 = clamp_survival(survival_raw(u1, amp, &mut scratch));
                let x2 = clamp_survival(survival_raw(u2, amp, &mut scratch));
                acc.push(x1, x2);
            }
        }
    }
    acc
}

pub(crate) fn mc_moments(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    ensemble: &EnsembleSpec,
    stream: &RngStream,
) -> Result<BivariateMoments> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch {
            left: u1.dim(),
            right: u2.dim(),
        });
    }
    if let Some(d) = ensemble.dim() {
        if d != u1.dim() {
            return Err(Error::DimensionMismatch {
                left: u1.dim(),
                right: d,
            });
        }
    }
    let min = match ensemble {
        EnsembleSpec::Haar { .. } => MIN_HAAR_SAMPLES,
        EnsembleSpec::User { .. } => 2,
    };
    let n = ensemble.len();
    if n < min {
        return Err(Error::TooFewSamples { got: n, min });
    }

    let n_chunks = n.div_ceil(CHUNK_SIZE);
    let partials: Vec<BivariateAccumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|c| chunk_accumulate(u1, u2, ensemble, stream, c))
        .collect();
    // merge in chunk order: the fold is sequential and deterministic
    let mut total = BivariateAccumulator::new();
    for p in &partials {
        total.merge(p);
    }
    debug_assert_eq!(total.count(), n as u64);
    Ok(total.finalize())
}

/// Monte Carlo estimate of the survival-probability correlation report.
pub fn mc_stats(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    ensemble: &EnsembleSpec,
    stream: &RngStream,
) -> Result<CorrelationReport> {
    let m = mc_moments(u1, u2, ensemble, stream)?;
    let var1 = clamp_variance(m.mu(2, 0));
    let var2 = clamp_variance(m.mu(0, 2));
    if var1 < VARIANCE_FLOOR || var2 < VARIANCE_FLOOR {
        return Err(Error::DegenerateReadout {
            variance: var1.min(var2),
        });
    }
    let cov = m.mu(1, 1);
    Ok(CorrelationReport {
        mean1: m.mean_x,
        mean2: m.mean_y,
        var1,
        var2,
        cov,
        pcc: cov / (var1.sqrt() * var2.sqrt()),
        method: Method::MonteCarlo,
        stderr_pcc: Some(pcc_stderr(&m)),
        n_samples: Some(m.n),
    })
}

/// Extremal overlap witnesses found by a randomized probe.
#[derive(Clone, Debug)]
pub struct OverlapWitness {
    /// Largest |<psi| U2^H U1 |psi>| found, after eigenvector refinement.
    pub max_overlap: f64,
    pub max_state: PureState,
    /// Smallest value seen among the random samples (not refined).
    pub min_overlap: f64,
    pub min_state: PureState,
}

/// Probe the range of |<psi| U2^H U1 |psi>| over pure states.
///
/// Random sampling alone almost never hits the true maximum, so the probe
/// also evaluates the eigenvector candidates of U2^H U1, where the modulus
/// attains 1 whenever the drives agree up to phase on some state.
pub fn overlap_probe(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    n_samples: usize,
    stream: &RngStream,
) -> Result<OverlapWitness> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch {
            left: u1.dim(),
            right: u2.dim(),
        });
    }
    if n_samples == 0 {
        return Err(Error::TooFewSamples { got: 0, min: 1 });
    }
    let dim = u1.dim();
    let m = u2.adjoint().matmul(u1.matrix())?;

    let overlap = |amp: &[C64], scratch: &mut [C64]| -> f64 {
        m.matvec_into(amp, scratch);
        let mut z = CZERO;
        for (a, s) in amp.iter().zip(scratch.iter()) {
            z += a.conj() * s;
        }
        z.norm()
    };

    let mut rng = stream.rng();
    let mut amp = vec![CZERO; dim];
    let mut scratch = vec![CZERO; dim];
    let mut max_overlap = f64::NEG_INFINITY;
    let mut min_overlap = f64::INFINITY;
    let mut max_amp = vec![CZERO; dim];
    let mut min_amp = vec![CZERO; dim];
    for _ in 0..n_samples {
        fill_haar_state(&mut amp, &mut rng);
        let v = overlap(&amp, &mut scratch);
        if v > max_overlap {
            max_overlap = v;
            max_amp.copy_from_slice(&amp);
        }
        if v < min_overlap {
            min_overlap = v;
            min_amp.copy_from_slice(&amp);
        }
    }
    for cand in normal_eigenstate_candidates(&m)? {
        let v = overlap(cand.amplitudes(), &mut scratch);
        if v > max_overlap {
            max_overlap = v;
            max_amp.copy_from_slice(cand.amplitudes());
        }
    }
    Ok(OverlapWitness {
        max_overlap,
        max_state: PureState::new(max_amp)?,
        min_overlap,
        min_state: PureState::new(min_amp)?,
    })
}

/// Largest |X1 + X2 - 1| found over random states plus the eigenvector
/// candidates of U1, U2, and U2^H U1. A strictly positive value witnesses
/// that the two survival maps do not sum to one identically.
pub fn complement_violation(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    n_samples: usize,
    stream: &RngStream,
) -> Result<f64> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch {
            left: u1.dim(),
            right: u2.dim(),
        });
    }
    if n_samples == 0 {
        return Err(Error::TooFewSamples { got: 0, min: 1 });
    }
    let dim = u1.dim();
    let mut scratch = vec![CZERO; dim];
    let mut worst = 0.0f64;
    let mut check = |amp: &[C64], scratch: &mut [C64]| {
        let x1 = clamp_survival(survival_raw(u1.matrix(), amp, scratch));
        let x2 = clamp_survival(survival_raw(u2.matrix(), amp, scratch));
        let v = (x1 + x2 - 1.0).abs();
        if v > worst {
            worst = v;
        }
    };

    let mut rng = stream.rng();
    let mut amp = vec![CZERO; dim];
    for _ in 0..n_samples {
        fill_haar_state(&mut amp, &mut rng);
        check(&amp, &mut scratch);
    }
    let m = u2.adjoint().matmul(u1.matrix())?;
    for source in [u1.matrix().clone(), u2.matrix().clone(), m] {
        for cand in normal_eigenstate_candidates(&source)? {
            check(cand.amplitudes(), &mut scratch);
        }
    }
    Ok(worst)
}
