//! Short-time behavior of survival probabilities under Hamiltonian drives.
//!
//! For U = exp(-iHt) the survival of a state is 1 - t^2 V(psi) + O(t^4),
//! where V(psi) is the energy variance of the state. The correlation of two
//! survival maps therefore approaches the correlation of the two variance
//! maps as t -> 0; the functions here compute both sides exactly and
//! measure the gap.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, self_fidelity, ComplexMatrix, HermitianMatrix, PureState, UnitaryMatrix, C64, CZERO,
};
use crate::perm::moment_contraction;
use crate::sample::{for_each_ensemble_state, EnsembleSpec, RngStream, MIN_HAAR_SAMPLES};
use crate::stats::exact_stats;
use crate::tol::{SMALL_TIME_LIMIT, VARIANCE_FLOOR};

/// RMS threshold under which a fitted affine relation between the two
/// variance maps counts as exact rather than a statistical accident.
pub const RIGIDITY_RMS_TOL: f64 = 1e-9;

/// A pair of Hamiltonian drives and the evolution times to examine.
#[derive(Clone, Debug)]
pub struct EchoConfig {
    h1: HermitianMatrix,
    h2: HermitianMatrix,
    times: Vec<f64>,
}

impl EchoConfig {
    /// Times must be finite, positive, and within the short-time window
    /// (0, 0.5]; they are sorted ascending. Drives must share a dimension.
    pub fn new(h1: HermitianMatrix, h2: HermitianMatrix, mut times: Vec<f64>) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::DimensionMismatch {
                left: h1.dim(),
                right: h2.dim(),
            });
        }
        if times.is_empty() {
            return Err(Error::OutOfRange("at least one evolution time is required".into()));
        }
        for &t in &times {
            check_short_time(t)?;
        }
        times.sort_unstable_by(|a, b| a.partial_cmp(b).expect("times checked finite"));
        Ok(Self { h1, h2, times })
    }

    pub fn dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn h1(&self) -> &HermitianMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &HermitianMatrix {
        &self.h2
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

fn check_short_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 || t > SMALL_TIME_LIMIT {
        return Err(Error::OutOfRange(format!(
            "evolution time must lie in (0, {SMALL_TIME_LIMIT}], got {t}"
        )));
    }
    Ok(())
}

/// Survival of `psi` under the relative drive U2^H U1. Symmetric in the
/// two drives because conjugating the bracket leaves its modulus alone.
pub fn relative_echo(u1: &UnitaryMatrix, u2: &UnitaryMatrix, psi: &PureState) -> Result<f64> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch {
            left: u1.dim(),
            right: u2.dim(),
        });
    }
    let m = u2.adjoint().matmul(u1.matrix())?;
    let rel = UnitaryMatrix::new(m)?;
    self_fidelity(&rel, psi)
}

/// Energy variance of the amplitudes in `amp` under the drive matrix `h`.
/// `scratch` receives H|psi>. Tiny negative round-off is clamped to zero.
fn variance_raw(h: &ComplexMatrix, amp: &[C64], scratch: &mut [C64]) -> f64 {
    h.matvec_into(amp, scratch);
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for (a, s) in amp.iter().zip(scratch.iter()) {
        first += (a.conj() * s).re;
        second += s.norm_sqr();
    }
    let v = second - first * first;
    if (-VARIANCE_FLOOR..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Energy variance <H^2> - <H>^2 of a state.
pub fn hamiltonian_variance(h: &HermitianMatrix, psi: &PureState) -> Result<f64> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi.dim(),
        });
    }
    let mut scratch = vec![CZERO; h.dim()];
    Ok(variance_raw(h.matrix(), psi.amplitudes(), &mut scratch))
}

/// One evolution time of the quadratic short-time comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShortTimeRow {
    pub t: f64,
    /// Exact survival under exp(-iHt).
    pub x_exact: f64,
    /// Quadratic surrogate 1 - t^2 V(psi).
    pub x_quadratic: f64,
    /// x_exact - x_quadratic; shrinks like t^4.
    pub residual: f64,
}

/// Compare exact survival against the quadratic surrogate at each time.
/// One eigendecomposition serves all times.
pub fn short_time_check(
    h: &HermitianMatrix,
    psi: &PureState,
    times: &[f64],
) -> Result<Vec<ShortTimeRow>> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi.dim(),
        });
    }
    for &t in times {
        check_short_time(t)?;
    }
    let variance = hamiltonian_variance(h, psi)?;
    let eig = herm_eig(h)?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let u = eig.propagator(t)?;
        let x_exact = self_fidelity(&u, psi)?;
        let x_quadratic = 1.0 - t * t * variance;
        rows.push(ShortTimeRow {
            t,
            x_exact,
            x_quadratic,
            residual: x_exact - x_quadratic,
        });
    }
    Ok(rows)
}

fn real_part(z: C64) -> f64 {
    debug_assert!(z.im.abs() <= 1e-9 * (1.0 + z.re.abs()), "imaginary leak {z}");
    z.re
}

/// Second joint moments of the two variance maps over uniform states,
/// computed exactly through order-4 tensor contractions.
struct VarianceMoments {
    var1: f64,
    var2: f64,
    cov: f64,
}

fn variance_moments(h1: &HermitianMatrix, h2: &HermitianMatrix) -> Result<VarianceMoments> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch {
            left: h1.dim(),
            right: h2.dim(),
        });
    }
    let d = h1.dim();
    let a = h1.matrix().clone();
    let b = h2.matrix().clone();
    let aa = a.matmul(&a)?;
    let bb = b.matmul(&b)?;

    let mc = |ops: &[&ComplexMatrix]| -> Result<f64> {
        let owned: Vec<ComplexMatrix> = ops.iter().map(|m| (*m).clone()).collect();
        Ok(real_part(moment_contraction(&owned, d)?))
    };

    // V(psi) = <H^2> - <H>^2, so every moment of V expands into mixed
    // moments of bracket products, each of which is one contraction.
    let mean1 = mc(&[&aa])? - mc(&[&a, &a])?;
    let mean2 = mc(&[&bb])? - mc(&[&b, &b])?;
    let second1 = mc(&[&aa, &aa])? - 2.0 * mc(&[&aa, &a, &a])? + mc(&[&a, &a, &a, &a])?;
    let second2 = mc(&[&bb, &bb])? - 2.0 * mc(&[&bb, &b, &b])? + mc(&[&b, &b, &b, &b])?;
    let cross = mc(&[&aa, &bb])? - mc(&[&aa, &b, &b])? - mc(&[&a, &a, &bb])?
        + mc(&[&a, &a, &b, &b])?;
    Ok(VarianceMoments {
        var1: second1 - mean1 * mean1,
        var2: second2 - mean2 * mean2,
        cov: cross - mean1 * mean2,
    })
}

/// Exact correlation of the two energy-variance maps over uniform states.
/// This is the t -> 0 limit of the survival correlation.
pub fn variance_limit_pcc_exact(h1: &HermitianMatrix, h2: &HermitianMatrix) -> Result<f64> {
    let m = variance_moments(h1, h2)?;
    if m.var1 < VARIANCE_FLOOR || m.var2 < VARIANCE_FLOOR {
        return Err(Error::DegenerateReadout {
            variance: m.var1.min(m.var2),
        });
    }
    Ok(m.cov / (m.var1.sqrt() * m.var2.sqrt()))
}

fn ensemble_guard(dim: usize, ensemble: &EnsembleSpec) -> Result<()> {
    if let Some(d) = ensemble.dim() {
        if d != dim {
            return Err(Error::DimensionMismatch { left: dim, right: d });
        }
    }
    let min = match ensemble {
        EnsembleSpec::Haar { .. } => MIN_HAAR_SAMPLES,
        EnsembleSpec::User { .. } => 2,
    };
    if ensemble.len() < min {
        return Err(Error::TooFewSamples {
            got: ensemble.len(),
            min,
        });
    }
    Ok(())
}

/// Sampled estimate of the variance-map correlation over an ensemble.
pub fn variance_limit_pcc(
    h1: &HermitianMatrix,
    h2: &HermitianMatrix,
    ensemble: &EnsembleSpec,
    stream: &RngStream,
) -> Result<f64> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch {
            left: h1.dim(),
            right: h2.dim(),
        });
    }
    let dim = h1.dim();
    ensemble_guard(dim, ensemble)?;
    let mut acc = crate::sample::BivariateAccumulator::new();
    let mut scratch = vec![CZERO; dim];
    for_each_ensemble_state(dim, ensemble, stream, |amp| {
        let v1 = variance_raw(h1.matrix(), amp, &mut scratch);
        let v2 = variance_raw(h2.matrix(), amp, &mut scratch);
        acc.push(v1, v2);
    });
    let m = acc.finalize();
    let (var1, var2) = (m.mu(2, 0), m.mu(0, 2));
    if var1 < VARIANCE_FLOOR || var2 < VARIANCE_FLOOR {
        return Err(Error::DegenerateReadout {
            variance: var1.min(var2),
        });
    }
    Ok(m.mu(1, 1) / (var1.sqrt() * var2.sqrt()))
}

/// Exact-vs-limit correlation at one evolution time.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShortTimeRecord {
    pub t: f64,
    pub pcc_exact: f64,
    pub pcc_variance_limit: f64,
    /// |pcc_exact - pcc_variance_limit|; shrinks like t^2.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShortTimeReport {
    pub dims: usize,
    pub records: Vec<ShortTimeRecord>,
}

/// Measure how fast the survival correlation converges to its variance
/// limit. Both sides are computed exactly (eigendecomposition for the
/// finite-time side, tensor contractions for the limit), so the reported
/// gaps carry no sampling noise.
pub fn short_time_pcc_gap(config: &EchoConfig) -> Result<ShortTimeReport> {
    let limit = variance_limit_pcc_exact(&config.h1, &config.h2)?;
    let e1 = herm_eig(&config.h1)?;
    let e2 = herm_eig(&config.h2)?;
    let mut records = Vec::with_capacity(config.times.len());
    for &t in &config.times {
        let u1 = e1.propagator(t)?;
        let u2 = e2.propagator(t)?;
        let pcc_exact = exact_stats(&u1, &u2)?.pcc;
        records.push(ShortTimeRecord {
            t,
            pcc_exact,
            pcc_variance_limit: limit,
            gap: (pcc_exact - limit).abs(),
        });
    }
    Ok(ShortTimeReport {
        dims: config.dim(),
        records,
    })
}

/// Least-squares affine fit of one variance map against the other.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RigidityFit {
    /// Fitted slope of V2 against V1.
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the fit residuals; near zero only when the relation is exact.
    pub residual_rms: f64,
    /// True when an essentially exact affine relation with negative slope
    /// was observed, which no Hamiltonian pair admits.
    pub negative_slope_feasible: bool,
}

/// Fit V2(psi) = slope * V1(psi) + intercept over the ensemble and report
/// the residual. Affinely related drives (H2 = a H1 + b I) produce slope
/// a^2 with zero residual; the slope of an exact relation can never be
/// negative because both maps are variances. Samples are stored so the
/// residual RMS comes from a clean second pass rather than a cancellation-
/// prone moment identity.
pub fn affine_rigidity_fit(
    h1: &HermitianMatrix,
    h2: &HermitianMatrix,
    ensemble: &EnsembleSpec,
    stream: &RngStream,
) -> Result<RigidityFit> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch {
            left: h1.dim(),
            right: h2.dim(),
        });
    }
    let dim = h1.dim();
    ensemble_guard(dim, ensemble)?;
    let n = ensemble.len();
    let mut v1 = Vec::with_capacity(n);
    let mut v2 = Vec::with_capacity(n);
    let mut scratch = vec![CZERO; dim];
    for_each_ensemble_state(dim, ensemble, stream, |amp| {
        v1.push(variance_raw(h1.matrix(), amp, &mut scratch));
        v2.push(variance_raw(h2.matrix(), amp, &mut scratch));
    });

    let nf = n as f64;
    let mean1 = v1.iter().sum::<f64>() / nf;
    let mean2 = v2.iter().sum::<f64>() / nf;
    let mut var1 = 0.0f64;
    let mut cov = 0.0f64;
    for (&a, &b) in v1.iter().zip(v2.iter()) {
        var1 += (a - mean1) * (a - mean1);
        cov += (a - mean1) * (b - mean2);
    }
    var1 /= nf;
    cov /= nf;
    if var1 < VARIANCE_FLOOR {
        return Err(Error::DegenerateReadout { variance: var1 });
    }
    let slope = cov / var1;
    let intercept = mean2 - slope * mean1;
    let mut ss = 0.0f64;
    for (&a, &b) in v1.iter().zip(v2.iter()) {
        let r = b - slope * a - intercept;
        ss += r * r;
    }
    let residual_rms = (ss / nf).sqrt();
    Ok(RigidityFit {
        slope,
        intercept,
        residual_rms,
        negative_slope_feasible: slope < 0.0 && residual_rms < RIGIDITY_RMS_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::gue_hermitian;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// H = n . sigma / 2 for a unit axis n.
    fn spin_half(n: [f64; 3]) -> HermitianMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, C64::new(n[2] / 2.0, 0.0));
        m.set(0, 1, C64::new(n[0] / 2.0, -n[1] / 2.0));
        m.set(1, 0, C64::new(n[0] / 2.0, n[1] / 2.0));
        m.set(1, 1, C64::new(-n[2] / 2.0, 0.0));
        HermitianMatrix::new(m).unwrap()
    }

    fn plus_state() -> PureState {
        PureState::new(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn quadratic_residual_matches_the_quartic_coefficient() {
        // H = sigma_z / 2 on |+>: survival is cos^2(t/2), variance is 1/4,
        // so the residual is t^4/48 + O(t^6)
        let h = spin_half([0.0, 0.0, 1.0]);
        let psi = plus_state();
        let rows = short_time_check(&h, &psi, &[0.05, 0.1, 0.2]).unwrap();
        for row in &rows {
            let t4 = row.t.powi(4);
            assert!(
                (row.residual - t4 / 48.0).abs() < row.t.powi(6) / 900.0,
                "t {} residual {} expected {}",
                row.t,
                row.residual,
                t4 / 48.0
            );
        }
        let ratio = rows[2].residual / rows[1].residual;
        assert!((12.0..=20.0).contains(&ratio), "quartic ratio {ratio}");
    }

    #[test]
    fn short_time_rows_reject_out_of_window_times() {
        let h = spin_half([0.0, 0.0, 1.0]);
        let psi = plus_state();
        assert!(short_time_check(&h, &psi, &[0.0]).is_err());
        assert!(short_time_check(&h, &psi, &[0.7]).is_err());
        assert!(short_time_check(&h, &psi, &[f64::NAN]).is_err());
    }

    #[test]
    fn variance_limit_matches_the_axis_formula_for_qubits() {
        // spin-1/2 drives: correlation of variance maps is (3 cos^2 d - 1)/2
        for delta in [0.3f64, 1.1, std::f64::consts::FRAC_PI_2, 2.4] {
            let h1 = spin_half([0.0, 0.0, 1.0]);
            let h2 = spin_half([delta.sin(), 0.0, delta.cos()]);
            let got = variance_limit_pcc_exact(&h1, &h2).unwrap();
            let want = (3.0 * delta.cos() * delta.cos() - 1.0) / 2.0;
            assert!((got - want).abs() < 1e-10, "delta {delta}: {got} vs {want}");
        }
    }

    #[test]
    fn sampled_variance_limit_agrees_with_the_exact_one() {
        let h1 = spin_half([0.0, 0.0, 1.0]);
        let h2 = spin_half([1.0, 0.0, 0.0]);
        let stream = RngStream::new(31);
        let mc = variance_limit_pcc(&h1, &h2, &EnsembleSpec::haar(50_000), &stream).unwrap();
        let exact = variance_limit_pcc_exact(&h1, &h2).unwrap();
        assert!((mc - exact).abs() < 0.05, "mc {mc} exact {exact}");
    }

    #[test]
    fn qubit_gap_vanishes_because_the_correlation_is_angle_free() {
        let h1 = spin_half([0.0, 0.0, 1.0]);
        let h2 = spin_half([0.6, 0.0, 0.8]);
        let config = EchoConfig::new(h1, h2, vec![0.2, 0.1]).unwrap();
        let report = short_time_pcc_gap(&config).unwrap();
        for r in &report.records {
            assert!(r.gap < 1e-9, "t {} gap {}", r.t, r.gap);
        }
    }

    #[test]
    fn gap_shrinks_quadratically_for_generic_drives() {
        let mut rng = RngStream::new(2026).rng();
        let h1 = gue_hermitian(4, &mut rng).unwrap();
        let h2 = gue_hermitian(4, &mut rng).unwrap();
        let config = EchoConfig::new(h1, h2, vec![0.2, 0.1, 0.05]).unwrap();
        let report = short_time_pcc_gap(&config).unwrap();
        assert_eq!(report.dims, 4);
        let g = |i: usize| report.records[i].gap;
        // times are sorted ascending: 0.05, 0.1, 0.2
        let r1 = g(2) / g(1);
        let r2 = g(1) / g(0);
        assert!((3.0..=5.0).contains(&r1), "gap ratio 0.2/0.1 = {r1}");
        assert!((3.0..=5.0).contains(&r2), "gap ratio 0.1/0.05 = {r2}");
    }

    #[test]
    fn affinely_related_drives_fit_exactly_with_squared_slope() {
        let mut rng = RngStream::new(77).rng();
        let h1 = gue_hermitian(3, &mut rng).unwrap();
        let h2 = h1.affine(2.0, -0.75);
        let stream = RngStream::new(78);
        let fit =
            affine_rigidity_fit(&h1, &h2, &EnsembleSpec::haar(2_000), &stream).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-10, "slope {}", fit.slope);
        assert!(fit.intercept.abs() < 1e-9, "intercept {}", fit.intercept);
        assert!(fit.residual_rms < 1e-10, "rms {}", fit.residual_rms);
        assert!(!fit.negative_slope_feasible);
    }

    #[test]
    fn no_random_pair_admits_an_exact_negative_slope_fit() {
        let mut rng = RngStream::new(79).rng();
        let stream = RngStream::new(80);
        for _ in 0..10 {
            let h1 = gue_hermitian(3, &mut rng).unwrap();
            let h2 = gue_hermitian(3, &mut rng).unwrap();
            let fit =
                affine_rigidity_fit(&h1, &h2, &EnsembleSpec::haar(1_000), &stream).unwrap();
            assert!(!fit.negative_slope_feasible, "fit {fit:?}");
        }
    }

    #[test]
    fn relative_echo_is_symmetric_and_matches_the_product_drive() {
        let mut rng = RngStream::new(81).rng();
        let u1 = crate::sample::haar_unitary(4, &mut rng).unwrap();
        let u2 = crate::sample::haar_unitary(4, &mut rng).unwrap();
        let psi = crate::sample::haar_state(4, &mut rng).unwrap();
        let fwd = relative_echo(&u1, &u2, &psi).unwrap();
        let rev = relative_echo(&u2, &u1, &psi).unwrap();
        assert!((fwd - rev).abs() < 1e-14);
        let m = u2.adjoint().matmul(u1.matrix()).unwrap();
        let direct = self_fidelity(&UnitaryMatrix::new(m).unwrap(), &psi).unwrap();
        assert!((fwd - direct).abs() < 1e-15);
    }

    #[test]
    fn config_sorts_times_and_rejects_bad_input() {
        let h1 = spin_half([0.0, 0.0, 1.0]);
        let h2 = spin_half([1.0, 0.0, 0.0]);
        let c = EchoConfig::new(h1.clone(), h2.clone(), vec![0.2, 0.05, 0.1]).unwrap();
        assert_eq!(c.times(), &[0.05, 0.1, 0.2]);
        assert!(EchoConfig::new(h1.clone(), h2.clone(), vec![]).is_err());
        assert!(EchoConfig::new(h1.clone(), h2.clone(), vec![-0.1]).is_err());
        assert!(EchoConfig::new(h1, h2, vec![0.6]).is_err());
    }

    #[test]
    fn hamiltonian_variance_known_values() {
        let h = spin_half([0.0, 0.0, 1.0]);
        assert!((hamiltonian_variance(&h, &plus_state()).unwrap() - 0.25).abs() < 1e-15);
        let up = PureState::basis(2, 0).unwrap();
        assert!(hamiltonian_variance(&h, &up).unwrap().abs() < 1e-15);
    }
}
