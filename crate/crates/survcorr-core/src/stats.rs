//! Exact first, second, and fourth moments of survival probabilities over
//! random states, and the correlation/contrast reports built from them.
//!
//! Everything reduces to a handful of trace invariants of the unitary pair;
//! the fourth moment has an independent evaluation route through the
//! permutation engine (`exact_stats_permsum`) that must agree with the
//! closed forms and is kept as a standing cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, ComplexMatrix, UnitaryMatrix, C64};
use crate::perm::moment_contraction;
use crate::tol;

/// Which of the two readouts a single-channel quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Readout {
    First,
    Second,
}

/// Trace invariants of a unitary pair; everything downstream is a function
/// of these plus the dimension.
#[derive(Clone, Debug)]
pub struct InvariantSet {
    pub dim: usize,
    pub tr_u1: C64,
    pub tr_u2: C64,
    pub tr_u1_u2: C64,
    pub tr_u1_u2dag: C64,
    pub tr_u1_sq: C64,
    pub tr_u2_sq: C64,
    /// tr(U1 U2 U1^H U2^H)
    pub tr_commutator: C64,
    pub abs2_tr_u1: f64,
    pub abs2_tr_u2: f64,
}

/// sum over a_ij * conj(b_ij) = tr(A B^H).
fn trace_a_bdag(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data()) {
        acc += x * y.conj();
    }
    acc
}

/// Collects the trace invariants in O(d^3).
pub fn invariants(u1: &UnitaryMatrix, u2: &UnitaryMatrix) -> Result<InvariantSet> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch { left: u1.dim(), right: u2.dim() });
    }
    let tr_u1 = u1.trace();
    let tr_u2 = u2.trace();
    let u2_adj = u2.matrix().adjoint();
    // tr(U1 U2 U1^H U2^H) = tr( (U1 U2) (U2 U1)^H )
    let u1_u2 = u1.matmul(u2.matrix())?;
    let u2_u1 = u2.matmul(u1.matrix())?;
    Ok(InvariantSet {
        dim: u1.dim(),
        tr_u1,
        tr_u2,
        tr_u1_u2: trace_of_product(u1.matrix(), u2.matrix())?,
        tr_u1_u2dag: trace_of_product(u1.matrix(), &u2_adj)?,
        tr_u1_sq: trace_of_product(u1.matrix(), u1.matrix())?,
        tr_u2_sq: trace_of_product(u2.matrix(), u2.matrix())?,
        tr_commutator: trace_a_bdag(&u1_u2, &u2_u1),
        abs2_tr_u1: tr_u1.norm_sqr(),
        abs2_tr_u2: tr_u2.norm_sqr(),
    })
}

/// E[X] = (|tr U|^2 + d) / (d (d + 1)).
pub fn mean_self_fidelity(inv: &InvariantSet, which: Readout) -> f64 {
    let d = inv.dim as f64;
    let a = match which {
        Readout::First => inv.abs2_tr_u1,
        Readout::Second => inv.abs2_tr_u2,
    };
    (a + d) / (d * (d + 1.0))
}

fn rising4(d: f64) -> f64 {
    d * (d + 1.0) * (d + 2.0) * (d + 3.0)
}

/// E[X1 X2]: the full fourth-moment contraction of the pair.
pub fn fourth_moment(inv: &InvariantSet) -> f64 {
    let d = inv.dim as f64;
    let (a1, a2) = (inv.abs2_tr_u1, inv.abs2_tr_u2);
    let cross = inv.tr_u1_u2 * inv.tr_u1.conj() * inv.tr_u2.conj()
        + inv.tr_u1_u2dag * inv.tr_u1.conj() * inv.tr_u2
        + inv.tr_commutator;
    let num = d * (d + 4.0)
        + (d + 4.0) * (a1 + a2)
        + (a1 * a2 + inv.tr_u1_u2.norm_sqr() + inv.tr_u1_u2dag.norm_sqr())
        + 2.0 * cross.re;
    num / rising4(d)
}

/// E[X_j^2]: the pair fourth moment specialized to U1 = U2 = U_j,
/// where tr(U U) = tr(U^2), tr(U U^H) = d and the commutator trace is d.
pub fn self_fourth_moment(inv: &InvariantSet, which: Readout) -> f64 {
    let d = inv.dim as f64;
    let (tr_u, tr_usq, a) = match which {
        Readout::First => (inv.tr_u1, inv.tr_u1_sq, inv.abs2_tr_u1),
        Readout::Second => (inv.tr_u2, inv.tr_u2_sq, inv.abs2_tr_u2),
    };
    let cross_re = (tr_usq * tr_u.conj() * tr_u.conj()).re + d * a + d;
    let num = d * (d + 4.0)
        + (d + 4.0) * (a + a)
        + (a * a + tr_usq.norm_sqr() + d * d)
        + 2.0 * cross_re;
    num / rising4(d)
}

/// Covariance in its expanded mean-referenced form; redundant with
/// fourth_moment - mean1 * mean2 and kept as a cross-check. One source
/// prints the middle 2Re(..) term with an unbalanced parenthesis; the
/// correct pairing, confirmed against the primary route and the permutation
/// engine, is tr(U1 U2^H) tr(U1^H) tr(U2).
pub fn covariance_expanded(inv: &InvariantSet) -> f64 {
    let d = inv.dim as f64;
    let f1 = mean_self_fidelity(inv, Readout::First);
    let f2 = mean_self_fidelity(inv, Readout::Second);
    let cross = inv.tr_u1_u2 * inv.tr_u1.conj() * inv.tr_u2.conj()
        + inv.tr_u1_u2dag * inv.tr_u1.conj() * inv.tr_u2
        + inv.tr_commutator;
    let num = -4.0 * d + 4.0 * d * (d + 1.0) * (f1 + f2)
        - 2.0 * (2.0 * d + 3.0) * d * (d + 1.0) * f1 * f2
        + inv.tr_u1_u2.norm_sqr()
        + inv.tr_u1_u2dag.norm_sqr()
        + 2.0 * cross.re;
    num / rising4(d)
}

/// Evaluation route of a correlation report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact-closed-form")]
    ClosedForm,
    #[serde(rename = "exact-permsum")]
    PermSum,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

/// Means, variances, covariance and Pearson correlation of (X1, X2).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mean1: f64,
    pub mean2: f64,
    pub var1: f64,
    pub var2: f64,
    pub cov: f64,
    pub pcc: f64,
    pub method: Method,
    pub stderr_pcc: Option<f64>,
    pub n_samples: Option<u64>,
}

/// Tiny negative variances are rounding; anything below -VARIANCE_FLOOR is
/// left alone so the degenerate-readout check can reject it.
pub(crate) fn clamp_variance(v: f64) -> f64 {
    if (-tol::VARIANCE_FLOOR..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

pub(crate) fn report_from_moments(
    mean1: f64,
    mean2: f64,
    second1: f64,
    second2: f64,
    cross: f64,
    method: Method,
) -> Result<CorrelationReport> {
    let var1 = clamp_variance(second1 - mean1 * mean1);
    let var2 = clamp_variance(second2 - mean2 * mean2);
    for v in [var1, var2] {
        if v < tol::VARIANCE_FLOOR {
            return Err(Error::DegenerateReadout { variance: v });
        }
    }
    let cov = cross - mean1 * mean2;
    let pcc = cov / (var1.sqrt() * var2.sqrt());
    Ok(CorrelationReport {
        mean1,
        mean2,
        var1,
        var2,
        cov,
        pcc,
        method,
        stderr_pcc: None,
        n_samples: None,
    })
}

/// Exact correlation statistics through the closed-form trace invariants.
pub fn exact_stats(u1: &UnitaryMatrix, u2: &UnitaryMatrix) -> Result<CorrelationReport> {
    let inv = invariants(u1, u2)?;
    report_from_moments(
        mean_self_fidelity(&inv, Readout::First),
        mean_self_fidelity(&inv, Readout::Second),
        self_fourth_moment(&inv, Readout::First),
        self_fourth_moment(&inv, Readout::Second),
        fourth_moment(&inv),
        Method::ClosedForm,
    )
}

/// Exact correlation statistics through the permutation engine. Kept fully
/// independent of the closed forms; the two routes must agree to 1e-10.
pub fn exact_stats_permsum(u1: &UnitaryMatrix, u2: &UnitaryMatrix) -> Result<CorrelationReport> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch { left: u1.dim(), right: u2.dim() });
    }
    let d = u1.dim();
    let a1 = u1.matrix().adjoint();
    let a2 = u2.matrix().adjoint();
    let m1 = u1.matrix().clone();
    let m2 = u2.matrix().clone();

    // adjoint-closed word sets contract to real values
    let real = |z: C64| -> f64 {
        debug_assert!(z.im.abs() <= 1e-10, "imaginary residue {:e}", z.im);
        z.re
    };
    let mean1 = real(moment_contraction(&[a1.clone(), m1.clone()], d)?);
    let mean2 = real(moment_contraction(&[a2.clone(), m2.clone()], d)?);
    let second1 = real(moment_contraction(
        &[a1.clone(), m1.clone(), a1.clone(), m1.clone()],
        d,
    )?);
    let second2 = real(moment_contraction(
        &[a2.clone(), m2.clone(), a2.clone(), m2.clone()],
        d,
    )?);
    let cross = real(moment_contraction(&[a1, m1, a2, m2], d)?);
    report_from_moments(mean1, mean2, second1, second2, cross, Method::PermSum)
}

/// Readout-combination analysis: variance of X1 - kappa * X2 as a function
/// of kappa, its minimizer and the variance floor at the minimizer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContrastReport {
    pub kappa_star: f64,
    pub floor: f64,
    pub curve: Vec<(f64, f64)>,
}

/// Var(X1 - kappa X2) = var1 - 2 kappa cov + kappa^2 var2.
pub fn variance_at_kappa(report: &CorrelationReport, kappa: f64) -> f64 {
    report.var1 - 2.0 * kappa * report.cov + kappa * kappa * report.var2
}

/// Minimizer kappa* = cov / var2 and floor var1 (1 - pcc^2), with the
/// variance curve tabulated on a symmetric grid centered on kappa*.
///
/// `grid_points` is rounded up to the next odd count so the minimizer is
/// itself a grid point.
pub fn optimal_contrast(report: &CorrelationReport, grid_points: usize) -> Result<ContrastReport> {
    if grid_points < 3 {
        return Err(Error::OutOfRange(format!(
            "contrast grid needs at least 3 points, got {grid_points}"
        )));
    }
    if report.var2 < tol::VARIANCE_FLOOR {
        return Err(Error::DegenerateReadout { variance: report.var2 });
    }
    let n = grid_points | 1;
    let kappa_star = report.cov / report.var2;
    let floor = report.var1 * (1.0 - report.pcc * report.pcc);
    let half_span = f64::max(1.0, 2.0 * kappa_star.abs());
    let half = (n / 2) as isize;
    let step = half_span / half as f64;
    let curve = (-half..=half)
        .map(|i| {
            let kappa = kappa_star + i as f64 * step;
            (kappa, variance_at_kappa(report, kappa))
        })
        .collect();
    Ok(ContrastReport { kappa_star, floor, curve })
}
