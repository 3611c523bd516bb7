//! Closed-form qubit results for rotation drives.
//!
//! A drive is a rotation by angle theta about a unit Bloch axis n. Its
//! survival probability on a state with Bloch vector r is the fringe
//! 1 - sin^2(theta/2) (1 - (n.r)^2), and the correlation of two fringes
//! over uniformly random states depends only on the angle between the
//! axes, not on either rotation angle.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState, UnitaryMatrix, C64};
use crate::tol::STATE_NORM_TOL;

/// How far from 0 or 2*pi a rotation angle must stay; closer is rejected
/// because the drive degenerates to a global phase with no readout.
const THETA_MARGIN: f64 = 1e-12;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A point on the Bloch sphere (unit 3-vector).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        let deviation = (norm - 1.0).abs();
        if !deviation.is_finite() || deviation > STATE_NORM_TOL {
            return Err(Error::InvalidAxis { deviation });
        }
        Ok(Self { x, y, z })
    }

    /// Spherical coordinates: polar from +z in [0, pi], azimuth from +x.
    pub fn from_angles(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self {
            x: sp * ca,
            y: sp * sa,
            z: cp,
        }
    }

    pub fn dot(&self, other: &BlochPoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// A rotation drive: angle theta in (0, 2*pi) about unit axis n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamseyControl {
    theta: f64,
    axis: BlochPoint,
}

impl RamseyControl {
    pub fn new(theta: f64, axis: BlochPoint) -> Result<Self> {
        // contains() also rejects NaN and infinities
        if !(THETA_MARGIN..=TWO_PI - THETA_MARGIN).contains(&theta) {
            return Err(Error::OutOfRange(format!(
                "rotation angle must lie strictly inside (0, 2*pi), got {theta}"
            )));
        }
        Ok(Self { theta, axis })
    }

    /// Convenience: normalize a raw axis before constructing the control.
    pub fn with_normalized_axis(theta: f64, axis: [f64; 3]) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidAxis { deviation: f64::INFINITY });
        }
        Self::new(
            theta,
            BlochPoint::new(axis[0] / norm, axis[1] / norm, axis[2] / norm)?,
        )
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn axis(&self) -> BlochPoint {
        self.axis
    }

    /// The 2x2 unitary cos(theta/2) I - i sin(theta/2) (n . sigma).
    pub fn rotation(&self) -> UnitaryMatrix {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let n = self.axis;
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, C64::new(c, -s * n.z));
        m.set(0, 1, C64::new(-s * n.y, -s * n.x));
        m.set(1, 0, C64::new(s * n.y, -s * n.x));
        m.set(1, 1, C64::new(c, s * n.z));
        UnitaryMatrix::new(m).expect("rotation matrices are unitary by construction")
    }

    /// Survival probability on the state with Bloch vector r.
    pub fn fringe(&self, r: &BlochPoint) -> f64 {
        let s = (self.theta / 2.0).sin();
        let align = self.axis.dot(r);
        1.0 - s * s * (1.0 - align * align)
    }

    /// Angle in [0, pi] between this drive's axis and another's.
    pub fn axis_separation(&self, other: &RamseyControl) -> f64 {
        self.axis.dot(&other.axis).clamp(-1.0, 1.0).acos()
    }
}

/// The state whose Bloch vector is r: amplitudes (cos(v/2), e^{i u} sin(v/2))
/// with v the polar angle and u the azimuth of r.
pub fn state_of(r: &BlochPoint) -> PureState {
    let polar = r.z.clamp(-1.0, 1.0).acos();
    let azimuth = r.y.atan2(r.x);
    let (s, c) = (polar / 2.0).sin_cos();
    let phase = C64::new(azimuth.cos(), azimuth.sin());
    PureState::new(vec![C64::new(c, 0.0), phase * s])
        .expect("spherical parametrization is normalized by construction")
}

/// Bloch vector of a qubit state: the Pauli expectation values.
pub fn bloch_vector(psi: &PureState) -> Result<BlochPoint> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    let cross = a[0].conj() * a[1];
    BlochPoint::new(
        2.0 * cross.re,
        2.0 * cross.im,
        a[0].norm_sqr() - a[1].norm_sqr(),
    )
}

/// Correlation of two qubit fringes over uniform states as a function of
/// the axis separation delta: (3 cos^2(delta) - 1) / 2. The rotation
/// angles drop out entirely; the range is [-1/2, 1].
pub fn closed_form_pcc(delta: f64) -> f64 {
    let c = delta.cos();
    (3.0 * c * c - 1.0) / 2.0
}

/// One grid sample of a fringe map.
#[derive(Clone, Copy, Debug)]
pub struct FringeSample {
    /// Polar angle of the state, in [0, pi].
    pub polar: f64,
    /// Azimuthal angle of the state, in [0, 2*pi].
    pub azimuth: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub fidelity: f64,
}

/// Evaluate a drive's fringe on an inclusive lat-long grid. Both endpoints
/// of each coordinate are kept, so the azimuthal seam appears twice; plots
/// close cleanly and downstream code must not assume distinct points.
pub fn fringe_grid(
    control: &RamseyControl,
    n_polar: usize,
    n_azimuth: usize,
) -> Result<Vec<FringeSample>> {
    if n_polar < 2 || n_azimuth < 2 {
        return Err(Error::GridTooSmall {
            rows: n_polar,
            cols: n_azimuth,
        });
    }
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for i in 0..n_polar {
        let polar = std::f64::consts::PI * i as f64 / (n_polar - 1) as f64;
        for j in 0..n_azimuth {
            let azimuth = TWO_PI * j as f64 / (n_azimuth - 1) as f64;
            let r = BlochPoint::from_angles(polar, azimuth);
            out.push(FringeSample {
                polar,
                azimuth,
                x: r.x,
                y: r.y,
                z: r.z,
                fidelity: control.fringe(&r),
            });
        }
    }
    Ok(out)
}

/// Tabulate the closed-form correlation on an inclusive grid over [0, pi].
pub fn pcc_sweep(n_points: usize) -> Result<Vec<(f64, f64)>> {
    if n_points < 2 {
        return Err(Error::OutOfRange(
            "correlation sweep needs at least 2 grid points".into(),
        ));
    }
    let mut out = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let delta = std::f64::consts::PI * i as f64 / (n_points - 1) as f64;
        out.push((delta, closed_form_pcc(delta)));
    }
    Ok(out)
}
