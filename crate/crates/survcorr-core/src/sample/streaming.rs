//! One-pass bivariate moment accumulation.
//!
//! Chunks accumulate compensated (Neumaier) sums of shifted powers up to
//! total order 4; chunk partials merge in a fixed order, so results are
//! bit-identical regardless of how many worker threads produced them.

/// Samples live in [0, 1]; shifting to [-1/2, 1/2] keeps the power sums
/// well conditioned without a data-dependent pivot.
const SHIFT: f64 = 0.5;

/// (p, q) exponent pairs tracked by the accumulator, 1 <= p + q <= 4.
const POWERS: [(usize, usize); 14] = [
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
];

#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Accumulates shifted power sums of an (x, y) sample stream.
#[derive(Clone, Debug, Default)]
pub(crate) struct BivariateAccumulator {
    n: u64,
    sums: [Neumaier; POWERS.len()],
}

impl BivariateAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64, y: f64) {
        let u = x - SHIFT;
        let v = y - SHIFT;
        let up = [1.0, u, u * u, u * u * u, u * u * u * u];
        let vp = [1.0, v, v * v, v * v * v, v * v * v * v];
        for (slot, &(p, q)) in self.sums.iter_mut().zip(POWERS.iter()) {
            slot.add(up[p] * vp[q]);
        }
        self.n += 1;
    }

    /// Merge another chunk's partials. Callers merge in chunk-index order.
    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        for (slot, o) in self.sums.iter_mut().zip(other.sums.iter()) {
            slot.add(o.sum);
            slot.add(o.comp);
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn finalize(&self) -> BivariateMoments {
        let n = self.n as f64;
        // raw shifted moments r[p][q]
        let mut raw = [[0.0f64; 5]; 5];
        raw[0][0] = 1.0;
        for (slot, &(p, q)) in self.sums.iter().zip(POWERS.iter()) {
            raw[p][q] = slot.total() / n;
        }
        let (ubar, vbar) = (raw[1][0], raw[0][1]);

        let binom = [[1.0f64, 0.0, 0.0, 0.0, 0.0],
                     [1.0, 1.0, 0.0, 0.0, 0.0],
                     [1.0, 2.0, 1.0, 0.0, 0.0],
                     [1.0, 3.0, 3.0, 1.0, 0.0],
                     [1.0, 4.0, 6.0, 4.0, 1.0]];
        let mut mu = [[0.0f64; 5]; 5];
        for p in 0..5 {
            for q in 0..5 {
                if p + q > 4 {
                    continue;
                }
                let mut acc = 0.0;
                for i in 0..=p {
                    for j in 0..=q {
                        acc += binom[p][i]
                            * binom[q][j]
                            * raw[i][j]
                            * (-ubar).powi((p - i) as i32)
                            * (-vbar).powi((q - j) as i32);
                    }
                }
                mu[p][q] = acc;
            }
        }
        BivariateMoments {
            n: self.n,
            mean_x: SHIFT + ubar,
            mean_y: SHIFT + vbar,
            mu,
        }
    }
}

/// Central moments mu[p][q] = E[(x - mx)^p (y - my)^q] for p + q <= 4.
#[derive(Clone, Debug)]
pub(crate) struct BivariateMoments {
    pub n: u64,
    pub mean_x: f64,
    pub mean_y: f64,
    mu: [[f64; 5]; 5],
}

impl BivariateMoments {
    #[inline]
    pub fn mu(&self, p: usize, q: usize) -> f64 {
        self.mu[p][q]
    }
}

/// Large-sample standard error of the sample correlation coefficient.
///
/// Delta method on the 5 moment statistics; written with the correlation
/// substituted so nothing divides by mu11 (stable near zero correlation).
/// For bivariate normal data it reduces to (1 - rho^2)/sqrt(n).
pub(crate) fn pcc_stderr(m: &BivariateMoments) -> f64 {
    let (m20, m02, m11) = (m.mu(2, 0), m.mu(0, 2), m.mu(1, 1));
    let a = m11 * m11 * m.mu(4, 0) / (4.0 * m20 * m20 * m20 * m02)
        + m11 * m11 * m.mu(0, 4) / (4.0 * m20 * m02 * m02 * m02)
        + m11 * m11 * m.mu(2, 2) / (2.0 * m20 * m20 * m02 * m02)
        + m.mu(2, 2) / (m20 * m02)
        - m11 * m.mu(3, 1) / (m20 * m20 * m02)
        - m11 * m.mu(1, 3) / (m20 * m02 * m02);
    (a.max(0.0) / m.n as f64).sqrt()
}
