//! The three moment routes (trace closed forms, permutation contractions,
//! Monte Carlo) are implemented independently; these tests force them to
//! agree with each other and with basic invariances of the problem.

use survcorr_core::sample::{complement_violation, haar_unitary, mc_stats};
use survcorr_core::stats::{exact_stats, exact_stats_permsum};
use survcorr_core::{EnsembleSpec, RngStream, UnitaryMatrix};

fn haar_pair(dim: usize, rng: &mut rand_chacha::ChaCha8Rng) -> (UnitaryMatrix, UnitaryMatrix) {
    (
        haar_unitary(dim, rng).unwrap(),
        haar_unitary(dim, rng).unwrap(),
    )
}

#[test]
fn correlations_stay_inside_the_unit_interval_across_dimensions() {
    let mut rng = RngStream::new(101).rng();
    for dim in 2..=8 {
        let mut min_seen = f64::INFINITY;
        for _ in 0..200 {
            let (u1, u2) = haar_pair(dim, &mut rng);
            let r = exact_stats(&u1, &u2).unwrap();
            assert!(
                r.pcc.abs() <= 1.0 + 1e-12,
                "dim {dim}: pcc {} out of range",
                r.pcc
            );
            min_seen = min_seen.min(r.pcc);
        }
        // anticorrelation exists but never reaches -1
        assert!(min_seen > -1.0, "dim {dim}: min {min_seen}");
        assert!(min_seen < 0.9, "dim {dim}: suspiciously narrow range, min {min_seen}");
    }
}

#[test]
fn joint_conjugation_leaves_every_field_unchanged() {
    let mut rng = RngStream::new(102).rng();
    for dim in [2usize, 3, 5] {
        let (u1, u2) = haar_pair(dim, &mut rng);
        let v = haar_unitary(dim, &mut rng).unwrap();
        let c1 = UnitaryMatrix::new(
            v.matmul(u1.matrix()).unwrap().matmul(v.adjoint().matrix()).unwrap(),
        )
        .unwrap();
        let c2 = UnitaryMatrix::new(
            v.matmul(u2.matrix()).unwrap().matmul(v.adjoint().matrix()).unwrap(),
        )
        .unwrap();
        let a = exact_stats(&u1, &u2).unwrap();
        let b = exact_stats(&c1, &c2).unwrap();
        assert!((a.mean1 - b.mean1).abs() < 1e-10);
        assert!((a.mean2 - b.mean2).abs() < 1e-10);
        assert!((a.var1 - b.var1).abs() < 1e-10);
        assert!((a.var2 - b.var2).abs() < 1e-10);
        assert!((a.cov - b.cov).abs() < 1e-10);
        assert!((a.pcc - b.pcc).abs() < 1e-9);
    }
}

#[test]
fn closed_form_and_contraction_routes_agree_up_to_dimension_six() {
    let mut rng = RngStream::new(103).rng();
    for dim in 2..=6 {
        for _ in 0..5 {
            let (u1, u2) = haar_pair(dim, &mut rng);
            let a = exact_stats(&u1, &u2).unwrap();
            let b = exact_stats_permsum(&u1, &u2).unwrap();
            assert!((a.mean1 - b.mean1).abs() < 1e-10, "dim {dim}");
            assert!((a.mean2 - b.mean2).abs() < 1e-10, "dim {dim}");
            assert!((a.var1 - b.var1).abs() < 1e-10, "dim {dim}");
            assert!((a.var2 - b.var2).abs() < 1e-10, "dim {dim}");
            assert!((a.cov - b.cov).abs() < 1e-10, "dim {dim}");
            assert!((a.pcc - b.pcc).abs() < 1e-8, "dim {dim}");
        }
    }
}

#[test]
fn monte_carlo_matches_the_exact_moments_within_error_bars() {
    let mut rng = RngStream::new(104).rng();
    let (u1, u2) = haar_pair(3, &mut rng);
    let exact = exact_stats(&u1, &u2).unwrap();
    let stream = RngStream::new(105);
    let mc = mc_stats(&u1, &u2, &EnsembleSpec::haar(200_000), &stream).unwrap();
    let stderr = mc.stderr_pcc.unwrap();
    assert!(
        (mc.pcc - exact.pcc).abs() < 4.0 * stderr,
        "pcc mc {} exact {} stderr {}",
        mc.pcc,
        exact.pcc,
        stderr
    );
    // means converge at the same 1/sqrt(n) rate; their spread is below the
    // survival spread, so the pcc stderr is a serviceable yardstick
    assert!((mc.mean1 - exact.mean1).abs() < 0.01);
    assert!((mc.mean2 - exact.mean2).abs() < 0.01);
}

#[test]
fn survival_maps_almost_never_sum_to_one() {
    // X1 + X2 = 1 identically is a measure-zero coincidence; a randomized
    // witness plus eigenvector refinement should find a violation for
    // every random drive pair
    let mut rng = RngStream::new(106).rng();
    let stream = RngStream::new(107);
    for trial in 0..100 {
        let (u1, u2) = haar_pair(3, &mut rng);
        let v = complement_violation(&u1, &u2, 200, &stream).unwrap();
        assert!(v > 1e-3, "trial {trial}: violation only {v}");
    }
}
