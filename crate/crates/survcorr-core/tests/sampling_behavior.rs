//! Statistical behavior of the samplers: distributional checks for the
//! random-state and random-unitary generators, error-bar calibration, and
//! reproducibility across thread counts.

use rand::Rng;
use survcorr_core::sample::{haar_state, haar_unitary, mc_stats};
use survcorr_core::stats::exact_stats;
use survcorr_core::{EnsembleSpec, PureState, RngStream};

/// Two-sample Kolmogorov-Smirnov distance between sorted samples.
fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let gap = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if gap > d {
            d = gap;
        }
    }
    d
}

#[test]
fn random_state_overlap_moments_match_their_known_values() {
    // |<e0|psi>|^2 has mean 1/d and second moment 2/(d(d+1)) for uniform psi
    let mut rng = RngStream::new(201).rng();
    for dim in [2usize, 4, 7] {
        let n = 40_000;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..n {
            let psi = haar_state(dim, &mut rng).unwrap();
            let p = psi.amplitudes()[0].norm_sqr();
            sum += p;
            sum_sq += p * p;
        }
        let mean = sum / n as f64;
        let second = sum_sq / n as f64;
        let want_mean = 1.0 / dim as f64;
        let want_second = 2.0 / (dim as f64 * (dim as f64 + 1.0));
        // generous 5-sigma-style windows computed from the exact moments
        let sd_mean = (want_second - want_mean * want_mean).sqrt() / (n as f64).sqrt();
        assert!(
            (mean - want_mean).abs() < 5.0 * sd_mean,
            "dim {dim}: mean {mean} want {want_mean}"
        );
        assert!(
            (second - want_second).abs() < 10.0 * sd_mean,
            "dim {dim}: second {second} want {want_second}"
        );
    }
}

#[test]
fn random_unitaries_are_left_translation_invariant() {
    // QR without the phase correction fails exactly this test: the trace
    // statistic of V*U would not match that of U
    let dim = 3;
    let n = 2_000;
    let mut rng = RngStream::new(202).rng();
    let v = haar_unitary(dim, &mut rng).unwrap();
    let mut plain = Vec::with_capacity(n);
    let mut shifted = Vec::with_capacity(n);
    for _ in 0..n {
        plain.push(haar_unitary(dim, &mut rng).unwrap().trace().norm_sqr());
    }
    for _ in 0..n {
        let u = haar_unitary(dim, &mut rng).unwrap();
        shifted.push(v.matmul(u.matrix()).unwrap().trace().norm_sqr());
    }
    let d = ks_distance(plain.clone(), shifted);
    // c(0.01) = 1.628 for the two-sample statistic
    let threshold = 1.628 * (2.0 / n as f64).sqrt();
    assert!(d < threshold, "KS distance {d} threshold {threshold}");

    // |Tr U|^2 has mean 1 for the invariant ensemble in every dimension
    let mean: f64 = plain.iter().sum::<f64>() / n as f64;
    assert!((mean - 1.0).abs() < 0.15, "mean |Tr U|^2 = {mean}");
}

#[test]
fn error_bars_shrink_like_the_square_root_of_the_sample_count() {
    let mut rng = RngStream::new(203).rng();
    let u1 = haar_unitary(2, &mut rng).unwrap();
    let u2 = haar_unitary(2, &mut rng).unwrap();
    let stream = RngStream::new(204);
    let small = mc_stats(&u1, &u2, &EnsembleSpec::haar(10_000), &stream).unwrap();
    let large = mc_stats(&u1, &u2, &EnsembleSpec::haar(160_000), &stream).unwrap();
    let ratio = small.stderr_pcc.unwrap() / large.stderr_pcc.unwrap();
    assert!((ratio - 4.0).abs() < 0.8, "stderr ratio {ratio}, want ~4");
}

#[test]
fn delta_method_error_bars_match_a_bootstrap() {
    let dim = 2;
    let n = 5_000;
    let mut rng = RngStream::new(205).rng();
    let u1 = haar_unitary(dim, &mut rng).unwrap();
    let u2 = haar_unitary(dim, &mut rng).unwrap();
    let states: Vec<PureState> = (0..n).map(|_| haar_state(dim, &mut rng).unwrap()).collect();

    let base = mc_stats(
        &u1,
        &u2,
        &EnsembleSpec::user(states.clone()).unwrap(),
        &RngStream::new(0),
    )
    .unwrap();
    let delta = base.stderr_pcc.unwrap();

    let mut boot_rng = RngStream::new(206).rng();
    let rounds = 200;
    let mut pccs = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let resampled: Vec<PureState> = (0..n)
            .map(|_| states[boot_rng.random_range(0..n)].clone())
            .collect();
        let r = mc_stats(
            &u1,
            &u2,
            &EnsembleSpec::user(resampled).unwrap(),
            &RngStream::new(0),
        )
        .unwrap();
        pccs.push(r.pcc);
    }
    let mean: f64 = pccs.iter().sum::<f64>() / rounds as f64;
    let var: f64 = pccs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / rounds as f64;
    let boot = var.sqrt();
    let ratio = delta / boot;
    assert!(
        (0.6..=1.6).contains(&ratio),
        "delta {delta} bootstrap {boot} ratio {ratio}"
    );
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let mut rng = RngStream::new(207).rng();
    let u1 = haar_unitary(3, &mut rng).unwrap();
    let u2 = haar_unitary(3, &mut rng).unwrap();
    let ens = EnsembleSpec::haar(150_000); // three chunks
    let stream = RngStream::new(208);

    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| mc_stats(&u1, &u2, &ens, &stream).unwrap());
    let eight = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| mc_stats(&u1, &u2, &ens, &stream).unwrap());

    assert_eq!(single.mean1.to_bits(), eight.mean1.to_bits());
    assert_eq!(single.mean2.to_bits(), eight.mean2.to_bits());
    assert_eq!(single.var1.to_bits(), eight.var1.to_bits());
    assert_eq!(single.var2.to_bits(), eight.var2.to_bits());
    assert_eq!(single.cov.to_bits(), eight.cov.to_bits());
    assert_eq!(single.pcc.to_bits(), eight.pcc.to_bits());
    assert_eq!(
        single.stderr_pcc.unwrap().to_bits(),
        eight.stderr_pcc.unwrap().to_bits()
    );
}

#[test]
fn error_bars_are_honest_across_many_drive_pairs() {
    // 4-sigma misses should be rare; demand at most one miss in twenty
    let mut rng = RngStream::new(209).rng();
    let mut misses = 0;
    for trial in 0..20u64 {
        let dim = 2 + (trial % 3) as usize;
        let u1 = haar_unitary(dim, &mut rng).unwrap();
        let u2 = haar_unitary(dim, &mut rng).unwrap();
        let exact = exact_stats(&u1, &u2).unwrap();
        let stream = RngStream::with_stream(210, trial);
        let mc = mc_stats(&u1, &u2, &EnsembleSpec::haar(50_000), &stream).unwrap();
        if (mc.pcc - exact.pcc).abs() > 4.0 * mc.stderr_pcc.unwrap() {
            misses += 1;
        }
    }
    assert!(misses <= 1, "{misses} of 20 outside 4 sigma");
}
