//! Symmetric-group enumeration and permutation-operator trace products.
//!
//! The engine evaluates tr((A_1 x ... x A_k) V_d(pi)) without ever building
//! the d^k-dimensional permutation operator V_d(pi): the trace factorizes
//! over the cycles of pi into traces of operator words walked backwards
//! along each cycle. Summing over all of S_k and dividing by the rising
//! factorial d(d+1)...(d+k-1) yields the uniform average of products of k
//! quadratic forms over random unit vectors. The weights are uniform
//! precisely because the average runs over pure states |psi><psi|^(x k);
//! this is NOT the general twirl of an arbitrary operator, which would need
//! non-uniform (Weingarten) weights.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, CONE};
use crate::tol;

/// Permutation of {0, .., k-1}; `images[i] = pi(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self { images: (0..k).collect() }
    }

    /// Validates that `images` is a bijection on {0, .., k-1}.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &v in &images {
            if v >= k || seen[v] {
                return Err(Error::OutOfRange(format!(
                    "images {images:?} do not form a permutation of 0..{k}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// (self . other)(i) = self(other(i)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }
}

/// Disjoint cycles covering {0, .., k-1}; fixed points appear as 1-cycles.
///
/// Canonical form: each cycle starts at its smallest element and lists the
/// forward orbit (s, pi(s), pi^2(s), ...); cycles are ordered by leader.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

pub fn cycle_decompose(p: &Permutation) -> CycleDecomposition {
    let k = p.degree();
    let mut seen = vec![false; k];
    let mut cycles = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = p.apply(start);
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = p.apply(cur);
        }
        cycles.push(cycle);
    }
    CycleDecomposition { cycles }
}

/// All of S_k in lexicographic order of the image vectors. k is capped at
/// MAX_PERM_ORDER; 8! = 40320 permutations is the intended ceiling.
pub fn enumerate_sk(k: usize) -> Result<Vec<Permutation>> {
    if k == 0 || k > tol::MAX_PERM_ORDER {
        return Err(Error::OutOfRange(format!(
            "tensor order {k} outside supported range 1..={}",
            tol::MAX_PERM_ORDER
        )));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(Permutation { images: cur.clone() });
        // next_permutation in lexicographic order
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    Ok(out)
}

/// d (d+1) ... (d+k-1).
pub fn rising_factorial(d: usize, k: usize) -> f64 {
    (0..k).map(|i| (d + i) as f64).product()
}

/// tr((A_0 x ... x A_{k-1}) V_d(pi)) as a product of cycle-word traces.
///
/// For each cycle the word starts at the leader and walks the cycle
/// backwards: tr(A_s A_{pi^-1(s)} A_{pi^-2(s)} ...). The convention is
/// pinned by the dense tensor oracle in the tests below.
pub fn perm_trace(ops: &[ComplexMatrix], p: &Permutation) -> Result<C64> {
    if ops.len() != p.degree() {
        return Err(Error::DimensionMismatch { left: ops.len(), right: p.degree() });
    }
    perm_trace_cycles(ops, &cycle_decompose(p))
}

/// Same contraction from an explicit cycle decomposition. Rotating the
/// starting element of any cycle leaves the value unchanged.
pub fn perm_trace_cycles(ops: &[ComplexMatrix], cycles: &CycleDecomposition) -> Result<C64> {
    let d = match ops.first() {
        Some(m) => m.dim(),
        None => return Err(Error::OutOfRange("empty operator list".into())),
    };
    for m in ops {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { left: d, right: m.dim() });
        }
    }
    let mut total = CONE;
    for cycle in &cycles.cycles {
        // Word: leader, then the remaining cycle elements in reverse.
        let mut word = ComplexMatrix::identity(d);
        word = word.matmul(&ops[cycle[0]])?;
        for &idx in cycle[1..].iter().rev() {
            word = word.matmul(&ops[idx])?;
        }
        total *= word.trace();
    }
    Ok(total)
}

/// Average of <A_0> <A_1> ... <A_{k-1}> over random unit vectors:
/// sum over S_k of perm_trace, divided by the rising factorial.
pub fn moment_contraction(ops: &[ComplexMatrix], d: usize) -> Result<C64> {
    let k = ops.len();
    for m in ops {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { left: d, right: m.dim() });
        }
    }
    let mut acc = Complex::new(0.0, 0.0);
    for p in enumerate_sk(k)? {
        acc += perm_trace(ops, &p)?;
    }
    Ok(acc / rising_factorial(d, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CZERO;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mat(entries: &[[f64; 2]]) -> ComplexMatrix {
        let d = (entries.len() as f64).sqrt() as usize;
        ComplexMatrix::from_data(d, entries.iter().map(|e| c(e[0], e[1])).collect()).unwrap()
    }

    /// Dense tensor oracle: builds V_d(pi) on (C^d)^(x k) explicitly.
    /// V_d(pi) |i_1 .. i_k> = |i_{pi^-1(1)} .. i_{pi^-1(k)}>.
    mod dense {
        use super::*;

        pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
            let (da, db) = (a.dim(), b.dim());
            ComplexMatrix::from_fn(da * db, |i, j| {
                a.get(i / db, j / db) * b.get(i % db, j % db)
            })
        }

        pub fn perm_operator(d: usize, p: &Permutation) -> ComplexMatrix {
            let k = p.degree();
            let inv = p.inverse();
            let dim = d.pow(k as u32);
            let mut m = ComplexMatrix::zeros(dim);
            for col in 0..dim {
                // digits of col, slot 0 most significant
                let mut digits = vec![0usize; k];
                let mut rem = col;
                for s in (0..k).rev() {
                    digits[s] = rem % d;
                    rem /= d;
                }
                let mut row = 0usize;
                for s in 0..k {
                    row = row * d + digits[inv.apply(s)];
                }
                m.set(row, col, CONE);
            }
            m
        }

        pub fn trace_with(ops: &[ComplexMatrix], v: &ComplexMatrix) -> C64 {
            let mut t = ops[0].clone();
            for op in &ops[1..] {
                t = kron(&t, op);
            }
            crate::linalg::trace_of_product(&t, v).unwrap()
        }
    }

    fn test_ops(k: usize) -> Vec<ComplexMatrix> {
        // fixed, non-commuting 2x2 matrices
        let pool = [
            mat(&[[1.0, 0.2], [2.0, -0.5], [3.0, 0.0], [4.0, 1.0]]),
            mat(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]),
            mat(&[[2.0, 0.0], [0.0, -1.0], [0.5, 1.0], [5.0, 0.0]]),
            mat(&[[0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, -1.0]]),
        ];
        (0..k).map(|i| pool[i % 4].clone()).collect()
    }

    #[test]
    fn identity_permutation_gives_product_of_traces_by_hand() {
        // A = [[1,2],[3,4]], B = [[0,1],[1,0]], C = [[2,0],[0,5]]:
        // tr A = 5, tr B = 0, tr C = 7 -> product 0.
        let ops = vec![
            mat(&[[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]]),
            mat(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]),
            mat(&[[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [5.0, 0.0]]),
        ];
        let v = perm_trace(&ops, &Permutation::identity(3)).unwrap();
        assert!((v - CZERO).norm() < 1e-12);

        // swap(0,1), 2 fixed: tr(AB) tr(C) = 5 * 7 = 35.
        let p = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let v = perm_trace(&ops, &p).unwrap();
        assert!((v - c(35.0, 0.0)).norm() < 1e-12);

        // 3-cycle 0->1->2->0: word is A C B, tr(ACB) = 16 by hand.
        let p = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let v = perm_trace(&ops, &p).unwrap();
        assert!((v - c(16.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn swap_gives_trace_of_product() {
        let ops = test_ops(2);
        let p = Permutation::from_images(vec![1, 0]).unwrap();
        let got = perm_trace(&ops, &p).unwrap();
        let want = ops[0].matmul(&ops[1]).unwrap().trace();
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn matches_dense_oracle_for_every_permutation_up_to_k4() {
        for k in 1..=4usize {
            let ops = test_ops(k);
            for p in enumerate_sk(k).unwrap() {
                let fast = perm_trace(&ops, &p).unwrap();
                let slow = dense::trace_with(&ops, &dense::perm_operator(2, &p));
                assert!(
                    (fast - slow).norm() < 1e-10,
                    "k={k} perm={:?}: {fast} vs {slow}",
                    p.images()
                );
            }
        }
    }

    #[test]
    fn composition_matches_dense_operator_product() {
        // V(pi) V(sigma) = V(pi . sigma) at d = 2, k = 3.
        let ops = test_ops(3);
        let pi = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let sigma = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let composed = pi.compose(&sigma).unwrap();
        let dense_prod = dense::perm_operator(2, &pi)
            .matmul(&dense::perm_operator(2, &sigma))
            .unwrap();
        let via_engine = perm_trace(&ops, &composed).unwrap();
        let via_dense = dense::trace_with(&ops, &dense_prod);
        assert!((via_engine - via_dense).norm() < 1e-10);
    }

    #[test]
    fn cycle_rotation_does_not_change_the_trace() {
        let ops = test_ops(4);
        let p = Permutation::from_images(vec![1, 2, 3, 0]).unwrap();
        let base = perm_trace(&ops, &p).unwrap();
        let cycles = cycle_decompose(&p);
        assert_eq!(cycles.cycles, vec![vec![0, 1, 2, 3]]);
        for rot in 1..4 {
            let mut rotated = cycles.clone();
            rotated.cycles[0].rotate_left(rot);
            let v = perm_trace_cycles(&ops, &rotated).unwrap();
            assert!((v - base).norm() < 1e-10, "rotation {rot}");
        }
    }

    #[test]
    fn sum_over_s4_counts_cycles_at_identity_ops() {
        // sum over pi of d^{#cycles(pi)} = d(d+1)(d+2)(d+3); 120 at d = 2.
        let d = 2usize;
        let ops = vec![ComplexMatrix::identity(d); 4];
        let mut acc = CZERO;
        for p in enumerate_sk(4).unwrap() {
            acc += perm_trace(&ops, &p).unwrap();
        }
        assert_eq!(acc.re, 120.0);
        assert_eq!(acc.im, 0.0);
        // and the normalized contraction is exactly 1
        let m = moment_contraction(&ops, d).unwrap();
        assert_eq!(m.re, 1.0);
        assert_eq!(m.im, 0.0);
    }

    #[test]
    fn pair_contraction_reproduces_the_mean_formula() {
        // U = diag(1, i): average of <U^H><U> is (|tr U|^2 + d)/(d(d+1)) = 2/3.
        let u = mat(&[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]]);
        let m = moment_contraction(&[u.adjoint(), u], 2).unwrap();
        assert!((m.re - 2.0 / 3.0).abs() < 1e-14);
        assert!(m.im.abs() < 1e-14);
    }

    #[test]
    fn enumeration_is_lexicographic_and_sized() {
        let s3 = enumerate_sk(3).unwrap();
        assert_eq!(s3.len(), 6);
        assert_eq!(s3[0].images(), &[0, 1, 2]);
        assert_eq!(s3[1].images(), &[0, 2, 1]);
        assert_eq!(s3[5].images(), &[2, 1, 0]);
        for w in s3.windows(2) {
            assert!(w[0].images() < w[1].images());
        }
        assert!(enumerate_sk(9).is_err());
        assert!(enumerate_sk(0).is_err());
        assert_eq!(enumerate_sk(8).unwrap().len(), 40320);
    }

    #[test]
    fn fixed_points_appear_as_singleton_cycles() {
        let p = Permutation::from_images(vec![0, 2, 1, 3]).unwrap();
        let cyc = cycle_decompose(&p);
        assert_eq!(cyc.cycles, vec![vec![0], vec![1, 2], vec![3]]);
    }

    proptest! {
        #[test]
        fn compose_with_inverse_is_identity(k in 1usize..6, seed in 0u64..500) {
            // build a permutation from a seed by repeated swaps
            let mut images: Vec<usize> = (0..k).collect();
            let mut s = seed;
            for i in (1..k).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                images.swap(i, (s >> 33) as usize % (i + 1));
            }
            let p = Permutation::from_images(images).unwrap();
            let id = p.compose(&p.inverse()).unwrap();
            prop_assert_eq!(id, Permutation::identity(k));
        }

        #[test]
        fn cycles_partition_the_domain(seed in 0u64..500) {
            let k = 6usize;
            let mut images: Vec<usize> = (0..k).collect();
            let mut s = seed;
            for i in (1..k).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                images.swap(i, (s >> 33) as usize % (i + 1));
            }
            let p = Permutation::from_images(images).unwrap();
            let cyc = cycle_decompose(&p);
            let mut all: Vec<usize> = cyc.cycles.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..k).collect::<Vec<_>>());
            for cycle in &cyc.cycles {
                let min = cycle.iter().min().unwrap();
                prop_assert_eq!(min, &cycle[0]);
            }
        }
    }
}
