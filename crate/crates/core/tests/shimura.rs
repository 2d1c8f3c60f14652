// SPDX-License-Identifier: Apache-2.0

//! Hecke-algebra identities, theta series against direct enumeration, class
//! invariance under scaling, cache round trips and the pairing normalization.

use std::sync::OnceLock;

use num_rational::Ratio;
use proptest::prelude::*;
use tpl_core::cache::Cache;
use tpl_core::exec::Execution;
use tpl_core::ledger::pairings;
use tpl_core::quat::brandt::theta_counts;
use tpl_core::quat::ideals::ramified_involution;
use tpl_core::quat::{brandt_matrices, build_algebra, maximal_order, right_ideal_classes, BrandtMatrix, Lattice, Quat, RightIdeal, ShimuraSet};

const PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const NMAX: u64 = 144;

struct Level {
    set: ShimuraSet,
    brandt: Vec<BrandtMatrix>,
}

fn levels() -> &'static [Level] {
    static CELL: OnceLock<Vec<Level>> = OnceLock::new();
    CELL.get_or_init(|| {
        PRIMES
            .iter()
            .map(|&q| {
                let set = right_ideal_classes(&maximal_order(&build_algebra(q).unwrap()).unwrap()).unwrap();
                let brandt = brandt_matrices(&set, NMAX, Execution::default()).unwrap();
                Level { set, brandt }
            })
            .collect()
    })
}

fn matmul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Elements `x` of `lattice` with `nrd(x) = target`, found by a box search
/// in `1, i, j, k` coordinates.
fn count_by_box(lattice: &Lattice, q: u64, target: Ratio<i128>) -> u64 {
    let alg = build_algebra(q).unwrap();
    let den = lattice.den();
    // nrd((v0 + v1 i + v2 j + v3 k)/den) = (v0^2 - a v1^2 - b v2^2 + ab v3^2) / den^2
    let t = target * Ratio::from_integer(den * den);
    let bound = |c: i128| (t / Ratio::from_integer(c)).to_integer();
    let isqrt = |n: i128| (0..).take_while(|r: &i128| r * r <= n).last().unwrap_or(0);
    let r = [bound(1), bound(-alg.a as i128), bound(-alg.b as i128), bound((alg.a * alg.b) as i128)].map(isqrt);
    let mut n = 0;
    for v0 in -r[0]..=r[0] {
        for v1 in -r[1]..=r[1] {
            for v2 in -r[2]..=r[2] {
                for v3 in -r[3]..=r[3] {
                    let x = Quat::new([v0, v1, v2, v3], den);
                    if alg.nrd(&x) == target && lattice.contains(&x) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn coprime_products(l in 0..PRIMES.len(), m in 1u64..=12, n in 1u64..=12) {
        prop_assume!(gcd(m, n) == 1);
        let level = &levels()[l];
        let b = |k: u64| &level.brandt[k as usize - 1].entries;
        prop_assert_eq!(matmul(b(m), b(n)), b(m * n).clone());
    }

    #[test]
    fn commuting_and_self_adjoint(l in 0..PRIMES.len(), m in 1u64..=NMAX, n in 1u64..=NMAX) {
        let level = &levels()[l];
        let (bm, bn) = (&level.brandt[m as usize - 1].entries, &level.brandt[n as usize - 1].entries);
        prop_assert_eq!(matmul(bm, bn), matmul(bn, bm));
        let w = &level.set.weights;
        for i in 0..w.len() {
            for j in 0..w.len() {
                prop_assert_eq!(w[j] * bm[i][j], w[i] * bm[j][i]);
            }
        }
    }

    #[test]
    fn row_sums_are_divisor_sums(l in 0..PRIMES.len(), n in 1u64..=NMAX) {
        let level = &levels()[l];
        prop_assume!(n % level.set.q() != 0);
        let sigma: u64 = (1..=n).filter(|d| n % d == 0).sum();
        for row in &level.brandt[n as usize - 1].entries {
            prop_assert_eq!(row.iter().sum::<u64>(), sigma);
        }
    }

    #[test]
    fn theta_diagonal_by_direct_search(l in 0..6usize, n in 1u64..=4) {
        let level = &levels()[l];
        let set = &level.set;
        let theta = theta_counts(set, n, Execution::Sequential);
        let alg = set.order.alg;
        for (i, c) in set.classes.iter().enumerate() {
            let prod = c.lattice.product(&c.lattice.conj(), &alg);
            let target = Ratio::from_integer(n as i128) * c.nrd * c.nrd;
            prop_assert_eq!(theta[i][i][n as usize], count_by_box(&prod, set.q(), target));
        }
    }

    #[test]
    fn classes_are_invariant_under_left_scaling(
        l in 0..PRIMES.len(),
        x in prop::array::uniform4(-3i128..=3),
        num in 1i128..=6,
        den in 1i128..=6,
    ) {
        prop_assume!(x != [0; 4]);
        let set = &levels()[l].set;
        let alg = set.order.alg;
        let alpha = Quat::new(x, 1).scale(Ratio::new(num, den));
        let mut moved = Vec::new();
        for (i, c) in set.classes.iter().enumerate() {
            let lattice = c.lattice.left_mul(&alpha, &alg);
            prop_assert_eq!(set.class_of(&RightIdeal::new(alg, lattice.clone())).unwrap(), i);
            moved.push(lattice);
        }
        let again = ShimuraSet::from_classes(set.order.clone(), moved).unwrap();
        prop_assert_eq!(&again.weights, &set.weights);
        prop_assert_eq!(brandt_matrices(&again, 6, Execution::Sequential).unwrap(), levels()[l].brandt[..6].to_vec());
    }

    #[test]
    fn constant_pairing(l in 0..PRIMES.len(), c in -50i128..=50) {
        let set = &levels()[l].set;
        let tau = ramified_involution(set).unwrap();
        let f = vec![c; set.len()];
        let p = pairings(&f, &f, set, &tau);
        let expected = Ratio::new(c * c * (set.q() as i128 - 1), 12);
        prop_assert_eq!(p.paren, expected);
        prop_assert_eq!(p.bracket, expected);
    }
}

#[test]
fn involution_is_an_involution() {
    for level in levels() {
        let tau = ramified_involution(&level.set).unwrap();
        for (i, &t) in tau.iter().enumerate() {
            assert_eq!(tau[t], i);
            assert_eq!(level.set.weights[t], level.set.weights[i]);
        }
    }
}

#[test]
fn cache_round_trip_for_every_level() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    for level in levels() {
        let q = level.set.q();
        cache.store_classes(&level.set).unwrap();
        let back = cache.load_classes(q).unwrap().unwrap();
        assert_eq!(back.classes, level.set.classes);
        assert_eq!(back.weights, level.set.weights);
        for b in &level.brandt[..12] {
            cache.store_brandt(q, b).unwrap();
            assert_eq!(&cache.load_brandt(q, b.n).unwrap().unwrap(), b);
        }
    }
    let dirs = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(dirs, PRIMES.len());
}
