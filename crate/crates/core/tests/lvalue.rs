// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use proptest::prelude::*;
use tpl_core::arith::{is_prime, kronecker};
use tpl_core::bqf::Discriminant;
use tpl_core::curve::EllipticCurveData;
use tpl_core::exec::Execution;
use tpl_core::lvalue::{central_lvalue, min_terms};

fn curve_37a1() -> EllipticCurveData {
    EllipticCurveData::new([0, 0, 1, -1, 0], 37, BTreeMap::from([(37, 1)])).unwrap()
}

/// Sign of the functional equation of the twist of `E` (conductor `n`, sign `w`)
/// by a fundamental discriminant `d` prime to `n`: `w chi_d(-n)`.
fn twisted_sign(w: i64, n: u64, d: i64) -> i64 {
    let sign = if d < 0 { -1 } else { 1 };
    w * kronecker(d, n) as i64 * sign
}

#[test]
fn frobenius_traces_agree_and_respect_hasse() {
    for curve in [EllipticCurveData::curve_11a1(), curve_37a1()] {
        for l in (2..400).filter(|&l| is_prime(l)) {
            let a = curve.ap(l).unwrap();
            assert_eq!(a, curve.ap_fast(l).unwrap(), "l = {l}");
            assert!((a * a) as u64 <= 4 * l);
        }
    }
}

#[test]
fn coefficients_are_multiplicative() {
    let a = EllipticCurveData::curve_11a1().an_list(600).unwrap();
    for m in 1..25usize {
        for n in 1..25usize {
            if num_integer::gcd(m, n) == 1 {
                assert_eq!(a[m * n], a[m] * a[n]);
            }
        }
    }
}

#[test]
fn untwisted_value_of_11a1() {
    let curve = EllipticCurveData::curve_11a1();
    let l = central_lvalue(&curve, 1, min_terms(11, 1e-14), Execution::Sequential).unwrap();
    assert!((l.value - 0.253_841_860_855_910_7).abs() < 1e-12, "{}", l.value);
    assert!(central_lvalue(&curve_37a1(), 1, 200, Execution::Sequential).is_err());
}

#[test]
fn tail_bound_shrinks_and_controls_the_error() {
    let curve = EllipticCurveData::curve_11a1();
    let exact = central_lvalue(&curve, -23, 4000, Execution::Sequential).unwrap();
    let mut last = f64::INFINITY;
    for terms in [140, 200, 400, 800] {
        let l = central_lvalue(&curve, -23, terms, Execution::Sequential).unwrap();
        assert!(l.tail_bound < last);
        assert!((l.value - exact.value).abs() <= l.tail_bound + exact.tail_bound);
        last = l.tail_bound;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn sequential_and_parallel_sums_match_bitwise(n in 3i64..600) {
        let Ok(d) = Discriminant::new(-n) else { return Ok(()) };
        let curve = EllipticCurveData::curve_11a1();
        let terms = min_terms(11 * (n * n) as u128, 1e-10);
        let seq = central_lvalue(&curve, d.value(), terms, Execution::Sequential);
        let par = central_lvalue(&curve, d.value(), terms, Execution::Parallel);
        match (seq, par) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.value.to_bits(), b.value.to_bits()),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn vanishing_sign_is_rejected(n in 3i64..2000, positive in any::<bool>()) {
        let n = if positive { -n } else { n };
        let Ok(d) = Discriminant::new(-n) else { return Ok(()) };
        prop_assume!(d.value() % 11 != 0);
        let curve = EllipticCurveData::curve_11a1();
        let sign = twisted_sign(1, 11, d.value());
        let result = central_lvalue(&curve, d.value(), min_terms(11 * (n * n) as u128, 1e-6), Execution::Sequential);
        prop_assert_eq!(result.is_ok(), sign == 1);
        if let Ok(l) = result {
            prop_assert_eq!(l.root_number, 1);
            prop_assert!(l.value >= -l.tail_bound);
        }
    }
}
