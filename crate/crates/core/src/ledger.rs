// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith;
use crate::curve::EllipticCurveData;
use crate::error::{invalid, precondition, Result};
use crate::quat::ShimuraSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerReport {
    pub excluded_primes: BTreeSet<u64>,
    pub ideal_i_gcd: IdealGcd,
    pub kolyvagin_exponent: u64,
    pub sha_exponent: i64,
}

/// Prime divisors of `6 N prod_{l | N} (l^2 - 1) c_l d_l`.
pub fn excluded_primes(curve: &EllipticCurveData) -> Result<BTreeSet<u64>> {
    let mut out: BTreeSet<u64> = BTreeSet::from([2, 3]);
    for l in arith::prime_divisors(curve.conductor) {
        let c = *curve
            .tamagawa
            .get(&l)
            .ok_or_else(|| invalid!("missing Tamagawa number c_{l}"))?;
        let d = curve.d_factors.get(&l).copied().unwrap_or(1);
        out.insert(l);
        for m in [l - 1, l + 1, c, d] {
            out.extend(arith::prime_divisors(m));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealGcd {
    pub value: u64,
    pub bound: u64,
    /// Last prime at which the running gcd changed.
    pub stabilized_at: u64,
}

/// `gcd { l + 1 - a_l : l <= bound prime, l not dividing N }`.
pub fn ideal_i_gcd(curve: &EllipticCurveData, bound: u64) -> Result<IdealGcd> {
    if bound < 3 {
        return Err(precondition!("prime bound {bound} is below 3"));
    }
    let mut g = 0u64;
    let mut stabilized_at = 2;
    for l in arith::primes_up_to(bound) {
        if curve.conductor.is_multiple_of(l) {
            continue;
        }
        let v = (l as i64 + 1 - curve.ap(l)?).unsigned_abs();
        let next = g.gcd(&v);
        if next != g {
            stabilized_at = l;
        }
        g = next;
    }
    Ok(IdealGcd {
        value: g,
        bound,
        stabilized_at,
    })
}

/// The flags `C_2, C_4, C_5, C_6, C_7, C_8`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KolyvaginFlags {
    pub c2: i64,
    pub c4: i64,
    pub c5: i64,
    pub c6: i64,
    pub c7: i64,
    pub c8: i64,
}

/// `3 C2 + 12 C4 + C5 + C6 + C7 + C8 + v_p(I h) + v_p(h)`.
pub fn kolyvagin_exponent(flags: KolyvaginFlags, ideal_i: i64, class_number: i64, p: u64) -> Result<u64> {
    let f = [flags.c2, flags.c4, flags.c5, flags.c6, flags.c7, flags.c8];
    if f.iter().any(|&c| c < 0) || ideal_i < 0 || class_number < 0 {
        return Err(invalid!("negative input to the Kolyvagin exponent"));
    }
    if ideal_i == 0 || class_number == 0 {
        return Err(invalid!("I and h must be nonzero"));
    }
    let v = |n: i64| arith::valuation(n as i128, p as i128) as u64;
    let weights = [3, 12, 1, 1, 1, 1];
    let lin: u64 = f.iter().zip(weights).map(|(&c, w)| c as u64 * w).sum();
    Ok(lin + v(ideal_i) + v(class_number) + v(class_number))
}

/// `2 ord(P) - 2 sum ord_p(c_l)` over the split Tamagawa factors.
pub fn sha_exponent(ord_period: i64, split_tamagawa_ords: &[i64]) -> i64 {
    2 * ord_period - 2 * split_tamagawa_ords.iter().sum::<i64>()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pairings {
    /// `sum_x f1(x) f2(x tau) / w_x`.
    #[serde(with = "crate::serde_util::ratio")]
    pub bracket: Ratio<i128>,
    /// `sum_x f1(x) f2(x) / w_x`.
    #[serde(with = "crate::serde_util::ratio")]
    pub paren: Ratio<i128>,
}

pub fn pairings(f1: &[i128], f2: &[i128], set: &ShimuraSet, tau: &[usize]) -> Pairings {
    let w = |i: usize| Ratio::from_integer(set.weights[i] as i128);
    let bracket = (0..set.len()).map(|i| Ratio::from_integer(f1[i] * f2[tau[i]]) / w(i)).sum();
    let paren = (0..set.len()).map(|i| Ratio::from_integer(f1[i] * f2[i]) / w(i)).sum();
    Pairings { bracket, paren }
}
