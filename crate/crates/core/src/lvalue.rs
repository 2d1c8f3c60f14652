// SPDX-License-Identifier: Apache-2.0

//! Central values `L(E_D, 1)` of quadratic twists by a rapidly converging
//! exponentially smoothed sum.

use serde::Serialize;

use crate::arith;
use crate::curve::EllipticCurveData;
use crate::error::{precondition, Result};
use crate::exec::Execution;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LValue {
    /// Twisting discriminant, `1` for the untwisted curve.
    pub twist: i64,
    pub terms: usize,
    pub value: f64,
    /// Bound on the omitted tail of the series.
    pub tail_bound: f64,
    pub root_number: i64,
    pub conductor: u128,
}

/// `L(E_D, 1) = 2 sum_n a_n chi_D(n) / n exp(-2 pi n / sqrt(N D^2))`, valid
/// when the root number of the twist is `+1`.
pub fn central_lvalue(curve: &EllipticCurveData, twist: i64, terms: usize, exec: Execution) -> Result<LValue> {
    let n = curve.conductor;
    if twist != 1 {
        if !crate::bqf::Discriminant::is_fundamental(twist) {
            return Err(precondition!("twist {twist} is not a fundamental discriminant"));
        }
        if twist.unsigned_abs().is_multiple_of(n) {
            return Err(precondition!("twist {twist} is not coprime to the conductor {n}"));
        }
    }
    let chi = |m: u64| if twist == 1 { 1 } else { arith::kronecker(twist, m) as i64 };
    let eps = curve.root_number()? * chi(n) * if twist < 0 { -1 } else { 1 };
    if eps != 1 {
        return Err(precondition!("root number of the twist by {twist} is {eps}; the central value vanishes"));
    }
    let conductor = n as u128 * (twist as i128 * twist as i128) as u128;
    let c = 2.0 * std::f64::consts::PI / (conductor as f64).sqrt();
    let tail_bound = 4.0 * (-c * (terms as f64 + 1.0)).exp() / (1.0 - (-c).exp());
    if terms == 0 || tail_bound > 1e-3 {
        return Err(precondition!(
            "{terms} terms leave a tail bound of {tail_bound:.3e}; at least {} are needed",
            min_terms(conductor, 1e-3)
        ));
    }
    let a = curve.an_list(terms)?;
    // fixed-size chunks summed in order, so the result does not depend on threads
    const CHUNK: usize = 1024;
    let chunks = terms.div_ceil(CHUNK);
    let partial = exec.map_range(0..chunks, |k| {
        let lo = k * CHUNK + 1;
        let hi = ((k + 1) * CHUNK).min(terms);
        (lo..=hi)
            .map(|m| {
                let coef = a[m] * chi(m as u64);
                if coef == 0 {
                    0.0
                } else {
                    coef as f64 / m as f64 * (-c * m as f64).exp()
                }
            })
            .sum::<f64>()
    });
    let value = 2.0 * partial.iter().sum::<f64>();
    Ok(LValue {
        twist,
        terms,
        value,
        tail_bound,
        root_number: eps,
        conductor,
    })
}

/// Fewest terms whose tail bound is below `tol`.
pub fn min_terms(conductor: u128, tol: f64) -> usize {
    let c = 2.0 * std::f64::consts::PI / (conductor as f64).sqrt();
    let t = ((4.0 / (tol * (1.0 - (-c).exp()))).ln() / c - 1.0).ceil();
    t.max(1.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Consistency {
    Consistent,
    Inconclusive,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaldspurgerReport {
    pub twist: i64,
    /// `h P_f(1) = sum_sigma f(x_sigma)`.
    #[serde(serialize_with = "crate::serde_util::wide::serialize")]
    pub period_sum: i128,
    pub l_product: f64,
    pub tolerance: f64,
    pub outcome: Consistency,
}

/// `P_f(1) != 0` against `L(E, 1) L(E_D, 1)` exceeding ten times its error bound.
pub fn waldspurger_consistency(period_sum: i128, base: &LValue, twisted: &LValue) -> WaldspurgerReport {
    let l_product = base.value * twisted.value;
    let err = base.tail_bound * twisted.value.abs() + twisted.tail_bound * base.value.abs() + base.tail_bound * twisted.tail_bound;
    let tolerance = 10.0 * err.max(f64::EPSILON * l_product.abs().max(1.0));
    let above = l_product.abs() > tolerance;
    let outcome = match (period_sum != 0, above) {
        (true, true) | (false, false) => Consistency::Consistent,
        (true, false) => Consistency::Inconclusive,
        (false, true) => Consistency::Inconsistent,
    };
    WaldspurgerReport {
        twist: twisted.twist,
        period_sum,
        l_product,
        tolerance,
        outcome,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_11a1() {
        let e = EllipticCurveData::curve_11a1();
        let l = central_lvalue(&e, 1, 1000, Execution::Sequential).unwrap();
        assert!((l.value - 0.2538418608559).abs() < 1e-10, "{}", l.value);
        let l2 = central_lvalue(&e, 1, 2000, Execution::Parallel).unwrap();
        assert!((l.value - l2.value).abs() <= l.tail_bound + 1e-15);
    }

    #[test]
    fn twist_root_numbers() {
        let e = EllipticCurveData::curve_11a1();
        // 11 inert in Q(sqrt -23): sign +1
        assert!(central_lvalue(&e, -23, 3000, Execution::Sequential).is_ok());
        // 11 split in Q(sqrt -7): sign -1
        assert!(central_lvalue(&e, -7, 3000, Execution::Sequential).is_err());
        assert!(central_lvalue(&e, 1, 3, Execution::Sequential).is_err());
    }
}
