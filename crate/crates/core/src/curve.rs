// SPDX-License-Identifier: Apache-2.0

//! Elliptic curves over `Q` in long Weierstrass form and their traces of
//! Frobenius.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{invalid, precondition, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurveData {
    /// `[a1, a2, a3, a4, a6]`.
    pub coeffs: [i64; 5],
    pub conductor: u64,
    /// Tamagawa numbers `c_l` at primes dividing the conductor.
    pub tamagawa: BTreeMap<u64, u64>,
    /// The factors `d_l`, defaulting to 1.
    pub d_factors: BTreeMap<u64, u64>,
}

/// Weierstrass coefficients parsed from `a1,a2,a3,a4,a6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coefficients(pub [i64; 5]);

impl FromStr for Coefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| invalid!("bad curve coefficients {s:?}: {e}"))?;
        let arr: [i64; 5] = parts
            .try_into()
            .map_err(|_| invalid!("expected five coefficients a1,a2,a3,a4,a6, got {s:?}"))?;
        Ok(Coefficients(arr))
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.0;
        write!(f, "{a1},{a2},{a3},{a4},{a6}")
    }
}

/// Reduction type at a prime dividing the discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    Good,
    Split,
    NonSplit,
    Additive,
}

impl EllipticCurveData {
    /// The curve with coefficients `coeffs` and prime conductor `conductor`,
    /// checked against the minimal discriminant.
    pub fn new(coeffs: [i64; 5], conductor: u64, tamagawa: BTreeMap<u64, u64>) -> Result<Self> {
        let curve = EllipticCurveData {
            coeffs,
            conductor,
            tamagawa,
            d_factors: BTreeMap::new(),
        };
        let disc = curve.discriminant();
        if disc == 0 {
            return Err(invalid!("singular Weierstrass equation {}", Coefficients(coeffs)));
        }
        if !arith::is_prime(conductor) {
            return Err(precondition!("conductor {conductor} is not prime"));
        }
        if !disc.unsigned_abs().is_multiple_of(conductor as u128) {
            return Err(invalid!("conductor {conductor} does not divide the discriminant {disc}"));
        }
        Ok(curve)
    }

    /// The curve 11a1 with `c_11 = 5`.
    pub fn curve_11a1() -> Self {
        EllipticCurveData::new([0, -1, 1, -10, -20], 11, BTreeMap::from([(11, 5)])).expect("11a1")
    }

    pub fn b_invariants(&self) -> [i128; 4] {
        let [a1, a2, a3, a4, a6] = self.coeffs.map(i128::from);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> i128 {
        let [b2, b4, b6, b8] = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    fn reduced(&self, l: u64) -> [u64; 5] {
        self.coeffs.map(|a| a.rem_euclid(l as i64) as u64)
    }

    /// `F(x, y) = y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6` modulo `l`.
    fn equation_mod(&self, l: u64, x: u64, y: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = self.reduced(l);
        let lhs = (y * y + a1 * x % l * y + a3 * y) % l;
        let rhs = (x * x % l * x + a2 * x % l * x + a4 * x + a6) % l;
        (lhs + l - rhs) % l
    }

    /// Number of projective points over `F_l` by looping over all `(x, y)`.
    pub fn count_points_exhaustive(&self, l: u64) -> u64 {
        let mut n = 1;
        for x in 0..l {
            for y in 0..l {
                if self.equation_mod(l, x, y) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    /// Number of projective points over `F_l` by completing the square and
    /// summing quadratic characters over `x`.
    pub fn count_points_character_sum(&self, l: u64) -> u64 {
        if l == 2 {
            // no square roots to take: count y directly per x
            return 1 + (0..2).map(|x| (0..2).filter(|&y| self.equation_mod(2, x, y) == 0).count() as u64).sum::<u64>();
        }
        let mut is_square = vec![false; l as usize];
        for y in 0..l {
            is_square[(y * y % l) as usize] = true;
        }
        let [a1, a2, a3, a4, a6] = self.reduced(l);
        let mut n = 1i64;
        for x in 0..l {
            // (2y + a1 x + a3)^2 = 4 (x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2
            let s = (a1 * x + a3) % l;
            let cubic = (x * x % l * x + a2 * x % l * x + a4 * x + a6) % l;
            let d = ((4 * cubic) % l + s * s) % l;
            n += if d == 0 {
                1
            } else if is_square[d as usize] {
                2
            } else {
                0
            };
        }
        n as u64
    }

    /// Reduction type at `l`, read off the tangent cone at the singular point.
    pub fn reduction_type(&self, l: u64) -> Reduction {
        if !self.discriminant().unsigned_abs().is_multiple_of(l as u128) {
            return Reduction::Good;
        }
        let [a1, a2, a3, a4, _] = self.reduced(l);
        // singular point: F = F_x = F_y = 0
        let sing = (0..l)
            .flat_map(|x| (0..l).map(move |y| (x, y)))
            .find(|&(x, y)| {
                let fx = (a1 * y + 3 * (l - x * x % l) + 2 * (l - a2 * x % l) + (l - a4)) % l;
                let fy = (2 * y + a1 * x + a3) % l;
                self.equation_mod(l, x, y) == 0 && fx == 0 && fy == 0
            })
            .expect("a singular curve has a singular point");
        let x0 = sing.0;
        // tangent cone: v^2 + a1 uv - (3 x0 + a2) u^2
        let c = (3 * x0 + a2) % l;
        if l == 2 {
            return match (a1 % 2, c % 2) {
                (0, _) => Reduction::Additive,
                (_, 0) => Reduction::Split,
                _ => Reduction::NonSplit,
            };
        }
        let disc = (a1 * a1 + 4 * c) % l;
        if disc == 0 {
            Reduction::Additive
        } else if arith::legendre(disc as i64, l) == 1 {
            Reduction::Split
        } else {
            Reduction::NonSplit
        }
    }

    /// Trace of Frobenius at the prime `l`; `+1` or `-1` at multiplicative primes.
    pub fn ap(&self, l: u64) -> Result<i64> {
        self.ap_with(l, Self::count_points_exhaustive)
    }

    /// Same value as [`Self::ap`], counted by character sums: linear in `l`.
    pub fn ap_fast(&self, l: u64) -> Result<i64> {
        self.ap_with(l, Self::count_points_character_sum)
    }

    fn ap_with(&self, l: u64, count: fn(&Self, u64) -> u64) -> Result<i64> {
        if !arith::is_prime(l) {
            return Err(precondition!("{l} is not prime"));
        }
        match self.reduction_type(l) {
            Reduction::Good => Ok(l as i64 + 1 - count(self, l) as i64),
            Reduction::Split => Ok(1),
            Reduction::NonSplit => Ok(-1),
            Reduction::Additive => Err(precondition!("additive reduction at {l}")),
        }
    }

    /// Global root number, from the local signs at the prime conductor.
    pub fn root_number(&self) -> Result<i64> {
        // w = w_inf * w_N = (-1)(-a_N)
        self.ap(self.conductor)
    }

    /// Dirichlet coefficients `a_1..=a_n` of `L(E, s)`.
    pub fn an_list(&self, n: usize) -> Result<Vec<i64>> {
        let mut a = vec![0i64; n + 1];
        if n == 0 {
            return Ok(a);
        }
        a[1] = 1;
        for p in arith::primes_up_to(n as u64) {
            let ap = self.ap_fast(p)?;
            let p = p as usize;
            let good = self.conductor as usize != p;
            // a_{p^k}
            let mut powers = vec![1i64, ap];
            let mut pk = p;
            while pk <= n / p {
                pk *= p;
                let next = if good {
                    ap * powers[powers.len() - 1] - p as i64 * powers[powers.len() - 2]
                } else {
                    ap * powers[powers.len() - 1]
                };
                powers.push(next);
            }
            // multiply into every m coprime to p already filled
            for m in (1..=n).rev() {
                if m % p == 0 || a[m] == 0 {
                    continue;
                }
                let mut pk = p;
                let mut k = 1;
                while m * pk <= n {
                    a[m * pk] = a[m] * powers[k];
                    pk *= p;
                    k += 1;
                }
            }
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_11a1_traces() {
        let e = EllipticCurveData::curve_11a1();
        assert_eq!(e.discriminant(), -161051);
        assert_eq!(e.count_points_exhaustive(2), 5);
        assert_eq!(e.ap(2).unwrap(), -2);
        assert_eq!(e.ap(3).unwrap(), -1);
        assert_eq!(e.ap(5).unwrap(), 1);
        assert_eq!(e.ap(7).unwrap(), -2);
        assert_eq!(e.ap(11).unwrap(), 1);
        assert_eq!(e.reduction_type(11), Reduction::Split);
        assert_eq!(e.root_number().unwrap(), 1);
    }

    #[test]
    fn two_counting_methods_agree() {
        let e = EllipticCurveData::curve_11a1();
        for l in arith::primes_up_to(50) {
            assert_eq!(e.ap(l).unwrap(), e.ap_fast(l).unwrap(), "l = {l}");
        }
    }

    #[test]
    fn an_list_is_multiplicative() {
        let e = EllipticCurveData::curve_11a1();
        let a = e.an_list(100).unwrap();
        // q-expansion of eta(z)^2 eta(11z)^2
        assert_eq!(a[1..=12], [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2]);
        assert_eq!(a[6], a[2] * a[3]);
        assert_eq!(a[4], a[2] * a[2] - 2);
        assert_eq!(a[99], a[9] * a[11]);
    }

    #[test]
    fn parse_coefficients() {
        let c: Coefficients = "0,-1,1,-10,-20".parse().unwrap();
        assert_eq!(c.0, [0, -1, 1, -10, -20]);
        assert!("0,1".parse::<Coefficients>().is_err());
    }
}
