// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd};
use crate::error::{certification, precondition, Result};

/// The algebra `(a, b)_Q`: `i^2 = a`, `j^2 = b`, `k = ij = -ji`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    /// The finite ramified prime.
    pub q: u64,
}

/// `x = (x0 + x1 i + x2 j + x3 k) / den` with `den > 0` and no common factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Quat {
    pub num: [i128; 4],
    pub den: i128,
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x0, x1, x2, x3] = self.num;
        write!(f, "({x0} + {x1}i + {x2}j + {x3}k)/{}", self.den)
    }
}

impl Quat {
    pub fn new(num: [i128; 4], den: i128) -> Self {
        assert!(den != 0);
        let g = num.iter().fold(den, |g, &x| gcd(g, x)) * den.signum();
        Quat {
            num: num.map(|x| x / g),
            den: den / g,
        }
    }

    pub fn from_int(n: i128) -> Self {
        Quat::new([n, 0, 0, 0], 1)
    }

    pub fn conj(&self) -> Quat {
        let [x0, x1, x2, x3] = self.num;
        Quat {
            num: [x0, -x1, -x2, -x3],
            den: self.den,
        }
    }

    pub fn add(&self, o: &Quat) -> Quat {
        let mut num = [0i128; 4];
        for (i, n) in num.iter_mut().enumerate() {
            *n = self.num[i] * o.den + o.num[i] * self.den;
        }
        Quat::new(num, self.den * o.den)
    }

    pub fn scale(&self, s: Ratio<i128>) -> Quat {
        Quat::new(self.num.map(|x| x * s.numer()), self.den * s.denom())
    }
}

impl QuaternionAlgebra {
    /// Product of integer coordinate vectors.
    pub fn mul_raw(&self, x: &[i128; 4], y: &[i128; 4]) -> [i128; 4] {
        let (a, b) = (self.a as i128, self.b as i128);
        let [x0, x1, x2, x3] = *x;
        let [y0, y1, y2, y3] = *y;
        [
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ]
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        Quat::new(self.mul_raw(&x.num, &y.num), x.den * y.den)
    }

    /// Reduced norm of an integer coordinate vector.
    pub fn nrd_raw(&self, x: &[i128; 4]) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3]
    }

    /// `trd(x conj(y))` for integer coordinate vectors.
    pub fn bilinear_raw(&self, x: &[i128; 4], y: &[i128; 4]) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        2 * (x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] + a * b * x[3] * y[3])
    }

    pub fn nrd(&self, x: &Quat) -> Ratio<i128> {
        Ratio::new(self.nrd_raw(&x.num), x.den * x.den)
    }

    pub fn trd(&self, x: &Quat) -> Ratio<i128> {
        Ratio::new(2 * x.num[0], x.den)
    }

    pub fn inverse(&self, x: &Quat) -> Quat {
        let n = self.nrd(x);
        assert!(*n.numer() != 0, "zero has no inverse");
        x.conj().scale(n.recip())
    }

    /// Finite places and infinity (encoded as 0) where the algebra ramifies.
    pub fn ramified_places(&self) -> Vec<u64> {
        let mut places = vec![2u64];
        places.extend(arith::prime_divisors(self.a.unsigned_abs()));
        places.extend(arith::prime_divisors(self.b.unsigned_abs()));
        places.sort_unstable();
        places.dedup();
        let mut out: Vec<u64> = places
            .into_iter()
            .filter(|&p| arith::hilbert_symbol(self.a, self.b, p) == -1)
            .collect();
        if arith::hilbert_symbol(self.a, self.b, 0) == -1 {
            out.insert(0, 0);
        }
        out
    }
}

/// The definite algebra ramified exactly at `{q, oo}`.
pub fn build_algebra(q: u64) -> Result<QuaternionAlgebra> {
    if !arith::is_prime(q) {
        return Err(precondition!("q = {q} is not prime"));
    }
    let qi = q as i64;
    let (a, b) = match q % 8 {
        2 => (-1, -1),
        3 | 7 => (-1, -qi),
        5 => (-2, -qi),
        _ => {
            let r = (3u64..)
                .step_by(4)
                .find(|&r| arith::is_prime(r) && arith::legendre(r as i64, q) == -1)
                .expect("a non-residue prime r = 3 mod 4 exists");
            (-(r as i64), -qi)
        }
    };
    let alg = QuaternionAlgebra { a, b, q };
    let ram = alg.ramified_places();
    if ram != vec![0, q] {
        return Err(certification!(
            "algebra ({a},{b}) ramifies at {ram:?}, expected {{oo, {q}}}"
        ));
    }
    Ok(alg)
}
