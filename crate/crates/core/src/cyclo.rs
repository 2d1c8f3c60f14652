// SPDX-License-Identifier: Apache-2.0

//! Exact arithmetic in `Z[zeta_n]` on the power basis `1, zeta, ..., zeta^{phi(n)-1}`.

use std::sync::Arc;

use serde::Serialize;

use crate::arith;
use crate::ffield::{FieldEmbedding, Fq};

/// The `n`-th cyclotomic polynomial, coefficients low to high.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i128> {
    // x^n - 1 divided by every Phi_d with d | n, d < n
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in arith::divisors(n) {
        if d == n {
            continue;
        }
        num = exact_div(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn exact_div(a: &[i128], m: &[i128]) -> Vec<i128> {
    let dm = m.len() - 1;
    assert_eq!(m[dm], 1);
    let mut r = a.to_vec();
    let mut q = vec![0i128; a.len() - dm];
    for i in (0..q.len()).rev() {
        let c = r[i + dm];
        q[i] = c;
        for (j, &mc) in m.iter().enumerate() {
            r[i + j] -= c * mc;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Shared description of `Z[zeta_n]`.
#[derive(Debug, PartialEq, Eq)]
pub struct CycloRing {
    pub n: u64,
    phi: Vec<i128>,
}

impl CycloRing {
    pub fn new(n: u64) -> Arc<Self> {
        Arc::new(CycloRing {
            n,
            phi: cyclotomic_polynomial(n),
        })
    }

    pub fn rank(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduce an arbitrary integer polynomial in `zeta` modulo `Phi_n`.
    pub fn reduce(self: &Arc<Self>, poly: &[i128]) -> CycloInt {
        let d = self.rank();
        let mut r = poly.to_vec();
        if r.len() < d {
            r.resize(d, 0);
        }
        for i in (d..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            for (j, &m) in self.phi.iter().enumerate() {
                r[i - d + j] -= c * m;
            }
        }
        r.truncate(d);
        CycloInt {
            ring: Arc::clone(self),
            coeffs: r,
        }
    }

    /// `sum_e weights[e] zeta^e` for a group-ring vector of length `n`.
    pub fn from_group_ring(self: &Arc<Self>, weights: &[i128]) -> CycloInt {
        debug_assert_eq!(weights.len(), self.n as usize);
        self.reduce(weights)
    }

    pub fn zeta_pow(self: &Arc<Self>, e: i64) -> CycloInt {
        let n = self.n as usize;
        let mut v = vec![0i128; n];
        v[e.rem_euclid(n as i64) as usize] = 1;
        self.reduce(&v)
    }

    pub fn from_int(self: &Arc<Self>, c: i128) -> CycloInt {
        self.reduce(&[c])
    }
}

/// Element of `Z[zeta_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloInt {
    #[serde(skip)]
    ring: Arc<CycloRing>,
    #[serde(serialize_with = "crate::serde_util::wide_vec::serialize")]
    pub coeffs: Vec<i128>,
}

impl CycloInt {
    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &CycloInt) -> CycloInt {
        debug_assert_eq!(self.ring.n, other.ring.n);
        CycloInt {
            ring: Arc::clone(&self.ring),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &CycloInt) -> CycloInt {
        debug_assert_eq!(self.ring.n, other.ring.n);
        let mut prod = vec![0i128; self.coeffs.len() + other.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        self.ring.reduce(&prod)
    }

    /// Image under the reduction map fixed by `emb`.
    pub fn reduce_mod(&self, emb: &FieldEmbedding) -> Fq {
        assert_eq!(emb.n, self.ring.n, "embedding built for a different root of unity");
        let f = &emb.field;
        let mut acc = f.zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                acc = f.add(&acc, &f.scale(emb.zeta_pow(i as i64), c));
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_has_order_n() {
        let r = CycloRing::new(15);
        let z = r.zeta_pow(1);
        let mut acc = r.from_int(1);
        for _ in 0..15 {
            acc = acc.mul(&z);
        }
        assert_eq!(acc, r.from_int(1));
        // 1 + zeta_3 + zeta_3^2 = 0 inside Z[zeta_15]
        let s = r.from_int(1).add(&r.zeta_pow(5)).add(&r.zeta_pow(10));
        assert!(s.is_zero());
    }

    #[test]
    fn reduction_is_a_ring_map_small_case() {
        let r = CycloRing::new(5);
        let emb = FieldEmbedding::new(2, 5).unwrap();
        let a = r.reduce(&[1, 2, 0, 3, 1]);
        let b = r.reduce(&[0, -1, 4]);
        let lhs = a.mul(&b).reduce_mod(&emb);
        let rhs = emb.field.mul(&a.reduce_mod(&emb), &b.reduce_mod(&emb));
        assert_eq!(lhs, rhs);
    }
}
