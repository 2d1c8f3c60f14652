// SPDX-License-Identifier: Apache-2.0

//! Finite fields `F_{p^k}` as `F_p[x]/(m(x))`, and the deterministic choice of
//! an `n`-th root of unity that fixes the prime above `p` used for reduction.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{precondition, Result};

/// Element of `F_{p^k}`: coefficients of a polynomial of degree `< k`, low to high.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fq(pub Vec<u64>);

impl Fq {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", terms.join(","))
    }
}

/// Arithmetic in `F_p[x]/(modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    k: usize,
    /// Monic modulus, `k + 1` coefficients low to high.
    modulus: Vec<u64>,
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = arith::mod_inv(m[dm] as i64, p as i64).expect("nonzero lead") as u64;
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let coef = r[r.len() - 1] * lead_inv % p;
        for (i, &mc) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - coef * mc % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: `f` of degree `k` is irreducible iff `gcd(f, x^{p^i} - x) = 1`
/// for `1 <= i <= k/2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    let field = GaloisField {
        p,
        k,
        modulus: f.to_vec(),
    };
    let x = field.reduce(&[0, 1]);
    let mut xp = x.clone();
    for _ in 0..k / 2 {
        xp = field.pow_u64(&xp, p);
        let mut diff = xp.0.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl GaloisField {
    /// The field of size `p^k` whose modulus is the smallest monic irreducible
    /// polynomial of degree `k`, comparing coefficients from the constant term up.
    pub fn new(p: u64, k: usize) -> Self {
        assert!(arith::is_prime(p) && k >= 1);
        // Enumerate coefficient vectors (c_0, ..., c_{k-1}) lexicographically.
        let mut digits = vec![0u64; k];
        if k >= 2 {
            // c_0 = 0 means x divides f
            digits[0] = 1;
        }
        loop {
            let mut f = digits.clone();
            f.push(1);
            if is_irreducible(&f, p) {
                return GaloisField { p, k, modulus: f };
            }
            // increment, c_{k-1} fastest so that c_0 is most significant
            let mut i = k;
            loop {
                i -= 1;
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                assert!(i > 0, "an irreducible polynomial of every degree exists");
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> BigUint {
        BigUint::from(self.p).pow(self.k as u32)
    }

    fn reduce(&self, a: &[u64]) -> Fq {
        let mut r = poly_rem(a, &self.modulus, self.p);
        r.resize(self.k, 0);
        Fq(r)
    }

    pub fn zero(&self) -> Fq {
        Fq(vec![0; self.k])
    }

    pub fn one(&self) -> Fq {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i128) -> Fq {
        let mut v = vec![0u64; self.k];
        v[0] = n.rem_euclid(self.p as i128) as u64;
        Fq(v)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(a.0.iter().zip(&b.0).map(|(x, y)| (x + self.p - y) % self.p).collect())
    }

    pub fn scale(&self, a: &Fq, s: i128) -> Fq {
        let s = s.rem_euclid(self.p as i128) as u64;
        Fq(a.0.iter().map(|x| x * s % self.p).collect())
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        self.reduce(&poly_mul(&a.0, &b.0, self.p))
    }

    pub fn pow_u64(&self, a: &Fq, mut e: u64) -> Fq {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: &Fq, e: &BigUint) -> Fq {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if a.is_zero() {
            return None;
        }
        let e = self.size() - BigUint::from(2u32);
        Some(self.pow(a, &e))
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: &Fq) -> Fq {
        self.pow_u64(a, self.p)
    }

    /// Element with index `idx` in the enumeration order used for generator
    /// search (constant coefficient most significant).
    fn element_at(&self, mut idx: u128) -> Fq {
        let mut v = vec![0u64; self.k];
        for i in (0..self.k).rev() {
            v[i] = (idx % self.p as u128) as u64;
            idx /= self.p as u128;
        }
        Fq(v)
    }

    /// Size of the smallest subfield containing every given element.
    pub fn generated_subfield_size(&self, values: &[Fq]) -> BigUint {
        for d in arith::divisors(self.k as u64) {
            let fixed = values.iter().all(|v| {
                let mut w = v.clone();
                for _ in 0..d {
                    w = self.frobenius(&w);
                }
                &w == v
            });
            if fixed {
                return BigUint::from(self.p).pow(d as u32);
            }
        }
        self.size()
    }
}

/// The reduction map `Z[zeta_n] -> F_{p^k}`, `zeta_n -> zeta_image`, which
/// singles out one prime of `Q(zeta_n)` above `p`.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    pub p: u64,
    pub n: u64,
    pub k: usize,
    pub field: GaloisField,
    pub zeta_image: Fq,
    powers: Vec<Fq>,
}

impl FieldEmbedding {
    /// Deterministic construction: the modulus is chosen by [`GaloisField::new`]
    /// and `zeta_image = g^{(p^k - 1)/n}` for the first `g` in enumeration order
    /// for which this power has exact order `n`.
    pub fn new(p: u64, n: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(precondition!("{p} is not prime"));
        }
        if n == 0 || n.is_multiple_of(p) {
            return Err(precondition!("p = {p} divides the value order n = {n}"));
        }
        let k = arith::mult_order(p % n, n) as usize;
        let k = k.max(1);
        let field = GaloisField::new(p, k);
        let group_order = field.size() - BigUint::one();
        let cofactor = &group_order / BigUint::from(n);
        let n_primes = arith::prime_divisors(n);
        let mut idx: u128 = 1;
        let zeta = loop {
            let g = field.element_at(idx);
            idx += 1;
            if g.is_zero() {
                continue;
            }
            let z = field.pow(&g, &cofactor);
            let exact = n_primes
                .iter()
                .all(|&r| field.pow_u64(&z, n / r) != field.one());
            if exact {
                break z;
            }
        };
        debug_assert!(!cofactor.is_zero());
        let mut powers = Vec::with_capacity(n as usize);
        let mut acc = field.one();
        for _ in 0..n {
            powers.push(acc.clone());
            acc = field.mul(&acc, &zeta);
        }
        debug_assert_eq!(acc, field.one());
        Ok(FieldEmbedding {
            p,
            n,
            k,
            field,
            zeta_image: zeta,
            powers,
        })
    }

    /// Image of `zeta_n^e`.
    pub fn zeta_pow(&self, e: i64) -> &Fq {
        &self.powers[e.rem_euclid(self.n as i64) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_cube_root() {
        let emb = FieldEmbedding::new(7, 3).unwrap();
        assert_eq!(emb.k, 1);
        let z = &emb.zeta_image;
        assert_ne!(z, &emb.field.one());
        assert_eq!(emb.field.pow_u64(z, 3), emb.field.one());
        // the first candidate g = 1 gives 1, g = 2 gives 2^2 = 4
        assert_eq!(z.0, vec![4]);
    }

    #[test]
    fn order_five_over_f2() {
        let emb = FieldEmbedding::new(2, 5).unwrap();
        assert_eq!(emb.k, 4);
        assert_eq!(emb.field.size(), BigUint::from(16u32));
        let f = &emb.field;
        let z = &emb.zeta_image;
        assert_ne!(f.pow_u64(z, 1), f.one());
        assert_eq!(f.pow_u64(z, 5), f.one());
        // smallest monic irreducible quartic over F_2, constant term first: 1 + x^3 + x^4
        assert_eq!(f.modulus(), &[1, 0, 0, 1, 1]);
    }

    #[test]
    fn deterministic_construction() {
        let a = FieldEmbedding::new(7, 15).unwrap();
        let b = FieldEmbedding::new(7, 15).unwrap();
        assert_eq!(a.field, b.field);
        assert_eq!(a.zeta_image, b.zeta_image);
    }

    #[test]
    fn rejects_p_dividing_n() {
        assert!(FieldEmbedding::new(3, 6).is_err());
        assert!(FieldEmbedding::new(4, 3).is_err());
    }

    #[test]
    fn field_inverse() {
        let f = GaloisField::new(3, 3);
        let a = Fq(vec![2, 1, 1]);
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
        assert!(f.inv(&f.zero()).is_none());
    }

    #[test]
    fn subfield_generated_by_prime_field_values() {
        let emb = FieldEmbedding::new(7, 5).unwrap();
        let vals = vec![emb.field.from_int(3), emb.field.from_int(-2)];
        assert_eq!(emb.field.generated_subfield_size(&vals), BigUint::from(7u32));
        let vals = vec![emb.zeta_image.clone()];
        assert_eq!(emb.field.generated_subfield_size(&vals), emb.field.size());
    }
}
