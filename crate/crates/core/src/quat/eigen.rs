// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::brandt::brandt_matrices;
use super::ideals::ShimuraSet;
use crate::curve::EllipticCurveData;
use crate::error::{certification, precondition, Result};
use crate::exec::Execution;

/// Primes used to cut out the eigenform by default.
pub const DEFAULT_PRIMES: [u64; 5] = [2, 3, 5, 7, 13];

/// Integer eigenvector of the Brandt operators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigenform {
    #[serde(with = "crate::serde_util::wide_vec")]
    pub coords: Vec<i128>,
    pub eigenvalues: BTreeMap<u64, i64>,
}

impl Eigenform {
    /// `gcd` of the coordinates.
    pub fn content(&self) -> i128 {
        self.coords.iter().fold(0i128, |g, &c| g.gcd(&c))
    }

    /// `sum_i v_i / w_i`, zero for a cusp form.
    pub fn weighted_sum(&self, weights: &[u64]) -> Ratio<i128> {
        self.coords
            .iter()
            .zip(weights)
            .map(|(&v, &w)| Ratio::new(v, w as i128))
            .sum()
    }

    /// Whether the reduction modulo `p` takes at least two values.
    pub fn nonconstant_mod(&self, p: u64) -> bool {
        let p = p as i128;
        let first = self.coords[0].rem_euclid(p);
        self.coords.iter().any(|c| c.rem_euclid(p) != first)
    }
}

/// Basis of the rational kernel of a matrix, as primitive integer vectors.
pub(crate) fn rational_kernel(rows: &[Vec<i128>], cols: usize) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<Ratio<i128>>> = rows.iter().map(|r| r.iter().map(|&v| Ratio::from_integer(v)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let pv = a[r][c];
        for k in 0..cols {
            a[r][k] /= pv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for k in 0..cols {
                    let v = a[r][k] * f;
                    a[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![Ratio::zero(); cols];
            v[fc] = Ratio::from_integer(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][fc];
            }
            let den = v.iter().fold(1i128, |l, x| l.lcm(x.denom()));
            let ints: Vec<i128> = v.iter().map(|x| (x * den).to_integer()).collect();
            let g = ints.iter().fold(0i128, |g, &x| g.gcd(&x));
            ints.into_iter().map(|x| x / g).collect()
        })
        .collect()
}

/// The common eigenvector with `B(l) v = a_l v` for the given primes,
/// scaled to content one with first nonzero coordinate positive.
pub fn eigenform_from_eigenvalues(set: &ShimuraSet, eigenvalues: &BTreeMap<u64, i64>, p: u64) -> Result<Eigenform> {
    let h = set.len();
    let nmax = *eigenvalues.keys().max().ok_or_else(|| precondition!("no primes given"))?;
    let bs = brandt_matrices(set, nmax, Execution::default())?;
    let mut rows = Vec::new();
    for (&l, &a) in eigenvalues {
        let b = &bs[l as usize - 1];
        for i in 0..h {
            rows.push((0..h).map(|j| b.entries[i][j] as i128 - if i == j { a as i128 } else { 0 }).collect());
        }
    }
    let kernel = rational_kernel(&rows, h);
    if kernel.len() != 1 {
        return Err(certification!("eigenspace has dimension {}, expected 1", kernel.len()));
    }
    let mut coords = kernel.into_iter().next().expect("one vector");
    if coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        coords.iter_mut().for_each(|c| *c = -*c);
    }
    let f = Eigenform {
        coords,
        eigenvalues: eigenvalues.clone(),
    };
    if f.content() % p as i128 == 0 {
        return Err(certification!("eigenform content divisible by {p}"));
    }
    for (&l, &a) in eigenvalues {
        let bv = bs[l as usize - 1].apply(&f.coords);
        if bv.iter().zip(&f.coords).any(|(&x, &v)| x != a as i128 * v) {
            return Err(certification!("B({l}) v != a_{l} v"));
        }
    }
    Ok(f)
}

/// The eigenform matching the traces of Frobenius of `curve` at `primes`
/// (primes equal to the conductor are skipped).
pub fn eigenform(set: &ShimuraSet, curve: &EllipticCurveData, p: u64, primes: &[u64]) -> Result<Eigenform> {
    if curve.conductor != set.q() {
        return Err(precondition!("curve conductor {} differs from q = {}", curve.conductor, set.q()));
    }
    let mut eig = BTreeMap::new();
    for &l in primes.iter().filter(|&&l| l != set.q()) {
        eig.insert(l, curve.ap(l)?);
    }
    eigenform_from_eigenvalues(set, &eig, p)
}
