// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::enumerate::ShortVectors;
use super::ideals::ShimuraSet;
use crate::error::{certification, Result};
use crate::exec::Execution;

/// Hecke operator `T_n` on functions on the class set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtMatrix {
    pub n: u64,
    pub entries: Vec<Vec<u64>>,
    /// `q | n`: computed, but outside the range of the usual identities.
    pub ramified: bool,
}

impl BrandtMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    /// `B v` for a column vector `v`.
    pub fn apply(&self, v: &[i128]) -> Vec<i128> {
        self.entries
            .iter()
            .map(|r| r.iter().zip(v).map(|(&b, &x)| b as i128 * x).sum())
            .collect()
    }

    pub fn mul(&self, other: &BrandtMatrix) -> Vec<Vec<u64>> {
        let h = self.size();
        (0..h)
            .map(|i| (0..h).map(|j| (0..h).map(|k| self.entries[i][k] * other.entries[k][j]).sum()).collect())
            .collect()
    }
}

/// `theta[i][j][n]` = number of `x` in `I_i conj(I_j)` with
/// `nrd(x) = n nrd(I_i) nrd(I_j)`, for `n <= nmax`.
pub fn theta_counts(set: &ShimuraSet, nmax: u64, exec: Execution) -> Vec<Vec<Vec<u64>>> {
    let h = set.len();
    let pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).collect();
    let alg = set.order.alg;
    let counts = exec.map(&pairs, |&(i, j)| {
        let l = set.classes[i].lattice.product(&set.classes[j].lattice.conj(), &alg);
        let sv = ShortVectors::new(&l.normalized_gram(&alg));
        let c = sv.counts(2 * nmax as i128);
        (0..=nmax as usize).map(|n| c[2 * n]).collect::<Vec<u64>>()
    });
    let mut theta = vec![vec![Vec::new(); h]; h];
    for (&(i, j), c) in pairs.iter().zip(counts) {
        theta[j][i] = c.clone();
        theta[i][j] = c;
    }
    theta
}

/// `B(1), ..., B(nmax)`.
pub fn brandt_matrices(set: &ShimuraSet, nmax: u64, exec: Execution) -> Result<Vec<BrandtMatrix>> {
    let theta = theta_counts(set, nmax, exec);
    let h = set.len();
    (1..=nmax)
        .map(|n| {
            let mut entries = vec![vec![0u64; h]; h];
            for i in 0..h {
                for j in 0..h {
                    let c = theta[i][j][n as usize];
                    let units = 2 * set.weights[j];
                    if !c.is_multiple_of(units) {
                        return Err(certification!("B({n})[{i}][{j}] = {c}/{units} is not integral"));
                    }
                    entries[i][j] = c / units;
                }
            }
            Ok(BrandtMatrix {
                n,
                entries,
                ramified: n % set.q() == 0,
            })
        })
        .collect()
}

pub fn brandt_matrix(set: &ShimuraSet, n: u64) -> Result<BrandtMatrix> {
    Ok(brandt_matrices(set, n, Execution::default())?.pop().expect("n >= 1"))
}
