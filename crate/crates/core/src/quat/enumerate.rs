// SPDX-License-Identifier: Apache-2.0

//! Exact short-vector enumeration for positive definite integral forms.

use std::ops::ControlFlow;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use crate::arith::isqrt;

type Q = Ratio<i128>;

/// A positive definite form `x -> x^T A x` prepared for enumeration:
/// pairwise-reduced basis plus an exact LDL^T decomposition.
#[derive(Clone, Debug)]
pub struct ShortVectors {
    dim: usize,
    /// Reduced Gram matrix.
    gram: Vec<Vec<i128>>,
    /// Rows express the reduced basis in the original one.
    transform: Vec<Vec<i128>>,
    /// `mu[i][j]` for `j > i`.
    mu: Vec<Vec<Q>>,
    diag: Vec<Q>,
}

impl ShortVectors {
    pub fn new(gram: &[Vec<i128>]) -> Self {
        let dim = gram.len();
        let mut a: Vec<Vec<i128>> = gram.to_vec();
        let mut t: Vec<Vec<i128>> = (0..dim)
            .map(|i| (0..dim).map(|j| i128::from(i == j)).collect())
            .collect();
        // pairwise reduction: every step strictly lowers a diagonal entry
        loop {
            let mut changed = false;
            for i in 0..dim {
                for j in 0..dim {
                    if i == j || a[j][j] == 0 || 2 * a[i][j].abs() <= a[j][j] {
                        continue;
                    }
                    let k = round_div(a[i][j], a[j][j]);
                    let aii = a[i][i] - 2 * k * a[i][j] + k * k * a[j][j];
                    for l in 0..dim {
                        if l != i {
                            a[i][l] -= k * a[j][l];
                            a[l][i] = a[i][l];
                        }
                    }
                    a[i][i] = aii;
                    for l in 0..dim {
                        t[i][l] -= k * t[j][l];
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // longest vectors first, so the innermost loop runs over the shortest
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(a[i][i]));
        let a: Vec<Vec<i128>> = order.iter().map(|&i| order.iter().map(|&j| a[i][j]).collect()).collect();
        let t: Vec<Vec<i128>> = order.iter().map(|&i| t[i].clone()).collect();

        // x^T A x = sum_i diag_i (x_i + sum_{j>i} mu_ij x_j)^2
        let mut m: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&v| Q::from_integer(v)).collect()).collect();
        let mut mu = vec![vec![Q::zero(); dim]; dim];
        let mut diag = vec![Q::zero(); dim];
        for i in 0..dim {
            diag[i] = m[i][i];
            assert!(diag[i] > Q::zero(), "form is not positive definite");
            for j in i + 1..dim {
                mu[i][j] = m[i][j] / diag[i];
            }
            for j in i + 1..dim {
                for k in i + 1..dim {
                    let v = mu[i][j] * mu[i][k] * diag[i];
                    m[j][k] -= v;
                }
            }
        }
        ShortVectors {
            dim,
            gram: a,
            transform: t,
            mu,
            diag,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Calls `f(x, value)` for every nonzero `x` (original coordinates) with
    /// `x^T A x <= bound`. Both `x` and `-x` are visited.
    pub fn for_each<F>(&self, bound: i128, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[i128], i128) -> ControlFlow<()>,
    {
        let mut x = vec![0i128; self.dim];
        let mut out = vec![0i128; self.dim];
        self.recurse(self.dim, Q::from_integer(bound), &mut x, &mut out, &mut f)
    }

    fn recurse<F>(&self, level: usize, remaining: Q, x: &mut [i128], out: &mut [i128], f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[i128], i128) -> ControlFlow<()>,
    {
        if level == 0 {
            if x.iter().all(|&v| v == 0) {
                return ControlFlow::Continue(());
            }
            let value = self.value_reduced(x);
            for (j, o) in out.iter_mut().enumerate() {
                *o = (0..self.dim).map(|i| x[i] * self.transform[i][j]).sum();
            }
            return f(out, value);
        }
        let i = level - 1;
        let center: Q = -(i + 1..self.dim).fold(Q::zero(), |acc, j| acc + self.mu[i][j] * Q::from_integer(x[j]));
        let radius2 = remaining / self.diag[i];
        // |x_i - center| <= sqrt(radius2)
        let r = isqrt(radius2.floor().to_integer().max(0) as u128) as i128 + 1;
        let c0 = center.floor().to_integer();
        for xi in c0 - r..=c0 + r + 1 {
            let d = Q::from_integer(xi) - center;
            let used = d * d * self.diag[i];
            if used > remaining {
                continue;
            }
            x[i] = xi;
            self.recurse(i, remaining - used, x, out, f)?;
        }
        x[i] = 0;
        ControlFlow::Continue(())
    }

    fn value_reduced(&self, x: &[i128]) -> i128 {
        let mut v = 0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                v += x[i] * self.gram[i][j] * x[j];
            }
        }
        v
    }

    /// `counts[v]` = number of `x` with `x^T A x = v`, for `v <= bound`
    /// (the zero vector included in `counts[0]`).
    pub fn counts(&self, bound: i128) -> Vec<u64> {
        let mut counts = vec![0u64; bound as usize + 1];
        counts[0] = 1;
        let _ = self.for_each(bound, |_, v| {
            counts[v as usize] += 1;
            ControlFlow::Continue(())
        });
        counts
    }

    /// All `x` with `x^T A x = value`.
    pub fn vectors_of_value(&self, value: i128) -> Vec<Vec<i128>> {
        let mut out = Vec::new();
        let _ = self.for_each(value, |x, v| {
            if v == value {
                out.push(x.to_vec());
            }
            ControlFlow::Continue(())
        });
        out
    }

    /// Whether some `x` has `x^T A x = value`.
    pub fn represents(&self, value: i128) -> bool {
        self.for_each(value, |_, v| {
            if v == value {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .is_break()
    }
}

fn round_div(a: i128, b: i128) -> i128 {
    // nearest integer to a / b, b > 0
    Integer::div_floor(&(2 * a + b), &(2 * b))
}

/// Quadratic form value `x^T A x`.
pub fn form_value(gram: &[Vec<i128>], x: &[i128]) -> i128 {
    let n = gram.len();
    let mut v = 0;
    for i in 0..n {
        for j in 0..n {
            v += x[i] * gram[i][j] * x[j];
        }
    }
    v
}

/// Plain box enumeration, for cross-checking on small forms.
pub fn counts_bruteforce(gram: &[Vec<i128>], bound: i128, radius: i128) -> Vec<u64> {
    let n = gram.len();
    let mut counts = vec![0u64; bound as usize + 1];
    let mut x = vec![-radius; n];
    loop {
        let v = form_value(gram, &x);
        if v <= bound {
            counts[v as usize] += 1;
        }
        let mut k = 0;
        while k < n {
            x[k] += 1;
            if x[k] <= radius {
                break;
            }
            x[k] = -radius;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_four_squares() {
        let g: Vec<Vec<i128>> = (0..4).map(|i| (0..4).map(|j| i128::from(i == j)).collect()).collect();
        let sv = ShortVectors::new(&g);
        let c = sv.counts(10);
        // r_4(n) = 8 sigma(n) for odd n, 24 sigma(odd part) for even n
        assert_eq!(c[..6], [1, 8, 24, 32, 24, 48]);
    }

    #[test]
    fn skewed_basis_matches_box() {
        let g = vec![vec![10, 7, 3], vec![7, 6, 2], vec![3, 2, 4]];
        let sv = ShortVectors::new(&g);
        assert_eq!(sv.counts(30), counts_bruteforce(&g, 30, 20));
        let v = sv.vectors_of_value(4);
        assert!(v.iter().all(|x| form_value(&g, x) == 4));
        assert!(sv.represents(4));
    }
}
