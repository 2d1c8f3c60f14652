// SPDX-License-Identifier: Apache-2.0

//! Full-rank and partial lattices in a quaternion algebra, stored as integer
//! rows in Hermite normal form over a common denominator.

use num_rational::Ratio;

use super::algebra::{Quat, QuaternionAlgebra};
use crate::arith::gcd;

/// Row-style Hermite normal form: rows are echelon with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf(mut rows: Vec<[i128; 4]>) -> Vec<[i128; 4]> {
    let mut r = 0;
    for col in 0..4 {
        loop {
            let pivot = (r..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].abs());
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let pv = rows[r][col];
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col] != 0 {
                    let k = rows[i][col].div_euclid(pv);
                    for c in col..4 {
                        rows[i][c] -= k * rows[r][c];
                    }
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r >= rows.len() || rows[r][col] == 0 {
            continue;
        }
        if rows[r][col] < 0 {
            for c in col..4 {
                rows[r][c] = -rows[r][c];
            }
        }
        let pv = rows[r][col];
        for i in 0..r {
            let k = rows[i][col].div_euclid(pv);
            if k != 0 {
                for c in col..4 {
                    rows[i][c] -= k * rows[r][c];
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// `span_Z(rows) / den`, canonical: HNF rows, `den > 0`, no common factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    rows: Vec<[i128; 4]>,
    den: i128,
}

impl Lattice {
    pub fn new(rows: Vec<[i128; 4]>, den: i128) -> Self {
        assert!(den > 0);
        let rows = hnf(rows);
        let g = rows.iter().flatten().fold(den, |g, &x| gcd(g, x));
        Lattice {
            rows: rows.into_iter().map(|r| r.map(|x| x / g)).collect(),
            den: den / g,
        }
    }

    /// Lattice spanned by arbitrary elements.
    pub fn from_elements(elems: &[Quat]) -> Self {
        let den = elems.iter().fold(1i128, |l, e| l / gcd(l, e.den) * e.den);
        let rows = elems.iter().map(|e| e.num.map(|x| x * (den / e.den))).collect();
        Lattice::new(rows, den)
    }

    pub fn rows(&self) -> &[[i128; 4]] {
        &self.rows
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<Quat> {
        self.rows.iter().map(|r| Quat::new(*r, self.den)).collect()
    }

    pub fn scale(&self, s: Ratio<i128>) -> Lattice {
        let rows = self.rows.iter().map(|r| r.map(|x| x * s.numer().abs())).collect();
        Lattice::new(rows, self.den * s.denom())
    }

    pub fn conj(&self) -> Lattice {
        let rows = self.rows.iter().map(|r| [r[0], -r[1], -r[2], -r[3]]).collect();
        Lattice::new(rows, self.den)
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut elems = self.basis();
        elems.extend(other.basis());
        Lattice::from_elements(&elems)
    }

    /// `span { x y : x in self, y in other }`.
    pub fn product(&self, other: &Lattice, alg: &QuaternionAlgebra) -> Lattice {
        let mut rows = Vec::with_capacity(self.rank() * other.rank());
        for x in &self.rows {
            for y in &other.rows {
                rows.push(alg.mul_raw(x, y));
            }
        }
        Lattice::new(rows, self.den * other.den)
    }

    /// `span { x y : y in self }` for a single element `x`.
    pub fn left_mul(&self, x: &Quat, alg: &QuaternionAlgebra) -> Lattice {
        let rows = self.rows.iter().map(|y| alg.mul_raw(&x.num, y)).collect();
        Lattice::new(rows, self.den * x.den)
    }

    /// Integer coordinates of `x` on the basis rows, if `x` lies in the lattice.
    pub fn coords(&self, x: &Quat) -> Option<Vec<i128>> {
        // x = num/xden must equal sum c_m rows_m / den
        let scaled = x.num.map(|v| v * self.den);
        if scaled.iter().any(|v| v % x.den != 0) {
            return None;
        }
        let mut w = scaled.map(|v| v / x.den);
        let mut out = Vec::with_capacity(self.rank());
        for row in &self.rows {
            let col = row.iter().position(|&v| v != 0).expect("HNF rows are nonzero");
            if w[col] % row[col] != 0 {
                return None;
            }
            let c = w[col] / row[col];
            for k in col..4 {
                w[k] -= c * row[k];
            }
            out.push(c);
        }
        w.iter().all(|&v| v == 0).then_some(out)
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    /// Element with the given coordinates on the basis rows.
    pub fn element(&self, coords: &[i128]) -> Quat {
        let mut num = [0i128; 4];
        for (c, row) in coords.iter().zip(&self.rows) {
            for k in 0..4 {
                num[k] += c * row[k];
            }
        }
        Quat::new(num, self.den)
    }

    /// Integer Gram matrix of `trd(x conj(y))` on the rows; the true form is
    /// this divided by `den^2`.
    pub fn gram_numerators(&self, alg: &QuaternionAlgebra) -> Vec<Vec<i128>> {
        self.rows
            .iter()
            .map(|x| self.rows.iter().map(|y| alg.bilinear_raw(x, y)).collect())
            .collect()
    }

    /// Reduced norm of the lattice: the positive generator of the
    /// fractional ideal generated by all `nrd(x)`.
    pub fn nrd(&self, alg: &QuaternionAlgebra) -> Ratio<i128> {
        let g = self.gram_content(alg);
        Ratio::new(g, self.den * self.den)
    }

    fn gram_content(&self, alg: &QuaternionAlgebra) -> i128 {
        let gram = self.gram_numerators(alg);
        let mut g = 0i128;
        for (m, row) in gram.iter().enumerate() {
            for (n, &v) in row.iter().enumerate() {
                g = gcd(g, if m == n { v / 2 } else { v });
            }
        }
        g
    }

    /// Gram matrix of `2 nrd(x) / nrd(L)`: integral, even diagonal, primitive.
    pub fn normalized_gram(&self, alg: &QuaternionAlgebra) -> Vec<Vec<i128>> {
        let g = self.gram_content(alg);
        self.gram_numerators(alg)
            .into_iter()
            .map(|row| row.into_iter().map(|v| v / g).collect())
            .collect()
    }

    /// `|det(rows)| / den^rank` for full-rank lattices, as a fraction.
    pub fn covolume(&self) -> Ratio<i128> {
        assert_eq!(self.rank(), 4);
        let det: i128 = (0..4).map(|i| self.rows[i][i]).product();
        Ratio::new(det, self.den.pow(4))
    }

    /// `[other : self]` for a full-rank sublattice.
    pub fn index_in(&self, other: &Lattice) -> Ratio<i128> {
        self.covolume() / other.covolume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::algebra::build_algebra;

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(vec![[2, 0, 0, 0], [1, 1, 0, 0], [0, 0, 3, 3], [0, 0, 0, 6], [4, 2, 3, 9]]);
        let b = hnf(vec![[1, 1, 0, 0], [0, 2, 0, 0], [0, 0, 3, 9], [0, 0, 0, 6]]);
        assert_eq!(a, b);
        assert_eq!(a[0], [1, 1, 0, 0]);
    }

    #[test]
    fn membership_and_norm() {
        let alg = build_algebra(11).unwrap();
        let o = Lattice::from_elements(&[
            Quat::new([1, 0, 0, 0], 1),
            Quat::new([0, 1, 0, 0], 1),
            Quat::new([1, 0, 1, 0], 2),
            Quat::new([0, 1, 0, 1], 2),
        ]);
        assert!(o.contains(&Quat::new([1, 0, 1, 0], 2)));
        assert!(!o.contains(&Quat::new([1, 0, 0, 0], 2)));
        assert_eq!(o.nrd(&alg), Ratio::from_integer(1));
        let oo = o.product(&o, &alg);
        assert_eq!(oo, o);
        let c = o.coords(&Quat::new([3, 1, 1, 1], 2)).unwrap();
        assert_eq!(o.element(&c), Quat::new([3, 1, 1, 1], 2));
    }
}
