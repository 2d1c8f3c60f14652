// SPDX-License-Identifier: Apache-2.0

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::algebra::{Quat, QuaternionAlgebra};
use super::enumerate::ShortVectors;
use super::lattice::Lattice;
use crate::arith;
use crate::error::{certification, Result};

/// An order in a definite quaternion algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatOrder {
    pub alg: QuaternionAlgebra,
    pub lattice: Lattice,
}

/// Exact determinant of a rational matrix.
pub(crate) fn det(m: &[Vec<Ratio<i128>>]) -> Ratio<i128> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Ratio::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Ratio::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = a[c][k] * f;
                a[r][k] -= v;
            }
        }
    }
    d
}

impl QuatOrder {
    pub fn from_lattice(alg: QuaternionAlgebra, lattice: Lattice) -> Self {
        QuatOrder { alg, lattice }
    }

    pub fn basis(&self) -> Vec<Quat> {
        self.lattice.basis()
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.lattice.contains(x)
    }

    /// Rational Gram matrix of `trd(x conj(y))` on the basis.
    pub fn gram(&self) -> Vec<Vec<Ratio<i128>>> {
        let d2 = self.lattice.den() * self.lattice.den();
        self.lattice
            .gram_numerators(&self.alg)
            .into_iter()
            .map(|r| r.into_iter().map(|v| Ratio::new(v, d2)).collect())
            .collect()
    }

    /// Every element integral: traces, norms and the trace form are in `Z`.
    pub fn is_integral(&self) -> bool {
        let gram = self.gram();
        let traces_ok = self.basis().iter().all(|b| self.alg.trd(b).is_integer());
        let norms_ok = (0..gram.len()).all(|m| (gram[m][m] / 2).is_integer());
        traces_ok && norms_ok && gram.iter().flatten().all(|v| v.is_integer())
    }

    pub fn is_ring(&self) -> bool {
        self.lattice.rank() == 4
            && self.contains(&Quat::from_int(1))
            && self.lattice.product(&self.lattice, &self.alg) == self.lattice
    }

    /// Reduced discriminant: `sqrt |det trd(b_m conj(b_n))|`.
    pub fn reduced_discriminant(&self) -> Option<u128> {
        let d = det(&self.gram());
        if !d.is_integer() {
            return None;
        }
        let v = d.to_integer().unsigned_abs();
        let r = arith::isqrt(v);
        (r * r == v).then_some(r)
    }

    /// Gram matrix of `2 nrd` on the basis; integral for an order.
    pub fn norm_gram(&self) -> Vec<Vec<i128>> {
        self.gram().into_iter().map(|r| r.into_iter().map(|v| v.to_integer()).collect()).collect()
    }

    /// The units, as elements of norm one.
    pub fn units(&self) -> Vec<Quat> {
        let sv = ShortVectors::new(&self.norm_gram());
        sv.vectors_of_value(2).iter().map(|x| self.lattice.element(x)).collect()
    }

    pub fn unit_count(&self) -> usize {
        ShortVectors::new(&self.norm_gram()).counts(2)[2] as usize
    }

    fn certify(&self, q: u64) -> bool {
        self.is_ring() && self.is_integral() && self.reduced_discriminant() == Some(q as u128)
    }
}

fn pizer_basis(alg: &QuaternionAlgebra) -> Vec<Quat> {
    let q = alg.q as i128;
    match alg.q % 8 {
        // Hurwitz order
        2 => vec![
            Quat::new([1, 1, 1, 1], 2),
            Quat::new([0, 1, 0, 0], 1),
            Quat::new([0, 0, 1, 0], 1),
            Quat::new([0, 0, 0, 1], 1),
        ],
        3 | 7 => vec![
            Quat::new([1, 0, 0, 0], 1),
            Quat::new([0, 1, 0, 0], 1),
            Quat::new([1, 0, 1, 0], 2),
            Quat::new([0, 1, 0, 1], 2),
        ],
        5 => vec![
            Quat::new([1, 0, 1, 1], 2),
            Quat::new([0, 1, 2, 1], 4),
            Quat::new([0, 0, 1, 0], 1),
            Quat::new([0, 0, 0, 1], 1),
        ],
        _ => {
            let r = -alg.a as i128;
            let a = (0..r).find(|&a| (a * a * q + 1) % r == 0).unwrap_or(0);
            vec![
                Quat::new([1, 1, 0, 0], 2),
                Quat::new([0, 0, 1, -1], 2),
                Quat::new([0, 1, 0, -a], r),
                Quat::new([0, 0, 0, 1], 1),
            ]
        }
    }
}

/// Ring generated by a lattice together with `1`.
fn ring_closure(l: &Lattice, alg: &QuaternionAlgebra) -> Lattice {
    let mut cur = l.sum(&Lattice::from_elements(&[Quat::from_int(1)]));
    loop {
        let next = cur.sum(&cur.product(&cur, alg));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Enlarge `Z<1, i, j, k>` by integral elements `x / p` until the reduced
/// discriminant drops to `q`.
fn saturate(alg: &QuaternionAlgebra) -> Result<QuatOrder> {
    let mut order = QuatOrder::from_lattice(
        *alg,
        Lattice::new(vec![[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 1),
    );
    loop {
        let disc = order
            .reduced_discriminant()
            .ok_or_else(|| certification!("order discriminant is not a square"))?;
        if disc == alg.q as u128 {
            return Ok(order);
        }
        let excess = (disc / alg.q as u128) as u64;
        let mut grown = false;
        'primes: for p in arith::prime_divisors(excess) {
            let basis = order.basis();
            let pi = p as i128;
            for mask in 1..pi.pow(4) {
                let mut x = Quat::from_int(0);
                let mut m = mask;
                for b in &basis {
                    let c = m % pi;
                    m /= pi;
                    if c != 0 {
                        x = x.add(&b.scale(Ratio::from_integer(c)));
                    }
                }
                let y = x.scale(Ratio::new(1, pi));
                if !alg.trd(&y).is_integer() || !alg.nrd(&y).is_integer() {
                    continue;
                }
                let bigger = QuatOrder::from_lattice(*alg, ring_closure(&order.lattice.sum(&Lattice::from_elements(&[y])), alg));
                if bigger.is_integral() {
                    order = bigger;
                    grown = true;
                    break 'primes;
                }
            }
        }
        if !grown {
            return Err(certification!("saturation stalled at discriminant {disc}"));
        }
    }
}

/// A maximal order of the definite algebra ramified at `q`, certified by
/// closure, integrality and reduced discriminant `q`.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<QuatOrder> {
    let candidate = QuatOrder::from_lattice(*alg, Lattice::from_elements(&pizer_basis(alg)));
    if candidate.certify(alg.q) {
        return Ok(candidate);
    }
    let o = saturate(alg)?;
    if !o.certify(alg.q) {
        return Err(certification!("no maximal order found for q = {}", alg.q));
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::algebra::build_algebra;

    #[test]
    fn pizer_orders_certify() {
        for q in arith::primes_up_to(400) {
            let alg = build_algebra(q).unwrap();
            let o = QuatOrder::from_lattice(alg, Lattice::from_elements(&pizer_basis(&alg)));
            assert!(o.certify(q), "q = {q}");
        }
    }

    #[test]
    fn saturation_reaches_maximal() {
        for q in [3u64, 5, 11, 17, 41] {
            let alg = build_algebra(q).unwrap();
            let o = saturate(&alg).unwrap();
            assert!(o.certify(q));
        }
    }

    #[test]
    fn unit_counts() {
        let units = |q| maximal_order(&build_algebra(q).unwrap()).unwrap().unit_count();
        assert_eq!(units(2), 24);
        assert_eq!(units(3), 12);
        assert_eq!(units(11), 4);
        assert_eq!(units(5), 6);
        assert_eq!(units(13), 2);
    }
}
