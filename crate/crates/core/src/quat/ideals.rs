// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::Serialize;

use super::algebra::{Quat, QuaternionAlgebra};
use super::enumerate::ShortVectors;
use super::lattice::Lattice;
use super::order::QuatOrder;
use crate::arith;
use crate::error::{certification, precondition, Result};
use crate::serde_util::WideRatio;

/// Neighbor levels explored before giving up on the mass formula.
pub const DEFAULT_DEPTH_BOUND: usize = 64;

/// A right ideal of a fixed maximal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightIdeal {
    pub alg: QuaternionAlgebra,
    pub lattice: Lattice,
    pub nrd: Ratio<i128>,
}

impl RightIdeal {
    pub fn new(alg: QuaternionAlgebra, lattice: Lattice) -> Self {
        let nrd = lattice.nrd(&alg);
        RightIdeal { alg, lattice, nrd }
    }

    pub fn unit(order: &QuatOrder) -> Self {
        RightIdeal::new(order.alg, order.lattice.clone())
    }

    /// `I conj(I) / nrd(I)`.
    pub fn left_order(&self) -> QuatOrder {
        let l = self.lattice.product(&self.lattice.conj(), &self.alg).scale(self.nrd.recip());
        QuatOrder::from_lattice(self.alg, l)
    }

    /// Basis as rational 4-vectors in `1, i, j, k` coordinates.
    pub fn basis_matrix(&self) -> Vec<[Ratio<i128>; 4]> {
        basis_matrix(&self.lattice)
    }

    /// `sqrt |det trd(b_m conj(b_n))|` of the ideal lattice.
    pub fn reduced_lattice_discriminant(&self) -> Ratio<i128> {
        let d2 = self.lattice.den() * self.lattice.den();
        let gram: Vec<Vec<Ratio<i128>>> = self
            .lattice
            .gram_numerators(&self.alg)
            .into_iter()
            .map(|r| r.into_iter().map(|v| Ratio::new(v, d2)).collect())
            .collect();
        let d = super::order::det(&gram);
        let (n, m) = (d.numer().unsigned_abs(), *d.denom() as u128);
        let (rn, rm) = (arith::isqrt(n), arith::isqrt(m));
        assert!(rn * rn == n && rm * rm == m, "ideal discriminant is not a square");
        Ratio::new(rn as i128, rm as i128)
    }

    /// Right multiplication by a two-sided ideal or any lattice.
    pub fn mul_lattice(&self, other: &Lattice) -> RightIdeal {
        RightIdeal::new(self.alg, self.lattice.product(other, &self.alg))
    }
}

pub(crate) fn basis_matrix(l: &Lattice) -> Vec<[Ratio<i128>; 4]> {
    l.rows().iter().map(|r| r.map(|v| Ratio::new(v, l.den()))).collect()
}

/// Whether `I` and `J` (same right order) are isomorphic, that is `I = x J`:
/// decided by looking for an element of `I conj(J)` of norm `nrd(I) nrd(J)`.
pub fn is_isomorphic(i: &RightIdeal, j: &RightIdeal) -> bool {
    let l = i.lattice.product(&j.lattice.conj(), &i.alg);
    debug_assert_eq!(l.nrd(&i.alg), i.nrd * j.nrd);
    ShortVectors::new(&l.normalized_gram(&i.alg)).represents(2)
}

/// Representatives of the right ideal classes of a maximal order.
#[derive(Clone, Debug)]
pub struct ShimuraSet {
    pub order: QuatOrder,
    pub classes: Vec<RightIdeal>,
    /// Half the unit count of each left order.
    pub weights: Vec<u64>,
    pub left_orders: Vec<QuatOrder>,
}

#[derive(Serialize)]
pub struct ClassSummary {
    pub index: usize,
    pub nrd: WideRatio,
    pub weight: u64,
    /// Basis rows in `1, i, j, k` coordinates.
    pub basis: Vec<[WideRatio; 4]>,
}

impl ShimuraSet {
    pub fn q(&self) -> u64 {
        self.order.alg.q
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn mass(&self) -> Ratio<i128> {
        self.weights.iter().map(|&w| Ratio::new(1, 2 * w as i128)).sum()
    }

    /// Index of the class containing `ideal`.
    pub fn class_of(&self, ideal: &RightIdeal) -> Result<usize> {
        self.classes
            .iter()
            .position(|c| is_isomorphic(ideal, c))
            .ok_or_else(|| certification!("ideal matches none of the {} classes", self.len()))
    }

    pub fn summaries(&self) -> Vec<ClassSummary> {
        self.classes
            .iter()
            .enumerate()
            .map(|(index, c)| ClassSummary {
                index,
                nrd: WideRatio(c.nrd),
                weight: self.weights[index],
                basis: c.basis_matrix().iter().map(|r| r.map(WideRatio)).collect(),
            })
            .collect()
    }

    /// Rebuild from stored ideal lattices, recomputing weights and the mass.
    pub fn from_classes(order: QuatOrder, lattices: Vec<Lattice>) -> Result<Self> {
        let classes: Vec<RightIdeal> = lattices.into_iter().map(|l| RightIdeal::new(order.alg, l)).collect();
        let left_orders: Vec<QuatOrder> = classes.iter().map(RightIdeal::left_order).collect();
        let weights = left_orders.iter().map(|o| o.unit_count() as u64 / 2).collect();
        let x = ShimuraSet {
            order,
            classes,
            weights,
            left_orders,
        };
        x.check_mass()?;
        Ok(x)
    }

    fn check_mass(&self) -> Result<()> {
        let target = Ratio::new(self.q() as i128 - 1, 24);
        if self.mass() != target {
            return Err(certification!("mass {} differs from {}", self.mass(), target));
        }
        Ok(())
    }
}

/// Index-`l^2` sub-ideals `J` with `l I ⊂ J ⊂ I` and `J O = J`.
pub fn neighbors(ideal: &RightIdeal, order: &QuatOrder, l: u64) -> Vec<RightIdeal> {
    let alg = &ideal.alg;
    let li = l as i128;
    let basis = ideal.lattice.basis();
    // right multiplication by each generator of O, in the basis of I, mod l
    let actions: Vec<Vec<Vec<i128>>> = order
        .basis()
        .iter()
        .map(|o| {
            basis
                .iter()
                .map(|e| {
                    let c = ideal.lattice.coords(&alg.mul(e, o)).expect("ideal is a right O-module");
                    c.into_iter().map(|v| v.rem_euclid(li)).collect()
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for (w1, w2) in planes(l) {
        let in_plane = |v: &[i128]| -> bool {
            // echelon basis: subtract the pivot multiples and test for zero
            let p1 = w1.iter().position(|&x| x != 0).unwrap();
            let p2 = w2.iter().position(|&x| x != 0).unwrap();
            (0..4).all(|k| (v[k] - v[p1] * w1[k] - v[p2] * w2[k]).rem_euclid(li) == 0)
        };
        let stable = actions.iter().all(|m| {
            [&w1, &w2].iter().all(|w| {
                let img: Vec<i128> = (0..4).map(|k| (0..4).map(|r| w[r] * m[r][k]).sum::<i128>()).collect();
                in_plane(&img)
            })
        });
        if !stable {
            continue;
        }
        let mut gens: Vec<Quat> = basis.iter().map(|e| e.scale(Ratio::from_integer(li))).collect();
        gens.push(ideal.lattice.element(&w1));
        gens.push(ideal.lattice.element(&w2));
        out.push(RightIdeal::new(*alg, Lattice::from_elements(&gens)));
    }
    out
}

/// Every 2-dimensional subspace of `F_l^4`, as a reduced echelon pair.
fn planes(l: u64) -> Vec<(Vec<i128>, Vec<i128>)> {
    let l = l as i128;
    let mut out = Vec::new();
    for p1 in 0..4usize {
        for p2 in p1 + 1..4 {
            // free positions: after the pivot and not the other pivot
            let free1: Vec<usize> = (p1 + 1..4).filter(|&k| k != p2).collect();
            let free2: Vec<usize> = (p2 + 1..4).collect();
            let n1 = l.pow(free1.len() as u32);
            let n2 = l.pow(free2.len() as u32);
            for a in 0..n1 {
                for b in 0..n2 {
                    let mut w1 = vec![0i128; 4];
                    let mut w2 = vec![0i128; 4];
                    w1[p1] = 1;
                    w2[p2] = 1;
                    let mut a = a;
                    for &k in &free1 {
                        w1[k] = a % l;
                        a /= l;
                    }
                    let mut b = b;
                    for &k in &free2 {
                        w2[k] = b % l;
                        b /= l;
                    }
                    out.push((w1, w2));
                }
            }
        }
    }
    out
}

/// Closes the unit class under `l`-neighbors (`l` the smallest prime not
/// dividing `q`) until the mass formula `sum 1/(2 w_i) = (q - 1)/24` holds.
pub fn right_ideal_classes(order: &QuatOrder) -> Result<ShimuraSet> {
    right_ideal_classes_with_depth(order, DEFAULT_DEPTH_BOUND)
}

pub fn right_ideal_classes_with_depth(order: &QuatOrder, depth_bound: usize) -> Result<ShimuraSet> {
    let q = order.alg.q;
    if order.reduced_discriminant() != Some(q as u128) {
        return Err(precondition!("order is not maximal"));
    }
    let l = arith::primes_up_to(64).into_iter().find(|&p| p != q).expect("small prime");
    let target = Ratio::new(q as i128 - 1, 24);
    let base = RightIdeal::unit(order);
    let lo = base.left_order();
    let mut set = ShimuraSet {
        order: order.clone(),
        weights: vec![lo.unit_count() as u64 / 2],
        left_orders: vec![lo],
        classes: vec![base],
    };
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while set.mass() < target {
        let Some((idx, depth)) = queue.pop_front() else { break };
        if depth >= depth_bound {
            break;
        }
        for j in neighbors(&set.classes[idx], order, l) {
            if set.classes.iter().any(|c| is_isomorphic(&j, c)) {
                continue;
            }
            let lo = j.left_order();
            set.weights.push(lo.unit_count() as u64 / 2);
            set.left_orders.push(lo);
            set.classes.push(j);
            queue.push_back((set.len() - 1, depth + 1));
            if set.mass() >= target {
                break;
            }
        }
    }
    if set.mass() != target {
        return Err(certification!(
            "mass {} after {} classes, expected {} (depth bound {depth_bound})",
            set.mass(),
            set.len(),
            target
        ));
    }
    Ok(set)
}

/// Null space of an integer matrix modulo a prime, as reduced vectors.
pub(crate) fn nullspace_mod(m: &[Vec<i128>], p: i128) -> Vec<Vec<i128>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|v| v.rem_euclid(p)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = arith::mod_inv(a[r][c] as i64, p as i64).unwrap() as i128;
        for k in 0..cols {
            a[r][k] = a[r][k] * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for k in 0..cols {
                    a[i][k] = (a[i][k] - f * a[r][k]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0i128; cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[i][fc]).rem_euclid(p);
            }
            v
        })
        .collect()
}

/// The two-sided ideal of norm `q`: `q O` plus the radical of the trace
/// form modulo `q`.
pub fn ramified_ideal(order: &QuatOrder) -> Result<Lattice> {
    let q = order.alg.q as i128;
    let gram = order.norm_gram();
    let kernel = nullspace_mod(&gram, q);
    if kernel.len() != 2 {
        return Err(certification!("trace form radical mod q has dimension {}", kernel.len()));
    }
    let mut gens: Vec<Quat> = order.basis().iter().map(|b| b.scale(Ratio::from_integer(q))).collect();
    gens.extend(kernel.iter().map(|v| order.lattice.element(v)));
    let p = Lattice::from_elements(&gens);
    let alg = &order.alg;
    let two_sided = p.product(&order.lattice, alg) == p && order.lattice.product(&p, alg) == p;
    if !two_sided || p.nrd(alg) != Ratio::from_integer(q) {
        return Err(certification!("radical lattice is not the two-sided ideal of norm q"));
    }
    Ok(p)
}

/// Permutation of the classes induced by `[I] -> [I P]`.
pub fn ramified_involution(set: &ShimuraSet) -> Result<Vec<usize>> {
    let p = ramified_ideal(&set.order)?;
    set.classes.iter().map(|c| set.class_of(&c.mul_lattice(&p))).collect()
}
