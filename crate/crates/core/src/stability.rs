// SPDX-License-Identifier: Apache-2.0

//! Galois-stable generating sets of character groups.
//!
//! [`stability_bound`] evaluates the lower bound `sum_i [F_q(mu_{n_i}) : F_q]`
//! over the invariant factors of the group, and
//! [`min_stable_generating_size`] finds the true minimum by an exhaustive
//! search over unions of Frobenius orbits.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith;
use crate::characters::{character_group, galois_orbits, invariant_factors, AbelianGroup, ProductGroup};
use crate::error::{precondition, Result};

pub const DEFAULT_MAX_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityBound {
    /// `sum_i [F_q(mu_{n_i}) : F_q]`.
    pub exact: u64,
    /// `sum_i phi(n_i) / gcd(n_i, q - 1)`, as an exact fraction.
    #[serde(serialize_with = "ser_ratio")]
    pub weak: Ratio<u64>,
    pub invariant_factors: Vec<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn check_coprime(orders: &[u64], q: u64) -> Result<()> {
    if q < 2 {
        return Err(precondition!("q = {q} is not a prime power"));
    }
    if let Some(n) = orders.iter().find(|&&n| n.gcd(&q) != 1) {
        return Err(precondition!("gcd(q = {q}, n = {n}) != 1"));
    }
    Ok(())
}

/// Lower bound for the size of a Galois-stable generating subset of the
/// dual of `Z/m_1 x ... x Z/m_r`. The orders are first brought into
/// invariant-factor form, which the bound is stated for.
pub fn stability_bound(cyclic_orders: &[u64], q: u64) -> Result<StabilityBound> {
    check_coprime(cyclic_orders, q)?;
    let factors = invariant_factors(cyclic_orders);
    let exact = factors.iter().map(|&n| arith::mult_order(q % n, n)).sum();
    let weak = factors.iter().fold(Ratio::from_integer(0u64), |acc, &n| {
        acc + Ratio::new(arith::euler_phi(n), n.gcd(&(q - 1)))
    });
    Ok(StabilityBound {
        exact,
        weak,
        invariant_factors: factors,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableSearch {
    pub min_size: usize,
    /// Characters (exponent vectors against the invariant factors) of one
    /// minimal stable generating set.
    pub witness: Vec<Vec<u64>>,
    pub orbit_count: usize,
}

/// Minimum cardinality of a Frobenius-stable subset generating the whole
/// character group, by Dijkstra over the lattice of subgroups: adding an
/// orbit costs its size and moves to the subgroup generated.
pub fn min_stable_generating_size(
    cyclic_orders: &[u64],
    q: u64,
    max_order: usize,
) -> Result<StableSearch> {
    check_coprime(cyclic_orders, q)?;
    let group = ProductGroup::new(invariant_factors(cyclic_orders));
    let order = group.order();
    if order > max_order || order > 64 {
        return Err(precondition!(
            "group of order {order} exceeds the search bound {}",
            max_order.min(64)
        ));
    }
    let factors = group.factors();
    let chars = character_group(&group);
    let orbits = galois_orbits(&chars, &factors, q)?;
    // the dual group is isomorphic to the group, indices align with `chars`
    let mul = |a: usize, b: usize| -> usize {
        let c = chars[a].mul(&chars[b], &factors);
        group.index_of(&c.exponents)
    };
    let nontrivial: Vec<(u64, usize)> = orbits
        .iter()
        .filter(|o| !chars[o[0]].is_trivial())
        .map(|o| (o.iter().fold(0u64, |m, &i| m | 1u64 << i), o.len()))
        .collect();
    let full: u64 = if order == 64 { u64::MAX } else { (1u64 << order) - 1 };

    let join = |sub: u64, extra: u64| -> u64 {
        let mut members: Vec<usize> = (0..order).filter(|&i| sub >> i & 1 == 1).collect();
        let gens: Vec<usize> = (0..order).filter(|&i| extra >> i & 1 == 1).collect();
        let mut mask = sub;
        let mut i = 0;
        while i < members.len() {
            for &g in &gens {
                let p = mul(members[i], g);
                if mask >> p & 1 == 0 {
                    mask |= 1 << p;
                    members.push(p);
                }
            }
            i += 1;
        }
        mask
    };

    let start = 1u64; // trivial subgroup {identity}
    let mut dist: HashMap<u64, usize> = HashMap::from([(start, 0)]);
    let mut prev: HashMap<u64, (u64, usize)> = HashMap::new();
    let mut heap = BinaryHeap::from([Reverse((0usize, start))]);
    while let Some(Reverse((d, sub))) = heap.pop() {
        if dist.get(&sub).is_some_and(|&best| best < d) {
            continue;
        }
        if sub == full {
            break;
        }
        for (k, &(mask, size)) in nontrivial.iter().enumerate() {
            if mask & !sub == 0 {
                continue;
            }
            let next = join(sub, mask);
            let nd = d + size;
            if dist.get(&next).is_none_or(|&old| nd < old) {
                dist.insert(next, nd);
                prev.insert(next, (sub, k));
                heap.push(Reverse((nd, next)));
            }
        }
    }
    let min_size = dist[&full];
    let mut witness = Vec::new();
    let mut cur = full;
    while let Some(&(before, k)) = prev.get(&cur) {
        let mask = nontrivial[k].0;
        witness.extend(
            (0..order)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| chars[i].exponents.clone()),
        );
        cur = before;
    }
    witness.sort();
    Ok(StableSearch {
        min_size,
        witness,
        orbit_count: orbits.len(),
    })
}

/// Plain enumeration over all subsets of nontrivial orbits. Exponential;
/// test oracle for [`min_stable_generating_size`] on groups with few orbits.
pub fn min_stable_generating_size_bruteforce(cyclic_orders: &[u64], q: u64) -> Result<usize> {
    check_coprime(cyclic_orders, q)?;
    let group = ProductGroup::new(invariant_factors(cyclic_orders));
    let factors = group.factors();
    let chars = character_group(&group);
    let orbits: Vec<Vec<usize>> = galois_orbits(&chars, &factors, q)?
        .into_iter()
        .filter(|o| !chars[o[0]].is_trivial())
        .collect();
    if orbits.len() > 22 {
        return Err(precondition!("{} orbits is too many for brute force", orbits.len()));
    }
    let order = group.order();
    let mut best = usize::MAX;
    for subset in 0u64..(1u64 << orbits.len()) {
        let mut size = 0;
        let mut gens = Vec::new();
        for (k, o) in orbits.iter().enumerate() {
            if subset >> k & 1 == 1 {
                size += o.len();
                gens.extend(o.iter().copied());
            }
        }
        if size >= best {
            continue;
        }
        // subgroup generated, by closure
        let mut inside = vec![false; order];
        inside[0] = true;
        let mut members = vec![0usize];
        let mut i = 0;
        while i < members.len() {
            for &g in &gens {
                let c = chars[members[i]].mul(&chars[g], &factors);
                let p = group.index_of(&c.exponents);
                if !inside[p] {
                    inside[p] = true;
                    members.push(p);
                }
            }
            i += 1;
        }
        if members.len() == order {
            best = size;
        }
    }
    Ok(best)
}

/// Every invariant-factor list `n_1 | n_2 | ...` of an abelian group of order
/// at most `max_order` (the trivial group included).
pub fn abelian_groups_up_to(max_order: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, remaining: u64, out: &mut BTreeMap<(u64, Vec<u64>), ()>) {
        let prod: u64 = prefix.iter().product();
        out.insert((prod, prefix.clone()), ());
        let last = prefix.last().copied().unwrap_or(1);
        let mut n = if prefix.is_empty() { 2 } else { last };
        while n <= remaining {
            if n % last == 0 {
                prefix.push(n);
                extend(prefix, remaining / n, out);
                prefix.pop();
            }
            n += 1;
        }
    }
    let mut out = BTreeMap::new();
    extend(&mut Vec::new(), max_order, &mut out);
    out.into_keys().map(|(_, f)| f).collect()
}
