// SPDX-License-Identifier: Apache-2.0

//! Characters of finite abelian groups, their exact and mod-p values, Fourier
//! analysis over a finite field and Frobenius orbits.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::bqf::ClassGroup;
use crate::cyclo::{CycloInt, CycloRing};
use crate::error::{precondition, Result};
use crate::ffield::{FieldEmbedding, Fq};

/// A finite abelian group given by invariant factors, with elements indexed
/// consistently by exponent vectors.
pub trait AbelianGroup {
    fn order(&self) -> usize;
    /// Invariant factors `n_1 | n_2 | ...` (trivial factors omitted).
    fn factors(&self) -> Vec<u64>;
    fn coordinates(&self, idx: usize) -> Vec<u64>;

    fn exponent(&self) -> u64 {
        self.factors().last().copied().unwrap_or(1)
    }
}

impl AbelianGroup for ClassGroup {
    fn order(&self) -> usize {
        ClassGroup::order(self)
    }

    fn factors(&self) -> Vec<u64> {
        self.invariant_factors()
    }

    fn coordinates(&self, idx: usize) -> Vec<u64> {
        self.encode(idx).to_vec()
    }
}

/// `Z/n_1 x ... x Z/n_d`, elements in mixed-radix order (last coordinate fastest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductGroup {
    factors: Vec<u64>,
}

impl ProductGroup {
    pub fn new(factors: Vec<u64>) -> Self {
        ProductGroup {
            factors: factors.into_iter().filter(|&n| n > 1).collect(),
        }
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.factors)
            .fold(0usize, |k, (c, n)| k * *n as usize + (*c % *n) as usize)
    }
}

impl AbelianGroup for ProductGroup {
    fn order(&self) -> usize {
        self.factors.iter().product::<u64>() as usize
    }

    fn factors(&self) -> Vec<u64> {
        self.factors.clone()
    }

    fn coordinates(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            let n = self.factors[i] as usize;
            out[i] = (idx % n) as u64;
            idx /= n;
        }
        out
    }
}

/// Invariant factors (ascending, trivial ones dropped) of `Z/m_1 x ... x Z/m_r`.
pub fn invariant_factors(cyclic_orders: &[u64]) -> Vec<u64> {
    // collect prime-power parts per prime, then recombine
    let mut by_prime: HashMap<u64, Vec<u64>> = HashMap::new();
    for &m in cyclic_orders {
        for (p, e) in crate::arith::factor(m) {
            by_prime.entry(p).or_default().push(p.pow(e));
        }
    }
    let depth = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; depth];
    for parts in by_prime.values_mut() {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        for (i, pp) in parts.iter().enumerate() {
            out[depth - 1 - i] *= pp;
        }
    }
    out.retain(|&n| n > 1);
    out
}

/// A character, stored by its exponent vector against the group's invariant
/// factors: `chi(g_i) = zeta_{n_i}^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub exponents: Vec<u64>,
}

impl Character {
    pub fn trivial(rank: usize) -> Self {
        Character {
            exponents: vec![0; rank],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn order(&self, factors: &[u64]) -> u64 {
        self.exponents
            .iter()
            .zip(factors)
            .fold(1u64, |acc, (&e, &n)| acc.lcm(&(n / e.gcd(&n))))
    }

    /// Exponent `t` with `chi(sigma) = zeta_n^t`, `n` a multiple of every factor.
    pub fn value_exponent(&self, factors: &[u64], coords: &[u64], n: u64) -> u64 {
        let mut t = 0u64;
        for ((&e, &s), &ni) in self.exponents.iter().zip(coords).zip(factors) {
            t = (t + (e * s % ni) * (n / ni)) % n;
        }
        t
    }

    pub fn pow(&self, k: u64, factors: &[u64]) -> Character {
        Character {
            exponents: self
                .exponents
                .iter()
                .zip(factors)
                .map(|(&e, &n)| (e * (k % n)) % n)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Character, factors: &[u64]) -> Character {
        Character {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .zip(factors)
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        }
    }
}

/// All characters of `g`, in lexicographic order of exponent vectors.
pub fn character_group<G: AbelianGroup + ?Sized>(g: &G) -> Vec<Character> {
    let dual = ProductGroup::new(g.factors());
    (0..dual.order())
        .map(|i| Character {
            exponents: dual.coordinates(i),
        })
        .collect()
}

/// The duality pairing `<chi, sigma>` as an exponent of `zeta_n`, `n` the group exponent.
pub fn pairing<G: AbelianGroup + ?Sized>(g: &G, chi: &Character, sigma: usize) -> u64 {
    let factors = g.factors();
    chi.value_exponent(&factors, &g.coordinates(sigma), g.exponent())
}

/// Exact value in `Z[zeta_n]` and its image in the residue field, `n = emb.n`.
pub fn eval_char<G: AbelianGroup + ?Sized>(
    g: &G,
    chi: &Character,
    sigma: usize,
    ring: &Arc<CycloRing>,
    emb: &FieldEmbedding,
) -> Result<(CycloInt, Fq)> {
    check_embedding(g, emb)?;
    if ring.n != emb.n {
        return Err(precondition!("cyclotomic ring and embedding disagree on n"));
    }
    let t = chi.value_exponent(&g.factors(), &g.coordinates(sigma), emb.n) as i64;
    Ok((ring.zeta_pow(t), emb.zeta_pow(t).clone()))
}

fn check_embedding<G: AbelianGroup + ?Sized>(g: &G, emb: &FieldEmbedding) -> Result<()> {
    if !emb.n.is_multiple_of(g.exponent()) {
        return Err(precondition!(
            "embedding supplies roots of unity of order {} but the group exponent is {}",
            emb.n,
            g.exponent()
        ));
    }
    if g.exponent().is_multiple_of(emb.p) {
        return Err(precondition!("p = {} divides the value order", emb.p));
    }
    Ok(())
}

/// `P(chi) = h^{-1} sum_sigma chi(sigma)^{-1} f(sigma)` for every character, in
/// [`character_group`] order. `fvals` is indexed by group element.
pub fn fourier<G: AbelianGroup + ?Sized>(
    fvals: &[Fq],
    g: &G,
    emb: &FieldEmbedding,
) -> Result<Vec<Fq>> {
    check_embedding(g, emb)?;
    let h = g.order();
    if (h as u64).is_multiple_of(emb.p) {
        return Err(precondition!("p = {} divides the group order {h}", emb.p));
    }
    assert_eq!(fvals.len(), h);
    let field = &emb.field;
    let h_inv = field.inv(&field.from_int(h as i128)).expect("p does not divide h");
    let factors = g.factors();
    let coords: Vec<Vec<u64>> = (0..h).map(|s| g.coordinates(s)).collect();
    Ok(character_group(g)
        .iter()
        .map(|chi| {
            let mut acc = field.zero();
            for (s, f) in fvals.iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let t = chi.value_exponent(&factors, &coords[s], emb.n) as i64;
                acc = field.add(&acc, &field.mul(emb.zeta_pow(-t), f));
            }
            field.mul(&acc, &h_inv)
        })
        .collect())
}

/// `f(sigma) = sum_chi P(chi) chi(sigma)`.
pub fn inverse_fourier<G: AbelianGroup + ?Sized>(
    coeffs: &[Fq],
    g: &G,
    emb: &FieldEmbedding,
) -> Result<Vec<Fq>> {
    check_embedding(g, emb)?;
    let chars = character_group(g);
    assert_eq!(coeffs.len(), chars.len());
    let field = &emb.field;
    let factors = g.factors();
    Ok((0..g.order())
        .map(|s| {
            let coords = g.coordinates(s);
            let mut acc = field.zero();
            for (chi, c) in chars.iter().zip(coeffs) {
                if c.is_zero() {
                    continue;
                }
                let t = chi.value_exponent(&factors, &coords, emb.n) as i64;
                acc = field.add(&acc, &field.mul(emb.zeta_pow(t), c));
            }
            acc
        })
        .collect())
}

/// Partition `chars` into orbits of `chi -> chi^{q0}`. Orbits are listed by
/// first appearance and each orbit in orbit order starting from its first
/// member; entries are indices into `chars`.
pub fn galois_orbits(chars: &[Character], factors: &[u64], q0: u64) -> Result<Vec<Vec<usize>>> {
    let pos: HashMap<&Character, usize> = chars.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut seen = vec![false; chars.len()];
    let mut orbits = Vec::new();
    for (i, chi) in chars.iter().enumerate() {
        if seen[i] {
            continue;
        }
        if q0.gcd(&chi.order(factors)) != 1 {
            return Err(precondition!(
                "q0 = {q0} is not coprime to the order of {:?}",
                chi.exponents
            ));
        }
        let mut orbit = vec![i];
        seen[i] = true;
        let mut cur = chi.pow(q0, factors);
        while &cur != chi {
            let j = *pos.get(&cur).ok_or_else(|| {
                precondition!("character set is not stable under chi -> chi^{q0}")
            })?;
            seen[j] = true;
            orbit.push(j);
            cur = cur.pow(q0, factors);
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}
