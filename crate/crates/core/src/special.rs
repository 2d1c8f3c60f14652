// SPDX-License-Identifier: Apache-2.0

//! Optimal embeddings of imaginary quadratic orders into a maximal order and
//! the special-points map from the class group to the class set.

use num_rational::Ratio;
use serde::Serialize;

use crate::arith;
use crate::bqf::{ClassGroup, Discriminant, IdealClass};
use crate::error::{certification, precondition, Result};
use crate::exec::Execution;
use crate::quat::ideals::ramified_ideal;
use crate::quat::{Lattice, Quat, QuatOrder, RightIdeal, ShimuraSet, ShortVectors};

/// An optimal embedding, recorded by the image `omega` of the generator
/// `(t + sqrt D)/2` of the ring of integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusEmbedding {
    pub disc: Discriminant,
    /// Index of the class `I` whose left order receives the embedding;
    /// special points are the classes of `iota(a) I`.
    pub base: usize,
    /// `omega` as `[x0, x1, x2, x3]` over `den`.
    #[serde(serialize_with = "crate::serde_util::wide_vec::serialize")]
    pub omega: [i128; 4],
    #[serde(serialize_with = "crate::serde_util::wide::serialize")]
    pub den: i128,
    /// Coordinates of `omega` in the basis of the order.
    #[serde(serialize_with = "crate::serde_util::wide_vec::serialize")]
    pub coords: Vec<i128>,
    pub trace: i64,
    pub norm: i64,
}

impl TorusEmbedding {
    pub fn omega(&self) -> Quat {
        Quat::new(self.omega, self.den)
    }

    /// Image of `x + y omega`.
    pub fn image(&self, x: i128, y: i128) -> Quat {
        Quat::from_int(x).add(&self.omega().scale(Ratio::from_integer(y)))
    }
}

/// Trace-zero part of `Z + 2 O`.
pub fn gross_lattice(order: &QuatOrder) -> Lattice {
    let mut gens = vec![Quat::from_int(1)];
    gens.extend(order.basis().iter().map(|b| b.scale(Ratio::from_integer(2))));
    let full = Lattice::from_elements(&gens);
    // HNF: only the first row has a nonzero real part
    let rows: Vec<[i128; 4]> = full.rows().iter().filter(|r| r[0] == 0).copied().collect();
    debug_assert_eq!(rows.len(), 3);
    Lattice::new(rows, full.den())
}

/// Every `y` in the Gross lattice with `nrd(y) = n`.
pub fn gross_vectors(order: &QuatOrder, n: u64) -> Vec<Quat> {
    let g = gross_lattice(order);
    let sv = ShortVectors::new(&g.gram_numerators(&order.alg));
    let target = 2 * n as i128 * g.den() * g.den();
    sv.vectors_of_value(target).iter().map(|x| g.element(x)).collect()
}

fn check_discriminant(order: &QuatOrder, d: Discriminant) -> Result<()> {
    if arith::kronecker(d.value(), order.alg.q) == 1 {
        return Err(precondition!(
            "q = {} splits in Q(sqrt {}); no embedding into the definite algebra",
            order.alg.q,
            d
        ));
    }
    Ok(())
}

fn certify(order: &QuatOrder, d: Discriminant, omega: &Quat) -> Result<()> {
    let t = d.parity();
    let n = (t * t - d.value()) / 4;
    let alg = &order.alg;
    if !order.contains(omega) || alg.trd(omega) != Ratio::from_integer(t as i128) || alg.nrd(omega) != Ratio::from_integer(n as i128) {
        return Err(certification!("omega = {omega} does not satisfy x^2 - {t}x + {n}"));
    }
    // Z[omega] is saturated: no (a + b omega)/m lies in O for m^2 | D
    for m in arith::prime_divisors(d.value().unsigned_abs()) {
        if d.value() % (m * m) as i64 != 0 {
            continue;
        }
        let m = m as i128;
        for a in 0..m {
            for b in 0..m {
                if (a, b) == (0, 0) {
                    continue;
                }
                let x = Quat::from_int(a).add(&omega.scale(Ratio::from_integer(b))).scale(Ratio::new(1, m));
                if order.contains(&x) {
                    return Err(certification!("embedding of {d} is not optimal"));
                }
            }
        }
    }
    Ok(())
}

/// All optimal embeddings into `order`, sorted by coordinates in its basis.
pub fn embedding_candidates(order: &QuatOrder, d: Discriminant) -> Result<Vec<TorusEmbedding>> {
    check_discriminant(order, d)?;
    let t = d.parity();
    let n = (t * t - d.value()) / 4;
    let mut out = Vec::new();
    for y in gross_vectors(order, d.value().unsigned_abs()) {
        let omega = Quat::from_int(t as i128).add(&y).scale(Ratio::new(1, 2));
        certify(order, d, &omega)?;
        let coords = order.lattice.coords(&omega).expect("certified omega lies in O");
        out.push(TorusEmbedding {
            disc: d,
            base: 0,
            omega: omega.num,
            den: omega.den,
            coords,
            trace: t,
            norm: n,
        });
    }
    out.sort_by(|a, b| a.coords.cmp(&b.coords));
    Ok(out)
}

/// The embedding into `order` with lexicographically smallest coordinates.
/// A single maximal order need not receive every admissible `D`.
pub fn optimal_embedding(order: &QuatOrder, d: Discriminant) -> Result<TorusEmbedding> {
    embedding_candidates(order, d)?
        .into_iter()
        .next()
        .ok_or_else(|| precondition!("{d} has no optimal embedding into this order"))
}

/// The smallest embedding into the left order of the first class that
/// admits one; every order of the genus is tried, so failure is a bug.
pub fn base_embedding(set: &ShimuraSet, d: Discriminant) -> Result<TorusEmbedding> {
    check_discriminant(&set.order, d)?;
    for (i, lo) in set.left_orders.iter().enumerate() {
        if let Some(mut e) = embedding_candidates(lo, d)?.into_iter().next() {
            e.base = i;
            return Ok(e);
        }
    }
    Err(certification!("no optimal embedding of {d} into any of the {} left orders", set.len()))
}

fn unit_conjugate(order: &QuatOrder, units: &[Quat], a: &Quat, b: &Quat) -> bool {
    let alg = &order.alg;
    units.iter().any(|u| alg.mul(&alg.mul(u, a), &alg.inverse(u)) == *b)
}

/// A second embedding into `order` not conjugate to `first` by a unit:
/// the smallest one inducing the same map to `O / P` (`P` the two-sided
/// ideal over `q`) if any, else `t - omega`.
pub fn alternative_embedding(set: &ShimuraSet, first: &TorusEmbedding) -> Result<TorusEmbedding> {
    let order = &set.left_orders[first.base];
    let units = order.units();
    let ramified = ramified_ideal(order)?;
    let w0 = first.omega();
    let minus_w0 = w0.scale(Ratio::from_integer(-1));
    let cands = embedding_candidates(order, first.disc)?;
    let same_orientation = cands.iter().find(|c| {
        let w = c.omega();
        ramified.contains(&w.add(&minus_w0)) && !unit_conjugate(order, &units, &w0, &w)
    });
    let conj = Quat::from_int(first.trace as i128).add(&minus_w0);
    let mut alt = match same_orientation {
        Some(c) => c.clone(),
        None => cands
            .into_iter()
            .find(|c| c.omega() == conj)
            .ok_or_else(|| certification!("conjugate embedding missing from the candidate list"))?,
    };
    alt.base = first.base;
    Ok(alt)
}

/// Images of the two generators `a, (-b + sqrt D)/2` of the ideal of a form.
fn ideal_generators(emb: &TorusEmbedding, class: &IdealClass) -> [Quat; 2] {
    let (a, b) = class.ideal_basis;
    // (-b + sqrt D)/2 = omega - (b + t)/2
    [Quat::from_int(a as i128), emb.image(-((b + emb.trace) / 2) as i128, 1)]
}

/// `iota(a) I` for the ideal `a` attached to a form and the base class `I`.
pub fn ideal_image(emb: &TorusEmbedding, set: &ShimuraSet, class: &IdealClass) -> RightIdeal {
    left_multiply(&ideal_generators(emb, class), &set.classes[emb.base].lattice, &set.order)
}

fn left_multiply(gens: &[Quat], lattice: &Lattice, order: &QuatOrder) -> RightIdeal {
    let alg = &order.alg;
    let prods: Vec<Quat> = gens
        .iter()
        .flat_map(|g| lattice.basis().into_iter().map(move |x| alg.mul(g, &x)))
        .collect();
    RightIdeal::new(*alg, Lattice::from_elements(&prods))
}

/// Index in `set` of the class of `iota(a) I`.
pub fn special_point(emb: &TorusEmbedding, class: &IdealClass, set: &ShimuraSet) -> Result<usize> {
    set.class_of(&ideal_image(emb, set, class))
}

/// `sigma -> x_sigma` over the whole class group, indexed like `group`.
pub fn phi_map(group: &ClassGroup, emb: &TorusEmbedding, set: &ShimuraSet, exec: Execution) -> Result<Vec<usize>> {
    if group.disc() != emb.disc {
        return Err(precondition!("embedding built for {} used with {}", emb.disc, group.disc()));
    }
    exec.map_range(0..group.order(), |s| special_point(emb, &group.ideal(s), set))
        .into_iter()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub pairs: usize,
    pub failures: Vec<(usize, usize)>,
}

/// Compares the class of `iota(a_{st}) I` with that of `iota(a_s) (iota(a_t) I)`
/// for every pair of classes.
pub fn cocycle_check(group: &ClassGroup, emb: &TorusEmbedding, set: &ShimuraSet, exec: Execution) -> Result<CocycleReport> {
    let phi = phi_map(group, emb, set, exec)?;
    let h = group.order();
    let order = &set.order;
    let inner: Vec<RightIdeal> = (0..h).map(|t| ideal_image(emb, set, &group.ideal(t))).collect();
    let rows = exec.map_range(0..h, |s| -> Result<Vec<(usize, usize)>> {
        let gens = ideal_generators(emb, &group.ideal(s));
        let mut bad = Vec::new();
        for (t, it) in inner.iter().enumerate() {
            let prod = left_multiply(&gens, &it.lattice, order);
            if set.class_of(&prod)? != phi[group.mul(s, t)] {
                bad.push((s, t));
            }
        }
        Ok(bad)
    });
    let mut failures = Vec::new();
    for r in rows {
        failures.extend(r?);
    }
    Ok(CocycleReport { pairs: h * h, failures })
}

/// Expected fiber sizes `r_i(|D|) / (2 w_i)`, where `r_i` counts vectors of
/// norm `|D|` in the Gross lattice of the left order of the `i`-th class.
pub fn gross_point_fibers(set: &ShimuraSet, d: Discriminant) -> Result<Vec<u64>> {
    let n = d.value().unsigned_abs();
    set.left_orders
        .iter()
        .zip(&set.weights)
        .map(|(lo, &w)| {
            let r = gross_vectors(lo, n).len() as u64;
            if !r.is_multiple_of(2 * w) {
                return Err(certification!("{r} Gross points not divisible by {}", 2 * w));
            }
            Ok(r / (2 * w))
        })
        .collect()
}

/// Number of classes mapping to each index.
pub fn fibers(phi: &[usize], size: usize) -> Vec<u64> {
    let mut out = vec![0u64; size];
    for &i in phi {
        out[i] += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqf::class_group_structure;
    use crate::quat::{build_algebra, maximal_order, right_ideal_classes};

    fn setup(q: u64) -> ShimuraSet {
        right_ideal_classes(&maximal_order(&build_algebra(q).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn embedding_for_minus_23() {
        let x = setup(11);
        let d = Discriminant::new(-23).unwrap();
        let e = optimal_embedding(&x.order, d).unwrap();
        assert_eq!((e.trace, e.norm), (1, 6));
        let alg = &x.order.alg;
        assert_eq!(alg.nrd(&e.omega()), Ratio::from_integer(6));
        assert!(optimal_embedding(&x.order, Discriminant::new(-7).unwrap()).is_err());
        assert!(base_embedding(&x, Discriminant::new(-7).unwrap()).is_err());
    }

    #[test]
    fn embedding_outside_the_fixed_order() {
        // -67 embeds into the left order of the second class only
        let x = setup(11);
        let d = Discriminant::new(-67).unwrap();
        assert!(optimal_embedding(&x.order, d).is_err());
        let e = base_embedding(&x, d).unwrap();
        assert_eq!(e.base, 1);
        let k = class_group_structure(d).unwrap();
        let phi = phi_map(&k, &e, &x, Execution::Sequential).unwrap();
        assert_eq!(fibers(&phi, x.len()), gross_point_fibers(&x, d).unwrap());
        assert!(cocycle_check(&k, &e, &x, Execution::Sequential).unwrap().failures.is_empty());
    }

    #[test]
    fn phi_and_fibers() {
        let x = setup(11);
        let d = Discriminant::new(-23).unwrap();
        let k = class_group_structure(d).unwrap();
        let e = base_embedding(&x, d).unwrap();
        let phi = phi_map(&k, &e, &x, Execution::Sequential).unwrap();
        assert_eq!(phi.len(), 3);
        assert_eq!(phi[0], 0);
        assert_eq!(fibers(&phi, x.len()), gross_point_fibers(&x, d).unwrap());
        let c = cocycle_check(&k, &e, &x, Execution::Sequential).unwrap();
        assert!(c.failures.is_empty());
        let alt = alternative_embedding(&x, &e).unwrap();
        assert_ne!(alt.omega, e.omega);
        let phi2 = phi_map(&k, &alt, &x, Execution::Sequential).unwrap();
        assert_eq!(fibers(&phi2, x.len()), fibers(&phi, x.len()));
    }
}
