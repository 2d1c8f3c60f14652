// SPDX-License-Identifier: Apache-2.0

//! Class groups of imaginary quadratic fields, modelled by reduced positive
//! definite binary quadratic forms under Gauss composition.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{self, egcd};
use crate::error::{invalid, precondition, Result};

/// A negative fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(invalid!("discriminant {d} must be negative"));
        }
        if !Self::is_fundamental(d) {
            return Err(invalid!("{d} is not a fundamental discriminant"));
        }
        Ok(Discriminant(d))
    }

    pub fn is_fundamental(d: i64) -> bool {
        if d >= 0 {
            return false;
        }
        match d.rem_euclid(4) {
            1 => arith::is_squarefree(d.unsigned_abs()),
            0 => {
                let m = d / 4;
                matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree(m.unsigned_abs())
            }
            _ => false,
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }

    /// `D mod 2`, the trace of the canonical generator of the maximal order.
    pub fn parity(self) -> i64 {
        self.0.rem_euclid(2)
    }

    pub fn is_excluded_field(self) -> bool {
        self.0 == -3 || self.0 == -4
    }
}

impl TryFrom<i64> for Discriminant {
    type Error = crate::error::Error;
    fn try_from(d: i64) -> Result<Self> {
        Discriminant::new(d)
    }
}

impl From<Discriminant> for i64 {
    fn from(d: Discriminant) -> i64 {
        d.0
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The form `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl From<[i64; 3]> for QuadForm {
    fn from([a, b, c]: [i64; 3]) -> Self {
        QuadForm { a, b, c }
    }
}

impl From<QuadForm> for [i64; 3] {
    fn from(f: QuadForm) -> Self {
        [f.a, f.b, f.c]
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    /// The form with leading coefficient `a` and middle coefficient `b` on
    /// discriminant `d`; `4a | b^2 - d` is required.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = b * b - d;
        (a > 0 && num % (4 * a) == 0).then(|| QuadForm::new(a, b, num / (4 * a)))
    }

    pub fn principal(d: Discriminant) -> Self {
        let t = d.parity();
        QuadForm::new(1, t, (t - d.value()) / 4)
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    fn normalize(self) -> Self {
        let QuadForm { a, b, .. } = self;
        let d = self.discriminant();
        let k = Integer::div_floor(&(a - b), &(2 * a));
        let b = b + 2 * a * k;
        QuadForm::new(a, b, (b * b - d) / (4 * a))
    }

    /// Reduced representative of the proper equivalence class.
    pub fn reduce(self) -> Self {
        assert!(self.a > 0, "only positive definite forms are supported");
        let mut f = self.normalize();
        while f.a > f.c {
            f = QuadForm::new(f.c, -f.b, f.a).normalize();
        }
        if f.a == f.c && f.b < 0 {
            f.b = -f.b;
        }
        f
    }

    pub fn inverse(&self) -> Self {
        QuadForm::new(self.a, -self.b, self.c).reduce()
    }

    /// Gauss composition followed by reduction.
    pub fn compose(&self, other: &QuadForm) -> Result<QuadForm> {
        let d = self.discriminant();
        if other.discriminant() != d {
            return Err(precondition!(
                "cannot compose forms of discriminants {} and {}",
                d,
                other.discriminant()
            ));
        }
        let (f1, f2) = if self.a > other.a {
            (other, self)
        } else {
            (self, other)
        };
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, dd) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let (g, u, _) = egcd(a2, a1);
            (u, g)
        };
        let (x2, y2, d1) = if s % dd == 0 {
            (0, -1, dd)
        } else {
            let (g, u, v) = egcd(s, dd);
            (u, -v, g)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - d as i128) / (4 * a3);
        debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d as i128);
        Ok(QuadForm::new(a3 as i64, b3 as i64, c3 as i64).reduce())
    }

    pub fn pow(&self, e: u64) -> QuadForm {
        let d = Discriminant(self.discriminant());
        let mut acc = QuadForm::principal(d);
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same discriminant");
            }
            base = base.compose(&base).expect("same discriminant");
            e >>= 1;
        }
        acc
    }

    /// Act by the substitution `(x, y) -> (p x + q y, r x + s y)`, `ps - qr = 1`.
    pub fn transform(&self, p: i64, q: i64, r: i64, s: i64) -> QuadForm {
        debug_assert_eq!(p * s - q * r, 1);
        let QuadForm { a, b, c } = *self;
        QuadForm::new(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )
    }
}

/// All reduced forms of discriminant `d`, sorted lexicographically by `(a, b, c)`.
pub fn enumerate_reduced_forms(d: Discriminant) -> Vec<QuadForm> {
    let dv = d.value();
    let mut out = Vec::new();
    let amax = arith::isqrt((dv.unsigned_abs() / 3) as u128) as i64;
    for a in 1..=amax {
        for b in -a + 1..=a {
            if let Some(f) = QuadForm::from_ab(a, b, dv) {
                if f.is_reduced() {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    out
}

/// Ideal `Z a + Z (-b + sqrt(D))/2` of the maximal order attached to a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealClass {
    pub form: QuadForm,
    /// `(a, b)`: the ideal is `Z a + Z (-b + sqrt(D))/2`.
    pub ideal_basis: (i64, i64),
}

impl IdealClass {
    pub fn from_form(form: QuadForm) -> Self {
        IdealClass {
            form,
            ideal_basis: (form.a, form.b),
        }
    }

    pub fn norm(&self) -> i64 {
        self.ideal_basis.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub form: QuadForm,
    pub order: u64,
}

/// The class group with an explicit invariant-factor decomposition
/// `Z/n_1 x ... x Z/n_d`, `n_1 | n_2 | ... | n_d`.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    disc: Discriminant,
    forms: Vec<QuadForm>,
    factors: Vec<Factor>,
    exponents: Vec<Vec<u64>>,
    index: HashMap<QuadForm, usize>,
    by_exponent: Vec<usize>,
}

impl ClassGroup {
    pub fn disc(&self) -> Discriminant {
        self.disc
    }

    /// The class number.
    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn invariant_factors(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.order).collect()
    }

    /// Exponent of the group (largest invariant factor).
    pub fn exponent(&self) -> u64 {
        self.factors.last().map_or(1, |f| f.order)
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        self.index.get(&f.reduce()).copied()
    }

    pub fn encode(&self, idx: usize) -> &[u64] {
        &self.exponents[idx]
    }

    pub fn decode(&self, exps: &[u64]) -> usize {
        let mut k = 0usize;
        for (e, f) in exps.iter().zip(&self.factors) {
            k = k * f.order as usize + (*e % f.order) as usize;
        }
        self.by_exponent[k]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        let e: Vec<u64> = self.exponents[x]
            .iter()
            .zip(&self.exponents[y])
            .zip(&self.factors)
            .map(|((a, b), f)| (a + b) % f.order)
            .collect();
        self.decode(&e)
    }

    pub fn inv(&self, x: usize) -> usize {
        let e: Vec<u64> = self.exponents[x]
            .iter()
            .zip(&self.factors)
            .map(|(a, f)| (f.order - a) % f.order)
            .collect();
        self.decode(&e)
    }

    pub fn ideal(&self, idx: usize) -> IdealClass {
        IdealClass::from_form(self.forms[idx])
    }

    /// All subgroups of index at most `max_index`, as sorted element lists.
    pub fn subgroups(&self, max_index: usize) -> Vec<Vec<usize>> {
        let h = self.order();
        let close = |gens: &[usize]| -> Vec<usize> {
            let mut inside = vec![false; h];
            inside[0] = true;
            let mut members = vec![0usize];
            let mut i = 0;
            while i < members.len() {
                let m = members[i];
                for &g in gens {
                    let p = self.mul(m, g);
                    if !inside[p] {
                        inside[p] = true;
                        members.push(p);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            members
        };
        let mut found: Vec<Vec<usize>> = vec![vec![0]];
        let mut frontier = vec![vec![0usize]];
        while let Some(sub) = frontier.pop() {
            for x in 0..h {
                if sub.binary_search(&x).is_ok() {
                    continue;
                }
                let mut gens = sub.clone();
                gens.push(x);
                let bigger = close(&gens);
                if !found.contains(&bigger) {
                    found.push(bigger.clone());
                    frontier.push(bigger);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = found
            .into_iter()
            .filter(|s| h / s.len() <= max_index)
            .collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        out
    }
}

/// Compute the class group of `d` with its invariant-factor decomposition.
///
/// Generators are extracted greedily: at each step the lexicographically
/// smallest form whose image in the quotient by the subgroup found so far has
/// maximal order is chosen, then corrected by that subgroup so that its order
/// equals its quotient order.
pub fn class_group_structure(d: Discriminant) -> Result<ClassGroup> {
    let forms = enumerate_reduced_forms(d);
    let h = forms.len();
    let index: HashMap<QuadForm, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mul = |x: usize, y: usize| -> usize {
        let f = forms[x].compose(&forms[y]).expect("same discriminant");
        index[&f]
    };
    debug_assert_eq!(forms[0], QuadForm::principal(d));

    // Elements of the subgroup found so far, with exponent vectors against
    // the generators (largest order first).
    let mut sub: HashMap<usize, Vec<u64>> = HashMap::from([(0usize, Vec::new())]);
    let mut gens: Vec<(usize, u64)> = Vec::new();
    while sub.len() < h {
        let mut best: Option<(usize, u64)> = None;
        for x in 0..h {
            if sub.contains_key(&x) {
                continue;
            }
            let mut m = 1u64;
            let mut y = x;
            while !sub.contains_key(&y) {
                y = mul(y, x);
                m += 1;
            }
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((x, m));
            }
        }
        let (x, m) = best.expect("proper subgroup has a complement element");
        let mut y = 0;
        for _ in 0..m {
            y = mul(y, x);
        }
        let s = &sub[&y];
        let mut g = x;
        for (i, &(gi, _)) in gens.iter().enumerate() {
            if !s[i].is_multiple_of(m) {
                return Err(crate::error::certification!(
                    "greedy decomposition failed at D={}",
                    d.value()
                ));
            }
            let ni = gens[i].1;
            let k = (ni - (s[i] / m) % ni) % ni;
            for _ in 0..k {
                g = mul(g, gi);
            }
        }
        let mut next = HashMap::with_capacity(sub.len() * m as usize);
        for (elem, exps) in &sub {
            let mut cur = *elem;
            for k in 0..m {
                let mut e = exps.clone();
                e.push(k);
                next.insert(cur, e);
                cur = mul(cur, g);
            }
        }
        sub = next;
        gens.push((g, m));
    }

    // Ascending divisibility order n_1 | n_2 | ... ; drop trivial factors.
    gens.reverse();
    let factors: Vec<Factor> = gens
        .iter()
        .map(|&(g, m)| Factor {
            form: forms[g],
            order: m,
        })
        .collect();
    let d_count = factors.len();
    let mut exponents = vec![Vec::new(); h];
    for (elem, mut e) in sub {
        e.reverse();
        debug_assert_eq!(e.len(), d_count);
        exponents[elem] = e;
    }
    let mut by_exponent = vec![usize::MAX; h];
    for (elem, e) in exponents.iter().enumerate() {
        let mut k = 0usize;
        for (x, f) in e.iter().zip(&factors) {
            k = k * f.order as usize + *x as usize;
        }
        by_exponent[k] = elem;
    }
    Ok(ClassGroup {
        disc: d,
        forms,
        factors,
        exponents,
        index,
        by_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn fundamental_discriminants() {
        assert!(Discriminant::is_fundamental(-3));
        assert!(Discriminant::is_fundamental(-4));
        assert!(Discriminant::is_fundamental(-84));
        assert!(!Discriminant::is_fundamental(-12));
        assert!(!Discriminant::is_fundamental(-16));
        assert!(!Discriminant::is_fundamental(-27));
        assert!(!Discriminant::is_fundamental(-5));
        assert!(Discriminant::new(-12).is_err());
        assert!(Discriminant::new(5).is_err());
    }

    #[test]
    fn reduced_forms_small_discriminants() {
        assert_eq!(
            enumerate_reduced_forms(disc(-23)),
            vec![
                QuadForm::new(1, 1, 6),
                QuadForm::new(2, -1, 3),
                QuadForm::new(2, 1, 3)
            ]
        );
        assert_eq!(enumerate_reduced_forms(disc(-4)), vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(enumerate_reduced_forms(disc(-7)), vec![QuadForm::new(1, 1, 2)]);
    }

    #[test]
    fn composition_at_minus_23() {
        let e = QuadForm::new(1, 1, 6);
        let f = QuadForm::new(2, 1, 3);
        let g = QuadForm::new(2, -1, 3);
        assert_eq!(e.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&g).unwrap(), e);
        assert_eq!(f.compose(&f).unwrap(), g);
        assert!(f.compose(&QuadForm::new(1, 1, 2)).is_err());
    }

    #[test]
    fn structures() {
        let g = class_group_structure(disc(-23)).unwrap();
        assert_eq!(g.invariant_factors(), vec![3]);
        assert_eq!(g.factors()[0].form, QuadForm::new(2, -1, 3));
        let g = class_group_structure(disc(-4)).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.invariant_factors().is_empty());
        let g = class_group_structure(disc(-84)).unwrap();
        assert_eq!(g.invariant_factors(), vec![2, 2]);
    }

    #[test]
    fn reduce_is_idempotent_on_transforms() {
        let f = QuadForm::new(2, 1, 3);
        let t = f.transform(3, 1, 2, 1);
        assert_eq!(t.discriminant(), -23);
        assert_eq!(t.reduce(), f);
    }

    #[test]
    fn subgroups_of_klein_group() {
        let g = class_group_structure(disc(-84)).unwrap();
        let subs = g.subgroups(4);
        // whole group, three of order 2, trivial
        assert_eq!(subs.len(), 5);
        assert_eq!(subs[0].len(), 4);
    }
}
