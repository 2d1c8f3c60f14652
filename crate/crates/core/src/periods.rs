// SPDX-License-Identifier: Apache-2.0

//! Toric periods of the eigenform along special points, their reductions
//! modulo `p`, and scans over imaginary quadratic fields.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bqf::{class_group_structure, ClassGroup, Discriminant};
use crate::characters::{character_group, fourier, galois_orbits, inverse_fourier, AbelianGroup, Character};
use crate::curve::EllipticCurveData;
use crate::cyclo::{CycloInt, CycloRing};
use crate::error::{certification, precondition, Result};
use crate::exec::Execution;
use crate::ffield::{FieldEmbedding, Fq};
use crate::quat::eigen::DEFAULT_PRIMES;
use crate::quat::{build_algebra, eigenform, maximal_order, right_ideal_classes, Eigenform, ShimuraSet};
use crate::special::{alternative_embedding, base_embedding, cocycle_check, fibers, phi_map};

pub const DEFAULT_EPS: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToricPeriod {
    pub chi: Character,
    /// `h P_f(chi)` in `Z[zeta_n]`.
    pub exact: CycloInt,
    /// `P_f(chi)` in the residue field.
    pub modp: Fq,
    pub vzero: bool,
}

/// `h P_f(chi) = sum_sigma chi(sigma)^{-1} f(x_sigma)` and its reduction.
pub fn toric_period(
    f: &[i128],
    phi: &[usize],
    group: &ClassGroup,
    chi: &Character,
    ring: &Arc<CycloRing>,
    emb: &FieldEmbedding,
) -> Result<ToricPeriod> {
    let h = group.order();
    if (h as u64).is_multiple_of(emb.p) {
        return Err(precondition!("p = {} divides h = {h}", emb.p));
    }
    if !emb.n.is_multiple_of(AbelianGroup::exponent(group)) || ring.n != emb.n {
        return Err(precondition!("roots of unity of order {} do not cover the class group", emb.n));
    }
    let n = emb.n as usize;
    let factors = group.invariant_factors();
    let mut weights = vec![0i128; n];
    for (s, &x) in phi.iter().enumerate() {
        let t = chi.value_exponent(&factors, group.encode(s), emb.n) as usize;
        weights[(n - t) % n] += f[x];
    }
    let exact = ring.from_group_ring(&weights);
    let field = &emb.field;
    let h_inv = field.inv(&field.from_int(h as i128)).expect("p does not divide h");
    let modp = field.mul(&exact.reduce_mod(emb), &h_inv);
    Ok(ToricPeriod {
        chi: chi.clone(),
        exact,
        vzero: !modp.is_zero(),
        modp,
    })
}

/// Periods for every character, in [`character_group`] order.
pub fn all_periods(f: &[i128], phi: &[usize], group: &ClassGroup, emb: &FieldEmbedding) -> Result<Vec<ToricPeriod>> {
    let ring = CycloRing::new(emb.n);
    character_group(group)
        .iter()
        .map(|chi| toric_period(f, phi, group, chi, &ring, emb))
        .collect()
}

/// Why a discriminant was left out of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    NonFundamental,
    ExcludedField,
    Ramified,
    Split,
    PDividesH,
}

impl SkipReason {
    pub fn code(self) -> &'static str {
        match self {
            SkipReason::NonFundamental => "non-fundamental",
            SkipReason::ExcludedField => "excluded-field",
            SkipReason::Ramified => "ramified",
            SkipReason::Split => "split",
            SkipReason::PDividesH => "p-divides-h",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub disc: i64,
    pub h: usize,
    pub q0: u64,
    pub ell_k: usize,
    pub orbit_count: usize,
    /// Characters with `v_p(P_f(chi)) = 0`, as exponent vectors.
    pub xi_set: Vec<Vec<u64>>,
    pub log_bound: f64,
    /// `ell_K` computed from a second, non-conjugate embedding.
    pub ell_k_alt: usize,
    pub fourier_consistent: bool,
    pub xi_stable: bool,
    /// Failing pairs of the cocycle check, when it was run.
    pub cocycle_failures: Option<usize>,
    pub fibers: Vec<u64>,
    #[serde(skip)]
    pub phi: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScanEntry {
    Row(ScanRow),
    Skipped { disc: i64, reason: SkipReason },
}

impl ScanEntry {
    pub fn disc(&self) -> i64 {
        match self {
            ScanEntry::Row(r) => r.disc,
            ScanEntry::Skipped { disc, .. } => *disc,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowSummary {
    /// Window `(lo, hi]` on `|D|`.
    pub lo: u64,
    pub hi: u64,
    pub rows: usize,
    pub min_ell_k: usize,
    pub max_ell_k: usize,
    pub mean_ell_k: f64,
    pub mean_log_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub q: u64,
    pub p: u64,
    pub eps: f64,
    pub entries: Vec<ScanEntry>,
    pub windows: Vec<WindowSummary>,
    pub total_rows: usize,
}

impl ScanReport {
    pub fn rows(&self) -> impl Iterator<Item = &ScanRow> {
        self.entries.iter().filter_map(|e| match e {
            ScanEntry::Row(r) => Some(r),
            _ => None,
        })
    }

    /// One line per entry: `D,h,ellK,orbits,log_bound,reason`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("D,h,ellK,orbits,log_bound,reason\n");
        for e in &self.entries {
            match e {
                ScanEntry::Row(r) => {
                    let _ = writeln!(out, "{},{},{},{},{:.6},ok", r.disc, r.h, r.ell_k, r.orbit_count, r.log_bound);
                }
                ScanEntry::Skipped { disc, reason } => {
                    let _ = writeln!(out, "{disc},,,,,{}", reason.code());
                }
            }
        }
        out
    }
}

/// Everything fixed by `(curve, q, p)`: the class set and the eigenform.
#[derive(Clone, Debug)]
pub struct PeriodContext {
    pub q: u64,
    pub p: u64,
    pub set: ShimuraSet,
    pub form: Eigenform,
    /// Size of the field generated by the reduced eigenform values.
    pub q0: u64,
}

impl PeriodContext {
    pub fn new(curve: &EllipticCurveData, q: u64, p: u64) -> Result<Self> {
        let set = right_ideal_classes(&maximal_order(&build_algebra(q)?)?)?;
        Self::from_set(set, curve, p)
    }

    pub fn from_set(set: ShimuraSet, curve: &EllipticCurveData, p: u64) -> Result<Self> {
        let form = eigenform(&set, curve, p, &DEFAULT_PRIMES)?;
        Self::with_form(set, form, p)
    }

    pub fn with_form(set: ShimuraSet, form: Eigenform, p: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) || p == 2 {
            return Err(precondition!("p = {p} is not an odd prime"));
        }
        let field = crate::ffield::GaloisField::new(p, 1);
        let values: Vec<Fq> = form.coords.iter().map(|&c| field.from_int(c)).collect();
        let q0 = field
            .generated_subfield_size(&values)
            .to_u64()
            .ok_or_else(|| certification!("residue field too large"))?;
        Ok(PeriodContext {
            q: set.q(),
            p,
            set,
            form,
            q0,
        })
    }

    pub fn skip_reason(&self, d: i64) -> Option<SkipReason> {
        let Ok(disc) = Discriminant::new(d) else {
            return Some(SkipReason::NonFundamental);
        };
        if disc.is_excluded_field() {
            return Some(SkipReason::ExcludedField);
        }
        if d.unsigned_abs().is_multiple_of(self.q) {
            return Some(SkipReason::Ramified);
        }
        if crate::arith::kronecker(d, self.q) == 1 {
            return Some(SkipReason::Split);
        }
        None
    }

    /// `ell_K` and its certificates for one discriminant.
    pub fn nonvanishing_count(&self, d: Discriminant, eps: f64, cocycle: bool) -> Result<ScanRow> {
        let group = class_group_structure(d)?;
        let h = group.order();
        if (h as u64).is_multiple_of(self.p) {
            return Err(precondition!("p = {} divides h = {h}", self.p));
        }
        let emb = base_embedding(&self.set, d)?;
        let phi = phi_map(&group, &emb, &self.set, Execution::Sequential)?;
        let n = AbelianGroup::exponent(&group);
        let femb = FieldEmbedding::new(self.p, n)?;
        let f = &self.form.coords;
        let periods = all_periods(f, &phi, &group, &femb)?;
        let chars = character_group(&group);
        let factors = group.invariant_factors();
        let xi: Vec<usize> = (0..chars.len()).filter(|&i| periods[i].vzero).collect();

        // Fourier inversion reproduces f(x_sigma) mod p
        let field = &femb.field;
        let fvals: Vec<Fq> = phi.iter().map(|&x| field.from_int(f[x])).collect();
        let modp: Vec<Fq> = periods.iter().map(|t| t.modp.clone()).collect();
        let fourier_consistent =
            inverse_fourier(&modp, &group, &femb)? == fvals && fourier(&fvals, &group, &femb)? == modp;

        let orbits = galois_orbits(&chars, &factors, self.q0)?;
        let in_xi: Vec<bool> = (0..chars.len()).map(|i| periods[i].vzero).collect();
        let xi_stable = orbits.iter().all(|o| o.iter().all(|&i| in_xi[i] == in_xi[o[0]]));

        let alt = alternative_embedding(&self.set, &emb)?;
        let phi_alt = phi_map(&group, &alt, &self.set, Execution::Sequential)?;
        let ell_k_alt = all_periods(f, &phi_alt, &group, &femb)?.iter().filter(|t| t.vzero).count();

        let cocycle_failures = if cocycle {
            Some(cocycle_check(&group, &emb, &self.set, Execution::Sequential)?.failures.len())
        } else {
            None
        };
        Ok(ScanRow {
            disc: d.value(),
            h,
            q0: self.q0,
            ell_k: xi.len(),
            orbit_count: orbits.len(),
            xi_set: xi.iter().map(|&i| chars[i].exponents.clone()).collect(),
            log_bound: (d.value().unsigned_abs() as f64).ln().powf(1.0 - eps),
            ell_k_alt,
            fourier_consistent,
            xi_stable,
            cocycle_failures,
            fibers: fibers(&phi, self.set.len()),
            phi,
        })
    }

    /// Every negative discriminant with `dmin <= |D| <= dmax`; the ones left
    /// out carry a reason.
    pub fn horizontal_scan(&self, dmin: u64, dmax: u64, eps: f64, opts: ScanOptions) -> Result<ScanReport> {
        let ds: Vec<i64> = (dmin.max(3)..=dmax)
            .map(|a| -(a as i64))
            .filter(|d| d.rem_euclid(4) <= 1)
            .collect();
        let entries = opts.exec.map(&ds, |&d| -> Result<ScanEntry> {
            if let Some(reason) = self.skip_reason(d) {
                return Ok(ScanEntry::Skipped { disc: d, reason });
            }
            let disc = Discriminant::new(d)?;
            let h = class_group_structure(disc)?.order();
            if (h as u64).is_multiple_of(self.p) {
                return Ok(ScanEntry::Skipped {
                    disc: d,
                    reason: SkipReason::PDividesH,
                });
            }
            let cocycle = opts.cocycle_max_h.is_some_and(|m| h <= m);
            Ok(ScanEntry::Row(self.nonvanishing_count(disc, eps, cocycle)?))
        });
        let entries: Vec<ScanEntry> = entries.into_iter().collect::<Result<_>>()?;
        let rows: Vec<&ScanRow> = entries
            .iter()
            .filter_map(|e| match e {
                ScanEntry::Row(r) => Some(r),
                _ => None,
            })
            .collect();
        let windows = dyadic_windows(&rows);
        Ok(ScanReport {
            q: self.q,
            p: self.p,
            eps,
            total_rows: rows.len(),
            entries,
            windows,
        })
    }
}

#[derive(Clone, Copy, Debug)]
#[derive(Default)]
pub struct ScanOptions {
    pub exec: Execution,
    /// Run the cocycle check on fields with class number up to this bound.
    pub cocycle_max_h: Option<usize>,
}


fn dyadic_windows(rows: &[&ScanRow]) -> Vec<WindowSummary> {
    let mut by: BTreeMap<u32, Vec<&ScanRow>> = BTreeMap::new();
    for r in rows {
        let a = r.disc.unsigned_abs();
        // (2^k, 2^{k+1}]
        let k = 63 - (a - 1).leading_zeros();
        by.entry(k).or_default().push(r);
    }
    by.into_iter()
        .map(|(k, rs)| {
            let n = rs.len();
            WindowSummary {
                lo: 1 << k,
                hi: 1 << (k + 1),
                rows: n,
                min_ell_k: rs.iter().map(|r| r.ell_k).min().unwrap_or(0),
                max_ell_k: rs.iter().map(|r| r.ell_k).max().unwrap_or(0),
                mean_ell_k: rs.iter().map(|r| r.ell_k as f64).sum::<f64>() / n as f64,
                mean_log_bound: rs.iter().map(|r| r.log_bound).sum::<f64>() / n as f64,
            }
        })
        .collect()
}

/// Single-discriminant entry point.
pub fn nonvanishing_count(curve: &EllipticCurveData, q: u64, d: Discriminant, p: u64) -> Result<ScanRow> {
    PeriodContext::new(curve, q, p)?.nonvanishing_count(d, DEFAULT_EPS, false)
}

/// Scan over `dmin <= |D| <= dmax` with default options.
pub fn horizontal_scan(curve: &EllipticCurveData, q: u64, p: u64, dmin: u64, dmax: u64, eps: f64) -> Result<ScanReport> {
    PeriodContext::new(curve, q, p)?.horizontal_scan(dmin, dmax, eps, ScanOptions::default())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistRow {
    pub disc: i64,
    pub h: usize,
    /// Total variation distance of the special points to the `1/w` measure.
    pub tv: f64,
    /// Largest distance over subgroups of bounded index.
    pub subgroup_tv_max: f64,
    pub subgroups: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistReport {
    pub target: Vec<f64>,
    pub rows: Vec<EquidistRow>,
    /// Mean distance per window `(lo, hi]`.
    pub windows: Vec<(u64, u64, f64, usize)>,
}

/// The probability measure proportional to `1/w_x`.
pub fn target_measure(weights: &[u64]) -> Vec<f64> {
    let inv: Vec<f64> = weights.iter().map(|&w| 1.0 / w as f64).collect();
    let total: f64 = inv.iter().sum();
    inv.iter().map(|v| v / total).collect()
}

pub fn tv_distance(points: &[usize], target: &[f64]) -> f64 {
    let mut emp = vec![0.0; target.len()];
    for &x in points {
        emp[x] += 1.0 / points.len() as f64;
    }
    0.5 * emp.iter().zip(target).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Distances to the `1/w` measure for every scanned row, and for its
/// subgroups of index at most `max_index`; window means over `windows`.
pub fn equidist_stats(rows: &[&ScanRow], set: &ShimuraSet, max_index: usize, windows: &[(u64, u64)], exec: Execution) -> Result<EquidistReport> {
    let target = target_measure(&set.weights);
    let out = exec.map(rows, |r| -> Result<EquidistRow> {
        let tv = tv_distance(&r.phi, &target);
        let group = class_group_structure(Discriminant::new(r.disc)?)?;
        let subs = group.subgroups(max_index);
        let subgroup_tv_max = subs
            .iter()
            .map(|s| tv_distance(&s.iter().map(|&i| r.phi[i]).collect::<Vec<_>>(), &target))
            .fold(0.0, f64::max);
        Ok(EquidistRow {
            disc: r.disc,
            h: r.h,
            tv,
            subgroup_tv_max,
            subgroups: subs.len(),
        })
    });
    let rows: Vec<EquidistRow> = out.into_iter().collect::<Result<_>>()?;
    let windows = windows
        .iter()
        .map(|&(lo, hi)| {
            let sel: Vec<f64> = rows
                .iter()
                .filter(|r| (lo + 1..=hi).contains(&r.disc.unsigned_abs()))
                .map(|r| r.tv)
                .collect();
            let mean = if sel.is_empty() { f64::NAN } else { sel.iter().sum::<f64>() / sel.len() as f64 };
            (lo, hi, mean, sel.len())
        })
        .collect();
    Ok(EquidistReport { target, rows, windows })
}
