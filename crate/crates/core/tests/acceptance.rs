// SPDX-License-Identifier: Apache-2.0

//! Acceptance run: one PASS/FAIL line per criterion. Expected values come
//! from independent recomputation in this file wherever possible.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use tpl_core::bqf::{class_group_structure, Discriminant};
use tpl_core::curve::EllipticCurveData;
use tpl_core::exec::Execution;
use tpl_core::ledger::{excluded_primes, ideal_i_gcd, kolyvagin_exponent, sha_exponent, KolyvaginFlags};
use tpl_core::lvalue::{central_lvalue, min_terms, waldspurger_consistency, Consistency};
use tpl_core::periods::{equidist_stats, PeriodContext, ScanOptions, ScanReport};
use tpl_core::quat::{brandt_matrices, build_algebra, eigenform, is_isomorphic, maximal_order, right_ideal_classes, BrandtMatrix, ShimuraSet};
use tpl_core::special::{base_embedding, phi_map};
use tpl_core::stability::{abelian_groups_up_to, min_stable_generating_size, min_stable_generating_size_bruteforce, stability_bound, DEFAULT_MAX_ORDER};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn is_fundamental(d: i64) -> bool {
    let squarefree = |n: i64| (2..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0);
    match d.rem_euclid(4) {
        1 => squarefree(-d),
        0 => matches!((d / 4).rem_euclid(4), 2 | 3) && squarefree(-d / 4),
        _ => false,
    }
}

/// Reduced primitive forms `(a, b, c)` of discriminant `d`, by direct search.
fn count_reduced_forms(d: i64) -> usize {
    let mut n = 0;
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in (-a + 1)..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) || gcd(gcd(a, b), c) != 1 {
                continue;
            }
            n += 1;
        }
        a += 1;
    }
    n
}

fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    if (1..p).any(|x| x * x % p == a) {
        1
    } else {
        -1
    }
}

fn class_set(q: u64) -> ShimuraSet {
    right_ideal_classes(&maximal_order(&build_algebra(q).unwrap()).unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut fields = 0;
    let mut axioms = 0;
    for n in 3..=2000i64 {
        let d = -n;
        if !is_fundamental(d) {
            continue;
        }
        let g = class_group_structure(Discriminant::new(d).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let h = g.order();
        let expected = count_reduced_forms(d);
        ensure(h == expected, || format!("D = {d}: structure gives {h}, reduced forms {expected}"))?;
        let product: u64 = g.invariant_factors().iter().product();
        ensure(product as usize == h, || format!("D = {d}: invariant factors multiply to {product}"))?;
        fields += 1;
        if n > 500 {
            continue;
        }
        let e = g.identity();
        let forms = g.forms();
        for x in 0..h {
            ensure(g.mul(x, e) == x && g.mul(x, g.inv(x)) == e, || format!("D = {d}: identity or inverse fails at {x}"))?;
            for y in 0..h {
                let xy = g.mul(x, y);
                ensure(xy == g.mul(y, x), || format!("D = {d}: not commutative"))?;
                let composed = forms[x].compose(&forms[y]).map_err(|e| e.to_string())?.reduce();
                ensure(composed == forms[xy], || format!("D = {d}: table disagrees with composition"))?;
                for z in 0..h {
                    ensure(g.mul(xy, z) == g.mul(x, g.mul(y, z)), || format!("D = {d}: not associative"))?;
                }
            }
        }
        axioms += 1;
    }
    Ok(format!("{fields} fields with |D| <= 2000, group axioms on {axioms} with |D| <= 500"))
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    for q in tpl_core::arith::primes_up_to(100) {
        let set = class_set(q);
        let mut mass = Ratio::new(0i128, 1);
        for lo in &set.left_orders {
            mass += Ratio::new(1, lo.unit_count() as i128);
        }
        ensure(mass == Ratio::new(q as i128 - 1, 24), || format!("q = {q}: mass {mass}"))?;
        for i in 0..set.len() {
            for j in 0..i {
                ensure(!is_isomorphic(&set.classes[i], &set.classes[j]), || format!("q = {q}: classes {i}, {j} coincide"))?;
            }
        }
        total += set.len();
    }
    Ok(format!("25 primes, {total} pairwise distinct classes"))
}

fn matmul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn criterion_3() -> Outcome {
    let sigma = |n: u64| (1..=n).filter(|d| n.is_multiple_of(*d)).sum::<u64>();
    let mut products = 0;
    for q in [11u64, 17, 19, 37] {
        let set = class_set(q);
        let bs = brandt_matrices(&set, 132, Execution::default()).map_err(|e| e.to_string())?;
        let b = |n: u64| -> &BrandtMatrix { &bs[n as usize - 1] };
        let w = &set.weights;
        for n in 1..=20u64 {
            let m = &b(n).entries;
            if n % q != 0 {
                for row in m {
                    ensure(row.iter().sum::<u64>() == sigma(n), || format!("q = {q}: row sum of B({n})"))?;
                }
            }
            for i in 0..set.len() {
                for j in 0..set.len() {
                    ensure(w[j] * m[i][j] == w[i] * m[j][i], || format!("q = {q}: B({n}) not self-adjoint"))?;
                }
            }
            for k in 1..=20u64 {
                ensure(matmul(m, &b(k).entries) == matmul(&b(k).entries, m), || format!("q = {q}: B({n}), B({k}) do not commute"))?;
            }
        }
        for m in 2..=12u64 {
            for n in 2..=12u64 {
                if gcd(m as i64, n as i64) != 1 {
                    continue;
                }
                ensure(matmul(&b(m).entries, &b(n).entries) == b(m * n).entries, || format!("q = {q}: B({m})B({n}) != B({})", m * n))?;
                products += 1;
            }
        }
    }
    Ok(format!("row sums, commutation and self-adjointness for n <= 20; {products} coprime products"))
}

/// Rank of an integer matrix by fraction-free elimination.
fn rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let (a, b) = (rows[r][c], rows[i][c]);
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x = *x * a - y * b;
                }
            }
        }
        r += 1;
    }
    r
}

fn criterion_4() -> Outcome {
    let e = EllipticCurveData::curve_11a1();
    let set = class_set(11);
    let primes = [2u64, 3, 5, 7, 13];
    let f = eigenform(&set, &e, 7, &primes).map_err(|e| e.to_string())?;
    let bs = brandt_matrices(&set, 13, Execution::Sequential).map_err(|e| e.to_string())?;
    let mut stacked = Vec::new();
    for l in primes {
        let a = e.count_points_exhaustive(l) as i64;
        let ap = (l as i64 + 1 - a) as i128;
        let b = &bs[l as usize - 1];
        let bv = b.apply(&f.coords);
        ensure(bv.iter().zip(&f.coords).all(|(x, v)| *x == ap * v), || format!("B({l}) v != {ap} v"))?;
        for (i, row) in b.entries.iter().enumerate() {
            stacked.push(row.iter().enumerate().map(|(j, &x)| x as i128 - if i == j { ap } else { 0 }).collect());
        }
    }
    let dim = set.len() - rank(stacked);
    ensure(dim == 1, || format!("eigenspace dimension {dim}"))?;
    let reduced: BTreeSet<i128> = f.coords.iter().map(|c| c.rem_euclid(7)).collect();
    ensure(reduced.len() > 1, || "eigenform constant mod 7".to_string())?;
    Ok(format!("v = {:?}, eigenspace dimension 1, {} distinct residues mod 7", f.coords, reduced.len()))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut equal = 0;
    let mut below = Vec::new();
    for g in abelian_groups_up_to(36) {
        let order: u64 = g.iter().product();
        for q in [2u64, 3, 5, 7] {
            if gcd(order as i64, q as i64) != 1 {
                continue;
            }
            let bound = stability_bound(&g, q).map_err(|e| e.to_string())?.exact as usize;
            let search = min_stable_generating_size(&g, q, DEFAULT_MAX_ORDER).map_err(|e| e.to_string())?;
            let found = search.min_size;
            if order <= 16 {
                let brute = min_stable_generating_size_bruteforce(&g, q).map_err(|e| e.to_string())?;
                ensure(brute == found, || format!("G = {g:?}, q = {q}: search {found}, enumeration {brute}"))?;
            }
            if found < bound {
                let name: Vec<String> = g.iter().map(|n| format!("Z/{n}")).collect();
                below.push(format!("{} q={q}: {found} < {bound} via {:?}", name.join(" x "), search.witness));
            }
            equal += usize::from(found == bound);
            checked += 1;
        }
    }
    if below.is_empty() {
        Ok(format!("{checked} (G, q) pairs, bound attained on {equal}"))
    } else {
        for line in &below {
            println!("    {line}");
        }
        Err(format!("minimum below the degree bound on {} of {checked} pairs (listed above)", below.len()))
    }
}

fn criterion_6(scan: &ScanReport) -> Outcome {
    let rows: Vec<_> = scan.rows().collect();
    let bad: Vec<i64> = rows.iter().filter(|r| !r.fourier_consistent || !r.xi_stable).map(|r| r.disc).collect();
    ensure(bad.is_empty(), || format!("failing discriminants {bad:?}"))?;
    ensure(rows.iter().all(|r| !(r.h as u64).is_multiple_of(7)), || "p divides h on a scanned row".to_string())?;
    Ok(format!("{} rows, Fourier inversion and orbit stability on all", rows.len()))
}

fn criterion_7(scan: &ScanReport) -> Outcome {
    let mut pairs = 0;
    for r in scan.rows().filter(|r| r.h <= 50) {
        ensure(r.cocycle_failures == Some(0), || format!("D = {}: {:?} failing pairs", r.disc, r.cocycle_failures))?;
        pairs += r.h * r.h;
    }
    Ok(format!("{pairs} pairs checked"))
}

fn criterion_8(scan: &ScanReport) -> Outcome {
    let bad: Vec<i64> = scan.rows().filter(|r| r.ell_k != r.ell_k_alt).map(|r| r.disc).collect();
    ensure(bad.is_empty(), || format!("ell_K differs on {bad:?}"))?;
    Ok(format!("{} rows agree", scan.rows().count()))
}

fn criterion_9(ctx: &PeriodContext) -> Outcome {
    let e = EllipticCurveData::curve_11a1();
    let discs: Vec<i64> = (23..)
        .map(|n: i64| -n)
        .filter(|&d| is_fundamental(d) && d % 11 != 0 && legendre(d, 11) == -1)
        .take(10)
        .collect();
    let base = central_lvalue(&e, 1, min_terms(11, 1e-12), Execution::default()).map_err(|e| e.to_string())?;
    let mut inconclusive = 0;
    let mut summary = Vec::new();
    for d in discs {
        let disc = Discriminant::new(d).map_err(|e| e.to_string())?;
        let group = class_group_structure(disc).map_err(|e| e.to_string())?;
        let emb = base_embedding(&ctx.set, disc).map_err(|e| e.to_string())?;
        let phi = phi_map(&group, &emb, &ctx.set, Execution::Sequential).map_err(|e| e.to_string())?;
        let period_sum: i128 = phi.iter().map(|&x| ctx.form.coords[x]).sum();
        let cond = 11u128 * (d * d) as u128;
        let twisted = central_lvalue(&e, d, min_terms(cond, 1e-12), Execution::default()).map_err(|e| e.to_string())?;
        let report = waldspurger_consistency(period_sum, &base, &twisted);
        match report.outcome {
            Consistency::Inconsistent => {
                return Err(format!("D = {d}: period sum {period_sum}, L-product {:.3e}", report.l_product))
            }
            Consistency::Inconclusive => inconclusive += 1,
            Consistency::Consistent => {}
        }
        summary.push(format!("{d}:{}", if period_sum != 0 { "nz" } else { "0" }));
    }
    ensure(inconclusive <= 1, || format!("{inconclusive} inconclusive"))?;
    Ok(format!("[{}], {inconclusive} inconclusive", summary.join(" ")))
}

fn criterion_10() -> Outcome {
    let e = EllipticCurveData::curve_11a1();
    let ex = excluded_primes(&e).map_err(|e| e.to_string())?;
    ensure(ex == BTreeSet::from([2, 3, 5, 11]), || format!("excluded primes {ex:?}"))?;
    let g = ideal_i_gcd(&e, 100).map_err(|e| e.to_string())?.value;
    ensure(g == 5, || format!("ideal gcd {g}"))?;
    let k = |f: KolyvaginFlags| kolyvagin_exponent(f, 5, 3, 7).unwrap();
    let base = k(KolyvaginFlags::default());
    let unit = |i: usize| {
        let mut f = KolyvaginFlags::default();
        *[&mut f.c2, &mut f.c4, &mut f.c5, &mut f.c6, &mut f.c7, &mut f.c8][i] = 1;
        k(f) - base
    };
    let deltas: Vec<u64> = (0..6).map(unit).collect();
    ensure(deltas == [3, 12, 1, 1, 1, 1], || format!("deltas {deltas:?}"))?;
    ensure(sha_exponent(0, &[]) == 0, || "sha exponent".to_string())?;
    Ok("{2, 3, 5, 11}, gcd 5, deltas (3,12,1,1,1,1), sha 0".to_string())
}

fn criterion_11(scan: &ScanReport, ctx: &PeriodContext) -> Outcome {
    let rows: Vec<_> = scan.rows().collect();
    let windows = [(4, 200), (200, 500), (500, 1000), (1000, 2000)];
    let stats = equidist_stats(&rows, &ctx.set, 1, &windows, Execution::default()).map_err(|e| e.to_string())?;
    for (lo, hi, mean, n) in &stats.windows {
        println!("    |D| in ({lo}, {hi}]: {n} rows, mean TV {mean:.4}");
    }
    let small = stats.windows[0].2;
    let large = stats.windows[3].2;
    ensure(large < small, || format!("mean TV {large:.4} over (1000, 2000] is not below {small:.4} over (4, 200]"))?;
    Ok(format!("mean TV {small:.4} -> {large:.4}"))
}

/// Criteria whose statement is contradicted by explicit counterexamples.
/// They still print FAIL; only other failures make the run exit nonzero.
const KNOWN_UNATTAINABLE: [usize; 1] = [5];

#[derive(Default)]
struct Tally {
    failed: Vec<usize>,
}

impl Tally {
    fn report(&mut self, n: usize, outcome: Outcome, start: Instant) {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2}: PASS  {detail}  [{secs:.1}s]"),
            Err(detail) => {
                self.failed.push(n);
                println!("criterion {n:>2}: FAIL  {detail}  [{secs:.1}s]")
            }
        }
    }

    fn unexpected(&self) -> Vec<usize> {
        self.failed.iter().copied().filter(|n| !KNOWN_UNATTAINABLE.contains(n)).collect()
    }
}

fn main() -> ExitCode {
    let mut tally = Tally::default();
    let singles: [(usize, fn() -> Outcome); 5] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
    ];
    for (n, f) in singles {
        let t = Instant::now();
        tally.report(n, f(), t);
    }

    let t = Instant::now();
    let ctx = PeriodContext::new(&EllipticCurveData::curve_11a1(), 11, 7).expect("context for 11a1");
    let scan = ctx
        .horizontal_scan(5, 2000, 0.1, ScanOptions { exec: Execution::default(), cocycle_max_h: Some(50) })
        .expect("reference scan");
    println!("reference scan: {} rows in {:.1}s", scan.total_rows, t.elapsed().as_secs_f64());
    for (n, f) in [(6, criterion_6 as fn(&ScanReport) -> Outcome), (7, criterion_7), (8, criterion_8)] {
        let t = Instant::now();
        tally.report(n, f(&scan), t);
    }
    let t = Instant::now();
    tally.report(9, criterion_9(&ctx), t);
    let t = Instant::now();
    tally.report(10, criterion_10(), t);
    let t = Instant::now();
    tally.report(11, criterion_11(&scan, &ctx), t);

    println!("acceptance: {} of 11 criteria pass", 11 - tally.failed.len());
    let unexpected = tally.unexpected();
    for n in tally.failed.iter().filter(|n| KNOWN_UNATTAINABLE.contains(n)) {
        println!("acceptance: criterion {n} fails by counterexample to its statement; see README");
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
