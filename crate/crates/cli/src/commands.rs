// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand; each returns the text written to stdout.

use std::fmt::Write;

use serde_json::{json, Value};
use tpl_core::bqf::{class_group_structure, enumerate_reduced_forms, Discriminant};
use tpl_core::cache::Cache;
use tpl_core::characters::AbelianGroup;
use tpl_core::curve::Reduction;
use tpl_core::ffield::FieldEmbedding;
use tpl_core::ledger::{excluded_primes, ideal_i_gcd, kolyvagin_exponent, sha_exponent, KolyvaginFlags};
use tpl_core::lvalue::{central_lvalue, min_terms};
use tpl_core::periods::{all_periods, equidist_stats, PeriodContext, ScanOptions, ScanReport};
use tpl_core::quat::eigen::DEFAULT_PRIMES;
use tpl_core::quat::{brandt_matrix, eigenform, ShimuraSet};
use tpl_core::serde_util::WideRatio;
use tpl_core::special::{base_embedding, fibers, gross_point_fibers, phi_map};
use tpl_core::stability::{min_stable_generating_size, stability_bound, DEFAULT_MAX_ORDER};
use tpl_core::{arith, Error, Execution, Result};

use crate::config::{Format, RunConfig};
use crate::Command;

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn shimura_set(cfg: &RunConfig) -> Result<ShimuraSet> {
    Cache::new(&cfg.cache_dir).shimura_set(cfg.q)
}

fn context(cfg: &RunConfig) -> Result<PeriodContext> {
    PeriodContext::from_set(shimura_set(cfg)?, &cfg.curve()?, cfg.p)
}

fn admissible(ctx: &PeriodContext, d: i64) -> Result<Discriminant> {
    match ctx.skip_reason(d) {
        Some(reason) => Err(Error::Precondition(format!("D = {d} is out of scope: {}", reason.code()))),
        None => Discriminant::new(d),
    }
}

fn scan(cfg: &RunConfig, ctx: &PeriodContext, exec: Execution, cocycle_max_h: Option<usize>) -> Result<ScanReport> {
    ctx.horizontal_scan(cfg.dmin, cfg.dmax, cfg.eps, ScanOptions { exec, cocycle_max_h })
}

pub fn run(cfg: &RunConfig, command: &Command, exec: Execution) -> Result<String> {
    match command {
        Command::Classgroup { disc } => {
            let d = Discriminant::new(*disc)?;
            let group = class_group_structure(d)?;
            let forms: Vec<[i64; 3]> = group.forms().iter().map(|f| [f.a, f.b, f.c]).collect();
            match cfg.format {
                Format::Csv => {
                    let mut out = String::from("a,b,c\n");
                    for [a, b, c] in forms {
                        let _ = writeln!(out, "{a},{b},{c}");
                    }
                    Ok(out)
                }
                Format::Json => pretty(&json!({
                    "disc": d.value(),
                    "h": group.order(),
                    "invariant_factors": group.invariant_factors(),
                    "factors": group.factors(),
                    "reduced_forms": enumerate_reduced_forms(d).len(),
                    "forms": forms,
                })),
            }
        }
        Command::ShimuraSet => {
            let set = shimura_set(cfg)?;
            match cfg.format {
                Format::Csv => {
                    let mut out = String::from("index,nrd,weight\n");
                    for (i, (c, w)) in set.classes.iter().zip(&set.weights).enumerate() {
                        let _ = writeln!(out, "{i},{},{w}", c.nrd);
                    }
                    Ok(out)
                }
                Format::Json => pretty(&json!({
                    "q": set.q(),
                    "size": set.len(),
                    "mass": WideRatio(set.mass()),
                    "classes": set.summaries(),
                })),
            }
        }
        Command::Brandt { n } => {
            if *n == 0 {
                return Err(Error::InvalidInput("n must be positive".into()));
            }
            let cache = Cache::new(&cfg.cache_dir);
            let b = match cache.load_brandt(cfg.q, *n)? {
                Some(b) => b,
                None => {
                    let b = brandt_matrix(&cache.shimura_set(cfg.q)?, *n)?;
                    cache.store_brandt(cfg.q, &b)?;
                    b
                }
            };
            match cfg.format {
                Format::Csv => Ok(b
                    .entries
                    .iter()
                    .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(",") + "\n")
                    .collect()),
                Format::Json => pretty(&b),
            }
        }
        Command::Eigenform => {
            let set = shimura_set(cfg)?;
            let f = eigenform(&set, &cfg.curve()?, cfg.p, &DEFAULT_PRIMES)?;
            pretty(&json!({
                "q": set.q(),
                "form": f,
                "weights": set.weights,
                "weighted_sum": WideRatio(f.weighted_sum(&set.weights)),
                "p": cfg.p,
                "nonconstant_mod_p": f.nonconstant_mod(cfg.p),
            }))
        }
        Command::SpecialPoints { disc } => {
            let set = shimura_set(cfg)?;
            let d = Discriminant::new(*disc)?;
            let group = class_group_structure(d)?;
            let emb = base_embedding(&set, d)?;
            let map = phi_map(&group, &emb, &set, exec)?;
            pretty(&json!({
                "embedding": emb,
                "map": map,
                "fibers": fibers(&map, set.len()),
                "expected_fibers": gross_point_fibers(&set, d)?,
            }))
        }
        Command::Periods { disc } => {
            let ctx = context(cfg)?;
            let d = admissible(&ctx, *disc)?;
            let row = ctx.nonvanishing_count(d, cfg.eps, true)?;
            let group = class_group_structure(d)?;
            let femb = FieldEmbedding::new(cfg.p, AbelianGroup::exponent(&group))?;
            let periods = all_periods(&ctx.form.coords, &row.phi, &group, &femb)?;
            match cfg.format {
                Format::Csv => {
                    let mut out = String::from("chi,vzero\n");
                    for t in &periods {
                        let chi: Vec<String> = t.chi.exponents.iter().map(u64::to_string).collect();
                        let _ = writeln!(out, "{},{}", chi.join(" "), t.vzero);
                    }
                    Ok(out)
                }
                Format::Json => pretty(&json!({ "summary": row, "periods": periods })),
            }
        }
        Command::Scan { cocycle_max_h } => {
            let ctx = context(cfg)?;
            let report = scan(cfg, &ctx, exec, *cocycle_max_h)?;
            match cfg.format {
                Format::Csv => Ok(report.to_csv()),
                Format::Json => pretty(&report),
            }
        }
        Command::Equidist { max_index } => {
            let ctx = context(cfg)?;
            let report = scan(cfg, &ctx, exec, None)?;
            let rows: Vec<_> = report.rows().collect();
            let windows: Vec<(u64, u64)> = report.windows.iter().map(|w| (w.lo, w.hi)).collect();
            let stats = equidist_stats(&rows, &ctx.set, *max_index, &windows, exec)?;
            match cfg.format {
                Format::Csv => {
                    let mut out = String::from("D,h,tv,subgroup_tv_max\n");
                    for r in &stats.rows {
                        let _ = writeln!(out, "{},{},{:.6},{:.6}", r.disc, r.h, r.tv, r.subgroup_tv_max);
                    }
                    Ok(out)
                }
                Format::Json => pretty(&stats),
            }
        }
        Command::Stability { orders, field } => {
            let q = field.unwrap_or(cfg.q);
            let bound = stability_bound(orders, q)?;
            let search = min_stable_generating_size(orders, q, DEFAULT_MAX_ORDER)?;
            pretty(&json!({
                "field": q,
                "bound": bound,
                "min_stable_size": search.min_size,
                "witness_set": search.witness,
                "search": search,
            }))
        }
        Command::Ledger { disc, flags, ord_period } => {
            let curve = cfg.curve()?;
            let excluded = excluded_primes(&curve)?;
            let gcd = ideal_i_gcd(&curve, cfg.prime_bound)?;
            let split_ords: Vec<i64> = curve
                .tamagawa
                .iter()
                .filter(|(&l, _)| curve.reduction_type(l) == Reduction::Split)
                .map(|(_, &c)| arith::valuation(c as i128, cfg.p as i128) as i64)
                .collect();
            let mut out = json!({
                "excluded_primes": excluded,
                "ideal_i": gcd,
                "sha_exponent": sha_exponent(*ord_period, &split_ords),
            });
            if let Some(d) = disc {
                let h = class_group_structure(Discriminant::new(*d)?)?.order() as i64;
                let f = flags.as_deref().unwrap_or(&[0; 6]);
                if f.len() != 6 {
                    return Err(Error::InvalidInput(format!("expected six flags C2,C4,C5,C6,C7,C8, got {}", f.len())));
                }
                let flags = KolyvaginFlags {
                    c2: f[0],
                    c4: f[1],
                    c5: f[2],
                    c6: f[3],
                    c7: f[4],
                    c8: f[5],
                };
                let k = kolyvagin_exponent(flags, gcd.value as i64, h, cfg.p)?;
                out["class_number"] = Value::from(h);
                out["kolyvagin_exponent"] = Value::from(k);
            }
            pretty(&out)
        }
        Command::Lvalue { twist, terms } => {
            let curve = cfg.curve()?;
            let conductor = curve.conductor as u128 * (*twist as i128 * *twist as i128) as u128;
            let terms = terms.unwrap_or_else(|| min_terms(conductor, 1e-12));
            pretty(&central_lvalue(&curve, *twist, terms, exec)?)
        }
    }
}
