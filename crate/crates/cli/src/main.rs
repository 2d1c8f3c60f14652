// SPDX-License-Identifier: Apache-2.0

//! `tpl`: command-line front end. Exit codes: 1 for configuration errors,
//! 2 for violated preconditions, 3 for failed certificates.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "tpl", version, about = "Toric periods of quaternionic forms mod p")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Class group of a negative discriminant.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Right-ideal classes of the maximal order ramified at q.
    ShimuraSet,
    /// Brandt matrix B(n).
    Brandt {
        #[arg(long)]
        n: u64,
    },
    /// Integral eigenform matching the curve's Hecke eigenvalues.
    Eigenform,
    /// Optimal embedding and the special-points map for one discriminant.
    SpecialPoints {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Toric periods of every character for one discriminant.
    Periods {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Nonvanishing counts over the discriminant range.
    Scan {
        /// Run the cocycle check on fields with class number up to this bound.
        #[arg(long)]
        cocycle_max_h: Option<usize>,
    },
    /// Distance of the special points to the 1/w measure over the range.
    Equidist {
        /// Largest subgroup index inspected.
        #[arg(long, default_value_t = 4)]
        max_index: usize,
    },
    /// Stable generating sets of a character group.
    Stability {
        /// Cyclic factor orders, comma separated.
        #[arg(long, visible_alias = "group", value_delimiter = ',', required = true)]
        orders: Vec<u64>,
        /// Size of the base field; defaults to q.
        #[arg(long)]
        field: Option<u64>,
    },
    /// Excluded primes, the ideal I and the Kolyvagin exponent.
    Ledger {
        /// Discriminant whose class number enters the exponent.
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<i64>,
        /// Kolyvagin flags `C2,C4,C5,C6,C7,C8`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        flags: Option<Vec<i64>>,
        /// Valuation of the period for the Sha exponent.
        #[arg(long, default_value_t = 0)]
        ord_period: i64,
    },
    /// Central value of the curve, optionally twisted.
    Lvalue {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        twist: i64,
        /// Series length; by default enough for a 1e-12 tail.
        #[arg(long)]
        terms: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let env_cache = std::env::var_os(tpl_core::cache::ENV_VAR)
        .filter(|v| !v.is_empty())
        .map(Into::into);
    let result = RunConfig::resolve(&cli.overrides, env_cache).and_then(|cfg| {
        let exec = if cli.sequential {
            tpl_core::Execution::Sequential
        } else {
            tpl_core::Execution::default()
        };
        commands::run(&cfg, &cli.command, exec)
    });
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            if !out.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tpl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
