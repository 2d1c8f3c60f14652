// SPDX-License-Identifier: Apache-2.0

//! Run configuration: built-in defaults, then a `key = value` file, then
//! `TPL_CACHE`, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tpl_core::curve::{Coefficients, EllipticCurveData};
use tpl_core::{arith, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidInput(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub q: u64,
    pub curve: Coefficients,
    /// Defaults to `q`.
    pub conductor: Option<u64>,
    pub tamagawa: BTreeMap<u64, u64>,
    pub p: u64,
    pub dmin: u64,
    pub dmax: u64,
    pub eps: f64,
    pub prime_bound: u64,
    pub cache_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = EllipticCurveData::curve_11a1();
        RunConfig {
            q: 11,
            curve: Coefficients(e.coeffs),
            conductor: None,
            tamagawa: e.tamagawa,
            p: 7,
            dmin: 5,
            dmax: 2000,
            eps: 0.1,
            prime_bound: 100,
            cache_dir: PathBuf::from("tpl-cache"),
            format: Format::Json,
        }
    }
}

/// Values given on the command line; `None` leaves the configured value.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Prime ramified in the quaternion algebra.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Weierstrass coefficients `a1,a2,a3,a4,a6`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub curve: Option<String>,
    #[arg(long, global = true)]
    pub conductor: Option<u64>,
    /// Tamagawa numbers as `l:c` or `l=c` pairs separated by commas.
    #[arg(long, global = true)]
    pub tamagawa: Option<String>,
    /// Residue characteristic of the periods.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    #[arg(long, global = true)]
    pub dmin: Option<u64>,
    #[arg(long, global = true)]
    pub dmax: Option<u64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true, visible_alias = "pbound")]
    pub prime_bound: Option<u64>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| invalid(format!("{key} = {v:?}: {e}")))
}

fn parse_tamagawa(v: &str) -> Result<BTreeMap<u64, u64>> {
    let mut out = BTreeMap::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (l, c) = item
            .split_once([':', '='])
            .ok_or_else(|| invalid(format!("tamagawa entry {item:?} is not of the form l:c or l=c")))?;
        out.insert(parse_num("tamagawa", l.trim())?, parse_num("tamagawa", c.trim())?);
    }
    Ok(out)
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "q" => self.q = parse_num(key, value)?,
            "curve" => self.curve = value.parse()?,
            "conductor" => self.conductor = Some(parse_num(key, value)?),
            "tamagawa" => self.tamagawa = parse_tamagawa(value)?,
            "p" => self.p = parse_num(key, value)?,
            "dmin" => self.dmin = parse_num(key, value)?,
            "dmax" => self.dmax = parse_num(key, value)?,
            "eps" => self.eps = parse_num(key, value)?,
            "prime_bound" => self.prime_bound = parse_num(key, value)?,
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "format" => self.format = value.parse()?,
            _ => return Err(invalid(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a configuration text on top of `self`. Blank lines and text
    /// after `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`, got {raw:?}", no + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| invalid(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read configuration {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Defaults, file, environment and flags, in increasing precedence; the
    /// result is validated.
    pub fn resolve(flags: &Overrides, env_cache: Option<PathBuf>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            cfg.apply_file(path)?;
        }
        if let Some(dir) = env_cache {
            cfg.cache_dir = dir;
        }
        if let Some(v) = flags.q {
            cfg.q = v;
        }
        if let Some(v) = &flags.curve {
            cfg.curve = v.parse()?;
        }
        if let Some(v) = flags.conductor {
            cfg.conductor = Some(v);
        }
        if let Some(v) = &flags.tamagawa {
            cfg.tamagawa = parse_tamagawa(v)?;
        }
        if let Some(v) = flags.p {
            cfg.p = v;
        }
        if let Some(v) = flags.dmin {
            cfg.dmin = v;
        }
        if let Some(v) = flags.dmax {
            cfg.dmax = v;
        }
        if let Some(v) = flags.eps {
            cfg.eps = v;
        }
        if let Some(v) = flags.prime_bound {
            cfg.prime_bound = v;
        }
        if let Some(v) = &flags.cache_dir {
            cfg.cache_dir = v.clone();
        }
        if let Some(v) = flags.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !arith::is_prime(self.q) {
            return Err(invalid(format!("q = {} is not prime", self.q)));
        }
        if !arith::is_prime(self.p) || self.p == 2 {
            return Err(invalid(format!("p = {} is not an odd prime", self.p)));
        }
        if self.dmin > self.dmax {
            return Err(invalid(format!("dmin = {} exceeds dmax = {}", self.dmin, self.dmax)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("eps = {} is not in (0, 1)", self.eps)));
        }
        if self.prime_bound < 3 {
            return Err(invalid(format!("prime_bound = {} is below 3", self.prime_bound)));
        }
        Ok(())
    }

    pub fn curve(&self) -> Result<EllipticCurveData> {
        EllipticCurveData::new(self.curve.0, self.conductor.unwrap_or(self.q), self.tamagawa.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_grammar() {
        let mut c = RunConfig::default();
        c.apply_text("# reference run\nq = 37\n\np=5  # residue prime\ncurve = 0,0,1,-1,0\ntamagawa = 37:1\nformat = csv\n")
            .unwrap();
        assert_eq!((c.q, c.p, c.format), (37, 5, Format::Csv));
        assert_eq!(c.curve, Coefficients([0, 0, 1, -1, 0]));
        assert_eq!(c.tamagawa, BTreeMap::from([(37, 1)]));
        assert!(c.curve().is_ok());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("colour = blue").is_err());
        assert!(c.apply_text("q 11").is_err());
        assert!(c.apply_text("q = eleven").is_err());
        assert!(c.apply_text("tamagawa = 11-5").is_err());
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "q = 37\np = 5\ncache_dir = from-file\n").unwrap();
        let flags = Overrides {
            config: Some(path),
            p: Some(11),
            ..Default::default()
        };
        let c = RunConfig::resolve(&flags, Some(PathBuf::from("from-env"))).unwrap();
        assert_eq!((c.q, c.p), (37, 11));
        assert_eq!(c.cache_dir, PathBuf::from("from-env"));
        let flags = Overrides {
            cache_dir: Some(PathBuf::from("from-flag")),
            ..flags
        };
        assert_eq!(RunConfig::resolve(&flags, None).unwrap().cache_dir, PathBuf::from("from-flag"));
        let bad = Overrides { dmin: Some(10), dmax: Some(5), ..Default::default() };
        assert!(RunConfig::resolve(&bad, None).is_err());
    }
}
