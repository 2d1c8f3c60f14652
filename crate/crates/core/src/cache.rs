// SPDX-License-Identifier: Apache-2.0

//! On-disk cache of class sets and Brandt matrices, one directory per `q`:
//! `q{q}/classes.json` and `q{q}/brandt_{n}.json`. Writers hold
//! `q{q}/.lock`; readers take no lock.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{certification, Error, Result};
use crate::quat::{build_algebra, maximal_order, right_ideal_classes, BrandtMatrix, Lattice, QuatOrder, ShimuraSet};
use crate::serde_util;

pub const ENV_VAR: &str = "TPL_CACHE";
const LOCK_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Row(#[serde(with = "serde_util::wide_vec")] Vec<i128>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StoredLattice {
    #[serde(with = "serde_util::wide")]
    den: i128,
    rows: Vec<Row>,
}

impl From<&Lattice> for StoredLattice {
    fn from(l: &Lattice) -> Self {
        StoredLattice {
            den: l.den(),
            rows: l.rows().iter().map(|r| Row(r.to_vec())).collect(),
        }
    }
}

impl StoredLattice {
    fn to_lattice(&self) -> Result<Lattice> {
        let rows = self
            .rows
            .iter()
            .map(|r| <[i128; 4]>::try_from(r.0.as_slice()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| certification!("cached lattice row is not of length 4"))?;
        if self.den <= 0 {
            return Err(certification!("cached lattice has denominator {}", self.den));
        }
        Ok(Lattice::new(rows, self.den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StoredClass {
    lattice: StoredLattice,
    #[serde(with = "serde_util::ratio")]
    nrd: Ratio<i128>,
    weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct ClassesFile {
    q: u64,
    a: i64,
    b: i64,
    order: StoredLattice,
    classes: Vec<StoredClass>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

/// Removes the lock file when dropped.
struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// `$TPL_CACHE` if set, else `default`.
    pub fn from_env_or(default: impl Into<PathBuf>) -> Self {
        match std::env::var_os(ENV_VAR) {
            Some(v) if !v.is_empty() => Cache::new(v),
            _ => Cache::new(default),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dir_for(&self, q: u64) -> PathBuf {
        self.root.join(format!("q{q}"))
    }

    fn lock(&self, q: u64) -> Result<LockGuard> {
        let dir = self.dir_for(q);
        fs::create_dir_all(&dir)?;
        let path = dir.join(".lock");
        let start = Instant::now();
        loop {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(LockGuard(path));
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_TIMEOUT {
                        return Err(certification!("cache lock {} held for over {:?}", path.display(), LOCK_TIMEOUT));
                    }
                    std::thread::sleep(Duration::from_millis(20));
                }
                Err(e) => return Err(Error::Io(e)),
            }
        }
    }

    fn write_atomic(&self, q: u64, name: &str, contents: &str) -> Result<()> {
        let _guard = self.lock(q)?;
        let dir = self.dir_for(q);
        let tmp = dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents)?;
        fs::rename(&tmp, dir.join(name))?;
        Ok(())
    }

    fn read(&self, q: u64, name: &str) -> Result<Option<String>> {
        match fs::read_to_string(self.dir_for(q).join(name)) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::Io(e)),
        }
    }

    pub fn store_classes(&self, set: &ShimuraSet) -> Result<()> {
        let alg = set.order.alg;
        let file = ClassesFile {
            q: alg.q,
            a: alg.a,
            b: alg.b,
            order: (&set.order.lattice).into(),
            classes: set
                .classes
                .iter()
                .zip(&set.weights)
                .map(|(c, &w)| StoredClass {
                    lattice: (&c.lattice).into(),
                    nrd: c.nrd,
                    weight: w,
                })
                .collect(),
        };
        self.write_atomic(set.q(), "classes.json", &serde_json::to_string_pretty(&file)?)
    }

    /// The cached class set, re-certified by the mass formula.
    pub fn load_classes(&self, q: u64) -> Result<Option<ShimuraSet>> {
        let Some(text) = self.read(q, "classes.json")? else {
            return Ok(None);
        };
        let file: ClassesFile = serde_json::from_str(&text)?;
        let alg = build_algebra(q)?;
        if file.q != q || (file.a, file.b) != (alg.a, alg.b) {
            return Err(certification!("cache for q = {q} was built for a different algebra"));
        }
        let order = QuatOrder::from_lattice(alg, file.order.to_lattice()?);
        let lattices = file.classes.iter().map(|c| c.lattice.to_lattice()).collect::<Result<Vec<_>>>()?;
        let set = ShimuraSet::from_classes(order, lattices)?;
        let stored: Vec<u64> = file.classes.iter().map(|c| c.weight).collect();
        if stored != set.weights {
            return Err(certification!("cached weights disagree with recomputed ones"));
        }
        Ok(Some(set))
    }

    pub fn store_brandt(&self, q: u64, b: &BrandtMatrix) -> Result<()> {
        self.write_atomic(q, &format!("brandt_{}.json", b.n), &serde_json::to_string(b)?)
    }

    pub fn load_brandt(&self, q: u64, n: u64) -> Result<Option<BrandtMatrix>> {
        match self.read(q, &format!("brandt_{n}.json"))? {
            Some(text) => Ok(Some(serde_json::from_str(&text)?)),
            None => Ok(None),
        }
    }

    /// Cached class set, computing and storing it on a miss.
    pub fn shimura_set(&self, q: u64) -> Result<ShimuraSet> {
        if let Some(set) = self.load_classes(q)? {
            return Ok(set);
        }
        let set = right_ideal_classes(&maximal_order(&build_algebra(q)?)?)?;
        self.store_classes(&set)?;
        Ok(set)
    }
}
