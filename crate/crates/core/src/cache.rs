//! On-disk cache of atom sets.
//!
//! One JSON file per `(group, subset)` pair, named by a SHA-256 of the key.
//! Entries carry a format version and the producing crate version; anything
//! unreadable, mismatched, or internally inconsistent is recomputed.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atoms::{enumerate_atoms, normalize_subset, AtomSet, EnumConfig};
use crate::error::Result;
use crate::group::{GElement, GroupSpec};
use crate::rational;

pub const FORMAT_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "ZSLAB_CACHE";

#[derive(Serialize, Deserialize)]
struct Entry {
    format: u32,
    code_version: String,
    group: String,
    subset: Vec<String>,
    atoms: Vec<Vec<u32>>,
    davenport: u64,
    max_cross: String,
    min_cross: String,
}

#[derive(Debug)]
pub struct AtomCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl AtomCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AtomCache {
            dir: dir.into(),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// `$ZSLAB_CACHE`, else `$XDG_CACHE_HOME/zslab`, else `~/.cache/zslab`.
    pub fn default_dir() -> PathBuf {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return PathBuf::from(d);
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return PathBuf::from(d).join("zslab");
        }
        match std::env::var_os("HOME") {
            Some(h) => PathBuf::from(h).join(".cache").join("zslab"),
            None => std::env::temp_dir().join("zslab-cache"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    fn path_for(&self, group: &GroupSpec, subset: &[GElement]) -> PathBuf {
        let mut h = Sha256::new();
        h.update(group.name().as_bytes());
        for g in subset {
            h.update(b"|");
            h.update(g.to_string().as_bytes());
        }
        h.update(b"|v");
        h.update(CODE_VERSION.as_bytes());
        let digest = hex::encode(h.finalize());
        self.dir.join(format!("atoms-{}.json", &digest[..32]))
    }

    fn load(&self, path: &Path, group: &GroupSpec, subset: &[GElement]) -> Option<AtomSet> {
        let text = fs::read_to_string(path).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        if e.format != FORMAT_VERSION
            || e.code_version != CODE_VERSION
            || e.group != group.name()
            || e.subset.len() != subset.len()
            || e.subset
                .iter()
                .zip(subset)
                .any(|(s, g)| *s != g.to_string())
        {
            return None;
        }
        if e.atoms.iter().any(|a| a.len() != subset.len()) {
            return None;
        }
        let set = AtomSet::from_exponents(group, subset.to_vec(), e.atoms).ok()?;
        let consistent = set.davenport() == e.davenport
            && rational::parse(&e.max_cross).ok()? == set.max_cross()
            && rational::parse(&e.min_cross).ok()? == set.min_cross()
            && set.atoms().iter().all(|a| a.is_zero_sum());
        consistent.then_some(set)
    }

    fn store(&self, path: &Path, set: &AtomSet) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let e = Entry {
            format: FORMAT_VERSION,
            code_version: CODE_VERSION.to_string(),
            group: set.group().name(),
            subset: set.subset().iter().map(|g| g.to_string()).collect(),
            atoms: set.exponents().to_vec(),
            davenport: set.davenport(),
            max_cross: rational::format(&set.max_cross()),
            min_cross: rational::format(&set.min_cross()),
        };
        let text = serde_json::to_string(&e).map_err(|err| crate::Error::Io(err.to_string()))?;
        // write-then-rename so concurrent readers never see a torn file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Cached [`enumerate_atoms`]. Write failures are ignored; the result is
    /// the same with or without a usable cache.
    pub fn atoms(
        &self,
        group: &GroupSpec,
        subset: &[GElement],
        cfg: &EnumConfig,
    ) -> Result<AtomSet> {
        let subset = normalize_subset(group, subset)?;
        let path = self.path_for(group, &subset);
        if let Some(set) = self.load(&path, group, &subset) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(set);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let set = enumerate_atoms(group, &subset, cfg)?;
        let _ = self.store(&path, &set);
        Ok(set)
    }
}

/// Atom enumeration through an optional cache.
pub fn atoms_with(
    cache: Option<&AtomCache>,
    group: &GroupSpec,
    subset: &[GElement],
    cfg: &EnumConfig,
) -> Result<AtomSet> {
    match cache {
        Some(c) => c.atoms(group, subset, cfg),
        None => enumerate_atoms(group, subset, cfg),
    }
}
