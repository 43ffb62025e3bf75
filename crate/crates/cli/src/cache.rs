//! On-disk cache of atom sets, one JSON file per key, written by atomic
//! rename so concurrent processes never observe a partial entry.

use std::io::Write;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use klab_core::zerosum::{AtomSet, AtomSetRecord, Support};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub group: String,
    pub support: Vec<String>,
    pub cap: Option<u64>,
}

impl CacheKey {
    pub fn new(support: &Support, cap: Option<u64>) -> Self {
        CacheKey {
            group: support.group().to_string(),
            support: support.elements().iter().map(|x| x.to_string()).collect(),
            cap,
        }
    }

    fn file_name(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("key serializes");
        format!("atoms-{}.json", hex::encode(Sha256::digest(&bytes)))
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    format_version: u32,
    key: CacheKey,
    atoms: AtomSetRecord,
}

pub struct AtomCache {
    dir: PathBuf,
    version: u32,
}

impl AtomCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AtomCache { dir: dir.into(), version: FORMAT_VERSION }
    }

    /// A cache that reads and writes a different format version.
    pub fn with_version(dir: impl Into<PathBuf>, version: u32) -> Self {
        AtomCache { dir: dir.into(), version }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// Returns the cached set, or `None` on a miss. Unreadable, corrupt or
    /// stale-version entries count as misses.
    pub fn get(&self, key: &CacheKey) -> Option<AtomSet> {
        let path = self.path_for(key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                warn!("cache read {}: {e}", path.display());
                return None;
            }
        };
        let entry: CacheEntry = match serde_json::from_slice(&bytes) {
            Ok(e) => e,
            Err(e) => {
                warn!("corrupt cache entry {}: {e}", path.display());
                return None;
            }
        };
        if entry.format_version != self.version {
            debug!("cache entry {} has version {}, want {}", path.display(), entry.format_version, self.version);
            return None;
        }
        if &entry.key != key {
            warn!("cache entry {} holds a different key", path.display());
            return None;
        }
        match AtomSet::from_record(&entry.atoms) {
            Ok(set) => Some(set),
            Err(e) => {
                warn!("corrupt cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn put(&self, key: &CacheKey, set: &AtomSet) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let entry = CacheEntry { format_version: self.version, key: key.clone(), atoms: set.to_record() };
        let bytes = serde_json::to_vec_pretty(&entry).expect("entry serializes");
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&bytes)?;
        tmp.flush()?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }

    /// Number of entries and total bytes.
    pub fn stats(&self) -> std::io::Result<(usize, u64)> {
        let mut n = 0;
        let mut bytes = 0;
        for e in std::fs::read_dir(&self.dir)? {
            let e = e?;
            if is_entry(&e.path()) {
                n += 1;
                bytes += e.metadata()?.len();
            }
        }
        Ok((n, bytes))
    }

    pub fn clear(&self) -> std::io::Result<usize> {
        let mut n = 0;
        for e in std::fs::read_dir(&self.dir)? {
            let p = e?.path();
            if is_entry(&p) {
                std::fs::remove_file(p)?;
                n += 1;
            }
        }
        Ok(n)
    }
}

fn is_entry(p: &Path) -> bool {
    p.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("atoms-") && n.ends_with(".json"))
}
