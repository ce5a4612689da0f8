//! On-disk artifact cache: `<root>/<level>/<artifact>.v<version>.txt` with a
//! `.sha256` sidecar. Writes go through a temporary file and a rename, and
//! reads that fail the hash check are treated as misses.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Cache {
    root: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(String),
    Miss,
    Corrupt,
}

pub fn digest(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache {
            root: Some(root.into()),
        }
    }

    pub fn disabled() -> Self {
        Cache { root: None }
    }

    fn paths(&self, level: u64, artifact: &str) -> Option<(PathBuf, PathBuf)> {
        let dir = self.root.as_ref()?.join(level.to_string());
        let stem = format!("{artifact}.v{FORMAT_VERSION}");
        Some((dir.join(format!("{stem}.txt")), dir.join(format!("{stem}.sha256"))))
    }

    pub fn lookup(&self, level: u64, artifact: &str) -> Lookup {
        let Some((data, hash)) = self.paths(level, artifact) else {
            return Lookup::Miss;
        };
        let (Ok(payload), Ok(expected)) = (fs::read_to_string(&data), fs::read_to_string(&hash)) else {
            return if data.exists() || hash.exists() {
                Lookup::Corrupt
            } else {
                Lookup::Miss
            };
        };
        if digest(&payload) == expected.trim() {
            Lookup::Hit(payload)
        } else {
            Lookup::Corrupt
        }
    }

    pub fn store(&self, level: u64, artifact: &str, payload: &str) -> std::io::Result<()> {
        let Some((data, hash)) = self.paths(level, artifact) else {
            return Ok(());
        };
        let dir = data.parent().expect("cache file has a parent");
        fs::create_dir_all(dir)?;
        atomic_write(dir, &data, payload)?;
        atomic_write(dir, &hash, &digest(payload))
    }

    /// Cached payload, or `compute()` stored for next time. Cache write
    /// failures are not fatal.
    pub fn get_or_compute<E>(
        &self,
        level: u64,
        artifact: &str,
        compute: impl FnOnce() -> Result<String, E>,
    ) -> Result<String, E> {
        if let Lookup::Hit(payload) = self.lookup(level, artifact) {
            return Ok(payload);
        }
        let payload = compute()?;
        if let Err(e) = self.store(level, artifact, &payload) {
            eprintln!("warning: could not write cache entry {artifact} for level {level}: {e}");
        }
        Ok(payload)
    }
}

fn atomic_write(dir: &Path, target: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(target).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        assert_eq!(cache.lookup(11, "space"), Lookup::Miss);
        cache.store(11, "space", "payload").unwrap();
        assert_eq!(cache.lookup(11, "space"), Lookup::Hit("payload".into()));
        let file = dir.path().join("11").join(format!("space.v{FORMAT_VERSION}.txt"));
        fs::write(&file, "tampered").unwrap();
        assert_eq!(cache.lookup(11, "space"), Lookup::Corrupt);
        let v: Result<String, ()> = cache.get_or_compute(11, "space", || Ok("payload".into()));
        assert_eq!(v.unwrap(), "payload");
        assert_eq!(cache.lookup(11, "space"), Lookup::Hit("payload".into()));
    }

    #[test]
    fn disabled_cache_always_computes() {
        let cache = Cache::disabled();
        cache.store(5, "x", "y").unwrap();
        assert_eq!(cache.lookup(5, "x"), Lookup::Miss);
    }
}
