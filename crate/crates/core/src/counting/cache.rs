use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::arith::PrimePower;
use crate::error::{Error, Result};

type Slot = Arc<Mutex<Option<u128>>>;

/// On-disk record: all known counts for one fingerprint over one `q`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CacheFile {
    pub spec_hash: String,
    pub q: PrimePower,
    pub counts: BTreeMap<String, u128>,
}

/// Point-count cache keyed by `(fingerprint, q, n)`, optionally persisted as JSON files.
///
/// Each entry has its own lock, so a count is computed by one writer while
/// other entries stay readable.
#[derive(Debug, Default)]
pub struct CountCache {
    dir: Option<PathBuf>,
    slots: Mutex<HashMap<(String, PrimePower, u32), Slot>>,
    file_lock: Mutex<()>,
    computed: AtomicUsize,
}

impl CountCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        Ok(CountCache { dir: Some(dir), ..Self::default() })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Number of counts actually computed (cache misses) so far.
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::SeqCst)
    }

    pub fn file_path(&self, fingerprint: &str, q: PrimePower) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{fingerprint}-{}-{}.json", q.p, q.r)))
    }

    fn slot(&self, fingerprint: &str, q: PrimePower, n: u32) -> Slot {
        let mut slots = self.slots.lock().expect("cache lock");
        slots.entry((fingerprint.to_string(), q, n)).or_default().clone()
    }

    pub fn get_or_compute(
        &self,
        fingerprint: &str,
        q: PrimePower,
        n: u32,
        compute: impl FnOnce() -> Result<u128>,
    ) -> Result<u128> {
        let slot = self.slot(fingerprint, q, n);
        let mut entry = slot.lock().expect("cache entry lock");
        if let Some(v) = *entry {
            return Ok(v);
        }
        if let Some(v) = self.read_disk(fingerprint, q)?.and_then(|f| f.counts.get(&n.to_string()).copied()) {
            *entry = Some(v);
            return Ok(v);
        }
        let v = compute()?;
        self.computed.fetch_add(1, Ordering::SeqCst);
        self.write_disk(fingerprint, q, n, v)?;
        *entry = Some(v);
        Ok(v)
    }

    fn read_disk(&self, fingerprint: &str, q: PrimePower) -> Result<Option<CacheFile>> {
        let Some(path) = self.file_path(fingerprint, q) else {
            return Ok(None);
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        let file: CacheFile = serde_json::from_str(&text)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        if file.spec_hash != fingerprint || file.q != q {
            return Err(Error::Cache(format!("{}: record does not match its key", path.display())));
        }
        Ok(Some(file))
    }

    fn write_disk(&self, fingerprint: &str, q: PrimePower, n: u32, value: u128) -> Result<()> {
        let Some(path) = self.file_path(fingerprint, q) else {
            return Ok(());
        };
        let _guard = self.file_lock.lock().expect("cache file lock");
        let mut file = self.read_disk(fingerprint, q)?.unwrap_or_else(|| CacheFile {
            spec_hash: fingerprint.to_string(),
            q,
            counts: BTreeMap::new(),
        });
        file.counts.insert(n.to_string(), value);
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        let mut out = fs::File::create(&tmp).map_err(io)?;
        let body = serde_json::to_string_pretty(&file).map_err(|e| Error::Cache(e.to_string()))?;
        out.write_all(body.as_bytes()).map_err(io)?;
        out.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(())
    }
}
