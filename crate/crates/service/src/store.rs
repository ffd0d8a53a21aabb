//! Dataset store: in memory, optionally mirrored to a directory of JSON files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use fdakit::io::{parse_json, to_json_string, Dataset};
use fdakit::Result;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub kind: &'static str,
    pub n: usize,
    /// Grid size, or the number of basis functions.
    #[serde(rename = "M")]
    pub m: usize,
    pub domain: [f64; 2],
    pub name: String,
}

impl Summary {
    pub fn of(dataset: &Dataset) -> Self {
        let (a, b) = dataset.domain_range();
        let (kind, m) = match dataset {
            Dataset::Grid(s) => ("grid", s.n_points()),
            Dataset::Basis(s) => ("basis", s.basis().n_basis()),
        };
        Self {
            kind,
            n: dataset.n_samples(),
            m,
            domain: [a, b],
            name: dataset.names().dataset.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Handle {
    pub id: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub summary: Summary,
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub handle: Handle,
    pub dataset: Arc<Dataset>,
}

#[derive(Debug, Default)]
pub struct Store {
    entries: RwLock<BTreeMap<String, Entry>>,
    next: AtomicU64,
    dir: Option<PathBuf>,
}

const PREFIX: &str = "ds-";

fn sequence_of(id: &str) -> Option<u64> {
    id.strip_prefix(PREFIX)?.parse().ok()
}

impl Store {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// A store persisted in `dir`, loading every `ds-<n>.json` already there.
    pub fn persistent(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut entries = BTreeMap::new();
        let mut next = 0;
        for item in fs::read_dir(&dir)? {
            let path = item?.path();
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
                continue;
            };
            let Some(seq) = sequence_of(&id).filter(|_| path.extension().is_some_and(|e| e == "json")) else {
                continue;
            };
            let dataset = parse_json(&fs::read_to_string(&path)?)?;
            let created_at = fs::metadata(&path)?
                .modified()
                .ok()
                .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
                .map_or(0, |d| d.as_secs());
            let handle = Handle {
                id: id.clone(),
                created_at,
                summary: Summary::of(&dataset),
            };
            entries.insert(id, Entry { handle, dataset: Arc::new(dataset) });
            next = next.max(seq + 1);
        }
        Ok(Self {
            entries: RwLock::new(entries),
            next: AtomicU64::new(next),
            dir: Some(dir),
        })
    }

    pub fn insert(&self, dataset: Dataset) -> Result<Handle> {
        let id = format!("{PREFIX}{}", self.next.fetch_add(1, Ordering::Relaxed));
        if let Some(dir) = &self.dir {
            fs::write(dir.join(format!("{id}.json")), to_json_string(&dataset))?;
        }
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let handle = Handle {
            id: id.clone(),
            created_at,
            summary: Summary::of(&dataset),
        };
        let entry = Entry {
            handle: handle.clone(),
            dataset: Arc::new(dataset),
        };
        self.entries.write().expect("store lock poisoned").insert(id, entry);
        Ok(handle)
    }

    pub fn get(&self, id: &str) -> Option<Entry> {
        self.entries.read().expect("store lock poisoned").get(id).cloned()
    }

    /// Handles in creation order.
    pub fn list(&self) -> Vec<Handle> {
        let mut handles: Vec<Handle> =
            self.entries.read().expect("store lock poisoned").values().map(|e| e.handle.clone()).collect();
        handles.sort_by_key(|h| sequence_of(&h.id));
        handles
    }
}
