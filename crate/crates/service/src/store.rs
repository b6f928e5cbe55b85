//! Uploaded logs, held in memory and optionally mirrored to a directory.
//!
//! A persisted log is two files named by its id: the uploaded bytes
//! (`<id>.log`) and a JSON sidecar with the handle and upload sequence
//! number (`<id>.json`). On start every sidecar is reloaded and its log
//! parsed again from the stored bytes.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use log_skeleton::ingestion::{self, LogFormat};
use log_skeleton::{Activity, ActivityLog};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogHandle {
    pub id: String,
    pub name: String,
    pub format: LogFormat,
    pub alphabet: BTreeSet<Activity>,
    pub trace_count: usize,
    pub distinct_traces: usize,
}

#[derive(Debug)]
pub struct StoredLog {
    pub handle: LogHandle,
    pub log: ActivityLog,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Log(#[from] log_skeleton::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Sidecar {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    seq: u64,
    handle: LogHandle,
}

#[derive(Default)]
struct Registry {
    next_seq: u64,
    order: Vec<String>,
    logs: HashMap<String, Arc<StoredLog>>,
}

pub struct Store {
    registry: RwLock<Registry>,
    data_dir: Option<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Store {
    pub fn in_memory() -> Self {
        Store {
            registry: RwLock::new(Registry::default()),
            data_dir: None,
        }
    }

    /// Opens a store persisted under `dir`, creating the directory and
    /// reloading any logs found there.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut found = Vec::new();
        for entry in std::fs::read_dir(&dir).map_err(io_err(&dir))? {
            let path = entry.map_err(io_err(&dir))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
                let sidecar: Sidecar = serde_json::from_str(&text).map_err(|source| StoreError::Sidecar {
                    path: path.clone(),
                    source,
                })?;
                found.push(sidecar);
            }
        }
        found.sort_by_key(|s| s.seq);
        let mut registry = Registry::default();
        for Sidecar { seq, handle } in found {
            let path = dir.join(format!("{}.log", handle.id));
            let bytes = std::fs::read(&path).map_err(io_err(&path))?;
            let log = ingestion::parse_log(&bytes, handle.format)?;
            registry.next_seq = seq + 1;
            registry.order.push(handle.id.clone());
            registry.logs.insert(handle.id.clone(), Arc::new(StoredLog { handle, log }));
        }
        tracing::info!(dir = %dir.display(), logs = registry.order.len(), "opened log store");
        Ok(Store {
            registry: RwLock::new(registry),
            data_dir: Some(dir),
        })
    }

    /// Parses and stores a log under a fresh id. Identical uploads get
    /// distinct ids.
    pub fn insert(&self, name: &str, format: LogFormat, bytes: &[u8]) -> Result<Arc<StoredLog>, StoreError> {
        let log = ingestion::parse_log(bytes, format)?;
        let handle = LogHandle {
            id: uuid::Uuid::new_v4().to_string(),
            name: name.to_string(),
            format,
            alphabet: log.alphabet().clone(),
            trace_count: log.len(),
            distinct_traces: log.distinct_traces(),
        };
        let mut registry = self.registry.write().expect("store lock");
        let seq = registry.next_seq;
        if let Some(dir) = &self.data_dir {
            let data = dir.join(format!("{}.log", handle.id));
            std::fs::write(&data, bytes).map_err(io_err(&data))?;
            let side = dir.join(format!("{}.json", handle.id));
            let sidecar = Sidecar {
                seq,
                handle: handle.clone(),
            };
            let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
            std::fs::write(&side, text).map_err(io_err(&side))?;
        }
        registry.next_seq += 1;
        registry.order.push(handle.id.clone());
        let stored = Arc::new(StoredLog { handle, log });
        registry.logs.insert(stored.handle.id.clone(), stored.clone());
        Ok(stored)
    }

    pub fn get(&self, id: &str) -> Option<Arc<StoredLog>> {
        self.registry.read().expect("store lock").logs.get(id).cloned()
    }

    /// Handles in upload order.
    pub fn list(&self) -> Vec<LogHandle> {
        let registry = self.registry.read().expect("store lock");
        registry.order.iter().map(|id| registry.logs[id].handle.clone()).collect()
    }
}
