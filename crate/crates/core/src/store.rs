//! Run configurations and a directory-per-run JSON result store.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coloring::Descriptor;
use crate::error::Error;
use crate::sat::SolverConfig;
use crate::search::SearchBudget;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Descriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default)]
    pub distinct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<SearchBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    /// Not part of the hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Command-specific parameters.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
}

impl RunConfig {
    /// Hex SHA-256 of the artifact version and the config without its
    /// output path.
    pub fn hash(&self) -> String {
        let mut keyed = self.clone();
        keyed.output = None;
        let json = serde_json::to_string(&keyed).expect("config serializes");
        let mut h = Sha256::new();
        h.update(ARTIFACT_VERSION.as_bytes());
        h.update([0]);
        h.update(json.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultKind {
    Witness,
    ExtremalNumber,
    Trace,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredResult {
    pub config_hash: String,
    pub kind: ResultKind,
    pub config: RunConfig,
    pub payload: serde_json::Value,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Write via a sibling temp file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(
        ".{name}.{}.{}.tmp",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

#[derive(Clone, Debug)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Store {
        Store { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn run_dir(&self, hash: &str) -> PathBuf {
        self.root.join(hash)
    }

    pub fn result_path(&self, hash: &str) -> PathBuf {
        self.run_dir(hash).join(format!("{hash}.json"))
    }

    pub fn put(
        &self,
        config: &RunConfig,
        kind: ResultKind,
        payload: serde_json::Value,
    ) -> Result<PathBuf, Error> {
        let hash = config.hash();
        let stored = StoredResult {
            config_hash: hash.clone(),
            kind,
            config: config.clone(),
            payload,
            version: ARTIFACT_VERSION.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let path = self.result_path(&hash);
        let mut bytes = serde_json::to_vec_pretty(&stored)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes)?;
        Ok(path)
    }

    /// Store an extra artifact (e.g. a certificate) in the run directory.
    pub fn put_artifact(&self, config: &RunConfig, name: &str, bytes: &[u8]) -> Result<PathBuf, Error> {
        let path = self.run_dir(&config.hash()).join(name);
        write_atomic(&path, bytes)?;
        Ok(path)
    }

    pub fn get(&self, config: &RunConfig) -> Result<Option<StoredResult>, Error> {
        let path = self.result_path(&config.hash());
        match fs::read(&path) {
            Ok(bytes) => {
                let r: StoredResult = serde_json::from_slice(&bytes)?;
                Ok((r.version == ARTIFACT_VERSION && r.config.without_output() == config.without_output()).then_some(r))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

impl RunConfig {
    fn without_output(&self) -> RunConfig {
        RunConfig {
            output: None,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{mod_coloring, Domain};

    fn tmp_root(tag: &str) -> PathBuf {
        let p = std::env::temp_dir().join(format!("sumprod-store-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&p);
        p
    }

    fn config() -> RunConfig {
        RunConfig {
            command: "search".into(),
            coloring: Some(mod_coloring(2, Domain::Naturals).descriptor().clone()),
            pattern: Some("schur".into()),
            params: serde_json::json!({"b": 1, "a": [1, 2]}),
            ..Default::default()
        }
    }

    #[test]
    fn hash_ignores_output_and_tracks_content() {
        let a = config();
        let mut b = a.clone();
        b.output = Some("/tmp/x".into());
        assert_eq!(a.hash(), b.hash());
        b.distinct = true;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn put_get_round_trip() {
        let root = tmp_root("rt");
        let store = Store::new(&root);
        let cfg = config();
        assert!(store.get(&cfg).unwrap().is_none());
        let payload = serde_json::json!({"n": 4});
        let path = store.put(&cfg, ResultKind::ExtremalNumber, payload.clone()).unwrap();
        assert!(path.ends_with(format!("{}.json", cfg.hash())));
        let got = store.get(&cfg).unwrap().unwrap();
        assert_eq!(got.payload, payload);
        assert_eq!(got.kind, ResultKind::ExtremalNumber);
        // no temp files left behind
        let leftovers = fs::read_dir(store.run_dir(&cfg.hash()))
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
            .count();
        assert_eq!(leftovers, 0);
        fs::remove_dir_all(root).unwrap();
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = config();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }
}
