//! Retrieval and caching of the OR-Library `binpack1..8` files.
//!
//! Dataset `bp<i>` maps to `binpack<i>.txt`. Downloaded bytes are stored
//! verbatim as `<cache_dir>/<name>.txt` together with a `<name>.sha256`
//! digest, and every load parses the cached bytes.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{parse_orlib, DatasetFile};

pub const ORLIB_BASE_URL: &str = "http://people.brunel.ac.uk/~mastjbb/jeb/orlib/files/";

pub const DATASETS: [&str; 8] = ["bp1", "bp2", "bp3", "bp4", "bp5", "bp6", "bp7", "bp8"];

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unknown dataset {0:?}, expected one of bp1..bp8")]
    UnknownDataset(String),
    #[error("could not retrieve {url}: {reason}")]
    Retrieval { url: String, reason: String },
    #[error("dataset {name} is corrupt: {reason}")]
    Corrupt { name: String, reason: String },
    #[error("cache i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Something that can download a URL.
pub trait Transport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String>;
}

/// A transport that never reaches the network.
pub struct Offline;

impl Transport for Offline {
    fn get(&self, _url: &str) -> Result<Vec<u8>, String> {
        Err("network access disabled".into())
    }
}

#[cfg(feature = "http")]
pub struct HttpTransport;

#[cfg(feature = "http")]
impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        let mut response = ureq::get(url).call().map_err(|e| e.to_string())?;
        response
            .body_mut()
            .read_to_vec()
            .map_err(|e| e.to_string())
    }
}

pub fn dataset_file_name(name: &str) -> Result<String, FetchError> {
    let index = DATASETS
        .iter()
        .position(|&d| d == name)
        .ok_or_else(|| FetchError::UnknownDataset(name.to_string()))?;
    Ok(format!("binpack{}.txt", index + 1))
}

pub fn dataset_url(name: &str) -> Result<String, FetchError> {
    Ok(format!("{ORLIB_BASE_URL}{}", dataset_file_name(name)?))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> FetchError + '_ {
    move |source| FetchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_bytes(name: &str, bytes: &[u8]) -> Result<DatasetFile, FetchError> {
    let corrupt = |reason: String| FetchError::Corrupt {
        name: name.to_string(),
        reason,
    };
    let text = std::str::from_utf8(bytes).map_err(|e| corrupt(e.to_string()))?;
    let mut dataset = parse_orlib(text).map_err(|e| corrupt(e.to_string()))?;
    dataset.source = name.to_string();
    Ok(dataset)
}

/// Loads `name` from the cache without touching the network. `Ok(None)` on a cold cache.
pub fn load_cached(name: &str, cache_dir: &Path) -> Result<Option<DatasetFile>, FetchError> {
    dataset_file_name(name)?;
    let data_path = cache_dir.join(format!("{name}.txt"));
    let bytes = match fs::read(&data_path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(&data_path)(e)),
    };
    let digest_path = cache_dir.join(format!("{name}.sha256"));
    match fs::read_to_string(&digest_path) {
        Ok(expected) if expected.trim() != sha256_hex(&bytes) => {
            return Err(FetchError::Corrupt {
                name: name.to_string(),
                reason: "checksum mismatch".into(),
            })
        }
        Ok(_) => {}
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(io_err(&digest_path)(e)),
    }
    parse_bytes(name, &bytes).map(Some)
}

/// One lock per cache entry so concurrent callers download at most once.
fn entry_lock(path: PathBuf) -> Arc<Mutex<()>> {
    static LOCKS: OnceLock<Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>> = OnceLock::new();
    let mut map = LOCKS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    map.entry(path).or_default().clone()
}

/// Returns dataset `name`, downloading it through `transport` on a cache miss.
pub fn fetch_dataset_with(
    name: &str,
    cache_dir: &Path,
    transport: &dyn Transport,
) -> Result<DatasetFile, FetchError> {
    let url = dataset_url(name)?;
    let data_path = cache_dir.join(format!("{name}.txt"));
    let lock = entry_lock(data_path.clone());
    let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());

    if let Some(dataset) = load_cached(name, cache_dir)? {
        return Ok(dataset);
    }
    let bytes = transport
        .get(&url)
        .map_err(|reason| FetchError::Retrieval { url, reason })?;
    let dataset = parse_bytes(name, &bytes)?;

    fs::create_dir_all(cache_dir).map_err(io_err(cache_dir))?;
    let tmp = cache_dir.join(format!("{name}.txt.partial"));
    fs::write(&tmp, &bytes).map_err(io_err(&tmp))?;
    let digest_path = cache_dir.join(format!("{name}.sha256"));
    fs::write(&digest_path, sha256_hex(&bytes) + "\n").map_err(io_err(&digest_path))?;
    fs::rename(&tmp, &data_path).map_err(io_err(&data_path))?;
    Ok(dataset)
}

/// [`fetch_dataset_with`] over HTTP when the `http` feature is on, offline otherwise.
pub fn fetch_dataset(name: &str, cache_dir: &Path) -> Result<DatasetFile, FetchError> {
    #[cfg(feature = "http")]
    {
        fetch_dataset_with(name, cache_dir, &HttpTransport)
    }
    #[cfg(not(feature = "http"))]
    {
        fetch_dataset_with(name, cache_dir, &Offline)
    }
}
