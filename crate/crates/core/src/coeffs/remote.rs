//! HTTP client for an LMFDB-style coefficient database, with an on-disk
//! cache. Responses are normalized to the local ap file format before
//! caching, so the cache is source-agnostic; cache writes are atomic
//! (write-temp-then-rename) and carry a sha256 checksum.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigInt;

use super::format::{self, TableKind};
use super::{CoefficientTable, FormDescriptor, FullCoefficientTable, PrimeCoefficientTable, Source};
use crate::error::{Error, Result};

pub const DEFAULT_CACHE_DIR: &str = "cache";

/// Environment variables honored by the CLI layer.
pub const ENV_API_BASE: &str = "EIGENCOPRIME_API_BASE";
pub const ENV_CACHE: &str = "EIGENCOPRIME_CACHE";

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// URL template with `{label}` and `{bound}` placeholders.
    pub api_base: Option<String>,
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub timeout: Duration,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            api_base: None,
            cache_dir: PathBuf::from(DEFAULT_CACHE_DIR),
            offline: false,
            timeout: Duration::from_secs(30),
        }
    }
}

fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cache_file(dir: &Path, label: &str, bound: u64) -> PathBuf {
    dir.join(format!("{}__{bound}.ap.txt", sanitize_label(label)))
}

/// Fetch a(p) for all p <= bound: cache first, then (unless offline) the
/// remote endpoint with one retry. The level and weight come from the
/// caller since the wire format carries coefficients only.
pub fn fetch_remote(
    label: &str,
    level: u64,
    weight: u32,
    bound: u64,
    cfg: &RemoteConfig,
) -> Result<PrimeCoefficientTable> {
    if let Some(table) = cache_lookup(label, bound, cfg)? {
        return Ok(table);
    }
    if cfg.offline {
        return Err(Error::data(format!(
            "offline mode and no cached table for label {label:?} at bound {bound}"
        )));
    }
    let base = cfg.api_base.as_deref().ok_or_else(|| {
        Error::usage("no API base configured (flag --api-base or EIGENCOPRIME_API_BASE)")
    })?;
    let url = base
        .replace("{label}", label)
        .replace("{bound}", &bound.to_string());

    let body = http_get_with_retry(&url, cfg.timeout)?;
    let coefficients = parse_json_coefficients(&body)?;
    if (coefficients.len() as u64) < bound {
        return Err(Error::data(format!(
            "source provided {} coefficients, need bound {bound}",
            coefficients.len()
        )));
    }

    let descriptor = FormDescriptor::new(label, level, weight, Source::Remote)?;
    let full = FullCoefficientTable::new(
        descriptor.clone(),
        coefficients.len() as u64,
        coefficients,
    )?;
    let table = full.prime_restriction()?.truncated(bound)?;

    write_cache(&table, cfg)?;
    Ok(table)
}

/// Exact-bound hit first, then the smallest cached bound covering the
/// request (truncated in memory).
fn cache_lookup(label: &str, bound: u64, cfg: &RemoteConfig) -> Result<Option<PrimeCoefficientTable>> {
    let exact = cache_file(&cfg.cache_dir, label, bound);
    if exact.is_file() {
        return Ok(Some(read_cache_file(&exact, label, bound)?));
    }
    let prefix = format!("{}__", sanitize_label(label));
    let mut best: Option<(u64, PathBuf)> = None;
    if let Ok(entries) = fs::read_dir(&cfg.cache_dir) {
        for entry in entries.flatten() {
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some(rest) = name.strip_prefix(&prefix) {
                if let Some(b) = rest
                    .strip_suffix(".ap.txt")
                    .and_then(|s| s.parse::<u64>().ok())
                {
                    if b >= bound && best.as_ref().map_or(true, |(cur, _)| b < *cur) {
                        best = Some((b, entry.path()));
                    }
                }
            }
        }
    }
    match best {
        Some((_, path)) => Ok(Some(read_cache_file(&path, label, bound)?)),
        None => Ok(None),
    }
}

fn read_cache_file(path: &Path, label: &str, bound: u64) -> Result<PrimeCoefficientTable> {
    let text = fs::read_to_string(path)?;
    let table = format::parse_coefficient_file(&text).map_err(|e| match e {
        Error::Corrupt(msg) => Error::Corrupt(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    let prime = table.into_prime_table()?;
    if prime.descriptor().label != label {
        return Err(Error::Corrupt(format!(
            "cache file {} labeled {:?}, expected {label:?}",
            path.display(),
            prime.descriptor().label
        )));
    }
    prime.truncated(bound)
}

fn write_cache(table: &PrimeCoefficientTable, cfg: &RemoteConfig) -> Result<()> {
    fs::create_dir_all(&cfg.cache_dir)?;
    let text = format::serialize(&CoefficientTable::Prime(table.clone()), true);
    let path = cache_file(&cfg.cache_dir, &table.descriptor().label, table.bound());
    let tmp = tempfile::NamedTempFile::new_in(&cfg.cache_dir)?;
    fs::write(tmp.path(), text)?;
    tmp.persist(&path)
        .map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn http_get_with_retry(url: &str, timeout: Duration) -> Result<String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into();
    let mut last_err = None;
    for _ in 0..2 {
        match agent.get(url).call() {
            Ok(mut response) => {
                return response
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| Error::Network(format!("reading body from {url}: {e}")));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Network(format!(
        "GET {url} failed after retry: {}",
        last_err.expect("at least one attempt")
    )))
}

/// The wire format: a JSON array of decimal integers, as strings or
/// numbers, listing a(1), a(2), ...
fn parse_json_coefficients(body: &str) -> Result<Vec<BigInt>> {
    let values: Vec<serde_json::Value> = serde_json::from_str(body)
        .map_err(|e| Error::Network(format!("response is not a JSON array: {e}")))?;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => {
                    return Err(Error::Network(format!(
                        "coefficient {} is not an integer: {other}",
                        i + 1
                    )))
                }
            };
            text.parse::<BigInt>().map_err(|_| {
                Error::Network(format!("coefficient {} is not an integer: {text:?}", i + 1))
            })
        })
        .collect()
}

/// Re-export for CLI use: write any table into the cache layout.
pub fn store_in_cache(table: &PrimeCoefficientTable, cfg: &RemoteConfig) -> Result<PathBuf> {
    write_cache(table, cfg)?;
    Ok(cache_file(
        &cfg.cache_dir,
        &table.descriptor().label,
        table.bound(),
    ))
}
