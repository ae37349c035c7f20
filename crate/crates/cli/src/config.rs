//! Run configuration: flag / environment / config-file precedence.
//!
//! Precedence is flags > environment variables > config file > defaults.
//! The config file is plain `key=value` lines (keys named like the long
//! flags), `#` starts a comment.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use eigencoprime_core::coeffs::remote::{RemoteConfig, DEFAULT_CACHE_DIR, ENV_API_BASE, ENV_CACHE};
use eigencoprime_core::error::{Error, Result};
use num_rational::BigRational;

use crate::report::OutputFormat;

/// Key=value file contents, plus any experiment defaults it carries.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &PathBuf) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)?;
        ConfigFile::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: idx + 1,
                msg: format!("config line {line:?} is not key=value"),
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::usage(format!("config key {key}={v:?} is invalid"))),
        }
    }
}

/// Global options after precedence resolution.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub remote: RemoteConfig,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub file: ConfigFile,
}

pub struct GlobalFlags {
    pub api_base: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub offline: bool,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub config: Option<PathBuf>,
}

pub fn resolve(flags: &GlobalFlags) -> Result<Resolved> {
    let file = match &flags.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };

    let api_base = flags
        .api_base
        .clone()
        .or_else(|| std::env::var(ENV_API_BASE).ok())
        .or_else(|| file.get("api-base").map(String::from));
    let cache_dir = flags
        .cache_dir
        .clone()
        .or_else(|| std::env::var(ENV_CACHE).ok().map(PathBuf::from))
        .or_else(|| file.get("cache-dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
    let offline = flags.offline
        || match file.get("offline") {
            Some("true") | Some("1") => true,
            _ => false,
        };
    let format_name = flags
        .format
        .clone()
        .or_else(|| file.get("format").map(String::from))
        .unwrap_or_else(|| "csv".to_string());
    let format = OutputFormat::parse(&format_name)
        .ok_or_else(|| Error::usage(format!("unknown output format {format_name:?}")))?;
    let workers = match flags.workers {
        Some(w) => w,
        None => file.get_parsed::<usize>("workers")?.unwrap_or(1),
    };
    if workers == 0 {
        return Err(Error::usage("worker count must be >= 1"));
    }
    let out = flags
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));

    Ok(Resolved {
        remote: RemoteConfig {
            api_base,
            cache_dir,
            offline,
            timeout: Duration::from_secs(30),
        },
        format,
        out,
        workers,
        file,
    })
}

/// Overrides file: lines `<ell> <density>` where the density is a decimal
/// or `num/den` rational; `#` starts a comment.
pub fn parse_overrides(text: &str) -> Result<BTreeMap<u64, BigRational>> {
    use num_bigint::BigInt;
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (ell, value) = match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(v), None) => (l, v),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("override line {line:?} is not `<ell> <density>`"),
                })
            }
        };
        let ell: u64 = ell.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("invalid prime {ell:?}"),
        })?;
        let density = if let Some((n, d)) = value.split_once('/') {
            let n: BigInt = n.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("invalid rational {value:?}"),
            })?;
            let d: BigInt = d.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("invalid rational {value:?}"),
            })?;
            BigRational::new(n, d)
        } else {
            let v: f64 = value.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("invalid density {value:?}"),
            })?;
            // decimal densities become exact over a power of ten
            let scaled = (v * 1e12).round() as i64;
            BigRational::new(BigInt::from(scaled), BigInt::from(1_000_000_000_000i64))
        };
        out.insert(ell, density);
    }
    Ok(out)
}
