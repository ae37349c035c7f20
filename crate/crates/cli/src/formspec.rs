//! Form specifications: `label:<string>` (remote database label),
//! `path:<file>` (local coefficient file), or `gen:<weight>` (generated
//! level-1 eigenform).

use std::path::PathBuf;

use eigencoprime_core::coeffs::remote::{fetch_remote, RemoteConfig};
use eigencoprime_core::coeffs::{format, table_from_form, PrimeCoefficientTable};
use eigencoprime_core::error::{Error, Result};
use eigencoprime_core::qseries::level1_eigenform;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormSpec {
    Label(String),
    Path(PathBuf),
    Generated(u32),
}

impl FormSpec {
    pub fn parse(s: &str) -> Result<FormSpec> {
        if let Some(label) = s.strip_prefix("label:") {
            if label.is_empty() {
                return Err(Error::usage("empty label in form spec"));
            }
            Ok(FormSpec::Label(label.to_string()))
        } else if let Some(path) = s.strip_prefix("path:") {
            Ok(FormSpec::Path(PathBuf::from(path)))
        } else if let Some(weight) = s.strip_prefix("gen:") {
            let weight: u32 = weight
                .parse()
                .map_err(|_| Error::usage(format!("invalid generated weight {weight:?}")))?;
            Ok(FormSpec::Generated(weight))
        } else {
            Err(Error::usage(format!(
                "form spec {s:?} must be label:<string>, path:<file> or gen:<weight>"
            )))
        }
    }

    pub fn display(&self) -> String {
        match self {
            FormSpec::Label(l) => format!("label:{l}"),
            FormSpec::Path(p) => format!("path:{}", p.display()),
            FormSpec::Generated(w) => format!("gen:{w}"),
        }
    }

    /// Resolve to a prime table with at least the requested bound.
    pub fn resolve(&self, bound: u64, remote: &RemoteConfig) -> Result<PrimeCoefficientTable> {
        match self {
            FormSpec::Label(label) => {
                let (level, weight) = parse_lmfdb_label(label)?;
                fetch_remote(label, level, weight, bound, remote)
            }
            FormSpec::Path(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::data(format!("cannot read {}: {e}", path.display()))
                })?;
                let table = format::parse_coefficient_file(&text)?.into_prime_table()?;
                if table.bound() < bound {
                    return Err(Error::data(format!(
                        "{} has bound {}, need {bound}",
                        path.display(),
                        table.bound()
                    )));
                }
                Ok(table)
            }
            FormSpec::Generated(weight) => {
                let prec = (bound + 1).max(3) as usize;
                let form = level1_eigenform(*weight, prec)?;
                table_from_form(&form, format::TableKind::Ap, &format!("gen:{weight}"))?
                    .into_prime_table()
            }
        }
    }
}

/// LMFDB-style labels `N.k.x.y` carry the level and weight in their first
/// two components; the remote wire format itself is coefficient-only.
pub fn parse_lmfdb_label(label: &str) -> Result<(u64, u32)> {
    let mut parts = label.split('.');
    let level = parts
        .next()
        .and_then(|s| s.parse::<u64>().ok())
        .ok_or_else(|| {
            Error::usage(format!(
                "label {label:?} does not start with `<level>.<weight>.`; \
                 use an LMFDB-style label or a path: spec"
            ))
        })?;
    let weight = parts
        .next()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            Error::usage(format!("label {label:?} carries no weight component"))
        })?;
    Ok((level, weight))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        assert_eq!(
            FormSpec::parse("gen:12").unwrap(),
            FormSpec::Generated(12)
        );
        assert_eq!(
            FormSpec::parse("label:11.6.a.a").unwrap(),
            FormSpec::Label("11.6.a.a".into())
        );
        assert!(matches!(
            FormSpec::parse("path:fixtures/f1.txt").unwrap(),
            FormSpec::Path(_)
        ));
        assert!(FormSpec::parse("11.6.a.a").is_err());
        assert!(FormSpec::parse("gen:abc").is_err());
    }

    #[test]
    fn label_metadata() {
        assert_eq!(parse_lmfdb_label("11.6.a.a").unwrap(), (11, 6));
        assert_eq!(parse_lmfdb_label("13.4.a.a").unwrap(), (13, 4));
        assert!(parse_lmfdb_label("delta").is_err());
    }

    #[test]
    fn generated_resolution() {
        let remote = RemoteConfig::default();
        let t = FormSpec::Generated(12).resolve(20, &remote).unwrap();
        assert!(t.bound() >= 20);
        assert_eq!(t.a_p(2).unwrap(), &num_bigint::BigInt::from(-24));
        assert!(FormSpec::Generated(14).resolve(20, &remote).is_err());
    }
}
