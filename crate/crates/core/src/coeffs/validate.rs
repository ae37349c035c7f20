//! Table validation reports: Deligne-bound status, the ramified-prime
//! magnitude check, and recursion/multiplicativity consistency of stored
//! composite coefficients.

use num_bigint::BigInt;
use num_traits::Signed;

use super::{deligne_bound_ok, hecke_prime_power, CoefficientTable, FullCoefficientTable, PrimeCoefficientTable};
use crate::sieve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Fail,
    Warn,
    Info,
}

#[derive(Debug, Clone)]
pub struct Issue {
    pub severity: Severity,
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    pub deligne_checked: usize,
    pub consistency_checked: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        !self.issues.iter().any(|i| i.severity == Severity::Fail)
    }

    pub fn warnings(&self) -> usize {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Warn)
            .count()
    }

    fn push(&mut self, severity: Severity, subject: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            severity,
            subject: subject.into(),
            message: message.into(),
        });
    }
}

pub fn validate(table: &CoefficientTable) -> ValidationReport {
    match table {
        CoefficientTable::Prime(t) => validate_prime_table(t),
        CoefficientTable::Full(t) => validate_full_table(t),
    }
}

/// Deligne-bound status for every prime plus the warning-only magnitude
/// check |a(p)| = p^{(k-2)/2} at primes exactly dividing the level.
pub fn validate_prime_table(table: &PrimeCoefficientTable) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = table.descriptor();
    for (p, a) in table.iter() {
        if d.level % p != 0 {
            report.deligne_checked += 1;
            if !deligne_bound_ok(a, p, d.weight) {
                report.push(
                    Severity::Fail,
                    format!("p={p}"),
                    format!("Deligne bound violated: |{a}| > 2 p^{{({}-1)/2}}", d.weight),
                );
            }
        } else if (d.level / p) % p != 0 {
            // p || N: newform coefficients have |a(p)| = p^{(k-2)/2}, but
            // sources may label oldform embeddings, so this only warns.
            let expected = BigInt::from(p).pow((d.weight - 2) / 2);
            if a.abs() != expected {
                report.push(
                    Severity::Warn,
                    format!("p={p}"),
                    format!("|a({p})| = {} but p||N suggests {expected}", a.abs()),
                );
            }
        }
    }
    if report.passed() {
        report.push(
            Severity::Info,
            "deligne",
            format!("{} primes within the Deligne bound", report.deligne_checked),
        );
    }
    report
}

/// Everything from the prime-table check, plus consistency of stored
/// a(p^2) and a(pq) against the Hecke recursion and multiplicativity.
pub fn validate_full_table(table: &FullCoefficientTable) -> ValidationReport {
    let d = table.descriptor().clone();
    let bound = table.bound();
    let primes = if bound >= 2 {
        sieve::primes(bound).unwrap_or_default()
    } else {
        Vec::new()
    };

    let entries: Vec<(u64, BigInt)> = primes
        .iter()
        .map(|&p| (p, table.a_n(p).expect("in range").clone()))
        .collect();
    let as_prime = PrimeCoefficientTable::new_unchecked(d.clone(), bound, entries);
    let mut report = validate_prime_table(&as_prime);

    for &p in &primes {
        if p * p > bound {
            break;
        }
        report.consistency_checked += 1;
        let derived = hecke_prime_power(table.a_n(p).unwrap(), p, 2, d.weight, d.level);
        let stored = table.a_n(p * p).unwrap();
        if stored != &derived {
            report.push(
                Severity::Fail,
                format!("n={}", p * p),
                format!("stored a({}) = {stored} but recursion gives {derived}", p * p),
            );
        }
    }
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            if p * q > bound {
                break;
            }
            report.consistency_checked += 1;
            let derived = table.a_n(p).unwrap() * table.a_n(q).unwrap();
            let stored = table.a_n(p * q).unwrap();
            if stored != &derived {
                report.push(
                    Severity::Fail,
                    format!("n={}", p * q),
                    format!(
                        "stored a({}) = {stored} but a({p})a({q}) = {derived}",
                        p * q
                    ),
                );
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{format, table_from_form, FormDescriptor, Source};
    use crate::qseries::level1_eigenform;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn f3_recursion_check_passes() {
        // S_8(13): a(2)=10, a(4) = 100 - 2^7 = -28
        let text = "# label=f3 level=13 weight=8 kind=an bound=6\n\
                    1 1\n2 10\n3 -73\n4 -28\n5 -295\n6 -730\n";
        let table = format::parse_coefficient_file(text).unwrap();
        let report = validate(&table);
        assert!(report.passed(), "{:?}", report.issues);
        assert!(report.consistency_checked >= 2); // a(4) and a(6)
    }

    #[test]
    fn recursion_mismatch_fails() {
        let text = "# label=f3 level=13 weight=8 kind=an bound=6\n\
                    1 1\n2 10\n3 -73\n4 -29\n5 -295\n6 -730\n";
        let table = format::parse_coefficient_file(text).unwrap();
        let report = validate(&table);
        assert!(!report.passed());
    }

    #[test]
    fn deligne_failure_reported() {
        // weight 6: 100 > 2*3^2.5 ~ 31.2
        let d = FormDescriptor::new("bad", 11, 6, Source::Local).unwrap();
        let t = PrimeCoefficientTable::new_unchecked(
            d,
            3,
            vec![(2, big(-4)), (3, big(100))],
        );
        let report = validate_prime_table(&t);
        assert!(!report.passed());
    }

    #[test]
    fn ramified_magnitude_warns_only() {
        // level 11 weight 6: expected |a(11)| = 11^2 = 121; use 1 instead
        let entries: Vec<(u64, BigInt)> = crate::sieve::primes(11)
            .unwrap()
            .into_iter()
            .map(|p| (p, if p == 11 { big(1) } else { big(0) }))
            .collect();
        let d = FormDescriptor::new("f1x", 11, 6, Source::Local).unwrap();
        let t = PrimeCoefficientTable::new(d, 11, entries).unwrap();
        let report = validate_prime_table(&t);
        assert!(report.passed());
        assert_eq!(report.warnings(), 1);
    }

    #[test]
    fn generated_form_validates_clean() {
        let form = level1_eigenform(12, 50).unwrap();
        let table = table_from_form(&form, format::TableKind::An, "delta").unwrap();
        let report = validate(&table);
        assert!(report.passed(), "{:?}", report.issues);
        assert_eq!(report.warnings(), 0);
    }
}
