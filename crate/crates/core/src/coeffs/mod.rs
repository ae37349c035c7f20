//! Eigenform Fourier coefficient tables: file parsing, remote acquisition
//! with an on-disk cache, the Hecke prime-power recursion and
//! multiplicative assembly of a(n).

pub mod format;
pub mod remote;
pub mod validate;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qseries::Level1Form;
use crate::sieve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Local,
    Remote,
    Generated,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Local => "local",
            Source::Remote => "remote",
            Source::Generated => "generated",
        }
    }
}

/// Identity of a form: opaque label plus level and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormDescriptor {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub source: Source,
}

impl FormDescriptor {
    pub fn new(label: impl Into<String>, level: u64, weight: u32, source: Source) -> Result<Self> {
        let d = FormDescriptor {
            label: label.into(),
            level,
            weight,
            source,
        };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<()> {
        if self.level < 1 {
            return Err(Error::Validation("level must be >= 1".into()));
        }
        if self.weight < 2 || self.weight % 2 != 0 {
            return Err(Error::Validation(format!(
                "weight {} must be even and >= 2",
                self.weight
            )));
        }
        Ok(())
    }
}

/// |a(p)| <= 2 p^{(k-1)/2} for p not dividing the level, tested exactly as
/// a(p)^2 <= 4 p^{k-1}.
pub fn deligne_bound_ok(a: &BigInt, p: u64, weight: u32) -> bool {
    let rhs = BigInt::from(4u32) * BigInt::from(p).pow(weight - 1);
    a * a <= rhs
}

/// Map p -> a(p) for every prime p <= bound, gap-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCoefficientTable {
    descriptor: FormDescriptor,
    bound: u64,
    primes: Vec<u64>,
    values: Vec<BigInt>,
}

impl PrimeCoefficientTable {
    /// Build and validate: entries must cover every prime <= bound in
    /// increasing order, and satisfy the Deligne bound away from the level.
    pub fn new(
        descriptor: FormDescriptor,
        bound: u64,
        entries: Vec<(u64, BigInt)>,
    ) -> Result<Self> {
        descriptor.check()?;
        if bound < 2 {
            return Err(Error::Validation("prime table bound must be >= 2".into()));
        }
        let expected = sieve::primes(bound)?;
        if entries.len() != expected.len() {
            return Err(Error::Validation(format!(
                "expected {} primes up to {bound}, found {} entries",
                expected.len(),
                entries.len()
            )));
        }
        let mut primes = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for ((p, a), want) in entries.into_iter().zip(&expected) {
            if p != *want {
                return Err(Error::Validation(format!(
                    "gap in prime coverage: expected p={want}, found p={p}"
                )));
            }
            if descriptor.level % p != 0 && !deligne_bound_ok(&a, p, descriptor.weight) {
                return Err(Error::Validation(format!(
                    "Deligne bound violated at p={p}: |{a}| > 2 p^({}/2)",
                    descriptor.weight - 1
                )));
            }
            primes.push(p);
            values.push(a);
        }
        Ok(PrimeCoefficientTable {
            descriptor,
            bound,
            primes,
            values,
        })
    }

    /// Construction without the coverage/Deligne checks; only for
    /// validation reporting and tests.
    pub(crate) fn new_unchecked(
        descriptor: FormDescriptor,
        bound: u64,
        entries: Vec<(u64, BigInt)>,
    ) -> Self {
        let (primes, values) = entries.into_iter().unzip();
        PrimeCoefficientTable {
            descriptor,
            bound,
            primes,
            values,
        }
    }

    pub fn descriptor(&self) -> &FormDescriptor {
        &self.descriptor
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn a_p(&self, p: u64) -> Option<&BigInt> {
        self.primes
            .binary_search(&p)
            .ok()
            .map(|idx| &self.values[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.primes.iter().copied().zip(self.values.iter())
    }

    /// Same table restricted to a smaller bound.
    pub fn truncated(&self, bound: u64) -> Result<PrimeCoefficientTable> {
        if bound > self.bound {
            return Err(Error::data(format!(
                "cannot extend table of bound {} to {bound}",
                self.bound
            )));
        }
        let keep = self.primes.partition_point(|&p| p <= bound);
        Ok(PrimeCoefficientTable {
            descriptor: self.descriptor.clone(),
            bound,
            primes: self.primes[..keep].to_vec(),
            values: self.values[..keep].to_vec(),
        })
    }
}

/// Map n -> a(n) for 1 <= n <= bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullCoefficientTable {
    descriptor: FormDescriptor,
    bound: u64,
    values: Vec<BigInt>, // values[n-1] = a(n)
}

impl FullCoefficientTable {
    pub fn new(descriptor: FormDescriptor, bound: u64, values: Vec<BigInt>) -> Result<Self> {
        descriptor.check()?;
        if bound < 1 || values.len() != bound as usize {
            return Err(Error::Validation(format!(
                "full table must store exactly {bound} values, found {}",
                values.len()
            )));
        }
        if !values[0].is_one() {
            return Err(Error::Validation(
                "not normalized: a(1) must equal 1".into(),
            ));
        }
        let table = FullCoefficientTable {
            descriptor,
            bound,
            values,
        };
        // Deligne bound at the primes
        if bound >= 2 {
            for p in sieve::primes(bound)? {
                if table.descriptor.level % p != 0 {
                    let a = table.a_n(p).expect("in range");
                    if !deligne_bound_ok(a, p, table.descriptor.weight) {
                        return Err(Error::Validation(format!(
                            "Deligne bound violated at p={p}"
                        )));
                    }
                }
            }
        }
        Ok(table)
    }

    pub fn descriptor(&self) -> &FormDescriptor {
        &self.descriptor
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn a_n(&self, n: u64) -> Option<&BigInt> {
        if n >= 1 && n <= self.bound {
            Some(&self.values[(n - 1) as usize])
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        (1..=self.bound).zip(self.values.iter())
    }

    /// Restriction to prime indices.
    pub fn prime_restriction(&self) -> Result<PrimeCoefficientTable> {
        if self.bound < 2 {
            return Err(Error::data("full table too short to restrict to primes"));
        }
        let entries = sieve::primes(self.bound)?
            .into_iter()
            .map(|p| (p, self.values[(p - 1) as usize].clone()))
            .collect();
        PrimeCoefficientTable::new(self.descriptor.clone(), self.bound, entries)
    }
}

/// Either table kind, as produced by the file parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientTable {
    Prime(PrimeCoefficientTable),
    Full(FullCoefficientTable),
}

impl CoefficientTable {
    pub fn descriptor(&self) -> &FormDescriptor {
        match self {
            CoefficientTable::Prime(t) => t.descriptor(),
            CoefficientTable::Full(t) => t.descriptor(),
        }
    }

    pub fn bound(&self) -> u64 {
        match self {
            CoefficientTable::Prime(t) => t.bound(),
            CoefficientTable::Full(t) => t.bound(),
        }
    }

    /// A prime table, restricting a full table if necessary.
    pub fn into_prime_table(self) -> Result<PrimeCoefficientTable> {
        match self {
            CoefficientTable::Prime(t) => Ok(t),
            CoefficientTable::Full(t) => t.prime_restriction(),
        }
    }
}

/// a(p^alpha) from a(p): the three-term recursion
/// a(p^{j+1}) = a(p) a(p^j) - p^{k-1} a(p^{j-1}) away from the level, and
/// a(p^alpha) = a(p)^alpha at primes dividing the level (newform with
/// trivial nebentypus assumed; with p^2 | N this still holds with a(p)=0).
pub fn hecke_prime_power(a_p: &BigInt, p: u64, alpha: u32, weight: u32, level: u64) -> BigInt {
    if alpha == 0 {
        return BigInt::one();
    }
    if level % p == 0 {
        return a_p.pow(alpha);
    }
    let pk = BigInt::from(p).pow(weight - 1);
    let mut prev = BigInt::one();
    let mut cur = a_p.clone();
    for _ in 1..alpha {
        let next = a_p * &cur - &pk * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// a(n) assembled multiplicatively from the prime table; a(1) = 1.
pub fn coefficient_at(table: &PrimeCoefficientTable, n: u64) -> Result<BigInt> {
    let mut assembler = Assembler::new(table);
    assembler.coefficient_at(n)
}

/// Memoizing wrapper over `hecke_prime_power` for bulk a(n) assembly.
pub struct Assembler<'a> {
    table: &'a PrimeCoefficientTable,
    cache: HashMap<(u64, u32), BigInt>,
}

impl<'a> Assembler<'a> {
    pub fn new(table: &'a PrimeCoefficientTable) -> Self {
        Assembler {
            table,
            cache: HashMap::new(),
        }
    }

    pub fn table(&self) -> &PrimeCoefficientTable {
        self.table
    }

    pub fn prime_power(&mut self, p: u64, alpha: u32) -> Result<BigInt> {
        if let Some(v) = self.cache.get(&(p, alpha)) {
            return Ok(v.clone());
        }
        let a_p = self.table.a_p(p).ok_or_else(|| {
            Error::data(format!(
                "prime factor {p} exceeds table bound {}",
                self.table.bound
            ))
        })?;
        let d = self.table.descriptor();
        let v = hecke_prime_power(a_p, p, alpha, d.weight, d.level);
        self.cache.insert((p, alpha), v.clone());
        Ok(v)
    }

    pub fn coefficient_at(&mut self, n: u64) -> Result<BigInt> {
        if n == 0 {
            return Err(Error::usage("coefficient index must be >= 1"));
        }
        let mut acc = BigInt::one();
        for (p, alpha) in factorize_against(n, &self.table.primes)? {
            acc *= self.prime_power(p, alpha)?;
            if acc.is_zero() {
                // remaining factors cannot change a zero product, but we
                // still require them to be within the table bound
            }
        }
        Ok(acc)
    }
}

/// Factor n using the table's prime list; any leftover cofactor means a
/// prime factor beyond the bound.
fn factorize_against(mut n: u64, primes: &[u64]) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    for &p in primes {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        // leftover is prime; it must be covered by the table
        if primes.binary_search(&n).is_ok() {
            out.push((n, 1));
        } else {
            return Err(Error::data(format!(
                "prime factor {n} exceeds table bound"
            )));
        }
    }
    Ok(out)
}

/// Export a generated level-1 form as a coefficient table in either kind.
pub fn table_from_form(form: &Level1Form, kind: format::TableKind, label: &str) -> Result<CoefficientTable> {
    let prec = form.series().prec();
    if prec < 3 {
        return Err(Error::data("series precision too small to export"));
    }
    let bound = (prec - 1) as u64;
    let descriptor = FormDescriptor::new(label, 1, form.weight(), Source::Generated)?;
    match kind {
        format::TableKind::An => {
            let values = (1..=bound)
                .map(|n| form.coefficient(n as usize).clone())
                .collect();
            Ok(CoefficientTable::Full(FullCoefficientTable::new(
                descriptor, bound, values,
            )?))
        }
        format::TableKind::Ap => {
            let entries = sieve::primes(bound)?
                .into_iter()
                .map(|p| (p, form.coefficient(p as usize).clone()))
                .collect();
            Ok(CoefficientTable::Prime(PrimeCoefficientTable::new(
                descriptor, bound, entries,
            )?))
        }
    }
}
