//! Counting and statistical quantities over concrete form pairs: prime
//! sieving, gcd statistics, the pi and pi* counting functions, empirical
//! densities and alpha constants, the v / omega machinery, the gcd(n, a(n))
//! counts and the Erdos phi baseline.

mod counts;
mod logs;
mod omega;

pub use counts::*;
pub use logs::iterated_log;
pub use omega::*;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{gcd_big, gcd_u64, render_rational, ratio_to_f64};
use crate::coeffs::PrimeCoefficientTable;
use crate::error::{Error, Result};
use crate::sieve::{self, Factorizer};

/// Ordered list of all primes <= x.
pub fn sieve_primes(x: u64) -> Result<Vec<u64>> {
    sieve::primes(x)
}

/// n -> phi(n) for 0 <= n <= x.
pub fn totient_sieve(x: u64) -> Result<Vec<u64>> {
    sieve::totient_sieve(x)
}

/// An exact ratio of counts, always in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityEstimate {
    pub numerator: u64,
    pub denominator: u64,
}

impl DensityEstimate {
    pub fn new(numerator: u64, denominator: u64) -> Result<DensityEstimate> {
        if denominator == 0 {
            return Err(Error::usage("density denominator must be positive"));
        }
        if numerator > denominator {
            return Err(Error::Internal(format!(
                "density {numerator}/{denominator} outside [0,1]"
            )));
        }
        Ok(DensityEstimate {
            numerator,
            denominator,
        })
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator), BigInt::from(self.denominator))
    }

    /// Fixed-point decimal rendering (5 places matches the report layout).
    pub fn render(&self, places: usize) -> String {
        render_rational(
            &BigInt::from(self.numerator),
            &BigInt::from(self.denominator),
            places,
        )
    }
}

/// Parameters of a full experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Main counting bound.
    pub x: u64,
    /// Density-estimation bound.
    pub y: u64,
    /// Prime cutoff for the alpha products and model sums.
    pub prime_cutoff: u64,
    /// Fixed modulus for the gcd(d, .) count; must be > 1.
    pub d: u64,
    /// Cutoff for the omega_u variants.
    pub u: Option<u64>,
    /// Per-prime density overrides for exceptional primes.
    pub overrides: BTreeMap<u64, BigRational>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.y > self.x {
            return Err(Error::usage(format!(
                "y = {} must not exceed x = {}",
                self.y, self.x
            )));
        }
        if self.prime_cutoff > self.y {
            return Err(Error::usage(format!(
                "L = {} must not exceed y = {}",
                self.prime_cutoff, self.y
            )));
        }
        if self.d <= 1 {
            return Err(Error::usage("d must be > 1"));
        }
        Ok(())
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            x: 100_000,
            y: 50_000,
            prime_cutoff: 100,
            d: 2,
            u: None,
            overrides: BTreeMap::new(),
        }
    }
}

/// Two aligned coefficient tables with the derived gcd sequence
/// g(p) = gcd(|a1(p)|, |a2(p)|), using gcd(0, a) = |a| and gcd(0,0) = 0;
/// "coprime" always means g(p) == 1 exactly.
pub struct FormPairDataset {
    t1: PrimeCoefficientTable,
    t2: PrimeCoefficientTable,
    level_lcm: u64,
    bound: u64,
    primes: Vec<u64>,
    a1: Vec<BigInt>,
    a2: Vec<BigInt>,
    gcds: Vec<BigInt>,
    factorizer: Factorizer,
}

impl FormPairDataset {
    /// Align two tables at the smaller bound and precompute the gcds.
    pub fn new(t1: &PrimeCoefficientTable, t2: &PrimeCoefficientTable) -> Result<FormPairDataset> {
        let bound = t1.bound().min(t2.bound());
        let t1 = t1.truncated(bound)?;
        let t2 = t2.truncated(bound)?;
        let n1 = t1.descriptor().level;
        let n2 = t2.descriptor().level;
        let level_lcm = n1 / gcd_u64(n1, n2) * n2;

        let mut primes = Vec::with_capacity(t1.len());
        let mut a1 = Vec::with_capacity(t1.len());
        let mut a2 = Vec::with_capacity(t1.len());
        let mut gcds = Vec::with_capacity(t1.len());
        for ((p, v1), (q, v2)) in t1.iter().zip(t2.iter()) {
            debug_assert_eq!(p, q);
            primes.push(p);
            gcds.push(gcd_big(v1, v2));
            a1.push(v1.clone());
            a2.push(v2.clone());
        }
        let factorizer = Factorizer::new(bound)?;
        Ok(FormPairDataset {
            t1,
            t2,
            level_lcm,
            bound,
            primes,
            a1,
            a2,
            gcds,
            factorizer,
        })
    }

    pub fn table1(&self) -> &PrimeCoefficientTable {
        &self.t1
    }

    pub fn table2(&self) -> &PrimeCoefficientTable {
        &self.t2
    }

    /// N = lcm(N1, N2).
    pub fn level_lcm(&self) -> u64 {
        self.level_lcm
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn factorizer(&self) -> &Factorizer {
        &self.factorizer
    }

    /// Number of primes <= x in the dataset (pi(x) for x <= bound).
    pub fn prime_count(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Rows (p, a1(p), a2(p), g(p)) for p <= x.
    pub fn rows_to(&self, x: u64) -> impl Iterator<Item = Row<'_>> {
        let end = self.prime_count(x);
        (0..end).map(move |i| Row {
            p: self.primes[i],
            a1: &self.a1[i],
            a2: &self.a2[i],
            g: &self.gcds[i],
        })
    }

    fn require_bound(&self, x: u64) -> Result<()> {
        if x > self.bound {
            return Err(Error::data(format!(
                "x = {x} exceeds dataset bound {}",
                self.bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Row<'a> {
    pub p: u64,
    pub a1: &'a BigInt,
    pub a2: &'a BigInt,
    pub g: &'a BigInt,
}

impl Row<'_> {
    pub fn coprime(&self) -> bool {
        use num_traits::One;
        self.g.is_one()
    }

    pub fn both_nonzero(&self) -> bool {
        !self.a1.is_zero() && !self.a2.is_zero()
    }
}

/// Helper shared by the densities: exact rational -> f64.
pub(crate) fn rational_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}
