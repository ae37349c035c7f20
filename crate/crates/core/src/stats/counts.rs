//! Prime-counting statistics: the coprimality count C(x) and ratio R(x),
//! the divisibility counts pi(x, m) and pi*(x, m), empirical densities,
//! the alpha constants, exceptional-prime detection, and the elementary
//! sieve baselines.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{rational_f64, DensityEstimate, FormPairDataset};
use crate::arith::gcd_u64;
use crate::error::{Error, Result};
use crate::galois::delta_exact;
use crate::sieve;
use crate::stats::iterated_log;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn divisible(a: &BigInt, m: u64) -> bool {
    (a % m).is_zero()
}

/// C(x) = #{p <= x : g(p) = 1} and R(x) = C(x)/pi(x).
pub fn coprime_prime_count(ds: &FormPairDataset, x: u64) -> Result<(u64, DensityEstimate)> {
    ds.require_bound(x)?;
    let denom = ds.prime_count(x) as u64;
    if denom == 0 {
        return Err(Error::usage(format!("pi({x}) = 0: x must be >= 2")));
    }
    let count = ds.rows_to(x).filter(|r| r.coprime()).count() as u64;
    Ok((count, DensityEstimate::new(count, denom)?))
}

/// pi_{f1,f2}(x, m) = #{p <= x : (p, mN) = 1, m | a1(p), m | a2(p)}.
pub fn pi_m(ds: &FormPairDataset, x: u64, m: u64) -> Result<u64> {
    ds.require_bound(x)?;
    if m == 0 {
        return Err(Error::usage("modulus m must be >= 1"));
    }
    let n = ds.level_lcm();
    Ok(ds
        .rows_to(x)
        .filter(|r| {
            gcd_u64(r.p, m) == 1
                && gcd_u64(r.p, n) == 1
                && divisible(r.a1, m)
                && divisible(r.a2, m)
        })
        .count() as u64)
}

/// pi*(x, m): additionally requires a1(p) a2(p) != 0. Ramified primes
/// p | mN are excluded by default to mirror `pi_m`; the original
/// definition is silent on them, so `include_ramified` exposes both.
pub fn pi_star(
    ds: &FormPairDataset,
    x: u64,
    m: u64,
    include_ramified: bool,
) -> Result<u64> {
    ds.require_bound(x)?;
    if m == 0 {
        return Err(Error::usage("modulus m must be >= 1"));
    }
    let n = ds.level_lcm();
    Ok(ds
        .rows_to(x)
        .filter(|r| {
            r.both_nonzero()
                && divisible(r.a1, m)
                && divisible(r.a2, m)
                && (include_ramified || (gcd_u64(r.p, m) == 1 && gcd_u64(r.p, n) == 1))
        })
        .count() as u64)
}

/// delta(y, l) = pi(y, l) / pi(y), the empirical density.
pub fn delta_empirical(ds: &FormPairDataset, y: u64, ell: u64) -> Result<DensityEstimate> {
    ds.require_bound(y)?;
    let denom = ds.prime_count(y) as u64;
    if denom == 0 {
        return Err(Error::usage(format!("pi({y}) = 0: y must be >= 2")));
    }
    DensityEstimate::new(pi_m(ds, y, ell)?, denom)
}

/// alpha_{L,y} = prod over primes l <= L of (1 - delta_y(l)), exact.
pub fn alpha_empirical(ds: &FormPairDataset, cutoff: u64, y: u64) -> Result<BigRational> {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    if cutoff >= 2 {
        for ell in sieve::primes(cutoff)? {
            let d = delta_empirical(ds, y, ell)?;
            num *= BigInt::from(d.denominator - d.numerator);
            den *= BigInt::from(d.denominator);
        }
    }
    Ok(BigRational::new_raw(num, den))
}

/// Per-prime model density with overrides applied.
pub fn delta_used(ell: u64, overrides: &BTreeMap<u64, BigRational>) -> BigRational {
    overrides
        .get(&ell)
        .cloned()
        .unwrap_or_else(|| delta_exact(ell))
}

/// Truncated model product prod_{l <= L} (1 - delta_used(l)). The factors
/// are multiplied without intermediate reduction; use `rational_f64` or
/// `render_rational` on the result.
pub fn alpha_exact_product(
    cutoff: u64,
    overrides: &BTreeMap<u64, BigRational>,
) -> Result<BigRational> {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    if cutoff >= 2 {
        for ell in sieve::primes(cutoff)? {
            let d = delta_used(ell, overrides);
            num *= d.denom() - d.numer();
            den *= d.denom().clone();
        }
    }
    Ok(BigRational::new_raw(num, den))
}

/// Moebius-weighted truncation of alpha' = sum mu(n) delta(n), with the
/// model delta extended multiplicatively over squarefree n.
#[derive(Debug, Clone, Copy)]
pub struct AlphaPrime {
    pub value: f64,
    /// Heuristic remainder magnitude; [value - tail, value + tail] is the
    /// reported bracket.
    pub tail: f64,
    pub terms: u64,
}

pub fn alpha_prime_truncated(
    bound: u64,
    overrides: &BTreeMap<u64, BigRational>,
) -> Result<AlphaPrime> {
    if bound == 0 {
        return Err(Error::usage("alpha' truncation bound must be >= 1"));
    }
    let extension = bound.saturating_mul(16).min(1_000_000).max(bound);
    let factorizer = sieve::Factorizer::new(extension)?;
    let mut delta_cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut delta_model = |n: u64, factorizer: &sieve::Factorizer| -> Option<f64> {
        // squarefree n only; None marks a squared factor
        let mut value = 1.0;
        for (p, e) in factorizer.factorize(n) {
            if e > 1 {
                return None;
            }
            let d = *delta_cache
                .entry(p)
                .or_insert_with(|| rational_f64(&delta_used(p, overrides)));
            value *= d;
        }
        Some(value)
    };

    let mut value = 0.0;
    let mut terms = 0u64;
    for n in 1..=bound {
        if let Some(d) = delta_model(n, &factorizer) {
            let omega = factorizer.factorize(n).len() as u32;
            let mu = if omega % 2 == 0 { 1.0 } else { -1.0 };
            value += mu * d;
            terms += 1;
        }
    }
    // Tail estimate: the exactly-computed continuation up to `extension`,
    // plus y^{-1} (log y)^2 with implied constant 3 for the rest. The
    // constant is a documented heuristic; the bracket is report-only.
    let mut tail = 0.0;
    for n in bound + 1..=extension {
        if let Some(d) = delta_model(n, &factorizer) {
            tail += d;
        }
    }
    let e = extension as f64;
    tail += 3.0 * e.ln() * e.ln() / e;
    Ok(AlphaPrime { value, tail, terms })
}

/// Deviation report for one prime against the exact model density.
#[derive(Debug, Clone)]
pub struct ExceptionalReport {
    pub ell: u64,
    pub empirical: DensityEstimate,
    pub model: BigRational,
    pub deviation: f64,
    pub threshold: f64,
    pub flagged: bool,
}

/// Flag l when |delta_y(l) - delta_exact(l)| exceeds the binomial
/// fluctuation envelope max(3 sqrt(delta/pi(y)), 1e-3). Heuristic: the
/// exceptional set is not computable, so deviations are detected
/// empirically.
pub fn detect_exceptional(ds: &FormPairDataset, ell: u64, y: u64) -> Result<ExceptionalReport> {
    let empirical = delta_empirical(ds, y, ell)?;
    let model = delta_exact(ell);
    let model_f = rational_f64(&model);
    let deviation = (empirical.value() - model_f).abs();
    let threshold = (3.0 * (model_f / empirical.denominator as f64).sqrt()).max(1e-3);
    Ok(ExceptionalReport {
        ell,
        empirical,
        model,
        deviation,
        threshold,
        flagged: deviation > threshold,
    })
}

/// #{p <= x : a(p) = 0} over a single table.
pub fn zero_coeff_count(table: &crate::coeffs::PrimeCoefficientTable, x: u64) -> Result<u64> {
    if x > table.bound() {
        return Err(Error::data(format!(
            "x = {x} exceeds table bound {}",
            table.bound()
        )));
    }
    Ok(table
        .iter()
        .take_while(|(p, _)| *p <= x)
        .filter(|(_, a)| a.is_zero())
        .count() as u64)
}

/// #{p <= x : gcd(g(p), P(y)) = 1} with P(y) the product of primes < y,
/// decided by prime-factor tests on g(p) instead of forming P(y).
pub fn sieve_upper_count(ds: &FormPairDataset, x: u64, y: u64) -> Result<u64> {
    ds.require_bound(x)?;
    let small = if y > 2 { sieve::primes(y - 1)? } else { Vec::new() };
    Ok(ds
        .rows_to(x)
        .filter(|r| {
            if small.is_empty() {
                return true; // P(y) = 1
            }
            if r.g.is_zero() {
                return false; // gcd(0, P(y)) = P(y) > 1
            }
            !small.iter().any(|&ell| divisible(r.g, ell))
        })
        .count() as u64)
}

/// #{n <= x : every prime factor of n exceeds y}; n = 1 counts.
pub fn rough_count(x: u64, y: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::usage("rough_count requires x >= 1"));
    }
    let primes = sieve::primes(x.max(2))?;
    let mut marked = vec![false; (x + 1) as usize];
    if y >= 2 {
        for p in primes {
            if p > y {
                break;
            }
            let mut j = p;
            while j <= x {
                marked[j as usize] = true;
                j += p;
            }
        }
    }
    Ok((1..=x).filter(|&n| !marked[n as usize]).count() as u64)
}

/// Main term x prod_{p <= y} (1 - 1/p) of the Eratosthenes count.
pub fn rough_main_term(x: u64, y: u64) -> f64 {
    let mut product = 1.0;
    if y >= 2 {
        if let Ok(ps) = sieve::primes(y) {
            for p in ps {
                product *= 1.0 - 1.0 / p as f64;
            }
        }
    }
    x as f64 * product
}

#[derive(Debug, Clone, Copy)]
pub struct ErdosCount {
    pub count: u64,
    /// e^{-gamma} x / L_3(x), when defined at this x.
    pub main_term: Option<f64>,
    pub ratio: Option<f64>,
}

/// #{n <= x : gcd(n, phi(n)) = 1}, with the slow-convergence comparison
/// reported and never asserted.
pub fn erdos_phi_count(x: u64) -> Result<ErdosCount> {
    if x == 0 {
        return Err(Error::usage("erdos_phi_count requires x >= 1"));
    }
    let phi = sieve::totient_sieve(x)?;
    let count = (1..=x)
        .filter(|&n| gcd_u64(n, phi[n as usize]) == 1)
        .count() as u64;
    let main_term = iterated_log(x as f64, 3)
        .ok()
        .map(|l3| (-EULER_GAMMA).exp() * x as f64 / l3);
    Ok(ErdosCount {
        count,
        main_term,
        ratio: main_term.map(|m| count as f64 / m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::tests::table;

    fn f1f2() -> FormPairDataset {
        let t1 = table("f1", 11, 6, 6, &[(2, -4), (3, -15), (5, -19)]);
        let t2 = table("f2", 13, 4, 6, &[(2, -5), (3, -7), (5, -7)]);
        FormPairDataset::new(&t1, &t2).unwrap()
    }

    #[test]
    fn coprime_count_examples() {
        let ds = f1f2();
        // p = 2 counts: gcd(-4, -5) = 1
        let (c, r) = coprime_prime_count(&ds, 2).unwrap();
        assert_eq!(c, 1);
        assert_eq!(r.render(5), "1.00000");
        let (c6, _) = coprime_prime_count(&ds, 6).unwrap();
        // gcd(4,5)=1, gcd(15,7)=1, gcd(19,7)=1
        assert_eq!(c6, 3);
        assert!(coprime_prime_count(&ds, 7).is_err());
    }

    #[test]
    fn pi_m_examples() {
        let ds = f1f2();
        // x=6, m=5: p in {2,3} after removing p | 5*143; 5 divides -15 but not -7
        assert_eq!(pi_m(&ds, 6, 5).unwrap(), 0);
        // m=1: universal divisibility, only (p, N)=1 remains
        assert_eq!(pi_m(&ds, 6, 1).unwrap(), 3);
        assert!(pi_m(&ds, 6, 0).is_err());
    }

    #[test]
    fn pi_monotone_under_divisibility() {
        let t1 = table("y1", 1, 12, 20, &[(2, 6), (3, 6), (5, 6), (7, 0), (11, 30), (13, 5), (17, 2), (19, 11)]);
        let t2 = table("y2", 1, 12, 20, &[(2, 12), (3, -6), (5, 2), (7, 6), (11, 6), (13, 10), (17, 3), (19, 0)]);
        let ds = FormPairDataset::new(&t1, &t2).unwrap();
        for x in [5u64, 10, 20] {
            assert!(pi_m(&ds, x, 6).unwrap() <= pi_m(&ds, x, 2).unwrap());
            assert!(pi_m(&ds, x, 6).unwrap() <= pi_m(&ds, x, 3).unwrap());
            // pi* (excluding ramified) is a subset of pi_m
            assert!(pi_star(&ds, x, 2, false).unwrap() <= pi_m(&ds, x, 2).unwrap());
        }
        // x=11, m=6: p=7 has a1=0 (divisible, but dropped by pi*) and
        // p=11 has (30, 6), both nonzero and divisible
        assert_eq!(pi_m(&ds, 11, 6).unwrap(), 2);
        assert_eq!(pi_star(&ds, 11, 6, false).unwrap(), 1);
        // include_ramified picks up p = 2 for m = 2 (a1, a2 both even there)
        assert_eq!(pi_star(&ds, 2, 2, true).unwrap() - pi_star(&ds, 2, 2, false).unwrap(), 1);
    }

    #[test]
    fn delta_empirical_small() {
        let ds = f1f2();
        // no qualifying primes below 5
        assert_eq!(delta_empirical(&ds, 3, 5).unwrap().numerator, 0);
        assert!(delta_empirical(&ds, 1, 5).is_err());
    }

    #[test]
    fn alpha_product_examples() {
        let overrides = BTreeMap::new();
        // L < 2: empty product
        let empty = alpha_exact_product(1, &overrides).unwrap();
        assert!(empty.is_one());
        // frozen from the exact rational expansion:
        // (4/9)(54/64)(550/576)(2254/2304) = 0.3503022...
        let a7 = alpha_exact_product(7, &overrides).unwrap();
        assert!((rational_f64(&a7) - 0.350_302_2).abs() < 1e-6);
        assert_eq!(
            crate::arith::render_rational(a7.numer(), a7.denom(), 5),
            "0.35030"
        );
        // L=2 keeps only (1 - 5/9)
        let a2 = alpha_exact_product(2, &overrides).unwrap();
        assert_eq!(a2.reduced(), BigRational::new(BigInt::from(4), BigInt::from(9)));
    }

    #[test]
    fn alpha_prime_examples() {
        let overrides = BTreeMap::new();
        let b1 = alpha_prime_truncated(1, &overrides).unwrap();
        assert!((b1.value - 1.0).abs() < 1e-12); // mu(1) delta(1) = 1
        // frozen: 1 - 5/9 - 10/64 - 26/576 + 50/576 = 95/288
        let b6 = alpha_prime_truncated(6, &overrides).unwrap();
        assert!((b6.value - 95.0 / 288.0).abs() < 1e-12, "{}", b6.value);
        assert_eq!(b6.terms, 5); // n = 4 is not squarefree
    }

    #[test]
    fn alpha_prime_matches_product_at_large_cutoff() {
        let overrides = BTreeMap::new();
        let moebius = alpha_prime_truncated(10_000, &overrides).unwrap().value;
        let product = rational_f64(&alpha_exact_product(10_000, &overrides).unwrap());
        assert!(
            (moebius - product).abs() < 1e-4,
            "moebius {moebius} vs product {product}"
        );
    }

    #[test]
    fn exceptional_detection_on_synthetic_data() {
        // deterministic rule matching delta_exact(5) = 26/576: mark 5 | g(p)
        // for the first floor(delta * pi(y)) primes
        let primes = sieve::primes(2000).unwrap();
        let count = primes.len();
        let model = rational_f64(&delta_exact(5));
        let quota = (model * count as f64).floor() as usize;
        let vals1: Vec<(u64, i64)> = primes
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, if i < quota { 5 } else { 1 }))
            .collect();
        let t1 = table("s1", 1, 12, 2000, &vals1);
        let t2 = table("s2", 1, 12, 2000, &vals1);
        let ds = FormPairDataset::new(&t1, &t2).unwrap();
        let report = detect_exceptional(&ds, 5, 2000).unwrap();
        assert!(!report.flagged, "deviation {}", report.deviation);
        // a parity-locked dataset flags l = 2
        let even: Vec<(u64, i64)> = primes.iter().map(|&p| (p, 2)).collect();
        let t3 = table("s3", 1, 12, 2000, &even);
        let ds2 = FormPairDataset::new(&t3, &t3).unwrap();
        let r2 = detect_exceptional(&ds2, 2, 2000).unwrap();
        assert!(r2.flagged);
        assert!(delta_empirical(&ds2, 1000, 2).unwrap().value() > 0.9);
    }

    #[test]
    fn zero_count_and_sieve_upper() {
        let t1 = table("z1", 1, 12, 10, &[(2, 6), (3, 0), (5, 10), (7, 1)]);
        let t2 = table("z2", 1, 12, 10, &[(2, 4), (3, 0), (5, 15), (7, 3)]);
        assert_eq!(zero_coeff_count(&t1, 10).unwrap(), 1);
        assert_eq!(zero_coeff_count(&t1, 2).unwrap(), 0);
        let ds = FormPairDataset::new(&t1, &t2).unwrap();
        // g = [2, 0, 5, 1]
        assert_eq!(sieve_upper_count(&ds, 10, 2).unwrap(), 4); // P = 1
        assert_eq!(sieve_upper_count(&ds, 10, 3).unwrap(), 2); // drop g=2, g=0
        assert_eq!(sieve_upper_count(&ds, 10, 7).unwrap(), 1); // drop g=5 too
        let c = coprime_prime_count(&ds, 10).unwrap().0;
        for y in [2u64, 3, 5, 10] {
            let suc = sieve_upper_count(&ds, 10, y).unwrap();
            assert!(c <= suc && suc <= ds.prime_count(10) as u64);
        }
    }

    #[test]
    fn rough_count_examples() {
        assert_eq!(rough_count(10, 2).unwrap(), 5); // {1,3,5,7,9}
        assert_eq!(rough_count(10, 1).unwrap(), 10);
        assert_eq!(rough_count(1, 5).unwrap(), 1);
        // brute-force oracle at small scale
        let f = sieve::Factorizer::new(200).unwrap();
        for y in [2u64, 3, 5, 7] {
            let brute = (1..=200u64)
                .filter(|&n| f.factorize(n).iter().all(|&(p, _)| p > y))
                .count() as u64;
            assert_eq!(rough_count(200, y).unwrap(), brute, "y={y}");
        }
    }

    #[test]
    fn erdos_phi_examples() {
        assert_eq!(erdos_phi_count(2).unwrap().count, 2);
        assert_eq!(erdos_phi_count(30).unwrap().count, 12);
        // independent trial-division recount
        let f = sieve::Factorizer::new(2000).unwrap();
        let brute = |x: u64| -> u64 {
            (1..=x)
                .filter(|&n| {
                    let phi: u64 = f
                        .factorize(n)
                        .iter()
                        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
                        .product();
                    gcd_u64(n, phi) == 1
                })
                .count() as u64
        };
        assert_eq!(erdos_phi_count(2000).unwrap().count, brute(2000));
    }
}
