//! Prime, totient and smallest-prime-factor sieves shared by the
//! coefficient and statistics modules.

use crate::error::{Error, Result};

/// Largest bound accepted by the in-memory sieves (~2 GB of u32 at the cap).
pub const SIEVE_MEMORY_CAP: u64 = 1 << 29;

fn check_cap(x: u64) -> Result<()> {
    if x > SIEVE_MEMORY_CAP {
        return Err(Error::usage(format!(
            "sieve bound {x} exceeds memory cap {SIEVE_MEMORY_CAP}"
        )));
    }
    Ok(())
}

/// All primes <= x in increasing order.
pub fn primes(x: u64) -> Result<Vec<u64>> {
    if x < 2 {
        return Err(Error::usage("prime sieve requires x >= 2"));
    }
    check_cap(x)?;
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    Ok(out)
}

/// Number of primes <= x, given a sorted prime list covering x.
pub fn prime_count(primes: &[u64], x: u64) -> usize {
    primes.partition_point(|&p| p <= x)
}

/// Euler phi for 0..=x (phi[0] = 0).
pub fn totient_sieve(x: u64) -> Result<Vec<u64>> {
    check_cap(x)?;
    let n = x as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            // i is prime
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    if n >= 1 {
        phi[1] = 1;
    }
    Ok(phi)
}

/// Smallest prime factor for 0..=x (spf[0] = spf[1] = 0).
pub fn spf_sieve(x: u64) -> Result<Vec<u32>> {
    check_cap(x)?;
    let n = x as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    Ok(spf)
}

/// Factorization helper backed by a smallest-prime-factor table, with
/// trial division fallback beyond the table bound.
pub struct Factorizer {
    spf: Vec<u32>,
}

impl Factorizer {
    pub fn new(bound: u64) -> Result<Factorizer> {
        Ok(Factorizer {
            spf: spf_sieve(bound.max(2))?,
        })
    }

    pub fn bound(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Sorted (prime, exponent) pairs of n; n = 0 yields an empty list.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 && (n as usize) < self.spf.len() {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        if n > 1 {
            // beyond the table: trial division
            let mut d = 2u64;
            while d * d <= n {
                if n % d == 0 {
                    let mut e = 0;
                    while n % d == 0 {
                        n /= d;
                        e += 1;
                    }
                    out.push((d, e));
                }
                d += 1;
            }
            if n > 1 {
                out.push((n, 1));
            }
            out.sort_unstable();
        }
        out
    }

    /// Moebius function via the factorization.
    pub fn mobius(&self, n: u64) -> i32 {
        if n == 1 {
            return 1;
        }
        let f = self.factorize(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}
