//! Small integer-arithmetic helpers shared across modules: modular
//! exponentiation, Legendre symbol, deterministic Miller-Rabin and
//! Pollard rho factorization, and exact rational-to-decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// gcd(|a|, |b|) with gcd(0, x) = |x| and gcd(0, 0) = 0.
pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Legendre symbol (a/l) for an odd prime l, via Euler's criterion.
pub fn legendre(a: u64, ell: u64) -> i32 {
    debug_assert!(ell > 2 && ell % 2 == 1);
    let r = pow_mod(a % ell, (ell - 1) / 2, ell);
    if r == 0 {
        0
    } else if r == 1 {
        1
    } else {
        -1
    }
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    // Requires m < 2^127 so that doubling never overflows.
    debug_assert!(m < 1u128 << 127);
    let (mut a, mut b) = (a % m, b % m);
    if let Some(prod) = a.checked_mul(b) {
        return prod % m;
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    acc
}

fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for n < 2^127.
pub fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // The first 13 primes are a deterministic witness set below 3.3e24;
    // beyond that the set is a fixed high-confidence battery.
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = pow_mod_u128(a % n, d, n);
        if x == 0 || x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    debug_assert!(n % 2 == 1 && n > 3);
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = if x > y { x - y } else { y - x };
            if diff == 0 {
                break;
            }
            d = gcd_u128(diff, n);
        }
        if d != 1 && d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Full factorization of n, as sorted (prime, exponent) pairs.
pub fn factor_u128(mut n: u128) -> Vec<(u128, u32)> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    let mut push = |p: u128, out: &mut Vec<(u128, u32)>| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if is_prime_u128(m) {
            push(m, &mut out);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

/// Number of distinct prime divisors of |n|, with omega(0) = omega(1) = 0.
pub fn omega_u128(n: u128) -> u32 {
    if n <= 1 {
        return 0;
    }
    factor_u128(n).len() as u32
}

/// Distinct prime factors of |n|, sorted. Trial division by the supplied
/// primes first; whatever cofactor survives goes through the u128
/// machinery when it fits, or BigInt Miller-Rabin plus Pollard rho when
/// it does not.
pub fn distinct_prime_factors_big(n: &BigInt, small_primes: &[u64]) -> Vec<BigInt> {
    let mut n = n.abs();
    let one = BigInt::from(1);
    if n <= one {
        return Vec::new();
    }
    let mut out: Vec<BigInt> = Vec::new();
    for &p in small_primes {
        if n == one {
            break;
        }
        if (&n % p).is_zero() {
            out.push(BigInt::from(p));
            while (&n % p).is_zero() {
                n /= p;
            }
        }
        if BigInt::from(p) * p > n {
            break;
        }
    }
    if n > one {
        if let Some(rest) = n.to_u128() {
            out.extend(factor_u128(rest).into_iter().map(|(p, _)| BigInt::from(p)));
        } else {
            split_big(&n, &mut out);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Recursive prime splitting over BigInt for cofactors beyond u128.
fn split_big(n: &BigInt, out: &mut Vec<BigInt>) {
    if n <= &BigInt::from(1) {
        return;
    }
    if let Some(v) = n.to_u128() {
        out.extend(factor_u128(v).into_iter().map(|(p, _)| BigInt::from(p)));
        return;
    }
    if is_probable_prime_big(n) {
        out.push(n.clone());
        return;
    }
    let d = pollard_rho_big(n);
    let mut q = n / &d;
    // strip every copy of the factors found on the first branch
    split_big(&d, out);
    for p in out.clone() {
        while (&q % &p).is_zero() {
            q /= &p;
        }
    }
    split_big(&q, out);
}

/// omega over a big integer: number of distinct prime factors of |n|,
/// with omega(0) = omega(1) = 0.
pub fn omega_big(n: &BigInt, small_primes: &[u64]) -> u32 {
    distinct_prime_factors_big(n, small_primes).len() as u32
}

fn is_probable_prime_big(n: &BigInt) -> bool {
    use num_bigint::BigUint;
    let n = n.to_biguint().expect("positive");
    let one = BigUint::from(1u32);
    let two = BigUint::from(2u32);
    if n < two {
        return false;
    }
    if n == two {
        return true;
    }
    if (&n % &two).is_zero() {
        return false;
    }
    let n_minus_1 = &n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if a >= n {
            continue;
        }
        let mut x = a.modpow(&d, &n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, &n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_big(n: &BigInt) -> BigInt {
    let mut c = BigInt::from(1);
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        let mut d = BigInt::from(1);
        while d == BigInt::from(1) {
            x = f(&x);
            y = f(&f(&y));
            let diff = (&x - &y).abs();
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if d != BigInt::from(1) && &d != n {
            return d;
        }
        c += 1;
    }
}

/// Accurate f64 value of num/den for big operands (den > 0).
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    debug_assert!(den.is_positive());
    if num.is_zero() {
        return 0.0;
    }
    let neg = num.is_negative();
    let num = num.abs();
    // Scale so the integer quotient carries ~80 significant bits.
    let shift = (den.bits() as i64 + 80 - num.bits() as i64).max(0) as u64;
    let q = (num << shift) / den;
    let v = to_f64_with_exponent(&q) / 2f64.powi(shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

fn to_f64_with_exponent(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        return n.to_f64().unwrap_or(0.0);
    }
    let excess = bits - 52;
    let top = n >> excess;
    top.to_f64().unwrap_or(0.0) * 2f64.powi(excess as i32)
}

/// Render num/den rounded to `places` decimal digits, half away from zero.
pub fn render_rational(num: &BigInt, den: &BigInt, places: usize) -> String {
    debug_assert!(den.is_positive());
    let neg = num.is_negative();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = num.abs() * &scale;
    let (q, r) = scaled.div_rem(den);
    let q = if &r * 2 >= *den { q + 1 } else { q };
    let digits = q.to_string();
    let (int_part, frac_part) = if digits.len() > places {
        let split = digits.len() - places;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{:0>width$}", digits, width = places))
    };
    let sign = if neg && (int_part != "0" || frac_part.bytes().any(|b| b != b'0')) {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_matches_square_table() {
        for ell in [3u64, 5, 7, 11, 13] {
            let squares: std::collections::BTreeSet<u64> =
                (1..ell).map(|v| v * v % ell).collect();
            for a in 1..ell {
                let expect = if squares.contains(&a) { 1 } else { -1 };
                assert_eq!(legendre(a, ell), expect, "a={a} ell={ell}");
            }
        }
    }

    #[test]
    fn miller_rabin_small_range() {
        let mut sieve = vec![true; 10_000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..10_000usize {
            if sieve[i] {
                for j in (i * i..10_000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for n in 0..10_000u128 {
            assert_eq!(is_prime_u128(n), sieve[n as usize], "n={n}");
        }
    }

    #[test]
    fn factor_u128_examples() {
        assert_eq!(factor_u128(1), vec![]);
        assert_eq!(factor_u128(2 * 2 * 3 * 97), vec![(2, 2), (3, 1), (97, 1)]);
        // semiprime with two ~10-digit factors exercises rho
        let p = 1_000_000_007u128;
        let q = 1_000_000_009u128;
        assert_eq!(factor_u128(p * q), vec![(p, 1), (q, 1)]);
        assert_eq!(omega_u128(p * q), 2);
        assert_eq!(omega_u128(8), 1);
        assert_eq!(omega_u128(0), 0);
    }

    #[test]
    fn omega_big_beyond_u128() {
        // 2^130 * 3: trial division strips 2 and 3 entirely
        let n = (BigInt::from(1) << 130) * 3;
        assert_eq!(omega_big(&n, &[2, 3, 5, 7]), 2);
        // product of two primes just above u64, exceeding u128 together
        let p = BigInt::from(18_446_744_073_709_551_629u128); // prime > 2^64
        let q = BigInt::from(18_446_744_073_709_551_653u128);
        let n2 = &p * &q * &p;
        assert_eq!(omega_big(&n2, &[2, 3, 5, 7, 11, 13]), 2);
    }

    #[test]
    fn ratio_to_f64_accuracy() {
        let num = BigInt::from(1);
        let den = BigInt::from(3);
        assert!((ratio_to_f64(&num, &den) - 1.0 / 3.0).abs() < 1e-15);
        let big = BigInt::from(10u32).pow(500) + 1;
        let bigd = BigInt::from(10u32).pow(500) * 3;
        assert!((ratio_to_f64(&big, &bigd) - 1.0 / 3.0).abs() < 1e-15);
        let neg = BigInt::from(-40763);
        assert!((ratio_to_f64(&neg, &BigInt::from(100000)) + 0.40763).abs() < 1e-12);
    }

    #[test]
    fn render_rational_rounding() {
        let r = |n: i64, d: i64, p: usize| render_rational(&BigInt::from(n), &BigInt::from(d), p);
        assert_eq!(r(1, 3, 5), "0.33333");
        assert_eq!(r(2, 3, 5), "0.66667");
        assert_eq!(r(1, 2, 0), "1"); // half away from zero
        assert_eq!(r(-1, 8, 2), "-0.13");
        assert_eq!(r(0, 7, 5), "0.00000");
        assert_eq!(r(40763, 100000, 5), "0.40763");
        assert_eq!(r(123456, 1000, 2), "123.46");
        assert_eq!(r(-1, 1000000, 5), "0.00000"); // rounds to zero, sign dropped
    }
}
