//! Exact integer convolution via multi-prime number-theoretic transforms.
//!
//! Coefficients are reduced modulo a set of 61-64 bit NTT-friendly primes,
//! convolved in each residue field, and reconstructed with Garner's
//! algorithm. Signed values use the balanced representative: a residue
//! above M/2 (M the modulus product) decodes as negative. The number of
//! primes is chosen from the actual input bit sizes, so the result is
//! exact whenever `convolve` returns `Some`.

use num_bigint::{BigInt, Sign};
use num_traits::Zero;

use crate::arith::{mul_mod, pow_mod};

/// (prime, primitive root, 2-adic valuation of p-1). All primes sit below
/// 2^62 so butterfly additions stay within u64. Verified by the
/// `prime_constants_are_valid` test below.
const NTT_PRIMES: [(u64, u64, u32); 4] = [
    (4_179_340_454_199_820_289, 3, 57), // 29 * 2^57 + 1
    (1_945_555_039_024_054_273, 5, 56), // 27 * 2^56 + 1
    (2_485_986_994_308_513_793, 5, 55), // 69 * 2^55 + 1
    (2_053_641_430_080_946_177, 7, 55), // 57 * 2^55 + 1
];

/// Exact signed convolution truncated to `out_len` terms, or `None` when
/// the coefficients are too large for the available prime capacity.
pub fn convolve(a: &[BigInt], b: &[BigInt], out_len: usize) -> Option<Vec<BigInt>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Some(vec![BigInt::zero(); out_len]);
    }
    let max_bits = |v: &[BigInt]| v.iter().map(|c| c.bits()).max().unwrap_or(0);
    let terms = a.len().min(b.len()) as u64;
    // |c_n| <= min(la,lb) * max|a| * max|b|; one extra bit for the sign.
    let needed_bits = max_bits(a) + max_bits(b) + 64 - u64::from(terms.leading_zeros()) + 2;

    let mut chosen = 0usize;
    let mut capacity = 0u64;
    while capacity < needed_bits {
        if chosen == NTT_PRIMES.len() {
            return None;
        }
        capacity += 63 - u64::from(NTT_PRIMES[chosen].0.leading_zeros());
        chosen += 1;
    }
    let primes = &NTT_PRIMES[..chosen];

    let conv_len = a.len() + b.len() - 1;
    let len = conv_len.next_power_of_two();
    let log_len = len.trailing_zeros();
    if primes.iter().any(|&(_, _, v)| v < log_len) {
        return None;
    }

    let mut residue_results: Vec<Vec<u64>> = Vec::with_capacity(chosen);
    for &(p, g, _) in primes {
        let mut fa = reduce_slice(a, p, len);
        let mut fb = reduce_slice(b, p, len);
        ntt(&mut fa, p, g, false);
        ntt(&mut fb, p, g, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = mul_mod(*x, *y, p);
        }
        ntt(&mut fa, p, g, true);
        fa.truncate(out_len.min(conv_len));
        residue_results.push(fa);
    }

    let moduli: Vec<u64> = primes.iter().map(|&(p, _, _)| p).collect();
    let modulus_product = moduli.iter().fold(BigInt::from(1u8), |acc, &p| acc * p);
    let half = &modulus_product >> 1;

    let kept = out_len.min(conv_len);
    let mut out = Vec::with_capacity(out_len);
    for n in 0..kept {
        let residues: Vec<u64> = residue_results.iter().map(|r| r[n]).collect();
        let mut value = garner(&residues, &moduli);
        if value > half {
            value -= &modulus_product;
        }
        out.push(value);
    }
    out.resize(out_len, BigInt::zero());
    Some(out)
}

/// Mixed-radix CRT reconstruction; result in [0, prod(moduli)).
fn garner(residues: &[u64], moduli: &[u64]) -> BigInt {
    // digits d_i with x = d_0 + d_1 p_0 + d_2 p_0 p_1 + ...
    let k = moduli.len();
    let mut digits = vec![0u64; k];
    digits[0] = residues[0];
    for i in 1..k {
        let p = moduli[i];
        // evaluate the partial mixed-radix number mod p
        let mut acc = digits[i - 1] % p;
        for j in (0..i - 1).rev() {
            acc = (mul_mod(acc, moduli[j], p) + digits[j] % p) % p;
        }
        let diff = (residues[i] + p - acc % p) % p;
        // inverse of p_0*...*p_{i-1} mod p
        let mut prod = moduli[0] % p;
        for &m in &moduli[1..i] {
            prod = mul_mod(prod, m, p);
        }
        let inv = pow_mod(prod, p - 2, p);
        digits[i] = mul_mod(diff, inv, p);
    }
    let mut x = BigInt::zero();
    for i in (0..k).rev() {
        x = x * moduli[i] + digits[i];
    }
    x
}

fn reduce_slice(v: &[BigInt], p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for (dst, c) in out.iter_mut().zip(v) {
        *dst = reduce_bigint(c, p);
    }
    out
}

/// c mod p in [0, p), streaming over the magnitude limbs.
fn reduce_bigint(c: &BigInt, p: u64) -> u64 {
    let mut r: u64 = 0;
    let base = ((1u128 << 64) % p as u128) as u64;
    for limb in c.iter_u64_digits().rev() {
        r = mul_mod(r, base, p);
        r = ((r as u128 + (limb % p) as u128) % p as u128) as u64;
    }
    if c.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// In-place iterative radix-2 transform over F_p; `inverse` applies the
/// conjugate transform and the 1/len scaling.
fn ntt(values: &mut [u64], p: u64, g: u64, inverse: bool) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let log_n = n.trailing_zeros();

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }

    for s in 1..=log_n {
        let m = 1usize << s;
        let mut w_m = pow_mod(g, (p - 1) >> s, p);
        if inverse {
            w_m = pow_mod(w_m, p - 2, p);
        }
        let mut start = 0;
        while start < n {
            let mut w = 1u64;
            for i in 0..m / 2 {
                let lo = values[start + i];
                let hi = mul_mod(values[start + i + m / 2], w, p);
                values[start + i] = if lo + hi >= p { lo + hi - p } else { lo + hi };
                values[start + i + m / 2] = if lo >= hi { lo - hi } else { lo + p - hi };
                w = mul_mod(w, w_m, p);
            }
            start += m;
        }
    }

    if inverse {
        let n_inv = pow_mod(n as u64 % p, p - 2, p);
        for v in values.iter_mut() {
            *v = mul_mod(*v, n_inv, p);
        }
    }
}
