//! Primality, prime powers, Jacobi symbols and the primes of the form
//! `(r^k − 1)/(r − 1)` with `r` a prime power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Deterministic Miller–Rabin, exact on the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest `r` with `r^k ≤ n`.
fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 {
        return n;
    }
    let mut lo = 1u64;
    let mut hi = 1u64 << (64 / k + 1).min(63);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match (mid as u128).checked_pow(k) {
            Some(v) if v <= n as u128 => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// Returns `(s, a)` with `n = s^a` and `s` prime, or `None` if `n` is not a prime power.
pub fn prime_power_decompose(n: u64) -> Result<Option<(u64, u32)>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("{n} < 2")));
    }
    if is_prime(n) {
        return Ok(Some((n, 1)));
    }
    for a in 2..64u32 {
        let r = integer_root(n, a);
        if r < 2 {
            break;
        }
        if (r as u128).pow(a) == n as u128 && is_prime(r) {
            return Ok(Some((r, a)));
        }
    }
    Ok(None)
}

pub fn is_prime_power(n: u64) -> bool {
    matches!(prime_power_decompose(n), Ok(Some(_)))
}

/// Jacobi symbol `(ell / n)` for odd `n ≥ 3`.
pub fn jacobi(ell: i64, n: u64) -> Result<i8> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "Jacobi symbol needs an odd modulus ≥ 3, got {n}"
        )));
    }
    let mut a = ell.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Distinct prime factors by trial division, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// One way of writing `p = 1 + r + … + r^(k−1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclotomicPair {
    pub r: u64,
    pub k: u32,
}

/// All `(r, k)` with `p = (r^k − 1)/(r − 1)`, `r` a prime power, `k ≥ 2`; sorted by `r`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CyclotomicDecomposition(pub Vec<CyclotomicPair>);

impl CyclotomicDecomposition {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[CyclotomicPair] {
        &self.0
    }

    /// `[[r, k], …]`.
    pub fn as_tuples(&self) -> Vec<[u64; 2]> {
        self.0.iter().map(|c| [c.r, c.k as u64]).collect()
    }
}

/// `1 + r + … + r^(k−1)`, saturating at `u128::MAX`.
fn repunit(r: u64, k: u32) -> u128 {
    let mut acc: u128 = 0;
    let mut term: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_add(term);
        term = term.saturating_mul(r as u128);
    }
    acc
}

pub fn cyclotomic_decompositions(p: u64) -> Result<CyclotomicDecomposition> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let target = p as u128;
    let mut out = Vec::new();
    // r ≥ 2 forces p ≥ 2^k − 1.
    let max_k = 63 - (p + 1).leading_zeros();
    for k in 2..=max_k {
        let (mut lo, mut hi) = (2u64, p);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if repunit(mid, k) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if repunit(lo, k) == target && is_prime_power(lo) {
            out.push(CyclotomicPair { r: lo, k });
        }
    }
    out.sort();
    Ok(CyclotomicDecomposition(out))
}

pub fn cyclotomic_primes_below(limit: u64) -> Vec<u64> {
    (2..limit)
        .filter(|&n| is_prime(n))
        .filter(|&p| !cyclotomic_decompositions(p).unwrap().is_empty())
        .collect()
}
