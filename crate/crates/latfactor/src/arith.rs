//! Exact integer and modular arithmetic primitives.
//!
//! Everything here is deterministic and allocation-exact: no floating point,
//! no probabilistic shortcuts. Parameter formulas elsewhere in the crate use
//! the bit-length surrogates [`log2`] and [`loglog2`] so that all derived
//! quantities stay integral.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// Arbitrary-precision nonnegative integer, canonically represented.
pub type Nat = BigUint;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// gcd(x, N) > 1 while inverting x mod N. Carries the gcd: for most
    /// callers in this crate this is a success signal (a factor candidate).
    NotInvertible(BigUint),
    /// Input exceeds the range where the operation is deterministic.
    UnsupportedSize,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::NotInvertible(g) => write!(f, "not invertible, gcd = {}", g),
            ArithError::UnsupportedSize => write!(f, "input exceeds deterministic range"),
        }
    }
}

/// Bit length of n; the crate-wide surrogate for log2(n). log2(0) = 0.
pub fn log2(n: &BigUint) -> u64 {
    n.bits()
}

/// Bit length of the bit length; surrogate for log2(log2(n)).
pub fn loglog2(n: &BigUint) -> u64 {
    64 - n.bits().leading_zeros() as u64
}

/// base^exp mod n by repeated squaring. exp = 0 yields 1 mod n.
pub fn mod_pow(base: &BigUint, exp: &BigUint, n: &BigUint) -> BigUint {
    debug_assert!(*n >= BigUint::from(2u32));
    base.modpow(exp, n)
}

/// Extended Euclid: returns (g, u, v) with u*x + v*y = g = gcd(x, y).
pub fn ext_gcd(x: &BigUint, y: &BigUint) -> (BigUint, BigInt, BigInt) {
    let e = BigInt::from(x.clone()).extended_gcd(&BigInt::from(y.clone()));
    (e.gcd.to_biguint().expect("gcd of naturals"), e.x, e.y)
}

/// x^-1 mod n. NotInvertible(g) carries g = gcd(x, n) > 1.
pub fn mod_inv(x: &BigUint, n: &BigUint) -> Result<BigUint, ArithError> {
    let (g, u, _) = ext_gcd(x, n);
    if !g.is_one() {
        return Err(ArithError::NotInvertible(g));
    }
    let ni = BigInt::from(n.clone());
    let r = u.mod_floor(&ni);
    Ok(r.to_biguint().expect("reduced residue is nonnegative"))
}

/// floor((x/y)^(u/v)) computed exactly: the unique r with
/// r^v * y^u <= x^u < (r+1)^v * y^u.
pub fn int_root_floor(x: &BigUint, y: &BigUint, u: u32, v: u32) -> BigUint {
    assert!(!y.is_zero() && v >= 1);
    let xu = x.pow(u);
    let yu = y.pow(u);
    let q = &xu / &yu;
    let r = q.nth_root(v);
    debug_assert!(r.pow(v) * &yu <= xu);
    r
}

/// ceil((x/y)^(u/v)): int_root_floor plus one unless the value is exact.
pub fn int_root_ceil(x: &BigUint, y: &BigUint, u: u32, v: u32) -> BigUint {
    let r = int_root_floor(x, y, u, v);
    if r.pow(v) * y.pow(u) == x.pow(u) {
        r
    } else {
        r + 1u32
    }
}

/// Largest r with r^v <= n.
pub fn nth_root_floor(n: &BigUint, v: u32) -> BigUint {
    n.nth_root(v)
}

/// If n = b^e for some e >= 2, returns (b, e) with e maximal; None otherwise.
pub fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    if *n < BigUint::from(4u32) {
        return None;
    }
    let bits = n.bits() as u32;
    for e in (2..=bits).rev() {
        let b = n.nth_root(e);
        if b.pow(e) == *n {
            return Some((b, e));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// u64 fast paths
// ---------------------------------------------------------------------------

pub(crate) fn mulmod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub(crate) fn powmod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, n);
        }
        base = mulmod_u64(base, base, n);
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Deterministic Miller-Rabin witnesses; sound for every n < 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn miller_rabin_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in MR_WITNESSES.iter() {
        let mut x = powmod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test. Sound for n < 2^64 via the fixed
/// Miller-Rabin witness set; refuses larger inputs rather than degrading
/// to a probabilistic answer.
pub fn det_prime_test(n: &BigUint) -> Result<bool, ArithError> {
    match n.to_u64() {
        Some(v) => Ok(miller_rabin_u64(v)),
        None => Err(ArithError::UnsupportedSize),
    }
}

/// Sieve of Eratosthenes, all primes <= n.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

// ---------------------------------------------------------------------------
// Small-factor removal
// ---------------------------------------------------------------------------

/// Threshold below which plain trial division beats the product-tree stage.
const TRIAL_BOUND: u64 = 1 << 16;

/// Removes every prime <= bound from n with full multiplicity.
/// Returns the factor list (ascending) and the cofactor, which has no prime
/// factor <= bound. Trial division handles primes up to 2^16; beyond that a
/// Pollard-Strassen product-tree stage scans blocks of consecutive integers.
pub fn small_factor_sweep(n: &BigUint, bound: u64) -> (Vec<(BigUint, u32)>, BigUint) {
    assert!(bound >= 2);
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut m = n.clone();
    if m.is_zero() || m.is_one() {
        return (factors, m);
    }
    for p in primes_up_to(bound.min(TRIAL_BOUND)) {
        let pb = BigUint::from(p);
        let mut e = 0u32;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
        if m.is_one() {
            return (factors, m);
        }
    }
    if bound > TRIAL_BOUND {
        loop {
            match strassen_stage(&m, TRIAL_BOUND + 1, bound) {
                Some(p) => {
                    let pb = BigUint::from(p);
                    let mut e = 0u32;
                    while (&m % &pb).is_zero() {
                        m /= &pb;
                        e += 1;
                    }
                    factors.push((pb, e));
                    if m.is_one() {
                        break;
                    }
                }
                None => break,
            }
        }
        factors.sort();
    }
    (factors, m)
}

/// Smallest prime factor of n in [lo, hi], if any, found deterministically:
/// per block, a product tree of consecutive integers mod n is gcd-tested at
/// the root and descended on a hit, so the leftmost hit is the smallest.
fn strassen_stage(n: &BigUint, lo: u64, hi: u64) -> Option<u64> {
    const BLOCK: u64 = 1 << 12;
    if *n <= BigUint::one() {
        return None;
    }
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + BLOCK - 1);
        let leaves: Vec<BigUint> = (start..=end).map(|t| BigUint::from(t) % n).collect();
        if let Some(idx) = product_tree_gcd_hit(n, &leaves) {
            let t = start + idx as u64;
            // t is the smallest integer in the range sharing a factor with n;
            // with no factors below lo remaining, t itself is prime.
            return Some(t);
        }
        start = end + 1;
    }
    None
}

/// Index of the leftmost leaf whose value shares a factor with n, detected
/// by a bottom-up product tree and a top-down gcd descent.
fn product_tree_gcd_hit(n: &BigUint, leaves: &[BigUint]) -> Option<usize> {
    if leaves.is_empty() {
        return None;
    }
    let mut levels: Vec<Vec<BigUint>> = vec![leaves.to_vec()];
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let mut next = Vec::with_capacity(prev.len().div_ceil(2));
        for pair in prev.chunks(2) {
            next.push(if pair.len() == 2 {
                (&pair[0] * &pair[1]) % n
            } else {
                pair[0].clone()
            });
        }
        levels.push(next);
    }
    if levels.last().unwrap()[0].gcd(n).is_one() {
        return None;
    }
    // Descend: prefer the left child so the smallest index wins.
    let mut idx = 0usize;
    for level in (0..levels.len() - 1).rev() {
        let left = 2 * idx;
        idx = if left < levels[level].len() && !levels[level][left].gcd(n).is_one() {
            left
        } else {
            left + 1
        };
    }
    Some(idx)
}

/// Full factorization by trial division; intended for small n (fits u64).
pub fn trial_factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
