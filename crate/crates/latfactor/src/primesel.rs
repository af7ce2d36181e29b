//! Prime-product modulus selection.
//!
//! The searches sieve candidate residues modulo a squarefree product m of
//! small primes, so only phi(m) residue classes survive; phi(m)/m shrinks
//! like 1/loglog by Mertens. The construction walks primorials until one
//! exceeds the target x, then divides out one prime to land in (x/2, 2x).

use crate::arith::primes_up_to;
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::One;

/// A squarefree modulus m = prod_{p in S} p with its exact totient data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeProduct {
    pub m: BigUint,
    pub s: Vec<u64>,
    pub phi_m: BigUint,
    pub ratio: Ratio<BigUint>,
}

/// Builds m with x/2 < m < 2x: accumulate the primorial P_k, stopping at the
/// first P_k >= x, set t = floor(P_k / x), and divide out the smallest prime
/// above t. When t = 1 no prime lies in (1, 2), and P_k itself already sits
/// in [x, 2x), so m = P_k undivided.
pub fn prime_product(x: &BigUint) -> PrimeProduct {
    assert!(*x >= BigUint::from(3u32));
    // Primes up to p_k; p_k = O(log x), so a generous sieve bound suffices.
    let sieve = primes_up_to(64.max(2 * x.bits()));
    let mut primorial = BigUint::one();
    let mut support: Vec<u64> = Vec::new();
    for &p in &sieve {
        primorial *= BigUint::from(p);
        support.push(p);
        if primorial >= *x {
            break;
        }
    }
    assert!(primorial >= *x, "sieve bound too small for x = {}", x);

    let t = &primorial / x;
    let (m, s) = if t.is_one() {
        (primorial, support)
    } else {
        let t: u64 = (&t).try_into().expect("t < p_k fits u64");
        let p_s = smallest_prime_above(t, &sieve);
        debug_assert!(support.contains(&p_s));
        let m = primorial / BigUint::from(p_s);
        let s = support.into_iter().filter(|&p| p != p_s).collect();
        (m, s)
    };
    let phi_m: BigUint = s.iter().map(|&p| BigUint::from(p - 1)).product();
    let ratio = Ratio::new(phi_m.clone(), m.clone());
    PrimeProduct { m, s, phi_m, ratio }
}

fn smallest_prime_above(t: u64, sieve: &[u64]) -> u64 {
    *sieve.iter().find(|&&p| p > t).expect("Bertrand interval contains a prime")
}

/// Smallest m >= m0 with gcd(m, n) = 1. Terminates within O(log^2 n) steps
/// by Iwaniec's bound on the Jacobsthal function.
pub fn coprime_shift(m0: &BigUint, n: &BigUint) -> BigUint {
    let mut m = m0.clone();
    while !m.gcd(n).is_one() {
        m += 1u32;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn prime_product_hand_executed_examples() {
        // x = 100: primorial 210, t = 2, p_s = 3, m = 70, S = {2, 5, 7}
        let pp = prime_product(&b(100));
        assert_eq!(pp.m, b(70));
        assert_eq!(pp.s, vec![2, 5, 7]);
        assert_eq!(pp.phi_m, b(24));
        // x = 10: primorial 30, t = 3, p_s = 5, m = 6, S = {2, 3}
        let pp = prime_product(&b(10));
        assert_eq!(pp.m, b(6));
        assert_eq!(pp.s, vec![2, 3]);
        // x = 117: primorial 210, t = 1, no prime in (1, 2): m stays 210
        let pp = prime_product(&b(117));
        assert_eq!(pp.m, b(210));
        assert_eq!(pp.s, vec![2, 3, 5, 7]);
    }

    #[test]
    fn prime_product_range_and_totient() {
        let mut state = 0xfeedu64;
        for _ in 0..300 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = 1_000 + (state >> 34) % 999_999_000;
            let pp = prime_product(&b(x));
            assert!(b(x) < &pp.m * 2u32, "m too small at x = {}", x);
            assert!(pp.m < b(2 * x), "m too large at x = {}", x);
            // squarefree with exactly the listed support
            let prod: BigUint = pp.s.iter().map(|&p| b(p)).product();
            assert_eq!(prod, pp.m);
            // phi(m)/m = prod (1 - 1/p) exactly
            let mut expect = Ratio::new(BigUint::one(), BigUint::one());
            for &p in &pp.s {
                expect *= Ratio::new(b(p - 1), b(p));
            }
            assert_eq!(pp.ratio, expect);
        }
    }

    #[test]
    fn coprime_shift_examples() {
        assert_eq!(coprime_shift(&b(12), &b(6)), b(13));
        assert_eq!(coprime_shift(&b(14), &b(7)), b(15));
        assert_eq!(coprime_shift(&b(9), &b(4)), b(9));
    }

    #[test]
    fn coprime_shift_matches_linear_scan() {
        let mut state = 5150u64;
        for _ in 0..200 {
            state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            let m0 = 1 + (state >> 40) % 10_000;
            let n = 1 + (state >> 20) % 100_000;
            let got = coprime_shift(&b(m0), &b(n));
            let mut expect = m0;
            while num_integer::gcd(expect, n) != 1 {
                expect += 1;
            }
            assert_eq!(got, b(expect));
            assert!(got.gcd(&b(n)).is_one());
            assert!(!got.is_zero());
        }
    }
}
