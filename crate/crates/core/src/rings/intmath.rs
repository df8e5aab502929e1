//! Small integer number theory used by the ring tower.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Extended gcd: returns (g, x, y) with a·x + b·y = g and g >= 0.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `n`, when it exists.
pub fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let (g, x, _) = xgcd(&a.mod_floor(n), n);
    if g.is_one() {
        Some(x.mod_floor(n))
    } else {
        None
    }
}

/// Distinct prime factors by trial division. Intended for the small
/// moduli and localization elements that appear in practice.
pub fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = BigInt::from(2u32);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1u32;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Whether `n` is a prime power p^k with k >= 1.
pub fn is_prime_power(n: u64) -> bool {
    let ps = prime_factors(&BigInt::from(n));
    ps.len() == 1
}

/// Remove from `n` every prime factor shared with `s`.
pub fn strip_common(n: &BigInt, s: &BigInt) -> BigInt {
    let mut n = n.abs();
    if s.is_zero() {
        return BigInt::one();
    }
    loop {
        let g = n.gcd(s);
        if g.is_one() {
            return n;
        }
        while (&n % &g).is_zero() {
            n /= &g;
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(a: &BigInt, p: &BigInt) -> u32 {
    let mut a = a.abs();
    let mut v = 0;
    if a.is_zero() {
        return u32::MAX;
    }
    while (&a % p).is_zero() {
        a /= p;
        v += 1;
    }
    v
}
