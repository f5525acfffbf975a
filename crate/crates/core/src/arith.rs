//! Integer helpers shared by the lattice and zeta modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Shorthand for building a `BigInt` from a machine integer.
pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().copied().map(BigInt::from).collect()
}

const WITNESSES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with the first twelve prime bases; deterministic below 3.3e24.
pub fn is_prime(n: &BigInt) -> bool {
    if *n < int(2) {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigInt::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n1 = n - &one;
    let mut d = n1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for &w in &WITNESSES {
        let mut x = BigInt::from(w).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Checks that `p` is an odd prime.
pub fn require_odd_prime(p: &BigInt) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if *p == int(2) {
        return Err(Error::CharacteristicTwo);
    }
    Ok(())
}

pub fn require_prime(p: &BigInt) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Exact `p`-adic valuation; `None` for zero.
pub fn valuation(n: &BigInt, p: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// If `q = p^k` with `k >= 1`, returns `k`.
pub fn prime_power_exponent(q: &BigInt, p: &BigInt) -> Option<u64> {
    let k = valuation(q, p)?;
    if k == 0 || q.is_negative() {
        return None;
    }
    (p.pow(k as u32) == *q).then_some(k)
}

/// No square of a prime divides `n`. Zero is not squarefree.
pub fn is_squarefree(n: &BigInt) -> bool {
    if n.is_zero() {
        return false;
    }
    let mut n = n.abs();
    if let Some(small) = n.to_u128() {
        let mut m = small;
        let mut d: u128 = 2;
        while d * d <= m {
            if m % d == 0 {
                m /= d;
                if m % d == 0 {
                    return false;
                }
            }
            d += if d == 2 { 1 } else { 2 };
        }
        return true;
    }
    let mut d = int(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            n /= &d;
            if (&n % &d).is_zero() {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Returns `(g, coeffs)` with `g = gcd(values) >= 0` and `sum coeffs[i] * values[i] = g`.
pub fn extended_gcd_list(values: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); values.len()];
    for (i, v) in values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let e = g.extended_gcd(v);
        // e.gcd = e.x * g + e.y * v
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in coeffs.iter_mut() {
            *c = -&*c;
        }
    }
    (g, coeffs)
}

pub fn gcd_list(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
