//! Factorization for the prime-factor count `Omega`: trial division, then
//! Pollard-Brent rho with Miller-Rabin primality tests (deterministic below
//! `2^64`, strong probable-prime above).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("cannot factor zero")]
    Zero,
    #[error("factorization of {0} exceeded the iteration budget")]
    Timeout(BigUint),
}

#[derive(Clone, Debug)]
pub struct FactorConfig {
    pub trial_bound: u64,
    /// Iterations per Pollard-Brent attempt.
    pub rho_iterations: u64,
    pub rho_attempts: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig { trial_bound: 1_000_000, rho_iterations: 1 << 22, rho_attempts: 16 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    pub factors: BTreeMap<BigUint, u32>,
    /// Factors above `2^64` accepted as prime by a strong probable-prime test.
    pub probable_primes: Vec<BigUint>,
}

impl Factorization {
    pub fn omega(&self) -> u64 {
        self.factors.values().map(|&e| e as u64).sum()
    }

    fn add(&mut self, p: BigUint, e: u32) {
        *self.factors.entry(p).or_insert(0) += e;
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, n);
        }
        a = mul_mod(a, a, n);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES {
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

fn rho_u64(n: u64, c: u64, budget: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let mut spent = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
            spent += m;
        }
        r *= 2;
        if spent > budget {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Strong probable-prime test to the bases in `SMALL_PRIMES`.
fn is_probable_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint, c: u64, budget: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let (mut r, m) = (1u64, 128u64);
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut spent = 0u64;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += m;
            spent += m;
        }
        r *= 2;
        if spent > budget {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

pub fn factorize(n: &BigUint, cfg: &FactorConfig) -> Result<Factorization, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    let mut out = Factorization::default();
    let mut rest = n.clone();
    let mut d = 2u64;
    while d <= cfg.trial_bound && BigUint::from(d) * d <= rest {
        let big = BigUint::from(d);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&big);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.add(big, e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(out);
    }
    let bound = BigUint::from(cfg.trial_bound);
    if rest <= &bound * &bound {
        out.add(rest, 1);
        return Ok(out);
    }
    let mut stack = vec![rest];
    while let Some(x) = stack.pop() {
        if let Some(small) = x.to_u64() {
            if is_prime_u64(small) {
                out.add(x, 1);
                continue;
            }
            let d = (1..=cfg.rho_attempts)
                .find_map(|c| rho_u64(small, c, cfg.rho_iterations))
                .ok_or_else(|| FactorError::Timeout(x.clone()))?;
            stack.push(BigUint::from(d));
            stack.push(BigUint::from(small / d));
        } else {
            if is_probable_prime_big(&x) {
                out.probable_primes.push(x.clone());
                out.add(x, 1);
                continue;
            }
            let d = (1..=cfg.rho_attempts)
                .find_map(|c| rho_big(&x, c, cfg.rho_iterations))
                .ok_or_else(|| FactorError::Timeout(x.clone()))?;
            stack.push(&x / &d);
            stack.push(d);
        }
    }
    Ok(out)
}

/// Number of prime factors counted with multiplicity; `Omega(1) = 0`.
pub fn omega(n: &BigUint) -> Result<u64, FactorError> {
    Ok(factorize(n, &FactorConfig::default())?.omega())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&big(16)).unwrap(), 4);
        assert_eq!(omega(&big(1)).unwrap(), 0);
        assert_eq!(omega(&big(360)).unwrap(), 6);
        assert_eq!(omega(&big(999_983)).unwrap(), 1);
        assert!(matches!(omega(&BigUint::zero()), Err(FactorError::Zero)));
    }

    #[test]
    fn semiprimes_beyond_trial_division() {
        // 1000003 * 1000033, both above the trial bound
        let n = big(1_000_003) * big(1_000_033);
        let f = factorize(&n, &FactorConfig::default()).unwrap();
        assert_eq!(f.omega(), 2);
        assert!(f.factors.contains_key(&big(1_000_003)));
        // (2^61 - 1) * (2^31 - 1) * 3^2 exceeds 64 bits
        let n = big((1 << 61) - 1) * big((1 << 31) - 1) * big(9);
        let f = factorize(&n, &FactorConfig::default()).unwrap();
        assert_eq!(f.omega(), 4);
        assert!(f.probable_primes.is_empty());
        // a prime above 2^64 goes through the probable-prime path
        let p = (BigUint::one() << 127u32) - BigUint::one();
        let f = factorize(&p, &FactorConfig::default()).unwrap();
        assert_eq!(f.omega(), 1);
        assert_eq!(f.probable_primes, vec![p]);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let cfg = FactorConfig { trial_bound: 10, rho_iterations: 1, rho_attempts: 1 };
        let n = big(1_000_003) * big(1_000_033);
        assert!(matches!(factorize(&n, &cfg), Err(FactorError::Timeout(_))));
    }

    #[test]
    fn miller_rabin() {
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(561));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(3_215_031_751));
    }
}
