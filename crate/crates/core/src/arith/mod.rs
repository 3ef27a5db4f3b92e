//! Integers, rationals, primes and finite fields.

mod field;
pub mod fp_poly;
mod matrix;

pub use field::{Elem, FiniteField, DEFAULT_DEGREE_CAP};
pub use matrix::QMatrix;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}

/// A prime power `q = p^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub r: u32,
}

impl PrimePower {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if r == 0 {
            return invalid("prime power exponent must be positive");
        }
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        Ok(PrimePower { p, r })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn q_big(&self) -> BigUint {
        BigUint::from(self.p).pow(self.r)
    }

    /// `q` as a machine integer, if it fits.
    pub fn q(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.r)
    }

    pub fn q_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.q_big()))
    }

    pub fn q_f64(&self) -> f64 {
        (self.p as f64).powi(self.r as i32)
    }

    /// `q^n` for the extension of degree `n`.
    pub fn extend(&self, n: u32) -> PrimePower {
        PrimePower { p: self.p, r: self.r * n }
    }

    /// Whether `q` is a perfect square, together with its root.
    pub fn sqrt(&self) -> Option<BigUint> {
        if self.r.is_multiple_of(2) {
            Some(BigUint::from(self.p).pow(self.r / 2))
        } else {
            None
        }
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.r == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.r)
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact below 2^64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes `<= limit` in ascending order (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Prime factors of `|n|` (ascending, without multiplicity). Trial division stops at
/// 10^6; a larger leftover cofactor is reported as one entry and may be composite.
pub fn prime_support(n: &BigInt) -> Vec<BigUint> {
    let mut m = n.abs().to_biguint().expect("nonnegative");
    let mut out = Vec::new();
    if m.is_zero() {
        return out;
    }
    let mut d = BigUint::from(2u32);
    let stop = BigUint::from(1_000_000u32);
    while &d * &d <= m && d <= stop {
        if (&m % &d).is_zero() {
            out.push(d.clone());
            while (&m % &d).is_zero() {
                m /= &d;
            }
        }
        d += 1u32;
    }
    if !m.is_one() {
        out.push(m);
    }
    out
}

/// Primes dividing `|n|` other than `p`, found by dividing out `p` first.
pub fn foreign_primes(n: &BigInt, p: u64) -> Vec<BigUint> {
    let mut m = n.abs();
    let bp = BigInt::from(p);
    if m.is_zero() {
        return Vec::new();
    }
    while (&m % &bp).is_zero() {
        m /= &bp;
    }
    prime_support(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primes_small() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2), vec![2]);
        assert!(primes_up_to(1).is_empty());
        let hundred = primes_up_to(100);
        let oracle: Vec<u64> = (0..=100).filter(|&n| trial_division(n)).collect();
        assert_eq!(hundred, oracle);
        assert_eq!(hundred.len(), 25);
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(18_446_744_073_709_551_615));
    }

    #[test]
    fn prime_power_checks() {
        assert!(PrimePower::new(4, 1).is_err());
        assert!(PrimePower::new(5, 0).is_err());
        let pp = PrimePower::new(5, 2).unwrap();
        assert_eq!(pp.q(), Some(25));
        assert_eq!(pp.sqrt(), Some(BigUint::from(5u32)));
        assert_eq!(PrimePower::new(3, 1).unwrap().sqrt(), None);
    }

    #[test]
    fn support() {
        let s: Vec<u64> = prime_support(&BigInt::from(-360))
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect();
        assert_eq!(s, vec![2, 3, 5]);
        assert!(foreign_primes(&BigInt::from(125), 5).is_empty());
        assert_eq!(foreign_primes(&BigInt::from(6), 5).len(), 2);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn small_rat() -> impl Strategy<Value = Rational> {
            (-50i64..50, 1i64..30).prop_map(|(n, d)| ratio(n, d))
        }

        proptest! {
            #[test]
            fn rational_field_laws(a in small_rat(), b in small_rat(), c in small_rat()) {
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                let n = Rational::new(a.numer().clone(), a.denom().clone());
                prop_assert_eq!(&n, &a);
                prop_assert!(a.denom().is_positive());
            }
        }
    }
}
