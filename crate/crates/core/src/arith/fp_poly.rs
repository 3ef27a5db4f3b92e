//! Dense polynomials over the prime field F_p, coefficients low degree first.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{is_prime, mul_mod, pow_mod};

pub type FpPoly = Vec<u64>;

pub fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub fn reduce_int(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

pub fn from_int_coeffs(coeffs: &[BigInt], p: u64) -> FpPoly {
    trim(coeffs.iter().map(|c| reduce_int(c, p)).collect())
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out = vec![0; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    trim(out)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn rem(a: &[u64], m: &[u64], p: u64) -> FpPoly {
    let dm = degree(m).expect("nonzero modulus");
    let lead_inv = inv_mod(m[dm], p);
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (i, &mi) in m.iter().enumerate().take(dm + 1) {
            r[shift + i] = (r[shift + i] + p - mul_mod(c, mi, p)) % p;
        }
        r = trim(r);
    }
    r
}

pub fn monic(a: FpPoly, p: u64) -> FpPoly {
    match degree(&a) {
        None => a,
        Some(d) => {
            let inv = inv_mod(a[d], p);
            a.into_iter().map(|c| mul_mod(c, inv, p)).collect()
        }
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(x, p)
}

/// `base^e mod m`.
pub fn pow_mod_poly(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut acc: FpPoly = rem(&[1], m, p);
    let b = rem(base, m, p);
    for i in (0..e.bits()).rev() {
        acc = rem(&mul(&acc, &acc, p), m, p);
        if e.bit(i) {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
    }
    acc
}

/// Number of distinct roots of `f` in F_{p^k}: `deg gcd(f, x^{p^k} - x)`.
pub fn distinct_roots_in_extension(f: &[u64], p: u64, k: u32) -> usize {
    let f = trim(f.to_vec());
    match degree(&f) {
        None => panic!("zero polynomial has every element as a root"),
        Some(0) => 0,
        Some(_) => {
            let e = BigUint::from(p).pow(k);
            let xq = pow_mod_poly(&[0, 1], &e, &f, p);
            let h = sub(&xq, &[0, 1], p);
            degree(&gcd(&f, &h, p)).unwrap_or(0)
        }
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
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

/// Rabin's irreducibility test for a monic `f` of degree `k` over F_p.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    assert!(is_prime(p));
    let k = match degree(f) {
        None | Some(0) => return false,
        Some(k) => k,
    };
    if k == 1 {
        return true;
    }
    let x = [0u64, 1];
    let bp = BigUint::from(p);
    let full = pow_mod_poly(&x, &bp.pow(k as u32), f, p);
    if !sub(&full, &x, p).is_empty() {
        return false;
    }
    for l in prime_factors(k) {
        let xe = pow_mod_poly(&x, &bp.pow((k / l) as u32), f, p);
        let g = gcd(f, &sub(&xe, &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// The monic irreducible of degree `k` whose lower coefficients, read as base-p digits
/// with the constant term least significant, form the smallest number.
pub fn least_irreducible(p: u64, k: usize) -> FpPoly {
    if k == 1 {
        return vec![0, 1];
    }
    let mut digits = vec![0u64; k];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            assert!(i < k, "an irreducible of every degree exists");
        }
    }
}

pub fn is_zero_poly(a: &[u64]) -> bool {
    a.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible(f: &[u64], p: u64) -> bool {
        // no root and, for degree <= 3, that settles it
        let k = degree(f).unwrap();
        assert!(k <= 3);
        (0..p).all(|x| {
            let mut acc = 0u64;
            for &c in f.iter().rev() {
                acc = (mul_mod(acc, x, p) + c) % p;
            }
            acc != 0
        })
    }

    #[test]
    fn least_irreducibles() {
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(5, 2), vec![2, 0, 1]);
    }

    #[test]
    fn rabin_agrees_with_root_test_in_low_degree() {
        for p in [2u64, 3, 5, 7] {
            for k in 2..=3usize {
                let total = p.pow(k as u32);
                for code in 0..total {
                    let mut f: Vec<u64> = (0..k).map(|i| (code / p.pow(i as u32)) % p).collect();
                    f.push(1);
                    assert_eq!(is_irreducible(&f, p), brute_irreducible(&f, p), "{f:?} mod {p}");
                }
            }
        }
    }

    #[test]
    fn quartic_irreducible_over_f2() {
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
        // (x^2+x+1)^2 has no roots but is reducible
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
    }

    #[test]
    fn roots_in_extensions() {
        // x^2 + 1 over F_3 splits in F_9 only
        assert_eq!(distinct_roots_in_extension(&[1, 0, 1], 3, 1), 0);
        assert_eq!(distinct_roots_in_extension(&[1, 0, 1], 3, 2), 2);
        // (x+1)^2 over F_2 has one distinct root
        assert_eq!(distinct_roots_in_extension(&[1, 0, 1], 2, 1), 1);
    }
}
