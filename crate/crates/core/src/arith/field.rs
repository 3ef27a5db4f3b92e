use num_bigint::{BigInt, BigUint};

use super::fp_poly::{self, reduce_int};
use super::{mul_mod, PrimePower};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_DEGREE_CAP: usize = 24;

/// Coefficients over F_p in the polynomial basis `1, x, ..., x^{k-1}`.
pub type Elem = Vec<u64>;

/// F_{p^k} as F_p[x]/(m) with `m` the least monic irreducible of degree `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    degree: usize,
    modulus: Vec<u64>,
    order: u128,
}

impl FiniteField {
    /// The field F_{q^n} for `q = p^r`, refusing degrees `r·n` above `cap`.
    pub fn extension(pp: PrimePower, n: u32, cap: usize) -> Result<Self> {
        if n == 0 {
            return invalid("extension degree must be positive");
        }
        let degree = pp.r as usize * n as usize;
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        Self::with_degree(pp.p, degree)
    }

    pub fn with_degree(p: u64, degree: usize) -> Result<Self> {
        if p >= 1 << 32 {
            return invalid(format!("characteristic {p} too large for field arithmetic"));
        }
        let order = (p as u128)
            .checked_pow(degree as u32)
            .ok_or_else(|| Error::Invalid(format!("{p}^{degree} does not fit in 128 bits")))?;
        let modulus = fp_poly::least_irreducible(p, degree);
        Ok(FiniteField { p, degree, modulus, order })
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::with_degree(p, 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    /// Monic modulus, low degree first. For the prime field this is `x`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.degree]
    }

    pub fn one(&self) -> Elem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, c: u64) -> Elem {
        let mut e = self.zero();
        e[0] = c % self.p;
        e
    }

    pub fn from_int(&self, c: &BigInt) -> Elem {
        let mut e = self.zero();
        e[0] = reduce_int(c, self.p);
        e
    }

    /// The element whose base-p digits (constant coefficient least significant) are `idx`.
    pub fn element(&self, mut idx: u128) -> Elem {
        let p = self.p as u128;
        let mut e = self.zero();
        for c in e.iter_mut() {
            *c = (idx % p) as u64;
            idx /= p;
        }
        e
    }

    pub fn index(&self, a: &[u64]) -> u128 {
        a.iter().rev().fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let p = self.p;
        let k = self.degree;
        if k == 1 {
            return vec![mul_mod(a[0], b[0], p)];
        }
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        for top in (k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for i in 0..k {
                let m = self.modulus[i];
                if m != 0 {
                    let idx = top - k + i;
                    prod[idx] = (prod[idx] + p - mul_mod(c, m, p)) % p;
                }
            }
        }
        prod.truncate(k);
        prod
    }

    pub fn pow(&self, a: &[u64], e: &BigUint) -> Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn pow_u64(&self, a: &[u64], e: u64) -> Elem {
        self.pow(a, &BigUint::from(e))
    }

    pub fn inv(&self, a: &[u64]) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, &(BigUint::from(self.order) - 2u32)))
    }

    /// `a ↦ a^p`.
    pub fn frobenius(&self, a: &[u64]) -> Elem {
        self.pow_u64(a, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_fields() {
        let f3 = FiniteField::extension(PrimePower::new(3, 1).unwrap(), 1, 24).unwrap();
        assert_eq!(f3.order(), 3);
        assert_eq!(f3.modulus(), &[0, 1]);
        let f9 = FiniteField::extension(PrimePower::new(3, 1).unwrap(), 2, 24).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let f25 = FiniteField::extension(PrimePower::new(5, 2).unwrap(), 1, 24).unwrap();
        assert_eq!(f25.order(), 25);
        let err = FiniteField::extension(PrimePower::new(2, 5).unwrap(), 5, 24).unwrap_err();
        assert!(matches!(err, Error::DegreeCap { degree: 25, cap: 24 }));
    }

    #[test]
    fn index_roundtrip_and_i_squared() {
        let f9 = FiniteField::with_degree(3, 2).unwrap();
        for idx in 0..9 {
            assert_eq!(f9.index(&f9.element(idx)), idx);
        }
        let i = f9.element(3); // x
        assert_eq!(f9.mul(&i, &i), f9.from_u64(2)); // x^2 = -1
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_right_order() {
        let f8 = FiniteField::with_degree(2, 3).unwrap();
        let x = f8.element(2);
        let mut seen = std::collections::BTreeSet::new();
        let mut acc = f8.one();
        for _ in 0..7 {
            seen.insert(f8.index(&acc));
            acc = f8.mul(&acc, &x);
        }
        assert_eq!(seen.len(), 7);
        assert_eq!(acc, f8.one());
    }

    fn field_and_elems() -> impl Strategy<Value = (u64, usize, Vec<u128>)> {
        prop_oneof![
            Just((2u64, 5usize)),
            Just((3, 4)),
            Just((5, 3)),
            Just((7, 2)),
            Just((13, 1)),
            Just((2, 11)),
        ]
        .prop_flat_map(|(p, k)| {
            let order = (p as u128).pow(k as u32);
            (Just(p), Just(k), proptest::collection::vec(0..order, 3))
        })
    }

    proptest! {
        #[test]
        fn frobenius_has_order_degree((p, k, idx) in field_and_elems()) {
            let f = FiniteField::with_degree(p, k).unwrap();
            for &i in &idx {
                let a = f.element(i);
                let mut b = a.clone();
                for _ in 0..k {
                    b = f.frobenius(&b);
                }
                prop_assert_eq!(b, a);
            }
        }

        #[test]
        fn fermat_little((p, k, idx) in field_and_elems()) {
            let f = FiniteField::with_degree(p, k).unwrap();
            let e = BigUint::from(f.order() - 1);
            for &i in &idx {
                let a = f.element(i);
                if f.is_zero(&a) { continue; }
                prop_assert_eq!(f.pow(&a, &e), f.one());
                let inv = f.inv(&a).unwrap();
                prop_assert_eq!(f.mul(&a, &inv), f.one());
            }
        }

        #[test]
        fn distributive((p, k, idx) in field_and_elems()) {
            let f = FiniteField::with_degree(p, k).unwrap();
            let (a, b, c) = (f.element(idx[0]), f.element(idx[1]), f.element(idx[2]));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
        }
    }
}
