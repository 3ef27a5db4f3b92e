use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{fp_poly, FiniteField};

/// Multivariate polynomial with integer coefficients; keys are exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, BigInt::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Common degree of all terms, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next().unwrap_or(0);
        degs.all(|d| d == first).then_some(first)
    }

    /// Variables that actually occur.
    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(e.clone()).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        (0..k).fold(MPoly::constant(self.nvars, BigInt::one()), |acc, _| acc.mul(self))
    }

    /// Coefficients of a polynomial in the single variable `i`, low degree first.
    pub fn univariate(&self, i: usize) -> Option<Vec<BigInt>> {
        if self.used_vars().iter().any(|&v| v != i) {
            return None;
        }
        let d = self.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
        let mut c = vec![BigInt::zero(); d + 1];
        for (e, a) in &self.terms {
            c[e[i] as usize] = a.clone();
        }
        Some(c)
    }

    /// Canonical rendering with the given variable names, terms in descending order.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if !a.is_one() || is_const {
                factors.push(a.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{x}", names[i])),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Reduction mod p, ready for evaluation over extensions of F_p.
    pub fn compile(&self, p: u64) -> CompiledPoly {
        let terms: Vec<(u64, Vec<u32>)> = self
            .terms
            .iter()
            .map(|(e, c)| (fp_poly::reduce_int(c, p), e.clone()))
            .filter(|(c, _)| *c != 0)
            .collect();
        let mut max_exp = vec![0u32; self.nvars];
        for (_, e) in &terms {
            for (m, &x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(x);
            }
        }
        CompiledPoly { terms, max_exp }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(u64, Vec<u32>)>,
    max_exp: Vec<u32>,
}

impl CompiledPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at a point, all coordinates in `field`.
    pub fn eval(&self, field: &FiniteField, point: &[Vec<u64>]) -> Vec<u64> {
        let powers: Vec<Vec<Vec<u64>>> = point
            .iter()
            .zip(&self.max_exp)
            .map(|(x, &m)| {
                let mut pw = Vec::with_capacity(m as usize + 1);
                pw.push(field.one());
                for k in 1..=m as usize {
                    let next = field.mul(&pw[k - 1], x);
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut acc = field.zero();
        for (c, e) in &self.terms {
            let mut term = field.from_u64(*c);
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    term = field.mul(&term, &powers[i][x as usize]);
                }
            }
            acc = field.add(&acc, &term);
        }
        acc
    }

    pub fn vanishes_at(&self, field: &FiniteField, point: &[Vec<u64>]) -> bool {
        field.is_zero(&self.eval(field, point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn algebra_and_rendering() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.render(&names(&["x", "y"])), "x^2 + 2*x*y + y^2");
        assert_eq!(p.homogeneous_degree(), Some(2));
        assert!(p.sub(&p).is_zero());
        let q = x.pow(2).add(&y);
        assert_eq!(q.homogeneous_degree(), None);
        assert_eq!(q.total_degree(), 2);
        assert_eq!(MPoly::constant(2, BigInt::from(-3)).render(&names(&["x", "y"])), "-3");
    }

    #[test]
    fn compiled_evaluation() {
        let f = FiniteField::prime_field(5).unwrap();
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        // y^2 - x^3 - x
        let e = y.pow(2).sub(&x.pow(3)).sub(&x).compile(5);
        let count = (0..5u64)
            .flat_map(|a| (0..5u64).map(move |b| (a, b)))
            .filter(|&(a, b)| e.vanishes_at(&f, &[f.from_u64(a), f.from_u64(b)]))
            .count();
        assert_eq!(count, 3);
    }
}
