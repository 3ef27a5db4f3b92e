use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use super::poly::Poly;
use crate::arith::{rat, QMatrix, Rational};
use crate::error::{invalid, Result};

/// Truncated power series `c_0 + c_1 t + ... + c_M t^M` over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Series of order `coeffs.len() - 1`; `coeffs` must be nonempty.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series stores at least c_0");
        PowerSeries { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![Rational::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        Self::new((0..=order).map(|i| p.coeff(i)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "truncation cannot extend a series");
        Self::new(self.coeffs[..=order].to_vec())
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return invalid("series with zero constant term is not invertible");
        }
        let inv0 = c0.recip();
        let m = self.order();
        let mut out = vec![Rational::zero(); m + 1];
        out[0] = inv0.clone();
        for n in 1..=m {
            let mut acc = Rational::zero();
            for k in 1..=n {
                acc += &self.coeffs[k] * &out[n - k];
            }
            out[n] = -acc * &inv0;
        }
        Ok(Self::new(out))
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// `exp(s)` for `s` with zero constant term, via `E' = s'·E`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return invalid("exp_series needs a zero constant term");
        }
        let m = self.order();
        let mut e = vec![Rational::zero(); m + 1];
        e[0] = Rational::one();
        for n in 1..=m {
            let mut acc = Rational::zero();
            for k in 1..=n {
                acc += rat(k as i64) * &self.coeffs[k] * &e[n - k];
            }
            e[n] = acc / rat(n as i64);
        }
        Ok(Self::new(e))
    }

    /// `log(s)` for `s` with constant term 1, via `L' = s'/s`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return invalid("log_series needs constant term 1");
        }
        let m = self.order();
        let quotient = &self.derivative() * &self.inverse()?.truncate(m.saturating_sub(1));
        let mut out = vec![Rational::zero(); m + 1];
        for n in 1..=m {
            out[n] = quotient.coeffs[n - 1].clone() / rat(n as i64);
        }
        Ok(Self::new(out))
    }
}

/// `∑_{n=1}^{M} tr(f^n) t^n / n`.
pub fn log_det_series(f: &QMatrix, order: usize) -> Result<PowerSeries> {
    if !f.is_square() {
        return invalid("log_det_series needs a square matrix");
    }
    let mut out = vec![Rational::zero(); order + 1];
    let mut pw = QMatrix::identity(f.rows());
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        pw = pw.mul(f);
        *slot = pw.trace() / rat(n as i64);
    }
    Ok(PowerSeries::new(out))
}

fn binary(a: &PowerSeries, b: &PowerSeries, op: impl Fn(&Rational, &Rational) -> Rational) -> PowerSeries {
    let m = a.order().min(b.order());
    PowerSeries::new((0..=m).map(|i| op(&a.coeffs[i], &b.coeffs[i])).collect())
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, o: &PowerSeries) -> PowerSeries {
        binary(self, o, |x, y| x + y)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, o: &PowerSeries) -> PowerSeries {
        binary(self, o, |x, y| x - y)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, o: &PowerSeries) -> PowerSeries {
        let m = self.order().min(o.order());
        let mut c = vec![Rational::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for j in 0..=(m - i) {
                c[i + j] += a * &o.coeffs[j];
            }
        }
        PowerSeries::new(c)
    }
}
