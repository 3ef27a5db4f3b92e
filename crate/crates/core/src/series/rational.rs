use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::power::PowerSeries;
use crate::arith::Rational;
use crate::error::{invalid, Result};

/// `num / den` with both constant terms 1 and `gcd(num, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Normalizes by the common factor and the constant terms. The value at 0 must be 1.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.constant_term().is_zero() || den.constant_term().is_zero() {
            return invalid("rational function must be finite and nonzero at 0");
        }
        if num.constant_term() != den.constant_term() {
            return invalid("rational function must take the value 1 at 0");
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).expect("gcd divides").normalize_constant();
        let den = den.exact_div(&g).expect("gcd divides").normalize_constant();
        Ok(RationalFunction { num, den })
    }

    pub fn one() -> Self {
        RationalFunction { num: Poly::one(), den: Poly::one() }
    }

    /// `1 / p` for `p(0) = 1`.
    pub fn reciprocal_of(p: Poly) -> Result<Self> {
        Self::new(Poly::one(), p)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        Self::new(&self.num * &o.num, &self.den * &o.den).expect("product of normalized functions")
    }

    pub fn recip(&self) -> RationalFunction {
        RationalFunction { num: self.den.clone(), den: self.num.clone() }
    }

    pub fn div(&self, o: &RationalFunction) -> RationalFunction {
        self.mul(&o.recip())
    }

    pub fn pow(&self, e: u32) -> RationalFunction {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn expand(&self, order: usize) -> PowerSeries {
        let inv = PowerSeries::from_poly(&self.den, order).inverse().expect("den(0) = 1");
        &PowerSeries::from_poly(&self.num, order) * &inv
    }

    /// `x ↦ c·x`.
    pub fn subst_scale(&self, c: &Rational) -> RationalFunction {
        Self::new(self.num.subst_scale(c), self.den.subst_scale(c)).expect("scaling keeps value at 0")
    }

    /// Value at `x`, `None` at a pole.
    pub fn eval_c(&self, x: Complex64) -> Option<Complex64> {
        let d = self.den.eval_c(x);
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.num.eval_c(x) / d)
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one_poly() && self.den.is_one_poly()
    }

    pub fn in_var(&self, var: &'static str) -> String {
        if self.den.deg() == 0 {
            return format!("{}", self.num.in_var(var));
        }
        format!("({}) / ({})", self.num.in_var(var), self.den.in_var(var))
    }
}

impl Poly {
    pub(crate) fn is_one_poly(&self) -> bool {
        self.deg() == 0 && self.constant_term().is_one()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.in_var("t"))
    }
}
