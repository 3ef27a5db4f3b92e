//! Fixed-precision binary floats and complex numbers for root polishing.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::arith::Rational;

pub type Float = FBig<HalfEven, 2>;

/// Working precision in bits for `digits` decimal digits, with guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

pub fn ibig(n: &BigInt) -> IBig {
    n.to_string().parse().expect("decimal integer")
}

#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub bits: usize,
}

impl Ctx {
    pub fn new(bits: usize) -> Self {
        Ctx { bits }
    }

    pub fn int(&self, n: &BigInt) -> Float {
        Float::from(ibig(n)).with_precision(self.bits).value()
    }

    pub fn small(&self, n: i64) -> Float {
        Float::from(IBig::from(n)).with_precision(self.bits).value()
    }

    pub fn zero(&self) -> Float {
        self.small(0)
    }

    pub fn rational(&self, r: &Rational) -> Float {
        self.int(r.numer()) / self.int(r.denom())
    }

    pub fn f64(&self, x: f64) -> Float {
        Float::try_from(x).expect("finite").with_precision(self.bits).value()
    }

    pub fn complex(&self, z: Complex64) -> MpComplex {
        MpComplex { re: self.f64(z.re), im: self.f64(z.im) }
    }

    pub fn real(&self, x: Float) -> MpComplex {
        MpComplex { re: x, im: self.zero() }
    }

    /// `2^{-k}`.
    pub fn pow2_neg(&self, k: usize) -> Float {
        Float::from_parts(IBig::from(1), -(k as isize)).with_precision(self.bits).value()
    }
}

pub fn abs(x: &Float) -> Float {
    if *x < Float::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

pub fn to_f64(x: &Float) -> f64 {
    x.to_f64().value()
}

#[derive(Clone, Debug)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl MpComplex {
    pub fn add(&self, o: &Self) -> Self {
        MpComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        MpComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        MpComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, c: &Float) -> Self {
        MpComplex { re: &self.re * c, im: &self.im * c }
    }

    pub fn norm_sqr(&self) -> Float {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.re == Float::ZERO && self.im == Float::ZERO
    }

    pub fn div(&self, o: &Self) -> Self {
        let d = o.norm_sqr();
        MpComplex {
            re: (&self.re * &o.re + &self.im * &o.im) / &d,
            im: (&self.im * &o.re - &self.re * &o.im) / &d,
        }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        MpComplex { re: &self.re / &d, im: -(&self.im / &d) }
    }

    pub fn conj(&self) -> Self {
        MpComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn neg(&self) -> Self {
        MpComplex { re: -self.re.clone(), im: -self.im.clone() }
    }

    /// Principal square root.
    pub fn sqrt(&self, ctx: &Ctx) -> Self {
        let r = self.abs();
        let two = ctx.small(2);
        let re = ((&r + &self.re) / &two).sqrt();
        let im_abs = ((&r - &self.re) / &two).sqrt();
        let im = if self.im < Float::ZERO { -im_abs } else { im_abs };
        MpComplex { re, im }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}
