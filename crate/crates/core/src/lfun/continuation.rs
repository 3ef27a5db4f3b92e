//! Riemann zeta and the mod-4 Dirichlet L-function on the whole plane, for closed-form models.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ArithmeticModel, ClosedForm};
use crate::error::{Error, Result};
use crate::ncspec::Parity;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(z)` by the Lanczos approximation, reflected for `Re z < 1/2`.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `∑_{k≥0} (−1)^k a_k` for `a_k = term(k)` by the Borwein–Cohen–Villegas–Zagier weights.
fn alternating_sum(s: Complex64, term: impl Fn(usize) -> Complex64) -> Complex64 {
    let n = (40.0 + 3.0 * s.im.abs()).max(64.0).min(200.0) as usize;
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 0..n {
        let i = i as f64;
        t *= (nf + i) * 4.0 * (nf - i) / ((2.0 * i + 1.0) * (2.0 * i + 2.0));
        acc += t;
        d.push(acc);
    }
    let dn = d[n];
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, dk) in d.iter().take(n).enumerate() {
        let w = (dn - dk) / dn;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * w * term(k);
    }
    sum
}

fn power_neg(base: f64, s: Complex64) -> Complex64 {
    (-s * base.ln()).exp()
}

/// Mean of `f` over a circle: the value at the center for `f` holomorphic on the disc.
fn circle_mean(center: Complex64, radius: f64, samples: usize, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let sum: Complex64 = (0..samples)
        .map(|k| f(center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / samples as f64)))
        .sum();
    sum / samples as f64
}

fn eta(s: Complex64) -> Complex64 {
    alternating_sum(s, |k| power_neg((k + 1) as f64, s))
}

/// `ζ(s) = η(s) / (1 − 2^{1−s})` for `Re s > 0`, `s ≠ 1`.
pub fn zeta_eta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1".into()));
    }
    let ratio = |z: Complex64| eta(z) / (1.0 - power_neg(2.0, z - 1.0));
    if (1.0 - power_neg(2.0, s - 1.0)).norm() < 1e-4 {
        if (s - 1.0).norm() < 1e-4 {
            return Err(Error::Pole(format!("{s}")));
        }
        return Ok(circle_mean(s, 0.01, 64, ratio));
    }
    Ok(ratio(s))
}

/// `ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)`, for `Re s < 1`.
pub fn zeta_reflected(s: Complex64) -> Result<Complex64> {
    let reflect = |z: Complex64| -> Complex64 {
        let partner = zeta_eta(1.0 - z).unwrap_or(Complex64::new(f64::NAN, 0.0));
        Complex64::new(2.0, 0.0).powc(z) * Complex64::new(PI, 0.0).powc(z - 1.0) * (PI * z / 2.0).sin() * gamma(1.0 - z) * partner
    };
    if s.norm() < 1e-6 {
        return Ok(circle_mean(s, 0.05, 64, reflect));
    }
    let v = reflect(s);
    if v.is_nan() {
        return Err(Error::Pole(format!("{s}")));
    }
    Ok(v)
}

/// Riemann zeta on `C \ {1}`.
pub fn zeta_continuation(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1".into()));
    }
    if s.re > 0.0 {
        zeta_eta(s)
    } else {
        zeta_reflected(s)
    }
}

/// `L(s, χ₄) = ∑ (−1)^k (2k+1)^{−s}`, continued through `β(1−s) = (2/π)^s sin(πs/2) Γ(s) β(s)`.
pub fn dirichlet_beta(s: Complex64) -> Complex64 {
    if s.re > 0.0 {
        return alternating_sum(s, |k| power_neg((2 * k + 1) as f64, s));
    }
    let u = 1.0 - s;
    Complex64::new(2.0 / PI, 0.0).powc(u) * (PI * u / 2.0).sin() * gamma(u) * dirichlet_beta(u)
}

fn not_continued() -> Error {
    Error::Unsupported("continuation unavailable".into())
}

/// `L_even` or `L_odd` of a closed-form model at any `s` away from its poles.
pub fn l_closed_form(model: &ArithmeticModel, parity: Parity, s: Complex64) -> Result<Complex64> {
    let form = model.closed_form.as_ref().ok_or_else(not_continued)?;
    if parity == Parity::Odd {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(match form {
        ClosedForm::MixedTate(shifts) => zeta_continuation(s)?.powu(shifts.len() as u32),
        ClosedForm::DedekindQi => zeta_continuation(s)? * dirichlet_beta(s),
        ClosedForm::RiemannZeta => zeta_continuation(s)?,
    })
}

/// The classical L-function `∏_w L_w(s)` of a closed-form model: `∏ ζ(s − j)` for mixed Tate.
pub fn classical_l_closed_form(model: &ArithmeticModel, s: Complex64) -> Result<Complex64> {
    let form = model.closed_form.as_ref().ok_or_else(not_continued)?;
    match form {
        ClosedForm::MixedTate(shifts) => shifts.iter().try_fold(Complex64::new(1.0, 0.0), |acc, &j| {
            Ok(acc * zeta_continuation(s - j as f64)?)
        }),
        _ => l_closed_form(model, Parity::Even, s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn gamma_values() {
        assert!(close(gamma(Complex64::new(5.0, 0.0)), Complex64::new(24.0, 0.0), 1e-10));
        assert!(close(gamma(Complex64::new(0.5, 0.0)), Complex64::new(PI.sqrt(), 0.0), 1e-12));
        assert!(close(gamma(Complex64::new(-0.5, 0.0)), Complex64::new(-2.0 * PI.sqrt(), 0.0), 1e-12));
        // |Γ(iy)|² = π / (y sinh πy)
        let y = 2.0;
        let g = gamma(Complex64::new(0.0, y));
        assert!((g.norm_sqr() - PI / (y * (PI * y).sinh())).abs() < 1e-12);
    }

    #[test]
    fn zeta_special_values() {
        let z = |x: f64| zeta_continuation(Complex64::new(x, 0.0)).unwrap();
        assert!(close(z(2.0), Complex64::new(PI * PI / 6.0, 0.0), 1e-12));
        assert!(close(z(4.0), Complex64::new(PI.powi(4) / 90.0, 0.0), 1e-12));
        assert!(close(z(0.0), Complex64::new(-0.5, 0.0), 1e-10));
        assert!(close(z(-1.0), Complex64::new(-1.0 / 12.0, 0.0), 1e-10));
        assert!(close(z(-2.0), Complex64::new(0.0, 0.0), 1e-12));
        assert!(close(z(-3.0), Complex64::new(1.0 / 120.0, 0.0), 1e-10));
        assert!(matches!(zeta_continuation(Complex64::new(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn zeta_removable_points_of_eta_quotient() {
        // s = 1 + 2πi/ln 2: the denominator vanishes but ζ does not have a pole
        let s = Complex64::new(1.0, 2.0 * PI / 2f64.ln());
        let v = zeta_eta(s).unwrap();
        let nearby = zeta_eta(s + Complex64::new(0.02, 0.0)).unwrap();
        assert!((v - nearby).norm() < 0.05, "{v} {nearby}");
    }

    #[test]
    fn first_zero_on_the_critical_line() {
        let v = zeta_continuation(Complex64::new(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(v.norm() < 1e-9, "{v}");
    }

    #[test]
    fn beta_values() {
        let b = |x: f64| dirichlet_beta(Complex64::new(x, 0.0));
        assert!(close(b(1.0), Complex64::new(PI / 4.0, 0.0), 1e-12));
        assert!(close(b(2.0), Complex64::new(0.915_965_594_177_219, 0.0), 1e-12));
        assert!(close(b(0.0), Complex64::new(0.5, 0.0), 1e-10));
        assert!(close(b(-1.0), Complex64::new(0.0, 0.0), 1e-10));
        assert!(close(b(-2.0), Complex64::new(-0.5, 0.0), 1e-10));
    }

    #[test]
    fn closed_forms() {
        let s = Complex64::new(2.0, 0.0);
        let z2 = PI * PI / 6.0;
        let p1 = ArithmeticModel::projective(1);
        assert!(close(l_closed_form(&p1, Parity::Even, s).unwrap(), Complex64::new(z2 * z2, 0.0), 1e-10));
        assert_eq!(l_closed_form(&p1, Parity::Odd, s).unwrap(), Complex64::new(1.0, 0.0));
        let s3 = Complex64::new(3.0, 0.0);
        assert!(close(classical_l_closed_form(&p1, s3).unwrap(), zeta_continuation(s3).unwrap() * z2, 1e-10));
        let e = ArithmeticModel::elliptic([0, 0, 0, 1, 0], &[2]).unwrap();
        assert!(matches!(l_closed_form(&e, Parity::Even, s), Err(Error::Unsupported(_))));
    }
}
