use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::WeightDecomposition;
use crate::arith::{foreign_primes, is_integral, prime_support, Rational};
use crate::report::{Check, Verdict};
use crate::series::{roots_with_moduli, Poly};

/// Sample points for functional equations, away from the lines where poles sit for small q.
pub const DEFAULT_SAMPLES: [Complex64; 10] = [
    Complex64::new(0.3, 0.0),
    Complex64::new(1.2, 0.7),
    Complex64::new(-0.4, 0.0),
    Complex64::new(0.8, 0.0),
    Complex64::new(1.3, 0.2),
    Complex64::new(2.1, -0.5),
    Complex64::new(-1.1, 0.3),
    Complex64::new(0.45, 1.7),
    Complex64::new(3.2, 0.0),
    Complex64::new(-0.7, -0.9),
];

#[derive(Debug, Clone, Serialize)]
pub struct WeilWeight {
    pub w: usize,
    pub betti: usize,
    pub integral: bool,
    /// Largest `| |λ| / q^{w/2} − 1 |` over the inverse roots.
    pub max_deviation: f64,
    pub moduli: Vec<f64>,
    /// Inverse root attaining the largest deviation, as `[re, im]`.
    pub worst_root: Option<[f64; 2]>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub tol: f64,
    pub digits: u32,
    pub weights: Vec<WeilWeight>,
    pub verdict: Verdict,
}

impl WeilReport {
    pub fn to_check(&self) -> Check {
        Check::new("weil", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// Modulus and integrality check of every weight factor.
pub fn weil_check(dec: &WeightDecomposition, tol: f64, digits: u32) -> WeilReport {
    let target_base = Rational::from_integer(BigInt::from(dec.q.q_big()));
    let weights: Vec<WeilWeight> = dec
        .factors
        .iter()
        .filter(|f| f.betti() > 0)
        .map(|f| {
            let integral = f.poly.is_integral();
            let target = num_traits::pow(target_base.clone(), f.w);
            match roots_with_moduli(&f.eigen_poly(), digits) {
                Ok(cluster) => {
                    let mut max_deviation: f64 = 0.0;
                    let mut worst_root = None;
                    let mut moduli = Vec::new();
                    for r in &cluster.roots {
                        let dev = r.relative_modulus_deviation(&target, cluster.bits);
                        moduli.push(r.modulus);
                        if worst_root.is_none() || dev > max_deviation {
                            max_deviation = max_deviation.max(dev);
                            worst_root = Some([r.value.re, r.value.im]);
                        }
                    }
                    WeilWeight {
                        w: f.w,
                        betti: f.betti(),
                        integral,
                        max_deviation,
                        moduli,
                        worst_root,
                        verdict: Verdict::from_bool(integral && max_deviation < tol),
                        note: None,
                    }
                }
                Err(e) => WeilWeight {
                    w: f.w,
                    betti: f.betti(),
                    integral,
                    max_deviation: f64::NAN,
                    moduli: Vec::new(),
                    worst_root: None,
                    verdict: if integral { Verdict::Indeterminate } else { Verdict::Fail },
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    let verdict = Verdict::combine(weights.iter().map(|w| w.verdict));
    WeilReport { tol, digits, weights, verdict }
}

#[derive(Debug, Clone, Serialize)]
pub struct LAdicWeight {
    pub w: usize,
    /// Coefficients of `∏ (t − λ)`, low degree first.
    pub eigen_poly: Vec<String>,
    pub integral: bool,
    pub constant_term: String,
    pub prime_support: Vec<String>,
    pub foreign_primes: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct LAdicReport {
    pub p: u64,
    pub weights: Vec<LAdicWeight>,
    pub verdict: Verdict,
}

impl LAdicReport {
    pub fn to_check(&self) -> Check {
        Check::new("ladic", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// Integrality of `∏ (t − λ)` and the prime support of its constant term `± ∏ λ`.
pub(crate) fn ladic_weight(w: usize, eigen: &Poly, p: u64) -> LAdicWeight {
    let integral = eigen.is_integral() && eigen.lead() == Rational::from_integer(1.into());
    let c = eigen.constant_term();
    let (support, foreign) = if c.is_zero() || !is_integral(&c) {
        (Vec::new(), vec!["non-integral or zero".to_string()])
    } else {
        let n = c.numer().clone();
        (
            prime_support(&n).iter().map(ToString::to_string).collect(),
            foreign_primes(&n, p).iter().map(ToString::to_string).collect(),
        )
    };
    let verdict = Verdict::from_bool(integral && foreign.is_empty());
    LAdicWeight {
        w,
        eigen_poly: eigen.coeff_strings(),
        integral,
        constant_term: c.to_string(),
        prime_support: support,
        foreign_primes: foreign,
        verdict,
    }
}

pub fn l_adic_check(dec: &WeightDecomposition) -> LAdicReport {
    let p = dec.q.p;
    let weights: Vec<LAdicWeight> =
        dec.factors.iter().filter(|f| f.betti() > 0).map(|f| ladic_weight(f.w, &f.eigen_poly(), p)).collect();
    let verdict = Verdict::combine(weights.iter().map(|w| w.verdict));
    LAdicReport { p, weights, verdict }
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    pub equation: String,
    /// The common value of LHS/RHS, `+1` or `−1`, when one exists.
    pub sign: Option<i8>,
    pub max_residual: f64,
    pub tol: f64,
    pub points: usize,
    pub skipped: Vec<String>,
    pub verdict: Verdict,
}

impl FunctionalReport {
    pub fn to_check(&self, name: &str) -> Check {
        Check::new(name, self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// One side of a functional equation evaluated at `s`; `None` at a pole.
pub(crate) type Side<'a> = Box<dyn Fn(Complex64) -> Option<Complex64> + 'a>;

/// PASS iff `lhs(s) / rhs(s)` equals one common sign `±1` within `tol` at every usable sample.
pub(crate) fn functional_ratio_check(
    equation: &str,
    lhs: Side<'_>,
    rhs: Side<'_>,
    samples: &[Complex64],
    tol: f64,
) -> FunctionalReport {
    let mut sign: Option<i8> = None;
    let mut max_residual: f64 = 0.0;
    let mut skipped = Vec::new();
    let mut consistent = true;
    let mut points = 0;
    for &s in samples {
        let (Some(l), Some(r)) = (lhs(s), rhs(s)) else {
            skipped.push(format!("s = {s}: pole"));
            continue;
        };
        if !(l.is_finite() && r.is_finite()) || r.norm() == 0.0 {
            skipped.push(format!("s = {s}: not finite"));
            continue;
        }
        let ratio = l / r;
        let here: i8 = if ratio.re >= 0.0 { 1 } else { -1 };
        max_residual = max_residual.max((ratio - f64::from(here)).norm());
        match sign {
            None => sign = Some(here),
            Some(prev) if prev != here => consistent = false,
            _ => {}
        }
        points += 1;
    }
    let verdict = if points == 0 {
        Verdict::Indeterminate
    } else {
        Verdict::from_bool(consistent && max_residual < tol)
    };
    FunctionalReport {
        equation: equation.to_string(),
        sign: if consistent { sign } else { None },
        max_residual,
        tol,
        points,
        skipped,
        verdict,
    }
}

/// `q^{−s}` as a complex number.
pub(crate) fn q_pow_neg(q: f64, s: Complex64) -> Complex64 {
    (-s * q.ln()).exp()
}

/// `ζ(X;s) = ± q^{χs} · q^{−χd/2} · ζ(X; d − s)`.
pub fn hasse_weil_functional_check(dec: &WeightDecomposition, samples: &[Complex64], tol: f64) -> FunctionalReport {
    let z = dec.zeta();
    let q = dec.q.q_f64();
    let chi = dec.euler_characteristic() as f64;
    let d = dec.d as f64;
    let lhs = {
        let z = z.clone();
        Box::new(move |s: Complex64| z.eval_c(q_pow_neg(q, s))) as Side
    };
    let rhs = Box::new(move |s: Complex64| {
        let factor = q_pow_neg(q, -s * chi) * q.powf(-chi * d / 2.0);
        z.eval_c(q_pow_neg(q, Complex64::new(d, 0.0) - s)).map(|v| factor * v)
    }) as Side;
    functional_ratio_check("zeta(s) = ± q^(chi s) q^(-chi d/2) zeta(d - s)", lhs, rhs, samples, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimePower;

    fn dec(p: u64, polys: &[&[i64]]) -> WeightDecomposition {
        WeightDecomposition::from_polys(
            PrimePower::prime(p).unwrap(),
            polys.iter().map(|c| Poly::from_i64(c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn weil_examples() {
        let e = dec(5, &[&[1, -1], &[1, -2, 5], &[1, -5]]);
        let r = weil_check(&e, 1e-9, 50);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.weights.iter().all(|w| w.max_deviation < 1e-30), "{r:?}");
        let bad = dec(5, &[&[1, -1], &[1, -6], &[1, -5]]);
        let r = weil_check(&bad, 1e-9, 50);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.weights[1].verdict, Verdict::Fail);
        assert_eq!(r.weights[1].worst_root, Some([6.0, 0.0]));
        let p2 = dec(3, &[&[1, -1], &[1], &[1, -3], &[1], &[1, -9]]);
        let r = weil_check(&p2, 1e-9, 50);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.weights.iter().all(|w| w.max_deviation == 0.0));
    }

    #[test]
    fn ladic_examples() {
        let e = dec(5, &[&[1, -1], &[1, -2, 5], &[1, -5]]);
        let r = l_adic_check(&e);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.weights[1].eigen_poly, vec!["5", "-2", "1"]);
        assert_eq!(r.weights[1].prime_support, vec!["5"]);
        let p2 = dec(3, &[&[1, -1], &[1], &[1, -3], &[1], &[1, -9]]);
        let r = l_adic_check(&p2);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.weights[1].constant_term, "-3");
        // eigenvalue polynomial t^2 - t + 6 at p = 5
        let bad = dec(5, &[&[1, -1], &[1, -1, 6], &[1, -5]]);
        let r = l_adic_check(&bad);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.weights[1].foreign_primes, vec!["2", "3"]);
    }

    #[test]
    fn functional_examples() {
        let p2 = dec(3, &[&[1, -1], &[1], &[1, -3], &[1], &[1, -9]]);
        let samples = [Complex64::new(0.3, 0.0), Complex64::new(1.2, 0.7), Complex64::new(-0.4, 0.0)];
        let r = hasse_weil_functional_check(&p2, &samples, 1e-9);
        assert_eq!((r.verdict, r.sign), (Verdict::Pass, Some(-1)));
        let e = dec(5, &[&[1, -1], &[1, -2, 5], &[1, -5]]);
        let r = hasse_weil_functional_check(&e, &DEFAULT_SAMPLES, 1e-9);
        assert_eq!(r.verdict, Verdict::Pass);
        let z = dec(3, &[&[1, 0, -1]]);
        let r = hasse_weil_functional_check(&z, &DEFAULT_SAMPLES, 1e-9);
        assert_eq!((r.verdict, r.sign), (Verdict::Pass, Some(-1)));
        // at s = 0 both sides of P^1 over F_3 have a pole
        let p1 = dec(3, &[&[1, -1], &[1], &[1, -3]]);
        let r = hasse_weil_functional_check(&p1, &[Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)], 1e-9);
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.verdict, Verdict::Pass);
    }
}
