use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;

use super::mp::{self, bits_for_digits, Ctx, Float, MpComplex};
use super::poly::Poly;
use crate::arith::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 50;
pub const DEFAULT_RESIDUAL: f64 = 1e-30;
const MAX_ESCALATIONS: usize = 3;

#[derive(Clone, Debug)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    pub modulus: f64,
    pub(crate) hp: MpComplex,
}

impl Root {
    pub fn hp(&self) -> &MpComplex {
        &self.hp
    }

    /// `| |z| / sqrt(target_sq) − 1 |`, computed at working precision.
    pub fn relative_modulus_deviation(&self, target_sq: &Rational, bits: usize) -> f64 {
        let ctx = Ctx::new(bits);
        let ratio = self.hp.norm_sqr() / ctx.rational(target_sq);
        mp::to_f64(&mp::abs(&(ratio.sqrt() - ctx.small(1))))
    }
}

/// All complex roots of a polynomial with exact multiplicities.
#[derive(Clone, Debug)]
pub struct RootCluster {
    pub poly: Poly,
    pub precision: u32,
    pub bits: usize,
    pub roots: Vec<Root>,
    /// Largest relative residual `|S(z)| / Σ|c_i||z|^i` over the square-free parts.
    pub max_residual: f64,
}

impl RootCluster {
    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<&Root> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r, r.multiplicity)).collect()
    }
}

pub fn roots_with_moduli(p: &Poly, digits: u32) -> Result<RootCluster> {
    roots_with_options(p, digits, DEFAULT_RESIDUAL)
}

pub fn roots_with_options(p: &Poly, digits: u32, residual_tol: f64) -> Result<RootCluster> {
    if p.deg() == 0 {
        return Err(Error::Invalid("root extraction needs degree at least 1".into()));
    }
    let parts = p.squarefree_decomposition();
    let mut bits = bits_for_digits(digits) + 4 * p.deg();
    let mut last_err = None;
    for _ in 0..=MAX_ESCALATIONS {
        match attempt(p, &parts, digits, bits, residual_tol) {
            Ok(c) => return Ok(c),
            Err(e) => last_err = Some(e),
        }
        bits *= 2;
    }
    Err(last_err.expect("at least one attempt"))
}

fn attempt(
    p: &Poly,
    parts: &[(Poly, usize)],
    digits: u32,
    bits: usize,
    residual_tol: f64,
) -> Result<RootCluster> {
    let ctx = Ctx::new(bits);
    let mut roots = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (s, k) in parts {
        let ints = s.primitive();
        let deg = ints.len() - 1;
        let bound = residual_tol.max(10f64.powi(-(digits as i32 - deg as i32 - 4)));
        let found = simple_roots(&ints, &ctx)?;
        let found = enforce_conjugates(found, &ctx, digits)?;
        for z in found {
            let res = relative_residual(&ints, &z, &ctx);
            if !(res <= bound) {
                return Err(Error::Roots(format!(
                    "residual {res:e} above {bound:e} for a root of {s}"
                )));
            }
            max_residual = max_residual.max(res);
            let value = z.to_c64();
            roots.push(Root { value, multiplicity: *k, modulus: value.norm(), hp: z });
        }
    }
    roots.sort_by(|a, b| {
        a.modulus
            .total_cmp(&b.modulus)
            .then(a.value.arg().total_cmp(&b.value.arg()))
    });
    Ok(RootCluster { poly: p.clone(), precision: digits, bits, roots, max_residual })
}

fn horner(c: &[Float], z: &MpComplex, ctx: &Ctx) -> (MpComplex, MpComplex) {
    let mut val = ctx.real(ctx.zero());
    let mut der = ctx.real(ctx.zero());
    for a in c.iter().rev() {
        der = der.mul(z).add(&val);
        val = val.mul(z);
        val.re = &val.re + a;
    }
    (val, der)
}

fn relative_residual(ints: &[BigInt], z: &MpComplex, ctx: &Ctx) -> f64 {
    let c: Vec<Float> = ints.iter().map(|x| ctx.int(x)).collect();
    let (val, _) = horner(&c, z, ctx);
    let r = z.abs();
    let mut scale = ctx.zero();
    for a in c.iter().rev() {
        scale = &scale * &r + mp::abs(a);
    }
    mp::to_f64(&(val.abs() / scale))
}

fn simple_roots(ints: &[BigInt], ctx: &Ctx) -> Result<Vec<MpComplex>> {
    let deg = ints.len() - 1;
    match deg {
        1 => {
            let r = -(ctx.int(&ints[0]) / ctx.int(&ints[1]));
            Ok(vec![ctx.real(r)])
        }
        2 => Ok(quadratic(ints, ctx)),
        _ => aberth(ints, ctx),
    }
}

/// Stable quadratic formula: `q = −(b + sgn(b)·√Δ)/2`, roots `q/a` and `c/q`.
fn quadratic(ints: &[BigInt], ctx: &Ctx) -> Vec<MpComplex> {
    let (c, b, a) = (ctx.int(&ints[0]), ctx.int(&ints[1]), ctx.int(&ints[2]));
    let disc = &b * &b - ctx.small(4) * &a * &c;
    let sq = ctx.real(disc).sqrt(ctx);
    let bb = ctx.real(b.clone());
    let sum = if ints[1].is_negative() { bb.sub(&sq) } else { bb.add(&sq) };
    let q = sum.scale(&(ctx.small(-1) / ctx.small(2)));
    let r1 = q.scale(&(ctx.small(1) / &a));
    let r2 = ctx.real(c).div(&q);
    vec![r1, r2]
}

fn companion_seeds(ints: &[BigInt]) -> Vec<Complex64> {
    let n = ints.len() - 1;
    let lead = poly_f64(&ints[n]);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -poly_f64(&ints[i]) / lead;
    }
    let eig = m.complex_eigenvalues();
    let mut seeds: Vec<Complex64> = eig.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    // separate coincident seeds so the simultaneous iteration is well defined
    for i in 0..n {
        for j in 0..i {
            if (seeds[i] - seeds[j]).norm() < 1e-10 * (1.0 + seeds[j].norm()) || !seeds[i].is_finite() {
                let bump = Complex64::new(0.37, 0.91) * 1e-6 * (i as f64 + 1.0) * (1.0 + seeds[j].norm());
                seeds[i] = if seeds[i].is_finite() { seeds[i] + bump } else { bump };
            }
        }
    }
    seeds
}

fn poly_f64(x: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY)
}

/// Aberth–Ehrlich iteration seeded by companion-matrix eigenvalues.
fn aberth(ints: &[BigInt], ctx: &Ctx) -> Result<Vec<MpComplex>> {
    let c: Vec<Float> = ints.iter().map(|x| ctx.int(x)).collect();
    let mut z: Vec<MpComplex> = companion_seeds(ints).into_iter().map(|s| ctx.complex(s)).collect();
    let n = z.len();
    let tol = ctx.pow2_neg(ctx.bits.saturating_sub(16));
    let one = ctx.real(ctx.small(1));
    for _ in 0..500 {
        let mut converged = true;
        let mut next = z.clone();
        for i in 0..n {
            let (val, der) = horner(&c, &z[i], ctx);
            if val.is_zero() {
                continue;
            }
            if der.is_zero() {
                return Err(Error::Roots("vanishing derivative during refinement".into()));
            }
            let ratio = val.div(&der);
            let mut sum = ctx.real(ctx.zero());
            for j in 0..n {
                if j != i {
                    let diff = z[i].sub(&z[j]);
                    if diff.is_zero() {
                        return Err(Error::Roots("coincident iterates".into()));
                    }
                    sum = sum.add(&diff.recip());
                }
            }
            let w = ratio.div(&one.sub(&ratio.mul(&sum)));
            let scale = &z[i].abs() + ctx.small(1);
            if w.abs() > &tol * &scale {
                converged = false;
            }
            next[i] = z[i].sub(&w);
        }
        z = next;
        if converged {
            return Ok(z);
        }
    }
    Err(Error::Roots("simultaneous iteration did not converge".into()))
}

/// Snaps near-real roots onto the axis and pairs the rest with exact conjugates.
fn enforce_conjugates(roots: Vec<MpComplex>, ctx: &Ctx, digits: u32) -> Result<Vec<MpComplex>> {
    let eps = 10f64.powi(-(digits as i32) / 2);
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in roots {
        let c = z.to_c64();
        if c.im.abs() <= eps * (1.0 + c.norm()) {
            real.push(MpComplex { re: z.re, im: ctx.zero() });
        } else if c.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::Roots("non-real roots do not pair into conjugates".into()));
    }
    let mut out = real;
    let mut used = vec![false; lower.len()];
    for u in upper {
        let target = u.conj().to_c64();
        let best = (0..lower.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (lower[a].to_c64() - target).norm();
                let db = (lower[b].to_c64() - target).norm();
                da.total_cmp(&db)
            })
            .expect("equal counts");
        used[best] = true;
        out.push(u.conj());
        out.push(u);
    }
    Ok(out)
}

/// Coefficients of `∏ (1 − z·t)` over the given roots, low degree first.
pub(crate) fn expand_inverse_factor(roots: &[&MpComplex], ctx: &Ctx) -> Vec<MpComplex> {
    let mut coeffs = vec![ctx.real(ctx.small(1))];
    for z in roots {
        let mut next = coeffs.clone();
        next.push(ctx.real(ctx.zero()));
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].sub(&c.mul(z));
        }
        coeffs = next;
    }
    coeffs
}

/// Nearest integer of a float, with the rounding distance.
pub(crate) fn round_float(x: &Float) -> (BigInt, f64) {
    let r = x.round();
    let dist = mp::to_f64(&mp::abs(&(x - &r)));
    let n: BigInt = r.to_int().value().to_string().parse().expect("integer");
    (n, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn linear_root() {
        let c = roots_with_moduli(&Poly::from_i64(&[1, -4]), 50).unwrap();
        assert_eq!(c.roots.len(), 1);
        assert_eq!(c.roots[0].value, Complex64::new(0.25, 0.0));
        assert_eq!(c.roots[0].modulus, 0.25);
    }

    #[test]
    fn quadratic_pair() {
        let c = roots_with_moduli(&Poly::from_i64(&[1, -2, 5]), 50).unwrap();
        assert_eq!(c.roots.len(), 2);
        for r in &c.roots {
            assert!((r.value.re - 0.2).abs() < 1e-15);
            assert!((r.value.im.abs() - 0.4).abs() < 1e-15);
            assert!((r.modulus - 0.4472135954999579).abs() < 1e-15);
            assert!(r.relative_modulus_deviation(&ratio(1, 5), c.bits) < 1e-40);
        }
        assert_eq!(c.roots[0].value, c.roots[1].value.conj());
    }

    #[test]
    fn repeated_root() {
        let p = Poly::from_i64(&[1, -1]).pow(3);
        let c = roots_with_moduli(&p, 50).unwrap();
        assert_eq!(c.roots.len(), 1);
        assert_eq!(c.roots[0].multiplicity, 3);
        assert_eq!(c.roots[0].value, Complex64::new(1.0, 0.0));
    }

    fn rebuild(c: &RootCluster) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in c.expanded() {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r.value;
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn higher_degree_rebuilds_monic_polynomial() {
        // (t^2 - 2t + 5)(t^3 - 7)(t + 3)^2 (t^2 + 1)
        let p = &(&(&Poly::from_i64(&[5, -2, 1]) * &Poly::from_i64(&[-7, 0, 0, 1]))
            * &Poly::from_i64(&[3, 1]).pow(2))
            * &Poly::from_i64(&[1, 0, 1]);
        let c = roots_with_moduli(&p, 50).unwrap();
        assert_eq!(c.expanded().len(), 9);
        let monic = p.monic();
        let rebuilt = rebuild(&c);
        for (i, z) in rebuilt.iter().enumerate() {
            let want = super::super::poly::to_f64(&monic.coeff(i));
            assert!((z.re - want).abs() < 1e-9 * (1.0 + want.abs()), "coeff {i}: {z} vs {want}");
            assert!(z.im.abs() < 1e-9);
        }
        assert!(c.max_residual < 1e-30);
        let cube = c.roots.iter().filter(|r| (r.modulus - 7f64.cbrt()).abs() < 1e-12).count();
        assert_eq!(cube, 3);
        let _ = rat(0);
    }

    #[test]
    fn constant_rejected() {
        assert!(roots_with_moduli(&Poly::one(), 50).is_err());
    }
}
