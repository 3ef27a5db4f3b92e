use num_bigint::BigInt;
use num_traits::One;

use super::{WeightDecomposition, WeightFactor};
use crate::arith::{PrimePower, Rational};
use crate::error::{invalid, Error, Result};
use crate::series::mp::{self, Ctx, MpComplex};
use crate::series::{expand_inverse_factor, round_float, roots_with_moduli, Poly, RationalFunction, DEFAULT_DIGITS};

const SEPARATION_FAILED: &str = "Weil-type separation failed: possible non-smooth input";

#[derive(Debug, Clone)]
pub struct FactorOptions {
    pub digits: u32,
    /// Relative modulus deviation that assigns an inverse root to a weight.
    pub cluster_tol: f64,
    /// Largest distance to the nearest integer accepted when rounding a rebuilt factor.
    pub rounding_tol: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { digits: DEFAULT_DIGITS, cluster_tol: 1e-6, rounding_tol: 1e-4 }
    }
}

/// `q^{w/2}` when it is rational.
fn rung_value(q: PrimePower, w: usize) -> Option<Rational> {
    if w.is_multiple_of(2) {
        return Some(Rational::from_integer(BigInt::from(q.q_big().pow(w as u32 / 2))));
    }
    q.sqrt().map(|s| Rational::from_integer(BigInt::from(s.pow(w as u32))))
}

/// Splits `Z = ∏_{w odd} P_w / ∏_{w even} P_w` into integer factors by the modulus of the
/// inverse roots: weight `w` owns the inverse roots of absolute value `q^{w/2}`.
///
/// Linear factors `1 ∓ q^{w/2} t` are removed exactly first; the remaining roots are
/// located numerically, grouped by weight, multiplied back and rounded. The rounded
/// product must reproduce `Z` exactly.
pub fn weight_factorize(
    z: &RationalFunction,
    q: PrimePower,
    d: usize,
    betti: Option<&[u64]>,
    opts: &FactorOptions,
) -> Result<WeightDecomposition> {
    let rungs = 2 * d + 1;
    if let Some(b) = betti {
        if b.len() != rungs {
            return invalid(format!("dimension {d} needs {rungs} Betti numbers, got {}", b.len()));
        }
        let odd: u64 = b.iter().skip(1).step_by(2).sum();
        let even: u64 = b.iter().step_by(2).sum();
        if odd as usize != z.num().deg() || even as usize != z.den().deg() {
            return invalid(format!(
                "Betti numbers give degrees ({odd}, {even}) but the zeta function has ({}, {})",
                z.num().deg(),
                z.den().deg()
            ));
        }
    }
    let mut polys = vec![Poly::one(); rungs];
    for (side, parity) in [(z.num(), 1), (z.den(), 0)] {
        let rest = split_exact(side, q, d, parity, &mut polys);
        if rest.deg() > 0 {
            split_numeric(&rest, q, d, parity, opts, &mut polys)?;
        }
    }
    let dec = WeightDecomposition {
        d,
        q,
        factors: polys.into_iter().enumerate().map(|(w, poly)| WeightFactor { w, poly }).collect(),
    };
    if let Some(b) = betti {
        for (w, (&want, got)) in b.iter().zip(dec.betti()).enumerate() {
            if want as usize != got {
                return Err(Error::Separation(format!(
                    "{SEPARATION_FAILED}: weight {w} received {got} inverse roots, Betti number is {want}"
                )));
            }
        }
    }
    if dec.zeta() != *z {
        return Err(Error::Separation(format!(
            "{SEPARATION_FAILED}: the rounded factors do not reproduce the zeta function"
        )));
    }
    Ok(dec)
}

/// Divides out `1 ∓ q^{w/2} t` for every rung of the given parity where that is rational.
fn split_exact(side: &Poly, q: PrimePower, d: usize, parity: usize, polys: &mut [Poly]) -> Poly {
    let mut rest = side.clone();
    for w in (parity..=2 * d).step_by(2) {
        let Some(v) = rung_value(q, w) else { continue };
        for c in [v.clone(), -v] {
            let f = Poly::one_minus(c);
            while rest.deg() > 0 {
                match rest.exact_div(&f) {
                    Some(r) => {
                        rest = r;
                        polys[w] = &polys[w] * &f;
                    }
                    None => break,
                }
            }
        }
    }
    rest
}

fn split_numeric(
    rest: &Poly,
    q: PrimePower,
    d: usize,
    parity: usize,
    opts: &FactorOptions,
    polys: &mut [Poly],
) -> Result<()> {
    let cluster = roots_with_moduli(rest, opts.digits)?;
    let ctx = Ctx::new(cluster.bits);
    let q_hp = ctx.int(&BigInt::from(q.q_big()));
    let mut groups: Vec<Vec<MpComplex>> = vec![Vec::new(); 2 * d + 1];
    for root in cluster.expanded() {
        let lambda = root.hp().recip();
        // |λ|² / q^w for w = 0, 1, ...; the relative deviation is |sqrt(that) − 1|
        let mut ratio = lambda.norm_sqr();
        let mut hits = Vec::new();
        let mut near = Vec::new();
        for w in 0..=2 * d {
            let dev = mp::to_f64(&mp::abs(&(ratio.clone().sqrt() - ctx.small(1))));
            if dev < opts.cluster_tol {
                hits.push(w);
            }
            if dev < 2.0 * opts.cluster_tol {
                near.push(w);
            }
            ratio /= &q_hp;
        }
        if near.len() > 1 {
            return Err(Error::Separation(format!(
                "{SEPARATION_FAILED}: inverse root {} is ambiguous between weights {near:?}",
                fmt_c(&lambda)
            )));
        }
        match hits.first() {
            Some(&w) if w % 2 == parity => groups[w].push(lambda),
            Some(&w) => {
                return Err(Error::Separation(format!(
                    "{SEPARATION_FAILED}: inverse root {} has the modulus of weight {w} but sits in the {}",
                    fmt_c(&lambda),
                    if parity == 1 { "numerator" } else { "denominator" }
                )))
            }
            None => {
                return Err(Error::Separation(format!(
                    "{SEPARATION_FAILED}: inverse root {} of modulus {:.6} matches no weight",
                    fmt_c(&lambda),
                    lambda.to_c64().norm()
                )))
            }
        }
    }
    for (w, group) in groups.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let refs: Vec<&MpComplex> = group.iter().collect();
        let coeffs = expand_inverse_factor(&refs, &ctx);
        let mut ints = Vec::with_capacity(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            let (n, dist) = round_float(&c.re);
            let im = mp::to_f64(&mp::abs(&c.im));
            if dist > opts.rounding_tol || im > opts.rounding_tol {
                return Err(Error::Separation(format!(
                    "{SEPARATION_FAILED}: coefficient {i} of the weight-{w} factor is {:.6}{:+.6}i, not an integer",
                    mp::to_f64(&c.re),
                    mp::to_f64(&c.im)
                )));
            }
            ints.push(n);
        }
        if !ints[0].is_one() {
            return Err(Error::Separation(format!("{SEPARATION_FAILED}: weight-{w} factor lost its constant term")));
        }
        polys[w] = &polys[w] * &Poly::from_bigints(&ints);
    }
    Ok(())
}

fn fmt_c(z: &MpComplex) -> String {
    let c = z.to_c64();
    format!("{:.6}{:+.6}i", c.re, c.im)
}
