use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{PrimePower, Rational};
use crate::error::{invalid, Result};
use crate::report::Verdict;
use crate::series::{roots_with_moduli, Poly, RationalFunction, DEFAULT_DIGITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderMethod {
    Exact,
    Numeric,
}

/// Order of a function of `x = q^{−s}` at `s = z`: positive for zeros, negative for poles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Order {
    pub z: String,
    /// `None` when the numeric match falls in the indeterminate band.
    pub value: Option<i64>,
    pub method: OrderMethod,
    pub verdict: Verdict,
    pub note: String,
}

fn periodicity_note(q: PrimePower) -> String {
    format!("the same order holds at z + 2πik/log({}) for every integer k", q)
}

/// `q^{e}` for an integer exponent, exactly.
fn q_power(q: PrimePower, e: &BigInt) -> Result<Rational> {
    let k = e.abs().to_u32().ok_or_else(|| crate::Error::Invalid("exponent too large".into()))?;
    let v = Rational::from_integer(BigInt::from(q.q_big().pow(k)));
    Ok(if e.is_negative() { v.recip() } else { v })
}

fn exact_mult(f: &RationalFunction, factor: &Poly) -> i64 {
    let m = |p: &Poly| if p.deg() == 0 { 0 } else { p.multiplicity_of(factor) as i64 };
    m(f.num()) - m(f.den())
}

/// `ord_{s=z}` of `f(q^{−s})` for real `z`.
///
/// Integer `z`, and half-integer `z` when `q` is a square, divide exactly by `x − q^{−z}`.
/// Half-integer `z` otherwise divides by `x² − q^{−2z}`, whose two roots share one
/// multiplicity because `f` has rational coefficients. Any other `z` is located among the
/// numeric roots; a root within `tol` (relative) counts, one between `tol` and `10·tol`
/// makes the result indeterminate.
pub fn ord_at(f: &RationalFunction, q: PrimePower, z: &Rational, tol: f64) -> Result<Order> {
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let note = periodicity_note(q);
    let exact = |value: i64| Order {
        z: z.to_string(),
        value: Some(value),
        method: OrderMethod::Exact,
        verdict: Verdict::Pass,
        note: note.clone(),
    };
    if z.denom().is_one() {
        let x0 = q_power(q, &-z.numer())?;
        return Ok(exact(exact_mult(f, &Poly::linear_root(x0))));
    }
    if *z.denom() == BigInt::from(2) {
        let k = z.numer();
        if let Some(root) = q.sqrt() {
            let s = Rational::from_integer(BigInt::from(root));
            let e = k.abs().to_u32().ok_or_else(|| crate::Error::Invalid("exponent too large".into()))?;
            let v = num_traits::pow(s, e as usize);
            let x0 = if k.is_negative() { v } else { v.recip() };
            return Ok(exact(exact_mult(f, &Poly::linear_root(x0))));
        }
        let c = q_power(q, &-k)?;
        let quad = Poly::new(vec![-c, Rational::from_integer(0.into()), Rational::one()]);
        return Ok(exact(exact_mult(f, &quad)));
    }
    let zf = z.to_f64().unwrap_or(f64::NAN);
    let x0 = q.q_f64().powf(-zf);
    let mut value = 0i64;
    let mut marginal = false;
    for (p, sign) in [(f.num(), 1i64), (f.den(), -1i64)] {
        if p.deg() == 0 {
            continue;
        }
        let cluster = roots_with_moduli(p, DEFAULT_DIGITS)?;
        for r in &cluster.roots {
            let rel = (r.value - x0).norm() / x0;
            if rel <= tol {
                value += sign * r.multiplicity as i64;
            } else if rel <= 10.0 * tol {
                marginal = true;
            }
        }
    }
    Ok(if marginal {
        Order {
            z: z.to_string(),
            value: None,
            method: OrderMethod::Numeric,
            verdict: Verdict::Indeterminate,
            note: format!("a root lies within 10x the tolerance of q^(-z) but not within it; {note}"),
        }
    } else {
        Order { z: z.to_string(), value: Some(value), method: OrderMethod::Numeric, verdict: Verdict::Pass, note }
    })
}
