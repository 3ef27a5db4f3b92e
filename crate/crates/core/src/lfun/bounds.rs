//! Uniform trace bounds `|#_n| ≤ χ·p^{e·n/2}` over a range of primes, with the partial product
//! they control.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{euler_product_value, local_factors, prime_tail_bound, ArithmeticModel, BadPrimePolicy, EulerOptions, FiberStatus};
use crate::arith::{primes_up_to, rat, Rational};
use crate::error::{invalid, Result};
use crate::ncspec::Parity;
use crate::report::{Check, Verdict};
use crate::series::{to_f64, Poly};
use crate::zeta::power_sums;

#[derive(Debug, Clone, Serialize)]
pub struct PrimeMaximum {
    pub p: u64,
    /// `χ` at `p`: the number of eigenvalues.
    pub dim: usize,
    /// `max_n |#_n| / (χ·p^{e·n/2})`.
    pub max_ratio: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceViolation {
    pub p: u64,
    pub n: usize,
    pub trace: String,
    /// `χ·p^{e·n/2}`, printed as `χ·sqrt(p^{e·n})` when irrational.
    pub bound: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartialProduct {
    pub s: f64,
    pub value: f64,
    pub log_tail_bound: f64,
    pub value_tail_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsCertificate {
    pub subject: String,
    /// The bound is `C·p^{e·n/2}`: `e = 0` for `F₀`, `1` for `F₁`, `w` for weight `w`.
    pub exponent: u32,
    /// `C`: the largest `χ` seen, which bounds every `χ` on the covered range.
    pub constant: u64,
    pub n_cutoff: usize,
    pub prime_cutoff: u64,
    pub primes_covered: usize,
    pub excluded: Vec<u64>,
    pub per_prime: Vec<PrimeMaximum>,
    pub violations: Vec<TraceViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_product: Option<PartialProduct>,
    pub verdict: Verdict,
}

impl BoundsCertificate {
    pub fn to_check(&self, name: &str) -> Check {
        Check::new(name, self.verdict, serde_json::to_value(self).expect("serializable"))
    }

    /// Largest `max_ratio` over all primes.
    pub fn worst_ratio(&self) -> f64 {
        self.per_prime.iter().map(|m| m.max_ratio).fold(0.0, f64::max)
    }
}

fn bound_string(chi: usize, p: u64, e: u32, n: usize) -> String {
    let k = e as usize * n;
    if k.is_multiple_of(2) {
        format!("{chi}·{p}^{}", k / 2)
    } else {
        format!("{chi}·{p}^({k}/2)")
    }
}

/// Checks `#_n² ≤ χ²·p^{e·n}` exactly for `n ≤ n_cutoff` on each `(p, det(1 − tF))`.
pub fn certify_factors(subject: &str, e: u32, factors: &[(u64, Poly)], n_cutoff: usize) -> BoundsCertificate {
    let mut per_prime = Vec::with_capacity(factors.len());
    let mut violations = Vec::new();
    let mut constant = 0u64;
    for (p, det) in factors {
        let chi = det.deg();
        constant = constant.max(chi as u64);
        let mut max_ratio = 0.0f64;
        let mut count = 0;
        if chi > 0 {
            let traces = power_sums(det, n_cutoff);
            for (i, tr) in traces.iter().enumerate() {
                let n = i + 1;
                let limit: Rational = rat(chi as i64 * chi as i64) * num_traits::pow(rat(*p as i64), e as usize * n);
                let sq = tr * tr;
                if sq > limit {
                    count += 1;
                    violations.push(TraceViolation { p: *p, n, trace: tr.to_string(), bound: bound_string(chi, *p, e, n) });
                }
                let scale = chi as f64 * (*p as f64).powf(e as f64 * n as f64 / 2.0);
                let ratio = if tr.is_zero() { 0.0 } else { to_f64(&tr.abs()) / scale };
                max_ratio = max_ratio.max(ratio);
            }
        }
        per_prime.push(PrimeMaximum { p: *p, dim: chi, max_ratio, violations: count });
    }
    let verdict = Verdict::from_bool(violations.is_empty());
    BoundsCertificate {
        subject: subject.into(),
        exponent: e,
        constant,
        n_cutoff,
        prime_cutoff: factors.iter().map(|f| f.0).max().unwrap_or(0),
        primes_covered: factors.len(),
        excluded: Vec::new(),
        per_prime,
        violations,
        partial_product: None,
        verdict,
    }
}

/// `|#_{(0,p,n)}| ≤ χ_{(0,p)}` or `|#_{(1,p,n)}| ≤ χ_{(1,p)}·p^{n/2}` for `p ≤ P`, `n ≤ n_cutoff`,
/// with the partial product at `s = 2` (even) or `s = 5/2` (odd).
pub fn bounds_certificate(
    model: &ArithmeticModel,
    parity: Parity,
    prime_cutoff: u64,
    n_cutoff: usize,
    policy: BadPrimePolicy,
) -> Result<BoundsCertificate> {
    if n_cutoff == 0 {
        return invalid("the trace range needs n ≥ 1");
    }
    let primes = primes_up_to(prime_cutoff);
    let local = local_factors(model, &primes, policy)?;
    let excluded: Vec<u64> = local.iter().filter(|f| f.status == FiberStatus::Excluded).map(|f| f.p).collect();
    let factors: Vec<(u64, Poly)> = local
        .iter()
        .filter(|f| f.status != FiberStatus::Excluded)
        .map(|f| (f.p, f.det_poly(parity)))
        .collect();
    let e = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let mut cert = certify_factors(&format!("{} ({parity:?})", model.name), e, &factors, n_cutoff);
    cert.prime_cutoff = prime_cutoff;
    cert.excluded = excluded;
    let s = super::convergence_abscissa(parity) + 1.0;
    let opts = EulerOptions { policy, ..EulerOptions::default() };
    let product = euler_product_value(model, parity, Complex64::new(s, 0.0), prime_cutoff, &opts)?;
    cert.partial_product = Some(PartialProduct {
        s,
        value: product.value.re,
        log_tail_bound: product.log_tail_bound,
        value_tail_bound: product.value_tail_bound,
    });
    Ok(cert)
}

/// `|#_{(w,p,n)}| ≤ C·p^{w·n/2}` from the unshifted weight-`w` factors, with the partial `L_w`
/// product at `s = w/2 + 3/2`.
pub fn serre_bounds_certificate(
    model: &ArithmeticModel,
    w: usize,
    prime_cutoff: u64,
    n_cutoff: usize,
    policy: BadPrimePolicy,
) -> Result<BoundsCertificate> {
    if n_cutoff == 0 {
        return invalid("the trace range needs n ≥ 1");
    }
    if w >= model.betti.len() {
        return invalid(format!("weight {w} is above 2·dim = {}", model.betti.len() - 1));
    }
    let primes = primes_up_to(prime_cutoff);
    let local = local_factors(model, &primes, policy)?;
    let excluded: Vec<u64> = local.iter().filter(|f| f.status == FiberStatus::Excluded).map(|f| f.p).collect();
    let factors: Vec<(u64, Poly)> = local
        .iter()
        .filter(|f| f.status != FiberStatus::Excluded)
        .map(|f| (f.p, f.weight_poly(w)))
        .collect();
    let mut cert = certify_factors(&format!("{} (weight {w})", model.name), w as u32, &factors, n_cutoff);
    cert.prime_cutoff = prime_cutoff;
    cert.excluded = excluded;
    let s = w as f64 / 2.0 + 1.5;
    let value: f64 = factors.iter().map(|(p, f)| 1.0 / f.eval_c(Complex64::new((*p as f64).powf(-s), 0.0)).re).product();
    let c = cert.constant.max(model.betti[w]);
    let log_tail_bound = c as f64 * prime_tail_bound(prime_cutoff, s - w as f64 / 2.0);
    cert.partial_product =
        Some(PartialProduct { s, value, log_tail_bound, value_tail_bound: value.abs() * log_tail_bound.exp_m1() });
    Ok(cert)
}
