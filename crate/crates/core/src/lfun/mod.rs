//! L-functions over Q assembled from the fibers of an integral model: Euler products,
//! Dirichlet expansions, trace bounds, continuation for closed forms and the order dashboard.

mod bounds;
mod continuation;
mod dashboard;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

pub use bounds::{
    bounds_certificate, certify_factors, serre_bounds_certificate, BoundsCertificate, PartialProduct, PrimeMaximum,
    TraceViolation,
};
pub use continuation::{classical_l_closed_form, dirichlet_beta, gamma, l_closed_form, zeta_continuation, zeta_eta, zeta_reflected};
pub use dashboard::{
    ktheory_decomposition_table, order_dashboard, winding_order, Dashboard, DashboardRow, KTheoryTable, KTheoryTerm,
    WindingOptions, WindingOrder, SNAP_TOLERANCE, WINDING_RADIUS, WINDING_SAMPLES,
};

use crate::arith::{fp_poly, is_prime, primes_up_to, rat, PrimePower, Rational};
use crate::counting::{
    count_series, elliptic_count_prime, parse_variety, Base, CountCache, CountOptions, Kind, VarietySpec,
};
use crate::error::{invalid, Error, Result};
use crate::ncspec::{nc_spectrum_from_weights, nc_weil_check, NcSpectrum, NcWeilReport, Parity};
use crate::series::{Poly, PowerSeries};
use crate::zeta::{power_sums, weight_factorize, zeta_rational, FactorOptions, WeightDecomposition};

/// Default distance kept from the edge of the half-plane of absolute convergence.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// L-functions with a known continuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// Tate pieces `Q(−j)` in weight `2j`, one entry per piece: the classical L-function
    /// is `∏ ζ(s − j)` and the even one is `ζ(s)^k` for `k` pieces.
    MixedTate(Vec<u32>),
    /// `ζ(s)·L(s, χ₄)`, the Dedekind zeta function of `Q(i)`.
    DedekindQi,
    RiemannZeta,
}

/// Rational ranks of K-groups, supplied as fixtures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRanks {
    /// `dim K₀/hom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0_hom: Option<u64>,
    /// `dim K₀⁰`, the homologically trivial classes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0_zero: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k3: Option<u64>,
    /// `dim K_n` for `n ≥ 4`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub higher: BTreeMap<u32, u64>,
}

impl KRanks {
    /// `dim K_n ⊗ Q` for `n ≥ 1`.
    pub fn k(&self, n: u32) -> Option<u64> {
        match n {
            1 => self.k1,
            2 => self.k2,
            3 => self.k3,
            _ => self.higher.get(&n).copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadPrime {
    pub p: u64,
    /// Smooth fiber of another model at `p`, used only when replacements are enabled.
    pub replacement: Option<VarietySpec>,
}

/// An integral family with its bad primes, the Betti numbers of the generic fiber and,
/// when known, a closed form for its L-function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticModel {
    pub name: String,
    pub family: VarietySpec,
    pub bad_primes: Vec<BadPrime>,
    pub betti: Vec<u64>,
    pub closed_form: Option<ClosedForm>,
    pub ranks: KRanks,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    family: String,
    #[serde(default)]
    bad_primes: Vec<BadPrimeFile>,
    betti: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedForm>,
    #[serde(default)]
    ranks: KRanks,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BadPrimeFile {
    p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    replacement: Option<String>,
}

impl ArithmeticModel {
    pub fn new(
        name: impl Into<String>,
        family: VarietySpec,
        bad_primes: Vec<BadPrime>,
        betti: Vec<u64>,
        closed_form: Option<ClosedForm>,
        ranks: KRanks,
    ) -> Result<Self> {
        let model = ArithmeticModel { name: name.into(), family, bad_primes, betti, closed_form, ranks };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.family.base != Base::Integral {
            return invalid("the family of an arithmetic model must be integral");
        }
        let mut seen = Vec::new();
        for b in &self.bad_primes {
            if !is_prime(b.p) {
                return invalid(format!("bad prime {} is not prime", b.p));
            }
            if seen.contains(&b.p) {
                return invalid(format!("bad prime {} listed twice", b.p));
            }
            seen.push(b.p);
            if let Some(r) = &b.replacement {
                if let Base::Finite(q) = r.base {
                    if q.p != b.p || q.r != 1 {
                        return invalid(format!("replacement fiber at {} is defined over F_{q}", b.p));
                    }
                }
            }
        }
        if self.betti.len().is_multiple_of(2) {
            return invalid("need Betti numbers β_0..β_{2d}");
        }
        if let Some(b) = self.family.builtin_betti() {
            if b != self.betti {
                return invalid(format!("Betti numbers {:?} disagree with the family's {:?}", self.betti, b));
            }
        }
        let consistent = match &self.closed_form {
            None => true,
            Some(ClosedForm::MixedTate(shifts)) => self.betti.iter().enumerate().all(|(w, &b)| {
                let pieces = if w % 2 == 0 { shifts.iter().filter(|&&j| 2 * j as usize == w).count() } else { 0 };
                b as usize == pieces
            }) && shifts.iter().all(|&j| (2 * j as usize) < self.betti.len()),
            Some(ClosedForm::DedekindQi) => self.betti == [2],
            Some(ClosedForm::RiemannZeta) => self.betti == [1],
        };
        if !consistent {
            return invalid(format!("closed form {:?} does not match the Betti numbers {:?}", self.closed_form, self.betti));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("model file: {e}")))?;
        let family = parse_variety(&file.family)?;
        let bad_primes = file
            .bad_primes
            .into_iter()
            .map(|b| {
                let replacement = b.replacement.as_deref().map(parse_variety).transpose()?;
                Ok(BadPrime { p: b.p, replacement })
            })
            .collect::<Result<Vec<_>>>()?;
        let name = file.name.unwrap_or_else(|| family.canonical());
        Self::new(name, family, bad_primes, file.betti, file.closed_form, file.ranks)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            name: Some(self.name.clone()),
            family: self.family.canonical(),
            bad_primes: self
                .bad_primes
                .iter()
                .map(|b| BadPrimeFile { p: b.p, replacement: b.replacement.as_ref().map(VarietySpec::canonical) })
                .collect(),
            betti: self.betti.clone(),
            closed_form: self.closed_form.clone(),
            ranks: self.ranks.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// `Spec Z`, whose L-function is the Riemann zeta function.
    pub fn spec_q() -> Self {
        let ranks = KRanks { k0_hom: Some(1), k0_zero: Some(0), k1: Some(0), k2: Some(0), k3: Some(0), ..KRanks::default() };
        let family = VarietySpec::zero_dimensional(vec![-1, 1]).expect("monic");
        Self::new("Spec Q", family, vec![], vec![1], Some(ClosedForm::RiemannZeta), ranks).expect("valid")
    }

    /// `P^n` over `Z`, good everywhere.
    pub fn projective(n: usize) -> Self {
        let betti = (0..=2 * n).map(|w| u64::from(w % 2 == 0)).collect();
        let ranks = KRanks {
            k0_hom: Some(n as u64 + 1),
            k0_zero: Some(0),
            k1: Some(0),
            k2: Some(0),
            k3: Some(0),
            ..KRanks::default()
        };
        let shifts = (0..=n as u32).collect();
        Self::new(format!("P^{n}"), VarietySpec::projective_space(n), vec![], betti, Some(ClosedForm::MixedTate(shifts)), ranks)
            .expect("valid")
    }

    /// `Spec Z[i]`, bad at 2 with the reduced point `x + 1` as replacement.
    pub fn gaussian_integers() -> Self {
        let family = VarietySpec::zero_dimensional(vec![1, 0, 1]).expect("monic");
        let point = VarietySpec::zero_dimensional(vec![1, 1]).expect("monic");
        let ranks = KRanks { k0_hom: Some(1), k0_zero: Some(0), k1: Some(0), k2: Some(0), k3: Some(1), ..KRanks::default() };
        Self::new(
            "Spec Z[i]",
            family,
            vec![BadPrime { p: 2, replacement: Some(point) }],
            vec![2],
            Some(ClosedForm::DedekindQi),
            ranks,
        )
        .expect("valid")
    }

    /// Weierstrass curve with the given bad primes, none replaced.
    pub fn elliptic(a: [i64; 5], bad: &[u64]) -> Result<Self> {
        let bad_primes = bad.iter().map(|&p| BadPrime { p, replacement: None }).collect();
        let family = VarietySpec::elliptic(a);
        Self::new(family.canonical(), family, bad_primes, vec![1, 2, 1], None, KRanks::default())
    }

    pub fn dimension(&self) -> usize {
        (self.betti.len() - 1) / 2
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad_primes.iter().any(|b| b.p == p)
    }

    /// `χ₀` or `χ₁` of the generic fiber: the summed Betti numbers of that parity.
    pub fn chi(&self, parity: Parity) -> u64 {
        self.betti.iter().enumerate().filter(|(w, _)| Parity::of_weight(*w) == parity).map(|(_, b)| b).sum()
    }

    /// The fiber used at `p` under the policy.
    pub fn fiber(&self, p: u64, policy: BadPrimePolicy) -> (FiberStatus, Option<&VarietySpec>) {
        match self.bad_primes.iter().find(|b| b.p == p) {
            None => (FiberStatus::Good, Some(&self.family)),
            Some(b) => match (policy, &b.replacement) {
                (BadPrimePolicy::Replace, Some(r)) => (FiberStatus::Replaced, Some(r)),
                _ => (FiberStatus::Excluded, None),
            },
        }
    }

    fn unhandled_bad_primes(&self, limit: u64, policy: BadPrimePolicy) -> Vec<u64> {
        if policy == BadPrimePolicy::Exclude {
            return Vec::new();
        }
        let mut out: Vec<u64> =
            self.bad_primes.iter().filter(|b| b.p <= limit && b.replacement.is_none()).map(|b| b.p).collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BadPrimePolicy {
    /// Leave bad primes out of every product and say so.
    #[default]
    Exclude,
    /// Use the replacement fiber where one is given.
    Replace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberStatus {
    Good,
    Replaced,
    Excluded,
}

/// The fiber at one prime through its weight factors.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactor {
    pub p: u64,
    pub status: FiberStatus,
    /// `P_0..P_{2d}` of the fiber; `None` for an excluded factor.
    pub weights: Option<WeightDecomposition>,
}

impl LocalFactor {
    /// `P_w(t)`, or `1` when the fiber is excluded or has no weight `w`.
    pub fn weight_poly(&self, w: usize) -> Poly {
        self.weights.as_ref().and_then(|d| d.factors.get(w)).map(|f| f.poly.clone()).unwrap_or_else(Poly::one)
    }

    /// `det(1 − t·F)` for `F₀` or `F₁`: `∏ P_w(q^{−⌊w/2⌋}·t)` over the weights of that parity.
    pub fn det_poly(&self, parity: Parity) -> Poly {
        match &self.weights {
            None => Poly::one(),
            Some(dec) => nc_det_poly(dec, parity),
        }
    }

    /// `χ_{(0,p)}` or `χ_{(1,p)}`.
    pub fn chi(&self, parity: Parity) -> usize {
        self.det_poly(parity).deg()
    }
}

fn nc_det_poly(dec: &WeightDecomposition, parity: Parity) -> Poly {
    let q = dec.q.q_rational();
    dec.factors
        .iter()
        .filter(|f| Parity::of_weight(f.w) == parity)
        .fold(Poly::one(), |acc, f| &acc * &f.poly.subst_scale(&num_traits::pow(q.clone(), f.w / 2).recip()))
}

/// Local factor at `p` from closed forms where the fiber admits one, otherwise by counting.
pub fn local_factor(model: &ArithmeticModel, p: u64, policy: BadPrimePolicy) -> Result<LocalFactor> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let (status, fiber) = model.fiber(p, policy);
    let weights = match fiber {
        None => None,
        Some(spec) => Some(fiber_weights(spec, p, status == FiberStatus::Good, &model.betti)?),
    };
    Ok(LocalFactor { p, status, weights })
}

/// Local factors at each prime, computed in parallel and returned in input order.
pub fn local_factors(model: &ArithmeticModel, primes: &[u64], policy: BadPrimePolicy) -> Result<Vec<LocalFactor>> {
    primes.par_iter().map(|&p| local_factor(model, p, policy)).collect()
}

fn fiber_weights(spec: &VarietySpec, p: u64, generic: bool, betti: &[u64]) -> Result<WeightDecomposition> {
    let q = PrimePower::prime(p)?;
    match closed_weight_polys(spec, p)? {
        Some(polys) => WeightDecomposition::from_polys(q, polys),
        None => {
            let betti = spec.builtin_betti().or_else(|| generic.then(|| betti.to_vec()));
            let betti = betti.ok_or_else(|| Error::Unsupported(format!("no Betti numbers for the fiber at {p}")))?;
            let m = betti.iter().sum::<u64>() as u32 + 1;
            Ok(counted_weights(spec, q, m, &betti, &CountCache::in_memory())?.1)
        }
    }
}

fn counted_weights(
    spec: &VarietySpec,
    q: PrimePower,
    degrees: u32,
    betti: &[u64],
    cache: &CountCache,
) -> Result<(Vec<u128>, WeightDecomposition)> {
    let opts = CountOptions { prefer_closed_form: true, ..CountOptions::default() };
    let counts = count_series(spec, q, degrees, cache, &opts)?.counts;
    let z = zeta_rational(&counts, Some(betti))?;
    let d = (betti.len() - 1) / 2;
    let dec = weight_factorize(&z, q, d, Some(betti), &FactorOptions::default())?;
    Ok((counts, dec))
}

fn closed_weight_polys(spec: &VarietySpec, p: u64) -> Result<Option<Vec<Poly>>> {
    let pi = p as i64;
    Ok(match &spec.kind {
        Kind::ProjectiveSpace { n } => Some(
            (0..=2 * n)
                .map(|w| if w % 2 == 0 { Poly::one_minus(num_traits::pow(rat(pi), w / 2)) } else { Poly::one() })
                .collect(),
        ),
        Kind::EllipticCurve { a } => {
            if (elliptic_discriminant(a) % BigInt::from(p)).is_zero() {
                return Err(Error::Invalid(format!("the curve has bad reduction at {p}")));
            }
            let ap = pi + 1 - elliptic_count_prime(a, p) as i64;
            Some(vec![Poly::from_i64(&[1, -1]), Poly::from_i64(&[1, -ap, pi]), Poly::from_i64(&[1, -pi])])
        }
        Kind::ZeroDimensional { coeffs } => Some(vec![zero_dimensional_poly(coeffs, p)?]),
        Kind::Product { left, right } => match (closed_weight_polys(left, p)?, closed_weight_polys(right, p)?) {
            (Some(a), Some(b)) => Some(tensor_weights(&a, &b)),
            _ => None,
        },
        _ => None,
    })
}

/// `Δ` of the Weierstrass model `[a1, a2, a3, a4, a6]`.
pub fn elliptic_discriminant(a: &[i64; 5]) -> BigInt {
    let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
    let b2 = &a1 * &a1 + 4 * &a2;
    let b4 = 2 * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + 4 * &a6;
    let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    let first: BigInt = &b2 * &b2 * &b8;
    let second: BigInt = 8 * &b4 * &b4 * &b4;
    let third: BigInt = 27 * &b6 * &b6;
    let fourth: BigInt = 9 * &b2 * &b4 * &b6;
    -first - second - third + fourth
}

/// `∏ (1 − t^k)` over the irreducible factors of `f mod p`, `k` their degrees.
fn zero_dimensional_poly(coeffs: &[i64], p: u64) -> Result<Poly> {
    let ints: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    let f = fp_poly::from_int_coeffs(&ints, p);
    let df: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &c)| (c * (i as u64 % p)) % p).collect();
    if fp_poly::degree(&fp_poly::gcd(&f, &fp_poly::trim(df), p)) != Some(0) {
        return Err(Error::Invalid(format!("the polynomial is not square-free mod {p}: bad reduction")));
    }
    let n = coeffs.len() - 1;
    // N_k = ∑_{j | k} j·r_j with r_j the number of irreducible factors of degree j
    let mut r = vec![0usize; n + 1];
    let mut out = Poly::one();
    for k in 1..=n {
        let roots = fp_poly::distinct_roots_in_extension(&f, p, k as u32);
        let lower: usize = (1..k).filter(|j| k % j == 0).map(|j| j * r[j]).sum();
        r[k] = (roots - lower) / k;
        out = &out * &Poly::one_minus(Rational::one()).subst_power(k).pow(r[k] as u32);
    }
    Ok(out)
}

/// Weight factors of a product: `P_w = ∏_{i+j=w} P_i ⊗ P_j`.
fn tensor_weights(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::one(); a.len() + b.len() - 1];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            out[i + j] = &out[i + j] * &tensor_factor(pa, pb);
        }
    }
    out
}

/// The factor whose inverse roots are the products `α·β`: power sums multiply.
fn tensor_factor(a: &Poly, b: &Poly) -> Poly {
    let n = a.deg() * b.deg();
    if n == 0 {
        return Poly::one();
    }
    let (sa, sb) = (power_sums(a, n), power_sums(b, n));
    let mut c = vec![Rational::zero(); n + 1];
    for k in 1..=n {
        c[k] = -(&sa[k - 1] * &sb[k - 1]) / rat(k as i64);
    }
    PowerSeries::new(c).exp().expect("zero constant term").to_poly()
}

/// Spectrum of the fiber at `p` through the full pipeline, with the Weil check recorded.
#[derive(Debug, Clone)]
pub struct LocalSpectrum {
    pub p: u64,
    pub status: FiberStatus,
    pub counts: Vec<u128>,
    pub weights: Option<WeightDecomposition>,
    pub spectrum: Option<NcSpectrum>,
    pub weil: Option<NcWeilReport>,
}

/// Counts the fiber at `p` over `F_{p^n}`, `n ≤ degrees`, rebuilds its zeta function,
/// splits it by weight and assembles the even/odd spectrum.
pub fn local_spectrum(
    model: &ArithmeticModel,
    p: u64,
    degrees: u32,
    cache: &CountCache,
    policy: BadPrimePolicy,
) -> Result<LocalSpectrum> {
    let q = PrimePower::prime(p)?;
    let (status, fiber) = model.fiber(p, policy);
    let Some(spec) = fiber else {
        return Ok(LocalSpectrum { p, status, counts: vec![], weights: None, spectrum: None, weil: None });
    };
    let betti = match spec.builtin_betti() {
        Some(b) => b,
        None if status == FiberStatus::Good => model.betti.clone(),
        None => return Err(Error::Unsupported(format!("no Betti numbers for the replacement fiber at {p}"))),
    };
    let needed = betti.iter().sum::<u64>() as u32;
    if degrees < needed.max(1) {
        return invalid(format!("the fiber at {p} needs at least {needed} degrees, got {degrees}"));
    }
    let (counts, dec) = counted_weights(spec, q, degrees, &betti, cache)?;
    let spectrum = nc_spectrum_from_weights(&dec)?;
    let weil = nc_weil_check(&spectrum, 1e-9, 50);
    Ok(LocalSpectrum { p, status, counts, weights: Some(dec), spectrum: Some(spectrum), weil: Some(weil) })
}

#[derive(Debug, Clone, Copy)]
pub struct EulerOptions {
    pub margin: f64,
    pub policy: BadPrimePolicy,
}

impl Default for EulerOptions {
    fn default() -> Self {
        EulerOptions { margin: DEFAULT_MARGIN, policy: BadPrimePolicy::default() }
    }
}

/// Edge of the half-plane where the product converges absolutely.
pub fn convergence_abscissa(parity: Parity) -> f64 {
    match parity {
        Parity::Even => 1.0,
        Parity::Odd => 1.5,
    }
}

/// `∑_{n>P} 1/(n^z − 1) ≤ P^{1−z} / ((z − 1)(1 − P^{−z}))`, which bounds the sum over primes `p > P`.
pub fn prime_tail_bound(cutoff: u64, z: f64) -> f64 {
    let p = cutoff.max(2) as f64;
    p.powf(1.0 - z) / ((z - 1.0) * (1.0 - p.powf(-z)))
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerProduct {
    pub parity: Parity,
    pub s: Complex64,
    pub prime_cutoff: u64,
    pub primes_used: usize,
    pub excluded: Vec<u64>,
    pub replaced: Vec<u64>,
    pub value: Complex64,
    /// Uniform bound on `χ_{(·,p)}` entering the tail estimate.
    pub constant: u64,
    /// Bound on `|log L − log L_P|`: `C·∑_{p>P} 1/(p^z − 1)`, `z = Re s` (even) or `Re s − 1/2` (odd).
    pub log_tail_bound: f64,
    /// `|L_P|·(e^T − 1)` with `T` the log tail bound.
    pub value_tail_bound: f64,
}

/// `∏_{p ≤ P} ζ_even/odd(fiber at p; s)` with the tail estimate beyond `P`.
pub fn euler_product_value(
    model: &ArithmeticModel,
    parity: Parity,
    s: Complex64,
    cutoff: u64,
    opts: &EulerOptions,
) -> Result<EulerProduct> {
    let edge = convergence_abscissa(parity);
    if !(s.re > edge + opts.margin) {
        return invalid(format!(
            "Re(s) = {} is outside the guaranteed half-plane Re(s) > {} + {}; use the continuation instead",
            s.re, edge, opts.margin
        ));
    }
    let primes = primes_up_to(cutoff);
    let factors = local_factors(model, &primes, opts.policy)?;
    let mut value = Complex64::new(1.0, 0.0);
    let mut observed = 0u64;
    let (mut excluded, mut replaced) = (Vec::new(), Vec::new());
    for f in &factors {
        match f.status {
            FiberStatus::Excluded => {
                excluded.push(f.p);
                continue;
            }
            FiberStatus::Replaced => replaced.push(f.p),
            FiberStatus::Good => {}
        }
        let det = f.det_poly(parity);
        observed = observed.max(det.deg() as u64);
        let x = (-s * (f.p as f64).ln()).exp();
        value /= det.eval_c(x);
    }
    let constant = observed.max(model.chi(parity));
    let z = match parity {
        Parity::Even => s.re,
        Parity::Odd => s.re - 0.5,
    };
    let log_tail_bound = constant as f64 * prime_tail_bound(cutoff, z);
    Ok(EulerProduct {
        parity,
        s,
        prime_cutoff: cutoff,
        primes_used: factors.len() - excluded.len(),
        excluded,
        replaced,
        value,
        constant,
        log_tail_bound,
        value_tail_bound: value.norm() * log_tail_bound.exp_m1(),
    })
}

fn rational_strings<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

/// `∑_{n ≤ N} b_n n^{−s}` with multiplicative `b_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletSeries {
    pub parity: Parity,
    /// Set for the series of a single weight `L_w`.
    pub weight: Option<usize>,
    pub bound: usize,
    pub excluded: Vec<u64>,
    /// `b_1..b_N`.
    #[serde(serialize_with = "rational_strings")]
    pub coeffs: Vec<Rational>,
}

impl DirichletSeries {
    /// `b_n` for `1 ≤ n ≤ N`.
    pub fn b(&self, n: usize) -> &Rational {
        &self.coeffs[n - 1]
    }

    /// `b_{mn} = b_m·b_n`, for coprime `m`, `n` with `mn ≤ N`.
    pub fn multiplicative_at(&self, m: usize, n: usize) -> bool {
        m.gcd(&n) == 1 && m * n <= self.bound && *self.b(m * n) == self.b(m) * self.b(n)
    }

    /// Dirichlet convolution, the coefficients of the product.
    pub fn convolve(&self, other: &DirichletSeries) -> DirichletSeries {
        let n = self.bound.min(other.bound);
        let mut c = vec![Rational::zero(); n];
        for a in 1..=n {
            if self.b(a).is_zero() {
                continue;
            }
            for k in 1..=n / a {
                c[a * k - 1] += self.b(a) * other.b(k);
            }
        }
        let mut excluded: Vec<u64> = self.excluded.iter().chain(&other.excluded).copied().collect();
        excluded.sort_unstable();
        excluded.dedup();
        DirichletSeries { parity: self.parity, weight: None, bound: n, excluded, coeffs: c }
    }

    /// Coefficients of `L(s + e)`: `b_n / n^e`.
    pub fn shifted(&self, e: u32) -> DirichletSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| b / num_traits::pow(rat(i as i64 + 1), e as usize))
            .collect();
        DirichletSeries { coeffs, weight: None, ..self.clone() }
    }

    /// `∑_{n ≤ N} b_n n^{−s}`.
    pub fn partial_sum(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| crate::series::to_f64(b) * (-s * ((i + 1) as f64).ln()).exp())
            .sum()
    }
}

/// `a_{p,k}`, `k ≤ m`: the coefficients of `exp(∑ #_n t^n/n)` with `#_n` the traces of `F^n`.
pub fn local_coefficients(det: &Poly, m: usize) -> Vec<Rational> {
    if m == 0 {
        return vec![Rational::one()];
    }
    let traces = power_sums(det, m);
    let mut c = vec![Rational::zero(); m + 1];
    for (n, tr) in traces.into_iter().enumerate() {
        c[n + 1] = tr / rat(n as i64 + 1);
    }
    PowerSeries::new(c).exp().expect("zero constant term").coeffs().to_vec()
}

/// Multiplicative assembly `b_n = ∏ a_{p, v_p(n)}` from the local coefficients, sequential over `n`.
fn assemble(bound: usize, local: &BTreeMap<u64, Vec<Rational>>) -> Vec<Rational> {
    let mut smallest = vec![0usize; bound + 1];
    for i in 2..=bound {
        if smallest[i] == 0 {
            for j in (i..=bound).step_by(i) {
                if smallest[j] == 0 {
                    smallest[j] = i;
                }
            }
        }
    }
    let mut b = vec![Rational::zero(); bound + 1];
    if bound >= 1 {
        b[1] = Rational::one();
    }
    for n in 2..=bound {
        let p = smallest[n];
        let (mut m, mut k) = (n, 0);
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let a = &local[&(p as u64)];
        b[n] = if k < a.len() { &b[m] * &a[k] } else { Rational::zero() };
    }
    b.remove(0);
    b
}

fn expand_with(
    model: &ArithmeticModel,
    bound: usize,
    policy: BadPrimePolicy,
    det: impl Fn(&LocalFactor) -> Poly + Sync,
) -> Result<(Vec<Rational>, Vec<u64>)> {
    if bound == 0 {
        return invalid("the expansion needs N ≥ 1");
    }
    let unhandled = model.unhandled_bad_primes(bound as u64, policy);
    if !unhandled.is_empty() {
        return Err(Error::UnhandledBadPrimes(unhandled));
    }
    let primes = primes_up_to(bound as u64);
    let factors = local_factors(model, &primes, policy)?;
    let local: Vec<(u64, Vec<Rational>)> = factors
        .par_iter()
        .map(|f| {
            let mut m = 0;
            let mut pk = f.p as usize;
            while pk <= bound {
                m += 1;
                pk = pk.saturating_mul(f.p as usize);
            }
            let a = match f.status {
                FiberStatus::Excluded => vec![Rational::one()],
                _ => local_coefficients(&det(f), m),
            };
            (f.p, a)
        })
        .collect();
    let excluded = factors.iter().filter(|f| f.status == FiberStatus::Excluded).map(|f| f.p).collect();
    Ok((assemble(bound, &local.into_iter().collect()), excluded))
}

/// Coefficients `b_1..b_N` of `L_even` or `L_odd`.
pub fn dirichlet_expand(
    model: &ArithmeticModel,
    parity: Parity,
    bound: usize,
    policy: BadPrimePolicy,
) -> Result<DirichletSeries> {
    let (coeffs, excluded) = expand_with(model, bound, policy, |f| f.det_poly(parity))?;
    Ok(DirichletSeries { parity, weight: None, bound, excluded, coeffs })
}

/// Coefficients of the classical `L_w` built from the unshifted weight factors.
pub fn weight_dirichlet_expand(
    model: &ArithmeticModel,
    w: usize,
    bound: usize,
    policy: BadPrimePolicy,
) -> Result<DirichletSeries> {
    let (coeffs, excluded) = expand_with(model, bound, policy, |f| f.weight_poly(w))?;
    Ok(DirichletSeries { parity: Parity::of_weight(w), weight: Some(w), bound, excluded, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn ints(v: &[Rational]) -> Vec<i64> {
        v.iter().map(|c| i64::try_from(c.to_integer()).unwrap()).collect()
    }

    #[test]
    fn model_files_roundtrip() {
        for m in [
            ArithmeticModel::spec_q(),
            ArithmeticModel::projective(2),
            ArithmeticModel::gaussian_integers(),
            ArithmeticModel::elliptic([0, 0, 0, 1, 0], &[2]).unwrap(),
        ] {
            assert_eq!(ArithmeticModel::from_json(&m.to_json()).unwrap(), m);
        }
    }

    #[test]
    fn model_validation() {
        let text = r#"{"family": "zerodim x^2 + 1", "bad_primes": [{"p": 2}, {"p": 2}], "betti": [2]}"#;
        assert!(ArithmeticModel::from_json(text).is_err());
        let text = r#"{"family": "zerodim x^2 + 1", "bad_primes": [{"p": 4}], "betti": [2]}"#;
        assert!(ArithmeticModel::from_json(text).is_err());
        let text = r#"{"family": "zerodim x^2 + 1", "betti": [1]}"#;
        assert!(ArithmeticModel::from_json(text).is_err());
        let text = r#"{"family": "zerodim x^2 + 1", "betti": [2], "closed_form": "riemann_zeta"}"#;
        assert!(ArithmeticModel::from_json(text).is_err());
        let text = r#"{"family": "projective 1; vars x,y", "betti": [1, 0, 1], "closed_form": {"mixed_tate": [0, 1]}}"#;
        let m = ArithmeticModel::from_json(text).unwrap();
        assert_eq!(m.closed_form, Some(ClosedForm::MixedTate(vec![0, 1])));
        let text = r#"{"family": "projective 1; vars x,y", "betti": [1, 0, 1], "closed_form": {"mixed_tate": [0, 0]}}"#;
        assert!(ArithmeticModel::from_json(text).is_err());
    }

    #[test]
    fn projective_line_even_spectrum_at_seven() {
        let f = local_factor(&ArithmeticModel::projective(1), 7, BadPrimePolicy::Exclude).unwrap();
        assert_eq!(f.det_poly(Parity::Even), Poly::from_i64(&[1, -2, 1]));
        assert_eq!(f.det_poly(Parity::Odd), Poly::one());
    }

    #[test]
    fn gaussian_fibers() {
        let m = ArithmeticModel::gaussian_integers();
        let split = local_factor(&m, 13, BadPrimePolicy::Exclude).unwrap();
        assert_eq!(split.det_poly(Parity::Even), Poly::from_i64(&[1, -2, 1]));
        let inert = local_factor(&m, 7, BadPrimePolicy::Exclude).unwrap();
        assert_eq!(inert.det_poly(Parity::Even), Poly::from_i64(&[1, 0, -1]));
        assert_eq!(local_factor(&m, 2, BadPrimePolicy::Exclude).unwrap().status, FiberStatus::Excluded);
        let ramified = local_factor(&m, 2, BadPrimePolicy::Replace).unwrap();
        assert_eq!((ramified.status, ramified.det_poly(Parity::Even)), (FiberStatus::Replaced, Poly::from_i64(&[1, -1])));
    }

    #[test]
    fn elliptic_fiber_at_five() {
        let m = ArithmeticModel::elliptic([0, 0, 0, 1, 0], &[2]).unwrap();
        let f = local_factor(&m, 5, BadPrimePolicy::Exclude).unwrap();
        assert_eq!(f.det_poly(Parity::Odd), Poly::from_i64(&[1, -2, 5]));
        assert_eq!(f.det_poly(Parity::Even), Poly::from_i64(&[1, -2, 1]));
        assert_eq!(elliptic_discriminant(&[0, 0, 0, 1, 0]), BigInt::from(-64));
        // an unlisted bad prime is refused
        let wrong = ArithmeticModel::elliptic([0, 0, 0, 1, 0], &[]).unwrap();
        assert!(local_factor(&wrong, 2, BadPrimePolicy::Exclude).is_err());
    }

    #[test]
    fn tensor_of_lines_and_curves() {
        let p1 = vec![Poly::from_i64(&[1, -1]), Poly::one(), Poly::from_i64(&[1, -3])];
        let w = tensor_weights(&p1, &p1);
        assert_eq!(w[2], Poly::from_i64(&[1, -3]).pow(2));
        assert_eq!(w[4], Poly::from_i64(&[1, -9]));
        let e = Poly::from_i64(&[1, -2, 5]);
        // (1 − αt)(1 − ᾱt) ⊗ (1 − 5t) = 1 − 10t + 125t²
        assert_eq!(tensor_factor(&e, &Poly::from_i64(&[1, -5])), Poly::from_i64(&[1, -10, 125]));
    }

    #[test]
    fn local_coefficients_invert_the_determinant() {
        let det = Poly::from_i64(&[1, -2, 5]);
        let a = local_coefficients(&det, 6);
        let direct = PowerSeries::from_poly(&det, 6).inverse().unwrap();
        assert_eq!(a, direct.coeffs().to_vec());
        assert_eq!(ints(&local_coefficients(&Poly::from_i64(&[1, -2, 1]), 4)), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn dirichlet_small_models() {
        let q = dirichlet_expand(&ArithmeticModel::spec_q(), Parity::Even, 30, BadPrimePolicy::Exclude).unwrap();
        assert!(q.coeffs.iter().all(|b| b.is_one()));
        let p1 = dirichlet_expand(&ArithmeticModel::projective(1), Parity::Even, 12, BadPrimePolicy::Exclude).unwrap();
        assert_eq!(ints(&p1.coeffs), vec![1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]);
        let zi = dirichlet_expand(&ArithmeticModel::gaussian_integers(), Parity::Even, 10, BadPrimePolicy::Replace).unwrap();
        assert_eq!(ints(&zi.coeffs), vec![1, 1, 0, 1, 2, 0, 0, 1, 1, 2]);
        let cut = dirichlet_expand(&ArithmeticModel::gaussian_integers(), Parity::Even, 4, BadPrimePolicy::Exclude).unwrap();
        assert_eq!((ints(&cut.coeffs), cut.excluded), (vec![1, 0, 0, 0], vec![2]));
        let odd = dirichlet_expand(&ArithmeticModel::projective(1), Parity::Odd, 5, BadPrimePolicy::Exclude).unwrap();
        assert_eq!(ints(&odd.coeffs), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn unhandled_bad_primes_are_listed() {
        let m = ArithmeticModel::elliptic([0, 0, 0, 1, 0], &[2]).unwrap();
        assert_eq!(
            dirichlet_expand(&m, Parity::Odd, 10, BadPrimePolicy::Replace),
            Err(Error::UnhandledBadPrimes(vec![2]))
        );
        let e = dirichlet_expand(&m, Parity::Odd, 10, BadPrimePolicy::Exclude).unwrap();
        // b_5 = a_5 = 2, b_3 = a_3 = 0 (supersingular), b_2 = 0 (excluded)
        assert_eq!(ints(&e.coeffs)[..5], [1, 0, 0, 0, 2]);
    }

    #[test]
    fn series_operations() {
        let ones = dirichlet_expand(&ArithmeticModel::spec_q(), Parity::Even, 12, BadPrimePolicy::Exclude).unwrap();
        let d = ones.convolve(&ones);
        assert_eq!(*d.b(12), rat(6));
        assert!(d.multiplicative_at(3, 4));
        assert!(!d.multiplicative_at(2, 4));
        assert_eq!(*d.shifted(1).b(4), ratio(3, 4));
    }

    #[test]
    fn euler_product_guards_the_half_plane() {
        let m = ArithmeticModel::projective(1);
        let opts = EulerOptions::default();
        assert!(euler_product_value(&m, Parity::Even, Complex64::new(1.02, 0.0), 100, &opts).is_err());
        assert!(euler_product_value(&m, Parity::Odd, Complex64::new(1.52, 0.0), 100, &opts).is_err());
        let odd = euler_product_value(&m, Parity::Odd, Complex64::new(2.0, 0.0), 1000, &opts).unwrap();
        assert_eq!(odd.value, Complex64::new(1.0, 0.0));
        assert_eq!(odd.log_tail_bound, 0.0);
    }

    #[test]
    fn spec_q_product_at_two() {
        let r = euler_product_value(&ArithmeticModel::spec_q(), Parity::Even, Complex64::new(2.0, 0.0), 10_000, &EulerOptions::default())
            .unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((r.value.re - exact).abs() <= r.value_tail_bound, "{r:?}");
        assert!((r.value.re - exact).abs() < 1e-4);
    }

    #[test]
    fn tail_bound_dominates_the_sum() {
        let direct: f64 = (101..200_000u64).map(|n| 1.0 / ((n as f64).powi(2) - 1.0)).sum();
        assert!(direct <= prime_tail_bound(100, 2.0));
        assert!(prime_tail_bound(100, 2.0) < 1.1 * direct + 1e-5);
    }
}
