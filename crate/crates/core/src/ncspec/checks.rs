use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use super::{int, is_unit_sign, nc_spectrum_from_weights, nc_zeta, q_pow, scale_roots, sign_pow, NcSpectrum, Parity};
use crate::arith::{QMatrix, Rational};
use crate::error::Result;
use crate::report::{Check, Verdict};
use crate::series::{roots_with_moduli, Poly, RationalFunction};
use crate::zeta::{functional_ratio_check, ladic_weight, ord_at, FunctionalReport, Side, WeightDecomposition};

use super::lemmas::{jordan_criterion, JordanReport};

#[derive(Debug, Clone, Serialize)]
pub struct NcWeilEntry {
    pub parity: Parity,
    pub poly: Vec<String>,
    pub multiplicity: usize,
    pub target_modulus: f64,
    pub max_deviation: f64,
    /// `q^C·λ` are algebraic integers: the rescaled polynomial is monic with integer coefficients.
    pub algebraic: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct NcWeilReport {
    pub tol: f64,
    pub entries: Vec<NcWeilEntry>,
    pub verdict: Verdict,
}

impl NcWeilReport {
    pub fn to_check(&self) -> Check {
        Check::new("nc-weil", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// `∏ (t − q^C·λ)`.
fn cleared(spec: &NcSpectrum, poly: &Poly) -> Poly {
    scale_roots(poly, &q_pow(spec.q, i64::from(spec.integrality_shift)))
}

/// Even eigenvalues of modulus 1, odd eigenvalues of modulus `q^{1/2}`.
pub fn nc_weil_check(spec: &NcSpectrum, tol: f64, digits: u32) -> NcWeilReport {
    let mut entries = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let target_sq = match parity {
            Parity::Even => Rational::one(),
            Parity::Odd => spec.q.q_rational(),
        };
        for b in spec.blocks(parity) {
            let c = cleared(spec, &b.poly);
            let algebraic = c.is_integral();
            let max_deviation = match roots_with_moduli(&b.poly, digits) {
                Ok(cluster) => cluster
                    .roots
                    .iter()
                    .map(|r| r.relative_modulus_deviation(&target_sq, cluster.bits))
                    .fold(0.0, f64::max),
                Err(_) => f64::NAN,
            };
            let verdict = if max_deviation.is_nan() {
                Verdict::Indeterminate
            } else {
                Verdict::from_bool(algebraic && max_deviation < tol)
            };
            entries.push(NcWeilEntry {
                parity,
                poly: b.poly.coeff_strings(),
                multiplicity: b.multiplicity,
                target_modulus: crate::series::to_f64(&target_sq).sqrt(),
                max_deviation,
                algebraic,
                verdict,
            });
        }
    }
    let verdict = Verdict::combine(entries.iter().map(|e| e.verdict));
    NcWeilReport { tol, entries, verdict }
}

#[derive(Debug, Clone, Serialize)]
pub struct NcLAdicEntry {
    pub parity: Parity,
    pub poly: Vec<String>,
    /// `∏ (t − q^C·λ)`.
    pub cleared_poly: Vec<String>,
    pub integral: bool,
    pub constant_term: String,
    pub prime_support: Vec<String>,
    pub foreign_primes: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct NcLAdicReport {
    pub p: u64,
    pub integrality_shift: u32,
    pub entries: Vec<NcLAdicEntry>,
    pub verdict: Verdict,
}

impl NcLAdicReport {
    pub fn to_check(&self) -> Check {
        Check::new("nc-ladic", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// After multiplying by `q^C`, each eigenvalue polynomial is monic integral and its constant
/// term is a power of `p` up to sign.
pub fn nc_l_adic_check(spec: &NcSpectrum) -> NcLAdicReport {
    let mut entries = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        for b in spec.blocks(parity) {
            let c = cleared(spec, &b.poly);
            let w = ladic_weight(0, &c, spec.q.p);
            entries.push(NcLAdicEntry {
                parity,
                poly: b.poly.coeff_strings(),
                cleared_poly: w.eigen_poly,
                integral: w.integral,
                constant_term: w.constant_term,
                prime_support: w.prime_support,
                foreign_primes: w.foreign_primes,
                verdict: w.verdict,
            });
        }
    }
    let verdict = Verdict::combine(entries.iter().map(|e| e.verdict));
    NcLAdicReport { p: spec.q.p, integrality_shift: spec.integrality_shift, entries, verdict }
}

#[derive(Debug, Clone, Serialize)]
pub struct NcFunctionalReport {
    pub chi_even: usize,
    pub chi_odd: usize,
    pub det_even: String,
    pub det_odd: String,
    pub even: FunctionalReport,
    pub odd: FunctionalReport,
    /// `det(F₀)² = 1` and `det(F₁)² = q^{χ₁}`, the hypotheses of the reduced forms.
    pub reduced_applies: bool,
    pub reduced_even: Option<FunctionalReport>,
    pub reduced_odd: Option<FunctionalReport>,
    pub verdict: Verdict,
}

impl NcFunctionalReport {
    pub fn to_check(&self) -> Check {
        Check::new("nc-functional", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

fn q_pow_c(q: f64, e: Complex64) -> Complex64 {
    (e * q.ln()).exp()
}

/// Demands the exact constant: the ratio must be `+1`, not `−1`.
fn require_plus(mut r: FunctionalReport) -> FunctionalReport {
    if r.verdict == Verdict::Pass && r.sign != Some(1) {
        r.verdict = Verdict::Fail;
    }
    r
}

/// `ζ_even(s) = (−1)^{χ₀} q^{χ₀ s} det(F₀) ζ_even(−s)` and
/// `ζ_odd(s) = (−1)^{χ₁} q^{−χ₁(1−s)} det(F₁) ζ_odd(1−s)`, then the reduced forms
/// `ζ_even(s) = ± q^{χ₀ s} ζ_even(−s)` and `ζ_odd(s) = ± q^{χ₁(s − 1/2)} ζ_odd(1−s)`
/// whenever `det(F₀)² = 1` and `det(F₁)² = q^{χ₁}`.
pub fn nc_functional_check(spec: &NcSpectrum, samples: &[Complex64], tol: f64) -> NcFunctionalReport {
    let q = spec.q.q_f64();
    let (chi0, chi1) = (spec.chi(Parity::Even), spec.chi(Parity::Odd));
    let (det0, det1) = (spec.det(Parity::Even), spec.det(Parity::Odd));
    let z0 = nc_zeta(spec, Parity::Even);
    let z1 = nc_zeta(spec, Parity::Odd);
    let f64_of = |x: &Rational| crate::series::to_f64(x);
    let one = Complex64::new(1.0, 0.0);

    let at = |z: &RationalFunction, s: Complex64| z.eval_c(q_pow_c(q, -s));
    let even = {
        let c = f64_of(&(sign_pow(chi0) * &det0));
        let lhs = Box::new(|s: Complex64| at(&z0, s)) as Side;
        let rhs = Box::new(|s: Complex64| at(&z0, -s).map(|v| v * c * q_pow_c(q, s * chi0 as f64))) as Side;
        require_plus(functional_ratio_check(
            "zeta_even(s) = (-1)^chi0 q^(chi0 s) det(F0) zeta_even(-s)",
            lhs,
            rhs,
            samples,
            tol,
        ))
    };
    let odd = {
        let c = f64_of(&(sign_pow(chi1) * &det1));
        let lhs = Box::new(|s: Complex64| at(&z1, s)) as Side;
        let rhs =
            Box::new(|s: Complex64| at(&z1, one - s).map(|v| v * c * q_pow_c(q, -(one - s) * chi1 as f64))) as Side;
        require_plus(functional_ratio_check(
            "zeta_odd(s) = (-1)^chi1 q^(-chi1 (1 - s)) det(F1) zeta_odd(1 - s)",
            lhs,
            rhs,
            samples,
            tol,
        ))
    };
    let reduced_applies =
        is_unit_sign(&det0) && &det1 * &det1 == num_traits::pow(spec.q.q_rational(), chi1);
    let (reduced_even, reduced_odd) = if reduced_applies {
        let lhs = Box::new(|s: Complex64| at(&z0, s)) as Side;
        let rhs = Box::new(|s: Complex64| at(&z0, -s).map(|v| v * q_pow_c(q, s * chi0 as f64))) as Side;
        let e = functional_ratio_check("zeta_even(s) = ± q^(chi0 s) zeta_even(-s)", lhs, rhs, samples, tol);
        let lhs = Box::new(|s: Complex64| at(&z1, s)) as Side;
        let rhs =
            Box::new(|s: Complex64| at(&z1, one - s).map(|v| v * q_pow_c(q, (s - 0.5) * chi1 as f64))) as Side;
        let o = functional_ratio_check("zeta_odd(s) = ± q^(chi1 (s - 1/2)) zeta_odd(1 - s)", lhs, rhs, samples, tol);
        (Some(e), Some(o))
    } else {
        (None, None)
    };
    let verdict = Verdict::combine(
        [Some(even.verdict), Some(odd.verdict), reduced_even.as_ref().map(|r| r.verdict), reduced_odd.as_ref().map(|r| r.verdict)]
            .into_iter()
            .flatten(),
    );
    NcFunctionalReport {
        chi_even: chi0,
        chi_odd: chi1,
        det_even: det0.to_string(),
        det_odd: det1.to_string(),
        even,
        odd,
        reduced_applies,
        reduced_even,
        reduced_odd,
        verdict,
    }
}

/// Even multiset closed under `λ ↦ 1/λ`, odd multiset under `λ ↦ q/λ`, exactly.
pub fn reciprocity_check(spec: &NcSpectrum) -> Check {
    let mut details = serde_json::Map::new();
    let mut ok = true;
    for (parity, c) in [(Parity::Even, Rational::one()), (Parity::Odd, spec.q.q_rational())] {
        let p = spec.charpoly(parity);
        let n = p.deg();
        // ∏ (t − c/λ) = t^n P(c/t) / P(0), made monic
        let image = p.reverse(n).subst_scale(&c.recip()).scale(&num_traits::pow(c.clone(), n)).monic();
        let closed = n == 0 || image == p;
        ok &= closed;
        details.insert(parity.to_string(), json!({ "map": format!("λ ↦ {c}/λ"), "closed": closed }));
    }
    Check::new("reciprocity", Verdict::from_bool(ok), serde_json::Value::Object(details))
}

/// `ζ_n(s) = ζ₀(s + n/2)` for even `n` and `ζ_n(s) = ζ₁(s + (n−1)/2)` for odd `n`, with
/// `F_n` obtained from `F₀` or `F₁` through `F_{n−2} = q·F_n`.
pub fn graded_shift_check(spec: &NcSpectrum, n: i64) -> Check {
    let parity = if n.rem_euclid(2) == 0 { Parity::Even } else { Parity::Odd };
    let k = n.div_euclid(2);
    // walk F_{base} → F_n one step of the square at a time: each step divides the eigenvalues by q
    let q = spec.q.q_rational();
    let mut fk = spec.charpoly(parity);
    let step = if k >= 0 { q.recip() } else { q.clone() };
    for _ in 0..k.unsigned_abs() {
        fk = scale_roots(&fk, &step);
    }
    let zeta_n = RationalFunction::reciprocal_of(fk.reverse(fk.deg())).expect("eigenvalues are nonzero");
    let shifted = nc_zeta(spec, parity).subst_scale(&q_pow(spec.q, -k));
    let ok = zeta_n == shifted;
    Check::new(
        "graded-shift",
        Verdict::from_bool(ok),
        json!({
            "n": n,
            "base": parity.to_string(),
            "shift": k,
            "zeta_n": zeta_n.in_var("x"),
            "shifted_base": shifted.in_var("x"),
        }),
    )
}

/// `ζ_even = ∏_{w even} ζ_w(s + w/2)` and `ζ_odd = ∏_{w odd} ζ_w(s + (w−1)/2)` as rational
/// functions of `x = q^{−s}`, against the spectrum built from the same weights.
pub fn factorization_check(dec: &WeightDecomposition) -> Result<Check> {
    let spec = nc_spectrum_from_weights(dec)?;
    let mut details = serde_json::Map::new();
    let mut ok = true;
    for parity in [Parity::Even, Parity::Odd] {
        let product = dec
            .factors
            .iter()
            .filter(|f| Parity::of_weight(f.w) == parity)
            .map(|f| dec.weight_zeta(f.w).subst_scale(&q_pow(dec.q, -((f.w / 2) as i64))))
            .fold(RationalFunction::one(), |acc, z| acc.mul(&z));
        let direct = nc_zeta(&spec, parity);
        let equal = product == direct;
        ok &= equal;
        details.insert(
            parity.to_string(),
            json!({ "spectrum": direct.in_var("x"), "weight_product": product.in_var("x"), "equal": equal }),
        );
    }
    Ok(Check::new("nc-factorization", Verdict::from_bool(ok), serde_json::Value::Object(details)))
}

/// `ord_{s=z} ζ_even = ∑_{w even} ord_{s=z+w/2} ζ_w` and the odd twin, for every integer `z` in `[lo, hi]`.
pub fn order_additivity_check(dec: &WeightDecomposition, lo: i64, hi: i64) -> Result<Check> {
    let spec = nc_spectrum_from_weights(dec)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for parity in [Parity::Even, Parity::Odd] {
        let zeta = nc_zeta(&spec, parity);
        for z in lo..=hi {
            let direct = ord_at(&zeta, dec.q, &int(z), 1e-9)?.value;
            let mut sum = 0i64;
            for f in dec.factors.iter().filter(|f| Parity::of_weight(f.w) == parity) {
                let at = int(z + (f.w / 2) as i64);
                sum += ord_at(&dec.weight_zeta(f.w), dec.q, &at, 1e-9)?.value.unwrap_or(i64::MIN / 4);
            }
            let equal = direct == Some(sum);
            ok &= equal;
            rows.push(json!({ "parity": parity.to_string(), "z": z, "ord": direct, "weight_sum": sum, "equal": equal }));
        }
    }
    Ok(Check::new("order-additivity", Verdict::from_bool(ok), json!({ "window": [lo, hi], "rows": rows })))
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongTateReport {
    /// Algebraic multiplicity of the eigenvalue 1 of `F₀`.
    pub multiplicity: usize,
    /// `−ord_{s=0} ζ_even`.
    pub pole_order: i64,
    pub k0_num_rank: usize,
    pub jordan: Option<JordanReport>,
    /// The supplied matrix has the even spectrum as its characteristic polynomial.
    pub matrix_matches_spectrum: Option<bool>,
    pub verdict: Verdict,
}

impl StrongTateReport {
    pub fn to_check(&self) -> Check {
        Check::new("strong-tate", self.verdict, serde_json::to_value(self).expect("serializable"))
            .with_fixture("k0_num_rank", json!(self.k0_num_rank))
    }
}

/// Multiplicity of the eigenvalue 1 of `F₀` against the rank of `K₀/num`, which is supplied.
/// With a matrix realization of `F₀`, also reports whether geometric and algebraic
/// multiplicities agree.
pub fn strong_tate_check(spec: &NcSpectrum, k0_num_rank: usize, matrix: Option<&QMatrix>) -> Result<StrongTateReport> {
    let multiplicity = spec.multiplicity_of(Parity::Even, &Rational::one());
    let pole_order = -ord_at(&nc_zeta(spec, Parity::Even), spec.q, &int(0), 1e-9)?
        .value
        .expect("integer points are exact");
    let (jordan, matches) = match matrix {
        Some(m) => {
            let j = jordan_criterion(m)?;
            let matches = Poly::new(m.charpoly()) == spec.charpoly(Parity::Even);
            (Some(j), Some(matches))
        }
        None => (None, None),
    };
    let ok = multiplicity == k0_num_rank && pole_order == multiplicity as i64;
    Ok(StrongTateReport {
        multiplicity,
        pole_order,
        k0_num_rank,
        jordan,
        matrix_matches_spectrum: matches,
        verdict: Verdict::from_bool(ok),
    })
}
