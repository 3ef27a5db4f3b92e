//! Zeta functions from point counts: reconstruction, weight factors, and their checks.

mod checks;
mod factor;
mod order;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use checks::{
    hasse_weil_functional_check, l_adic_check, weil_check, FunctionalReport, LAdicReport, LAdicWeight,
    WeilReport, WeilWeight, DEFAULT_SAMPLES,
};
pub(crate) use checks::{functional_ratio_check, ladic_weight, Side};
pub use factor::{weight_factorize, FactorOptions};
pub use order::{ord_at, Order, OrderMethod};

use crate::arith::{is_integral, rat, PrimePower, Rational};
use crate::error::{invalid, Error, Result};
use crate::series::{pade_reconstruct, Poly, PowerSeries, RationalFunction};

/// Largest total degree tried when no Betti numbers are supplied.
pub const DEFAULT_SCAN_CAP: usize = 24;

/// `P_w(t) = det(1 − t·Fr | H^w)` with integer coefficients and `P_w(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightFactor {
    pub w: usize,
    #[serde(serialize_with = "poly_strings")]
    pub poly: Poly,
}

fn poly_strings<S: serde::Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.coeff_strings())
}

impl WeightFactor {
    pub fn betti(&self) -> usize {
        self.poly.deg()
    }

    /// `∏ (t − λ)` over the inverse roots: `t^β · P_w(1/t)`.
    pub fn eigen_poly(&self) -> Poly {
        self.poly.reverse(self.betti())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightDecomposition {
    pub d: usize,
    pub q: PrimePower,
    pub factors: Vec<WeightFactor>,
}

impl WeightDecomposition {
    /// Builds a decomposition from `P_0..P_{2d}`, each with constant term 1 and integer coefficients.
    pub fn from_polys(q: PrimePower, polys: Vec<Poly>) -> Result<Self> {
        if polys.len().is_multiple_of(2) {
            return invalid("need 2d + 1 weight factors");
        }
        for (w, p) in polys.iter().enumerate() {
            if p.constant_term() != rat(1) {
                return invalid(format!("P_{w} must have constant term 1"));
            }
            if !p.is_integral() {
                return invalid(format!("P_{w} must have integer coefficients"));
            }
        }
        let d = (polys.len() - 1) / 2;
        let factors = polys.into_iter().enumerate().map(|(w, poly)| WeightFactor { w, poly }).collect();
        Ok(WeightDecomposition { d, q, factors })
    }

    pub fn betti(&self) -> Vec<usize> {
        self.factors.iter().map(WeightFactor::betti).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.factors.iter().map(|f| if f.w % 2 == 0 { f.betti() as i64 } else { -(f.betti() as i64) }).sum()
    }

    pub fn factor(&self, w: usize) -> &WeightFactor {
        &self.factors[w]
    }

    pub fn is_poincare_symmetric(&self) -> bool {
        let b = self.betti();
        (0..b.len()).all(|w| b[w] == b[b.len() - 1 - w])
    }

    /// `∏_{w odd} P_w / ∏_{w even} P_w`.
    pub fn zeta(&self) -> RationalFunction {
        let mut num = Poly::one();
        let mut den = Poly::one();
        for f in &self.factors {
            if f.w % 2 == 0 {
                den = &den * &f.poly;
            } else {
                num = &num * &f.poly;
            }
        }
        RationalFunction::new(num, den).expect("factors have constant term 1")
    }

    /// `ζ_w = 1 / P_w` as a function of `x = q^{−s}`, for every weight.
    pub fn weight_zeta(&self, w: usize) -> RationalFunction {
        RationalFunction::reciprocal_of(self.factors[w].poly.clone()).expect("constant term 1")
    }
}

/// `exp(∑ N_n t^n / n)` to order `m = counts.len()`.
pub fn zeta_from_counts(counts: &[u128]) -> Result<PowerSeries> {
    if counts.is_empty() {
        return invalid("need at least one point count");
    }
    let mut c = vec![Rational::zero()];
    c.extend(
        counts
            .iter()
            .enumerate()
            .map(|(i, &n)| Rational::new(BigInt::from(n), BigInt::from(i + 1))),
    );
    PowerSeries::new(c).exp()
}

/// Coefficients of a genuine zeta function are non-negative integers; anything else is flagged.
pub fn series_warnings(z: &PowerSeries) -> Vec<String> {
    z.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !is_integral(c) || c.is_negative())
        .map(|(i, c)| format!("coefficient of t^{i} is {c}, not a non-negative integer"))
        .collect()
}

fn matches_all(f: &RationalFunction, z: &PowerSeries) -> bool {
    f.expand(z.order()) == *z
}

/// The rational function matching all counts. With Betti numbers the degrees are fixed by
/// them; otherwise total degrees below the number of counts are scanned up to `cap`.
pub fn zeta_rational(counts: &[u128], betti: Option<&[u64]>) -> Result<RationalFunction> {
    zeta_rational_with_cap(counts, betti, DEFAULT_SCAN_CAP)
}

pub fn zeta_rational_with_cap(counts: &[u128], betti: Option<&[u64]>, cap: usize) -> Result<RationalFunction> {
    let z = zeta_from_counts(counts)?;
    let m = counts.len();
    if let Some(b) = betti {
        let odd: u64 = b.iter().skip(1).step_by(2).sum();
        let even: u64 = b.iter().step_by(2).sum();
        let total = (odd + even) as usize;
        if m < total {
            return Err(Error::Underdetermined(format!(
                "Betti numbers need {total} counts, only {m} supplied"
            )));
        }
        let f = pade_reconstruct(&z, odd as usize, even as usize)?;
        if !matches_all(&f, &z) {
            return Err(Error::NoSolution("reconstruction does not match every supplied count".into()));
        }
        return Ok(f);
    }
    for total in 0..m.min(cap + 1) {
        for den in (0..=total).rev() {
            if let Ok(f) = pade_reconstruct(&z, total - den, den) {
                if matches_all(&f, &z) {
                    return Ok(f);
                }
            }
        }
    }
    if m > cap + 1 {
        Err(Error::NoSolution(format!(
            "no rational function of total degree at most {cap} matches the counts; supply Betti numbers"
        )))
    } else {
        Err(Error::NoSolution(format!(
            "no rational function of total degree below {m} matches the counts"
        )))
    }
}

/// Zeta function of a curve of genus `g` from `N_1..N_g`: Newton's identities give the
/// first half of `P_1`, the relation `c_{2g−k} = q^{g−k} c_k` gives the rest.
pub fn zeta_rational_curve(q: PrimePower, counts: &[u128], genus: usize) -> Result<RationalFunction> {
    if counts.len() < genus {
        return Err(Error::Underdetermined(format!("genus {genus} needs {genus} counts, got {}", counts.len())));
    }
    let qb = BigInt::from(q.q_big());
    let mut power_sums = Vec::with_capacity(genus + 1);
    power_sums.push(BigInt::zero());
    let mut qn = BigInt::one();
    for &n in &counts[..genus] {
        qn *= &qb;
        power_sums.push(&qn + 1 - BigInt::from(n));
    }
    let mut e = vec![Rational::one()];
    for k in 1..=genus {
        let mut acc = Rational::zero();
        for i in 1..=k {
            let term = &e[k - i] * Rational::from_integer(power_sums[i].clone());
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / rat(k as i64));
    }
    let mut c = vec![Rational::zero(); 2 * genus + 1];
    for k in 0..=genus {
        c[k] = if k % 2 == 0 { e[k].clone() } else { -e[k].clone() };
    }
    for k in 0..genus {
        let scale = Rational::from_integer(qb.pow((genus - k) as u32));
        c[2 * genus - k] = &c[k] * scale;
    }
    let p1 = Poly::new(c);
    if !p1.is_integral() {
        return Err(Error::NoSolution("counts do not come from a curve of this genus".into()));
    }
    let den = &Poly::one_minus(rat(1)) * &Poly::one_minus(q.q_rational());
    let f = RationalFunction::new(p1, den)?;
    if counts.len() > genus && !matches_all(&f, &zeta_from_counts(counts)?) {
        return Err(Error::NoSolution("counts beyond the genus disagree with the reconstruction".into()));
    }
    Ok(f)
}

/// Power sums `∑ λ^n`, `n = 1..m`, of the inverse roots of `P(t) = ∏ (1 − λt)`.
pub fn power_sums(p: &Poly, m: usize) -> Vec<Rational> {
    let log = PowerSeries::from_poly(p, m).log().expect("constant term 1");
    (1..=m).map(|n| -log.coeff(n) * rat(n as i64)).collect()
}

/// `N_n = ∑_w (−1)^w ∑_i λ_{w,i}^n` for `n = 1..m`.
pub fn lefschetz_counts(dec: &WeightDecomposition, m: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); m];
    for f in &dec.factors {
        for (slot, s) in out.iter_mut().zip(power_sums(&f.poly, m)) {
            if f.w % 2 == 0 {
                *slot += s;
            } else {
                *slot -= s;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(p: u64) -> PrimePower {
        PrimePower::prime(p).unwrap()
    }

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_i64(num), Poly::from_i64(den)).unwrap()
    }

    #[test]
    fn series_examples() {
        assert_eq!(zeta_from_counts(&[4, 10, 28]).unwrap(), PowerSeries::from_i64(&[1, 4, 13, 40]));
        assert_eq!(zeta_from_counts(&[0, 2, 0, 2]).unwrap(), PowerSeries::from_i64(&[1, 0, 1, 0, 1]));
        assert_eq!(zeta_from_counts(&[0, 0, 0]).unwrap(), PowerSeries::one(3));
        assert!(zeta_from_counts(&[]).is_err());
        assert!(series_warnings(&zeta_from_counts(&[1, 3]).unwrap()).is_empty());
        assert_eq!(series_warnings(&zeta_from_counts(&[1, 0]).unwrap()).len(), 1);
    }

    #[test]
    fn rational_examples() {
        // E: y^2 = x^3 + x over F_5 has N_n = 5^n + 1 − (α^n + ᾱ^n) with α = 1 + 2i
        let counts = [4, 32, 148, 640, 3044, 15392];
        let want = rf(&[1, -2, 5], &[1, -6, 5]);
        assert_eq!(zeta_rational(&counts, Some(&[1, 2, 1])).unwrap(), want);
        assert_eq!(zeta_rational(&counts, None).unwrap(), want);
        assert_eq!(zeta_rational_curve(pp(5), &counts[..1], 1).unwrap(), want);
        assert_eq!(zeta_rational_curve(pp(5), &counts, 1).unwrap(), want);

        let p2 = [13, 91, 757];
        assert_eq!(zeta_rational(&p2, Some(&[1, 0, 1, 0, 1])).unwrap(), rf(&[1], &[1, -13, 39, -27]));
        assert_eq!(zeta_rational(&[0, 2, 0, 2], Some(&[2])).unwrap(), rf(&[1], &[1, 0, -1]));
        assert_eq!(zeta_rational(&[0, 2, 0, 2], None).unwrap(), rf(&[1], &[1, 0, -1]));
    }

    #[test]
    fn rational_errors() {
        assert!(matches!(zeta_rational(&[4, 32], Some(&[1, 2, 1])), Err(Error::Underdetermined(_))));
        // not the counts of a genus-one curve: the last count breaks the pattern
        let bad = [4, 32, 148, 640, 3045];
        assert!(matches!(zeta_rational(&bad, Some(&[1, 2, 1])), Err(Error::NoSolution(_))));
        assert!(zeta_rational_curve(pp(5), &bad, 1).is_err());
        let err = zeta_rational_with_cap(&[1, 5, 2, 9, 3, 1, 4, 4], None, 2).unwrap_err();
        assert!(err.to_string().contains("supply Betti numbers"), "{err}");
    }

    #[test]
    fn lefschetz_round_trip() {
        let q = pp(5);
        let dec = WeightDecomposition::from_polys(
            q,
            vec![Poly::from_i64(&[1, -1]), Poly::from_i64(&[1, -2, 5]), Poly::from_i64(&[1, -5])],
        )
        .unwrap();
        let n: Vec<Rational> = [4, 32, 148, 640, 3044, 15392].iter().map(|&x| rat(x)).collect();
        assert_eq!(lefschetz_counts(&dec, 6), n);
        assert_eq!(dec.euler_characteristic(), 0);
        assert!(dec.is_poincare_symmetric());
        assert_eq!(dec.zeta(), rf(&[1, -2, 5], &[1, -6, 5]));
    }
}
