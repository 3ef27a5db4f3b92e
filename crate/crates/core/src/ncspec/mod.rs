//! Even/odd spectra of the cyclotomic Frobenius, their zeta functions and the checks on them.

mod checks;
mod lemmas;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{PrimePower, Rational};
use crate::error::{invalid, Error, Result};
use crate::series::{roots_with_moduli, Poly, RationalFunction};
use crate::zeta::WeightDecomposition;

pub use checks::{
    factorization_check, graded_shift_check, nc_functional_check, nc_l_adic_check, nc_weil_check, order_additivity_check,
    reciprocity_check, strong_tate_check, NcFunctionalReport, NcLAdicEntry, NcLAdicReport, NcWeilEntry, NcWeilReport,
    StrongTateReport,
};
pub use lemmas::{
    euler_pairing_kernel, jordan_criterion, log_det_identity, pairing_duality_check, EulerPairingMatrix, JordanReport,
    KernelReport, PairingReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_weight(w: usize) -> Parity {
        if w.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Eigenvalues sharing one square-free monic polynomial and one multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBlock {
    /// Monic, square-free, with the eigenvalues as roots.
    pub poly: Poly,
    pub multiplicity: usize,
    pub approx: Vec<Complex64>,
}

impl EigenBlock {
    fn new(poly: Poly, multiplicity: usize) -> Result<Self> {
        let approx = roots_with_moduli(&poly, 30)?.roots.iter().map(|r| r.value).collect();
        Ok(EigenBlock { poly, multiplicity, approx })
    }

    fn charpoly(&self) -> Poly {
        self.poly.pow(self.multiplicity as u32)
    }
}

/// Eigenvalue multisets of `F₀` (even) and `F₁` (odd).
#[derive(Debug, Clone, PartialEq)]
pub struct NcSpectrum {
    pub q: PrimePower,
    pub even: Vec<EigenBlock>,
    pub odd: Vec<EigenBlock>,
    /// `C` such that `q^C·λ` is an algebraic integer for every eigenvalue.
    pub integrality_shift: u32,
    pub provenance: Option<String>,
}

fn blocks_of(charpoly: &Poly) -> Result<Vec<EigenBlock>> {
    if charpoly.is_zero() {
        return invalid("characteristic polynomial is zero");
    }
    if charpoly.deg() > 0 && charpoly.constant_term().is_zero() {
        return invalid("eigenvalue 0: the Frobenius must be an automorphism");
    }
    charpoly.squarefree_decomposition().into_iter().map(|(p, k)| EigenBlock::new(p, k)).collect()
}

impl NcSpectrum {
    /// From the monic characteristic polynomials `∏ (t − λ)` of each parity.
    pub fn from_charpolys(q: PrimePower, even: &Poly, odd: &Poly, integrality_shift: u32) -> Result<Self> {
        Ok(NcSpectrum {
            q,
            even: blocks_of(even)?,
            odd: blocks_of(odd)?,
            integrality_shift,
            provenance: None,
        })
    }

    /// From explicit rational eigenvalues.
    pub fn from_eigenvalues(q: PrimePower, even: &[Rational], odd: &[Rational], integrality_shift: u32) -> Result<Self> {
        let cp = |vals: &[Rational]| vals.iter().fold(Poly::one(), |acc, v| &acc * &Poly::linear_root(v.clone()));
        Self::from_charpolys(q, &cp(even), &cp(odd), integrality_shift)
    }

    pub fn empty(q: PrimePower) -> Self {
        NcSpectrum { q, even: Vec::new(), odd: Vec::new(), integrality_shift: 0, provenance: None }
    }

    pub fn blocks(&self, parity: Parity) -> &[EigenBlock] {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// `∏ (t − λ)` over the multiset of the given parity.
    pub fn charpoly(&self, parity: Parity) -> Poly {
        self.blocks(parity).iter().fold(Poly::one(), |acc, b| &acc * &b.charpoly())
    }

    /// `χ₀` or `χ₁`: the size of the multiset.
    pub fn chi(&self, parity: Parity) -> usize {
        self.blocks(parity).iter().map(|b| b.poly.deg() * b.multiplicity).sum()
    }

    /// `det F`: the product of the eigenvalues.
    pub fn det(&self, parity: Parity) -> Rational {
        let cp = self.charpoly(parity);
        let c = cp.constant_term();
        if cp.deg().is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    /// Number of eigenvalues equal to `v`, counted with multiplicity.
    pub fn multiplicity_of(&self, parity: Parity, v: &Rational) -> usize {
        let cp = self.charpoly(parity);
        if cp.deg() == 0 {
            return 0;
        }
        cp.multiplicity_of(&Poly::linear_root(v.clone()))
    }

    /// Complex approximations of the eigenvalues, with multiplicity.
    pub fn approximations(&self, parity: Parity) -> Vec<Complex64> {
        self.blocks(parity)
            .iter()
            .flat_map(|b| b.approx.iter().flat_map(move |&z| std::iter::repeat_n(z, b.multiplicity)))
            .collect()
    }
}

/// `∏ (t − c·λ)` from `∏ (t − λ)`: `c^n · P(t / c)`.
pub(crate) fn scale_roots(p: &Poly, c: &Rational) -> Poly {
    let n = p.deg();
    p.subst_scale(&c.recip()).scale(&num_traits::pow(c.clone(), n))
}

fn q_pow(q: PrimePower, e: i64) -> Rational {
    let v = num_traits::pow(q.q_rational(), e.unsigned_abs() as usize);
    if e < 0 {
        v.recip()
    } else {
        v
    }
}

/// Eigenvalues `q^{−w/2}·λ` (even `w`) and `q^{−(w−1)/2}·λ` (odd `w`) of the weight factors.
pub fn nc_spectrum_from_weights(dec: &WeightDecomposition) -> Result<NcSpectrum> {
    let mut even = Poly::one();
    let mut odd = Poly::one();
    for f in &dec.factors {
        if f.betti() == 0 {
            continue;
        }
        let shift = (f.w / 2) as i64;
        let shifted = scale_roots(&f.eigen_poly(), &q_pow(dec.q, -shift));
        match Parity::of_weight(f.w) {
            Parity::Even => even = &even * &shifted,
            Parity::Odd => odd = &odd * &shifted,
        }
    }
    let mut spec = NcSpectrum::from_charpolys(dec.q, &even, &odd, dec.d as u32)?;
    spec.provenance = Some(format!("weights of a dimension-{} decomposition over F_{}", dec.d, dec.q));
    Ok(spec)
}

/// `det(1 − x·F)^{−1}` in `x = q^{−s}`.
pub fn nc_zeta(spec: &NcSpectrum, parity: Parity) -> RationalFunction {
    let cp = spec.charpoly(parity);
    RationalFunction::reciprocal_of(cp.reverse(cp.deg())).expect("eigenvalues are nonzero")
}

/// Union of the multisets, parity by parity.
pub fn spectrum_direct_sum(a: &NcSpectrum, b: &NcSpectrum) -> Result<NcSpectrum> {
    if a.q != b.q {
        return invalid(format!("spectra over F_{} and F_{} cannot be added", a.q, b.q));
    }
    let mut out = NcSpectrum::from_charpolys(
        a.q,
        &(&a.charpoly(Parity::Even) * &b.charpoly(Parity::Even)),
        &(&a.charpoly(Parity::Odd) * &b.charpoly(Parity::Odd)),
        a.integrality_shift.max(b.integrality_shift),
    )?;
    out.provenance = match (&a.provenance, &b.provenance) {
        (Some(x), Some(y)) => Some(format!("({x}) ⊕ ({y})")),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    };
    Ok(out)
}

/// Removes `count` copies of the eigenvalue 1 from the even part, one per exceptional object.
pub fn spectrum_strip_exceptional(spec: &NcSpectrum, count: usize) -> Result<NcSpectrum> {
    let have = spec.multiplicity_of(Parity::Even, &Rational::one());
    if have < count {
        return Err(Error::Invalid(format!(
            "cannot strip {count} exceptional objects: eigenvalue 1 has multiplicity {have} in the even part"
        )));
    }
    let even = spec
        .charpoly(Parity::Even)
        .exact_div(&Poly::linear_root(Rational::one()).pow(count as u32))
        .expect("multiplicity checked");
    let mut out = NcSpectrum::from_charpolys(spec.q, &even, &spec.charpoly(Parity::Odd), spec.integrality_shift)?;
    out.provenance = spec.provenance.clone();
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct BlockFile {
    poly: Vec<String>,
    multiplicity: usize,
    #[serde(default, skip_deserializing)]
    approx: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    q: PrimePower,
    even: Vec<BlockFile>,
    odd: Vec<BlockFile>,
    #[serde(default)]
    integrality_shift: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

fn block_file(b: &EigenBlock) -> BlockFile {
    BlockFile {
        poly: b.poly.coeff_strings(),
        multiplicity: b.multiplicity,
        approx: b.approx.iter().map(|z| [z.re, z.im]).collect(),
    }
}

fn parse_poly(coeffs: &[String]) -> Result<Poly> {
    coeffs
        .iter()
        .map(|c| c.parse::<Rational>().map_err(|e| Error::Invalid(format!("coefficient {c:?}: {e}"))))
        .collect::<Result<Vec<_>>>()
        .map(Poly::new)
}

fn charpoly_of(blocks: &[BlockFile]) -> Result<Poly> {
    let mut acc = Poly::one();
    for b in blocks {
        let p = parse_poly(&b.poly)?;
        if p.deg() == 0 || p.lead() != Rational::one() {
            return invalid("eigenvalue polynomials must be monic of positive degree");
        }
        acc = &acc * &p.pow(b.multiplicity as u32);
    }
    Ok(acc)
}

impl Serialize for NcSpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumFile {
            q: self.q,
            even: self.even.iter().map(block_file).collect(),
            odd: self.odd.iter().map(block_file).collect(),
            integrality_shift: self.integrality_shift,
            provenance: self.provenance.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NcSpectrum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = SpectrumFile::deserialize(d)?;
        let build = || -> Result<NcSpectrum> {
            let mut spec = NcSpectrum::from_charpolys(
                f.q,
                &charpoly_of(&f.even)?,
                &charpoly_of(&f.odd)?,
                f.integrality_shift,
            )?;
            spec.provenance = f.provenance.clone();
            Ok(spec)
        };
        build().map_err(D::Error::custom)
    }
}

/// `(−1)^n`.
pub(crate) fn sign_pow(n: usize) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub(crate) fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `x = ±1`.
pub(crate) fn is_unit_sign(x: &Rational) -> bool {
    x.is_one() || (-x).is_one()
}
