//! Linear-algebra identities behind the functional equations and the multiplicity criterion.

use num_traits::{One, Zero};
use serde::Serialize;

use super::sign_pow;
use crate::arith::{QMatrix, Rational};
use crate::error::{invalid, Result};
use crate::report::{Check, Verdict};
use crate::series::{log_det_series, Poly, PowerSeries};

/// `det(1 − t·f)`.
fn det_one_minus(f: &QMatrix) -> Poly {
    Poly::new(f.charpoly()).reverse(f.rows())
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingReport {
    pub dim: usize,
    pub lambda: String,
    /// `det(1 − t·g | W)`, low degree first.
    pub lhs: Vec<String>,
    /// `(−λt)^n / det(f) · det(1 − (λt)^{−1}·f | V)`.
    pub rhs: Vec<String>,
    pub holds: bool,
    pub verdict: Verdict,
}

impl PairingReport {
    pub fn to_check(&self) -> Check {
        Check::new("pairing-duality", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// For a perfect pairing `θ: W × V → K` (a `dim W × dim V` matrix) with `gᵀ·θ·f = λ·θ`,
/// compares `det(1 − t·g)` with `(−1)^n λ^n t^n / det(f) · det(1 − λ^{−1} t^{−1} f)` exactly.
pub fn pairing_duality_check(theta: &QMatrix, f: &QMatrix, g: &QMatrix, lambda: &Rational) -> Result<PairingReport> {
    if !f.is_square() || !g.is_square() || theta.rows() != g.rows() || theta.cols() != f.rows() {
        return invalid("θ must be dim W × dim V with f on V and g on W square");
    }
    if lambda.is_zero() {
        return invalid("λ must be nonzero");
    }
    if f.rows() != g.rows() || theta.inverse().is_none() {
        return invalid("θ is not a perfect pairing");
    }
    let det_f = f.determinant();
    if det_f.is_zero() || g.determinant().is_zero() {
        return invalid("f and g must be automorphisms");
    }
    if g.transpose().mul(theta).mul(f) != theta.scale(lambda) {
        return invalid("commutation gᵀ·θ·f = λ·θ fails; the pairing does not intertwine f and g");
    }
    let n = f.rows();
    let lhs = det_one_minus(g);
    let a = det_one_minus(f);
    // coefficient of t^{n−k} is (−1)^n a_k λ^{n−k} / det f
    let mut rhs = vec![Rational::zero(); n + 1];
    let factor = sign_pow(n) / &det_f;
    for k in 0..=n {
        rhs[n - k] = &factor * a.coeff(k) * num_traits::pow(lambda.clone(), n - k);
    }
    let rhs = Poly::new(rhs);
    let holds = lhs == rhs;
    Ok(PairingReport {
        dim: n,
        lambda: lambda.to_string(),
        lhs: lhs.coeff_strings(),
        rhs: rhs.coeff_strings(),
        holds,
        verdict: Verdict::from_bool(holds),
    })
}

/// Square integer Gram matrix `G[i][j] = χ(b_i, b_j)` of the Euler pairing on a basis of `K₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerPairingMatrix {
    g: QMatrix,
}

impl EulerPairingMatrix {
    pub fn new(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("the Euler pairing matrix must be square");
        }
        Ok(EulerPairingMatrix { g: QMatrix::from_i64(rows) })
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.g
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    /// Rank of `K₀/num`, i.e. of `G` over `Q`.
    pub rank: usize,
    pub left_kernel: Vec<Vec<String>>,
    pub right_kernel: Vec<Vec<String>>,
    pub kernels_agree: bool,
    pub verdict: Verdict,
}

impl KernelReport {
    pub fn to_check(&self) -> Check {
        Check::new("euler-pairing", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// Rank of `G` and its left and right kernels; FAIL when the kernels differ.
pub fn euler_pairing_kernel(g: &EulerPairingMatrix) -> KernelReport {
    let m = &g.g;
    let n = m.rows();
    let right = m.kernel();
    let left = m.transpose().kernel();
    let union: Vec<Vec<Rational>> = left.iter().chain(right.iter()).cloned().collect();
    let kernels_agree = left.len() == right.len() && QMatrix::span_rank(&union, n) == right.len();
    KernelReport {
        rank: m.rank(),
        left_kernel: left.iter().map(|v| strings(v)).collect(),
        right_kernel: right.iter().map(|v| strings(v)).collect(),
        kernels_agree,
        verdict: Verdict::from_bool(kernels_agree),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanReport {
    /// Multiplicity of `t − 1` in the characteristic polynomial.
    pub algebraic: usize,
    /// `dim ker(f − 1)`.
    pub geometric: usize,
    /// `dim (ker(1 − f) ∩ im(1 − f))`.
    pub intersection_dim: usize,
    pub direct_equal: bool,
    /// The map from invariants to coinvariants is injective: the intersection is zero.
    pub criterion_injective: bool,
    pub agree: bool,
}

/// Compares geometric and algebraic multiplicity of the eigenvalue 1 directly and through
/// the injectivity of `V^f → V_f`.
pub fn jordan_criterion(f: &QMatrix) -> Result<JordanReport> {
    if !f.is_square() {
        return invalid("the Frobenius matrix must be square");
    }
    if f.determinant().is_zero() {
        return invalid("the matrix is not an automorphism");
    }
    let n = f.rows();
    let cp = Poly::new(f.charpoly());
    let algebraic = if cp.deg() == 0 { 0 } else { cp.multiplicity_of(&Poly::linear_root(Rational::one())) };
    let id_minus_f = QMatrix::identity(n).sub(f);
    let kernel = id_minus_f.kernel();
    let geometric = kernel.len();
    let columns = id_minus_f.transpose();
    let image: Vec<Vec<Rational>> = (0..n).map(|i| columns.row(i).to_vec()).collect();
    let image_rank = id_minus_f.rank();
    let union: Vec<Vec<Rational>> = kernel.iter().chain(image.iter()).cloned().collect();
    let intersection_dim = geometric + image_rank - QMatrix::span_rank(&union, n);
    let direct_equal = geometric == algebraic;
    let criterion_injective = intersection_dim == 0;
    Ok(JordanReport {
        algebraic,
        geometric,
        intersection_dim,
        direct_equal,
        criterion_injective,
        agree: direct_equal == criterion_injective,
    })
}

/// `log(1 / det(1 − t·f)) = ∑ tr(f^n) t^n / n` to the given order, both sides computed exactly.
pub fn log_det_identity(f: &QMatrix, order: usize) -> Result<bool> {
    if !f.is_square() {
        return invalid("log-det identity needs a square matrix");
    }
    let traces = log_det_series(f, order)?;
    let via_det = PowerSeries::from_poly(&det_one_minus(f), order).inverse()?.log()?;
    Ok(traces == via_det)
}
