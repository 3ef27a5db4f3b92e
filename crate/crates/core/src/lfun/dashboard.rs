//! Orders of closed-form L-functions at integers against supplied K-theory ranks, and the
//! bookkeeping of the K-theory decomposition into motivic cohomology.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use super::{l_closed_form, ArithmeticModel, KRanks};
use crate::error::{invalid, Result};
use crate::ncspec::Parity;
use crate::report::{Check, Verdict};

pub const WINDING_RADIUS: f64 = 0.25;
pub const WINDING_SAMPLES: usize = 256;
pub const SNAP_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindingOptions {
    pub radius: f64,
    pub samples: usize,
    /// Largest distance to the nearest integer accepted as an order.
    pub snap: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions { radius: WINDING_RADIUS, samples: WINDING_SAMPLES, snap: SNAP_TOLERANCE }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindingOrder {
    /// `(1/2π) ∮ d arg f`, before snapping.
    pub winding: f64,
    /// The nearest integer when within the snap tolerance.
    pub order: Option<i64>,
    pub residual: f64,
}

/// Order of `f` at `center`: zeros minus poles inside the circle, counted by the winding of `f`.
pub fn winding_order(
    f: impl Fn(Complex64) -> Result<Complex64>,
    center: Complex64,
    opts: &WindingOptions,
) -> Result<WindingOrder> {
    let WindingOptions { radius, samples, snap } = *opts;
    if samples < 8 || radius <= 0.0 || !(snap > 0.0 && snap < 0.5) {
        return invalid("winding count needs a positive radius, at least 8 samples and a snap tolerance in (0, 1/2)");
    }
    let point = |k: usize| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / samples as f64);
    let first = f(point(0))?;
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=samples {
        let cur = if k == samples { first } else { f(point(k))? };
        if cur.norm() == 0.0 || !cur.is_finite() {
            return Err(crate::Error::Roots(format!("the function vanishes or blows up on the circle at {}", point(k))));
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    let winding = total / (2.0 * PI);
    let nearest = winding.round();
    let residual = (winding - nearest).abs();
    let order = (residual < snap).then_some(nearest as i64);
    Ok(WindingOrder { winding, order, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct DashboardRow {
    pub j: i64,
    pub parity: Parity,
    pub ord_computed: Option<i64>,
    /// The K-group the order is compared against, e.g. `-dim K0/hom`.
    pub rank_label: String,
    /// The supplied fixture, signed as it enters the comparison.
    pub rank_supplied: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub verdict: Verdict,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Dashboard {
    pub subject: String,
    pub rows: Vec<DashboardRow>,
    pub verdict: Verdict,
}

impl Dashboard {
    /// One check per row; supplied ranks are listed as fixtures.
    pub fn to_checks(&self) -> Vec<Check> {
        self.rows
            .iter()
            .map(|r| {
                let name = format!("beilinson-{}-j{}", parity_name(r.parity), r.j);
                let check = Check::new(name, r.verdict, serde_json::to_value(r).expect("serializable"));
                match r.rank_supplied {
                    Some(v) => check.with_fixture(r.rank_label.trim_start_matches('-'), json!(v.abs())),
                    None => check,
                }
            })
            .collect()
    }
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

/// What `ord_{s=j}` is compared with, and whether the row decides anything.
fn expectation(parity: Parity, j: i64, ranks: &KRanks) -> (String, Option<i64>, bool) {
    let k = |n: i64| (format!("dim K{n}"), ranks.k(n as u32).map(|v| v as i64));
    let (label, value) = match (parity, j) {
        (_, j) if j >= 2 => return (String::new(), None, false),
        (Parity::Even, 1) => ("-dim K0/hom".to_string(), ranks.k0_hom.map(|v| -(v as i64))),
        (Parity::Even, 0) => k(1),
        (Parity::Even, -1) => k(3),
        (Parity::Even, j) => {
            let (l, v) = k(1 - 2 * j);
            return (l, v, false);
        }
        (Parity::Odd, 1) => ("dim K0^0".to_string(), ranks.k0_zero.map(|v| v as i64)),
        (Parity::Odd, 0) => k(2),
        (Parity::Odd, j) => {
            let (l, v) = k(2 - 2 * j);
            return (l, v, false);
        }
    };
    (label, value, true)
}

/// `ord_{s=j} L_even` and `ord_{s=j} L_odd` from the continuation, compared with the ranks.
pub fn order_dashboard(model: &ArithmeticModel, js: &[i64], ranks: &KRanks, opts: &WindingOptions) -> Dashboard {
    let mut rows = Vec::new();
    for &j in js {
        for parity in [Parity::Even, Parity::Odd] {
            rows.push(dashboard_row(model, parity, j, ranks, opts));
        }
    }
    let verdict = Verdict::combine(rows.iter().map(|r| r.verdict).filter(|v| *v != Verdict::Info));
    Dashboard { subject: model.name.clone(), rows, verdict }
}

fn dashboard_row(model: &ArithmeticModel, parity: Parity, j: i64, ranks: &KRanks, opts: &WindingOptions) -> DashboardRow {
    let (rank_label, rank_supplied, decides) = expectation(parity, j, ranks);
    let mut row = DashboardRow {
        j,
        parity,
        ord_computed: None,
        rank_label,
        rank_supplied,
        winding: None,
        residual: None,
        verdict: Verdict::Unsupported,
        note: String::new(),
    };
    if model.closed_form.is_none() {
        row.note = "continuation unavailable".into();
        return row;
    }
    let center = Complex64::new(j as f64, 0.0);
    match winding_order(|s| l_closed_form(model, parity, s), center, opts) {
        Err(e) => {
            row.verdict = Verdict::Indeterminate;
            row.note = e.to_string();
        }
        Ok(w) => {
            row.winding = Some(w.winding);
            row.residual = Some(w.residual);
            row.ord_computed = w.order;
            row.verdict = match (w.order, rank_supplied, decides) {
                (_, _, false) => {
                    row.note = if j >= 2 { "inside the half-plane of convergence" } else { "no conjectural statement" }.into();
                    Verdict::Info
                }
                (None, _, true) => {
                    row.note = "winding count did not snap to an integer".into();
                    Verdict::Indeterminate
                }
                (Some(_), None, true) => {
                    row.note = format!("no fixture for {}", row.rank_label);
                    Verdict::Unsupported
                }
                (Some(o), Some(r), true) => {
                    if o != r {
                        row.note = format!("order {o} but {} = {r}", row.rank_label);
                    }
                    Verdict::from_bool(o == r)
                }
            };
        }
    }
    row
}

#[derive(Debug, Clone, Serialize)]
pub struct KTheoryTerm {
    /// Twist `r`.
    pub r: i64,
    /// Cohomological degree `2r − n`.
    pub i: i64,
    pub dim: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KTheoryTable {
    pub d: usize,
    pub n: u32,
    /// `n/2 < r ≤ d + n`.
    pub full: Vec<KTheoryTerm>,
    /// `n/2 < r ≤ d + n − 1`.
    pub short: Vec<KTheoryTerm>,
    /// `dim K_n ⊗ Q` as the sum over the full window.
    pub rank: u64,
    pub rank_short: u64,
    /// `H^{2d+n}(Q(d+n))`, the only term the windows differ by.
    pub top: KTheoryTerm,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl KTheoryTable {
    pub fn to_check(&self) -> Check {
        Check::new("ktheory-decomposition", self.verdict, serde_json::to_value(self).expect("serializable"))
    }
}

/// Sums the supplied motivic ranks `h[(i, r)] = dim H^i(X; Q(r))` over both windows and checks
/// that they agree, which is the vanishing of the top term.
pub fn ktheory_decomposition_table(d: usize, n: u32, h: &BTreeMap<(i64, i64), u64>) -> Result<KTheoryTable> {
    if n == 0 {
        return invalid("the decomposition is stated for n > 0");
    }
    let (di, ni) = (d as i64, n as i64);
    let term = |r: i64| KTheoryTerm { r, i: 2 * r - ni, dim: h.get(&(2 * r - ni, r)).copied().unwrap_or(0) };
    let lo = ni / 2 + 1;
    let full: Vec<KTheoryTerm> = (lo..=di + ni).map(term).collect();
    let short: Vec<KTheoryTerm> = (lo..di + ni).map(term).collect();
    let rank = full.iter().map(|t| t.dim).sum();
    let rank_short = short.iter().map(|t| t.dim).sum();
    let top = term(di + ni);
    let witness = (top.dim != 0).then(|| {
        format!("dim H^{}(X; Q({})) = {} is nonzero, so the windows give {rank} and {rank_short}", top.i, top.r, top.dim)
    });
    Ok(KTheoryTable { d, n, full, short, rank, rank_short, verdict: Verdict::from_bool(witness.is_none()), top, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_counts_zeros_and_poles() {
        let z3 = |s: Complex64| Ok((s - 0.1).powu(3));
        assert_eq!(winding_order(z3, Complex64::new(0.0, 0.0), &WindingOptions::default()).unwrap().order, Some(3));
        let pole = |s: Complex64| Ok(1.0 / (s * s));
        assert_eq!(winding_order(pole, Complex64::new(0.0, 0.0), &WindingOptions::default()).unwrap().order, Some(-2));
        let outside = |s: Complex64| Ok(s - 1.0);
        assert_eq!(winding_order(outside, Complex64::new(0.0, 0.0), &WindingOptions::default()).unwrap().order, Some(0));
    }

    #[test]
    fn spec_q_rows() {
        let m = ArithmeticModel::spec_q();
        let dash = order_dashboard(&m, &[1, 0, -1], &m.ranks, &WindingOptions::default());
        assert_eq!(dash.verdict, Verdict::Pass, "{dash:?}");
        let even: Vec<Option<i64>> = dash.rows.iter().filter(|r| r.parity == Parity::Even).map(|r| r.ord_computed).collect();
        assert_eq!(even, vec![Some(-1), Some(0), Some(0)]);
    }

    #[test]
    fn gaussian_rows_see_the_beta_zero() {
        let m = ArithmeticModel::gaussian_integers();
        let dash = order_dashboard(&m, &[-1, -2], &m.ranks, &WindingOptions::default());
        let row = |j: i64| dash.rows.iter().find(|r| r.j == j && r.parity == Parity::Even).unwrap();
        assert_eq!((row(-1).ord_computed, row(-1).verdict), (Some(1), Verdict::Pass));
        // ζ(−2) = 0 and β(−2) = −1/2
        assert_eq!((row(-2).ord_computed, row(-2).verdict), (Some(1), Verdict::Info));
    }

    #[test]
    fn missing_continuation_or_fixture() {
        let e = ArithmeticModel::elliptic([0, 0, 0, 1, 0], &[2]).unwrap();
        let dash = order_dashboard(&e, &[1], &KRanks::default(), &WindingOptions::default());
        assert!(dash.rows.iter().all(|r| r.verdict == Verdict::Unsupported && r.ord_computed.is_none()));
        let q = ArithmeticModel::spec_q();
        let dash = order_dashboard(&q, &[0], &KRanks::default(), &WindingOptions::default());
        assert_eq!(dash.verdict, Verdict::Unsupported);
        let wrong = KRanks { k0_hom: Some(2), ..KRanks::default() };
        let dash = order_dashboard(&q, &[1], &wrong, &WindingOptions::default());
        assert_eq!(dash.rows[0].verdict, Verdict::Fail);
    }

    #[test]
    fn ktheory_windows() {
        let h = BTreeMap::from([((1, 1), 3)]);
        let t = ktheory_decomposition_table(0, 1, &h).unwrap();
        assert_eq!((t.rank, t.rank_short, t.verdict), (3, 0, Verdict::Fail));
        assert!(t.witness.is_some());
        let t = ktheory_decomposition_table(0, 2, &BTreeMap::new()).unwrap();
        assert_eq!((t.rank, t.verdict), (0, Verdict::Pass));
        // P¹, n = 3: r ∈ {2, 3, 4} with H^1(Q(2)) and H^3(Q(3)) = H^1(Q(2)) ⊗ Q(1) of rank 1 each
        let h = BTreeMap::from([((1, 2), 1), ((3, 3), 1)]);
        let t = ktheory_decomposition_table(1, 3, &h).unwrap();
        assert_eq!((t.full.len(), t.rank, t.verdict), (3, 2, Verdict::Pass));
        assert!(ktheory_decomposition_table(1, 0, &h).is_err());
    }
}
