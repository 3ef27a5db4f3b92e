//! Variety descriptions and exact point counts over finite fields.

mod cache;
mod dsl;
mod enumerate;
mod mpoly;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cache::{CacheFile, CountCache};
pub use dsl::parse_variety;
pub use mpoly::{CompiledPoly, MPoly};

use crate::arith::{fp_poly, FiniteField, PrimePower, DEFAULT_DEGREE_CAP};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Projective(usize),
    Affine(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    ProjectiveSpace { n: usize },
    /// Weierstrass model `y²z + a1·xyz + a3·yz² = x³ + a2·x²z + a4·xz² + a6·z³`, `a = [a1,a2,a3,a4,a6]`.
    EllipticCurve { a: [i64; 5] },
    PlaneProjectiveCurve { vars: Vec<String>, poly: MPoly },
    ProjectiveHypersurface { n: usize, vars: Vec<String>, poly: MPoly },
    Product { left: Box<VarietySpec>, right: Box<VarietySpec> },
    /// Monic `f`, low degree first; the points are the roots of `f`.
    ZeroDimensional { coeffs: Vec<i64> },
    RawSystem { ambient: Ambient, vars: Vec<String>, polys: Vec<MPoly> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Integral,
    Finite(PrimePower),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietySpec {
    pub kind: Kind,
    pub base: Base,
}

impl VarietySpec {
    pub fn new(kind: Kind) -> Self {
        VarietySpec { kind, base: Base::Integral }
    }

    pub fn projective_space(n: usize) -> Self {
        Self::new(Kind::ProjectiveSpace { n })
    }

    pub fn elliptic(a: [i64; 5]) -> Self {
        Self::new(Kind::EllipticCurve { a })
    }

    pub fn zero_dimensional(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 2 || *coeffs.last().unwrap() != 1 {
            return invalid("zero-dimensional polynomial must be monic of positive degree");
        }
        Ok(Self::new(Kind::ZeroDimensional { coeffs }))
    }

    pub fn product(left: VarietySpec, right: VarietySpec) -> Self {
        Self::new(Kind::Product { left: Box::new(left), right: Box::new(right) })
    }

    pub fn over(mut self, q: PrimePower) -> Self {
        self.base = Base::Finite(q);
        self
    }

    /// Canonical text in the description language; parsing it gives back the same spec.
    pub fn canonical(&self) -> String {
        fn system(head: String, vars: &[String], polys: &[&MPoly]) -> String {
            let mut s = format!("{head}; vars {}", vars.join(","));
            for p in polys {
                s.push_str("; eq ");
                s.push_str(&p.render(vars));
            }
            s
        }
        match &self.kind {
            Kind::ProjectiveSpace { n } => {
                let vars: Vec<String> = (0..=*n).map(|i| format!("x{i}")).collect();
                system(format!("projective {n}"), &vars, &[])
            }
            Kind::EllipticCurve { a } => {
                let a: Vec<String> = a.iter().map(|c| c.to_string()).collect();
                format!("elliptic a=[{}]", a.join(","))
            }
            Kind::PlaneProjectiveCurve { vars, poly } => system("projective 2".into(), vars, &[poly]),
            Kind::ProjectiveHypersurface { n, vars, poly } => system(format!("projective {n}"), vars, &[poly]),
            Kind::Product { left, right } => format!("product {{ {} }} {{ {} }}", left.canonical(), right.canonical()),
            Kind::ZeroDimensional { coeffs } => {
                let mut p = MPoly::zero(1);
                for (i, &c) in coeffs.iter().enumerate() {
                    p = p.add(&MPoly::var(1, 0).pow(i as u32).mul(&MPoly::constant(1, BigInt::from(c))));
                }
                format!("zerodim {}", p.render(&["x".to_string()]))
            }
            Kind::RawSystem { ambient, vars, polys } => {
                let head = match ambient {
                    Ambient::Projective(n) => format!("projective {n}"),
                    Ambient::Affine(n) => format!("affine {n}"),
                };
                system(head, vars, &polys.iter().collect::<Vec<_>>())
            }
        }
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Dimension, where it follows from the form of the spec.
    pub fn dimension(&self) -> Option<usize> {
        match &self.kind {
            Kind::ProjectiveSpace { n } => Some(*n),
            Kind::EllipticCurve { .. } | Kind::PlaneProjectiveCurve { .. } => Some(1),
            Kind::ProjectiveHypersurface { n, .. } => Some(n - 1),
            Kind::Product { left, right } => Some(left.dimension()? + right.dimension()?),
            Kind::ZeroDimensional { .. } => Some(0),
            Kind::RawSystem { .. } => None,
        }
    }

    /// Betti numbers `β_0..β_{2d}` for builtin families, assuming smoothness.
    pub fn builtin_betti(&self) -> Option<Vec<u64>> {
        match &self.kind {
            Kind::ProjectiveSpace { n } => Some((0..=2 * n).map(|w| u64::from(w % 2 == 0)).collect()),
            Kind::EllipticCurve { .. } => Some(vec![1, 2, 1]),
            Kind::PlaneProjectiveCurve { poly, .. } => {
                let e = poly.total_degree() as u64;
                if e == 0 {
                    return None;
                }
                let genus = (e - 1) * (e - 2) / 2;
                Some(vec![1, 2 * genus, 1])
            }
            Kind::ProjectiveHypersurface { n, poly, .. } => hypersurface_betti(*n, poly.total_degree()),
            Kind::Product { left, right } => {
                let (a, b) = (left.builtin_betti()?, right.builtin_betti()?);
                let mut out = vec![0; a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                Some(out)
            }
            Kind::ZeroDimensional { coeffs } => Some(vec![coeffs.len() as u64 - 1]),
            Kind::RawSystem { .. } => None,
        }
    }
}

/// Betti numbers of a smooth degree-`e` hypersurface in P^n: ones in the even
/// weights away from the middle, the middle fixed by the Euler characteristic.
fn hypersurface_betti(n: usize, e: u32) -> Option<Vec<u64>> {
    if e == 0 || n == 0 {
        return None;
    }
    let d = n - 1;
    let e = e as i128;
    let chi = ((1 - e).checked_pow(n as u32 + 1)? - 1) / e + n as i128 + 1;
    let others = (0..=2 * d).filter(|&w| w % 2 == 0 && w != d).count() as i128;
    let sign = if d.is_multiple_of(2) { 1 } else { -1 };
    let middle = sign * (chi - others);
    if middle < 0 {
        return None;
    }
    Some(
        (0..=2 * d)
            .map(|w| if w == d { middle as u64 } else { u64::from(w % 2 == 0) })
            .collect(),
    )
}

/// Point counts `N_1..N_m` over `F_{q^n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCounts {
    pub q: PrimePower,
    pub counts: Vec<u128>,
    pub fingerprint: String,
}

impl PointCounts {
    pub fn new(q: PrimePower, counts: Vec<u128>) -> Self {
        PointCounts { q, counts, fingerprint: String::new() }
    }
}

#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Largest number of candidate tuples one count may enumerate.
    pub budget: u128,
    /// Number of disjoint ranges the candidate space is split into.
    pub stripes: usize,
    pub degree_cap: usize,
    /// Use closed forms where they exist instead of enumerating.
    pub prefer_closed_form: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: DEFAULT_BUDGET,
            stripes: rayon::current_num_threads(),
            degree_cap: DEFAULT_DEGREE_CAP,
            prefer_closed_form: false,
        }
    }
}

pub fn count_points(spec: &VarietySpec, q: PrimePower, n: u32) -> Result<u128> {
    count_points_with(spec, q, n, &CountOptions::default())
}

pub fn count_points_with(spec: &VarietySpec, q: PrimePower, n: u32, opts: &CountOptions) -> Result<u128> {
    if n == 0 {
        return invalid("extension degree must be positive");
    }
    if let Base::Finite(b) = spec.base {
        if b.p != q.p || !q.r.is_multiple_of(b.r) {
            return invalid(format!("spec is defined over F_{b} and cannot be counted over F_{q}"));
        }
    }
    let qn = q.extend(n);
    match &spec.kind {
        Kind::Product { left, right } => {
            let a = count_points_with(left, q, n, opts)?;
            if a == 0 {
                return Ok(0);
            }
            let b = count_points_with(right, q, n, opts)?;
            a.checked_mul(b).ok_or_else(|| Error::Invalid("point count overflows 128 bits".into()))
        }
        Kind::ZeroDimensional { coeffs } => {
            let ints: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
            let f = fp_poly::from_int_coeffs(&ints, q.p);
            Ok(fp_poly::distinct_roots_in_extension(&f, q.p, qn.r) as u128)
        }
        Kind::ProjectiveSpace { n: dim } if opts.prefer_closed_form => {
            let big = qn.q().ok_or_else(|| Error::Invalid(format!("{qn} does not fit in 128 bits")))?;
            (0..=*dim as u32)
                .try_fold(0u128, |acc, i| acc.checked_add(big.checked_pow(i)?))
                .ok_or_else(|| Error::Invalid("point count overflows 128 bits".into()))
        }
        Kind::EllipticCurve { a } => {
            if qn.r == 1 && opts.prefer_closed_form {
                return Ok(elliptic_count_prime(a, q.p) as u128);
            }
            let field = FiniteField::extension(q, n, opts.degree_cap)?;
            elliptic_count(a, &field, opts.budget)
        }
        kind => {
            let field = FiniteField::extension(q, n, opts.degree_cap)?;
            let (blocks, polys) = match kind {
                Kind::ProjectiveSpace { n } => (enumerate::projective_blocks(&field, *n), vec![]),
                Kind::PlaneProjectiveCurve { poly, .. } => (enumerate::projective_blocks(&field, 2), vec![poly]),
                Kind::ProjectiveHypersurface { n, poly, .. } => (enumerate::projective_blocks(&field, *n), vec![poly]),
                Kind::RawSystem { ambient: Ambient::Projective(n), polys, .. } => {
                    (enumerate::projective_blocks(&field, *n), polys.iter().collect())
                }
                Kind::RawSystem { ambient: Ambient::Affine(n), polys, .. } => {
                    (enumerate::affine_block(*n), polys.iter().collect())
                }
                _ => unreachable!("handled above"),
            };
            let compiled: Vec<CompiledPoly> = polys.iter().map(|f| f.compile(q.p)).collect();
            enumerate::count_zeros(&field, &blocks, &compiled, opts.stripes, opts.budget)
        }
    }
}

/// `N_1..N_m`, each `(fingerprint, q, n)` computed at most once per cache.
pub fn count_series(
    spec: &VarietySpec,
    q: PrimePower,
    m: u32,
    cache: &CountCache,
    opts: &CountOptions,
) -> Result<PointCounts> {
    if m == 0 {
        return invalid("need at least one degree");
    }
    let fingerprint = spec.fingerprint();
    let counts = (1..=m)
        .map(|n| {
            cache
                .get_or_compute(&fingerprint, q, n, || count_points_with(spec, q, n, opts))
                .map_err(|e| Error::AtDegree { degree: n, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointCounts { q, counts, fingerprint })
}

fn elliptic_count(a: &[i64; 5], field: &FiniteField, budget: u128) -> Result<u128> {
    let q = field.order();
    let p = field.characteristic();
    let candidates = if p == 2 { q.saturating_mul(q) } else { q };
    if candidates > budget {
        return Err(Error::Budget { candidates, budget });
    }
    let c: Vec<_> = a.iter().map(|&x| field.from_int(&BigInt::from(x))).collect();
    let (a1, a2, a3, a4, a6) = (&c[0], &c[1], &c[2], &c[3], &c[4]);
    let cubic = |x: &[u64]| {
        let x2 = field.mul(x, x);
        let x3 = field.mul(&x2, x);
        let s = field.add(&x3, &field.mul(a2, &x2));
        field.add(&field.add(&s, &field.mul(a4, x)), a6)
    };
    let mut affine = 0u128;
    if p == 2 {
        for i in 0..q {
            let x = field.element(i);
            let rhs = cubic(&x);
            let lin = field.add(&field.mul(a1, &x), a3);
            for j in 0..q {
                let y = field.element(j);
                let lhs = field.mul(&y, &field.add(&y, &lin));
                if lhs == rhs {
                    affine += 1;
                }
            }
        }
    } else {
        let half = BigUint::from((q - 1) / 2);
        let four = field.from_u64(4);
        for i in 0..q {
            let x = field.element(i);
            let lin = field.add(&field.mul(a1, &x), a3);
            let disc = field.add(&field.mul(&lin, &lin), &field.mul(&four, &cubic(&x)));
            affine += if field.is_zero(&disc) {
                1
            } else if field.pow(&disc, &half) == field.one() {
                2
            } else {
                0
            };
        }
    }
    Ok(affine + 1)
}

/// `#E(F_p)` for a prime `p` via a table of squares, in `O(p)` word operations.
pub fn elliptic_count_prime(a: &[i64; 5], p: u64) -> u64 {
    let r = |c: i64| c.rem_euclid(p as i64) as u64;
    let [a1, a2, a3, a4, a6] = a.map(r);
    if p == 2 {
        let mut n = 1;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = (y * y + a1 * x * y + a3 * y) % 2;
                let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
                n += u64::from(lhs == rhs);
            }
        }
        return n;
    }
    let mut square = vec![false; p as usize];
    for y in 0..p {
        square[((y * y) % p) as usize] = true;
    }
    let mut n = 1u64;
    for x in 0..p {
        let lin = (a1 * x + a3) % p;
        let cubic = ((x * x % p * x) % p + a2 * (x * x % p) % p + a4 * x % p + a6) % p;
        let d = (lin * lin % p + 4 * cubic) % p;
        n += if d == 0 { 1 } else if square[d as usize] { 2 } else { 0 };
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn pp(p: u64, r: u32) -> PrimePower {
        PrimePower::new(p, r).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(count_points(&VarietySpec::projective_space(1), pp(3, 1), 1).unwrap(), 4);
        let e = parse_variety("elliptic a=[0,0,0,1,0]").unwrap();
        assert_eq!(count_points(&e, pp(5, 1), 1).unwrap(), 4);
        let z = parse_variety("zerodim x^2 + 1").unwrap();
        assert_eq!(count_points(&z, pp(3, 1), 2).unwrap(), 2);
    }

    // Every affine pair (x, y) is tested against the Weierstrass equation directly.
    fn weierstrass_brute(a: [i64; 5], p: u64) -> u64 {
        let r = |c: i64| c.rem_euclid(p as i64) as u64;
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                let lhs = (y * y + r(a[0]) * x * y + r(a[2]) * y) % p;
                let rhs = (x * x * x + r(a[1]) * x * x + r(a[3]) * x + r(a[4])) % p;
                n += u64::from(lhs == rhs);
            }
        }
        n
    }

    #[test]
    fn elliptic_paths_agree_with_brute_force() {
        for a in [[0, 0, 0, 1, 0], [1, -1, 0, -3, 2], [0, 1, 1, 0, 0], [1, 0, 1, 4, -6]] {
            let spec = VarietySpec::elliptic(a);
            for p in [2u64, 3, 5, 7, 11, 13] {
                let want = weierstrass_brute(a, p);
                assert_eq!(elliptic_count_prime(&a, p), want, "{a:?} p={p}");
                assert_eq!(count_points(&spec, pp(p, 1), 1).unwrap(), want as u128, "{a:?} p={p}");
            }
        }
    }

    #[test]
    fn elliptic_over_extension_matches_plane_curve_enumeration() {
        let e = parse_variety("elliptic a=[1,0,1,1,0]").unwrap();
        let c = parse_variety("projective 2; vars x,y,z; eq y^2*z + x*y*z + y*z^2 - x^3 - x*z^2").unwrap();
        for (p, n) in [(2, 1), (2, 3), (3, 2), (5, 2)] {
            assert_eq!(count_points(&e, pp(p, 1), n).unwrap(), count_points(&c, pp(p, 1), n).unwrap());
        }
    }

    #[test]
    fn series_examples() {
        let cache = CountCache::in_memory();
        let opts = CountOptions::default();
        let s = count_series(&VarietySpec::projective_space(1), pp(3, 1), 3, &cache, &opts).unwrap();
        assert_eq!(s.counts, vec![4, 10, 28]);
        let z = parse_variety("zerodim x^2 + 1").unwrap();
        assert_eq!(count_series(&z, pp(3, 1), 4, &cache, &opts).unwrap().counts, vec![0, 2, 0, 2]);
        let p1 = VarietySpec::projective_space(1);
        let prod = VarietySpec::product(p1.clone(), p1);
        assert_eq!(count_series(&prod, pp(2, 1), 2, &cache, &opts).unwrap().counts, vec![9, 25]);
    }

    #[test]
    fn errors() {
        let opts = CountOptions { budget: 100, ..CountOptions::default() };
        let err = count_points_with(&VarietySpec::projective_space(3), pp(5, 1), 1, &opts).unwrap_err();
        assert!(matches!(err, Error::Budget { candidates: 156, budget: 100 }));
        let cache = CountCache::in_memory();
        let err = count_series(&VarietySpec::projective_space(3), pp(2, 1), 3, &cache, &opts).unwrap_err();
        assert!(matches!(err, Error::AtDegree { degree: 3, .. }), "{err:?}");
        let err = count_points(&VarietySpec::projective_space(1), pp(2, 5), 5).unwrap_err();
        assert!(matches!(err, Error::DegreeCap { degree: 25, cap: 24 }));
        let over5 = VarietySpec::projective_space(1).over(pp(5, 1));
        assert!(count_points(&over5, pp(3, 1), 1).is_err());
        assert_eq!(count_points(&over5, pp(5, 2), 1).unwrap(), 26);
    }

    #[test]
    fn closed_forms_match_enumeration() {
        let closed = CountOptions { prefer_closed_form: true, ..CountOptions::default() };
        for n in 1..=3 {
            let s = VarietySpec::projective_space(n);
            for q in [pp(2, 1), pp(3, 1), pp(2, 2)] {
                for m in 1..=2 {
                    assert_eq!(count_points_with(&s, q, m, &closed).unwrap(), count_points(&s, q, m).unwrap());
                }
            }
        }
        let e = VarietySpec::elliptic([0, 0, 1, -1, 0]);
        assert_eq!(count_points_with(&e, pp(7, 1), 1, &closed).unwrap(), count_points(&e, pp(7, 1), 1).unwrap());
    }

    #[test]
    fn canonical_text_round_trips() {
        for text in [
            "projective 2; vars x,y,z; eq x^3 + y^3 + z^3",
            "elliptic a=[0,0,0,1,0]",
            "zerodim x^2 + 1",
            "product { projective 1; vars x0,x1 } { elliptic a=[0,0,0,-1,0] }",
            "affine 2; vars u,v; eq u*v - 1",
            "projective 3; vars a,b,c,d; eq a*d - b*c; eq a^2 - b*d",
        ] {
            let spec = parse_variety(text).unwrap();
            let again = parse_variety(&spec.canonical()).unwrap();
            assert_eq!(again, spec, "{text}");
            assert_eq!(again.fingerprint(), spec.fingerprint());
        }
        let a = parse_variety("projective 2; vars x,y,z; eq z^3+y^3+x^3").unwrap();
        let b = parse_variety("projective 2;vars x,y,z\neq x^3 + y^3 + z^3  # fermat").unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn builtin_betti_numbers() {
        let b = |t: &str| parse_variety(t).unwrap().builtin_betti().unwrap();
        assert_eq!(b("projective 2; vars x,y,z"), vec![1, 0, 1, 0, 1]);
        assert_eq!(b("projective 2; vars x,y,z; eq x^3+y^3+z^3"), vec![1, 2, 1]);
        assert_eq!(b("projective 2; vars x,y,z; eq x^4+y^4+z^4"), vec![1, 6, 1]);
        assert_eq!(b("projective 3; vars x,y,z,w; eq x*w - y*z"), vec![1, 0, 2, 0, 1]);
        assert_eq!(b("projective 3; vars x,y,z,w; eq x^3+y^3+z^3+w^3"), vec![1, 0, 7, 0, 1]);
        assert_eq!(b("projective 4; vars a,b,c,d,e; eq a^3+b^3+c^3+d^3+e^3"), vec![1, 0, 1, 10, 1, 0, 1]);
        assert_eq!(b("zerodim x^3 - 2"), vec![3]);
        assert_eq!(b("product { elliptic a=[0,0,0,1,0] } { elliptic a=[0,0,0,1,0] }"), vec![1, 4, 6, 4, 1]);
        assert_eq!(parse_variety("affine 1; vars x; eq x").unwrap().builtin_betti(), None);
    }

    #[test]
    fn cache_computes_each_entry_once() {
        let cache = Arc::new(CountCache::in_memory());
        let spec = VarietySpec::projective_space(2);
        let opts = CountOptions::default();
        std::thread::scope(|s| {
            for _ in 0..4 {
                let cache = cache.clone();
                let spec = spec.clone();
                let opts = opts.clone();
                s.spawn(move || count_series(&spec, pp(3, 1), 3, &cache, &opts).unwrap());
            }
        });
        assert_eq!(cache.computed(), 3);
    }
}
