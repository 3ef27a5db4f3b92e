use proptest::prelude::*;
use zetalab_core::arith::PrimePower;
use zetalab_core::counting::{
    count_points, count_points_with, count_series, parse_variety, CacheFile, CountCache, CountOptions, VarietySpec,
};

fn pp(p: u64, r: u32) -> PrimePower {
    PrimePower::new(p, r).unwrap()
}

fn corpus() -> Vec<VarietySpec> {
    [
        "projective 1; vars x,y",
        "elliptic a=[0,0,0,1,0]",
        "zerodim x^2 + 1",
        "projective 2; vars x,y,z; eq x^2 + y^2 - z^2",
        "affine 2; vars u,v; eq u*v - 1",
    ]
    .iter()
    .map(|t| parse_variety(t).unwrap())
    .collect()
}

#[test]
fn product_rule() {
    let specs = corpus();
    for a in &specs {
        for b in &specs {
            let prod = VarietySpec::product(a.clone(), b.clone());
            for q in [pp(2, 1), pp(3, 1)] {
                for n in 1..=3 {
                    let want = count_points(a, q, n).unwrap() * count_points(b, q, n).unwrap();
                    assert_eq!(count_points(&prod, q, n).unwrap(), want);
                }
            }
        }
    }
}

#[test]
fn projective_space_matches_closed_form() {
    for n in 1..=3usize {
        for q in [pp(2, 1), pp(3, 1), pp(2, 2), pp(5, 1), pp(7, 1), pp(2, 3), pp(3, 2)] {
            let big = q.q().unwrap();
            let want = (big.pow(n as u32 + 1) - 1) / (big - 1);
            assert_eq!(count_points(&VarietySpec::projective_space(n), q, 1).unwrap(), want, "P^{n} over F_{q}");
        }
    }
}

#[test]
fn segre_quadric_matches_product_of_lines() {
    let p1 = VarietySpec::projective_space(1);
    let prod = VarietySpec::product(p1.clone(), p1);
    let segre = parse_variety("projective 3; vars a,b,c,d; eq a*d - b*c").unwrap();
    let cache = CountCache::in_memory();
    let opts = CountOptions::default();
    let by_rule = count_series(&prod, pp(2, 1), 2, &cache, &opts).unwrap();
    let by_scan = count_series(&segre, pp(2, 1), 2, &cache, &opts).unwrap();
    assert_eq!(by_rule.counts, vec![9, 25]);
    assert_eq!(by_scan.counts, by_rule.counts);
}

// Root counts of x^2 + 1 follow from its factor degrees mod p: two linear
// factors when -1 is a square mod p, one quadratic factor otherwise.
#[test]
fn zero_dimensional_counts_follow_factor_degrees() {
    let spec = parse_variety("zerodim x^2 + 1").unwrap();
    for p in [3u64, 5, 13] {
        let degrees: Vec<u32> = if (0..p).any(|x| (x * x + 1) % p == 0) { vec![1, 1] } else { vec![2] };
        for n in 1..=6u32 {
            let want: u32 = degrees.iter().filter(|&&d| n % d == 0).sum();
            assert_eq!(count_points(&spec, pp(p, 1), n).unwrap(), want as u128, "p={p} n={n}");
        }
    }
}

#[test]
fn persistent_cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let spec = parse_variety("projective 2; vars x,y,z; eq x^3 + y^3 + z^3").unwrap();
    let opts = CountOptions::default();
    let fresh = count_series(&spec, pp(7, 1), 3, &CountCache::in_memory(), &opts).unwrap();

    let cold = CountCache::persistent(dir.path()).unwrap();
    assert_eq!(count_series(&spec, pp(7, 1), 3, &cold, &opts).unwrap(), fresh);
    assert_eq!(cold.computed(), 3);

    let warm = CountCache::persistent(dir.path()).unwrap();
    assert_eq!(count_series(&spec, pp(7, 1), 3, &warm, &opts).unwrap(), fresh);
    assert_eq!(warm.computed(), 0);

    let path = warm.file_path(&spec.fingerprint(), pp(7, 1)).unwrap();
    let file: CacheFile = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(file.spec_hash, spec.fingerprint());
    assert_eq!(file.q, pp(7, 1));
    assert_eq!(file.counts["2"], fresh.counts[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stripe_count_does_not_change_counts(
        c in proptest::collection::vec(-3i64..4, 4),
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 1u32..=2,
    ) {
        let text = format!(
            "projective 2; vars x,y,z; eq {}*x^2 + {}*y*z + {}*x*z + {}*y^2 + z^2",
            c[0], c[1], c[2], c[3]
        );
        let spec = parse_variety(&text).unwrap();
        let one = CountOptions { stripes: 1, ..CountOptions::default() };
        let four = CountOptions { stripes: 4, ..CountOptions::default() };
        prop_assert_eq!(
            count_points_with(&spec, pp(p, 1), n, &one).unwrap(),
            count_points_with(&spec, pp(p, 1), n, &four).unwrap()
        );
    }
}
