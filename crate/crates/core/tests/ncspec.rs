use proptest::prelude::*;
use zetalab_core::arith::{rat, PrimePower, QMatrix, Rational};
use zetalab_core::ncspec::{
    euler_pairing_kernel, factorization_check, jordan_criterion, log_det_identity, nc_functional_check, nc_l_adic_check,
    nc_spectrum_from_weights, nc_weil_check, nc_zeta, order_additivity_check, pairing_duality_check, reciprocity_check,
    spectrum_direct_sum, strong_tate_check, EulerPairingMatrix, NcSpectrum, Parity,
};
use zetalab_core::report::Verdict;
use zetalab_core::series::Poly;
use zetalab_core::zeta::{WeightDecomposition, DEFAULT_SAMPLES};

fn pp(p: u64, r: u32) -> PrimePower {
    PrimePower::new(p, r).unwrap()
}

fn dec(q: PrimePower, polys: &[&[i64]]) -> WeightDecomposition {
    WeightDecomposition::from_polys(q, polys.iter().map(|c| Poly::from_i64(c)).collect()).unwrap()
}

/// `P^n` over `F_q`: `P_{2k} = 1 − q^k t`.
fn projective(n: usize, q: PrimePower) -> WeightDecomposition {
    let qi = q.q().unwrap() as i64;
    let polys = (0..=2 * n)
        .map(|w| if w % 2 == 0 { Poly::from_i64(&[1, -qi.pow(w as u32 / 2)]) } else { Poly::one() })
        .collect();
    WeightDecomposition::from_polys(q, polys).unwrap()
}

fn corpus() -> Vec<WeightDecomposition> {
    let mut out: Vec<WeightDecomposition> = (0..=3).map(|n| projective(n, pp(3, 1))).collect();
    out.push(projective(2, pp(2, 2)));
    out.push(dec(pp(5, 1), &[&[1, -1], &[1, -2, 5], &[1, -5]]));
    out.push(dec(pp(7, 1), &[&[1, -1], &[1, 0, 7], &[1, -7]]));
    out.push(dec(pp(3, 2), &[&[1, -1], &[1, 6, 9], &[1, -9]]));
    out.push(dec(pp(3, 1), &[&[1, 0, -1]]));
    // E/F_5 × P^1
    out.push(dec(pp(5, 1), &[&[1, -1], &[1, -2, 5], &[1, -10, 25], &[1, -10, 125], &[1, -25]]));
    out
}

#[test]
fn corpus_spectra_pass_every_check() {
    for d in corpus() {
        let s = nc_spectrum_from_weights(&d).unwrap();
        let tag = format!("{:?}", d.factors.iter().map(|f| f.poly.coeff_strings()).collect::<Vec<_>>());
        assert_eq!(nc_weil_check(&s, 1e-9, 50).verdict, Verdict::Pass, "weil {tag}");
        assert_eq!(nc_l_adic_check(&s).verdict, Verdict::Pass, "l-adic {tag}");
        let f = nc_functional_check(&s, &DEFAULT_SAMPLES, 1e-9);
        assert_eq!(f.verdict, Verdict::Pass, "functional {tag}: {f:?}");
        assert!(f.reduced_applies, "{tag}");
        assert_eq!(reciprocity_check(&s).verdict, Verdict::Pass, "reciprocity {tag}");
        assert_eq!(factorization_check(&d).unwrap().verdict, Verdict::Pass, "factorization {tag}");
        let hi = d.d as i64 + 2;
        assert_eq!(order_additivity_check(&d, -2, hi).unwrap().verdict, Verdict::Pass, "orders {tag}");
    }
}

#[test]
fn projective_space_even_sign_and_tate_multiplicity() {
    for n in 0..=3 {
        let s = nc_spectrum_from_weights(&projective(n, pp(3, 1))).unwrap();
        let f = nc_functional_check(&s, &DEFAULT_SAMPLES, 1e-9);
        let want = if s.chi(Parity::Even).is_multiple_of(2) { 1 } else { -1 };
        assert_eq!(f.reduced_even.unwrap().sign, Some(want), "P^{n}");
        assert_eq!(want, if n % 2 == 0 { -1 } else { 1 });
        assert_eq!(strong_tate_check(&s, n + 1, None).unwrap().verdict, Verdict::Pass);
    }
}

fn random_spectrum(q: PrimePower, even: &[i64], odd: &[i64]) -> NcSpectrum {
    let r = |v: &[i64]| v.iter().map(|&x| rat(x)).collect::<Vec<Rational>>();
    NcSpectrum::from_eigenvalues(q, &r(even), &r(odd), 0).unwrap()
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-6i64..=-1, 1i64..=6]
}

/// Unit lower times unit upper triangular: determinant 1.
fn unimodular(n: usize, entries: &[i64]) -> QMatrix {
    let mut l = QMatrix::identity(n);
    let mut u = QMatrix::identity(n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        for j in 0..n {
            if j < i {
                l[(i, j)] = rat(*it.next().unwrap());
            } else if j > i {
                u[(i, j)] = rat(*it.next().unwrap());
            }
        }
    }
    l.mul(&u)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn direct_sum_multiplies_zeta(
        a_even in prop::collection::vec(nonzero(), 0..4),
        a_odd in prop::collection::vec(nonzero(), 0..4),
        b_even in prop::collection::vec(nonzero(), 0..4),
        b_odd in prop::collection::vec(nonzero(), 0..4),
    ) {
        let q = pp(3, 1);
        let a = random_spectrum(q, &a_even, &a_odd);
        let b = random_spectrum(q, &b_even, &b_odd);
        let s = spectrum_direct_sum(&a, &b).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            prop_assert_eq!(nc_zeta(&s, parity), nc_zeta(&a, parity).mul(&nc_zeta(&b, parity)));
        }
    }

    #[test]
    fn log_det_identity_on_random_5x5(entries in prop::collection::vec(-4i64..=4, 25)) {
        let rows: Vec<Vec<i64>> = entries.chunks(5).map(|c| c.to_vec()).collect();
        prop_assert!(log_det_identity(&QMatrix::from_i64(&rows), 12).unwrap());
    }

    #[test]
    fn pairing_identity_on_constructed_triples(
        t in prop::collection::vec(-3i64..=3, 12),
        f in prop::collection::vec(-3i64..=3, 12),
        lambda in nonzero(),
    ) {
        let theta = unimodular(4, &t);
        let f = unimodular(4, &f);
        let lambda = rat(lambda);
        let g = theta.transpose().inverse().unwrap()
            .mul(&f.transpose().inverse().unwrap())
            .mul(&theta.transpose())
            .scale(&lambda);
        prop_assert!(pairing_duality_check(&theta, &f, &g, &lambda).unwrap().holds);
    }

    #[test]
    fn jordan_criterion_matches_engineered_blocks(
        blocks in prop::collection::vec(1usize..=3, 0..3),
        others in prop::collection::vec(prop_oneof![Just(2i64), Just(-1), Just(3)], 0..3),
        p in prop::collection::vec(-2i64..=2, 30),
    ) {
        let n = blocks.iter().sum::<usize>() + others.len();
        prop_assume!(n > 0);
        let mut j = QMatrix::zeros(n, n);
        let mut at = 0;
        for &b in &blocks {
            for i in 0..b {
                j[(at + i, at + i)] = rat(1);
                if i + 1 < b {
                    j[(at + i, at + i + 1)] = rat(1);
                }
            }
            at += b;
        }
        for &v in &others {
            j[(at, at)] = rat(v);
            at += 1;
        }
        let pm = unimodular(n, &p);
        let f = pm.mul(&j).mul(&pm.inverse().unwrap());
        let r = jordan_criterion(&f).unwrap();
        prop_assert_eq!(r.algebraic, blocks.iter().sum::<usize>());
        prop_assert_eq!(r.geometric, blocks.len());
        prop_assert!(r.agree);
        prop_assert_eq!(r.criterion_injective, blocks.iter().all(|&b| b == 1));
    }

    // G = E1ᵀ·(M ⊕ 0)·E2: the kernels agree when E1 = E2 and differ after a shear that
    // moves the radical.
    #[test]
    fn euler_kernels_agree_exactly_for_two_sided_radicals(
        e in prop::collection::vec(-2i64..=2, 20),
        m in prop::collection::vec(-3i64..=3, 4),
        k in 1usize..=2,
    ) {
        let n = 4;
        let r = n - k;
        let mut core = QMatrix::zeros(n, n);
        let mi = unimodular(r, &m);
        for i in 0..r { for j in 0..r { core[(i, j)] = mi[(i, j)].clone(); } }
        let e1 = unimodular(n, &e);
        let mut shear = QMatrix::identity(n);
        shear[(0, n - 1)] = rat(1);
        let e2 = shear.mul(&e1);
        let to_rows = |g: &QMatrix| -> Vec<Vec<i64>> {
            (0..n).map(|i| (0..n).map(|j| { let v = &g[(i, j)]; assert!(v.is_integer()); i64::try_from(v.to_integer()).unwrap() }).collect()).collect()
        };
        let sym = e1.transpose().mul(&core).mul(&e1);
        let skew = e1.transpose().mul(&core).mul(&e2);
        let a = euler_pairing_kernel(&EulerPairingMatrix::new(&to_rows(&sym)).unwrap());
        let b = euler_pairing_kernel(&EulerPairingMatrix::new(&to_rows(&skew)).unwrap());
        prop_assert_eq!((a.rank, a.kernels_agree), (r, true));
        prop_assert_eq!((b.rank, b.kernels_agree), (r, false));
    }
}

#[test]
fn exceptional_pair_on_the_line() {
    let r = euler_pairing_kernel(&EulerPairingMatrix::new(&[vec![1, 2], vec![0, 1]]).unwrap());
    assert_eq!((r.rank, r.kernels_agree), (2, true));
    assert!(r.left_kernel.is_empty() && r.right_kernel.is_empty());
}
