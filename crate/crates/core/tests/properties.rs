use std::f64::consts::{FRAC_PI_2, PI};

use normset::fock::{fock_gram, fock_norming_constant, fock_space, planar_rule, PlanarRegion};
use normset::*;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = SpherePoint> {
    (0.0..1.0f64, 0.0..(2.0 * PI)).prop_map(|(s, t)| SpherePoint::from_polar(s, t))
}

fn chart() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64, -2.0..2.0f64)
        .prop_map(|(a, b, e)| Complex64::new(a, b) * 10f64.powf(e))
}

fn section(k: usize) -> impl Strategy<Value = Section> {
    any::<u64>().prop_map(move |seed| Section::random_unit(k, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric(p in point(), q in point(), r in point()) {
        let d = fs_distance(&p, &q);
        prop_assert!((0.0..=FRAC_PI_2 + 1e-15).contains(&d));
        prop_assert!((d - fs_distance(&q, &p)).abs() < 1e-14);
        prop_assert!(fs_distance(&p, &p) < 1e-7);
        prop_assert!(d <= fs_distance(&p, &r) + fs_distance(&r, &q) + 1e-12);
    }

    #[test]
    fn unitaries_are_isometries(p in point(), q in point(), c in point()) {
        let u = Unitary::moving_origin_to(&c);
        let d = fs_distance(&u.apply(&p), &u.apply(&q));
        prop_assert!((d - fs_distance(&p, &q)).abs() < 1e-12);
        let back = u.inverse().apply(&u.apply(&p));
        prop_assert!(fs_distance(&back, &p) < 1e-7);
    }

    #[test]
    fn chart_round_trip(z in chart()) {
        let back = SpherePoint::from_chart(z).chart().unwrap();
        prop_assert!((back - z).norm() <= 1e-13 * (1.0 + z.norm()));
    }

    #[test]
    fn ball_test_matches_distance(z in chart(), w in chart(), r in 0.0..FRAC_PI_2) {
        let d = fs_distance(&SpherePoint::from_chart(z), &SpherePoint::from_chart(w));
        prop_assume!((d - r).abs() > 1e-9);
        prop_assert_eq!(in_ball_tan(z, w, r), d < r);
    }

    #[test]
    fn parseval_and_pointwise_bound(s in section(12), p in point()) {
        let space = make_space(12).unwrap();
        let rule = make_quadrature(14, 49).unwrap();
        let integral = integrate(|x| eval_pointnorm(&space, &s, x).unwrap(), &rule).unwrap();
        prop_assert!((integral - s.norm_sq()).abs() < 1e-12);
        prop_assert!(eval_pointnorm(&space, &s, &p).unwrap() <= 13.0 / PI + 1e-12);
    }

    #[test]
    fn kernel_is_invariant_and_bounded(p in point(), q in point(), c in point(), k in 0usize..40) {
        let u = Unitary::moving_origin_to(&c);
        let a = kernel_pointnorm(k, &p, &q);
        prop_assert!((a - kernel_pointnorm(k, &u.apply(&p), &u.apply(&q))).abs() < 1e-11 * (k as f64 + 1.0));
        prop_assert!(a <= (k as f64 + 1.0) / PI + 1e-12);
    }

    #[test]
    fn kernel_decays_off_the_diagonal(p in point(), q in point(), k in 1usize..300) {
        let d = fs_distance(&p, &q);
        let kf = k as f64;
        let a = kernel_pointnorm(k, &p, &q);
        prop_assert!(a <= (kf + 1.0) / PI * (-kf * d * d / 2.0).exp() * (1.0 + 1e-10) + 1e-300);
        if k >= 5 {
            prop_assert!(a <= 2.0 / PI * kf * (-kf.sqrt() * d).exp());
        }
    }

    #[test]
    fn peak_tail_is_rotation_covariant(y in point(), c in point(), r in 0.2..3.0f64) {
        let k = 16;
        let space = make_space(k).unwrap();
        let rule = make_quadrature(18, 65).unwrap();
        let u = Unitary::moving_origin_to(&c);
        let a = peak_tail_mass(&space, &y, r, &rule).unwrap();
        let b = peak_tail_mass(&space, &u.apply(&y), r, &rule).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!(a <= (-r * r).exp());
    }

    #[test]
    fn jacobi_spectrum_is_consistent(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = normset::numeric::SplitMix64::new(seed);
        let mut e = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            e[i * n + i] = Complex64::new(rng.next_f64() * 4.0 - 2.0, 0.0);
            for j in i + 1..n {
                e[i * n + j] = Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5);
                e[j * n + i] = e[i * n + j].conj();
            }
        }
        let m = HermitianMatrix::from_entries(n, e).unwrap();
        let r = eigh(&m).unwrap();
        prop_assert!((r.eigenvalues.iter().sum::<f64>() - m.trace()).abs() < 1e-12 * n as f64);
        for w in r.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for (l, v) in r.eigenvalues.iter().zip(&r.eigenvectors) {
            prop_assert!((m.quadratic_form(v) - l).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gram_is_additive_and_scales(seed in any::<u64>(), mass in 0.01..2.0f64, scale in 0.1..10.0f64) {
        let k = 8;
        let rule = make_quadrature(20, 40).unwrap();
        let a = MeasureSpec::random_atoms(seed, 7, mass).unwrap();
        let b = MeasureSpec::random_atoms(seed ^ 0xABCD, 5, mass * 0.5).unwrap();
        let (MeasureSpec::Atoms(xa), MeasureSpec::Atoms(xb)) = (&a, &b) else { unreachable!() };
        let both = MeasureSpec::atoms([xa.clone(), xb.clone()].concat()).unwrap();
        let sum = gram_matrix(k, &a, &rule).unwrap().add(&gram_matrix(k, &b, &rule).unwrap());
        prop_assert!(gram_matrix(k, &both, &rule).unwrap().max_abs_diff(&sum) < 1e-12);

        let scaled = MeasureSpec::atoms(xa.iter().map(|(p, m)| (*p, m * scale)).collect()).unwrap();
        let c1 = carleson_constant(k, &a, &rule).unwrap().carleson_constant;
        let c2 = carleson_constant(k, &scaled, &rule).unwrap().carleson_constant;
        prop_assert!((c2 / (scale * c1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn berezin_never_exceeds_carleson(seed in any::<u64>(), count in 1usize..30, k in 1usize..20) {
        let rule = make_quadrature(24, 64).unwrap();
        let mu = MeasureSpec::random_atoms(seed, count, 1.0 / k as f64).unwrap();
        let mut probes = probe_grid(50);
        probes.extend(mu.landmarks());
        let c = carleson_constant(k, &mu, &rule).unwrap().carleson_constant;
        prop_assert!(berezin_sup(k, &mu, &probes, &rule).unwrap() <= c + 2e-3);
        // Quantitative (2) => (3) step through the kernel lower bound with eps = 1.
        let b = berezin_sup(k, &mu, &probes, &rule).unwrap();
        let m = ball_mass_sup(k, &mu, &probes, &rule).unwrap();
        let factor = PI * k as f64 / ((k as f64 + 1.0) * (1.0 / (k as f64).sqrt()).cos().powi(2 * k as i32));
        prop_assert!(m <= factor * b + 1e-9);
    }

    #[test]
    fn domination_and_monotonicity(c in point(), r1 in 0.1..0.7f64, dr in 0.05..0.8f64, k in 1usize..24) {
        let rule = make_quadrature(32, 96).unwrap();
        let small = Region::cap(c, r1).unwrap();
        let large = Region::cap(c, (r1 + dr).min(FRAC_PI_2)).unwrap();
        let a = norming_constant(k, &small, &rule).unwrap();
        let b = norming_constant(k, &large, &rule).unwrap();
        for r in [&a, &b] {
            prop_assert!(r.lambda_min >= -1e-12 && r.lambda_max <= 1.0 + 2e-3);
        }
        if a.norming_constant.is_finite() {
            prop_assert!(a.norming_constant >= b.norming_constant - 1e-3 * a.norming_constant);
        }
    }

    #[test]
    fn complement_volumes_add_up(c in point(), r in 0.05..1.5f64) {
        let rule = make_quadrature(32, 128).unwrap();
        let cap = Region::cap(c, r).unwrap();
        let total = region_volume(&cap, &rule).unwrap() + region_volume(&cap.clone().complement(), &rule).unwrap();
        prop_assert!((total - PI).abs() < 1e-10);
        prop_assert!((region_volume(&cap, &rule).unwrap() / ball_volume(r).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn csv_numbers_round_trip(x in prop::num::f64::NORMAL) {
        let s = normset::cli::format_number(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fock_gram_is_dominated_by_bulk(seed in any::<u64>(), removed in 0.1..0.5f64) {
        let space = fock_space(16).unwrap();
        let rule = planar_rule(18, 512).unwrap();
        let g = PlanarRegion::periodic_holes_by_fraction(seed, 1.0, removed).unwrap();
        let r = fock_norming_constant(&space, &g, &rule).unwrap();
        prop_assert!(r.lambda_max <= r.bulk_lambda_max + 1e-6);
        prop_assert!(r.lambda_min <= r.bulk_lambda_min + 1e-6);
        prop_assert!(r.norming_constant >= 1.0 - 1e-9);
    }

    #[test]
    fn fock_holes_are_translation_covariant(seed in any::<u64>(), angle in 0.0..(2.0 * PI)) {
        let space = fock_space(32).unwrap();
        let rule = planar_rule(34, 1024).unwrap();
        let g = PlanarRegion::periodic_holes_by_fraction(seed, 1.0, 0.3).unwrap();
        let shifted = g.translated(Complex64::from_polar(0.3, angle));
        let a = fock_norming_constant(&space, &g, &rule).unwrap().norming_constant;
        let b = fock_norming_constant(&space, &shifted, &rule).unwrap().norming_constant;
        prop_assert!((a / b - 1.0).abs() < 0.15, "{} vs {}", a, b);
    }

    #[test]
    fn fock_relatively_dense_families_stay_bounded(delta in 0.4..0.7f64, family in 0usize..3) {
        // Three families with a fixed fraction delta at unit scale.
        let region = || -> PlanarRegion {
            match family {
                0 => PlanarRegion::periodic_holes_by_fraction(5, 1.0, 1.0 - delta).unwrap(),
                1 => PlanarRegion::periodic_holes(9, 1.0, (delta / PI).sqrt()).unwrap().complement(),
                _ => PlanarRegion::periodic_holes_by_fraction(13, 0.5, 1.0 - delta).unwrap(),
            }
        };
        let mut cs = Vec::new();
        for n in [16usize, 32, 64] {
            let space = fock_space(n).unwrap();
            let rule = planar_rule(n + 2, 768).unwrap();
            cs.push(fock_norming_constant(&space, &region(), &rule).unwrap().norming_constant);
        }
        let max = cs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = cs.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(max / min < 2.0, "family {}: {:?}", family, cs);
    }

    #[test]
    fn fock_gram_is_additive(seed in any::<u64>()) {
        let space = fock_space(10).unwrap();
        let rule = planar_rule(40, 256).unwrap();
        let g = PlanarRegion::periodic_holes_by_fraction(seed, 1.0, 0.3).unwrap();
        let sum = fock_gram(&space, &g, &rule).unwrap().add(&fock_gram(&space, &g.clone().complement(), &rule).unwrap());
        let bulk = fock_gram(&space, &PlanarRegion::All, &rule).unwrap();
        let d = sum.max_abs_diff(&bulk);
        prop_assert!(d < 1e-9, "{}", d);
    }
}
