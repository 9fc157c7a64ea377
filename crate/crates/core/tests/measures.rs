use affinity_core::special::std_normal_cdf;
use affinity_core::{
    affinity, affinity_bibeta, affinity_biexponential, affinity_binormal, affinity_conditional,
    affinity_curve, affinity_lr_identity_check, affinity_normalized, auc, auc_conditional,
    auc_mixture_normal, ovl, youden, youden_abs, BetaParams, ConditionalTestPair, Density,
    ExponentialParams, MixtureModel, NormalParams, QuadratureSettings, RngStream, TestDirection,
    TestPair, DEFAULT_YOUDEN_GRID,
};
use rand::Rng;

use TestDirection::{LowerTailed, UpperTailed};

fn normal(mu: f64, sigma: f64) -> Density<f64> {
    Density::normal(mu, sigma).unwrap()
}

fn binormal(md: f64, sd: f64, mn: f64, sn: f64) -> TestPair<f64> {
    TestPair::new(normal(md, sd), normal(mn, sn))
}

fn kappa(p: &TestPair<f64>) -> f64 {
    affinity(p, &p.default_spec().unwrap()).unwrap()
}

fn auc_of(p: &TestPair<f64>, dir: TestDirection) -> f64 {
    auc(p, dir, &p.default_spec().unwrap()).unwrap()
}

fn septrap() -> TestPair<f64> {
    let d = Density::mixture(
        vec![0.5, 0.5],
        vec![
            Density::trunc_normal(-6.0, -4.0, -5.0, 1.0 / 3.0).unwrap(),
            Density::trunc_normal(4.0, 6.0, 5.0, 1.0 / 3.0).unwrap(),
        ],
    )
    .unwrap();
    TestPair::new(d, Density::trunc_normal(-2.0, 2.0, 0.0, 0.25).unwrap())
}

fn random_density<R: Rng>(rng: &mut R) -> Density<f64> {
    match rng.random_range(0..6) {
        0 => normal(rng.random_range(-3.0..3.0), rng.random_range(0.2..3.0)),
        1 => {
            let a = rng.random_range(-3.0..1.0);
            let b = a + rng.random_range(0.5..4.0);
            Density::trunc_normal(
                a,
                b,
                rng.random_range(-2.0..2.0),
                rng.random_range(0.2..2.0),
            )
            .unwrap()
        }
        2 => Density::beta(rng.random_range(0.5..8.0), rng.random_range(0.5..8.0)).unwrap(),
        3 => Density::exponential(rng.random_range(0.2..5.0)).unwrap(),
        4 => Density::log_normal(rng.random_range(-1.0..1.0), rng.random_range(0.2..1.2)).unwrap(),
        _ => {
            let w = rng.random_range(0.1..0.9);
            Density::Mixture(
                MixtureModel::normals(&[
                    (w, rng.random_range(-3.0..0.0), rng.random_range(0.1..1.5)),
                    (
                        1.0 - w,
                        rng.random_range(0.0..3.0),
                        rng.random_range(0.1..1.5),
                    ),
                ])
                .unwrap(),
            )
        }
    }
}

#[test]
fn closed_forms_match_quadrature() {
    let mut rng = RngStream::new(11).rng();
    for _ in 0..100 {
        let d = NormalParams::new(rng.random_range(-4.0..4.0), rng.random_range(0.1..4.0)).unwrap();
        let n = NormalParams::new(rng.random_range(-4.0..4.0), rng.random_range(0.1..4.0)).unwrap();
        let p = TestPair::new(Density::Normal(d), Density::Normal(n));
        let q = kappa(&p);
        assert!((q - affinity_binormal(&d, &n)).abs() <= 1e-8, "{d:?} {n:?}");

        let d = BetaParams::new(rng.random_range(0.5..10.0), rng.random_range(0.5..10.0)).unwrap();
        let n = BetaParams::new(rng.random_range(0.5..10.0), rng.random_range(0.5..10.0)).unwrap();
        let p = TestPair::new(Density::Beta(d), Density::Beta(n));
        let q = kappa(&p);
        assert!(
            (q - affinity_bibeta(&d, &n)).abs() <= 1e-8,
            "{d:?} {n:?}: {q}"
        );

        let d = ExponentialParams::new(rng.random_range(0.1..10.0)).unwrap();
        let n = ExponentialParams::new(rng.random_range(0.1..10.0)).unwrap();
        let p = TestPair::new(Density::Exponential(d), Density::Exponential(n));
        let q = kappa(&p);
        assert!(
            (q - affinity_biexponential(&d, &n)).abs() <= 1e-8,
            "{d:?} {n:?}: {q}"
        );
    }
}

#[test]
fn reference_binormal_values() {
    let cases = [(0.0, 1.0, 0.5), (2.0, 0.61, 0.92), (3.0, 0.32, 0.98)];
    for (mu, k, a) in cases {
        let p = binormal(mu, 1.0, 0.0, 1.0);
        assert_eq!(format!("{:.2}", kappa(&p)), format!("{k:.2}"));
        assert_eq!(format!("{:.2}", auc_of(&p, UpperTailed)), format!("{a:.2}"));
    }
}

#[test]
fn bibeta_and_biexponential_examples() {
    let b = |a: f64, c: f64| BetaParams::new(a, c).unwrap();
    assert!((affinity_bibeta(&b(1.0, 1.0), &b(1.0, 1.0)) - 1.0).abs() < 1e-15);
    assert!((affinity_bibeta(&b(2.0, 2.0), &b(2.0, 2.0)) - 1.0).abs() < 1e-15);
    // B(3.5, 3.5) / B(2, 5): both sides by direct gamma products
    let oracle = {
        // Γ(3.5)² / Γ(7) and Γ(2)Γ(5)/Γ(7)
        let g35 = 3.323_350_970_447_842_6;
        (g35 * g35 / 720.0) / (24.0 / 720.0)
    };
    let v = affinity_bibeta(&b(2.0, 5.0), &b(5.0, 2.0));
    assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
    let p = TestPair::new(
        Density::beta(2.0, 5.0).unwrap(),
        Density::beta(5.0, 2.0).unwrap(),
    );
    assert!((kappa(&p) - oracle).abs() < 1e-8);

    let e = |l: f64| ExponentialParams::new(l).unwrap();
    assert!((affinity_biexponential(&e(1.0), &e(4.0)) - 0.8).abs() < 1e-15);
    for c in [0.01, 0.3, 7.0, 150.0] {
        let scaled = affinity_biexponential(&e(4.0 * c), &e(c));
        assert!((scaled - 0.8).abs() < 1e-14);
    }
}

#[test]
fn separation_trap() {
    let p = septrap();
    let spec = p.default_spec().unwrap();
    assert!(kappa(&p) <= 1e-6);
    assert!((auc_of(&p, UpperTailed) - 0.5).abs() <= 1e-3);
    assert!(affinity_normalized(&p, &spec).unwrap() <= 1e-6);
    assert!(ovl(&p, &spec).unwrap() <= 1e-12);
    let yi = youden(&p, UpperTailed, DEFAULT_YOUDEN_GRID).unwrap();
    let ya = youden_abs(&p, DEFAULT_YOUDEN_GRID).unwrap();
    assert!((yi.yi - 0.5).abs() <= 1e-3);
    assert!((ya.yi - 0.5).abs() <= 1e-3);
    // the absolute variant is maximal on both sides of the non-diseased support
    assert!(ya.optimal_region.iter().any(|&(a, b)| a < -3.5 && b > -2.5));
    assert!(ya.optimal_region.iter().any(|&(a, b)| a < 2.5 && b > 3.5));
    let lr = affinity_lr_identity_check(&p, 10_000, 5).unwrap();
    assert_eq!(lr.mc_estimate, 0.0);
}

#[test]
fn covariate_specific_example() {
    let c = ConditionalTestPair::new(
        |x: f64| Density::normal(x, 1.0),
        |x: f64| Density::normal(x - 3.0, 1.0 + x * x),
        (-10.0, 10.0),
    );
    let settings = QuadratureSettings::default();
    let k = affinity_conditional(&c, &[4.0, 0.0], settings).unwrap();
    assert_eq!(format!("{:.2}", k[0]), "0.34");
    let closed = |x: f64| {
        affinity_binormal(
            &NormalParams::new(x, 1.0).unwrap(),
            &NormalParams::new(x - 3.0, 1.0 + x * x).unwrap(),
        )
    };
    assert!((k[0] - closed(4.0)).abs() < 1e-8);
    assert!((k[1] - (-9.0f64 / 8.0).exp()).abs() < 1e-8);

    let a = auc_conditional(&c, &[0.0, 4.0], UpperTailed, settings).unwrap();
    assert!((a[0] - std_normal_cdf(3.0 / 2f64.sqrt())).abs() < 1e-8);
    // binormal identity at x = 4: Phi(3 / sqrt(290))
    assert!((a[1] - std_normal_cdf(3.0 / 290f64.sqrt())).abs() < 1e-8);
    assert_eq!(format!("{:.3}", a[1]), "0.570");

    let same = ConditionalTestPair::new(
        |x: f64| Density::normal(x, 1.0),
        |x: f64| Density::normal(x, 1.0),
        (-1.0, 1.0),
    );
    let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for v in affinity_conditional(&same, &xs, settings).unwrap() {
        assert!((v - 1.0).abs() < 1e-9);
    }
    for v in auc_conditional(&same, &xs, UpperTailed, settings).unwrap() {
        assert!((v - 0.5).abs() < 1e-9);
    }
}

#[test]
fn conditional_scenario_one_auc_at_zero() {
    let c = ConditionalTestPair::new(
        |x: f64| Density::normal(2.0 + 4.0 * x, 2.0),
        |x: f64| Density::normal(0.5 + x, 1.5),
        (-1.0, 1.0),
    );
    let a = auc_conditional(&c, &[0.0], UpperTailed, QuadratureSettings::default()).unwrap();
    assert!((a[0] - std_normal_cdf(0.6)).abs() < 1e-8);
}

#[test]
fn mixture_auc_closed_form() {
    let m = |parts: &[(f64, f64, f64)]| MixtureModel::normals(parts).unwrap();
    let a =
        auc_mixture_normal(&m(&[(1.0, 2.0, 1.0)]), &m(&[(1.0, 0.0, 1.0)]), UpperTailed).unwrap();
    assert!((a - std_normal_cdf(2f64.sqrt())).abs() < 1e-15);
    let bimodal = m(&[(0.7, 0.1, 0.2), (0.3, 3.1, 0.2)]);
    let same = auc_mixture_normal(&bimodal, &bimodal, UpperTailed).unwrap();
    assert!((same - 0.5).abs() < 1e-15);
    let other = m(&[(0.4, -1.0, 0.5), (0.6, 1.5, 1.3)]);
    let closed = auc_mixture_normal(&other, &bimodal, UpperTailed).unwrap();
    let p = TestPair::new(
        Density::Mixture(other.clone()),
        Density::Mixture(bimodal.clone()),
    );
    assert!((closed - auc_of(&p, UpperTailed)).abs() < 1e-8);
    let lower = auc_mixture_normal(&other, &bimodal, LowerTailed).unwrap();
    assert!((closed + lower - 1.0).abs() < 1e-12);
    let trunc = Density::mixture(
        vec![1.0],
        vec![Density::trunc_normal(0.0, 1.0, 0.0, 1.0).unwrap()],
    );
    if let Ok(Density::Mixture(t)) = trunc {
        assert!(auc_mixture_normal(&t, &bimodal, UpperTailed).is_err());
    }
}

#[test]
fn ovl_and_youden_binormal() {
    let p = binormal(2.0, 1.0, 0.0, 1.0);
    let spec = p.default_spec().unwrap();
    assert!((ovl(&p, &spec).unwrap() - 2.0 * std_normal_cdf(-1.0)).abs() < 1e-8);
    let y = youden(&p, UpperTailed, DEFAULT_YOUDEN_GRID).unwrap();
    assert!((y.yi - (2.0 * std_normal_cdf(1.0) - 1.0)).abs() < 1e-10);
    assert!((y.cutoff - 1.0).abs() < 1e-5);
    let same = binormal(0.0, 1.0, 0.0, 1.0);
    assert!(youden(&same, UpperTailed, 1000).unwrap().yi < 1e-12);
    assert!(youden_abs(&same, 1000).unwrap().yi < 1e-12);
    assert!((ovl(&same, &same.default_spec().unwrap()).unwrap() - 1.0).abs() < 1e-9);
    assert!(
        (affinity_normalized(&same, &same.default_spec().unwrap()).unwrap() - 1.0).abs() < 1e-9
    );
}

#[test]
fn bounds_orderings_and_symmetry_over_random_pairs() {
    let mut rng = RngStream::new(3).rng();
    for _ in 0..500 {
        let p = TestPair::new(random_density(&mut rng), random_density(&mut rng));
        let spec = p.default_spec().unwrap();
        let k = affinity(&p, &spec).unwrap_or_else(|e| panic!("{e} {p:?}"));
        let o = ovl(&p, &spec).unwrap_or_else(|e| panic!("{e} {p:?}"));
        let up = auc(&p, UpperTailed, &spec).unwrap_or_else(|e| panic!("{e} {p:?}"));
        let lo = auc(&p, LowerTailed, &spec).unwrap_or_else(|e| panic!("{e} {p:?}"));
        let y_up = youden(&p, UpperTailed, 1000)
            .unwrap_or_else(|e| panic!("{e} {p:?}"))
            .yi;
        let y_lo = youden(&p, LowerTailed, 1000)
            .unwrap_or_else(|e| panic!("{e} {p:?}"))
            .yi;
        let y_abs = youden_abs(&p, 1000)
            .unwrap_or_else(|e| panic!("{e} {p:?}"))
            .yi;
        for v in [k, o, up, lo, y_up, y_lo, y_abs] {
            assert!((0.0..=1.0).contains(&v));
        }
        assert!(o <= k + 1e-12, "ovl {o} > affinity {k} for {p:?}");
        assert!((up + lo - 1.0).abs() < 1e-6, "{up} + {lo} for {p:?}");
        assert!(y_abs >= y_up.max(y_lo) - 1e-12);

        let s = p.swapped();
        let s_spec = s.default_spec().unwrap_or_else(|e| panic!("{e} {p:?}"));
        assert!((affinity(&s, &s_spec).unwrap() - k).abs() <= 1e-12);
        assert!((auc(&s, UpperTailed, &s_spec).unwrap() - lo).abs() <= 1e-12);
    }
}

#[test]
fn monotone_transform_invariance() {
    let mut rng = RngStream::new(21).rng();
    for _ in 0..50 {
        let (md, sd) = (rng.random_range(-1.0..1.0), rng.random_range(0.2..1.0));
        let (mn, sn) = (rng.random_range(-1.0..1.0), rng.random_range(0.2..1.0));
        let base = binormal(md, sd, mn, sn);
        let k0 = kappa(&base);
        let a0 = auc_of(&base, UpperTailed);

        let logn = TestPair::new(
            Density::log_normal(md, sd).unwrap(),
            Density::log_normal(mn, sn).unwrap(),
        );
        assert!((kappa(&logn) - k0).abs() <= 1e-6);
        assert!((auc_of(&logn, UpperTailed) - a0).abs() <= 1e-6);

        let (a, b) = (rng.random_range(0.1..20.0), rng.random_range(-50.0..50.0));
        let affine = binormal(a * md + b, a * sd, a * mn + b, a * sn);
        assert!((kappa(&affine) - k0).abs() <= 1e-6);
        assert!((auc_of(&affine, UpperTailed) - a0).abs() <= 1e-6);
    }
}

#[test]
fn affinity_trends_to_zero_with_separation() {
    let mut last = 1.0;
    for delta in [0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let k = kappa(&binormal(delta / 2.0, 1.0, -delta / 2.0, 1.0));
        assert!(k <= last);
        last = k;
    }
    assert!(last < 1e-10);
}

#[test]
fn curve_integrates_to_affinity() {
    let p = TestPair::new(
        Density::beta(2.0, 3.0).unwrap(),
        Density::Mixture(MixtureModel::normals(&[(0.5, 0.2, 0.1), (0.5, 0.7, 0.2)]).unwrap()),
    );
    let spec = p.default_spec().unwrap();
    let (_, c) = affinity_curve(&p, &spec).unwrap();
    assert!(c.iter().all(|&v| v >= 0.0));
    let k = affinity(&p, &spec).unwrap();
    // same nodes, same weights: the curve's integral is the affinity
    let layout_sum = {
        use affinity_core::quadrature::Layout;
        let mut hints = p.f_d.hints();
        hints.extend(p.f_nd.hints());
        let layout = Layout::from_hints(spec.lower, spec.upper, &hints, spec.settings()).unwrap();
        layout.integrate_values(&c).unwrap()
    };
    assert_eq!(k, layout_sum);
}

#[test]
fn likelihood_ratio_identity() {
    let same = binormal(0.0, 1.0, 0.0, 1.0);
    let r = affinity_lr_identity_check(&same, 1000, 1).unwrap();
    assert_eq!(r.mc_estimate, 1.0);

    let p = binormal(2.0, 1.0, 0.0, 1.0);
    let r = affinity_lr_identity_check(&p, 1_000_000, 17).unwrap();
    assert!((r.quad_value - (-0.5f64).exp()).abs() < 1e-10);
    assert!(
        (r.mc_estimate - r.quad_value).abs() <= 3.0 * r.std_error,
        "{r:?}"
    );
}
