use affinity_bnp::{McmcConfig, PriorSettings};
use affinity_core::{affinity, auc, Density, TestDirection, TestPair};
use affinity_sim::{
    c3_weights, default_grid, generate_dataset, run_study, true_measures, ReplicationPlan,
    Scenario, ScenarioId, SpreadReading, StudyReport, SubParams,
};

fn phi(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Independent erfc: Maclaurin series of erf for |x| < 3, continued fraction beyond.
fn erfc(x: f64) -> f64 {
    if x.abs() < 3.0 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            n += 1.0;
            term *= -x * x / n;
            sum += term / (2.0 * n + 1.0);
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else if x > 0.0 {
        let mut f = 0.0;
        for k in (1..60).rev() {
            f = k as f64 / 2.0 / (x + f);
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + f)
    } else {
        2.0 - erfc(-x)
    }
}

fn binormal_kappa(m1: f64, s1: f64, m2: f64, s2: f64) -> f64 {
    let v = s1 * s1 + s2 * s2;
    (2.0 * s1 * s2 / v).sqrt() * (-(m1 - m2) * (m1 - m2) / (4.0 * v)).exp()
}

#[test]
fn scenario_registry_shape() {
    let count = |id| Scenario::new(id).sub_settings().len();
    assert_eq!(count(ScenarioId::U1), 9);
    assert_eq!(count(ScenarioId::U2), 9);
    for id in [
        ScenarioId::C1,
        ScenarioId::C2,
        ScenarioId::C3,
        ScenarioId::Septrap,
    ] {
        assert_eq!(count(id), 1);
    }
    assert_eq!(
        "septrap".parse::<ScenarioId>().unwrap(),
        ScenarioId::Septrap
    );
    assert_eq!("c2".parse::<ScenarioId>().unwrap(), ScenarioId::C2);
    assert!("U9".parse::<ScenarioId>().is_err());
}

#[test]
fn u1_truth_matches_binormal_formula() {
    let s = Scenario::new(ScenarioId::U1);
    let subs = s.sub_settings();
    let t = true_measures(&s, &subs[0], &[]).unwrap();
    assert!((t.kappa[0] - (-0.03125f64).exp()).abs() < 1e-8);
    assert!((t.kappa[0] - 0.96923).abs() < 5e-6);
    for sub in &subs {
        let SubParams::Normal { mu_d, sigma_d } = sub.params else {
            panic!("U1 sub-setting has normal parameters")
        };
        let t = true_measures(&s, sub, &[]).unwrap();
        assert!((t.kappa[0] - binormal_kappa(mu_d, sigma_d, 0.4, 0.8)).abs() < 1e-8);
        let a = phi((mu_d - 0.4) / (sigma_d * sigma_d + 0.64).sqrt());
        assert!((t.auc[0] - a).abs() < 1e-8, "{} {}", t.auc[0], a);
    }
}

#[test]
fn septrap_truth() {
    let s = Scenario::new(ScenarioId::Septrap);
    let t = true_measures(&s, &s.sub_settings()[0], &[]).unwrap();
    assert!(t.kappa[0] <= 1e-6);
    assert!((t.auc[0] - 0.5).abs() < 1e-8);
}

#[test]
fn c1_truth_at_zero() {
    let s = Scenario::new(ScenarioId::C1);
    let t = true_measures(&s, &s.sub_settings()[0], &[0.0]).unwrap();
    assert!(
        (t.auc[0] - 0.725_746_882_249_926_5).abs() < 1e-8,
        "{}",
        t.auc[0]
    );
    assert!((t.kappa[0] - binormal_kappa(2.0, 2.0, 0.5, 1.5)).abs() < 1e-8);
}

#[test]
fn conditional_truth_matches_closed_forms_on_grid() {
    let g = default_grid(21);
    let c1 = Scenario::new(ScenarioId::C1);
    let t1 = true_measures(&c1, &c1.sub_settings()[0], &g).unwrap();
    let c2 = Scenario::new(ScenarioId::C2);
    let t2 = true_measures(&c2, &c2.sub_settings()[0], &g).unwrap();
    for (j, &x) in g.iter().enumerate() {
        let k1 = binormal_kappa(2.0 + 4.0 * x, 2.0, 0.5 + x, 1.5);
        assert!((t1.kappa[j] - k1).abs() < 1e-8);
        let a1 = phi((1.5 + 3.0 * x) / (4.0f64 + 2.25).sqrt());
        assert!((t1.auc[j] - a1).abs() < 1e-8);
        let m_nd = (std::f64::consts::PI * (x + 1.0)).sin();
        let k2 = binormal_kappa(0.5 + x * x, 1.0, m_nd, 0.5);
        assert!((t2.kappa[j] - k2).abs() < 1e-8);
    }
}

#[test]
fn mixture_auc_closed_form_matches_quadrature() {
    let g = default_grid(9);
    for id in [ScenarioId::U2, ScenarioId::C3] {
        let s = Scenario::new(id);
        for sub in s.sub_settings() {
            let xs: Vec<Option<f64>> = if s.is_conditional() {
                g.iter().map(|&x| Some(x)).collect()
            } else {
                vec![None]
            };
            let t = true_measures(&s, &sub, &g).unwrap();
            for (j, x) in xs.into_iter().enumerate() {
                let pair = TestPair::new(
                    s.density(&sub, true, x).unwrap(),
                    s.density(&sub, false, x).unwrap(),
                );
                let q = auc(
                    &pair,
                    TestDirection::UpperTailed,
                    &pair.default_spec().unwrap(),
                )
                .unwrap();
                assert!(
                    (t.auc[j] - q).abs() < 1e-8,
                    "{id} {}: {} vs {q}",
                    sub.label,
                    t.auc[j]
                );
                let k = affinity(&pair, &pair.default_spec().unwrap()).unwrap();
                assert!((0.0..=1.0).contains(&k));
            }
        }
    }
}

#[test]
fn c3_weights_sum_to_one() {
    for i in 0..1000 {
        let x = -5.0 + 10.0 * i as f64 / 999.0;
        let (a, b) = c3_weights(x);
        assert!((a + b - 1.0).abs() < 1e-15);
    }
}

#[test]
fn spread_readings() {
    let sd = Scenario::new(ScenarioId::U1);
    let var = Scenario::with_reading(ScenarioId::U1, SpreadReading::Variance);
    let sub = &sd.sub_settings()[0];
    match (
        sd.density(sub, false, None).unwrap(),
        var.density(sub, false, None).unwrap(),
    ) {
        (Density::Normal(a), Density::Normal(b)) => {
            assert_eq!(a.sigma(), 0.8);
            assert!((b.sigma() - 0.8f64.sqrt()).abs() < 1e-15);
        }
        _ => panic!("U1 arms are normal"),
    }
    let u2 = Scenario::new(ScenarioId::U2);
    let c1 = u2
        .sub_settings()
        .into_iter()
        .find(|s| matches!(s.params, SubParams::Mixture { c, .. } if c == 1.0))
        .unwrap();
    let Density::Mixture(m) = u2.density(&c1, false, None).unwrap() else {
        panic!("U2 arms are mixtures")
    };
    let parts = m.normal_components().unwrap();
    assert_eq!(m.weights(), &[0.7, 0.3]);
    assert_eq!((parts[0].1.mu(), parts[0].1.sigma()), (0.1, 0.2));
    assert_eq!((parts[1].1.mu(), parts[1].1.sigma()), (3.1, 0.2));
    assert!(sd.density(sub, true, Some(0.0)).is_err());
}

#[test]
fn generated_datasets() {
    for id in [ScenarioId::U1, ScenarioId::C3] {
        let s = Scenario::new(id);
        let sub = &s.sub_settings()[0];
        let d = generate_dataset(&s, sub, 150, 9).unwrap();
        assert_eq!(d.arm_count(true), 150);
        assert_eq!(d.arm_count(false), 150);
        assert_eq!(d.has_covariate(), s.is_conditional());
        if let Some(xs) = d.arm_covariates_raw(true) {
            assert!(xs.iter().all(|x| (-1.0..=1.0).contains(x)));
        }
        assert_eq!(d, generate_dataset(&s, sub, 150, 9).unwrap());
        assert_ne!(
            d.rows()[0],
            generate_dataset(&s, sub, 150, 10).unwrap().rows()[0]
        );
    }
}

fn tiny_plan(n_per_arm: usize, reps: usize, seed: u64) -> ReplicationPlan {
    ReplicationPlan {
        n_reps: reps,
        mcmc: McmcConfig {
            burn_in: 200,
            thin: 4,
            n_keep: 50,
            m_aux: 3,
            seed,
        },
        xgrid: default_grid(5),
        ..ReplicationPlan::desk(n_per_arm, seed)
    }
}

#[test]
fn single_replicate_collapses_bands() {
    let s = Scenario::new(ScenarioId::U1);
    let report = run_study(&tiny_plan(60, 1, 5), &s).unwrap();
    assert_eq!(report.settings.len(), 9);
    assert!(report.all_succeeded());
    for set in &report.settings {
        let r = &set.replicates[0];
        assert_eq!(set.kappa.mean, r.kappa);
        assert_eq!(set.kappa.lo, r.kappa);
        assert_eq!(set.kappa.hi, r.kappa);
        assert_eq!(set.auc.mean, r.auc);
        assert!((0.0..=1.0).contains(&r.kappa[0]) && (0.0..=1.0).contains(&r.auc[0]));
    }
}

#[test]
fn reports_round_trip_and_agree() {
    let s = Scenario::new(ScenarioId::C1);
    let report = run_study(&tiny_plan(40, 2, 6), &s).unwrap();
    let json = report.to_json().unwrap();
    let back: StudyReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(report.spread_reading, SpreadReading::StandardDeviation);

    let csv = report.to_csv().unwrap();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let (measure, x, stat, v) = (&rec[3], &rec[4], &rec[5], rec[6].parse::<f64>().unwrap());
        let j = report.settings[0]
            .truth
            .grid
            .iter()
            .position(|g| *g == x.parse::<f64>().unwrap())
            .unwrap();
        let set = &report.settings[0];
        let expect = match (measure, stat) {
            ("kappa", "truth") => set.truth.kappa[j],
            ("kappa", "mc_mean") => set.kappa.mean[j],
            ("auc_upper", "p97.5") => set.auc.hi[j],
            ("kappa", s) if s.starts_with("rep_") => {
                set.replicates[s[4..].parse::<usize>().unwrap()].kappa[j]
            }
            _ => continue,
        };
        assert_eq!(v, expect);
        n += 1;
    }
    assert!(n > 0);

    let again = run_study(&tiny_plan(40, 2, 6), &s).unwrap();
    assert_eq!(again.to_json().unwrap(), json);
    assert_eq!(again.to_csv().unwrap(), csv);
}

#[test]
fn failed_replicates_are_recorded() {
    let s = Scenario::new(ScenarioId::C1);
    let mut plan = tiny_plan(30, 2, 7);
    // df + clusters must exceed dim - 1 = 3 for the inverse-Wishart draw.
    plan.prior = PriorSettings {
        iwish_df: Some(0.5),
        ..PriorSettings::default()
    };
    let report = run_study(&plan, &s).unwrap();
    assert!(!report.all_succeeded());
    assert_eq!(
        report.failure_count() + report.settings[0].replicates.len(),
        2
    );
    assert!(report.settings[0].failures[0]
        .error
        .contains("inverse-Wishart"));
}

#[test]
fn invalid_plans_are_rejected() {
    let s = Scenario::new(ScenarioId::C2);
    let mut plan = tiny_plan(40, 1, 1);
    plan.xgrid = vec![0.0, 1.5];
    assert!(run_study(&plan, &s).is_err());
    let plan = ReplicationPlan {
        n_reps: 0,
        ..tiny_plan(40, 1, 1)
    };
    assert!(run_study(&plan, &s).is_err());
    assert!(run_study(&tiny_plan(12, 1, 1), &s).is_err());
}

#[test]
fn estimates_improve_with_sample_size() {
    let s = Scenario::new(ScenarioId::U1);
    let sub = s.sub_settings()[4].clone();
    let truth = true_measures(&s, &sub, &[]).unwrap();
    let err = |n: usize| {
        let plan = tiny_plan(n, 4, 11);
        let e: f64 = (0..plan.n_reps)
            .map(|r| {
                let est = affinity_sim::run_replicate(&plan, &s, &sub, r).unwrap();
                (est.kappa[0] - truth.kappa[0]).abs() + (est.auc[0] - truth.auc[0]).abs()
            })
            .sum();
        e / plan.n_reps as f64
    };
    let (small, large) = (err(150), err(2000));
    assert!(
        large <= small,
        "n=2000 error {large} vs n=150 error {small}"
    );
}
