use std::path::Path;

use affinity_bnp::{
    fit_ddp, fit_dpm, percentile, posterior_affinity, posterior_affinity_conditional,
    posterior_auc, McmcConfig, PosteriorPredictiveDensity, PriorSettings,
    POSTERIOR_QUADRATURE_POINTS,
};
use affinity_core::{
    BSplineBasis, Dataset, Observation, Provenance, QuadratureSettings, RngStream, TestDirection,
};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::output::{fmt17, to_json_string};
use crate::scenario::{default_grid, Scenario, ScenarioId, SpreadReading, SubSetting};
use crate::truth::{true_measures, TrueMeasures};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicationPlan {
    pub n_per_arm: usize,
    pub n_reps: usize,
    /// `mcmc.seed` is the master seed of the study.
    pub mcmc: McmcConfig,
    pub prior: PriorSettings,
    /// Covariate grid in `[-1, 1]`, used by conditional scenarios.
    pub xgrid: Vec<f64>,
    pub quadrature_points: usize,
}

impl ReplicationPlan {
    /// 20 replicates with the simulation MCMC settings and a 21-point grid.
    pub fn desk(n_per_arm: usize, seed: u64) -> Self {
        Self {
            n_per_arm,
            n_reps: 20,
            mcmc: McmcConfig::simulation(seed),
            prior: PriorSettings::default(),
            xgrid: default_grid(21),
            quadrature_points: POSTERIOR_QUADRATURE_POINTS,
        }
    }

    /// [`ReplicationPlan::desk`] with 100 replicates.
    pub fn full(n_per_arm: usize, seed: u64) -> Self {
        Self {
            n_reps: 100,
            ..Self::desk(n_per_arm, seed)
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.mcmc.seed
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidPlan(m));
        if self.n_reps == 0 {
            return bad("n_reps must be positive".into());
        }
        let min = if scenario.is_conditional() {
            affinity_bnp::MIN_DDP_OBS
        } else {
            affinity_bnp::MIN_DPM_OBS
        };
        if self.n_per_arm < min {
            return bad(format!("n_per_arm must be at least {min}"));
        }
        if self.quadrature_points < 8 {
            return bad("quadrature_points must be at least 8".into());
        }
        if scenario.is_conditional() {
            if self.xgrid.is_empty() {
                return bad("conditional scenarios need a covariate grid".into());
            }
            if let Some(x) = self.xgrid.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
                return bad(format!("grid value {x} outside [-1, 1]"));
            }
        }
        self.mcmc.validate()?;
        self.prior.validate()?;
        Ok(())
    }

    fn quadrature(&self) -> QuadratureSettings {
        QuadratureSettings {
            n_points: self.quadrature_points,
            ..QuadratureSettings::default()
        }
    }
}

/// Both arms, `n_per_arm` rows each, diseased rows first. Covariates are drawn
/// from `Unif(-1, 1)` for conditional scenarios and are not rescaled.
pub fn generate_dataset(
    scenario: &Scenario,
    sub: &SubSetting,
    n_per_arm: usize,
    seed: u64,
) -> Result<Dataset, SimError> {
    let root = RngStream::new(seed);
    let mut rows = Vec::with_capacity(2 * n_per_arm);
    for (k, diseased) in [true, false].into_iter().enumerate() {
        let mut rng = root.split(k as u64).rng();
        if scenario.is_conditional() {
            for _ in 0..n_per_arm {
                let x = rng.random_range(-1.0..=1.0);
                let y = scenario
                    .density(sub, diseased, Some(x))?
                    .sample_one(&mut rng)?;
                rows.push(Observation {
                    y,
                    diseased,
                    x: Some(x),
                });
            }
        } else {
            let d = scenario.density(sub, diseased, None)?;
            for y in d.sample_with(n_per_arm, &mut rng)? {
                rows.push(Observation {
                    y,
                    diseased,
                    x: None,
                });
            }
        }
    }
    let provenance = Provenance {
        source: format!("simulated:{}:{}:seed={seed}", scenario.id, sub.label),
        y_col: "y".into(),
        d_col: "d".into(),
        x_col: scenario.is_conditional().then(|| "x".to_string()),
    };
    Ok(Dataset::new(rows, provenance)?)
}

/// Posterior-mean point estimates from one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateEstimate {
    pub rep: usize,
    pub kappa: Vec<f64>,
    pub auc: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub rep: usize,
    pub error: String,
}

/// Monte Carlo mean and empirical 2.5/97.5 percentiles of the replicate estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mean: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Band {
    fn from_columns(rows: &[&[f64]], width: usize) -> Self {
        let mut band = Band {
            mean: Vec::with_capacity(width),
            lo: Vec::with_capacity(width),
            hi: Vec::with_capacity(width),
        };
        for j in 0..width {
            let mut col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let n = col.len() as f64;
            band.mean.push(if col.is_empty() {
                f64::NAN
            } else {
                col.iter().sum::<f64>() / n
            });
            col.sort_by(f64::total_cmp);
            band.lo.push(percentile(&col, 0.025));
            band.hi.push(percentile(&col, 0.975));
        }
        band
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubSettingReport {
    pub setting: SubSetting,
    pub truth: TrueMeasures,
    pub replicates: Vec<ReplicateEstimate>,
    pub failures: Vec<ReplicateFailure>,
    pub kappa: Band,
    pub auc: Band,
}

impl SubSettingReport {
    /// Largest `|MC mean - truth|` over the grid (or the scalar).
    pub fn max_kappa_bias(&self) -> f64 {
        max_abs_diff(&self.kappa.mean, &self.truth.kappa)
    }

    pub fn max_auc_bias(&self) -> f64 {
        max_abs_diff(&self.auc.mean, &self.truth.auc)
    }

    /// `max |MC mean - truth|` of `κ` restricted to grid points in `[lo, hi]`.
    pub fn max_kappa_bias_within(&self, lo: f64, hi: f64) -> f64 {
        self.truth
            .grid
            .iter()
            .zip(self.kappa.mean.iter().zip(&self.truth.kappa))
            .filter(|(x, _)| (lo..=hi).contains(*x))
            .map(|(_, (m, t))| (m - t).abs())
            .fold(0.0, f64::max)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub scenario: ScenarioId,
    pub spread_reading: SpreadReading,
    pub direction: TestDirection,
    pub plan: ReplicationPlan,
    pub settings: Vec<SubSettingReport>,
}

impl StudyReport {
    pub fn all_succeeded(&self) -> bool {
        self.settings.iter().all(|s| s.failures.is_empty())
    }

    pub fn failure_count(&self) -> usize {
        self.settings.iter().map(|s| s.failures.len()).sum()
    }

    pub fn to_json(&self) -> Result<String, SimError> {
        Ok(to_json_string(self)?)
    }

    /// One row per sub-setting x measure x grid point x statistic.
    pub fn to_csv(&self) -> Result<String, SimError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scenario",
            "setting",
            "label",
            "measure",
            "x",
            "statistic",
            "value",
        ])?;
        for s in &self.settings {
            let width = s.truth.kappa.len();
            for (measure, truth, band, pick) in [
                ("kappa", &s.truth.kappa, &s.kappa, 0usize),
                ("auc_upper", &s.truth.auc, &s.auc, 1),
            ] {
                for j in 0..width {
                    let x = s.truth.grid.get(j).map(|&v| fmt17(v)).unwrap_or_default();
                    let mut row = |stat: &str, v: f64| {
                        w.write_record([
                            self.scenario.as_str(),
                            &s.setting.index.to_string(),
                            &s.setting.label,
                            measure,
                            &x,
                            stat,
                            &fmt17(v),
                        ])
                    };
                    row("truth", truth[j])?;
                    row("mc_mean", band.mean[j])?;
                    row("p2.5", band.lo[j])?;
                    row("p97.5", band.hi[j])?;
                    for r in &s.replicates {
                        let v = if pick == 0 { r.kappa[j] } else { r.auc[j] };
                        row(&format!("rep_{:03}", r.rep), v)?;
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| SimError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
    }

    /// Writes `<stem>.json` and `<stem>.csv`.
    pub fn write(&self, stem: &Path) -> Result<(), SimError> {
        std::fs::write(stem.with_extension("json"), self.to_json()?)?;
        std::fs::write(stem.with_extension("csv"), self.to_csv()?)?;
        Ok(())
    }
}

/// Seeds of replicate `rep` of sub-setting `sub`: data, diseased fit, non-diseased fit.
pub fn replicate_seeds(master: u64, sub: usize, rep: usize) -> (u64, u64, u64) {
    let s = RngStream::new(master).split(sub as u64).split(rep as u64);
    (s.split(0).seed(), s.split(1).seed(), s.split(2).seed())
}

fn fit_arm(
    data: &Dataset,
    diseased: bool,
    plan: &ReplicationPlan,
    seed: u64,
    basis: &BSplineBasis<f64>,
) -> Result<Vec<PosteriorPredictiveDensity>, SimError> {
    let ys = data.arm_outcomes(diseased);
    let cfg = McmcConfig { seed, ..plan.mcmc };
    Ok(match data.arm_covariates_raw(diseased) {
        Some(xs) => fit_ddp(&ys, &xs, &cfg, &plan.prior, basis)?,
        None => fit_dpm(&ys, &cfg, &plan.prior)?,
    })
}

/// Generate, fit both arms and reduce to posterior-mean `κ` and AUC.
pub fn run_replicate(
    plan: &ReplicationPlan,
    scenario: &Scenario,
    sub: &SubSetting,
    rep: usize,
) -> Result<ReplicateEstimate, SimError> {
    let (data_seed, d_seed, nd_seed) = replicate_seeds(plan.master_seed(), sub.index, rep);
    let data = generate_dataset(scenario, sub, plan.n_per_arm, data_seed)?;
    let basis = BSplineBasis::cubic();
    let (d, nd) = rayon::join(
        || fit_arm(&data, true, plan, d_seed, &basis),
        || fit_arm(&data, false, plan, nd_seed, &basis),
    );
    let (d, nd) = (d?, nd?);
    let dir = TestDirection::UpperTailed;
    let (kappa, auc) = if scenario.is_conditional() {
        (
            posterior_affinity_conditional(&d, &nd, &plan.xgrid, plan.quadrature())?,
            posterior_auc(&d, &nd, dir, Some(&plan.xgrid))?,
        )
    } else {
        (
            posterior_affinity(&d, &nd, plan.quadrature())?,
            posterior_auc(&d, &nd, dir, None)?,
        )
    };
    Ok(ReplicateEstimate {
        rep,
        kappa: kappa.mean,
        auc: auc.mean,
    })
}

/// Runs every sub-setting x replicate. Failed replicates are logged, recorded in
/// the report and left out of the aggregates.
pub fn run_study(plan: &ReplicationPlan, scenario: &Scenario) -> Result<StudyReport, SimError> {
    plan.validate(scenario)?;
    let subs = scenario.sub_settings();
    let jobs: Vec<(usize, usize)> = (0..subs.len())
        .flat_map(|s| (0..plan.n_reps).map(move |r| (s, r)))
        .collect();
    let outcomes: Vec<Result<ReplicateEstimate, SimError>> = jobs
        .par_iter()
        .map(|&(s, r)| run_replicate(plan, scenario, &subs[s], r))
        .collect();

    let mut settings = Vec::with_capacity(subs.len());
    let mut outcomes = outcomes.into_iter();
    for sub in subs {
        let truth = true_measures(scenario, &sub, &plan.xgrid)?;
        let mut replicates = Vec::new();
        let mut failures = Vec::new();
        for rep in 0..plan.n_reps {
            match outcomes.next().expect("one outcome per job") {
                Ok(e) => replicates.push(e),
                Err(e) => {
                    log::warn!(
                        "{} [{}] replicate {rep} failed and is excluded: {e}",
                        scenario.id,
                        sub.label
                    );
                    failures.push(ReplicateFailure {
                        rep,
                        error: e.to_string(),
                    });
                }
            }
        }
        let width = truth.kappa.len();
        let krows: Vec<&[f64]> = replicates.iter().map(|r| r.kappa.as_slice()).collect();
        let arows: Vec<&[f64]> = replicates.iter().map(|r| r.auc.as_slice()).collect();
        settings.push(SubSettingReport {
            kappa: Band::from_columns(&krows, width),
            auc: Band::from_columns(&arows, width),
            setting: sub,
            truth,
            replicates,
            failures,
        });
    }
    Ok(StudyReport {
        scenario: scenario.id,
        spread_reading: scenario.reading,
        direction: TestDirection::UpperTailed,
        plan: plan.clone(),
        settings,
    })
}
