use std::path::{Path, PathBuf};

use affinity_bnp::{
    fit_ddp, fit_dpm, posterior_affinity, posterior_affinity_conditional, posterior_auc,
    posterior_mean_density, AccuracySummary, McmcConfig, PosteriorPredictiveDensity,
};
use affinity_core::{
    affinity, affinity_normalized, auc, ovl, youden, youden_abs, AffineMap, BSplineBasis, Dataset,
    Density, GridDensity, Provenance, QuadratureSettings, RngStream, Standardization,
    TestDirection, TestPair, DEFAULT_YOUDEN_GRID,
};
use affinity_sim::{
    default_grid, fmt17, run_study, to_json_string, ReplicationPlan, Scenario, ScenarioId,
    StudyReport,
};
use serde::{Deserialize, Serialize};

use crate::config::{
    FitSettings, Resolved, RunConfig, SimulateSettings, DEFAULT_DENSITY_POINTS,
    DEFAULT_GRID_POINTS, DEFAULT_SEED,
};
use crate::data::{parse_dataset, ColumnMap};
use crate::error::CliError;

/// Density pair given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSpec {
    Binormal {
        d: (f64, f64),
        nd: (f64, f64),
    },
    Bibeta {
        d: (f64, f64),
        nd: (f64, f64),
    },
    Biexponential {
        d: f64,
        nd: f64,
    },
    Septrap,
    /// CSV with columns `y`, `f_d`, `f_nd`.
    Grid(PathBuf),
}

/// Parses `"a,b"` for the flag `key`.
pub fn parse_pair(key: &str, raw: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("{key}: expected two numbers 'a,b', got '{raw}'"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let a = parts[0].parse::<f64>().map_err(|_| bad())?;
    let b = parts[1].parse::<f64>().map_err(|_| bad())?;
    Ok((a, b))
}

pub fn parse_scalar(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: expected a number, got '{raw}'")))
}

fn usage_density(
    key: &str,
    r: Result<Density<f64>, affinity_core::DensityError>,
) -> Result<Density<f64>, CliError> {
    r.map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

fn read_grid_pair(path: &Path) -> Result<TestPair<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("{}: missing column '{name}'", path.display())))
    };
    let (iy, id, ind) = (col("y")?, col("f_d")?, col("f_nd")?);
    let (mut ys, mut fd, mut fnd) = (Vec::new(), Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let rec =
            rec.map_err(|e| CliError::Data(format!("{}: row {}: {e}", path.display(), k + 1)))?;
        let get = |i: usize, name: &str| -> Result<f64, CliError> {
            rec.get(i).unwrap_or("").parse::<f64>().map_err(|_| {
                CliError::Data(format!("row {}, column '{name}': not a number", k + 1))
            })
        };
        ys.push(get(iy, "y")?);
        fd.push(get(id, "f_d")?);
        fnd.push(get(ind, "f_nd")?);
    }
    Ok(TestPair::new(
        Density::Grid(GridDensity::new(ys.clone(), fd)?),
        Density::Grid(GridDensity::new(ys, fnd)?),
    ))
}

pub fn build_pair(spec: &PairSpec) -> Result<TestPair<f64>, CliError> {
    Ok(match spec {
        PairSpec::Binormal { d, nd } => TestPair::new(
            usage_density("--d", Density::normal(d.0, d.1))?,
            usage_density("--nd", Density::normal(nd.0, nd.1))?,
        ),
        PairSpec::Bibeta { d, nd } => TestPair::new(
            usage_density("--d", Density::beta(d.0, d.1))?,
            usage_density("--nd", Density::beta(nd.0, nd.1))?,
        ),
        PairSpec::Biexponential { d, nd } => TestPair::new(
            usage_density("--d", Density::exponential(*d))?,
            usage_density("--nd", Density::exponential(*nd))?,
        ),
        PairSpec::Septrap => {
            let s = Scenario::new(ScenarioId::Septrap);
            let sub = &s.sub_settings()[0];
            TestPair::new(s.density(sub, true, None)?, s.density(sub, false, None)?)
        }
        PairSpec::Grid(path) => read_grid_pair(path)?,
    })
}

/// All summary measures of one density pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub kappa: f64,
    /// `None` when either density is not square integrable.
    pub kappa_bar: Option<f64>,
    pub auc_upper: f64,
    pub auc_lower: f64,
    pub yi: f64,
    pub yi_cutoff: f64,
    pub yi_abs: f64,
    pub ovl: f64,
}

pub fn cmd_affinity(spec: &PairSpec) -> Result<MeasureReport, CliError> {
    let pair = build_pair(spec)?;
    let q = pair.spec(QuadratureSettings::default())?;
    let kappa_bar = if pair.f_d.is_square_integrable() && pair.f_nd.is_square_integrable() {
        Some(affinity_normalized(&pair, &q)?)
    } else {
        None
    };
    let yi = youden(&pair, TestDirection::UpperTailed, DEFAULT_YOUDEN_GRID)?;
    Ok(MeasureReport {
        kappa: affinity(&pair, &q)?,
        kappa_bar,
        auc_upper: auc(&pair, TestDirection::UpperTailed, &q)?,
        auc_lower: auc(&pair, TestDirection::LowerTailed, &q)?,
        yi: yi.yi,
        yi_cutoff: yi.cutoff,
        yi_abs: youden_abs(&pair, DEFAULT_YOUDEN_GRID)?.yi,
        ovl: ovl(&pair, &q)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmInfo {
    pub arm: String,
    pub n: usize,
    pub standardization: Standardization<f64>,
}

/// Contents of `<stem>.summary.json`. Conditional summaries carry their grid in
/// original covariate units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub config_hash: String,
    pub master_seed: u64,
    pub arms: Vec<ArmInfo>,
    pub covariate_map: Option<AffineMap<f64>>,
    pub summaries: Vec<AccuracySummary>,
}

/// Paths written by a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: PathBuf, text: &str, written: &mut Written) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    written.files.push(path);
    Ok(())
}

/// Contents of `<stem>.provenance.json`: everything that may differ between
/// otherwise identical runs, kept out of the result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceSidecar {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub input: Option<Provenance>,
    pub threads: usize,
    pub outputs: Vec<String>,
}

fn write_provenance<S>(
    stem: &Path,
    resolved: &Resolved<S>,
    input: Option<Provenance>,
    written: &mut Written,
) -> Result<(), CliError> {
    let sidecar = ProvenanceSidecar {
        command: resolved.command.clone(),
        version: resolved.version.clone(),
        config_hash: resolved.config_hash.clone(),
        master_seed: resolved.master_seed,
        input,
        threads: rayon::current_num_threads(),
        outputs: written
            .files
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
    };
    write_file(
        with_suffix(stem, ".provenance.json"),
        &to_json_string(&sidecar)?,
        written,
    )
}

fn header_line(hash: &str, seed: u64) -> String {
    format!("# config_hash={hash} master_seed={seed}\n")
}

pub fn resolve_fit(cfg: &RunConfig) -> FitSettings {
    FitSettings {
        y_col: cfg.y_col.clone().unwrap_or_else(|| "y".into()),
        d_col: cfg.d_col.clone().unwrap_or_else(|| "d".into()),
        x_col: cfg.x_col.clone(),
        mcmc: cfg.mcmc(McmcConfig::application(DEFAULT_SEED)),
        prior: cfg.prior(),
        direction: cfg.direction.unwrap_or_default(),
        quadrature_points: cfg.quadrature_points(),
        grid_points: cfg.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
        density_points: cfg.density_points.unwrap_or(DEFAULT_DENSITY_POINTS),
    }
}

fn check_fit_settings(s: &FitSettings) -> Result<(), CliError> {
    s.mcmc.validate()?;
    s.prior.validate()?;
    if s.grid_points < 1 || s.density_points < 2 || s.quadrature_points < 8 {
        return Err(CliError::Usage(
            "grid_points >= 1, density_points >= 2 and quadrature_points >= 8 are required".into(),
        ));
    }
    Ok(())
}

fn arm_fit(
    data: &Dataset,
    diseased: bool,
    mcmc: McmcConfig,
    s: &FitSettings,
    conditional: bool,
) -> Result<Vec<PosteriorPredictiveDensity>, CliError> {
    let ys = data.arm_outcomes(diseased);
    Ok(if conditional {
        let xs = data.arm_covariates(diseased).expect("covariate present");
        fit_ddp(&ys, &xs, &mcmc, &s.prior, &BSplineBasis::cubic())?
    } else {
        fit_dpm(&ys, &mcmc, &s.prior)?
    })
}

/// Fits both arms (DPM always, DDP as well when a covariate column is given)
/// and writes the summary, curve, density and resolved-config files.
pub fn cmd_fit(
    input: &Path,
    cfg: &RunConfig,
    stem: &Path,
) -> Result<(FitSummary, Written), CliError> {
    let settings = resolve_fit(cfg);
    check_fit_settings(&settings)?;
    let resolved = Resolved::new("fit", settings.mcmc.seed, settings.clone())?;
    let cols = ColumnMap {
        y: settings.y_col.clone(),
        d: settings.d_col.clone(),
        x: settings.x_col.clone(),
    };
    let data = parse_dataset(input, &cols)?;
    data.require_per_arm(affinity_bnp::MIN_DPM_OBS)?;
    let conditional = data.has_covariate();

    let root = RngStream::new(settings.mcmc.seed);
    let seeded = |k: u64| McmcConfig {
        seed: root.split(k).seed(),
        ..settings.mcmc
    };
    let s = &settings;
    let ((d, nd), (dc, ndc)) = rayon::join(
        || {
            rayon::join(
                || arm_fit(&data, true, seeded(0), s, false),
                || arm_fit(&data, false, seeded(1), s, false),
            )
        },
        || {
            if conditional {
                let (a, b) = rayon::join(
                    || arm_fit(&data, true, seeded(2), s, true),
                    || arm_fit(&data, false, seeded(3), s, true),
                );
                (Some(a), Some(b))
            } else {
                (None, None)
            }
        },
    );
    let (d, nd) = (d?, nd?);
    let q = QuadratureSettings {
        n_points: s.quadrature_points,
        ..QuadratureSettings::default()
    };
    let mut summaries = vec![
        posterior_affinity(&d, &nd, q)?,
        posterior_auc(&d, &nd, s.direction, None)?,
    ];
    if let (Some(dc), Some(ndc)) = (dc, ndc) {
        let (dc, ndc) = (dc?, ndc?);
        let map = *data.covariate_map().expect("covariate present");
        let u = default_grid(s.grid_points);
        let original: Vec<f64> = u.iter().map(|&v| map.invert(v)).collect();
        for mut summary in [
            posterior_affinity_conditional(&dc, &ndc, &u, q)?,
            posterior_auc(&dc, &ndc, s.direction, Some(&u))?,
        ] {
            summary.grid = original.clone();
            summaries.push(summary);
        }
    }

    let arms = [true, false]
        .into_iter()
        .zip([&d, &nd])
        .map(|(diseased, draws)| ArmInfo {
            arm: arm_label(diseased).into(),
            n: data.arm_count(diseased),
            standardization: draws[0].standardization(),
        })
        .collect();
    let summary = FitSummary {
        config_hash: resolved.config_hash.clone(),
        master_seed: resolved.master_seed,
        arms,
        covariate_map: data.covariate_map().copied(),
        summaries,
    };

    let mut written = Written { files: Vec::new() };
    write_file(
        with_suffix(stem, ".summary.json"),
        &to_json_string(&summary)?,
        &mut written,
    )?;
    write_file(
        with_suffix(stem, ".curves.csv"),
        &curves_csv(&summary)?,
        &mut written,
    )?;
    let density = density_csv(&data, &d, &nd, s.density_points, &summary)?;
    write_file(with_suffix(stem, ".density.csv"), &density, &mut written)?;
    write_file(
        with_suffix(stem, ".resolved-config.json"),
        &to_json_string(&resolved)?,
        &mut written,
    )?;
    write_provenance(
        stem,
        &resolved,
        Some(data.provenance().clone()),
        &mut written,
    )?;
    Ok((summary, written))
}

fn arm_label(diseased: bool) -> &'static str {
    if diseased {
        "diseased"
    } else {
        "non_diseased"
    }
}

fn csv_text(rows: Vec<Vec<String>>, header: &[&str], preamble: String) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numeric(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| CliError::Numeric(format!("csv: {}", e.error())))?;
    Ok(preamble + &String::from_utf8(body).expect("csv writes UTF-8"))
}

pub fn curves_csv(summary: &FitSummary) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for s in &summary.summaries {
        for j in 0..s.mean.len() {
            rows.push(vec![
                s.measure.as_str().to_string(),
                s.grid.get(j).map(|&x| fmt17(x)).unwrap_or_default(),
                fmt17(s.mean[j]),
                fmt17(s.lo95[j]),
                fmt17(s.hi95[j]),
            ]);
        }
    }
    csv_text(
        rows,
        &["measure", "x", "mean", "lo95", "hi95"],
        header_line(&summary.config_hash, summary.master_seed),
    )
}

fn density_csv(
    data: &Dataset,
    d: &[PosteriorPredictiveDensity],
    nd: &[PosteriorPredictiveDensity],
    points: usize,
    summary: &FitSummary,
) -> Result<String, CliError> {
    let ys: Vec<f64> = data.rows().iter().map(|r| r.y).collect();
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let (a, b) = (lo - 0.5 * range, hi + 0.5 * range);
    let grid: Vec<f64> = (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect();
    let mut rows = Vec::with_capacity(2 * points);
    for (diseased, draws) in [(true, d), (false, nd)] {
        let f = posterior_mean_density(draws, &grid, None)?;
        for (y, v) in grid.iter().zip(f) {
            rows.push(vec![arm_label(diseased).to_string(), fmt17(*y), fmt17(v)]);
        }
    }
    csv_text(
        rows,
        &["arm", "y", "f_mean"],
        header_line(&summary.config_hash, summary.master_seed),
    )
}

pub fn resolve_simulate(
    scenario: &Scenario,
    cfg: &RunConfig,
    full: bool,
) -> Result<(SimulateSettings, ReplicationPlan), CliError> {
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let n = cfg.n_per_arm.unwrap_or(500);
    let base = if full {
        ReplicationPlan::full(n, seed)
    } else {
        ReplicationPlan::desk(n, seed)
    };
    let grid_points = cfg.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    let plan = ReplicationPlan {
        n_per_arm: n,
        n_reps: cfg.n_reps.unwrap_or(base.n_reps),
        mcmc: cfg.mcmc(McmcConfig::simulation(seed)),
        prior: cfg.prior(),
        xgrid: default_grid(grid_points),
        quadrature_points: cfg.quadrature_points(),
    };
    plan.validate(scenario)?;
    let settings = SimulateSettings {
        scenario: scenario.id.as_str().to_string(),
        spread_reading: scenario.reading,
        n_per_arm: plan.n_per_arm,
        n_reps: plan.n_reps,
        mcmc: plan.mcmc,
        prior: plan.prior,
        grid_points,
        quadrature_points: plan.quadrature_points,
    };
    Ok((settings, plan))
}

/// Contents of `<stem>.json` for `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateFile {
    pub config_hash: String,
    pub master_seed: u64,
    pub report: StudyReport,
}

/// Runs the study and writes `<stem>.json`, `<stem>.csv` and the resolved config.
pub fn cmd_simulate(
    scenario_id: &str,
    cfg: &RunConfig,
    full: bool,
    stem: &Path,
) -> Result<(StudyReport, Written), CliError> {
    let id: ScenarioId = scenario_id.parse()?;
    let scenario = Scenario::with_reading(id, cfg.spread_reading.unwrap_or_default());
    let (settings, plan) = resolve_simulate(&scenario, cfg, full)?;
    let resolved = Resolved::new("simulate", plan.master_seed(), settings)?;
    let report = run_study(&plan, &scenario)?;
    let file = SimulateFile {
        config_hash: resolved.config_hash.clone(),
        master_seed: resolved.master_seed,
        report,
    };
    let mut written = Written { files: Vec::new() };
    write_file(
        with_suffix(stem, ".json"),
        &to_json_string(&file)?,
        &mut written,
    )?;
    let csv = header_line(&file.config_hash, file.master_seed) + &file.report.to_csv()?;
    write_file(with_suffix(stem, ".csv"), &csv, &mut written)?;
    write_file(
        with_suffix(stem, ".resolved-config.json"),
        &to_json_string(&resolved)?,
        &mut written,
    )?;
    write_provenance(stem, &resolved, None, &mut written)?;
    Ok((file.report, written))
}
