use affinity_core::{
    affinity, auc, auc_mixture_normal, Density, MixtureModel, TestDirection, TestPair,
};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::scenario::{Scenario, SubSetting};

/// True `κ` and upper-tailed AUC, scalar (empty grid) or on a covariate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueMeasures {
    pub grid: Vec<f64>,
    pub kappa: Vec<f64>,
    pub auc: Vec<f64>,
}

fn as_normal_mixture(d: &Density<f64>) -> Option<MixtureModel<f64>> {
    match d {
        Density::Normal(p) => MixtureModel::normals(&[(1.0, p.mu(), p.sigma())]).ok(),
        Density::Mixture(m) if m.normal_components().is_some() => Some(m.clone()),
        _ => None,
    }
}

fn measures_at(
    scenario: &Scenario,
    sub: &SubSetting,
    x: Option<f64>,
) -> Result<(f64, f64), SimError> {
    let pair = TestPair::new(
        scenario.density(sub, true, x)?,
        scenario.density(sub, false, x)?,
    );
    let kappa = affinity(&pair, &pair.default_spec()?)?;
    let auc_v = match (as_normal_mixture(&pair.f_d), as_normal_mixture(&pair.f_nd)) {
        (Some(d), Some(nd)) => auc_mixture_normal(&d, &nd, TestDirection::UpperTailed)?,
        _ => auc(&pair, TestDirection::UpperTailed, &pair.default_spec()?)?,
    };
    Ok((kappa, auc_v))
}

/// Ground truth by quadrature (`κ`) and the normal-mixture closed form (AUC,
/// quadrature otherwise). `xgrid` is used only by conditional scenarios.
pub fn true_measures(
    scenario: &Scenario,
    sub: &SubSetting,
    xgrid: &[f64],
) -> Result<TrueMeasures, SimError> {
    if scenario.is_conditional() {
        let mut kappa = Vec::with_capacity(xgrid.len());
        let mut auc_v = Vec::with_capacity(xgrid.len());
        for &x in xgrid {
            let (k, a) = measures_at(scenario, sub, Some(x))?;
            kappa.push(k);
            auc_v.push(a);
        }
        Ok(TrueMeasures {
            grid: xgrid.to_vec(),
            kappa,
            auc: auc_v,
        })
    } else {
        let (k, a) = measures_at(scenario, sub, None)?;
        Ok(TrueMeasures {
            grid: Vec::new(),
            kappa: vec![k],
            auc: vec![a],
        })
    }
}
