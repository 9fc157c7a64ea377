//! Joint-distribution (Geweke) check of the Gibbs sampler: moments of the
//! hyperparameters from forward prior simulation against a chain that
//! alternates sweeps with fresh data draws.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::BnpError;
use crate::prior::{BaseMeasureHyper, PriorSettings};
use crate::sampler::neal8_sweep;
use crate::state::{Cluster, DataRows, DpmState};

pub const JOINT_STAT_NAMES: [&str; 5] =
    ["beta0", "beta0^2", "ln Sigma0", "(ln Sigma0)^2", "clusters"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointStat {
    pub name: String,
    pub prior_mean: f64,
    pub chain_mean: f64,
    /// Difference over its combined standard error (batch means for the chain).
    pub z: f64,
}

fn stats(h: &BaseMeasureHyper, k: usize) -> [f64; 5] {
    let b = h.beta0()[0];
    let ls = h.sigma0()[(0, 0)].ln();
    [b, b * b, ls, ls * ls, k as f64]
}

/// Forward draw of an intercept-only state: hyperparameters, CRP partition, atoms.
pub fn prior_state<R: Rng>(
    n: usize,
    settings: &PriorSettings,
    rng: &mut R,
) -> Result<DpmState, BnpError> {
    let mut hyper = BaseMeasureHyper::initial(1, settings)?;
    let df = settings.iwish_df_for(1);
    let chi: f64 = ChiSquared::new(df)
        .map_err(|_| BnpError::ImproperWishart { df, min: 0.0 })?
        .sample(rng);
    hyper.set_beta0(DVector::from_element(1, rng.sample(StandardNormal)))?;
    hyper.set_sigma0(DMatrix::from_element(1, 1, 1.0 / chi))?;
    let mut labels = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for i in 0..n {
        let u = rng.random::<f64>() * (i as f64 + settings.alpha);
        let mut acc = 0.0;
        let mut pick = sizes.len();
        for (k, &s) in sizes.iter().enumerate() {
            acc += s as f64;
            if u < acc {
                pick = k;
                break;
            }
        }
        if pick == sizes.len() {
            sizes.push(0);
        }
        sizes[pick] += 1;
        labels.push(pick);
    }
    let mut beta = [0.0];
    let mut clusters = Vec::with_capacity(sizes.len());
    for _ in &sizes {
        let s2 = hyper.draw_atom(rng, &mut beta);
        clusters.push(Cluster::new(beta.to_vec(), s2)?);
    }
    DpmState::from_parts(labels, clusters, hyper, settings.alpha)
}

fn draw_data<R: Rng>(state: &DpmState, rows: &mut DataRows, rng: &mut R) {
    let labels = state.assignments().to_vec();
    for (z, &c) in rows.z_mut().iter_mut().zip(&labels) {
        let cl = &state.clusters()[c];
        *z = cl.beta()[0] + cl.sigma2().sqrt() * rng.sample::<f64, _>(StandardNormal);
    }
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn batched_mean_and_se(xs: &[f64], batches: usize) -> (f64, f64) {
    let len = xs.len() / batches;
    let means: Vec<f64> = xs
        .chunks_exact(len)
        .map(|c| c.iter().sum::<f64>() / len as f64)
        .collect();
    mean_and_se(&means)
}

/// Runs `n_prior` forward draws and an `n_chain`-sweep successive-conditional
/// chain at `n` observations. Chain standard errors use 100 batch means.
pub fn joint_distribution_check<R: Rng>(
    n: usize,
    n_prior: usize,
    n_chain: usize,
    settings: &PriorSettings,
    m_aux: usize,
    rng: &mut R,
) -> Result<Vec<JointStat>, BnpError> {
    if n == 0 || n_prior < 2 || n_chain < 200 {
        return Err(BnpError::InvalidConfig(
            "joint check needs n >= 1, n_prior >= 2 and n_chain >= 200".into(),
        ));
    }
    let mut prior = Vec::with_capacity(n_prior);
    for _ in 0..n_prior {
        let s = prior_state(n, settings, rng)?;
        prior.push(stats(&s.hyper, s.occupied()));
    }
    let mut state = prior_state(n, settings, rng)?;
    let mut rows = DataRows::intercept(vec![0.0; n])?;
    let mut chain = Vec::with_capacity(n_chain);
    for _ in 0..n_chain {
        draw_data(&state, &mut rows, rng);
        neal8_sweep(&mut state, &rows, m_aux, rng)?;
        chain.push(stats(&state.hyper, state.occupied()));
    }
    Ok(JOINT_STAT_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let a: Vec<f64> = prior.iter().map(|s| s[j]).collect();
            let b: Vec<f64> = chain.iter().map(|s| s[j]).collect();
            let (ma, sa) = mean_and_se(&a);
            let (mb, sb) = batched_mean_and_se(&b, 100);
            JointStat {
                name: name.to_string(),
                prior_mean: ma,
                chain_mean: mb,
                z: (ma - mb) / (sa * sa + sb * sb).sqrt(),
            }
        })
        .collect())
}
