//! Neal's Algorithm 8 for a DP mixture of normal regressions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::BnpError;
use crate::prior::{
    draw_inverse_gamma, draw_inverse_wishart, draw_mvn_from_precision, BaseMeasureHyper,
};
use crate::state::{Cluster, DataRows, DpmState};

/// All observations in one cluster whose parameters come from their
/// conditional posteriors (starting from `sigma2 = 1`).
pub fn initial_state<R: Rng + ?Sized>(
    rows: &DataRows,
    hyper: BaseMeasureHyper,
    alpha: f64,
    rng: &mut R,
) -> Result<DpmState, BnpError> {
    if rows.dim() != hyper.dim() {
        return Err(BnpError::DimensionMismatch {
            expected: hyper.dim(),
            got: rows.dim(),
        });
    }
    let mut c = Cluster::new(hyper.beta0().as_slice().to_vec(), 1.0)?;
    c.size = rows.len();
    let mut state = DpmState {
        assignments: vec![0; rows.len()],
        clusters: vec![c],
        hyper,
        alpha,
    };
    update_clusters(&mut state, rows, rng)?;
    Ok(state)
}

/// One Gibbs sweep: reassignment, atom refresh, then `beta0`/`Sigma0` refresh.
pub fn neal8_sweep<R: Rng + ?Sized>(
    state: &mut DpmState,
    rows: &DataRows,
    m_aux: usize,
    rng: &mut R,
) -> Result<(), BnpError> {
    if rows.len() != state.assignments.len() || rows.dim() != state.hyper.dim() {
        return Err(BnpError::DimensionMismatch {
            expected: state.assignments.len(),
            got: rows.len(),
        });
    }
    if m_aux == 0 {
        return Err(BnpError::InvalidConfig("m_aux must be positive".into()));
    }
    reassign(state, rows, m_aux, rng)?;
    update_clusters(state, rows, rng)?;
    update_hyper(state, rng)
}

fn reassign<R: Rng + ?Sized>(
    state: &mut DpmState,
    rows: &DataRows,
    m: usize,
    rng: &mut R,
) -> Result<(), BnpError> {
    let n = rows.len();
    let p = rows.dim();
    let ln_n: Vec<f64> = (0..=n).map(|k| (k as f64).ln()).collect();
    let ln_aux = (state.alpha / m as f64).ln();
    let mut aux: Vec<Cluster> = (0..m)
        .map(|_| Cluster::new(vec![0.0; p], 1.0))
        .collect::<Result<_, _>>()?;
    let mut aux_beta = vec![0.0; p];
    let mut logw: Vec<f64> = Vec::with_capacity(state.clusters.len() + m + 8);

    for i in 0..n {
        let x = rows.row(i);
        let z = rows.z()[i];
        let c = state.assignments[i];
        state.clusters[c].size -= 1;
        let start = if state.clusters[c].size == 0 {
            let (b, s2) = (
                state.clusters[c].beta().to_vec(),
                state.clusters[c].sigma2(),
            );
            aux[0].set(&b, s2);
            1
        } else {
            0
        };
        for a in aux.iter_mut().skip(start) {
            let s2 = state.hyper.draw_atom(rng, &mut aux_beta);
            a.set(&aux_beta, s2);
        }

        logw.clear();
        let mut max = f64::NEG_INFINITY;
        for cl in &state.clusters {
            let w = if cl.size == 0 {
                f64::NEG_INFINITY
            } else {
                ln_n[cl.size] + cl.log_kernel(x, z)
            };
            max = max.max(w);
            logw.push(w);
        }
        for a in &aux {
            let w = ln_aux + a.log_kernel(x, z);
            max = max.max(w);
            logw.push(w);
        }
        let mut total = 0.0;
        for w in logw.iter_mut() {
            *w = (*w - max).exp();
            total += *w;
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = logw.len() - 1;
        for (k, w) in logw.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = k;
                break;
            }
        }
        // Never land on an empty slot through rounding.
        while pick < state.clusters.len() && state.clusters[pick].size == 0 {
            pick += 1;
        }

        let k = state.clusters.len();
        if pick < k {
            state.clusters[pick].size += 1;
            state.assignments[i] = pick;
        } else {
            let a = &aux[pick - k];
            let slot = if state.clusters[c].size == 0 {
                c
            } else if let Some(e) = state.clusters.iter().position(|cl| cl.size == 0) {
                e
            } else {
                state.clusters.push(a.clone());
                k
            };
            state.clusters[slot].set(a.beta(), a.sigma2());
            state.clusters[slot].size = 1;
            state.assignments[i] = slot;
        }
    }

    // Drop empty slots and relabel.
    let mut remap = vec![usize::MAX; state.clusters.len()];
    let mut next = 0;
    for (k, cl) in state.clusters.iter().enumerate() {
        if cl.size > 0 {
            remap[k] = next;
            next += 1;
        }
    }
    state.clusters.retain(|cl| cl.size > 0);
    for a in state.assignments.iter_mut() {
        *a = remap[*a];
    }
    Ok(())
}

/// `beta_h | sigma2_h` then `sigma2_h | beta_h` for every occupied cluster.
fn update_clusters<R: Rng + ?Sized>(
    state: &mut DpmState,
    rows: &DataRows,
    rng: &mut R,
) -> Result<(), BnpError> {
    let p = rows.dim();
    let k = state.clusters.len();
    let mut xtx = vec![0.0; k * p * p];
    let mut xtz = vec![0.0; k * p];
    for i in 0..rows.len() {
        let h = state.assignments[i];
        let x = rows.row(i);
        let z = rows.z()[i];
        let m = &mut xtx[h * p * p..(h + 1) * p * p];
        for a in 0..p {
            xtz[h * p + a] += x[a] * z;
            for b in 0..p {
                m[a * p + b] += x[a] * x[b];
            }
        }
    }
    let s_inv = state.hyper.sigma0_inv().clone();
    let s_inv_b0 = &s_inv * state.hyper.beta0();
    for h in 0..k {
        let inv_var = 1.0 / state.clusters[h].sigma2();
        let mut prec = s_inv.clone();
        for a in 0..p {
            for b in 0..p {
                prec[(a, b)] += xtx[h * p * p + a * p + b] * inv_var;
            }
        }
        let rhs = DVector::from_fn(p, |a, _| s_inv_b0[a] + xtz[h * p + a] * inv_var);
        let beta = draw_mvn_from_precision(rng, &prec, &rhs, "cluster coefficient precision")?;
        let s2 = state.clusters[h].sigma2();
        state.clusters[h].set(beta.as_slice(), s2);
    }
    let mut ssr = vec![0.0; k];
    for i in 0..rows.len() {
        let h = state.assignments[i];
        let mu: f64 = rows
            .row(i)
            .iter()
            .zip(state.clusters[h].beta())
            .map(|(a, b)| a * b)
            .sum();
        let r = rows.z()[i] - mu;
        ssr[h] += r * r;
    }
    let (a0, b0) = (state.hyper.ig_shape, state.hyper.ig_scale);
    for h in 0..k {
        let nh = state.clusters[h].size as f64;
        let s2 = draw_inverse_gamma(rng, a0 + 0.5 * nh, b0 + 0.5 * ssr[h]);
        let beta = state.clusters[h].beta().to_vec();
        state.clusters[h].set(&beta, s2);
    }
    Ok(())
}

/// `beta0 | atoms, Sigma0` under `N(0, I)`, then `Sigma0 | atoms, beta0` under
/// `IW(df, I)`.
fn update_hyper<R: Rng + ?Sized>(state: &mut DpmState, rng: &mut R) -> Result<(), BnpError> {
    let p = state.hyper.dim();
    let k = state.clusters.len();
    let s_inv = state.hyper.sigma0_inv().clone();
    let mut sum = DVector::<f64>::zeros(p);
    for c in &state.clusters {
        for a in 0..p {
            sum[a] += c.beta()[a];
        }
    }
    let prec = DMatrix::<f64>::identity(p, p) + &s_inv * k as f64;
    let rhs = &s_inv * sum;
    let beta0 = draw_mvn_from_precision(rng, &prec, &rhs, "beta0 precision")?;

    let mut scale = DMatrix::<f64>::identity(p, p);
    for c in &state.clusters {
        let d = DVector::from_fn(p, |a, _| c.beta()[a] - beta0[a]);
        scale += &d * d.transpose();
    }
    let sigma0 = draw_inverse_wishart(rng, state.hyper.iwish_df + k as f64, &scale)?;
    state.hyper.set_beta0(beta0)?;
    state.hyper.set_sigma0(sigma0)
}
