//! Large-sample agreement harness: simulate from known CPTs, run the
//! plug-in and Bayesian pipelines across a grid of sample sizes, and
//! compare both against the exact interventional ground truth.

use crate::bayes::{
    fit_posteriors, forward_sample, ground_truth_effect, posterior_predictive, BayesError,
};
use crate::cpt::CptSet;
use crate::data::empirical_joint;
use crate::docalc::{evaluate_estimand, identify, EvalError, IdentificationResult, IdentifyError};
use crate::graph::CausalGraph;
use crate::rng::derive_seed;
use crate::twin::causal_bayes_construct;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConvergenceError {
    #[error("effect is not identified ({0}); use the rejection-sampling path instead")]
    NotIdentified(String),
    #[error("sample sizes must be positive")]
    EmptyGridCell,
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One (sample size, replicate, intervention value) measurement.
///
/// `do_plugin` is absent when the maximum-likelihood plug-in is undefined
/// for that sample (a conditioning event with zero mass, which smoothing
/// does not suffer from); the Bayesian column is always defined.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub m: u64,
    pub replicate: u32,
    pub t_star: usize,
    pub do_plugin: Option<f64>,
    pub bayes_predictive: f64,
    pub ground_truth: f64,
    pub abs_gap_do: Option<f64>,
    pub abs_gap_bayes: f64,
    pub seed: u64,
}

/// Computes both estimates for every intervention value on one sampled
/// table. Exposed so fixed datasets can be pushed through the same path the
/// simulation uses.
pub fn convergence_measurements(
    graph: &CausalGraph,
    table: &crate::data::CountsTable,
    treatment: &str,
    outcome: &str,
    y_state: usize,
    prior_strength: f64,
) -> Result<Vec<(usize, Option<f64>, f64)>, ConvergenceError> {
    let identified = identify(graph, treatment, outcome)?;
    let estimand = match &identified {
        IdentificationResult::Identified { estimand, .. } => estimand,
        IdentificationResult::NotIdentified { reason } => {
            return Err(ConvergenceError::NotIdentified(reason.clone()));
        }
    };
    let joint = empirical_joint(table).map_err(BayesError::from)?;
    let t_card = graph.variable(treatment).map_err(BayesError::from)?.card;
    let mut out = Vec::with_capacity(t_card);
    let mut posterior = None;
    for t_star in 0..t_card {
        let twin = causal_bayes_construct(graph, treatment, t_star)
            .map_err(|e| BayesError::BadConfig(e.to_string()))?;
        if posterior.is_none() {
            posterior = Some(fit_posteriors(&twin, table, prior_strength)?);
        }
        let bayes = posterior_predictive(&twin, posterior.as_ref().unwrap(), outcome, y_state)?;
        let plugin = match evaluate_estimand(estimand, &joint, t_star, y_state) {
            Ok(p) => Some(p),
            Err(EvalError::ZeroConditioningMass { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        out.push((t_star, plugin, bayes));
    }
    Ok(out)
}

/// Runs the full study: for every grid size and replicate, forward-sample
/// a dataset (substream seed `grid_index * replicates + replicate`), compute
/// the plug-in and the posterior predictive at every intervention value,
/// and attach the exact truncated-product ground truth. Rows come out
/// sorted by (m, replicate, t_star).
#[allow(clippy::too_many_arguments)]
pub fn run_convergence(
    graph: &CausalGraph,
    cpts: &CptSet,
    treatment: &str,
    outcome: &str,
    y_state: usize,
    m_grid: &[u64],
    replicates: u32,
    seed: u64,
) -> Result<Vec<ConvergenceRow>, ConvergenceError> {
    if m_grid.contains(&0) {
        return Err(ConvergenceError::EmptyGridCell);
    }
    let t_card = graph.variable(treatment).map_err(BayesError::from)?.card;
    let mut truths = Vec::with_capacity(t_card);
    for t_star in 0..t_card {
        truths.push(ground_truth_effect(
            graph, cpts, treatment, t_star, outcome, y_state,
        )?);
    }

    let mut rows = Vec::new();
    for (gi, &m) in m_grid.iter().enumerate() {
        for r in 0..replicates {
            let rep_seed = derive_seed(seed, (gi as u64) * replicates as u64 + r as u64);
            let table = forward_sample(graph, cpts, m, rep_seed)?;
            let measurements =
                convergence_measurements(graph, &table, treatment, outcome, y_state, 1.0)?;
            for (t_star, plugin, bayes) in measurements {
                rows.push(ConvergenceRow {
                    m,
                    replicate: r,
                    t_star,
                    do_plugin: plugin,
                    bayes_predictive: bayes,
                    ground_truth: truths[t_star],
                    abs_gap_do: plugin.map(|p| (p - truths[t_star]).abs()),
                    abs_gap_bayes: (bayes - truths[t_star]).abs(),
                    seed: rep_seed,
                });
            }
        }
    }
    Ok(rows)
}

/// CSV rendering, header included; an undefined plug-in leaves its cells
/// empty.
pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("m,replicate,t_star,do_plugin,bayes_predictive,ground_truth,abs_gap_do,abs_gap_bayes,seed\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.replicate,
            r.t_star,
            opt(r.do_plugin),
            r.bayes_predictive,
            r.ground_truth,
            opt(r.abs_gap_do),
            r.abs_gap_bayes,
            r.seed
        ));
    }
    out
}

/// Median of the defined values; `None` when nothing is defined.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
