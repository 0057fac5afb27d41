//! Conjugate Bayesian inference on twin models.
//!
//! For fully observed graphs the parameters get independent Dirichlet
//! posteriors per CPT row, and the post-intervention predictive for a single
//! new observation reduces to an exact enumeration over posterior means:
//! distinct rows are posterior-independent and each row appears at most once
//! per term, so the expectation of the product is the product of
//! expectations. With uniform priors this is add-one (Laplace) smoothing.
//! A Monte-Carlo cross-check of that reduction lives in the test suite.
//!
//! Latent confounding gets two dedicated paths: a reparameterized conjugate
//! route for the front-door shape, and a rejection sampler
//! ([`abc_nonidentifiable`]) that exposes how wide the posterior over the
//! causal target stays when the graph does not identify it.

use crate::cpt::{CptError, CptSet};
use crate::data::{CountsTable, DataError};
use crate::graph::{CausalGraph, GraphError};
use crate::rng::{derive_seed, SplitMix64};
use crate::twin::{canonical_parents, TwinPgm};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BayesError {
    #[error("`{0}` is latent; conjugate fitting needs a fully observed graph (use the front-door or rejection paths)")]
    LatentPresent(String),
    #[error("prior strength must be positive, got {0}")]
    InvalidPrior(f64),
    #[error("prior for `{variable}`: {reason}")]
    BadPriorSpec { variable: String, reason: String },
    #[error("state {state} out of range for `{variable}` (cardinality {card})")]
    StateOutOfRange {
        variable: String,
        state: usize,
        card: usize,
    },
    #[error("posterior not fitted for `{0}`")]
    UnfittedPosterior(String),
    #[error("no accepted samples after {attempts} draws; widen epsilon or raise the budget")]
    NoAcceptedSamples { attempts: u64 },
    #[error("unsupported prior: {0}")]
    UnsupportedPrior(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cpt(#[from] CptError),
}

/// Prior pseudo-counts. `strength` is the default per-cell alpha; individual
/// variables can override it with a per-state alpha vector applied to every
/// parent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    pub strength: f64,
    pub per_state: BTreeMap<String, Vec<f64>>,
}

impl PriorSpec {
    pub fn uniform(strength: f64) -> Self {
        Self {
            strength,
            per_state: BTreeMap::new(),
        }
    }

    pub fn with_state_alphas(mut self, variable: &str, alphas: Vec<f64>) -> Self {
        self.per_state.insert(variable.to_string(), alphas);
        self
    }
}

/// Dirichlet posterior for one variable's CPT: pseudo-counts per parent
/// configuration and state.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTable {
    pub variable: String,
    pub parents: Vec<String>,
    parent_cards: Vec<usize>,
    var_card: usize,
    alphas: Vec<Vec<f64>>,
}

impl PosteriorTable {
    fn row_index(&self, parent_states: &[usize]) -> usize {
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    /// Pseudo-count alpha for (parent configuration, state).
    pub fn alpha(&self, parent_states: &[usize], state: usize) -> f64 {
        self.alphas[self.row_index(parent_states)][state]
    }

    /// Posterior mean of the CPT entry.
    pub fn mean(&self, parent_states: &[usize], state: usize) -> f64 {
        let row = &self.alphas[self.row_index(parent_states)];
        row[state] / row.iter().sum::<f64>()
    }

    pub fn row_alphas(&self, parent_states: &[usize]) -> &[f64] {
        &self.alphas[self.row_index(parent_states)]
    }

    pub fn var_card(&self) -> usize {
        self.var_card
    }
}

/// Posteriors for every non-treatment variable of a twin model.
#[derive(Debug, Clone, PartialEq)]
pub struct CptPosterior {
    tables: BTreeMap<String, PosteriorTable>,
}

impl CptPosterior {
    pub fn table(&self, variable: &str) -> Option<&PosteriorTable> {
        self.tables.get(variable)
    }

    pub fn tables(&self) -> impl Iterator<Item = &PosteriorTable> {
        self.tables.values()
    }
}

fn check_table_matches(graph: &CausalGraph, table: &CountsTable) -> Result<(), BayesError> {
    let expected: Vec<String> = graph
        .variables()
        .iter()
        .filter(|v| v.observed)
        .map(|v| v.name.clone())
        .collect();
    let mut found: Vec<String> = table.columns().to_vec();
    found.sort();
    let mut exp_sorted = expected.clone();
    exp_sorted.sort();
    if found != exp_sorted {
        return Err(DataError::HeaderMismatch {
            expected,
            found: table.columns().to_vec(),
        }
        .into());
    }
    for (col, &card) in table.columns().iter().zip(table.cards()) {
        let decl = graph.variable(col)?;
        if decl.card != card {
            return Err(DataError::HeaderMismatch {
                expected,
                found: table.columns().to_vec(),
            }
            .into());
        }
    }
    Ok(())
}

/// Conjugate update with a uniform per-cell prior.
pub fn fit_posteriors(
    twin: &TwinPgm,
    table: &CountsTable,
    prior_strength: f64,
) -> Result<CptPosterior, BayesError> {
    fit_posteriors_with(twin, table, &PriorSpec::uniform(prior_strength))
}

/// Conjugate update: alpha(config, state) = prior + matching count.
pub fn fit_posteriors_with(
    twin: &TwinPgm,
    table: &CountsTable,
    prior: &PriorSpec,
) -> Result<CptPosterior, BayesError> {
    if prior.strength <= 0.0 {
        return Err(BayesError::InvalidPrior(prior.strength));
    }
    if let Some(latent) = twin.pre.variables().iter().find(|v| !v.observed) {
        return Err(BayesError::LatentPresent(latent.name.clone()));
    }
    check_table_matches(&twin.pre, table)?;

    let col_index: BTreeMap<&str, usize> = table
        .columns()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut tables = BTreeMap::new();
    for v in twin.pre.variables() {
        if v.name == twin.treatment {
            continue;
        }
        let parents = canonical_parents(&twin.pre, &v.name);
        let parent_cards: Vec<usize> = parents.iter().map(|(_, c)| *c).collect();
        let n_configs: usize = parent_cards.iter().product();
        let base: Vec<f64> = match prior.per_state.get(&v.name) {
            Some(alphas) => {
                if alphas.len() != v.card {
                    return Err(BayesError::BadPriorSpec {
                        variable: v.name.clone(),
                        reason: format!("{} alphas for cardinality {}", alphas.len(), v.card),
                    });
                }
                if alphas.iter().any(|&a| a <= 0.0) {
                    return Err(BayesError::BadPriorSpec {
                        variable: v.name.clone(),
                        reason: "alphas must be positive".to_string(),
                    });
                }
                alphas.clone()
            }
            None => vec![prior.strength; v.card],
        };
        let mut alphas = vec![base; n_configs];

        let v_col = col_index[v.name.as_str()];
        let parent_cols: Vec<usize> = parents.iter().map(|(p, _)| col_index[p.as_str()]).collect();
        for (states, n) in table.rows() {
            let mut idx = 0usize;
            for (pc, (_, card)) in parent_cols.iter().zip(&parents) {
                idx = idx * card + states[*pc];
            }
            alphas[idx][states[v_col]] += *n as f64;
        }
        tables.insert(
            v.name.clone(),
            PosteriorTable {
                variable: v.name.clone(),
                parents: parents.into_iter().map(|(p, _)| p).collect(),
                parent_cards,
                var_card: v.card,
                alphas,
            },
        );
    }
    Ok(CptPosterior { tables })
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.into_iter().sum()
}

/// Exact posterior predictive P(outcome* = y_state | data, do(t*)) for one
/// new post-intervention observation: the enumeration over starred
/// assignments of products of posterior-mean CPT entries.
pub fn posterior_predictive(
    twin: &TwinPgm,
    posterior: &CptPosterior,
    outcome: &str,
    y_state: usize,
) -> Result<f64, BayesError> {
    let vars = twin.pre.variables();
    let t_idx = vars
        .iter()
        .position(|v| v.name == twin.treatment)
        .expect("twin treatment exists");
    let y_decl = twin.pre.variable(outcome)?;
    if outcome == twin.treatment {
        return Err(BayesError::BadConfig(
            "outcome coincides with the intervened variable".to_string(),
        ));
    }
    if y_state >= y_decl.card {
        return Err(BayesError::StateOutOfRange {
            variable: outcome.to_string(),
            state: y_state,
            card: y_decl.card,
        });
    }
    let y_idx = vars.iter().position(|v| v.name == outcome).unwrap();
    for v in vars {
        if v.name != twin.treatment && posterior.table(&v.name).is_none() {
            return Err(BayesError::UnfittedPosterior(v.name.clone()));
        }
    }

    let pos: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let free: Vec<usize> = (0..vars.len())
        .filter(|&i| i != t_idx && i != y_idx)
        .collect();
    let free_cards: Vec<usize> = free.iter().map(|&i| vars[i].card).collect();

    let mut assignment = vec![0usize; vars.len()];
    assignment[t_idx] = twin.t_star;
    assignment[y_idx] = y_state;

    let mut terms = Vec::new();
    let mut counter = vec![0usize; free.len()];
    loop {
        for (slot, &i) in counter.iter().zip(&free) {
            assignment[i] = *slot;
        }
        let mut term = 1.0;
        for (i, v) in vars.iter().enumerate() {
            if i == t_idx {
                continue;
            }
            let tbl = posterior.table(&v.name).expect("checked above");
            let parent_states: Vec<usize> = tbl
                .parents
                .iter()
                .map(|p| assignment[pos[p.as_str()]])
                .collect();
            term *= tbl.mean(&parent_states, assignment[i]);
        }
        terms.push(term);

        let mut j = free.len();
        loop {
            if j == 0 {
                return Ok(sorted_sum(terms));
            }
            j -= 1;
            counter[j] += 1;
            if counter[j] < free_cards[j] {
                break;
            }
            counter[j] = 0;
        }
    }
}

/// Number of smoothed CPT cells a conjugate fit touches: for every
/// non-treatment variable, states times parent configurations. Bounds the
/// plug-in vs predictive discrepancy at roughly cells/M.
pub fn smoothed_cells(graph: &CausalGraph, treatment: &str) -> usize {
    graph
        .variables()
        .iter()
        .filter(|v| v.name != treatment)
        .map(|v| {
            v.card
                * canonical_parents(graph, &v.name)
                    .iter()
                    .map(|(_, c)| c)
                    .product::<usize>()
        })
        .sum()
}

// ── Front-door reparameterization ─────────────────────────────────────────

/// Posterior for the front-door shape, parameterized through the exact
/// factorization that stays identifiable when the confounder is latent:
/// a table for P(t), a table for P(y|t,w) (together realizing the
/// observable reparameterization), and the mediator table P(w|t).
#[derive(Debug, Clone, PartialEq)]
pub struct FrontDoorPosterior {
    pub treatment: String,
    pub mediator: String,
    pub outcome: String,
    t_card: usize,
    w_card: usize,
    y_card: usize,
    alpha_t: Vec<f64>,
    alpha_w_given_t: Vec<Vec<f64>>,
    alpha_y_given_tw: Vec<Vec<f64>>,
}

impl FrontDoorPosterior {
    pub fn mean_t(&self, t: usize) -> f64 {
        self.alpha_t[t] / self.alpha_t.iter().sum::<f64>()
    }

    pub fn mean_w_given_t(&self, w: usize, t: usize) -> f64 {
        let row = &self.alpha_w_given_t[t];
        row[w] / row.iter().sum::<f64>()
    }

    pub fn mean_y_given_tw(&self, y: usize, t: usize, w: usize) -> f64 {
        let row = &self.alpha_y_given_tw[t * self.w_card + w];
        row[y] / row.iter().sum::<f64>()
    }

    pub fn cards(&self) -> (usize, usize, usize) {
        (self.t_card, self.w_card, self.y_card)
    }
}

/// Conjugate update for the front-door factorization from a table over
/// (treatment, mediator, outcome).
pub fn fit_frontdoor(
    table: &CountsTable,
    treatment: &str,
    mediator: &str,
    outcome: &str,
    prior_strength: f64,
) -> Result<FrontDoorPosterior, BayesError> {
    if prior_strength <= 0.0 {
        return Err(BayesError::InvalidPrior(prior_strength));
    }
    let expected = vec![
        treatment.to_string(),
        mediator.to_string(),
        outcome.to_string(),
    ];
    if table.columns().len() != 3 {
        return Err(DataError::HeaderMismatch {
            expected,
            found: table.columns().to_vec(),
        }
        .into());
    }
    let t_col = table.column_index(treatment)?;
    let w_col = table.column_index(mediator)?;
    let y_col = table.column_index(outcome)?;
    let t_card = table.cards()[t_col];
    let w_card = table.cards()[w_col];
    let y_card = table.cards()[y_col];

    let mut alpha_t = vec![prior_strength; t_card];
    let mut alpha_w_given_t = vec![vec![prior_strength; w_card]; t_card];
    let mut alpha_y_given_tw = vec![vec![prior_strength; y_card]; t_card * w_card];
    for (states, n) in table.rows() {
        let (t, w, y) = (states[t_col], states[w_col], states[y_col]);
        let n = *n as f64;
        alpha_t[t] += n;
        alpha_w_given_t[t][w] += n;
        alpha_y_given_tw[t * w_card + w][y] += n;
    }
    Ok(FrontDoorPosterior {
        treatment: treatment.to_string(),
        mediator: mediator.to_string(),
        outcome: outcome.to_string(),
        t_card,
        w_card,
        y_card,
        alpha_t,
        alpha_w_given_t,
        alpha_y_given_tw,
    })
}

/// Front-door predictive: sum over mediator states of P(w|t*) times
/// sum over t' of P(t') P(y|t',w), all at posterior means.
///
/// The inner weighting is the marginal P(t'), not P(t'|w): the expression
/// is not a joint distribution of (y, t') given w.
pub fn frontdoor_predictive(
    fd: &FrontDoorPosterior,
    t_star: usize,
    y_state: usize,
) -> Result<f64, BayesError> {
    if t_star >= fd.t_card {
        return Err(BayesError::StateOutOfRange {
            variable: fd.treatment.clone(),
            state: t_star,
            card: fd.t_card,
        });
    }
    if y_state >= fd.y_card {
        return Err(BayesError::StateOutOfRange {
            variable: fd.outcome.clone(),
            state: y_state,
            card: fd.y_card,
        });
    }
    let mut outer = Vec::with_capacity(fd.w_card);
    for w in 0..fd.w_card {
        let inner = sorted_sum(
            (0..fd.t_card)
                .map(|t| fd.mean_t(t) * fd.mean_y_given_tw(y_state, t, w))
                .collect(),
        );
        outer.push(fd.mean_w_given_t(w, t_star) * inner);
    }
    Ok(sorted_sum(outer))
}

// ── Rejection sampling for the non-identifiable shape ─────────────────────

/// Configuration for [`abc_nonidentifiable`].
#[derive(Debug, Clone, PartialEq)]
pub struct AbcConfig {
    /// Number of states of the latent confounder.
    pub latent_card: usize,
    /// Total parameter draws.
    pub n_samples: u64,
    /// Max-norm acceptance tolerance on the implied observable joint.
    pub epsilon: f64,
    pub seed: u64,
    /// Optional Beta(a, b) prior per outcome-CPT cell (binary outcome only);
    /// `None` means flat.
    pub psi_prior: Option<(u32, u32)>,
}

/// Accepted-sample summary of the causal target P(y* | do(t*)).
#[derive(Debug, Clone)]
pub struct CausalContrast {
    t_card: usize,
    y_card: usize,
    /// samples[t*][y] = accepted draws of P(y* = y | do(t*)).
    samples: Vec<Vec<Vec<f64>>>,
    pub acceptance_rate: f64,
    pub attempts: u64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

impl CausalContrast {
    pub fn cards(&self) -> (usize, usize) {
        (self.t_card, self.y_card)
    }

    pub fn accepted(&self) -> usize {
        self.samples[0][0].len()
    }

    pub fn samples(&self, t_star: usize, y_state: usize) -> &[f64] {
        &self.samples[t_star][y_state]
    }

    pub fn mean(&self, t_star: usize, y_state: usize) -> f64 {
        let s = &self.samples[t_star][y_state];
        s.iter().sum::<f64>() / s.len() as f64
    }

    /// Central 95% interval (2.5% and 97.5% percentiles).
    pub fn interval(&self, t_star: usize, y_state: usize) -> (f64, f64) {
        let mut s = self.samples[t_star][y_state].clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (percentile(&s, 0.025), percentile(&s, 0.975))
    }
}

/// Rejection sampler for the confounded two-variable shape: draws the full
/// parameterization (confounder marginal, treatment CPT, outcome CPT) from
/// its prior, accepts draws whose implied observable joint lands within
/// `epsilon` of the empirical one in max norm, and reports the accepted
/// draws of the causal target.
///
/// The table must have exactly two columns, treatment first.
pub fn abc_nonidentifiable(
    table: &CountsTable,
    cfg: &AbcConfig,
) -> Result<CausalContrast, BayesError> {
    if cfg.latent_card < 1 {
        return Err(BayesError::BadConfig(
            "latent cardinality must be at least 1".into(),
        ));
    }
    if cfg.epsilon <= 0.0 {
        return Err(BayesError::BadConfig("epsilon must be positive".into()));
    }
    if cfg.n_samples == 0 {
        return Err(BayesError::BadConfig("need at least one draw".into()));
    }
    if table.columns().len() != 2 {
        return Err(BayesError::BadConfig(format!(
            "expected a (treatment, outcome) table, got columns {:?}",
            table.columns()
        )));
    }
    let t_card = table.cards()[0];
    let y_card = table.cards()[1];
    if cfg.psi_prior.is_some() && y_card != 2 {
        return Err(BayesError::UnsupportedPrior(
            "per-cell Beta priors require a binary outcome".into(),
        ));
    }
    let m = table.total();
    if m == 0 {
        return Err(DataError::EmptyTable.into());
    }
    let mut observed = vec![vec![0.0; y_card]; t_card];
    for (states, n) in table.rows() {
        observed[states[0]][states[1]] += *n as f64 / m as f64;
    }

    let k = cfg.latent_card;
    let mut samples = vec![vec![Vec::new(); y_card]; t_card];
    let mut accepted = 0u64;
    for i in 0..cfg.n_samples {
        let mut rng = SplitMix64::new(derive_seed(cfg.seed, i));
        let gamma = rng.simplex(k);
        let phi: Vec<Vec<f64>> = (0..k).map(|_| rng.simplex(t_card)).collect();
        let psi: Vec<Vec<Vec<f64>>> = (0..t_card)
            .map(|_| {
                (0..k)
                    .map(|_| match cfg.psi_prior {
                        Some((a, b)) => {
                            let p1 = rng.beta_int(a, b);
                            vec![1.0 - p1, p1]
                        }
                        None => rng.simplex(y_card),
                    })
                    .collect()
            })
            .collect();

        let mut worst: f64 = 0.0;
        for t in 0..t_card {
            for y in 0..y_card {
                let implied: f64 = (0..k).map(|z| gamma[z] * phi[z][t] * psi[t][z][y]).sum();
                worst = worst.max((implied - observed[t][y]).abs());
            }
        }
        if worst <= cfg.epsilon {
            accepted += 1;
            for (t, per_y) in samples.iter_mut().enumerate() {
                for (y, bucket) in per_y.iter_mut().enumerate() {
                    bucket.push((0..k).map(|z| gamma[z] * psi[t][z][y]).sum());
                }
            }
        }
    }
    if accepted == 0 {
        return Err(BayesError::NoAcceptedSamples {
            attempts: cfg.n_samples,
        });
    }
    Ok(CausalContrast {
        t_card,
        y_card,
        samples,
        acceptance_rate: accepted as f64 / cfg.n_samples as f64,
        attempts: cfg.n_samples,
    })
}

// ── Forward sampling and ground truth ─────────────────────────────────────

/// Ancestral sampling: M observations drawn variable-by-variable in
/// topological order, aggregated to grouped counts over the observed
/// columns (latent values are discarded). Observation `i` uses the derived
/// seed for substream `i`, so the output is independent of evaluation order.
pub fn forward_sample(
    graph: &CausalGraph,
    cpts: &CptSet,
    m: u64,
    seed: u64,
) -> Result<CountsTable, BayesError> {
    cpts.validate(graph)?;
    let order: Vec<usize> = {
        let names = graph.topological_order()?;
        names
            .iter()
            .map(|n| graph.variables().iter().position(|v| &v.name == n).unwrap())
            .collect()
    };
    let vars = graph.variables();
    let pos: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let observed: Vec<usize> = (0..vars.len()).filter(|&i| vars[i].observed).collect();

    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut assignment = vec![0usize; vars.len()];
    for i in 0..m {
        let mut rng = SplitMix64::new(derive_seed(seed, i));
        for &vi in &order {
            let cpt = cpts.get(&vars[vi].name).expect("validated");
            let parent_states: Vec<usize> = cpt
                .parents
                .iter()
                .map(|p| assignment[pos[p.as_str()]])
                .collect();
            assignment[vi] = rng.categorical(cpt.row(&parent_states));
        }
        let key: Vec<usize> = observed.iter().map(|&i| assignment[i]).collect();
        *counts.entry(key).or_insert(0) += 1;
    }

    let columns: Vec<String> = observed.iter().map(|&i| vars[i].name.clone()).collect();
    let cards: Vec<usize> = observed.iter().map(|&i| vars[i].card).collect();
    Ok(CountsTable::new(
        columns,
        cards,
        counts.into_iter().collect(),
    )?)
}

/// Exact interventional probability from known CPTs: the truncated product
/// over the mutilated graph, enumerating all assignments consistent with
/// the intervention and the outcome state.
pub fn ground_truth_effect(
    graph: &CausalGraph,
    cpts: &CptSet,
    treatment: &str,
    t_star: usize,
    outcome: &str,
    y_state: usize,
) -> Result<f64, BayesError> {
    cpts.validate(graph)?;
    let vars = graph.variables();
    let t_idx = vars
        .iter()
        .position(|v| v.name == treatment)
        .ok_or_else(|| GraphError::UnknownVariable(treatment.to_string()))?;
    let y_idx = vars
        .iter()
        .position(|v| v.name == outcome)
        .ok_or_else(|| GraphError::UnknownVariable(outcome.to_string()))?;
    if t_star >= vars[t_idx].card {
        return Err(BayesError::StateOutOfRange {
            variable: treatment.to_string(),
            state: t_star,
            card: vars[t_idx].card,
        });
    }
    if y_state >= vars[y_idx].card {
        return Err(BayesError::StateOutOfRange {
            variable: outcome.to_string(),
            state: y_state,
            card: vars[y_idx].card,
        });
    }
    let pos: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let free: Vec<usize> = (0..vars.len())
        .filter(|&i| i != t_idx && i != y_idx)
        .collect();
    let free_cards: Vec<usize> = free.iter().map(|&i| vars[i].card).collect();

    let mut assignment = vec![0usize; vars.len()];
    assignment[t_idx] = t_star;
    assignment[y_idx] = y_state;
    let mut total = 0.0;
    let mut counter = vec![0usize; free.len()];
    loop {
        for (slot, &i) in counter.iter().zip(&free) {
            assignment[i] = *slot;
        }
        let mut term = 1.0;
        for (i, v) in vars.iter().enumerate() {
            if i == t_idx {
                continue;
            }
            let cpt = cpts.get(&v.name).expect("validated");
            let parent_states: Vec<usize> = cpt
                .parents
                .iter()
                .map(|p| assignment[pos[p.as_str()]])
                .collect();
            term *= cpt.prob(&parent_states, assignment[i]);
        }
        total += term;

        let mut j = free.len();
        loop {
            if j == 0 {
                return Ok(total);
            }
            j -= 1;
            counter[j] += 1;
            if counter[j] < free_cards[j] {
                break;
            }
            counter[j] = 0;
        }
    }
}
