//! The simplified do-calculus for single-variable interventions: rule
//! applicability checks, pattern-based identification, and plug-in
//! evaluation of the resulting estimands against an empirical joint.
//!
//! Identification is deliberately pattern-based rather than a complete
//! rewrite search. Three strategies are tried in a fixed order (direct
//! exchange, then backdoor adjustment, then front-door adjustment), which
//! covers every graph this crate ships fixtures for. `NotIdentified` is
//! therefore a claim about these strategies, not a completeness theorem.

use crate::data::{DataError, EmpiricalJoint};
use crate::graph::{CausalGraph, GraphError, Mutilation};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IdentifyError {
    #[error(
        "treatment `{0}` is latent; only observed variables can be intervened on and measured"
    )]
    LatentTreatment(String),
    #[error("outcome `{0}` is latent")]
    LatentOutcome(String),
    #[error("treatment and outcome must differ, both were `{0}`")]
    SameVariable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("conditioning event {event} has zero mass; plug-in evaluation needs positivity")]
    ZeroConditioningMass { event: String },
    #[error("estimand references `{0}` which the joint does not cover")]
    MissingVariable(String),
    #[error("internal: alias `{0}` is unbound")]
    UnboundAlias(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// An interventional query: set `treatment`, observe `outcome`, optionally
/// conditioning on `context`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoQuery {
    pub treatment: String,
    pub outcome: String,
    pub context: Vec<String>,
}

impl DoQuery {
    pub fn new(treatment: &str, outcome: &str, context: &[&str]) -> Self {
        Self {
            treatment: treatment.to_string(),
            outcome: outcome.to_string(),
            context: context.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// The three rules, in the simplified single-intervention form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Insertion/deletion of observations: the context can be dropped from
    /// P(y | do(t), context).
    One,
    /// Action/observation exchange: P(y | do(t), context) = P(y | t, context).
    Two,
    /// Insertion/deletion of actions: P(y | do(t), context) = P(y | context).
    Three,
}

/// Checks whether a rule licenses its rewrite for `query` on `graph`.
///
/// Rule 1 is read with an empty separating set: it asks whether the whole
/// context is ignorable given the intervention alone.
pub fn rule_applies(
    rule: Rule,
    graph: &CausalGraph,
    query: &DoQuery,
) -> Result<bool, IdentifyError> {
    graph.variable(&query.treatment)?;
    graph.variable(&query.outcome)?;
    for c in &query.context {
        graph.variable(c)?;
    }
    let ctx: Vec<&str> = query.context.iter().map(|s| s.as_str()).collect();
    let t = query.treatment.as_str();
    let y = query.outcome.as_str();
    let ok = match rule {
        Rule::One => {
            if ctx.is_empty() {
                true
            } else {
                let bar = graph.mutilate(t, Mutilation::RemoveIncoming)?;
                bar.d_separated(&[y], &ctx, &[t])?
            }
        }
        Rule::Two => {
            let under = graph.mutilate(t, Mutilation::RemoveOutgoing)?;
            under.d_separated(&[y], &[t], &ctx)?
        }
        Rule::Three => {
            let bar = graph.mutilate(t, Mutilation::RemoveIncoming)?;
            let desc = graph.descendants_of(t)?;
            ctx.iter().all(|c| !desc.contains(c)) && bar.d_separated(&[y], &[t], &ctx)?
        }
    };
    Ok(ok)
}

/// How an atom picks up its value during evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "alias", rename_all = "snake_case")]
pub enum Slot {
    /// The intervention value t*.
    Treatment,
    /// The queried outcome state y.
    Outcome,
    /// A variable bound by an enclosing sum.
    Bound(String),
}

/// A variable reference inside an estimand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Atom {
    pub variable: String,
    pub slot: Slot,
}

impl Atom {
    fn symbol(&self) -> String {
        match &self.slot {
            Slot::Bound(alias) => alias.clone(),
            _ => self.variable.to_lowercase(),
        }
    }
}

/// An expression over the pre-intervention joint whose value equals the
/// interventional quantity. All probabilities refer to the observational
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimand {
    Sum {
        variable: String,
        alias: String,
        body: Box<Estimand>,
    },
    Product {
        terms: Vec<Estimand>,
    },
    CondProb {
        targets: Vec<Atom>,
        given: Vec<Atom>,
    },
    Marginal {
        atoms: Vec<Atom>,
    },
}

impl fmt::Display for Estimand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimand::Sum { alias, body, .. } => write!(f, "sum_{alias} {body}"),
            Estimand::Product { terms } => {
                let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            Estimand::CondProb { targets, given } => {
                let t: Vec<String> = targets.iter().map(Atom::symbol).collect();
                let g: Vec<String> = given.iter().map(Atom::symbol).collect();
                write!(f, "P({}|{})", t.join(","), g.join(","))
            }
            Estimand::Marginal { atoms } => {
                let a: Vec<String> = atoms.iter().map(Atom::symbol).collect();
                write!(f, "P({})", a.join(","))
            }
        }
    }
}

impl Estimand {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimand serializes")
    }
}

/// Identification strategy that produced an estimand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Method {
    Direct,
    Backdoor { adjustment: Vec<String> },
    FrontDoor { mediators: Vec<String> },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Backdoor { .. } => "backdoor",
            Method::FrontDoor { .. } => "frontdoor",
        }
    }
}

/// One step in a derivation log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    /// Which rule licensed the step, when one does directly.
    pub rule: Option<u8>,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdentificationResult {
    Identified {
        method: Method,
        estimand: Estimand,
        derivation: Vec<DerivationStep>,
    },
    NotIdentified {
        reason: String,
    },
}

impl IdentificationResult {
    pub fn is_identified(&self) -> bool {
        matches!(self, IdentificationResult::Identified { .. })
    }

    pub fn estimand(&self) -> Option<&Estimand> {
        match self {
            IdentificationResult::Identified { estimand, .. } => Some(estimand),
            IdentificationResult::NotIdentified { .. } => None,
        }
    }
}

fn treatment_atom(t: &str) -> Atom {
    Atom {
        variable: t.to_string(),
        slot: Slot::Treatment,
    }
}

fn outcome_atom(y: &str) -> Atom {
    Atom {
        variable: y.to_string(),
        slot: Slot::Outcome,
    }
}

/// Lowercase alias for a bound variable, primed until it avoids `used`.
fn fresh_alias(variable: &str, used: &mut Vec<String>) -> String {
    let mut alias = variable.to_lowercase();
    while used.contains(&alias) {
        alias.push('\'');
    }
    used.push(alias.clone());
    alias
}

/// Subsets of `pool` in ascending size, lexicographic within a size.
/// `pool` must already be sorted.
fn subsets_ordered(pool: &[String]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for size in 1..=pool.len() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.iter().map(|&i| pool[i].clone()).collect());
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if combo[i] != i + pool.len() - size {
                    break;
                }
                if i == 0 {
                    combo = Vec::new();
                    break;
                }
            }
            if combo.is_empty() {
                break;
            }
            combo[i] += 1;
            for j in i + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

fn backdoor_estimand(treatment: &str, outcome: &str, adjustment: &[String]) -> Estimand {
    let mut used = vec![treatment.to_lowercase(), outcome.to_lowercase()];
    let aliases: Vec<String> = adjustment
        .iter()
        .map(|z| fresh_alias(z, &mut used))
        .collect();
    let z_atoms: Vec<Atom> = adjustment
        .iter()
        .zip(&aliases)
        .map(|(z, a)| Atom {
            variable: z.clone(),
            slot: Slot::Bound(a.clone()),
        })
        .collect();
    let mut given = vec![treatment_atom(treatment)];
    given.extend(z_atoms.clone());
    let mut body = Estimand::Product {
        terms: vec![
            Estimand::CondProb {
                targets: vec![outcome_atom(outcome)],
                given,
            },
            Estimand::Marginal { atoms: z_atoms },
        ],
    };
    for (z, a) in adjustment.iter().zip(&aliases).rev() {
        body = Estimand::Sum {
            variable: z.clone(),
            alias: a.clone(),
            body: Box::new(body),
        };
    }
    body
}

fn frontdoor_estimand(treatment: &str, outcome: &str, mediators: &[String]) -> Estimand {
    let mut used = vec![treatment.to_lowercase(), outcome.to_lowercase()];
    let w_aliases: Vec<String> = mediators
        .iter()
        .map(|w| fresh_alias(w, &mut used))
        .collect();
    let t_alias = fresh_alias(treatment, &mut used);
    let w_atoms: Vec<Atom> = mediators
        .iter()
        .zip(&w_aliases)
        .map(|(w, a)| Atom {
            variable: w.clone(),
            slot: Slot::Bound(a.clone()),
        })
        .collect();
    let t_bound = Atom {
        variable: treatment.to_string(),
        slot: Slot::Bound(t_alias.clone()),
    };
    let mut inner_given = vec![t_bound.clone()];
    inner_given.extend(w_atoms.clone());
    let inner = Estimand::Sum {
        variable: treatment.to_string(),
        alias: t_alias,
        body: Box::new(Estimand::Product {
            terms: vec![
                Estimand::CondProb {
                    targets: vec![outcome_atom(outcome)],
                    given: inner_given,
                },
                Estimand::Marginal {
                    atoms: vec![t_bound],
                },
            ],
        }),
    };
    let mut body = Estimand::Product {
        terms: vec![
            Estimand::CondProb {
                targets: w_atoms,
                given: vec![treatment_atom(treatment)],
            },
            inner,
        ],
    };
    for (w, a) in mediators.iter().zip(&w_aliases).rev() {
        body = Estimand::Sum {
            variable: w.clone(),
            alias: a.clone(),
            body: Box::new(body),
        };
    }
    body
}

/// All directed paths from `from` to `to` (each path as the full node list).
fn directed_paths(graph: &CausalGraph, from: &str, to: &str) -> Vec<Vec<String>> {
    fn walk(
        graph: &CausalGraph,
        cur: &str,
        to: &str,
        path: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        if cur == to {
            out.push(path.clone());
            return;
        }
        for child in graph.children_of(cur).expect("known variable") {
            path.push(child.to_string());
            walk(graph, child, to, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    let mut path = vec![from.to_string()];
    walk(graph, from, to, &mut path, &mut out);
    out
}

/// Identifies P(outcome | do(treatment)) on `graph`, trying strategies in a
/// fixed order: direct exchange, then backdoor sets, then front-door
/// mediator sets. Candidate sets are searched in ascending size with
/// lexicographic tie-break, so the result is deterministic.
pub fn identify(
    graph: &CausalGraph,
    treatment: &str,
    outcome: &str,
) -> Result<IdentificationResult, IdentifyError> {
    let t_decl = graph.variable(treatment)?;
    let y_decl = graph.variable(outcome)?;
    if treatment == outcome {
        return Err(IdentifyError::SameVariable(treatment.to_string()));
    }
    if !t_decl.observed {
        return Err(IdentifyError::LatentTreatment(treatment.to_string()));
    }
    if !y_decl.observed {
        return Err(IdentifyError::LatentOutcome(outcome.to_string()));
    }

    // (a) Direct exchange: P(y | do(t)) = P(y | t).
    if rule_applies(Rule::Two, graph, &DoQuery::new(treatment, outcome, &[]))? {
        return Ok(IdentificationResult::Identified {
            method: Method::Direct,
            estimand: Estimand::CondProb {
                targets: vec![outcome_atom(outcome)],
                given: vec![treatment_atom(treatment)],
            },
            derivation: vec![DerivationStep {
                rule: Some(2),
                statement: format!(
                    "P({y}|do({t})) = P({y}|{t}): {Y} and {T} are d-separated in the graph with {T}'s outgoing edges removed",
                    y = outcome.to_lowercase(),
                    t = treatment.to_lowercase(),
                    Y = outcome,
                    T = treatment,
                ),
            }],
        });
    }

    let descendants = graph.descendants_of(treatment)?;
    let mut pool: Vec<String> = graph
        .variables()
        .iter()
        .filter(|v| v.observed && v.name != treatment && v.name != outcome)
        .map(|v| v.name.clone())
        .collect();
    pool.sort();

    // (b) Backdoor adjustment: Rule 2 given Z, plus Rule 3 making P(z|do(t)) = P(z).
    let backdoor_pool: Vec<String> = pool
        .iter()
        .filter(|name| !descendants.contains(&name.as_str()))
        .cloned()
        .collect();
    let bar = graph.mutilate(treatment, Mutilation::RemoveIncoming)?;
    for set in subsets_ordered(&backdoor_pool) {
        let refs: Vec<&str> = set.iter().map(|s| s.as_str()).collect();
        let rule2 = rule_applies(Rule::Two, graph, &DoQuery::new(treatment, outcome, &refs))?;
        let rule3 = bar.d_separated(&refs, &[treatment], &[])?;
        if rule2 && rule3 {
            let set_text = set.join(",");
            return Ok(IdentificationResult::Identified {
                method: Method::Backdoor { adjustment: set.clone() },
                derivation: vec![
                    DerivationStep {
                        rule: Some(2),
                        statement: format!(
                            "P({y}|do({t}),{z}) = P({y}|{t},{z}): separation given {{{set_text}}} in the graph with {T}'s outgoing edges removed",
                            y = outcome.to_lowercase(),
                            t = treatment.to_lowercase(),
                            z = set_text.to_lowercase(),
                            T = treatment,
                        ),
                    },
                    DerivationStep {
                        rule: Some(3),
                        statement: format!(
                            "P({z}|do({t})) = P({z}): {{{set_text}}} contains no descendant of {T} and is separated from it post-intervention",
                            z = set_text.to_lowercase(),
                            t = treatment.to_lowercase(),
                            T = treatment,
                        ),
                    },
                ],
                estimand: backdoor_estimand(treatment, outcome, &set),
            });
        }
    }

    // (c) Front-door adjustment through an observed mediator set.
    let paths = directed_paths(graph, treatment, outcome);
    if !paths.is_empty() {
        let under_t = graph.mutilate(treatment, Mutilation::RemoveOutgoing)?;
        for set in subsets_ordered(&pool) {
            let refs: Vec<&str> = set.iter().map(|s| s.as_str()).collect();
            // (i) every directed path T -> ... -> Y passes through the set,
            // and every member sits on such a path.
            let intercepts = paths
                .iter()
                .all(|p| p.iter().any(|node| set.contains(node)));
            let members_used = set.iter().all(|w| paths.iter().any(|p| p.contains(w)));
            if !(intercepts && members_used) {
                continue;
            }
            // (ii) no unblocked back-path from T to the mediators.
            if !under_t.d_separated(&[treatment], &refs, &[])? {
                continue;
            }
            // (iii) T blocks every back-path from the mediators to Y.
            let mut under_w = graph.clone();
            for w in &set {
                under_w = under_w.mutilate(w, Mutilation::RemoveOutgoing)?;
            }
            if !under_w.d_separated(&refs, &[outcome], &[treatment])? {
                continue;
            }
            let set_text = set.join(",");
            return Ok(IdentificationResult::Identified {
                method: Method::FrontDoor { mediators: set.clone() },
                derivation: vec![
                    DerivationStep {
                        rule: None,
                        statement: format!(
                            "every directed path from {treatment} to {outcome} passes through {{{set_text}}}"
                        ),
                    },
                    DerivationStep {
                        rule: Some(2),
                        statement: format!(
                            "P({w}|do({t})) = P({w}|{t}): no open back-path from {T} to {{{set_text}}}",
                            w = set_text.to_lowercase(),
                            t = treatment.to_lowercase(),
                            T = treatment,
                        ),
                    },
                    DerivationStep {
                        rule: Some(2),
                        statement: format!(
                            "P({y}|do({w}),{t}') = P({y}|{w},{t}'): {T} blocks every back-path from {{{set_text}}} to {Y}",
                            y = outcome.to_lowercase(),
                            w = set_text.to_lowercase(),
                            t = treatment.to_lowercase(),
                            T = treatment,
                            Y = outcome,
                        ),
                    },
                ],
                estimand: frontdoor_estimand(treatment, outcome, &set),
            });
        }
    }

    Ok(IdentificationResult::NotIdentified {
        reason: "no strategy applies".to_string(),
    })
}

/// Plug-in evaluation of an estimand against an empirical joint, at
/// intervention value `t_star` and outcome state `y`.
///
/// Sums accumulate their terms smallest-first so results are reproducible to
/// well below the tolerances used in tests.
pub fn evaluate_estimand(
    estimand: &Estimand,
    joint: &EmpiricalJoint,
    t_star: usize,
    y: usize,
) -> Result<f64, EvalError> {
    let mut env: HashMap<String, usize> = HashMap::new();
    eval(estimand, joint, t_star, y, &mut env)
}

fn resolve(
    atom: &Atom,
    t_star: usize,
    y: usize,
    env: &HashMap<String, usize>,
) -> Result<usize, EvalError> {
    match &atom.slot {
        Slot::Treatment => Ok(t_star),
        Slot::Outcome => Ok(y),
        Slot::Bound(alias) => env
            .get(alias)
            .copied()
            .ok_or_else(|| EvalError::UnboundAlias(alias.clone())),
    }
}

fn eval(
    estimand: &Estimand,
    joint: &EmpiricalJoint,
    t_star: usize,
    y: usize,
    env: &mut HashMap<String, usize>,
) -> Result<f64, EvalError> {
    match estimand {
        Estimand::Sum {
            variable,
            alias,
            body,
        } => {
            let card = joint
                .card_of(variable)
                .map_err(|_| EvalError::MissingVariable(variable.clone()))?;
            let mut terms = Vec::with_capacity(card);
            for state in 0..card {
                env.insert(alias.clone(), state);
                terms.push(eval(body, joint, t_star, y, env)?);
            }
            env.remove(alias);
            terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(terms.into_iter().sum())
        }
        Estimand::Product { terms } => {
            let mut acc = 1.0;
            for t in terms {
                acc *= eval(t, joint, t_star, y, env)?;
            }
            Ok(acc)
        }
        Estimand::CondProb { targets, given } => {
            let resolve_all = |atoms: &[Atom]| -> Result<Vec<(String, usize)>, EvalError> {
                atoms
                    .iter()
                    .map(|a| Ok((a.variable.clone(), resolve(a, t_star, y, env)?)))
                    .collect()
            };
            let tgt = resolve_all(targets)?;
            let gvn = resolve_all(given)?;
            let tgt_refs: Vec<(&str, usize)> = tgt.iter().map(|(n, s)| (n.as_str(), *s)).collect();
            let gvn_refs: Vec<(&str, usize)> = gvn.iter().map(|(n, s)| (n.as_str(), *s)).collect();
            for (name, _) in tgt.iter().chain(gvn.iter()) {
                joint
                    .card_of(name)
                    .map_err(|_| EvalError::MissingVariable(name.clone()))?;
            }
            match joint.cond_prob(&tgt_refs, &gvn_refs)? {
                Some(p) => Ok(p),
                None => {
                    let event: Vec<String> = gvn.iter().map(|(n, s)| format!("{n}={s}")).collect();
                    Err(EvalError::ZeroConditioningMass {
                        event: format!("P({})", event.join(",")),
                    })
                }
            }
        }
        Estimand::Marginal { atoms } => {
            let ev = atoms
                .iter()
                .map(|a| Ok((a.variable.clone(), resolve(a, t_star, y, env)?)))
                .collect::<Result<Vec<_>, EvalError>>()?;
            for (name, _) in &ev {
                joint
                    .card_of(name)
                    .map_err(|_| EvalError::MissingVariable(name.clone()))?;
            }
            let refs: Vec<(&str, usize)> = ev.iter().map(|(n, s)| (n.as_str(), *s)).collect();
            Ok(joint.prob(&refs)?)
        }
    }
}
