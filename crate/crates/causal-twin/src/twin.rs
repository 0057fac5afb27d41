//! Construction of the paired pre/post-intervention graphical model.
//!
//! The builder draws the original graph inside an observation plate, gives
//! every variable a parameter node for its conditional distribution, copies
//! the graph with the treatment's incoming edges removed and every variable
//! starred, and links each non-treatment parameter to both copies. That
//! sharing is the invariance assumption: intervening changes only how the
//! treatment takes its value.

use crate::dsl::JsonGraph;
use crate::graph::{CausalGraph, GraphBuilder, GraphError, Mutilation};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TwinError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("state {state} out of range for `{variable}` (cardinality {card})")]
    StateOutOfRange {
        variable: String,
        state: usize,
        card: usize,
    },
}

/// A parameter node owning one conditional probability table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterNode {
    /// Display name: the conventional Greek letters for the shapes that
    /// admit them, `theta_V` otherwise. Purely cosmetic.
    pub name: String,
    /// The variable whose CPT this parameter owns.
    pub variable: String,
    /// Number of states of the variable.
    pub card: usize,
    /// Number of parent configurations (product of parent cardinalities).
    pub parent_configs: usize,
    /// Whether the parameter also feeds the starred copy. True for every
    /// variable except the treatment.
    pub shared: bool,
}

/// The joint pre/post-intervention model produced by
/// [`causal_bayes_construct`].
///
/// The plate size M is symbolic: it binds only when data arrives. The
/// intervention value is data on the structure, not a node; t* has no
/// distribution of its own.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinPgm {
    /// The observational graph, replicated per observation.
    pub pre: CausalGraph,
    /// The post-intervention copy over starred names.
    pub post: CausalGraph,
    /// One parameter per pre-graph variable, in declaration order.
    pub parameters: Vec<ParameterNode>,
    pub treatment: String,
    pub t_star: usize,
}

pub fn starred(name: &str) -> String {
    format!("{name}*")
}

/// Parents of `variable` in canonical order (declaration order of the
/// parents), with their cardinalities.
pub(crate) fn canonical_parents(graph: &CausalGraph, variable: &str) -> Vec<(String, usize)> {
    graph
        .parents_of(variable)
        .expect("variable exists")
        .iter()
        .map(|p| (p.to_string(), graph.variable(p).unwrap().card))
        .collect()
}

/// Conventional parameter letters for the model shapes that have them:
/// `phi` for the treatment, `psi` for the sink outcome, `gamma` for the
/// remaining exogenous variable, `lambda` for a mediator between treatment
/// and sink.
fn paper_letters(graph: &CausalGraph, treatment: &str) -> Option<Vec<(String, String)>> {
    let names: Vec<&str> = graph.variables().iter().map(|v| v.name.as_str()).collect();
    let sinks: Vec<&str> = names
        .iter()
        .filter(|&&v| {
            graph.children_of(v).unwrap().is_empty() && !graph.parents_of(v).unwrap().is_empty()
        })
        .copied()
        .collect();
    let [sink] = sinks.as_slice() else {
        return None;
    };
    if *sink == treatment {
        return None;
    }
    let rest: Vec<&str> = names
        .iter()
        .filter(|&&v| v != treatment && v != *sink)
        .copied()
        .collect();
    match rest.as_slice() {
        [other] => Some(vec![
            (treatment.to_string(), "phi".to_string()),
            (sink.to_string(), "psi".to_string()),
            (other.to_string(), "gamma".to_string()),
        ]),
        [a, b] => {
            let is_mediator = |v: &str| {
                graph.parents_of(v).unwrap() == vec![treatment]
                    && graph.children_of(v).unwrap() == vec![*sink]
            };
            let is_exogenous = |v: &str| graph.parents_of(v).unwrap().is_empty();
            let (mediator, exo) = if is_mediator(a) && is_exogenous(b) {
                (*a, *b)
            } else if is_mediator(b) && is_exogenous(a) {
                (*b, *a)
            } else {
                return None;
            };
            Some(vec![
                (treatment.to_string(), "phi".to_string()),
                (sink.to_string(), "psi".to_string()),
                (mediator.to_string(), "lambda".to_string()),
                (exo.to_string(), "gamma".to_string()),
            ])
        }
        _ => None,
    }
}

/// Builds the twin model for `do(treatment = t_star)` on `graph`.
///
/// The post graph is the mutilated graph with every variable renamed
/// `V` -> `V*`; latent variables get starred copies too, even when the
/// mutilation disconnects them. Every non-treatment parameter is shared
/// between the copies; the treatment's parameter feeds only the
/// observational side.
pub fn causal_bayes_construct(
    graph: &CausalGraph,
    treatment: &str,
    t_star: usize,
) -> Result<TwinPgm, TwinError> {
    let decl = graph.variable(treatment)?;
    if t_star >= decl.card {
        return Err(TwinError::StateOutOfRange {
            variable: treatment.to_string(),
            state: t_star,
            card: decl.card,
        });
    }

    let mutilated = graph.mutilate(treatment, Mutilation::RemoveIncoming)?;
    let mut b = GraphBuilder::new();
    for v in mutilated.variables() {
        b.variable(&starred(&v.name), v.observed, v.card)?;
    }
    for (p, c) in mutilated.edges() {
        b.edge(&starred(p), &starred(c))?;
    }
    let post = b.build()?;

    let letters = paper_letters(graph, treatment);
    let name_of = |variable: &str| -> String {
        letters
            .as_ref()
            .and_then(|m| m.iter().find(|(v, _)| v == variable))
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| format!("theta_{variable}"))
    };

    let parameters = graph
        .variables()
        .iter()
        .map(|v| ParameterNode {
            name: name_of(&v.name),
            variable: v.name.clone(),
            card: v.card,
            parent_configs: canonical_parents(graph, &v.name)
                .iter()
                .map(|(_, c)| c)
                .product(),
            shared: v.name != treatment,
        })
        .collect();

    Ok(TwinPgm {
        pre: graph.clone(),
        post,
        parameters,
        treatment: treatment.to_string(),
        t_star,
    })
}

impl TwinPgm {
    pub fn parameter(&self, variable: &str) -> Option<&ParameterNode> {
        self.parameters.iter().find(|p| p.variable == variable)
    }

    /// DOT rendering: the observational plate and the intervened copy as two
    /// clusters, parameter nodes outside both with edges into their clients.
    /// Starred non-treatment variables are drawn dashed: they are
    /// unobserved until the intervention is carried out.
    pub fn to_dot(&self) -> String {
        let quoted = |name: &str| format!("\"{name}\"");
        let mut out = String::from("digraph twin {\n");
        out.push_str("  subgraph cluster_pre {\n    label=\"m = 1..M\";\n");
        for v in self.pre.variables() {
            if v.observed {
                out.push_str(&format!("    {};\n", v.name));
            } else {
                out.push_str(&format!("    {} [style=dashed];\n", v.name));
            }
        }
        for (p, c) in self.pre.edges() {
            out.push_str(&format!("    {p} -> {c};\n"));
        }
        out.push_str("  }\n");

        out.push_str(&format!(
            "  subgraph cluster_post {{\n    label=\"do({} = {})\";\n",
            self.treatment, self.t_star
        ));
        let star_t = starred(&self.treatment);
        for v in self.post.variables() {
            if v.name == star_t {
                out.push_str(&format!("    {};\n", quoted(&v.name)));
            } else {
                out.push_str(&format!("    {} [style=dashed];\n", quoted(&v.name)));
            }
        }
        for (p, c) in self.post.edges() {
            out.push_str(&format!("    {} -> {};\n", quoted(p), quoted(c)));
        }
        out.push_str("  }\n");

        for param in &self.parameters {
            out.push_str(&format!("  {} [shape=circle];\n", param.name));
            out.push_str(&format!("  {} -> {};\n", param.name, param.variable));
            if param.shared {
                out.push_str(&format!(
                    "  {} -> {};\n",
                    param.name,
                    quoted(&starred(&param.variable))
                ));
            }
        }
        out.push_str("}\n");
        out
    }

    /// JSON mirroring the structure, with stable key order.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ParamJson<'a> {
            name: &'a str,
            variable: &'a str,
            card: usize,
            parent_configs: usize,
            shared: bool,
        }
        #[derive(Serialize)]
        struct InterventionJson<'a> {
            treatment: &'a str,
            t_star: usize,
        }
        #[derive(Serialize)]
        struct TwinJson<'a> {
            pre: JsonGraph,
            post: JsonGraph,
            parameters: Vec<ParamJson<'a>>,
            intervention: InterventionJson<'a>,
        }
        let doc = TwinJson {
            pre: JsonGraph::from_graph(&self.pre),
            post: JsonGraph::from_graph(&self.post),
            parameters: self
                .parameters
                .iter()
                .map(|p| ParamJson {
                    name: &p.name,
                    variable: &p.variable,
                    card: p.card,
                    parent_configs: p.parent_configs,
                    shared: p.shared,
                })
                .collect(),
            intervention: InterventionJson {
                treatment: &self.treatment,
                t_star: self.t_star,
            },
        };
        serde_json::to_string(&doc).expect("twin serializes")
    }
}
