//! Conditional probability tables for fully specified models: the input to
//! forward sampling and the reference for exact interventional ground truth.
//!
//! JSON format: `{"variable": {"parent states as comma string": [probs]}}`,
//! one row per parent configuration. Parents are ordered by their
//! declaration position in the graph; root variables use the empty-string
//! key.

use crate::graph::{CausalGraph, GraphError};
use crate::twin::canonical_parents;
use std::collections::BTreeMap;
use thiserror::Error;

const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CptError {
    #[error(
        "CPT row for `{variable}` given [{config}] does not sum to 1 (or has negative entries)"
    )]
    UnnormalizedCpt { variable: String, config: String },
    #[error("missing CPT for `{0}`")]
    MissingVariable(String),
    #[error("missing CPT row for `{variable}` given [{config}]")]
    MissingRow { variable: String, config: String },
    #[error("CPT for `{variable}`: {reason}")]
    Malformed { variable: String, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One variable's table: rows indexed by the mixed-radix encoding of its
/// parents' states (parents in declaration order).
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub variable: String,
    pub parents: Vec<String>,
    parent_cards: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    fn row_index(&self, parent_states: &[usize]) -> usize {
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    pub fn row(&self, parent_states: &[usize]) -> &[f64] {
        &self.rows[self.row_index(parent_states)]
    }

    pub fn prob(&self, parent_states: &[usize], state: usize) -> f64 {
        self.rows[self.row_index(parent_states)][state]
    }
}

/// A full CPT assignment for a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CptSet {
    tables: BTreeMap<String, Cpt>,
}

fn config_key(states: &[usize]) -> String {
    states
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn normalized(row: &[f64]) -> bool {
    row.iter().all(|&p| p >= 0.0) && (row.iter().sum::<f64>() - 1.0).abs() <= ROW_TOLERANCE
}

impl CptSet {
    /// Builds a set from per-variable rows keyed by parent configuration,
    /// validating shape and normalization against the graph.
    pub fn from_rows(
        graph: &CausalGraph,
        rows: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
    ) -> Result<Self, CptError> {
        for name in rows.keys() {
            graph.variable(name)?;
        }
        let mut tables = BTreeMap::new();
        for v in graph.variables() {
            let var_rows = rows
                .get(&v.name)
                .ok_or_else(|| CptError::MissingVariable(v.name.clone()))?;
            let parents = canonical_parents(graph, &v.name);
            let parent_cards: Vec<usize> = parents.iter().map(|(_, c)| *c).collect();
            let n_configs: usize = parent_cards.iter().product();
            let mut table = Vec::with_capacity(n_configs);
            let mut states = vec![0usize; parents.len()];
            for _ in 0..n_configs {
                let key = config_key(&states);
                let row = var_rows.get(&key).ok_or_else(|| CptError::MissingRow {
                    variable: v.name.clone(),
                    config: key.clone(),
                })?;
                if row.len() != v.card {
                    return Err(CptError::Malformed {
                        variable: v.name.clone(),
                        reason: format!(
                            "row [{key}] has {} entries, expected {}",
                            row.len(),
                            v.card
                        ),
                    });
                }
                if !normalized(row) {
                    return Err(CptError::UnnormalizedCpt {
                        variable: v.name.clone(),
                        config: key,
                    });
                }
                table.push(row.clone());
                // advance mixed-radix counter
                for j in (0..states.len()).rev() {
                    states[j] += 1;
                    if states[j] < parent_cards[j] {
                        break;
                    }
                    states[j] = 0;
                }
            }
            if var_rows.len() != n_configs {
                return Err(CptError::Malformed {
                    variable: v.name.clone(),
                    reason: format!("{} rows given, expected {}", var_rows.len(), n_configs),
                });
            }
            tables.insert(
                v.name.clone(),
                Cpt {
                    variable: v.name.clone(),
                    parents: parents.into_iter().map(|(p, _)| p).collect(),
                    parent_cards,
                    rows: table,
                },
            );
        }
        Ok(Self { tables })
    }

    pub fn from_json(text: &str, graph: &CausalGraph) -> Result<Self, CptError> {
        let rows: BTreeMap<String, BTreeMap<String, Vec<f64>>> = serde_json::from_str(text)
            .map_err(|e| CptError::Malformed {
                variable: "<json>".to_string(),
                reason: e.to_string(),
            })?;
        Self::from_rows(graph, rows)
    }

    pub fn to_json(&self) -> String {
        let mut out: BTreeMap<&str, BTreeMap<String, &Vec<f64>>> = BTreeMap::new();
        for (name, cpt) in &self.tables {
            let mut rows = BTreeMap::new();
            let mut states = vec![0usize; cpt.parents.len()];
            for idx in 0..cpt.rows.len() {
                rows.insert(config_key(&states), &cpt.rows[idx]);
                for j in (0..states.len()).rev() {
                    states[j] += 1;
                    if states[j] < cpt.parent_cards[j] {
                        break;
                    }
                    states[j] = 0;
                }
            }
            out.insert(name, rows);
        }
        serde_json::to_string_pretty(&out).expect("cpt serializes")
    }

    pub fn get(&self, variable: &str) -> Option<&Cpt> {
        self.tables.get(variable)
    }

    /// Checks the set is complete and shape-compatible with `graph` (the set
    /// may have been built against a different graph than the one in hand).
    pub fn validate(&self, graph: &CausalGraph) -> Result<(), CptError> {
        for v in graph.variables() {
            let cpt = self
                .tables
                .get(&v.name)
                .ok_or_else(|| CptError::MissingVariable(v.name.clone()))?;
            let parents = canonical_parents(graph, &v.name);
            let names: Vec<&String> = parents.iter().map(|(p, _)| p).collect();
            let cards: Vec<usize> = parents.iter().map(|(_, c)| *c).collect();
            if cpt.parents.iter().collect::<Vec<_>>() != names || cpt.parent_cards != cards {
                return Err(CptError::Malformed {
                    variable: v.name.clone(),
                    reason: "parent structure does not match the graph".to_string(),
                });
            }
            if cpt.rows.iter().any(|r| r.len() != v.card) {
                return Err(CptError::Malformed {
                    variable: v.name.clone(),
                    reason: format!("rows are not over {} states", v.card),
                });
            }
        }
        Ok(())
    }

    /// Joint probability of a full assignment (indexed by graph declaration
    /// order).
    pub fn joint_prob(&self, graph: &CausalGraph, assignment: &[usize]) -> f64 {
        let pos = |name: &str| {
            graph
                .variables()
                .iter()
                .position(|v| v.name == name)
                .unwrap()
        };
        graph
            .variables()
            .iter()
            .map(|v| {
                let cpt = &self.tables[&v.name];
                let parent_states: Vec<usize> =
                    cpt.parents.iter().map(|p| assignment[pos(p)]).collect();
                cpt.prob(&parent_states, assignment[pos(&v.name)])
            })
            .product()
    }
}
