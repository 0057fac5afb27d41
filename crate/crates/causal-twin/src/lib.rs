//! Causal inference for small discrete models, two ways at once.
//!
//! Given a causal graph, a treatment, and an outcome, this crate answers
//! `P(outcome | do(treatment))` along two independent routes and lets you
//! check that they agree:
//!
//! * **Do-calculus route**: [`docalc`] applies the three rewrite rules via
//!   d-separation tests on mutilated graphs, identifies an estimand
//!   (direct, backdoor, or front-door), and evaluates it as a plug-in
//!   against the empirical joint of the data.
//! * **Bayesian route**: [`twin`] builds a paired pre/post-intervention
//!   graphical model whose non-treatment parameters are shared between the
//!   two halves, and [`bayes`] computes the exact conjugate
//!   posterior-predictive for the post-intervention outcome.
//!
//! Around those two engines sit a line-based graph DSL with DOT and JSON
//! emitters ([`dsl`]), grouped-count data handling ([`data`]), ancestral
//! forward sampling and a rejection sampler for graphs where the effect is
//! not identifiable ([`bayes`]), a sample-size convergence harness
//! ([`convergence`]), and a command-line front end ([`cli`]).
//!
//! Start with the runnable examples in `examples/`; each one exercises a
//! major capability end to end.

pub mod bayes;
pub mod cli;
pub mod convergence;
pub mod cpt;
pub mod data;
pub mod docalc;
pub mod dsl;
pub mod graph;
pub mod rng;
pub mod twin;

pub use data::{empirical_joint, load_counts, CountsTable, EmpiricalJoint};
pub use docalc::{
    evaluate_estimand, identify, rule_applies, DoQuery, Estimand, IdentificationResult, Rule,
};
pub use dsl::{emit_graph, parse_graph, GraphFormat};
pub use graph::{CausalGraph, GraphBuilder, Mutilation, VariableDecl};
pub use twin::{causal_bayes_construct, TwinPgm};
