//! The Simpson's-reversal table analyzed under two causal readings.
//!
//! The same counts support opposite treatment recommendations depending on
//! whether the covariate Z is a common cause of treatment and outcome or a
//! mediator between them. Both the do-calculus plug-in and the Bayesian
//! twin-model predictive are computed for each reading, and they agree.
//!
//! ```bash
//! cargo run --example simpson_paradox
//! ```

use causal_twin::bayes::{fit_posteriors, posterior_predictive};
use causal_twin::data::{empirical_joint, load_counts};
use causal_twin::docalc::{evaluate_estimand, identify};
use causal_twin::dsl::parse_graph;
use causal_twin::twin::causal_bayes_construct;
use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let csv = std::fs::read_to_string(dir.join("table1.csv")).unwrap();

    let case1 = parse_graph(&std::fs::read_to_string(dir.join("case1.cg")).unwrap()).unwrap();
    let joint = empirical_joint(&load_counts(&csv, &case1).unwrap()).unwrap();

    println!("observational conditionals:");
    for z in 0..2 {
        for t in 0..2 {
            let p = joint
                .cond_prob(&[("Y", 1)], &[("Z", z), ("T", t)])
                .unwrap()
                .unwrap();
            println!("  P(Y=1 | Z={z}, T={t}) = {p:.4}");
        }
    }
    for t in 0..2 {
        let p = joint.cond_prob(&[("Y", 1)], &[("T", t)]).unwrap().unwrap();
        println!("  P(Y=1 | T={t}) = {p:.4}");
    }
    println!("marginally T=0 looks better, stratified by Z T=1 looks better.\n");

    for (label, file) in [
        ("Z is a common cause", "case1.cg"),
        ("Z is a mediator", "case2.cg"),
    ] {
        let graph = parse_graph(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap();
        let table = load_counts(&csv, &graph).unwrap();
        let joint = empirical_joint(&table).unwrap();
        let identified = identify(&graph, "T", "Y").unwrap();
        let estimand = identified.estimand().unwrap();
        println!("{label}: P(y|do(t)) = {estimand}");
        let mut do_values = Vec::new();
        for t_star in 0..2 {
            let plugin = evaluate_estimand(estimand, &joint, t_star, 1).unwrap();
            let twin = causal_bayes_construct(&graph, "T", t_star).unwrap();
            let posterior = fit_posteriors(&twin, &table, 1.0).unwrap();
            let bayes = posterior_predictive(&twin, &posterior, "Y", 1).unwrap();
            println!("  P(Y=1 | do(T={t_star})): plug-in {plugin:.7}, Bayes {bayes:.7}");
            do_values.push(plugin);
        }
        let best = if do_values[1] > do_values[0] { 1 } else { 0 };
        println!("  -> prefer T={best}\n");
    }
}
