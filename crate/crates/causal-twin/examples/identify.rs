//! Identification on the four stock graphs: which estimand (if any) the
//! rule engine finds for P(Y | do(T)).
//!
//! ```bash
//! cargo run --example identify
//! ```

use causal_twin::docalc::{identify, IdentificationResult};
use causal_twin::dsl::parse_graph;

fn main() {
    let graphs = [
        ("confounded by observed Z", "var Z\nZ -> T\nZ -> Y\nT -> Y"),
        ("Z is a mediator", "var T\nT -> Z\nZ -> Y\nT -> Y"),
        (
            "confounded by latent Z",
            "var Z latent\nZ -> T\nZ -> Y\nT -> Y",
        ),
        (
            "latent U, observed mediator W",
            "var U latent\nU -> T\nU -> Y\nT -> W\nW -> Y",
        ),
    ];
    for (label, source) in graphs {
        let graph = parse_graph(source).expect("stock graphs parse");
        println!("{label}: {graph}");
        match identify(&graph, "T", "Y").expect("valid query") {
            IdentificationResult::Identified {
                method,
                estimand,
                derivation,
            } => {
                println!(
                    "  identified via {}: P(y|do(t)) = {estimand}",
                    method.name()
                );
                for step in derivation {
                    match step.rule {
                        Some(r) => println!("    rule {r}: {}", step.statement),
                        None => println!("    {}", step.statement),
                    }
                }
            }
            IdentificationResult::NotIdentified { reason } => {
                println!("  NOT IDENTIFIED: {reason}");
            }
        }
        println!();
    }
}
