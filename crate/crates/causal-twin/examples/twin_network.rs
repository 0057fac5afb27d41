//! Building the paired pre/post-intervention model and rendering it.
//!
//! Prints the DOT for the common-cause graph under do(T=1); pipe it into
//! graphviz to see the observation plate, the starred copy, and the shared
//! parameter nodes.
//!
//! ```bash
//! cargo run --example twin_network | dot -Tsvg > twin.svg
//! ```

use causal_twin::dsl::parse_graph;
use causal_twin::twin::causal_bayes_construct;

fn main() {
    let graph = parse_graph("var Z\nZ -> T\nZ -> Y\nT -> Y").unwrap();
    let twin = causal_bayes_construct(&graph, "T", 1).unwrap();

    eprintln!("pre graph:  {}", twin.pre);
    eprintln!("post graph: {}", twin.post);
    for p in &twin.parameters {
        eprintln!(
            "parameter {} -> {} ({} states x {} parent configs){}",
            p.name,
            p.variable,
            p.card,
            p.parent_configs,
            if p.shared {
                ", shared with the starred copy"
            } else {
                ", observational side only"
            }
        );
    }
    eprintln!();
    println!("{}", twin.to_dot());
}
