//! The graph text format and its emitters.
//!
//! Parses a `.cg` source, shows the exact-round-trip DSL emission, the DOT
//! rendering (latents dashed), and the byte-stable JSON interchange form.
//!
//! ```bash
//! cargo run --example graph_dsl
//! ```

use causal_twin::dsl::{emit_graph, parse_graph, GraphFormat};

fn main() {
    let source = "\
# treatment, outcome, observed mediator, latent confounder
var U latent
U -> T
U -> Y
T -> W
W -> Y
";
    let graph = parse_graph(source).unwrap();
    println!("parsed: {graph}\n");

    let dsl = emit_graph(&graph, GraphFormat::Dsl);
    println!("-- DSL (comments dropped, structure identical) --\n{dsl}");
    assert_eq!(parse_graph(&dsl).unwrap(), graph);

    println!("-- DOT --\n{}", emit_graph(&graph, GraphFormat::Dot));
    println!("-- JSON --\n{}", emit_graph(&graph, GraphFormat::Json));
}
