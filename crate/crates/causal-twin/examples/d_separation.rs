//! Graph surgery and separation queries: the machinery the rewrite rules
//! are built from.
//!
//! Shows the two mutilated forms of the common-cause graph, the separation
//! facts that hold in each, and how the three rules read those facts.
//!
//! ```bash
//! cargo run --example d_separation
//! ```

use causal_twin::docalc::{rule_applies, DoQuery, Rule};
use causal_twin::dsl::parse_graph;
use causal_twin::graph::Mutilation;

fn main() {
    let graph = parse_graph("var Z\nZ -> T\nZ -> Y\nT -> Y").unwrap();
    println!("graph: {graph}");

    let bar = graph.mutilate("T", Mutilation::RemoveIncoming).unwrap();
    let under = graph.mutilate("T", Mutilation::RemoveOutgoing).unwrap();
    println!("incoming edges of T removed: {bar}");
    println!("outgoing edges of T removed: {under}\n");

    let queries = [
        (&graph, "original", vec!["Z"], vec!["T"], vec![]),
        (&bar, "incoming removed", vec!["Z"], vec!["T"], vec![]),
        (&under, "outgoing removed", vec!["Y"], vec!["T"], vec![]),
        (&under, "outgoing removed", vec!["Y"], vec!["T"], vec!["Z"]),
    ];
    for (g, label, a, b, z) in queries {
        let sep = g.d_separated(&a, &b, &z).unwrap();
        println!("  {label}: {a:?} _||_ {b:?} | {z:?}  ->  {sep}");
    }
    println!();

    let checks = [
        (
            Rule::Two,
            DoQuery::new("T", "Y", &[]),
            "exchange do(t) for t directly",
        ),
        (
            Rule::Two,
            DoQuery::new("T", "Y", &["Z"]),
            "exchange do(t) for t given Z",
        ),
        (
            Rule::Three,
            DoQuery::new("T", "Z", &[]),
            "drop do(t) from P(z|do(t))",
        ),
        (
            Rule::One,
            DoQuery::new("T", "Y", &["Z"]),
            "drop Z from P(y|do(t),z)",
        ),
    ];
    for (rule, query, meaning) in checks {
        let ok = rule_applies(rule, &graph, &query).unwrap();
        println!("  {rule:?} ({meaning}): {ok}");
    }
}
