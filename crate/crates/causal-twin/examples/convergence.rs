//! How fast the two routes agree: forward-sample datasets of growing size,
//! estimate P(Y=1|do(T)) with the plug-in and the Bayesian predictive, and
//! watch both medians close on the exact truncated-product truth.
//!
//! Writes the per-replicate rows to `convergence_rows.csv` for plotting.
//!
//! ```bash
//! cargo run --release --example convergence
//! ```

use causal_twin::convergence::{median, rows_to_csv, run_convergence};
use causal_twin::cpt::CptSet;
use causal_twin::dsl::parse_graph;
use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let graph = parse_graph(&std::fs::read_to_string(dir.join("case1.cg")).unwrap()).unwrap();
    let cpts = CptSet::from_json(
        &std::fs::read_to_string(dir.join("case1_cpts.json")).unwrap(),
        &graph,
    )
    .unwrap();

    let grid = [100u64, 1_000, 10_000, 100_000];
    let rows = run_convergence(&graph, &cpts, "T", "Y", 1, &grid, 20, 5).unwrap();

    println!(
        "{:>8} {:>16} {:>16} {:>18}",
        "M", "median |do-truth|", "median |bayes-truth|", "median |do-bayes|"
    );
    for &m in &grid {
        let at_m = || rows.iter().filter(move |r| r.m == m);
        let do_med = median(at_m().filter_map(|r| r.abs_gap_do)).unwrap();
        let bayes_med = median(at_m().map(|r| r.abs_gap_bayes)).unwrap();
        let route_med =
            median(at_m().filter_map(|r| r.do_plugin.map(|p| (p - r.bayes_predictive).abs())))
                .unwrap();
        println!("{m:>8} {do_med:>16.5} {bayes_med:>16.5} {route_med:>18.6}");
    }

    let out = "convergence_rows.csv";
    std::fs::write(out, rows_to_csv(&rows)).unwrap();
    println!("\nwrote {} rows to {out}", rows.len());
}
