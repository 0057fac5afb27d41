//! Shared test helpers: random DAG generation and a path-enumeration
//! d-separation oracle. The oracle enumerates every trail and applies the
//! blocking rules directly, staying independent of the reachability
//! algorithm inside the library.

use causal_twin::graph::{CausalGraph, GraphBuilder};
use causal_twin::rng::SplitMix64;
use std::collections::HashSet;

/// Random DAG over `V0..Vn-1` with edges oriented from lower to higher
/// index, each present with probability `edge_prob`.
pub fn random_dag(rng: &mut SplitMix64, n: usize, edge_prob: f64) -> CausalGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.variable(&format!("V{i}"), true, 2).unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < edge_prob {
                b.edge(&format!("V{i}"), &format!("V{j}")).unwrap();
            }
        }
    }
    b.build().unwrap()
}

/// Three pairwise-disjoint index sets (a, b, given) with a and b nonempty.
pub fn random_query(rng: &mut SplitMix64, n: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_f64() * (i + 1) as f64) as usize;
        order.swap(i, j);
    }
    let a_len = 1 + (rng.next_f64() * ((n - 1).min(2)) as f64) as usize;
    let rem = n - a_len;
    let b_len = 1 + (rng.next_f64() * (rem.min(2) - 1) as f64) as usize;
    let z_len = (rng.next_f64() * (n - a_len - b_len + 1) as f64) as usize;
    let a = order[..a_len].to_vec();
    let b = order[a_len..a_len + b_len].to_vec();
    let z = order[a_len + b_len..a_len + b_len + z_len].to_vec();
    (a, b, z)
}

fn descendants_with_self(children: &[Vec<usize>], start: usize) -> HashSet<usize> {
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for &c in &children[i] {
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

/// Brute-force d-separation: enumerate every simple trail between the sets
/// and test the blocking rules node by node. A collider is open when it or
/// one of its descendants is conditioned on; any other internal node is
/// open when it is not conditioned on.
pub fn oracle_d_separated(
    graph: &CausalGraph,
    set_a: &[usize],
    set_b: &[usize],
    given: &[usize],
) -> bool {
    let n = graph.len();
    let names: Vec<&str> = graph.variables().iter().map(|v| v.name.as_str()).collect();
    let index = |name: &str| names.iter().position(|&x| x == name).unwrap();
    let mut edge = HashSet::new();
    let mut children = vec![Vec::new(); n];
    let mut neighbors = vec![Vec::new(); n];
    for (p, c) in graph.edges() {
        let (p, c) = (index(p), index(c));
        edge.insert((p, c));
        children[p].push(c);
        neighbors[p].push(c);
        neighbors[c].push(p);
    }
    let z: HashSet<usize> = given.iter().copied().collect();
    let b: HashSet<usize> = set_b.iter().copied().collect();

    let trail_active = |trail: &[usize]| -> bool {
        for w in trail.windows(3) {
            let (prev, mid, next) = (w[0], w[1], w[2]);
            let collider = edge.contains(&(prev, mid)) && edge.contains(&(next, mid));
            if collider {
                let opens = descendants_with_self(&children, mid)
                    .iter()
                    .any(|d| z.contains(d));
                if !opens {
                    return false;
                }
            } else if z.contains(&mid) {
                return false;
            }
        }
        true
    };

    // DFS over simple paths in the skeleton from every source in A.
    fn walk(
        cur: usize,
        neighbors: &[Vec<usize>],
        b: &HashSet<usize>,
        on_path: &mut Vec<usize>,
        active: &dyn Fn(&[usize]) -> bool,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        if b.contains(&cur) && active(on_path) {
            *found = true;
            return;
        }
        for &next in &neighbors[cur] {
            if !on_path.contains(&next) {
                on_path.push(next);
                walk(next, neighbors, b, on_path, active, found);
                on_path.pop();
            }
        }
    }

    let mut found = false;
    for &a in set_a {
        let mut path = vec![a];
        walk(a, &neighbors, &b, &mut path, &trail_active, &mut found);
        if found {
            return false;
        }
    }
    true
}

/// Names for an index set.
pub fn names_of(graph: &CausalGraph, idx: &[usize]) -> Vec<String> {
    idx.iter()
        .map(|&i| graph.variables()[i].name.clone())
        .collect()
}
