//! Directed acyclic graphs over named discrete variables.
//!
//! A [`CausalGraph`] is the shared substrate for everything else in this
//! crate: identification reasons about its structure, the twin builder
//! mutilates and copies it, and the samplers walk it in topological order.
//! Graphs are immutable once built, keep variables and edges in declaration
//! order, and are cheap to clone.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("cycle detected: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("cardinality of `{0}` must be at least 2, got {1}")]
    BadCardinality(String, usize),
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
}

/// A declared variable: name, whether it is observable, and how many
/// discrete states it takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub observed: bool,
    pub card: usize,
}

/// Which incident edges [`CausalGraph::mutilate`] removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutilation {
    /// Delete every edge whose child is the target (the post-intervention
    /// graph: the target is set exogenously).
    RemoveIncoming,
    /// Delete every edge whose parent is the target.
    RemoveOutgoing,
}

/// An immutable DAG over named discrete variables.
#[derive(Debug, Clone)]
pub struct CausalGraph {
    variables: Vec<VariableDecl>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl PartialEq for CausalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.edges == other.edges
    }
}

impl Eq for CausalGraph {}

/// Incremental construction; [`GraphBuilder::build`] validates acyclicity.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    variables: Vec<VariableDecl>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_set: HashMap<(usize, usize), ()>,
}

fn name_ok(name: &str) -> bool {
    // Identifier-like, with '*' tolerated so post-intervention copies can
    // carry the star suffix. The DSL parser is stricter.
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '*')
        && !name.starts_with(|c: char| c.is_ascii_digit())
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable(
        &mut self,
        name: &str,
        observed: bool,
        card: usize,
    ) -> Result<&mut Self, GraphError> {
        if !name_ok(name) {
            return Err(GraphError::InvalidName(name.to_string()));
        }
        if card < 2 {
            return Err(GraphError::BadCardinality(name.to_string(), card));
        }
        if self.index.contains_key(name) {
            return Err(GraphError::DuplicateVariable(name.to_string()));
        }
        self.index.insert(name.to_string(), self.variables.len());
        self.variables.push(VariableDecl {
            name: name.to_string(),
            observed,
            card,
        });
        Ok(self)
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn edge(&mut self, parent: &str, child: &str) -> Result<&mut Self, GraphError> {
        let p = *self
            .index
            .get(parent)
            .ok_or_else(|| GraphError::UnknownVariable(parent.to_string()))?;
        let c = *self
            .index
            .get(child)
            .ok_or_else(|| GraphError::UnknownVariable(child.to_string()))?;
        if p == c {
            return Err(GraphError::SelfLoop(parent.to_string()));
        }
        if self.edge_set.insert((p, c), ()).is_some() {
            return Err(GraphError::DuplicateEdge(
                parent.to_string(),
                child.to_string(),
            ));
        }
        self.edges.push((p, c));
        Ok(self)
    }

    pub fn build(self) -> Result<CausalGraph, GraphError> {
        let n = self.variables.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(p, c) in &self.edges {
            parents[c].push(p);
            children[p].push(c);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let g = CausalGraph {
            variables: self.variables,
            index: self.index,
            edges: self.edges,
            parents,
            children,
        };
        g.topological_indices()?;
        Ok(g)
    }
}

impl CausalGraph {
    /// Convenience constructor: every endpoint is auto-declared as an
    /// observed binary variable, in order of first mention.
    pub fn from_edges(edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new();
        for &(p, c) in edges {
            for name in [p, c] {
                if !b.has_variable(name) {
                    b.variable(name, true, 2)?;
                }
            }
            b.edge(p, c)?;
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Variables in declaration order.
    pub fn variables(&self) -> &[VariableDecl] {
        &self.variables
    }

    /// Edges as (parent, child) name pairs in declaration order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(move |&(p, c)| {
            (
                self.variables[p].name.as_str(),
                self.variables[c].name.as_str(),
            )
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn variable(&self, name: &str) -> Result<&VariableDecl, GraphError> {
        self.index
            .get(name)
            .map(|&i| &self.variables[i])
            .ok_or_else(|| GraphError::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn idx(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVariable(name.to_string()))
    }

    /// Parents of `name`, in declaration order.
    pub fn parents_of(&self, name: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.idx(name)?;
        Ok(self.parents[i]
            .iter()
            .map(|&p| self.variables[p].name.as_str())
            .collect())
    }

    /// Children of `name`, in declaration order.
    pub fn children_of(&self, name: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.idx(name)?;
        Ok(self.children[i]
            .iter()
            .map(|&c| self.variables[c].name.as_str())
            .collect())
    }

    fn topological_indices(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.variables.len();
        let mut in_deg: Vec<usize> = (0..n).map(|i| self.parents[i].len()).collect();
        // Ready set kept sorted by declaration index so the order is
        // reproducible.
        let mut ready: Vec<usize> = (0..n).filter(|&i| in_deg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.first() {
            ready.remove(0);
            order.push(i);
            for &c in &self.children[i] {
                in_deg[c] -= 1;
                if in_deg[c] == 0 {
                    let pos = ready.binary_search(&c).unwrap_err();
                    ready.insert(pos, c);
                }
            }
        }
        if order.len() < n {
            return Err(GraphError::Cycle(self.find_cycle(&in_deg)));
        }
        Ok(order)
    }

    /// One concrete cycle among the nodes that never became ready.
    fn find_cycle(&self, in_deg: &[usize]) -> Vec<String> {
        let start = (0..self.variables.len())
            .find(|&i| in_deg[i] > 0)
            .expect("cycle exists");
        // Walk parents (restricted to still-cyclic nodes) until a repeat.
        let mut seen = vec![usize::MAX; self.variables.len()];
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if seen[cur] != usize::MAX {
                let mut cycle: Vec<String> = path[seen[cur]..]
                    .iter()
                    .map(|&i: &usize| self.variables[i].name.clone())
                    .collect();
                cycle.reverse();
                let first = cycle[0].clone();
                cycle.push(first);
                return cycle;
            }
            seen[cur] = path.len();
            path.push(cur);
            cur = *self.parents[cur]
                .iter()
                .find(|&&p| in_deg[p] > 0)
                .expect("node on a cycle has a cyclic parent");
        }
    }

    /// Validates acyclicity and returns a topological order of variable
    /// names (every parent precedes its children). Construction already
    /// guarantees this succeeds; the method re-checks and exposes the order.
    pub fn topological_order(&self) -> Result<Vec<&str>, GraphError> {
        Ok(self
            .topological_indices()?
            .into_iter()
            .map(|i| self.variables[i].name.as_str())
            .collect())
    }

    /// Graph with the target's incoming or outgoing edges removed; all other
    /// structure unchanged.
    pub fn mutilate(&self, target: &str, mode: Mutilation) -> Result<CausalGraph, GraphError> {
        let t = self.idx(target)?;
        let mut b = GraphBuilder::new();
        for v in &self.variables {
            b.variable(&v.name, v.observed, v.card)?;
        }
        for &(p, c) in &self.edges {
            let drop = match mode {
                Mutilation::RemoveIncoming => c == t,
                Mutilation::RemoveOutgoing => p == t,
            };
            if !drop {
                b.edge(&self.variables[p].name, &self.variables[c].name)?;
            }
        }
        b.build()
    }

    /// Proper descendants of `name` (children closure, excluding the node
    /// itself), as declaration indices mapped to names.
    pub fn descendants_of(&self, name: &str) -> Result<Vec<&str>, GraphError> {
        let start = self.idx(name)?;
        let mut seen = vec![false; self.variables.len()];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &c in &self.children[i] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        Ok((0..self.variables.len())
            .filter(|&i| seen[i])
            .map(|i| self.variables[i].name.as_str())
            .collect())
    }

    fn resolve_set(&self, names: &[&str]) -> Result<Vec<usize>, GraphError> {
        names.iter().map(|n| self.idx(n)).collect()
    }

    /// d-separation of `set_a` from `set_b` given `given`, via reachability
    /// over (node, travel-direction) states. Returns `true` iff every path
    /// between the sets is blocked under the standard rules: a chain or fork
    /// is blocked when its middle node is conditioned on; a collider is
    /// blocked unless it or one of its descendants is conditioned on.
    pub fn d_separated(
        &self,
        set_a: &[&str],
        set_b: &[&str],
        given: &[&str],
    ) -> Result<bool, GraphError> {
        let a = self.resolve_set(set_a)?;
        let b = self.resolve_set(set_b)?;
        let z = self.resolve_set(given)?;
        for (xs, ys) in [(&a, &b), (&a, &z), (&b, &z)] {
            for x in xs.iter() {
                if ys.contains(x) {
                    return Err(GraphError::OverlappingSets(self.variables[*x].name.clone()));
                }
            }
        }

        let n = self.variables.len();
        let mut in_z = vec![false; n];
        for &i in &z {
            in_z[i] = true;
        }
        // Ancestors of the conditioning set, including the set itself:
        // a collider forwards flow upward exactly when it lies above Z.
        let mut anc_z = in_z.clone();
        let mut stack: Vec<usize> = z.clone();
        while let Some(i) = stack.pop() {
            for &p in &self.parents[i] {
                if !anc_z[p] {
                    anc_z[p] = true;
                    stack.push(p);
                }
            }
        }

        let mut in_b = vec![false; n];
        for &i in &b {
            in_b[i] = true;
        }

        // Visited states: (node, arrived-from-child?).
        let mut visited_up = vec![false; n];
        let mut visited_down = vec![false; n];
        let mut queue: Vec<(usize, bool)> = a.iter().map(|&i| (i, true)).collect();
        while let Some((y, up)) = queue.pop() {
            let seen = if up {
                &mut visited_up[y]
            } else {
                &mut visited_down[y]
            };
            if *seen {
                continue;
            }
            *seen = true;
            if !in_z[y] && in_b[y] {
                return Ok(false);
            }
            if up {
                if !in_z[y] {
                    for &p in &self.parents[y] {
                        queue.push((p, true));
                    }
                    for &c in &self.children[y] {
                        queue.push((c, false));
                    }
                }
            } else {
                if !in_z[y] {
                    for &c in &self.children[y] {
                        queue.push((c, false));
                    }
                }
                if anc_z[y] {
                    for &p in &self.parents[y] {
                        queue.push((p, true));
                    }
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for CausalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self
            .variables
            .iter()
            .map(|v| {
                let mut s = v.name.clone();
                if !v.observed {
                    s.push_str(" (latent)");
                }
                if v.card != 2 {
                    s.push_str(&format!(" [{}]", v.card));
                }
                s
            })
            .collect();
        let edges: Vec<String> = self.edges().map(|(p, c)| format!("{p} -> {c}")).collect();
        write!(f, "{{{}; {}}}", vars.join(", "), edges.join(", "))
    }
}
