//! Textual graph format: a line-based DSL for humans, plus DOT and JSON
//! emitters for external tools.
//!
//! Grammar (one statement per line, `#` starts a comment, blank lines are
//! ignored):
//!
//! ```text
//! var NAME [latent] [card=K]
//! NAME -> NAME
//! ```
//!
//! Names referenced by an edge before any declaration are auto-declared as
//! observed binary variables; an explicit `var` line overrides the defaults
//! of an auto-declared name without changing its position. Files
//! conventionally use the `.cg` extension.

use crate::graph::{CausalGraph, GraphBuilder, GraphError, VariableDecl};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: duplicate declaration of `{name}`")]
    DuplicateDeclaration { line: usize, name: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Output formats for [`emit_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// The DSL above; re-parsing reproduces the graph exactly.
    Dsl,
    /// Graphviz DOT; latent variables are drawn dashed.
    Dot,
    /// Machine interchange, byte-stable key order.
    Json,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, reason: impl Into<String>) -> DslError {
    DslError::Syntax {
        line,
        reason: reason.into(),
    }
}

struct PendingVar {
    name: String,
    observed: bool,
    card: usize,
    explicit: bool,
}

/// Parses DSL text into a validated graph.
pub fn parse_graph(source: &str) -> Result<CausalGraph, DslError> {
    let mut vars: Vec<PendingVar> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut seen_edges: Vec<(String, String)> = Vec::new();

    let position = |vars: &[PendingVar], name: &str| vars.iter().position(|v| v.name == name);

    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        if let Some(rest) = line.strip_prefix("var ") {
            let mut tokens = rest.split_whitespace();
            let name = tokens
                .next()
                .ok_or_else(|| syntax(line_no, "expected a variable name after `var`"))?;
            if !is_ident(name) {
                return Err(syntax(
                    line_no,
                    format!("`{name}` is not a valid identifier"),
                ));
            }
            let mut observed = true;
            let mut card = 2usize;
            for tok in tokens {
                if tok == "latent" {
                    observed = false;
                } else if let Some(k) = tok.strip_prefix("card=") {
                    card = k
                        .parse::<usize>()
                        .map_err(|_| syntax(line_no, format!("invalid cardinality `{k}`")))?;
                    if card < 2 {
                        return Err(syntax(
                            line_no,
                            format!("cardinality must be at least 2, got {card}"),
                        ));
                    }
                } else {
                    return Err(syntax(line_no, format!("unexpected token `{tok}`")));
                }
            }
            match position(&vars, name) {
                Some(p) if vars[p].explicit => {
                    return Err(DslError::DuplicateDeclaration {
                        line: line_no,
                        name: name.to_string(),
                    });
                }
                Some(p) => {
                    // Override an auto-declared variable in place.
                    vars[p].observed = observed;
                    vars[p].card = card;
                    vars[p].explicit = true;
                }
                None => vars.push(PendingVar {
                    name: name.to_string(),
                    observed,
                    card,
                    explicit: true,
                }),
            }
        } else if line.contains("->") {
            let mut parts = line.splitn(2, "->");
            let lhs = parts.next().unwrap().trim();
            let rhs = parts.next().unwrap().trim();
            if rhs.contains("->") {
                return Err(syntax(line_no, "an edge line names exactly two variables"));
            }
            for name in [lhs, rhs] {
                if !is_ident(name) {
                    return Err(syntax(
                        line_no,
                        format!("`{name}` is not a valid identifier"),
                    ));
                }
            }
            if lhs == rhs {
                return Err(syntax(line_no, format!("self-loop on `{lhs}`")));
            }
            for name in [lhs, rhs] {
                if position(&vars, name).is_none() {
                    vars.push(PendingVar {
                        name: name.to_string(),
                        observed: true,
                        card: 2,
                        explicit: false,
                    });
                }
            }
            let key = (lhs.to_string(), rhs.to_string());
            if seen_edges.contains(&key) {
                return Err(syntax(line_no, format!("duplicate edge {lhs} -> {rhs}")));
            }
            seen_edges.push(key.clone());
            edges.push(key);
        } else {
            return Err(syntax(line_no, format!("cannot parse `{line}`")));
        }
    }

    let mut b = GraphBuilder::new();
    for v in &vars {
        b.variable(&v.name, v.observed, v.card)?;
    }
    for (p, c) in &edges {
        b.edge(p, c)?;
    }
    Ok(b.build()?)
}

fn var_line(v: &VariableDecl) -> String {
    let mut s = format!("var {}", v.name);
    if !v.observed {
        s.push_str(" latent");
    }
    if v.card != 2 {
        s.push_str(&format!(" card={}", v.card));
    }
    s
}

fn emit_dsl(graph: &CausalGraph) -> String {
    // Emit the fewest `var` lines that still round-trip exactly. A variable
    // needs one when it is latent, non-binary, or parentless; beyond that,
    // an endpoint may be left to auto-declaration only when no `var` line
    // would be emitted between its (edge-line) appearance and the
    // appearances of variables declared before it, since declaration order
    // must survive the round trip.
    let vars = graph.variables();
    let needs_explicit = |i: usize| {
        let v = &vars[i];
        !v.observed || v.card != 2 || graph.parents_of(&v.name).unwrap().is_empty()
    };
    let pos = |name: &str| vars.iter().position(|v| v.name == name).unwrap();

    let mut lines: Vec<String> = Vec::new();
    let mut next = 0usize; // vars[..next] have appeared

    for (p, c) in graph.edges() {
        let (pi, ci) = (pos(p), pos(c));
        let new_end = pi.max(ci);
        if new_end >= next {
            // Indices next..=new_end are about to appear. Endpoints may
            // auto-declare only from the top of that range, in declaration
            // order matching their textual order on the edge line.
            let both_new = pi >= next && ci >= next;
            let auto: Vec<usize> = if both_new
                && ci == new_end
                && pi + 1 == ci
                && !needs_explicit(pi)
                && !needs_explicit(ci)
            {
                vec![pi, ci]
            } else {
                let top = new_end;
                let top_is_endpoint = top == pi || top == ci;
                if top_is_endpoint && !needs_explicit(top) {
                    vec![top]
                } else {
                    vec![]
                }
            };
            for (i, v) in vars.iter().enumerate().take(new_end + 1).skip(next) {
                if !auto.contains(&i) {
                    lines.push(var_line(v));
                }
            }
            next = new_end + 1;
        }
        lines.push(format!("{p} -> {c}"));
    }
    for v in &vars[next..] {
        lines.push(var_line(v));
    }

    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

pub(crate) fn dot_node(v: &VariableDecl) -> String {
    if v.observed {
        format!("  {};", v.name)
    } else {
        format!("  {} [style=dashed];", v.name)
    }
}

fn emit_dot(graph: &CausalGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for v in graph.variables() {
        out.push_str(&dot_node(v));
        out.push('\n');
    }
    for (p, c) in graph.edges() {
        out.push_str(&format!("  {p} -> {c};\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonVar {
    name: String,
    observed: bool,
    card: usize,
}

#[derive(Serialize)]
pub(crate) struct JsonGraph {
    variables: Vec<JsonVar>,
    edges: Vec<[String; 2]>,
}

impl JsonGraph {
    pub(crate) fn from_graph(graph: &CausalGraph) -> Self {
        Self {
            variables: graph
                .variables()
                .iter()
                .map(|v| JsonVar {
                    name: v.name.clone(),
                    observed: v.observed,
                    card: v.card,
                })
                .collect(),
            edges: graph
                .edges()
                .map(|(p, c)| [p.to_string(), c.to_string()])
                .collect(),
        }
    }
}

fn emit_json(graph: &CausalGraph) -> String {
    serde_json::to_string(&JsonGraph::from_graph(graph)).expect("graph serializes")
}

/// Serializes a graph. `Dsl` output re-parses to an identical graph; `Json`
/// key order is stable for byte-identical output.
pub fn emit_graph(graph: &CausalGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dsl => emit_dsl(graph),
        GraphFormat::Dot => emit_dot(graph),
        GraphFormat::Json => emit_json(graph),
    }
}
