//! Grouped-count datasets and the empirical joints computed from them.
//!
//! The canonical data format is a CSV of grouped counts: a header naming the
//! observed variables plus a final `N` column, then one row per distinct
//! assignment with its count. Counts stay exact integers all the way into
//! posterior pseudo-counts; frequencies only appear when a joint is
//! requested.

use crate::graph::CausalGraph;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DataError {
    #[error(
        "header mismatch: expected observed variables {expected:?} plus final `N`, got {found:?}"
    )]
    HeaderMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("line {line}: negative count")]
    NegativeCount { line: usize },
    #[error("line {line}: state {state} out of range for `{variable}` (cardinality {card})")]
    OutOfRangeState {
        line: usize,
        variable: String,
        state: usize,
        card: usize,
    },
    #[error("line {line}: duplicate assignment")]
    DuplicateAssignment { line: usize },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("table has no observations")]
    EmptyTable,
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
}

/// Grouped counts: one row per distinct assignment of the columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsTable {
    columns: Vec<String>,
    cards: Vec<usize>,
    rows: Vec<(Vec<usize>, u64)>,
}

impl CountsTable {
    /// Builds a table directly; columns and rows are kept in the given
    /// order. States must respect `cards` and assignments must be unique.
    pub fn new(
        columns: Vec<String>,
        cards: Vec<usize>,
        rows: Vec<(Vec<usize>, u64)>,
    ) -> Result<Self, DataError> {
        assert_eq!(columns.len(), cards.len());
        for (i, (states, _)) in rows.iter().enumerate() {
            let line = i + 2; // header is line 1
            if states.len() != columns.len() {
                return Err(DataError::Syntax {
                    line,
                    reason: format!("expected {} state cells", columns.len()),
                });
            }
            for (j, &s) in states.iter().enumerate() {
                if s >= cards[j] {
                    return Err(DataError::OutOfRangeState {
                        line,
                        variable: columns[j].clone(),
                        state: s,
                        card: cards[j],
                    });
                }
            }
            if rows[..i].iter().any(|(prev, _)| prev == states) {
                return Err(DataError::DuplicateAssignment { line });
            }
        }
        Ok(Self {
            columns,
            cards,
            rows,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn card_of(&self, column: &str) -> Result<usize, DataError> {
        self.column_index(column).map(|i| self.cards[i])
    }

    pub fn rows(&self) -> &[(Vec<usize>, u64)] {
        &self.rows
    }

    /// Total observation count M.
    pub fn total(&self) -> u64 {
        self.rows.iter().map(|(_, n)| n).sum()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, DataError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    /// Projects onto `columns` (in the given order), aggregating counts.
    /// Rows of the result are sorted by assignment for reproducibility.
    pub fn marginalize(&self, columns: &[&str]) -> Result<CountsTable, DataError> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| self.column_index(c))
            .collect::<Result<_, _>>()?;
        let cards: Vec<usize> = idx.iter().map(|&i| self.cards[i]).collect();
        let mut acc: std::collections::BTreeMap<Vec<usize>, u64> = Default::default();
        for (states, n) in &self.rows {
            let key: Vec<usize> = idx.iter().map(|&i| states[i]).collect();
            *acc.entry(key).or_insert(0) += n;
        }
        Ok(CountsTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            cards,
            rows: acc.into_iter().collect(),
        })
    }

    /// Same assignments with every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> CountsTable {
        CountsTable {
            columns: self.columns.clone(),
            cards: self.cards.clone(),
            rows: self
                .rows
                .iter()
                .map(|(s, n)| (s.clone(), n * factor))
                .collect(),
        }
    }

    /// Serializes back to the CSV format accepted by [`load_counts`]; the
    /// round trip preserves column order, row order, and counts exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push_str(",N\n");
        for (states, n) in &self.rows {
            let cells: Vec<String> = states.iter().map(|s| s.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push_str(&format!(",{n}\n"));
        }
        out
    }
}

/// Parses grouped-count CSV against a graph. The header must name exactly
/// the observed variables of the graph (in any order) plus a final `N`
/// column; latent variables must not appear.
pub fn load_counts(csv: &str, graph: &CausalGraph) -> Result<CountsTable, DataError> {
    let mut lines = csv.lines().enumerate();
    let (_, header) = lines.next().ok_or(DataError::Syntax {
        line: 1,
        reason: "missing header".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected: Vec<String> = graph
        .variables()
        .iter()
        .filter(|v| v.observed)
        .map(|v| v.name.clone())
        .collect();
    let mismatch = || DataError::HeaderMismatch {
        expected: expected.clone(),
        found: cols.iter().map(|c| c.to_string()).collect(),
    };
    if cols.len() != expected.len() + 1 || *cols.last().unwrap() != "N" {
        return Err(mismatch());
    }
    let var_cols = &cols[..cols.len() - 1];
    {
        let mut sorted_found: Vec<&str> = var_cols.to_vec();
        sorted_found.sort_unstable();
        sorted_found.dedup();
        let mut sorted_expected: Vec<&str> = expected.iter().map(|s| s.as_str()).collect();
        sorted_expected.sort_unstable();
        if sorted_found != sorted_expected {
            return Err(mismatch());
        }
    }
    let cards: Vec<usize> = var_cols
        .iter()
        .map(|c| graph.variable(c).expect("header checked").card)
        .collect();

    let mut rows: Vec<(Vec<usize>, u64)> = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        let cells: Vec<&str> = text.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(DataError::Syntax {
                line,
                reason: format!("expected {} cells, got {}", cols.len(), cells.len()),
            });
        }
        let count_cell = cells.last().unwrap();
        let count: i64 = count_cell.parse().map_err(|_| DataError::Syntax {
            line,
            reason: format!("invalid count `{count_cell}`"),
        })?;
        if count < 0 {
            return Err(DataError::NegativeCount { line });
        }
        let mut states = Vec::with_capacity(var_cols.len());
        for (j, cell) in cells[..cells.len() - 1].iter().enumerate() {
            let s: usize = cell.parse().map_err(|_| DataError::Syntax {
                line,
                reason: format!("invalid state `{cell}`"),
            })?;
            if s >= cards[j] {
                return Err(DataError::OutOfRangeState {
                    line,
                    variable: var_cols[j].to_string(),
                    state: s,
                    card: cards[j],
                });
            }
            states.push(s);
        }
        if rows.iter().any(|(prev, _)| prev == &states) {
            return Err(DataError::DuplicateAssignment { line });
        }
        rows.push((states, count as u64));
    }

    Ok(CountsTable {
        columns: var_cols.iter().map(|c| c.to_string()).collect(),
        cards,
        rows,
    })
}

/// A normalized distribution over full assignments of a set of variables.
#[derive(Debug, Clone)]
pub struct EmpiricalJoint {
    variables: Vec<String>,
    cards: Vec<usize>,
    mass: Vec<f64>,
}

/// Maximum-likelihood joint: mass(assignment) = N / M.
pub fn empirical_joint(table: &CountsTable) -> Result<EmpiricalJoint, DataError> {
    let m = table.total();
    if m == 0 {
        return Err(DataError::EmptyTable);
    }
    let size: usize = table.cards().iter().product();
    let mut mass = vec![0.0; size.max(1)];
    for (states, n) in table.rows() {
        let mut idx = 0usize;
        for (j, &s) in states.iter().enumerate() {
            idx = idx * table.cards()[j] + s;
        }
        mass[idx] += *n as f64 / m as f64;
    }
    Ok(EmpiricalJoint {
        variables: table.columns().to_vec(),
        cards: table.cards().to_vec(),
        mass,
    })
}

impl EmpiricalJoint {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn card_of(&self, variable: &str) -> Result<usize, DataError> {
        self.variables
            .iter()
            .position(|v| v == variable)
            .map(|i| self.cards[i])
            .ok_or_else(|| DataError::UnknownColumn(variable.to_string()))
    }

    /// Probability of a partial assignment (marginal over the rest).
    pub fn prob(&self, event: &[(&str, usize)]) -> Result<f64, DataError> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.variables.len()];
        for &(name, state) in event {
            let i = self
                .variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| DataError::UnknownColumn(name.to_string()))?;
            fixed[i] = Some(state);
        }
        let mut total = 0.0;
        let mut assignment = vec![0usize; self.variables.len()];
        self.sum_matching(&fixed, 0, &mut assignment, &mut total);
        Ok(total)
    }

    fn sum_matching(
        &self,
        fixed: &[Option<usize>],
        at: usize,
        assignment: &mut Vec<usize>,
        total: &mut f64,
    ) {
        if at == self.variables.len() {
            let mut idx = 0usize;
            for (j, &s) in assignment.iter().enumerate() {
                idx = idx * self.cards[j] + s;
            }
            *total += self.mass[idx];
            return;
        }
        match fixed[at] {
            Some(s) => {
                assignment[at] = s;
                self.sum_matching(fixed, at + 1, assignment, total);
            }
            None => {
                for s in 0..self.cards[at] {
                    assignment[at] = s;
                    self.sum_matching(fixed, at + 1, assignment, total);
                }
            }
        }
    }

    /// Conditional probability of `target` given `given`, or `None` when the
    /// conditioning event has zero mass.
    pub fn cond_prob(
        &self,
        target: &[(&str, usize)],
        given: &[(&str, usize)],
    ) -> Result<Option<f64>, DataError> {
        let denom = self.prob(given)?;
        if denom <= 0.0 {
            return Ok(None);
        }
        let mut joint: Vec<(&str, usize)> = target.to_vec();
        joint.extend_from_slice(given);
        Ok(Some(self.prob(&joint)? / denom))
    }

    /// Sum of all masses; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_graph;

    pub const TABLE1: &str = "Z,T,Y,N\n0,0,0,150\n0,0,1,50\n0,1,0,180\n0,1,1,180\n1,0,0,50\n1,0,1,200\n1,1,0,4\n1,1,1,36\n";

    fn case1() -> CausalGraph {
        parse_graph("var Z\nZ -> T\nZ -> Y\nT -> Y").unwrap()
    }

    #[test]
    fn loads_the_example_table() {
        let t = load_counts(TABLE1, &case1()).unwrap();
        assert_eq!(t.total(), 850);
        assert_eq!(t.rows().len(), 8);
        assert_eq!(t.columns(), &["Z", "T", "Y"]);
    }

    #[test]
    fn latent_column_is_a_header_mismatch() {
        let fig7 = parse_graph("var Z latent\nZ -> T\nZ -> Y\nT -> Y").unwrap();
        assert!(matches!(
            load_counts(TABLE1, &fig7),
            Err(DataError::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn single_row_table() {
        let g = parse_graph("A -> B\nA -> C").unwrap();
        let t = load_counts("A,B,C,N\n0,0,0,5\n", &g).unwrap();
        assert_eq!(t.total(), 5);
    }

    #[test]
    fn header_can_permute_columns() {
        let t = load_counts("Y,Z,T,N\n1,0,1,7\n", &case1()).unwrap();
        assert_eq!(t.columns(), &["Y", "Z", "T"]);
        assert_eq!(t.card_of("Z").unwrap(), 2);
    }

    #[test]
    fn bad_rows_are_rejected_with_line_numbers() {
        let g = case1();
        assert_eq!(
            load_counts("Z,T,Y,N\n0,0,0,5\n0,0,1,-2\n", &g),
            Err(DataError::NegativeCount { line: 3 })
        );
        assert!(matches!(
            load_counts("Z,T,Y,N\n0,0,2,5\n", &g),
            Err(DataError::OutOfRangeState { line: 2, .. })
        ));
        assert_eq!(
            load_counts("Z,T,Y,N\n0,0,0,5\n0,0,0,3\n", &g),
            Err(DataError::DuplicateAssignment { line: 3 })
        );
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = load_counts(TABLE1, &case1()).unwrap();
        assert_eq!(t.to_csv(), TABLE1);
        assert_eq!(load_counts(&t.to_csv(), &case1()).unwrap(), t);
    }

    #[test]
    fn joint_reproduces_the_conditional_block() {
        let t = load_counts(TABLE1, &case1()).unwrap();
        let j = empirical_joint(&t).unwrap();
        assert!((j.total_mass() - 1.0).abs() < 1e-12);
        let cond = |z: usize, t_: usize| {
            j.cond_prob(&[("Y", 1)], &[("Z", z), ("T", t_)])
                .unwrap()
                .unwrap()
        };
        assert!((cond(0, 0) - 0.25).abs() < 1e-12);
        assert!((cond(0, 1) - 0.5).abs() < 1e-12);
        assert!((cond(1, 0) - 0.8).abs() < 1e-12);
        assert!((cond(1, 1) - 0.9).abs() < 1e-12);
        let marginal = |t_: usize| j.cond_prob(&[("Y", 1)], &[("T", t_)]).unwrap().unwrap();
        assert!((marginal(0) - 250.0 / 450.0).abs() < 1e-12);
        assert!((marginal(1) - 0.54).abs() < 1e-12);
    }

    #[test]
    fn all_mass_on_one_row() {
        let g = parse_graph("A -> B").unwrap();
        let t = load_counts("A,B,N\n1,0,9\n", &g).unwrap();
        let j = empirical_joint(&t).unwrap();
        assert_eq!(j.prob(&[("A", 1), ("B", 0)]).unwrap(), 1.0);
        assert_eq!(j.prob(&[("A", 0)]).unwrap(), 0.0);
    }

    #[test]
    fn empty_table_has_no_joint() {
        let g = parse_graph("A -> B").unwrap();
        let t = load_counts("A,B,N\n", &g).unwrap();
        assert!(matches!(empirical_joint(&t), Err(DataError::EmptyTable)));
    }

    #[test]
    fn marginalize_aggregates_and_sorts() {
        let t = load_counts(TABLE1, &case1()).unwrap();
        let m = t.marginalize(&["T", "Y"]).unwrap();
        assert_eq!(m.columns(), &["T", "Y"]);
        assert_eq!(
            m.rows(),
            &[
                (vec![0, 0], 200),
                (vec![0, 1], 250),
                (vec![1, 0], 184),
                (vec![1, 1], 216)
            ]
        );
    }
}
