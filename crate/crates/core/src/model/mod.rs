//! Symbolic objects and the individuals they describe.
//!
//! An [`Assertion`] gives every variable of a [`KnowledgeBase`] a [`ValueSet`];
//! an individual satisfies the assertion when each of its observed values lies
//! in the corresponding set.

mod interval;
mod value;

use std::collections::{BTreeMap, HashSet};

pub use interval::{Interval, IntervalUnion};
pub use value::{Domain, Scalar, ValueSet, VariableKind, VariableSpec};

use crate::error::{Error, Result};

/// A named conjunction of elementary events, one value set per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub values: Vec<ValueSet>,
}

impl Assertion {
    pub fn new(name: impl Into<String>, values: Vec<ValueSet>) -> Self {
        Assertion { name: name.into(), values }
    }

    /// Conjunction of per-variable memberships. `row` is aligned with the
    /// assertion's variables and must be fully imputed.
    pub fn evaluate(&self, variables: &[VariableSpec], row: &[Option<Scalar>]) -> Result<bool> {
        if row.len() != self.values.len() {
            return Err(Error::invalid(format!(
                "row has {} values but `{}` describes {} variables",
                row.len(),
                self.name,
                self.values.len()
            )));
        }
        for (l, (v, x)) in self.values.iter().zip(row).enumerate() {
            let x = x.as_ref().ok_or_else(|| Error::MissingValue {
                variable: variables.get(l).map_or_else(|| l.to_string(), |s| s.name.clone()),
            })?;
            if !v.contains(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Variables plus the assertions described over them.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    variables: Vec<VariableSpec>,
    assertions: Vec<Assertion>,
}

impl KnowledgeBase {
    pub fn new(variables: Vec<VariableSpec>, assertions: Vec<Assertion>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::invalid("a knowledge base needs at least one variable"));
        }
        let mut names = HashSet::new();
        for v in &variables {
            if !names.insert(v.name.as_str()) {
                return Err(Error::invalid(format!("duplicate variable name `{}`", v.name)));
            }
        }
        let mut names = HashSet::new();
        for a in &assertions {
            if !names.insert(a.name.as_str()) {
                return Err(Error::invalid(format!("duplicate assertion name `{}`", a.name)));
            }
            if a.values.len() != variables.len() {
                return Err(Error::invalid(format!(
                    "assertion `{}` has {} values for {} variables",
                    a.name,
                    a.values.len(),
                    variables.len()
                )));
            }
            for (spec, v) in variables.iter().zip(&a.values) {
                spec.check(v)
                    .map_err(|e| Error::invalid(format!("assertion `{}`: {e}", a.name)))?;
            }
        }
        Ok(KnowledgeBase { variables, assertions })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_assertions(&self) -> usize {
        self.assertions.len()
    }

    pub fn n_pairs(&self) -> usize {
        pair_count(self.assertions.len())
    }

    /// Unordered assertion pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pair_index(self.assertions.len())
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn assertion_names(&self) -> Vec<String> {
        self.assertions.iter().map(|a| a.name.clone()).collect()
    }

    /// Same assertions described only by the variables at `keep` (in that order).
    pub fn restrict(&self, keep: &[usize]) -> Result<KnowledgeBase> {
        if let Some(&bad) = keep.iter().find(|&&l| l >= self.variables.len()) {
            return Err(Error::invalid(format!("variable index {bad} out of range")));
        }
        let variables = keep.iter().map(|&l| self.variables[l].clone()).collect();
        let assertions = self
            .assertions
            .iter()
            .map(|a| Assertion::new(a.name.clone(), keep.iter().map(|&l| a.values[l].clone()).collect()))
            .collect();
        KnowledgeBase::new(variables, assertions)
    }
}

pub fn pair_count(n_assertions: usize) -> usize {
    n_assertions * n_assertions.saturating_sub(1) / 2
}

pub fn pair_index(n_assertions: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n_assertions));
    for i in 0..n_assertions {
        for j in i + 1..n_assertions {
            out.push((i, j));
        }
    }
    out
}

/// Observed individuals: one scalar per variable (possibly missing), a
/// cluster label and a display label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct IndividualTable {
    variables: Vec<VariableSpec>,
    rows: Vec<Vec<Option<Scalar>>>,
    clusters: Vec<String>,
    labels: Vec<String>,
}

impl IndividualTable {
    pub fn new(
        variables: Vec<VariableSpec>,
        rows: Vec<Vec<Option<Scalar>>>,
        clusters: Vec<String>,
    ) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| format!("w{i}")).collect();
        Self::with_labels(variables, rows, clusters, labels)
    }

    pub fn with_labels(
        variables: Vec<VariableSpec>,
        rows: Vec<Vec<Option<Scalar>>>,
        clusters: Vec<String>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if clusters.len() != rows.len() || labels.len() != rows.len() {
            return Err(Error::invalid("every row needs exactly one cluster and one label"));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != variables.len() {
                return Err(Error::invalid(format!(
                    "row {r} has {} values for {} variables",
                    row.len(),
                    variables.len()
                )));
            }
            for (spec, x) in variables.iter().zip(row) {
                if let Some(x) = x {
                    if !spec.admits(x) {
                        return Err(Error::invalid(format!(
                            "row {r}: value `{x}` is outside the domain of `{}`",
                            spec.name
                        )));
                    }
                }
            }
        }
        Ok(IndividualTable { variables, rows, clusters, labels })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn rows(&self) -> &[Vec<Option<Scalar>>] {
        &self.rows
    }

    pub fn clusters(&self) -> &[String] {
        &self.clusters
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn has_missing(&self) -> bool {
        self.rows.iter().flatten().any(Option::is_none)
    }

    /// Cluster labels in order of first appearance, with their row indices.
    pub fn cluster_members(&self) -> Vec<(String, Vec<usize>)> {
        let mut order: Vec<String> = Vec::new();
        let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (r, c) in self.clusters.iter().enumerate() {
            let entry = members.entry(c.as_str()).or_default();
            if entry.is_empty() {
                order.push(c.clone());
            }
            entry.push(r);
        }
        order
            .into_iter()
            .map(|c| {
                let rows = members.remove(c.as_str()).unwrap_or_default();
                (c, rows)
            })
            .collect()
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [Vec<Option<Scalar>>] {
        &mut self.rows
    }
}
