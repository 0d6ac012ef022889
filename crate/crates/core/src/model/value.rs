//! Variables, their domains, and the set-valued descriptions assertions give them.

use std::collections::BTreeSet;
use std::fmt;

use super::interval::{Interval, IntervalUnion};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariableKind {
    Categorical,
    Numeric,
}

impl fmt::Display for VariableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariableKind::Categorical => f.write_str("categorical"),
            VariableKind::Numeric => f.write_str("numeric"),
        }
    }
}

/// Domain of a variable: a finite label set or a closed numeric range.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Labels in declaration order.
    Categorical(Vec<String>),
    Numeric(Interval),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Domain,
}

impl VariableSpec {
    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::invalid(format!("variable `{name}` has an empty domain")));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::invalid(format!("variable `{name}` lists label `{l}` twice")));
            }
        }
        Ok(VariableSpec { name, domain: Domain::Categorical(labels) })
    }

    pub fn numeric(name: impl Into<String>, lo: f64, hi: f64) -> Result<Self> {
        let name = name.into();
        let range = Interval::new(lo, hi)
            .map_err(|e| Error::invalid(format!("variable `{name}`: {e}")))?;
        Ok(VariableSpec { name, domain: Domain::Numeric(range) })
    }

    pub fn kind(&self) -> VariableKind {
        match self.domain {
            Domain::Categorical(_) => VariableKind::Categorical,
            Domain::Numeric(_) => VariableKind::Numeric,
        }
    }

    /// Measure of the whole domain: label count or range length.
    pub fn domain_measure(&self) -> f64 {
        match &self.domain {
            Domain::Categorical(labels) => labels.len() as f64,
            Domain::Numeric(r) => r.length(),
        }
    }

    /// The value set covering the entire domain.
    pub fn full(&self) -> ValueSet {
        match &self.domain {
            Domain::Categorical(labels) => ValueSet::Categories(labels.iter().cloned().collect()),
            Domain::Numeric(r) => ValueSet::Intervals(IntervalUnion::single(*r)),
        }
    }

    pub fn admits(&self, x: &Scalar) -> bool {
        match (&self.domain, x) {
            (Domain::Categorical(labels), Scalar::Category(c)) => labels.iter().any(|l| l == c),
            (Domain::Numeric(r), Scalar::Number(v)) => r.contains(*v),
            _ => false,
        }
    }

    /// Checks that `v` has this variable's kind and lies within its domain.
    pub fn check(&self, v: &ValueSet) -> Result<()> {
        match (&self.domain, v) {
            (Domain::Categorical(labels), ValueSet::Categories(cats)) => {
                if let Some(bad) = cats.iter().find(|c| !labels.contains(c)) {
                    return Err(Error::invalid(format!(
                        "label `{bad}` is not in the domain of `{}`",
                        self.name
                    )));
                }
                Ok(())
            }
            (Domain::Numeric(r), ValueSet::Intervals(u)) => {
                if !u.is_within(r) {
                    return Err(Error::invalid(format!(
                        "value {u} leaves the domain {r} of `{}`",
                        self.name
                    )));
                }
                Ok(())
            }
            _ => Err(Error::KindMismatch(format!(
                "variable `{}` is {} but the value is {}",
                self.name,
                self.kind(),
                v.kind()
            ))),
        }
    }
}

/// A single observation of one variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Category(String),
    Number(f64),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Category(c) => f.write_str(c),
            Scalar::Number(x) => write!(f, "{x}"),
        }
    }
}

/// The value an assertion gives a variable.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueSet {
    Categories(BTreeSet<String>),
    Intervals(IntervalUnion),
}

impl ValueSet {
    pub fn categories<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        ValueSet::Categories(labels.into_iter().map(Into::into).collect())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(ValueSet::Intervals(IntervalUnion::single(Interval::new(lo, hi)?)))
    }

    pub fn intervals(parts: &[(f64, f64)]) -> Result<Self> {
        let pieces = parts
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(ValueSet::Intervals(IntervalUnion::from_intervals(pieces)))
    }

    pub fn kind(&self) -> VariableKind {
        match self {
            ValueSet::Categories(_) => VariableKind::Categorical,
            ValueSet::Intervals(_) => VariableKind::Numeric,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ValueSet::Categories(c) => c.is_empty(),
            ValueSet::Intervals(u) => u.is_empty(),
        }
    }

    /// Category count, or summed interval length.
    pub fn mu(&self) -> f64 {
        match self {
            ValueSet::Categories(c) => c.len() as f64,
            ValueSet::Intervals(u) => u.measure(),
        }
    }

    /// Number of distinct elements when every member is a point: category
    /// count, or number of canonical pieces.
    pub fn point_count(&self) -> f64 {
        match self {
            ValueSet::Categories(c) => c.len() as f64,
            ValueSet::Intervals(u) => u.piece_count() as f64,
        }
    }

    pub fn intersect(&self, other: &ValueSet) -> Result<ValueSet> {
        match (self, other) {
            (ValueSet::Categories(a), ValueSet::Categories(b)) => {
                Ok(ValueSet::Categories(a.intersection(b).cloned().collect()))
            }
            (ValueSet::Intervals(a), ValueSet::Intervals(b)) => Ok(ValueSet::Intervals(a.intersect(b))),
            _ => Err(mismatch(self, other)),
        }
    }

    pub fn union(&self, other: &ValueSet) -> Result<ValueSet> {
        match (self, other) {
            (ValueSet::Categories(a), ValueSet::Categories(b)) => {
                Ok(ValueSet::Categories(a.union(b).cloned().collect()))
            }
            (ValueSet::Intervals(a), ValueSet::Intervals(b)) => Ok(ValueSet::Intervals(a.union(b))),
            _ => Err(mismatch(self, other)),
        }
    }

    /// `domain \ self`. For intervals the boundary points stay shared.
    pub fn complement(&self, spec: &VariableSpec) -> Result<ValueSet> {
        match (self, &spec.domain) {
            (ValueSet::Categories(c), Domain::Categorical(labels)) => Ok(ValueSet::Categories(
                labels.iter().filter(|l| !c.contains(*l)).cloned().collect(),
            )),
            (ValueSet::Intervals(u), Domain::Numeric(r)) => Ok(ValueSet::Intervals(u.complement_within(r))),
            _ => Err(Error::KindMismatch(format!(
                "cannot complement a {} value within the {} variable `{}`",
                self.kind(),
                spec.kind(),
                spec.name
            ))),
        }
    }

    pub fn contains(&self, x: &Scalar) -> Result<bool> {
        match (self, x) {
            (ValueSet::Categories(c), Scalar::Category(s)) => Ok(c.contains(s)),
            (ValueSet::Intervals(u), Scalar::Number(v)) => Ok(u.contains(*v)),
            _ => Err(Error::KindMismatch(format!("{} value set vs scalar `{x}`", self.kind()))),
        }
    }
}

fn mismatch(a: &ValueSet, b: &ValueSet) -> Error {
    Error::KindMismatch(format!("{} value set vs {} value set", a.kind(), b.kind()))
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSet::Categories(c) => {
                f.write_str("{")?;
                for (i, l) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(l)?;
                }
                f.write_str("}")
            }
            ValueSet::Intervals(u) => write!(f, "{u}"),
        }
    }
}
