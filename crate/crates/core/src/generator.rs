//! Data generators for the automatic quality loop: symbolic objects from
//! clustered individuals, individuals from symbolic objects, and the
//! imputation that has to run before either.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Assertion, Domain, IndividualTable, Interval, IntervalUnion, KnowledgeBase, Scalar, ValueSet, VariableKind,
    VariableSpec,
};

/// How a variable is described in generated symbolic objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    /// Two-label categorical variable; the object holds the labels seen.
    Boolean,
    /// Union of the labels seen in the cluster.
    CategoricalSet,
    /// The distinct numeric values seen, as degenerate intervals.
    NumericPointSet,
    /// `[min, max]` of the cluster, optionally refined around foreign values.
    Interval,
}

impl OutputKind {
    pub fn input_kind(&self) -> VariableKind {
        match self {
            OutputKind::Boolean | OutputKind::CategoricalSet => VariableKind::Categorical,
            OutputKind::NumericPointSet | OutputKind::Interval => VariableKind::Numeric,
        }
    }

    /// Natural output for a variable: label union or interval.
    pub fn default_for(spec: &VariableSpec) -> Self {
        match spec.kind() {
            VariableKind::Categorical => OutputKind::CategoricalSet,
            VariableKind::Numeric => OutputKind::Interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSpec {
    /// One output kind per variable (object generation only).
    pub outputs: Vec<OutputKind>,
    /// Split intervals around values of other clusters.
    pub refine: bool,
    pub seed: u64,
    /// Probability that a generated value is drawn from another object.
    pub overlap_target: f64,
    /// Individuals per cluster; a single entry applies to every cluster.
    pub counts: Vec<usize>,
}

impl GenerationSpec {
    pub fn for_objects(outputs: Vec<OutputKind>, refine: bool) -> Self {
        GenerationSpec { outputs, refine, seed: 0, overlap_target: 0.0, counts: Vec::new() }
    }

    pub fn for_individuals(count: usize, overlap_target: f64, seed: u64) -> Self {
        GenerationSpec { outputs: Vec::new(), refine: false, seed, overlap_target, counts: vec![count] }
    }

    fn count_for(&self, cluster: usize) -> Result<usize> {
        let c = match self.counts.as_slice() {
            [] => return Err(Error::invalid("no individual count given")),
            [one] => *one,
            many => *many
                .get(cluster)
                .ok_or_else(|| Error::invalid(format!("no individual count for cluster {cluster}")))?,
        };
        if c == 0 {
            return Err(Error::invalid("every cluster needs at least one individual"));
        }
        Ok(c)
    }
}

/// Replaces missing numeric values by the column mean and missing labels by
/// the column mode (ties go to the lexicographically smallest label).
pub fn impute_missing(t: &IndividualTable) -> Result<IndividualTable> {
    let mut out = t.clone();
    let mut filled = 0usize;
    for (l, spec) in t.variables().iter().enumerate() {
        let column = t.rows().iter().map(|r| r[l].as_ref());
        if column.clone().all(|x| x.is_some()) {
            continue;
        }
        let fill = match spec.kind() {
            VariableKind::Numeric => {
                let xs: Vec<f64> = column
                    .filter_map(|x| match x {
                        Some(Scalar::Number(v)) => Some(*v),
                        _ => None,
                    })
                    .collect();
                if xs.is_empty() {
                    return Err(Error::AllMissing(spec.name.clone()));
                }
                let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                // keep the mean inside the domain despite rounding
                let mean = match &spec.domain {
                    Domain::Numeric(r) => mean.clamp(r.lo(), r.hi()),
                    Domain::Categorical(_) => mean,
                };
                Scalar::Number(mean)
            }
            VariableKind::Categorical => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for x in column.flatten() {
                    if let Scalar::Category(c) = x {
                        *counts.entry(c.as_str()).or_default() += 1;
                    }
                }
                // label order: the first maximum is the smallest label
                let mode = counts
                    .iter()
                    .fold(None::<(&str, usize)>, |best, (&label, &n)| match best {
                        Some((_, bn)) if bn >= n => best,
                        _ => Some((label, n)),
                    })
                    .ok_or_else(|| Error::AllMissing(spec.name.clone()))?;
                Scalar::Category(mode.0.to_string())
            }
        };
        for row in out.rows_mut() {
            if row[l].is_none() {
                row[l] = Some(fill.clone());
                filled += 1;
            }
        }
    }
    if filled > 0 {
        log::info!("imputed {filled} missing values");
    }
    Ok(out)
}

/// Pieces of `[min(own), max(own)]` left after cutting at every foreign value
/// strictly inside it (and distinct from all own values). A piece is kept
/// when one of its endpoints is an own value.
pub fn refine_interval(own: &[f64], foreign: &[f64], domain: &Interval) -> Result<IntervalUnion> {
    let mut own: Vec<f64> = own.to_vec();
    own.sort_by(f64::total_cmp);
    own.dedup();
    let (Some(&lo), Some(&hi)) = (own.first(), own.last()) else {
        return Err(Error::invalid("cannot refine an interval without own values"));
    };
    let is_own = |x: f64| own.binary_search_by(|v| v.total_cmp(&x)).is_ok();
    let mut cuts: Vec<f64> = foreign.iter().copied().filter(|&x| x > lo && x < hi && !is_own(x)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut breaks: Vec<f64> = own.iter().chain(cuts.iter()).copied().collect();
    breaks.sort_by(f64::total_cmp);

    let mut pieces = Vec::new();
    if breaks.len() == 1 {
        pieces.push(Interval::point(lo)?);
    }
    for w in breaks.windows(2) {
        if is_own(w[0]) || is_own(w[1]) {
            pieces.push(Interval::new(w[0].max(domain.lo()), w[1].min(domain.hi()))?);
        }
    }
    Ok(IntervalUnion::from_intervals(pieces))
}

/// One assertion per cluster, in order of first appearance in the table.
pub fn generate_objects(t: &IndividualTable, spec: &GenerationSpec) -> Result<KnowledgeBase> {
    if t.has_missing() {
        return Err(Error::invalid("the individual table has missing values: impute first"));
    }
    if t.is_empty() {
        return Err(Error::invalid("the individual table has no rows"));
    }
    let vars = t.variables();
    if spec.outputs.len() != vars.len() {
        return Err(Error::invalid(format!(
            "{} output kinds for {} variables",
            spec.outputs.len(),
            vars.len()
        )));
    }
    for (v, kind) in vars.iter().zip(&spec.outputs) {
        if kind.input_kind() != v.kind() {
            return Err(Error::KindMismatch(format!(
                "output kind {kind:?} does not fit {} variable `{}`",
                v.kind(),
                v.name
            )));
        }
        if let (OutputKind::Boolean, Domain::Categorical(labels)) = (kind, &v.domain) {
            if labels.len() != 2 {
                return Err(Error::invalid(format!(
                    "boolean output needs a two-label domain, `{}` has {}",
                    v.name,
                    labels.len()
                )));
            }
        }
    }

    let clusters = t.cluster_members();
    let mut assertions = Vec::with_capacity(clusters.len());
    for (name, members) in &clusters {
        if members.is_empty() {
            return Err(Error::invalid(format!("cluster `{name}` is empty")));
        }
        let mut values = Vec::with_capacity(vars.len());
        for (l, (v, kind)) in vars.iter().zip(&spec.outputs).enumerate() {
            let value = match kind {
                OutputKind::Boolean | OutputKind::CategoricalSet => {
                    let labels: BTreeSet<String> = members
                        .iter()
                        .filter_map(|&r| match &t.rows()[r][l] {
                            Some(Scalar::Category(c)) => Some(c.clone()),
                            _ => None,
                        })
                        .collect();
                    ValueSet::Categories(labels)
                }
                OutputKind::NumericPointSet => {
                    ValueSet::Intervals(IntervalUnion::from_points(numbers(t, members.iter().copied(), l))?)
                }
                OutputKind::Interval => {
                    let own = numbers(t, members.iter().copied(), l);
                    let Domain::Numeric(range) = &v.domain else { unreachable!("kind checked above") };
                    if spec.refine {
                        let foreign: Vec<f64> =
                            numbers(t, (0..t.len()).filter(|&r| t.clusters()[r] != *name), l);
                        ValueSet::Intervals(refine_interval(&own, &foreign, range)?)
                    } else {
                        let lo = own.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = own.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        ValueSet::interval(lo, hi)?
                    }
                }
            };
            values.push(value);
        }
        assertions.push(Assertion::new(name.clone(), values));
    }
    KnowledgeBase::new(vars.to_vec(), assertions)
}

fn numbers(t: &IndividualTable, rows: impl Iterator<Item = usize>, l: usize) -> Vec<f64> {
    rows.filter_map(|r| match &t.rows()[r][l] {
        Some(Scalar::Number(x)) => Some(*x),
        _ => None,
    })
    .collect()
}

/// Draws individuals for every assertion. Each value comes from the
/// assertion's own value set, or with probability `overlap_target` from the
/// value set of another assertion chosen uniformly.
pub fn generate_individuals(kb: &KnowledgeBase, spec: &GenerationSpec) -> Result<IndividualTable> {
    let p = spec.overlap_target;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("overlap target must lie in [0, 1), got {p}")));
    }
    let n = kb.n_assertions();
    if n == 0 {
        return Err(Error::invalid("no assertion to generate individuals from"));
    }
    if n == 1 && p > 0.0 {
        return Err(Error::invalid("overlap needs at least two assertions"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::new();
    let mut clusters = Vec::new();
    for (i, a) in kb.assertions().iter().enumerate() {
        for _ in 0..spec.count_for(i)? {
            let mut row = Vec::with_capacity(kb.n_variables());
            for l in 0..kb.n_variables() {
                let source = if p > 0.0 && rng.random::<f64>() < p {
                    let j = rng.random_range(0..n - 1);
                    if j >= i { j + 1 } else { j }
                } else {
                    i
                };
                let value = &kb.assertions()[source].values[l];
                row.push(Some(sample(value, &mut rng).map_err(|e| {
                    Error::invalid(format!("`{}`, variable `{}`: {e}", kb.assertions()[source].name, kb.variables()[l].name))
                })?));
            }
            rows.push(row);
            clusters.push(a.name.clone());
        }
    }
    IndividualTable::new(kb.variables().to_vec(), rows, clusters)
}

fn sample<R: Rng>(v: &ValueSet, rng: &mut R) -> Result<Scalar> {
    match v {
        ValueSet::Categories(c) => {
            if c.is_empty() {
                return Err(Error::invalid("cannot sample from an empty label set"));
            }
            let k = rng.random_range(0..c.len());
            Ok(Scalar::Category(c.iter().nth(k).cloned().unwrap_or_default()))
        }
        ValueSet::Intervals(u) => {
            let pieces = u.pieces();
            if pieces.is_empty() {
                return Err(Error::invalid("cannot sample from an empty interval union"));
            }
            let total = u.measure();
            if total <= 0.0 {
                let k = rng.random_range(0..pieces.len());
                return Ok(Scalar::Number(pieces[k].lo()));
            }
            let mut offset = rng.random::<f64>() * total;
            for iv in pieces {
                if offset <= iv.length() {
                    return Ok(Scalar::Number((iv.lo() + offset).min(iv.hi())));
                }
                offset -= iv.length();
            }
            Ok(Scalar::Number(pieces[pieces.len() - 1].hi()))
        }
    }
}

/// Shape of a random knowledge base. Numeric variables live on `[0, 100]` and
/// hold one interval per object; every fourth variable is categorical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticShape {
    pub n_objects: usize,
    pub n_variables: usize,
    /// Interval widths are drawn uniformly from `[min_width, max_width)`.
    pub min_width: f64,
    pub max_width: f64,
    /// Size of every categorical domain.
    pub labels: usize,
    /// Each object holds between one and `max_labels` labels.
    pub max_labels: usize,
}

impl SyntheticShape {
    /// Short intervals and one or two of eight labels: nearly every variable
    /// separates nearly every pair.
    pub fn sharp(n_objects: usize, n_variables: usize) -> Self {
        SyntheticShape { n_objects, n_variables, min_width: 2.0, max_width: 10.0, labels: 8, max_labels: 2 }
    }

    /// Widths from narrow to almost the whole range and up to six of eight
    /// labels: most variables separate only some pairs.
    pub fn mixed(n_objects: usize, n_variables: usize) -> Self {
        SyntheticShape { n_objects, n_variables, min_width: 5.0, max_width: 95.0, labels: 8, max_labels: 6 }
    }
}

/// Random knowledge base with the default [`SyntheticShape::sharp`] shape.
pub fn synthetic_kb(n_objects: usize, n_variables: usize, seed: u64) -> Result<KnowledgeBase> {
    synthetic_kb_with(&SyntheticShape::sharp(n_objects, n_variables), seed)
}

pub fn synthetic_kb_with(shape: &SyntheticShape, seed: u64) -> Result<KnowledgeBase> {
    let SyntheticShape { n_objects, n_variables, min_width, max_width, labels, max_labels } = *shape;
    if !(0.0 < min_width && min_width < max_width && max_width < 100.0) {
        return Err(Error::invalid(format!("interval widths must satisfy 0 < {min_width} < {max_width} < 100")));
    }
    if labels == 0 || max_labels == 0 || max_labels > labels {
        return Err(Error::invalid(format!("cannot hold up to {max_labels} of {labels} labels")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..labels).map(|i| format!("c{i}")).collect();
    let mut vars = Vec::with_capacity(n_variables);
    for l in 0..n_variables {
        let name = format!("y{}", l + 1);
        vars.push(if l % 4 == 3 {
            VariableSpec::categorical(name, labels.iter().cloned())?
        } else {
            VariableSpec::numeric(name, 0.0, 100.0)?
        });
    }
    let mut assertions = Vec::with_capacity(n_objects);
    for i in 0..n_objects {
        let mut values = Vec::with_capacity(n_variables);
        for v in &vars {
            values.push(match v.kind() {
                VariableKind::Numeric => {
                    let width = rng.random_range(min_width..max_width);
                    let lo = rng.random_range(0.0..100.0 - width);
                    ValueSet::interval(lo, lo + width)?
                }
                VariableKind::Categorical => {
                    let take = rng.random_range(1..=max_labels);
                    let mut set = BTreeSet::new();
                    while set.len() < take {
                        set.insert(labels[rng.random_range(0..labels.len())].clone());
                    }
                    ValueSet::Categories(set)
                }
            });
        }
        assertions.push(Assertion::new(format!("a{}", i + 1), values));
    }
    KnowledgeBase::new(vars, assertions)
}
