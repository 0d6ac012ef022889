//! Quality indicators: how well a (reduced) set of symbolic objects separates
//! the observed individuals, and how much the objects overlap.

use serde::{Deserialize, Serialize};

use crate::discrimination::DiscriminationMatrix;
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::model::{Assertion, IndividualTable, KnowledgeBase, VariableSpec};
use crate::selection::SelectionResult;

/// Rows of `t` satisfying `a`. The assertion's variables are matched to the
/// table's columns by name, so `variables` may be any subset of the table's.
pub fn real_extent(variables: &[VariableSpec], a: &Assertion, t: &IndividualTable) -> Result<Vec<usize>> {
    let columns = column_map(variables, t)?;
    extent_with(&columns, a, t)
}

fn column_map(variables: &[VariableSpec], t: &IndividualTable) -> Result<Vec<usize>> {
    variables
        .iter()
        .map(|v| {
            let c = t
                .variable_index(&v.name)
                .ok_or_else(|| Error::invalid(format!("variable `{}` is absent from the individuals", v.name)))?;
            if t.variables()[c].kind() != v.kind() {
                return Err(Error::KindMismatch(format!(
                    "variable `{}` is {} in the objects but {} in the individuals",
                    v.name,
                    v.kind(),
                    t.variables()[c].kind()
                )));
            }
            Ok(c)
        })
        .collect()
}

fn extent_with(columns: &[usize], a: &Assertion, t: &IndividualTable) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    'rows: for (r, row) in t.rows().iter().enumerate() {
        for (v, &c) in a.values.iter().zip(columns) {
            let x = row[c].as_ref().ok_or_else(|| Error::MissingValue {
                variable: t.variables()[c].name.clone(),
            })?;
            if !v.contains(x)? {
                continue 'rows;
            }
        }
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectExtent {
    pub object: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairExtent {
    pub a: String,
    pub b: String,
    pub intersection: usize,
    pub union: usize,
    /// `1 - |∩| / |∪|`, or 1 when both extents are empty.
    pub discrimination: f64,
}

fn sorted_intersection_len(x: &[usize], y: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Extents of every assertion described by the variables at `keep` only,
/// and the resulting pair scores. An empty `keep` puts every individual in
/// every extent.
fn pair_extents(kb: &KnowledgeBase, keep: &[usize], t: &IndividualTable) -> Result<(Vec<Vec<usize>>, Vec<PairExtent>)> {
    if kb.n_pairs() == 0 {
        return Err(Error::NothingToDiscriminate);
    }
    let kept: Vec<VariableSpec> = keep.iter().map(|&l| kb.variables()[l].clone()).collect();
    let columns = column_map(&kept, t)?;
    let extents = kb
        .assertions()
        .iter()
        .map(|a| {
            let values: Vec<_> = keep.iter().map(|&l| a.values[l].clone()).collect();
            extent_with(&columns, &Assertion::new(a.name.clone(), values), t)
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs = kb
        .pairs()
        .into_iter()
        .map(|(i, j)| {
            let inter = sorted_intersection_len(&extents[i], &extents[j]);
            let union = extents[i].len() + extents[j].len() - inter;
            let discrimination = if union == 0 { 1.0 } else { 1.0 - inter as f64 / union as f64 };
            PairExtent {
                a: kb.assertions()[i].name.clone(),
                b: kb.assertions()[j].name.clone(),
                intersection: inter,
                union,
                discrimination,
            }
        })
        .collect();
    Ok((extents, pairs))
}

fn all_variables(kb: &KnowledgeBase) -> Vec<usize> {
    (0..kb.n_variables()).collect()
}

/// Average over assertion pairs of `1 - |ext ∩ ext'| / |ext ∪ ext'|`.
pub fn extent_discrimination(kb: &KnowledgeBase, t: &IndividualTable) -> Result<f64> {
    let (_, pairs) = pair_extents(kb, &all_variables(kb), t)?;
    Ok(mean_discrimination(&pairs))
}

fn mean_discrimination(pairs: &[PairExtent]) -> f64 {
    pairs.iter().map(|p| p.discrimination).sum::<f64>() / pairs.len() as f64
}

/// Fraction of assertion pairs that no variable discriminates totally.
pub fn overlap_percentage(kb: &KnowledgeBase) -> Result<f64> {
    let m = DiscriminationMatrix::build(kb, Measure::Boolean)?;
    Ok(overlap_from_boolean(&m))
}

/// Same fraction read from a matrix, through its boolean view.
pub fn overlap_from_matrix(m: &DiscriminationMatrix) -> f64 {
    overlap_from_boolean(&m.to_boolean())
}

fn overlap_from_boolean(m: &DiscriminationMatrix) -> f64 {
    1.0 - m.dp_total() / m.n_pairs() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    /// Overlap fraction of the original objects.
    pub overlap_pct: f64,
    /// Extent discrimination of the reduced objects.
    pub extent_discrimination_pct: f64,
    /// `1 - extent_discrimination_pct`.
    pub extent_intersection_avg: f64,
    pub original_extent_discrimination_pct: f64,
    pub original_extent_intersection_avg: f64,
    /// `|extent_intersection_avg - original_extent_intersection_avg|`.
    pub extent_delta: f64,
    pub dp_selected: f64,
    pub dp_total: f64,
    pub reduction_pct: f64,
    pub selected: Vec<String>,
    pub degenerate: bool,
    pub extents: Vec<ObjectExtent>,
    pub pairs: Vec<PairExtent>,
}

impl QualityReport {
    pub const CSV_HEADER: [&'static str; 10] = [
        "overlap_pct",
        "extent_discrimination_pct",
        "extent_intersection_avg",
        "original_extent_discrimination_pct",
        "original_extent_intersection_avg",
        "extent_delta",
        "dp_selected",
        "dp_total",
        "reduction_pct",
        "n_selected",
    ];

    /// Flat row matching [`CSV_HEADER`](Self::CSV_HEADER).
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.overlap_pct.to_string(),
            self.extent_discrimination_pct.to_string(),
            self.extent_intersection_avg.to_string(),
            self.original_extent_discrimination_pct.to_string(),
            self.original_extent_intersection_avg.to_string(),
            self.extent_delta.to_string(),
            self.dp_selected.to_string(),
            self.dp_total.to_string(),
            self.reduction_pct.to_string(),
            self.selected.len().to_string(),
        ]
    }
}

/// The parts of a selection run the quality report needs. Deserializes from
/// a serialized [`SelectionResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub selected: Vec<String>,
    pub dp_selected: f64,
    pub dp_total: f64,
    pub reduction_pct: f64,
    #[serde(default)]
    pub degenerate: bool,
}

impl From<&SelectionResult> for SelectionSummary {
    fn from(r: &SelectionResult) -> Self {
        SelectionSummary {
            selected: r.selected_names.clone(),
            dp_selected: r.dp_selected,
            dp_total: r.dp_total,
            reduction_pct: r.reduction_pct,
            degenerate: r.degenerate,
        }
    }
}

impl SelectionSummary {
    /// Keeping every variable: partial (Jaccard) power of the whole set.
    pub fn everything(kb: &KnowledgeBase) -> Result<Self> {
        let dp = DiscriminationMatrix::build(kb, Measure::Jaccard)?.dp_total();
        Ok(SelectionSummary {
            selected: kb.variable_names(),
            dp_selected: dp,
            dp_total: dp,
            reduction_pct: 0.0,
            degenerate: dp <= crate::discrimination::TOLERANCE,
        })
    }

    /// Positions of the selected variables in `kb`, in selection order.
    pub fn indices(&self, kb: &KnowledgeBase) -> Result<Vec<usize>> {
        self.selected
            .iter()
            .map(|n| kb.variable_index(n).ok_or_else(|| Error::invalid(format!("selected variable `{n}` is unknown"))))
            .collect()
    }
}

/// Collects every indicator for one selection run: extents are measured on
/// the objects described by the selected variables only, and compared with
/// the extents under every variable.
pub fn quality_report(original: &KnowledgeBase, result: &SelectionSummary, t: &IndividualTable) -> Result<QualityReport> {
    let keep = result.indices(original)?;
    let overlap_pct = overlap_percentage(original)?;
    let (_, original_pairs) = pair_extents(original, &all_variables(original), t)?;
    let original_disc = mean_discrimination(&original_pairs);
    let (extents, pairs) = pair_extents(original, &keep, t)?;
    let disc = mean_discrimination(&pairs);
    let extents = original
        .assertions()
        .iter()
        .zip(extents)
        .map(|(a, rows)| ObjectExtent {
            object: a.name.clone(),
            members: rows.into_iter().map(|r| t.labels()[r].clone()).collect(),
        })
        .collect();
    Ok(QualityReport {
        overlap_pct,
        extent_discrimination_pct: disc,
        extent_intersection_avg: 1.0 - disc,
        original_extent_discrimination_pct: original_disc,
        original_extent_intersection_avg: 1.0 - original_disc,
        extent_delta: ((1.0 - disc) - (1.0 - original_disc)).abs(),
        dp_selected: result.dp_selected,
        dp_total: result.dp_total,
        reduction_pct: result.reduction_pct,
        selected: result.selected.clone(),
        degenerate: result.degenerate,
        extents,
        pairs,
    })
}
