//! Greedy selection of a small variable subset that keeps the discrimination
//! power of the full set.
//!
//! All three algorithms share one control flow:
//!
//! 1. seed the selection with the indispensable variables;
//! 2. while the selection's DP is below `theta · DP(Y)`, add the unselected
//!    variable with the largest ODP against the selection;
//! 3. after each addition, drop selected variables whose ODP against the rest
//!    of the selection has fallen to zero.
//!
//! They differ in how DP and ODP are obtained. [`minset_plus`] reads them off a
//! [`DiscriminationMatrix`]; [`minset`] and [`minset_partial_naive`] recompute
//! every score from the value sets on demand.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::discrimination::{DiscriminationMatrix, TOLERANCE};
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::model::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Boolean criterion, scores recomputed at every step.
    Minset,
    /// Partial criterion over the cached discrimination matrix.
    MinsetPlus,
    /// Partial criterion, scores recomputed at every step.
    MinsetPartial,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::MinsetPlus, Algorithm::MinsetPartial, Algorithm::Minset];

    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Minset => "minset",
            Algorithm::MinsetPlus => "minset-plus",
            Algorithm::MinsetPartial => "minset-partial",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minset" => Ok(Algorithm::Minset),
            "minset-plus" => Ok(Algorithm::MinsetPlus),
            "minset-partial" => Ok(Algorithm::MinsetPartial),
            other => Err(Error::Parse(format!(
                "unknown algorithm `{other}` (expected minset, minset-plus or minset-partial)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepAction {
    Indispensable,
    Select,
    Eliminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateOdp {
    pub variable: String,
    pub odp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub action: StepAction,
    pub variable: String,
    /// ODP of the variable against the selection just before the step (for
    /// eliminations: against the rest of the selection).
    pub odp: f64,
    pub dp_after: f64,
    /// ODP of every candidate considered by a select step.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CandidateOdp>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub algorithm: Algorithm,
    pub measure: Measure,
    pub theta: f64,
    pub n_variables: usize,
    #[serde(rename = "selected")]
    pub selected_names: Vec<String>,
    #[serde(rename = "selected_indices")]
    pub selected: Vec<usize>,
    pub dp_selected: f64,
    pub dp_total: f64,
    pub reduction_pct: f64,
    /// Set when no variable discriminates any pair (`dp_total = 0`).
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    pub trace: Vec<TraceStep>,
    pub elapsed_ms: f64,
}

impl SelectionResult {
    /// One line per step, in the order the algorithm took them.
    pub fn narrative(&self) -> Vec<String> {
        let mut lines = vec![format!("DP(Y, K) = {}", fmt_num(self.dp_total))];
        for step in &self.trace {
            let line = match step.action {
                StepAction::Indispensable => format!(
                    "{} is indispensable (ODP {}); DP = {}",
                    step.variable,
                    fmt_num(step.odp),
                    fmt_num(step.dp_after)
                ),
                StepAction::Select => {
                    let cands: Vec<String> = step
                        .candidates
                        .iter()
                        .map(|c| format!("ODP({}) = {}", c.variable, fmt_num(c.odp)))
                        .collect();
                    format!(
                        "{}; select {}; DP = {}",
                        cands.join(", "),
                        step.variable,
                        fmt_num(step.dp_after)
                    )
                }
                StepAction::Eliminate => format!(
                    "eliminate {} (ODP {} against the others); DP = {}",
                    step.variable,
                    fmt_num(step.odp),
                    fmt_num(step.dp_after)
                ),
            };
            lines.push(line);
        }
        if let Some(d) = &self.diagnostic {
            lines.push(d.clone());
        } else {
            lines.push(format!("selected: {}", self.selected_names.join(", ")));
        }
        lines
    }
}

fn fmt_num(x: f64) -> String {
    // trims float noise such as 1.0999999999999999
    let r = (x * 1e9).round() / 1e9;
    format!("{r}")
}

/// Source of DP / ODP values for the shared greedy loop.
trait Scores {
    fn n_variables(&self) -> usize;
    fn dp_total(&self) -> Result<f64>;
    fn dp_variable(&self, l: usize) -> Result<f64>;
    fn indispensables(&self) -> Result<Vec<usize>>;
    fn selected(&self) -> &[usize];
    fn dp_selected(&self) -> Result<f64>;
    fn odp(&self, l: usize) -> Result<f64>;
    fn redundancy_margin(&self, l: usize) -> Result<f64>;
    fn select(&mut self, l: usize) -> Result<()>;
    fn deselect(&mut self, l: usize) -> Result<()>;
}

impl Scores for DiscriminationMatrix {
    fn n_variables(&self) -> usize {
        DiscriminationMatrix::n_variables(self)
    }
    fn dp_total(&self) -> Result<f64> {
        Ok(DiscriminationMatrix::dp_total(self))
    }
    fn dp_variable(&self, l: usize) -> Result<f64> {
        Ok(DiscriminationMatrix::dp_variable(self, l))
    }
    fn indispensables(&self) -> Result<Vec<usize>> {
        Ok(DiscriminationMatrix::indispensables(self))
    }
    fn selected(&self) -> &[usize] {
        DiscriminationMatrix::selected(self)
    }
    fn dp_selected(&self) -> Result<f64> {
        Ok(DiscriminationMatrix::dp_selected(self))
    }
    fn odp(&self, l: usize) -> Result<f64> {
        DiscriminationMatrix::odp(self, l)
    }
    fn redundancy_margin(&self, l: usize) -> Result<f64> {
        Ok(DiscriminationMatrix::redundancy_margin(self, l))
    }
    fn select(&mut self, l: usize) -> Result<()> {
        self.update_max_yd(l)
    }
    fn deselect(&mut self, l: usize) -> Result<()> {
        DiscriminationMatrix::deselect(self, l)
    }
}

/// Scores recomputed from the value sets at every request. No cell is cached.
struct OnDemand<'a> {
    kb: &'a KnowledgeBase,
    measure: Measure,
    pairs: Vec<(usize, usize)>,
    selected: Vec<usize>,
}

impl<'a> OnDemand<'a> {
    fn new(kb: &'a KnowledgeBase, measure: Measure) -> Result<Self> {
        if kb.n_pairs() == 0 {
            return Err(Error::NothingToDiscriminate);
        }
        Ok(OnDemand { kb, measure, pairs: kb.pairs(), selected: Vec::new() })
    }

    fn g(&self, l: usize, p: usize) -> Result<f64> {
        let (i, j) = self.pairs[p];
        let a = self.kb.assertions();
        self.measure.score(&a[i].values[l], &a[j].values[l], &self.kb.variables()[l])
    }

    fn best_of(&self, set: impl Iterator<Item = usize>, p: usize) -> Result<f64> {
        let mut best = 0.0_f64;
        for q in set {
            best = best.max(self.g(q, p)?);
        }
        Ok(best)
    }

    fn odp_against(&self, l: usize, set: &[usize]) -> Result<f64> {
        let mut sum = 0.0;
        for p in 0..self.pairs.len() {
            let best = self.best_of(set.iter().copied().filter(|&q| q != l), p)?;
            sum += (self.g(l, p)? - best).max(0.0);
        }
        Ok(sum)
    }
}

impl Scores for OnDemand<'_> {
    fn n_variables(&self) -> usize {
        self.kb.n_variables()
    }

    fn dp_total(&self) -> Result<f64> {
        let mut sum = 0.0;
        for p in 0..self.pairs.len() {
            sum += self.best_of(0..self.n_variables(), p)?;
        }
        Ok(sum)
    }

    fn dp_variable(&self, l: usize) -> Result<f64> {
        let mut sum = 0.0;
        for p in 0..self.pairs.len() {
            sum += self.g(l, p)?;
        }
        Ok(sum)
    }

    fn indispensables(&self) -> Result<Vec<usize>> {
        let n = self.n_variables();
        let mut out = Vec::new();
        for l in 0..n {
            for p in 0..self.pairs.len() {
                let own = self.g(l, p)?;
                let others = self.best_of((0..n).filter(|&q| q != l), p)?;
                if own > 0.0 && own - others > TOLERANCE {
                    out.push(l);
                    break;
                }
            }
        }
        Ok(out)
    }

    fn selected(&self) -> &[usize] {
        &self.selected
    }

    fn dp_selected(&self) -> Result<f64> {
        let mut sum = 0.0;
        for p in 0..self.pairs.len() {
            sum += self.best_of(self.selected.iter().copied(), p)?;
        }
        Ok(sum)
    }

    fn odp(&self, l: usize) -> Result<f64> {
        self.odp_against(l, &self.selected)
    }

    fn redundancy_margin(&self, l: usize) -> Result<f64> {
        self.odp_against(l, &self.selected)
    }

    fn select(&mut self, l: usize) -> Result<()> {
        if self.selected.contains(&l) {
            return Err(Error::AlreadySelected(self.kb.variables()[l].name.clone()));
        }
        self.selected.push(l);
        Ok(())
    }

    fn deselect(&mut self, l: usize) -> Result<()> {
        self.selected.retain(|&s| s != l);
        Ok(())
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("theta must lie in (0, 1], got {theta}")))
    }
}

struct RunInfo<'a> {
    algorithm: Algorithm,
    measure: Measure,
    theta: f64,
    names: &'a [String],
}

fn greedy<S: Scores>(scores: &mut S, info: RunInfo<'_>, started: Instant) -> Result<SelectionResult> {
    check_theta(info.theta)?;
    let names = info.names;
    let n = scores.n_variables();
    let dp_total = scores.dp_total()?;
    let mut trace = Vec::new();

    let finish = |scores: &S, trace: Vec<TraceStep>, diagnostic: Option<String>| -> Result<SelectionResult> {
        let selected = scores.selected().to_vec();
        let degenerate = diagnostic.is_some();
        let reduction_pct = if degenerate || n == 0 {
            0.0
        } else {
            100.0 * (1.0 - selected.len() as f64 / n as f64)
        };
        Ok(SelectionResult {
            algorithm: info.algorithm,
            measure: info.measure,
            theta: info.theta,
            n_variables: n,
            selected_names: selected.iter().map(|&l| names[l].clone()).collect(),
            selected,
            dp_selected: scores.dp_selected()?,
            dp_total,
            reduction_pct,
            degenerate,
            diagnostic,
            trace,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    };

    if dp_total <= TOLERANCE {
        return finish(scores, trace, Some("no variable discriminates any assertion pair".into()));
    }

    let indispensable = scores.indispensables()?;
    for &l in &indispensable {
        let odp = scores.odp(l)?;
        scores.select(l)?;
        trace.push(TraceStep {
            action: StepAction::Indispensable,
            variable: names[l].clone(),
            odp,
            dp_after: scores.dp_selected()?,
            candidates: Vec::new(),
        });
    }

    let target = info.theta * dp_total - TOLERANCE;
    let mut dp = scores.dp_selected()?;
    while dp < target {
        let mut candidates = Vec::new();
        let mut best: Option<(usize, f64)> = None;
        let mut best_dp: Option<f64> = None;
        for l in 0..n {
            if scores.selected().contains(&l) {
                continue;
            }
            let odp = scores.odp(l)?;
            candidates.push(CandidateOdp { variable: names[l].clone(), odp });
            match best {
                None => best = Some((l, odp)),
                Some((_, b)) if odp > b + TOLERANCE => {
                    best = Some((l, odp));
                    best_dp = None;
                }
                Some((b_idx, b)) if (odp - b).abs() <= TOLERANCE => {
                    // tie: larger standalone DP wins, then the lower index
                    let incumbent = match best_dp {
                        Some(d) => d,
                        None => scores.dp_variable(b_idx)?,
                    };
                    best_dp = Some(incumbent);
                    let challenger = scores.dp_variable(l)?;
                    if challenger > incumbent + TOLERANCE {
                        best = Some((l, odp));
                        best_dp = Some(challenger);
                    }
                }
                _ => {}
            }
        }
        let Some((chosen, odp)) = best else { break };
        if odp <= TOLERANCE {
            break;
        }
        scores.select(chosen)?;
        dp = scores.dp_selected()?;
        trace.push(TraceStep {
            action: StepAction::Select,
            variable: names[chosen].clone(),
            odp,
            dp_after: dp,
            candidates,
        });

        for s in scores.selected().to_vec() {
            let margin = scores.redundancy_margin(s)?;
            if margin <= TOLERANCE {
                debug_assert!(!indispensable.contains(&s), "indispensable variable became redundant");
                scores.deselect(s)?;
                dp = scores.dp_selected()?;
                trace.push(TraceStep {
                    action: StepAction::Eliminate,
                    variable: names[s].clone(),
                    odp: margin,
                    dp_after: dp,
                    candidates: Vec::new(),
                });
            }
        }
    }

    finish(scores, trace, None)
}

/// Minset-Plus: partial discrimination over the discrimination matrix.
pub fn minset_plus(kb: &KnowledgeBase, measure: Measure, theta: f64) -> Result<SelectionResult> {
    let started = Instant::now();
    check_theta(theta)?;
    let mut matrix = DiscriminationMatrix::build(kb, measure)?;
    let names = kb.variable_names();
    let info = RunInfo { algorithm: Algorithm::MinsetPlus, measure, theta, names: &names };
    greedy(&mut matrix, info, started)
}

/// Minset-Plus on an already built (or injected) matrix. The matrix must have
/// an empty selection.
pub fn minset_plus_on_matrix(matrix: &DiscriminationMatrix, measure: Measure, theta: f64) -> Result<SelectionResult> {
    let started = Instant::now();
    if !matrix.selected().is_empty() {
        return Err(Error::invalid("matrix already carries a selection"));
    }
    let mut m = matrix.clone();
    let names = matrix.variable_names().to_vec();
    let info = RunInfo { algorithm: Algorithm::MinsetPlus, measure, theta, names: &names };
    greedy(&mut m, info, started)
}

/// Minset over a matrix: the greedy loop on the matrix's boolean view.
pub fn minset_on_matrix(matrix: &DiscriminationMatrix) -> Result<SelectionResult> {
    let started = Instant::now();
    let mut m = matrix.to_boolean();
    let names = matrix.variable_names().to_vec();
    let info = RunInfo { algorithm: Algorithm::Minset, measure: Measure::Boolean, theta: 1.0, names: &names };
    greedy(&mut m, info, started)
}

/// The original boolean Minset: `comp` recomputed from the value sets at
/// every step.
pub fn minset(kb: &KnowledgeBase) -> Result<SelectionResult> {
    let started = Instant::now();
    let mut scores = OnDemand::new(kb, Measure::Boolean)?;
    let names = kb.variable_names();
    let info = RunInfo { algorithm: Algorithm::Minset, measure: Measure::Boolean, theta: 1.0, names: &names };
    greedy(&mut scores, info, started)
}

/// Minset with the partial (Jaccard) criterion and no matrix.
pub fn minset_partial_naive(kb: &KnowledgeBase, theta: f64) -> Result<SelectionResult> {
    naive_select(kb, Measure::Jaccard, theta)
}

/// The uncached greedy loop with any measure.
pub fn naive_select(kb: &KnowledgeBase, measure: Measure, theta: f64) -> Result<SelectionResult> {
    let started = Instant::now();
    check_theta(theta)?;
    let mut scores = OnDemand::new(kb, measure)?;
    let names = kb.variable_names();
    let info = RunInfo { algorithm: Algorithm::MinsetPartial, measure, theta, names: &names };
    greedy(&mut scores, info, started)
}

/// Dispatches on `algorithm`. `measure` applies to minset-plus and
/// minset-partial; minset is always boolean with `theta = 1`.
pub fn run(kb: &KnowledgeBase, algorithm: Algorithm, measure: Measure, theta: f64) -> Result<SelectionResult> {
    match algorithm {
        Algorithm::Minset => minset(kb),
        Algorithm::MinsetPlus => minset_plus(kb, measure, theta),
        Algorithm::MinsetPartial => naive_select(kb, measure, theta),
    }
}
