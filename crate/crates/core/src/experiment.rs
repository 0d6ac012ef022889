//! Seeded experiments: the overlap sweep and the timing benchmark.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{
    generate_individuals, generate_objects, synthetic_kb_with, GenerationSpec, OutputKind, SyntheticShape,
};
use crate::measures::Measure;
use crate::model::{IndividualTable, KnowledgeBase};
use crate::quality::overlap_percentage;
use crate::selection::{minset, minset_partial_naive, minset_plus, Algorithm, SelectionResult};

/// Overlap targets used by the default sweep.
pub const SWEEP_OVERLAPS: [f64; 15] =
    [0.001, 0.0025, 0.005, 0.0075, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.10, 0.13, 0.16];

/// Seeded clustered dataset: a random knowledge base, individuals drawn from
/// it with the given overlap, and the objects regenerated from those
/// individuals (min/max intervals and label unions).
#[derive(Debug, Clone)]
pub struct Dataset {
    pub source: KnowledgeBase,
    pub individuals: IndividualTable,
    pub objects: KnowledgeBase,
}

pub fn dataset(shape: &SyntheticShape, per_cluster: usize, overlap: f64, seed: u64) -> Result<Dataset> {
    let source = synthetic_kb_with(shape, seed)?;
    // decorrelate the individuals stream from the object stream
    let spec = GenerationSpec::for_individuals(per_cluster, overlap, seed ^ 0x9e37_79b9_7f4a_7c15);
    let individuals = generate_individuals(&source, &spec)?;
    let outputs = source.variables().iter().map(OutputKind::default_for).collect();
    let objects = generate_objects(&individuals, &GenerationSpec::for_objects(outputs, false))?;
    Ok(Dataset { source, individuals, objects })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub shape: SyntheticShape,
    pub per_cluster: usize,
    pub seeds: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { shape: SyntheticShape::mixed(15, 20), per_cluster: 100, seeds: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub seed: u64,
    pub overlap_target: f64,
    /// Fraction of object pairs no variable discriminates totally.
    pub achieved_overlap: f64,
    pub minset_selected: usize,
    pub minset_dp: f64,
    pub plus_selected: usize,
    pub plus_dp: f64,
    pub plus_099_selected: usize,
    pub plus_099_dp: f64,
    pub dp_total: f64,
}

impl SweepPoint {
    pub const CSV_HEADER: [&'static str; 10] = [
        "seed",
        "overlap_target",
        "achieved_overlap",
        "minset_selected",
        "minset_dp",
        "plus_selected",
        "plus_dp",
        "plus_099_selected",
        "plus_099_dp",
        "dp_total",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.overlap_target.to_string(),
            self.achieved_overlap.to_string(),
            self.minset_selected.to_string(),
            self.minset_dp.to_string(),
            self.plus_selected.to_string(),
            self.plus_dp.to_string(),
            self.plus_099_selected.to_string(),
            self.plus_099_dp.to_string(),
            self.dp_total.to_string(),
        ]
    }
}

pub fn sweep_point(config: &SweepConfig, overlap: f64, seed: u64) -> Result<SweepPoint> {
    let d = dataset(&config.shape, config.per_cluster, overlap, seed)?;
    let achieved_overlap = overlap_percentage(&d.objects)?;
    let m = minset(&d.objects)?;
    let p = minset_plus(&d.objects, Measure::Jaccard, 1.0)?;
    let p99 = minset_plus(&d.objects, Measure::Jaccard, 0.99)?;
    Ok(SweepPoint {
        seed,
        overlap_target: overlap,
        achieved_overlap,
        minset_selected: m.selected.len(),
        minset_dp: m.dp_selected,
        plus_selected: p.selected.len(),
        plus_dp: p.dp_selected,
        plus_099_selected: p99.selected.len(),
        plus_099_dp: p99.dp_selected,
        dp_total: p.dp_total,
    })
}

/// Runs every overlap for seeds `0..config.seeds`.
pub fn overlap_sweep(config: &SweepConfig, overlaps: &[f64]) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(overlaps.len() * config.seeds as usize);
    for seed in 0..config.seeds {
        for &p in overlaps {
            out.push(sweep_point(config, p, seed)?);
        }
    }
    Ok(out)
}

/// Spearman rank correlation, ties given their average rank. `None` when
/// either side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    /// Object shape; the object count is overridden by each size.
    pub shape: SyntheticShape,
    /// Individuals in total; split evenly across the objects.
    pub individuals: usize,
    pub overlap: f64,
    pub seed: u64,
    /// Each algorithm runs this many times and the fastest run is kept.
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { shape: SyntheticShape::mixed(0, 20), individuals: 300, overlap: 0.1, seed: 1, repeats: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub size: usize,
    pub algorithm: Algorithm,
    pub milliseconds: f64,
    pub dp_selected: f64,
    pub n_selected: usize,
}

impl BenchRow {
    pub const CSV_HEADER: [&'static str; 5] = ["size", "algorithm", "milliseconds", "dp_selected", "n_selected"];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.size.to_string(),
            self.algorithm.to_string(),
            self.milliseconds.to_string(),
            self.dp_selected.to_string(),
            self.n_selected.to_string(),
        ]
    }
}

fn timed(repeats: usize, f: impl Fn() -> Result<SelectionResult>) -> Result<(f64, SelectionResult)> {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let started = Instant::now();
        let r = f()?;
        best = best.min(started.elapsed().as_secs_f64() * 1e3);
        last = Some(r);
    }
    Ok((best, last.expect("at least one run")))
}

/// Times minset-plus, minset-partial and minset on one seeded dataset per
/// size. Sizes must be ascending.
pub fn bench(sizes: &[usize], config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sizes must be strictly ascending"));
    }
    let mut rows = Vec::with_capacity(sizes.len() * 3);
    for &size in sizes {
        if size < 2 {
            return Err(Error::invalid(format!("size {size}: at least two objects are needed")));
        }
        let per_cluster = (config.individuals / size).max(1);
        let shape = SyntheticShape { n_objects: size, ..config.shape };
        let d = dataset(&shape, per_cluster, config.overlap, config.seed.wrapping_add(size as u64))?;
        let kb = &d.objects;
        let runs: [(Algorithm, (f64, SelectionResult)); 3] = [
            (Algorithm::MinsetPlus, timed(config.repeats, || minset_plus(kb, Measure::Jaccard, 1.0))?),
            (Algorithm::MinsetPartial, timed(config.repeats, || minset_partial_naive(kb, 1.0))?),
            (Algorithm::Minset, timed(config.repeats, || minset(kb))?),
        ];
        for (algorithm, (ms, r)) in runs {
            log::info!("size {size}: {algorithm} {ms:.3} ms, {} selected", r.selected.len());
            rows.push(BenchRow { size, algorithm, milliseconds: ms, dp_selected: r.dp_selected, n_selected: r.selected.len() });
        }
    }
    Ok(rows)
}
