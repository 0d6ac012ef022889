//! Helpers shared by the integration tests: fixture paths, random knowledge
//! bases, and brute-force oracles that work from the value sets directly.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use minset::{Assertion, KnowledgeBase, ValueSet, VariableKind, VariableSpec};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

const LABELS: [&str; 4] = ["p", "q", "r", "s"];

/// Mixed knowledge base on a coarse grid so that ties, shared endpoints,
/// points and empty sets all occur.
pub fn random_kb<R: Rng>(rng: &mut R, max_objects: usize, max_variables: usize) -> KnowledgeBase {
    let n_obj = rng.random_range(2..=max_objects);
    let n_var = rng.random_range(1..=max_variables);
    let vars: Vec<VariableSpec> = (0..n_var)
        .map(|l| {
            if rng.random_bool(0.4) {
                VariableSpec::categorical(format!("c{l}"), LABELS).unwrap()
            } else {
                VariableSpec::numeric(format!("x{l}"), 0.0, 10.0).unwrap()
            }
        })
        .collect();
    let assertions = (0..n_obj)
        .map(|i| {
            let values = vars.iter().map(|v| random_value(rng, v)).collect();
            Assertion::new(format!("o{i}"), values)
        })
        .collect();
    KnowledgeBase::new(vars, assertions).unwrap()
}

fn random_value<R: Rng>(rng: &mut R, spec: &VariableSpec) -> ValueSet {
    match spec.kind() {
        VariableKind::Categorical => {
            let take: BTreeSet<&str> = LABELS.iter().copied().filter(|_| rng.random_bool(0.45)).collect();
            if take.is_empty() && rng.random_bool(0.7) {
                ValueSet::categories([LABELS[rng.random_range(0..LABELS.len())]])
            } else {
                ValueSet::categories(take)
            }
        }
        VariableKind::Numeric => {
            let pieces = rng.random_range(1..=2);
            let parts: Vec<(f64, f64)> = (0..pieces)
                .map(|_| {
                    let lo = rng.random_range(0..=10) as f64;
                    let len = if rng.random_bool(0.2) { 0 } else { rng.random_range(1..=4) };
                    (lo, (lo + len as f64).min(10.0))
                })
                .collect();
            ValueSet::intervals(&parts).unwrap()
        }
    }
}

/// Brute-force Jaccard dissimilarity. Intervals are cut at every endpoint and
/// each elementary segment is classified by its midpoint; when nothing has
/// length the distinct points are counted instead.
pub fn oracle_jaccard(u: &ValueSet, v: &ValueSet) -> f64 {
    match (u, v) {
        (ValueSet::Categories(a), ValueSet::Categories(b)) => {
            let union = a.union(b).count();
            if union == 0 {
                return 0.0;
            }
            1.0 - a.intersection(b).count() as f64 / union as f64
        }
        (ValueSet::Intervals(a), ValueSet::Intervals(b)) => {
            let in_set = |s: &minset::IntervalUnion, x: f64| s.pieces().iter().any(|p| p.lo() <= x && x <= p.hi());
            let mut cuts: Vec<f64> = a.pieces().iter().chain(b.pieces()).flat_map(|p| [p.lo(), p.hi()]).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let (mut inter, mut union) = (0.0, 0.0);
            for w in cuts.windows(2) {
                let mid = (w[0] + w[1]) / 2.0;
                let (x, y) = (in_set(a, mid), in_set(b, mid));
                if x && y {
                    inter += w[1] - w[0];
                }
                if x || y {
                    union += w[1] - w[0];
                }
            }
            if union > 0.0 {
                return 1.0 - inter / union;
            }
            let pts_a: Vec<f64> = a.pieces().iter().map(|p| p.lo()).collect();
            let pts_b: Vec<f64> = b.pieces().iter().map(|p| p.lo()).collect();
            let mut all: Vec<f64> = pts_a.iter().chain(&pts_b).copied().collect();
            all.sort_by(f64::total_cmp);
            all.dedup();
            if all.is_empty() {
                return 0.0;
            }
            let common = pts_a.iter().filter(|x| pts_b.contains(x)).count();
            1.0 - common as f64 / all.len() as f64
        }
        _ => panic!("kind mismatch"),
    }
}

/// Brute-force boolean discrimination: 1 when no element is shared.
pub fn oracle_comp(u: &ValueSet, v: &ValueSet) -> f64 {
    let shared = match (u, v) {
        (ValueSet::Categories(a), ValueSet::Categories(b)) => a.iter().any(|x| b.contains(x)),
        (ValueSet::Intervals(a), ValueSet::Intervals(b)) => a
            .pieces()
            .iter()
            .any(|p| b.pieces().iter().any(|q| p.lo().max(q.lo()) <= p.hi().min(q.hi()))),
        _ => panic!("kind mismatch"),
    };
    if shared || (u.is_empty() && v.is_empty()) {
        0.0
    } else {
        1.0
    }
}

/// Discrimination power of `set` recomputed pair by pair.
pub fn oracle_dp(kb: &KnowledgeBase, set: &[usize], boolean: bool) -> f64 {
    let a = kb.assertions();
    let mut total = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let best = set
                .iter()
                .map(|&l| {
                    let (u, v) = (&a[i].values[l], &a[j].values[l]);
                    if boolean {
                        oracle_comp(u, v)
                    } else {
                        oracle_jaccard(u, v)
                    }
                })
                .fold(0.0, f64::max);
            total += best;
        }
    }
    total
}
