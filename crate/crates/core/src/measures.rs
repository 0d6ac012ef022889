//! Per-variable discrimination scores between two value sets.
//!
//! All four measures are reflexive and symmetric. [`comp`] is the boolean
//! (total) criterion; [`g_jaccard`] grades partial overlap and reduces to
//! `comp` when the sets are disjoint.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Interval, IntervalUnion, ValueSet, VariableSpec};

/// Which score fills the discrimination matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Measure {
    Boolean,
    Jaccard,
    DeCarvalho,
    IchinoYaguchi { gamma: f64 },
}

impl Default for Measure {
    fn default() -> Self {
        Measure::Jaccard
    }
}

impl Measure {
    pub fn ichino_yaguchi(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Measure::IchinoYaguchi { gamma })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Measure::Boolean => "boolean",
            Measure::Jaccard => "jaccard",
            Measure::DeCarvalho => "de-carvalho",
            Measure::IchinoYaguchi { .. } => "ichino",
        }
    }

    /// Matrix cell value in `[0, 1]` for the pair `(u, v)` on variable `spec`.
    ///
    /// Ichino–Yaguchi is unbounded, so it is divided by the measure of the
    /// variable's domain (which bounds it from above).
    pub fn score(&self, u: &ValueSet, v: &ValueSet, spec: &VariableSpec) -> Result<f64> {
        match *self {
            Measure::Boolean => comp(u, v),
            Measure::Jaccard => g_jaccard(u, v),
            Measure::DeCarvalho => de_carvalho(u, v, spec),
            Measure::IchinoYaguchi { gamma } => {
                let raw = ichino_yaguchi(u, v, gamma)?;
                let scale = spec.domain_measure();
                Ok(if scale > 0.0 { (raw / scale).clamp(0.0, 1.0) } else { 0.0 })
            }
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::IchinoYaguchi { gamma } => write!(f, "ichino(gamma={gamma})"),
            m => f.write_str(m.label()),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// Parses `boolean`, `jaccard`, `de-carvalho` or `ichino` (gamma 0.5 by
    /// default; use [`Measure::ichino_yaguchi`] to pick another).
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boolean" => Ok(Measure::Boolean),
            "jaccard" => Ok(Measure::Jaccard),
            "de-carvalho" | "de_carvalho" => Ok(Measure::DeCarvalho),
            "ichino" | "ichino-yaguchi" | "ichino_yaguchi" => Ok(Measure::IchinoYaguchi { gamma: 0.5 }),
            other => Err(Error::Parse(format!(
                "unknown measure `{other}` (expected boolean, jaccard, de-carvalho or ichino)"
            ))),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=0.5).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::GammaOutOfRange(gamma))
    }
}

/// Boolean discrimination: 1 when the sets share no element, else 0.
///
/// Two empty sets are not discriminated, which keeps the measure reflexive.
/// Closed intervals touching at a single point intersect, so they score 0.
pub fn comp(u: &ValueSet, v: &ValueSet) -> Result<f64> {
    if u.is_empty() && v.is_empty() {
        return Ok(0.0);
    }
    let disjoint = match (u, v) {
        (ValueSet::Categories(a), ValueSet::Categories(b)) => a.is_disjoint(b),
        _ => u.intersect(v)?.is_empty(),
    };
    Ok(if disjoint { 1.0 } else { 0.0 })
}

/// Partial discrimination `1 - card(u ∩ v) / card(u ∪ v)`.
///
/// `card` is the measure (`mu`) unless the union has measure zero, i.e. both
/// sets are finite point sets; then distinct points are counted.
pub fn g_jaccard(u: &ValueSet, v: &ValueSet) -> Result<f64> {
    let inter = u.intersect(v)?;
    let union = u.union(v)?;
    let (common, total) = match union.mu() {
        m if m > 0.0 => (inter.mu(), m),
        _ => (inter.point_count(), union.point_count()),
    };
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - common / total)
}

/// De Carvalho's potential-description dissimilarity with the overlap
/// operator read as intersection:
/// `1 - mu(u∩v) / (mu(u∩v) + mu(u∩v̄) + mu(ū∩v))`.
pub fn de_carvalho(u: &ValueSet, v: &ValueSet, spec: &VariableSpec) -> Result<f64> {
    spec.check(u)?;
    spec.check(v)?;
    let inter = u.intersect(v)?;
    let agree = inter.mu();
    let only_u = u.intersect(&v.complement(spec)?)?.mu();
    let only_v = u.complement(spec)?.intersect(v)?.mu();
    let denom = agree + only_u + only_v;
    if denom > 0.0 {
        return Ok(1.0 - agree / denom);
    }
    // measure-zero operands: count points instead
    let common = inter.point_count();
    let denom = u.point_count() + v.point_count() - common;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - common / denom)
}

/// Ichino–Yaguchi: `mu(join) - mu(meet) + gamma (2 mu(meet) - mu(u) - mu(v))`
/// where `meet` is the intersection. For categories `join` is the union. For
/// intervals it is the union plus the gap bridging the two sets, i.e. the part
/// of the overall span lying in neither set's own span; on two single
/// intervals this is their convex span.
pub fn ichino_yaguchi(u: &ValueSet, v: &ValueSet, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let meet = u.intersect(v)?.mu();
    let join = match (u, v) {
        (ValueSet::Intervals(a), ValueSet::Intervals(b)) => bridged_join(a, b).measure(),
        _ => u.union(v)?.mu(),
    };
    let phi = join - meet + gamma * (2.0 * meet - u.mu() - v.mu());
    // rounding can push an exact zero slightly negative
    Ok(phi.max(0.0))
}

fn bridged_join(a: &IntervalUnion, b: &IntervalUnion) -> IntervalUnion {
    let union = a.union(b);
    let Some(whole) = union.span() else {
        return union;
    };
    let own: Vec<Interval> = a.span().into_iter().chain(b.span()).collect();
    let bridge = IntervalUnion::from_intervals(own).complement_within(&whole);
    union.union(&bridge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariableSpec;

    fn cats(xs: &[&str]) -> ValueSet {
        ValueSet::categories(xs.iter().copied())
    }

    fn ivs(parts: &[(f64, f64)]) -> ValueSet {
        ValueSet::intervals(parts).unwrap()
    }

    #[test]
    fn comp_examples() {
        assert_eq!(comp(&cats(&["brown"]), &cats(&["black"])).unwrap(), 1.0);
        assert_eq!(comp(&cats(&["tall"]), &cats(&["tall", "medium"])).unwrap(), 0.0);
        assert_eq!(comp(&ivs(&[(15.0, 35.0)]), &ivs(&[(20.0, 35.0)])).unwrap(), 0.0);
        assert_eq!(comp(&ivs(&[(15.0, 35.0)]), &ivs(&[(80.0, 90.0)])).unwrap(), 1.0);
        // closed endpoints touch
        assert_eq!(comp(&ivs(&[(65.0, 80.0)]), &ivs(&[(80.0, 90.0)])).unwrap(), 0.0);
        assert_eq!(comp(&cats(&[]), &cats(&[])).unwrap(), 0.0);
        assert!(comp(&cats(&["a"]), &ivs(&[(0.0, 1.0)])).is_err());
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(g_jaccard(&cats(&["brown"]), &cats(&["brown", "black"])).unwrap(), 0.5);
        let g = g_jaccard(&ivs(&[(25.0, 45.0)]), &ivs(&[(20.0, 35.0)])).unwrap();
        assert!((g - 0.6).abs() < 1e-12);
        assert_eq!(g_jaccard(&ivs(&[(1.0, 4.0)]), &ivs(&[(1.0, 4.0)])).unwrap(), 0.0);
        assert_eq!(g_jaccard(&ivs(&[(1.0, 4.0)]), &ivs(&[(5.0, 6.0)])).unwrap(), 1.0);
        assert_eq!(g_jaccard(&cats(&[]), &cats(&[])).unwrap(), 0.0);
    }

    #[test]
    fn jaccard_point_sets_count_points() {
        let a = ValueSet::Intervals(IntervalUnion::from_points([1.0, 2.0]).unwrap());
        let b = ValueSet::Intervals(IntervalUnion::from_points([2.0, 3.0]).unwrap());
        assert_eq!(g_jaccard(&a, &a).unwrap(), 0.0);
        assert!((g_jaccard(&a, &b).unwrap() - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
        let c = ValueSet::Intervals(IntervalUnion::from_points([7.0]).unwrap());
        assert_eq!(g_jaccard(&a, &c).unwrap(), 1.0);
    }

    #[test]
    fn de_carvalho_examples() {
        let hair = VariableSpec::categorical("hair", ["brown", "black", "grey"]).unwrap();
        let d = de_carvalho(&cats(&["brown"]), &cats(&["brown", "black"]), &hair).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert_eq!(de_carvalho(&cats(&["grey"]), &cats(&["grey"]), &hair).unwrap(), 0.0);
        assert_eq!(de_carvalho(&cats(&["grey"]), &cats(&["brown"]), &hair).unwrap(), 1.0);

        let x = VariableSpec::numeric("x", 0.0, 10.0).unwrap();
        let d = de_carvalho(&ivs(&[(0.0, 2.0)]), &ivs(&[(1.0, 3.0)]), &x).unwrap();
        assert!((d - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
        let p = ValueSet::Intervals(IntervalUnion::from_points([4.0]).unwrap());
        assert_eq!(de_carvalho(&p, &p, &x).unwrap(), 0.0);
    }

    #[test]
    fn ichino_examples() {
        assert_eq!(ichino_yaguchi(&cats(&["brown"]), &cats(&["black"]), 0.0).unwrap(), 2.0);
        let d = ichino_yaguchi(&ivs(&[(0.0, 2.0)]), &ivs(&[(1.0, 3.0)]), 0.5).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(ichino_yaguchi(&ivs(&[(0.0, 2.0)]), &ivs(&[(0.0, 2.0)]), 0.3).unwrap(), 0.0);
        // gaps inside one set are not bridged
        let split = ivs(&[(0.0, 1.0), (4.0, 5.0)]);
        assert_eq!(ichino_yaguchi(&split, &split, 0.0).unwrap(), 0.0);
        // the gap between two sets is
        assert_eq!(ichino_yaguchi(&ivs(&[(0.0, 1.0)]), &ivs(&[(4.0, 5.0)]), 0.0).unwrap(), 5.0);
        assert!(matches!(
            ichino_yaguchi(&cats(&["a"]), &cats(&["a"]), 0.7),
            Err(Error::GammaOutOfRange(_))
        ));
        assert!(Measure::ichino_yaguchi(-0.1).is_err());
    }

    #[test]
    fn ichino_score_is_domain_normalized() {
        let x = VariableSpec::numeric("x", 0.0, 10.0).unwrap();
        let m = Measure::ichino_yaguchi(0.0).unwrap();
        let s = m.score(&ivs(&[(0.0, 1.0)]), &ivs(&[(9.0, 10.0)]), &x).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_measure_names() {
        assert_eq!("boolean".parse::<Measure>().unwrap(), Measure::Boolean);
        assert_eq!("de-carvalho".parse::<Measure>().unwrap(), Measure::DeCarvalho);
        assert!("cosine".parse::<Measure>().is_err());
    }
}
