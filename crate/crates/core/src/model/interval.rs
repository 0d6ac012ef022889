//! Closed intervals and canonical unions of closed intervals.

use std::fmt;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] has a non-finite bound")));
        }
        if lo > hi {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Result<Self> {
        Interval::new(x, x)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Union of closed intervals kept in canonical form: sorted by left endpoint,
/// and for consecutive pieces `hi_i < lo_{i+1}`. Overlapping or touching pieces
/// are merged on construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    pieces: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { pieces: Vec::new() }
    }

    pub fn single(iv: Interval) -> Self {
        IntervalUnion { pieces: vec![iv] }
    }

    pub fn from_intervals(pieces: impl IntoIterator<Item = Interval>) -> Self {
        let mut pieces: Vec<Interval> = pieces.into_iter().collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(pieces.len());
        for iv in pieces {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        IntervalUnion { pieces: merged }
    }

    /// Set of numeric values, one degenerate piece per distinct value.
    pub fn from_points(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        let pieces = points.into_iter().map(Interval::point).collect::<Result<Vec<_>>>()?;
        Ok(IntervalUnion::from_intervals(pieces))
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Number of canonical pieces; for a set of points this is the number of
    /// distinct values.
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Total length.
    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        // pieces are sorted and disjoint
        let idx = self.pieces.partition_point(|iv| iv.hi < x);
        self.pieces.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// Smallest interval covering every piece.
    pub fn span(&self) -> Option<Interval> {
        let first = self.pieces.first()?;
        let last = self.pieces.last()?;
        Some(Interval { lo: first.lo, hi: last.hi })
    }

    pub fn is_within(&self, domain: &Interval) -> bool {
        self.span().is_none_or(|s| domain.contains_interval(&s))
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (a, b) = (&self.pieces, &other.pieces);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces of each input are separated by gaps, so the output is already
        // sorted and disjoint
        IntervalUnion { pieces: out }
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::from_intervals(self.pieces.iter().chain(other.pieces.iter()).copied())
    }

    /// `domain \ self` under the closed-interval convention: boundary points
    /// are shared with `self`.
    pub fn complement_within(&self, domain: &Interval) -> IntervalUnion {
        let mut out = Vec::new();
        let mut cursor = domain.lo;
        for iv in &self.pieces {
            if iv.lo > cursor {
                out.push(Interval { lo: cursor, hi: iv.lo.min(domain.hi) });
            }
            cursor = cursor.max(iv.hi);
        }
        if cursor < domain.hi || self.pieces.is_empty() {
            out.push(Interval { lo: cursor, hi: domain.hi });
        }
        IntervalUnion::from_intervals(out)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        for (i, iv) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
