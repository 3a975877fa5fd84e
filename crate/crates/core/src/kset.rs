//! The prescribed closed subset K of the axis and its complement.
//!
//! At runtime K is always a finite union of points and closed intervals;
//! Cantor sets enter through a finite-depth middle-thirds truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_CANTOR_DEPTH: u32 = 20;

/// Closed interval `[lo, hi]`; a point is an interval with `lo == hi`.
pub type Interval = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Members {
    Points { z: Vec<f64> },
    Intervals { intervals: Vec<Interval> },
    Cantor { base: Interval, depth: u32 },
}

/// K together with the ambient open range `(a, b)` it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSetSpec {
    members: Members,
    range: Interval,
    pieces: Vec<Interval>,
}

/// Closed intervals of the depth-`depth` middle-thirds construction on `base`.
pub fn cantor_intervals(base: Interval, depth: u32) -> Result<Vec<Interval>> {
    if depth > MAX_CANTOR_DEPTH {
        return Err(Error::CantorDepth(depth));
    }
    if !(base.0 < base.1) {
        return Err(Error::InvalidSet(format!("degenerate Cantor base {base:?}")));
    }
    let mut level = vec![base];
    for _ in 0..depth {
        level = level
            .into_iter()
            .flat_map(|(l, u)| {
                let third = (u - l) / 3.0;
                [(l, l + third), (u - third, u)]
            })
            .collect();
    }
    Ok(level)
}

impl ClosedSetSpec {
    pub fn new(members: Members, range: Interval) -> Result<Self> {
        let (a, b) = range;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidSet(format!("range ({a}, {b}) is empty or unbounded")));
        }
        let pieces: Vec<Interval> = match &members {
            Members::Points { z } => z.iter().map(|&p| (p, p)).collect(),
            Members::Intervals { intervals } => intervals.clone(),
            Members::Cantor { base, depth } => cantor_intervals(*base, *depth)?,
        };
        for (k, &(l, u)) in pieces.iter().enumerate() {
            if !(l.is_finite() && u.is_finite()) || l > u {
                return Err(Error::InvalidSet(format!("member {k} is not a closed interval")));
            }
            if !(a < l && u < b) {
                return Err(Error::InvalidSet(format!(
                    "member [{l}, {u}] is not strictly inside ({a}, {b})"
                )));
            }
            if k > 0 && !(pieces[k - 1].1 < l) {
                return Err(Error::InvalidSet(format!(
                    "members must be sorted and pairwise disjoint (at index {k})"
                )));
            }
        }
        Ok(ClosedSetSpec {
            members,
            range,
            pieces,
        })
    }

    pub fn empty(range: Interval) -> Result<Self> {
        Self::new(Members::Points { z: Vec::new() }, range)
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    /// Sorted disjoint closed pieces (points as degenerate intervals).
    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, z: f64) -> bool {
        self.distance(z) == 0.0
    }

    /// Distance from height `z` to K; `+inf` when K is empty.
    pub fn distance(&self, z: f64) -> f64 {
        // pieces are sorted: find the first piece whose upper end is >= z
        let k = self.pieces.partition_point(|&(_, u)| u < z);
        let mut best = f64::INFINITY;
        if let Some(&(l, _)) = self.pieces.get(k) {
            best = best.min((l - z).max(0.0));
        }
        if k > 0 {
            best = best.min(z - self.pieces[k - 1].1);
        }
        best
    }

    /// Maximal open intervals of `(a, b) \ K`, sorted.
    pub fn complement_components(&self) -> Vec<Interval> {
        let (a, b) = self.range;
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut left = a;
        for &(l, u) in &self.pieces {
            out.push((left, l));
            left = u;
        }
        out.push((left, b));
        out
    }

    /// Representative points of K: isolated points and interval endpoints.
    pub fn sample_points(&self) -> Vec<f64> {
        let mut s = Vec::new();
        for &(l, u) in &self.pieces {
            s.push(l);
            if u > l {
                s.push(u);
            }
        }
        s
    }

    /// Midpoints of the complement components bounded by K on both sides.
    pub fn gap_midpoints(&self) -> Vec<f64> {
        self.pieces
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].0))
            .collect()
    }
}
