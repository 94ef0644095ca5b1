//! Borderline tracing on binary masks.
//!
//! Coordinates are image coordinates: `w` grows rightward, `h` grows
//! downward. "Right oriented" means clockwise on screen, which keeps the digit
//! on the right-hand side of the walk. Both the border test and the tracing
//! rotation use the 8-neighborhood.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mnist::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub w: i64,
    pub h: i64,
}

impl LatticePoint {
    pub const fn new(w: i64, h: i64) -> Self {
        Self { w, h }
    }

    fn offset(self, (dw, dh): (i64, i64)) -> Self {
        Self::new(self.w + dw, self.h + dh)
    }

    pub fn is_neighbor(self, other: Self) -> bool {
        self != other && (self.w - other.w).abs() <= 1 && (self.h - other.h).abs() <= 1
    }
}

/// The 8 neighbor offsets in clockwise screen order, starting east.
const DIRECTIONS: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
const WEST: usize = 4;

fn direction_index(from: LatticePoint, to: LatticePoint) -> usize {
    let delta = (to.w - from.w, to.h - from.h);
    DIRECTIONS
        .iter()
        .position(|&d| d == delta)
        .expect("points are 8-neighbors")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedCurve {
    pub points: Vec<LatticePoint>,
    pub orientation: Orientation,
}

impl ClosedCurve {
    /// Builds a curve from a cyclic point list, deriving its orientation.
    pub fn from_points(points: Vec<LatticePoint>) -> Self {
        let orientation = orientation_of(&points);
        Self { points, orientation }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same cycle starting at point `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut points = self.points.clone();
        let n = points.len().max(1);
        points.rotate_left(k % n);
        Self {
            points,
            orientation: self.orientation,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("mask has no inside points")]
    EmptyMask,
    #[error("start pair is not a pair of neighboring border points")]
    InvalidStart,
    #[error("border point ({w}, {h}) has no border neighbor")]
    Degenerate { w: i64, h: i64 },
    #[error("tracing did not close within {0} steps")]
    StepBudget(usize),
    #[error("no right-oriented borderline found")]
    NoRightBorderline,
}

/// Border flags for every lattice point of `mask`.
struct BorderMap<'a> {
    mask: &'a BinaryMask,
    border: Vec<bool>,
}

impl<'a> BorderMap<'a> {
    fn new(mask: &'a BinaryMask) -> Self {
        let mut border = vec![false; mask.width * mask.height];
        for h in 0..mask.height {
            for w in 0..mask.width {
                let p = LatticePoint::new(w as i64, h as i64);
                border[h * mask.width + w] = mask.is_inside(p.w, p.h)
                    && DIRECTIONS.iter().any(|&d| {
                        let q = p.offset(d);
                        !mask.is_inside(q.w, q.h)
                    });
            }
        }
        Self { mask, border }
    }

    fn is_border(&self, p: LatticePoint) -> bool {
        self.mask.is_inside(p.w, p.h) && self.border[p.h as usize * self.mask.width + p.w as usize]
    }

    fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let width = self.mask.width;
        self.border
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| LatticePoint::new((i % width) as i64, (i / width) as i64))
    }

    /// First border point around `center`, scanning clockwise over the seven
    /// directions after `from`, then `from` itself.
    fn next_clockwise(&self, center: LatticePoint, from: usize) -> Option<LatticePoint> {
        (1..=8)
            .map(|k| center.offset(DIRECTIONS[(from + k) % 8]))
            .find(|&q| self.is_border(q))
    }

    fn start_pair(&self, p: LatticePoint) -> Option<(LatticePoint, LatticePoint)> {
        let outside = (0..8).map(|k| (WEST + k) % 8).find(|&d| {
            let q = p.offset(DIRECTIONS[d]);
            !self.mask.is_inside(q.w, q.h)
        })?;
        let q = (1..8)
            .map(|k| p.offset(DIRECTIONS[(outside + k) % 8]))
            .find(|&q| self.is_border(q))?;
        Some((p, q))
    }

    fn trace(&self, p: LatticePoint, q: LatticePoint) -> Result<ClosedCurve, TraceError> {
        if !self.is_border(p) || !self.is_border(q) || !p.is_neighbor(q) {
            return Err(TraceError::InvalidStart);
        }
        let budget = 8 * self.border.iter().filter(|&&b| b).count() + 1;
        let mut points = vec![p, q];
        let mut seen = HashMap::from([((p, q), 0usize)]);
        for _ in 0..budget {
            let n = points.len();
            let (prev, cur) = (points[n - 2], points[n - 1]);
            let next = self
                .next_clockwise(cur, direction_index(cur, prev))
                .ok_or(TraceError::Degenerate { w: cur.w, h: cur.h })?;
            // The first pair repeating closes the curve; any earlier repeat
            // closes a cycle that excludes the lead-in.
            if let Some(&k) = seen.get(&(cur, next)) {
                return Ok(ClosedCurve::from_points(points[k..n - 1].to_vec()));
            }
            seen.insert((cur, next), n - 1);
            points.push(next);
        }
        Err(TraceError::StepBudget(budget))
    }
}

/// Inside points with at least one of their 8 neighbors outside the mask or
/// off the lattice, in row-major order.
pub fn border_points(mask: &BinaryMask) -> Vec<LatticePoint> {
    BorderMap::new(mask).points().collect()
}

/// Traces the borderline that starts with the directed pair `(p, q)`.
pub fn trace_from(mask: &BinaryMask, p: LatticePoint, q: LatticePoint) -> Result<ClosedCurve, TraceError> {
    BorderMap::new(mask).trace(p, q)
}

/// The reproducible start pair for border point `p`: `q` is the first border
/// point clockwise after the first outside neighbor of `p` (scanning from
/// west). `None` for isolated points.
pub fn start_pair(mask: &BinaryMask, p: LatticePoint) -> Option<(LatticePoint, LatticePoint)> {
    let map = BorderMap::new(mask);
    if !map.is_border(p) {
        return None;
    }
    map.start_pair(p)
}

/// Twice the shoelace area in image coordinates. Positive for clockwise
/// (right-oriented) traversal on screen.
pub fn signed_area2(points: &[LatticePoint]) -> i64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a.w * b.h - b.w * a.h
        })
        .sum()
}

/// Zero-area curves, including the two-point `(P,Q,P)` case, count as right.
pub fn orientation_of(points: &[LatticePoint]) -> Orientation {
    if signed_area2(points) < 0 {
        Orientation::Left
    } else {
        Orientation::Right
    }
}

/// The right-oriented borderline running around the digit.
///
/// Every border point not yet covered by a traced curve seeds a new trace.
/// Of all right-oriented curves found, the one enclosing the largest area is
/// returned; left-oriented curves are hole contours and are discarded.
pub fn outer_borderline(mask: &BinaryMask) -> Result<ClosedCurve, TraceError> {
    if mask.count_inside() == 0 {
        return Err(TraceError::EmptyMask);
    }
    let map = BorderMap::new(mask);
    let mut covered = vec![false; mask.width * mask.height];
    let mut best: Option<(i64, ClosedCurve)> = None;
    let mut first_failure = None;
    for p in map.points().collect::<Vec<_>>() {
        if covered[p.h as usize * mask.width + p.w as usize] {
            continue;
        }
        let Some((p, q)) = map.start_pair(p) else {
            first_failure.get_or_insert(TraceError::Degenerate { w: p.w, h: p.h });
            continue;
        };
        let curve = match map.trace(p, q) {
            Ok(curve) => curve,
            Err(err) => {
                first_failure.get_or_insert(err);
                continue;
            }
        };
        for c in &curve.points {
            covered[c.h as usize * mask.width + c.w as usize] = true;
        }
        if curve.orientation != Orientation::Right {
            continue;
        }
        let area = signed_area2(&curve.points);
        if best.as_ref().is_none_or(|(a, _)| area > *a) {
            best = Some((area, curve));
        }
    }
    match (best, first_failure) {
        (Some((_, curve)), _) => Ok(curve),
        (None, Some(err)) => Err(err),
        (None, None) => Err(TraceError::NoRightBorderline),
    }
}
