//! Axis-parallel rectangles and exact segment bookkeeping on the unit square.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, ExactRational};

pub type Point = (ExactRational, ExactRational);

/// Half-open rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    #[serde(with = "rational::serde_str")]
    pub x0: ExactRational,
    #[serde(with = "rational::serde_str")]
    pub x1: ExactRational,
    #[serde(with = "rational::serde_str")]
    pub y0: ExactRational,
    #[serde(with = "rational::serde_str")]
    pub y1: ExactRational,
}

impl Rect {
    pub fn new(x0: ExactRational, x1: ExactRational, y0: ExactRational, y1: ExactRational) -> Rect {
        Rect { x0, x1, y0, y1 }
    }

    pub fn unit() -> Rect {
        Rect::new(rational::zero(), rational::one(), rational::zero(), rational::one())
    }

    pub fn width(&self) -> ExactRational {
        &self.x1 - &self.x0
    }

    pub fn height(&self) -> ExactRational {
        &self.y1 - &self.y0
    }

    pub fn area(&self) -> ExactRational {
        self.width() * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.width().is_positive() || !self.height().is_positive()
    }

    /// Lower-left inclusion: the left and bottom edges belong to the rectangle.
    pub fn contains(&self, p: &Point) -> bool {
        self.x0 <= p.0 && p.0 < self.x1 && self.y0 <= p.1 && p.1 < self.y1
    }

    pub fn within_unit_square(&self) -> bool {
        let z = rational::zero();
        let o = rational::one();
        self.x0 >= z && self.y0 >= z && self.x1 <= o && self.y1 <= o
    }

    /// Intersection with positive area, if any.
    pub fn intersection(&self, o: &Rect) -> Option<Rect> {
        let r = Rect::new(
            (&self.x0).max(&o.x0).clone(),
            (&self.x1).min(&o.x1).clone(),
            (&self.y0).max(&o.y0).clone(),
            (&self.y1).min(&o.y1).clone(),
        );
        (!r.is_degenerate()).then_some(r)
    }

    pub fn translate(&self, t: &Point) -> Rect {
        Rect::new(&self.x0 + &t.0, &self.x1 + &t.0, &self.y0 + &t.1, &self.y1 + &t.1)
    }
}

/// Union of axis-parallel segments, stored as merged disjoint intervals per
/// line. Horizontal segments are keyed by `y`, vertical ones by `x`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentSet {
    horizontal: BTreeMap<ExactRational, Vec<(ExactRational, ExactRational)>>,
    vertical: BTreeMap<ExactRational, Vec<(ExactRational, ExactRational)>>,
}

fn merge_into(list: &mut Vec<(ExactRational, ExactRational)>, a: ExactRational, b: ExactRational) {
    if a >= b {
        return;
    }
    // find insertion range of overlapping/touching intervals
    let start = list.partition_point(|(_, e)| e < &a);
    let mut end = start;
    let mut lo = a;
    let mut hi = b;
    while end < list.len() && list[end].0 <= hi {
        if list[end].0 < lo {
            lo = list[end].0.clone();
        }
        if list[end].1 > hi {
            hi = list[end].1.clone();
        }
        end += 1;
    }
    list.splice(start..end, std::iter::once((lo, hi)));
}

impl SegmentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_horizontal(&mut self, y: ExactRational, x0: ExactRational, x1: ExactRational) {
        merge_into(self.horizontal.entry(y).or_default(), x0, x1);
    }

    pub fn add_vertical(&mut self, x: ExactRational, y0: ExactRational, y1: ExactRational) {
        merge_into(self.vertical.entry(x).or_default(), y0, y1);
    }

    pub fn horizontal(&self) -> impl Iterator<Item = (&ExactRational, &ExactRational, &ExactRational)> {
        self.horizontal
            .iter()
            .flat_map(|(y, v)| v.iter().map(move |(a, b)| (y, a, b)))
    }

    pub fn vertical(&self) -> impl Iterator<Item = (&ExactRational, &ExactRational, &ExactRational)> {
        self.vertical
            .iter()
            .flat_map(|(x, v)| v.iter().map(move |(a, b)| (x, a, b)))
    }

    pub fn union_with(&mut self, other: &SegmentSet) {
        for (y, a, b) in other.horizontal() {
            self.add_horizontal(y.clone(), a.clone(), b.clone());
        }
        for (x, a, b) in other.vertical() {
            self.add_vertical(x.clone(), a.clone(), b.clone());
        }
    }

    pub fn total_length(&self) -> ExactRational {
        let h: ExactRational = self.horizontal().map(|(_, a, b)| b - a).sum();
        let v: ExactRational = self.vertical().map(|(_, a, b)| b - a).sum();
        h + v
    }

    pub fn is_empty(&self) -> bool {
        self.horizontal.values().all(Vec::is_empty) && self.vertical.values().all(Vec::is_empty)
    }

    pub fn segment_count(&self) -> usize {
        self.horizontal.values().map(Vec::len).sum::<usize>()
            + self.vertical.values().map(Vec::len).sum::<usize>()
    }
}

/// Returns `true` for coordinates on the outer boundary of the unit square.
pub(crate) fn on_outer_line(c: &ExactRational) -> bool {
    c.is_zero() || c == &rational::one()
}

/// Interior boundary of a labeled tiling of the unit square: the segments
/// that separate rectangles carrying different labels. Edges on the outer
/// boundary of the square are never included.
pub fn labeled_boundary<K: PartialEq>(tiles: &[(Rect, K)]) -> SegmentSet {
    let xs: BTreeSet<ExactRational> = tiles
        .iter()
        .flat_map(|(r, _)| [r.x0.clone(), r.x1.clone()])
        .collect();
    let ys: BTreeSet<ExactRational> = tiles
        .iter()
        .flat_map(|(r, _)| [r.y0.clone(), r.y1.clone()])
        .collect();
    let half_min_gap = |s: &BTreeSet<ExactRational>| -> ExactRational {
        let v: Vec<&ExactRational> = s.iter().collect();
        v.windows(2)
            .map(|w| w[1] - w[0])
            .min()
            .unwrap_or_else(rational::one)
            / rational::int(2)
    };
    let dx = half_min_gap(&xs);
    let dy = half_min_gap(&ys);
    let label_at = |p: &Point| tiles.iter().find(|(r, _)| r.contains(p)).map(|(_, k)| k);

    let xv: Vec<&ExactRational> = xs.iter().collect();
    let yv: Vec<&ExactRational> = ys.iter().collect();
    let two = rational::int(2);
    let mut out = SegmentSet::new();

    for y in yv.iter().filter(|y| !on_outer_line(y)) {
        for w in xv.windows(2) {
            let mid = (w[0] + w[1]) / &two;
            let above = label_at(&(mid.clone(), (*y).clone()));
            let below = label_at(&(mid, *y - &dy));
            if above != below {
                out.add_horizontal((*y).clone(), w[0].clone(), w[1].clone());
            }
        }
    }
    for x in xv.iter().filter(|x| !on_outer_line(x)) {
        for w in yv.windows(2) {
            let mid = (w[0] + w[1]) / &two;
            let right = label_at(&((*x).clone(), mid.clone()));
            let left = label_at(&(*x - &dx, mid));
            if right != left {
                out.add_vertical((*x).clone(), w[0].clone(), w[1].clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn r(x0: (i64, i64), x1: (i64, i64), y0: (i64, i64), y1: (i64, i64)) -> Rect {
        Rect::new(ratio(x0.0, x0.1), ratio(x1.0, x1.1), ratio(y0.0, y0.1), ratio(y1.0, y1.1))
    }

    #[test]
    fn merge_keeps_disjoint_sorted() {
        let mut s = SegmentSet::new();
        s.add_horizontal(ratio(1, 2), ratio(0, 1), ratio(1, 4));
        s.add_horizontal(ratio(1, 2), ratio(1, 2), ratio(3, 4));
        s.add_horizontal(ratio(1, 2), ratio(1, 8), ratio(5, 8));
        assert_eq!(s.segment_count(), 1);
        assert_eq!(s.total_length(), ratio(3, 4));
        s.add_horizontal(ratio(1, 2), ratio(7, 8), ratio(1, 1));
        assert_eq!(s.segment_count(), 2);
        assert_eq!(s.total_length(), ratio(7, 8));
    }

    #[test]
    fn quadrant_boundary_is_two_lines() {
        let tiles = vec![
            (r((0, 1), (1, 2), (0, 1), (1, 2)), 0),
            (r((1, 2), (1, 1), (0, 1), (1, 2)), 1),
            (r((0, 1), (1, 2), (1, 2), (1, 1)), 2),
            (r((1, 2), (1, 1), (1, 2), (1, 1)), 3),
        ];
        let b = labeled_boundary(&tiles);
        assert_eq!(b.total_length(), ratio(2, 1));
    }

    #[test]
    fn equal_labels_do_not_separate() {
        let tiles = vec![
            (r((0, 1), (1, 2), (0, 1), (1, 2)), 0),
            (r((1, 2), (1, 1), (0, 1), (1, 2)), 0),
            (r((0, 1), (1, 2), (1, 2), (1, 1)), 1),
            (r((1, 2), (1, 1), (1, 2), (1, 1)), 1),
        ];
        let b = labeled_boundary(&tiles);
        assert_eq!(b.total_length(), ratio(1, 1));
        assert_eq!(b.vertical().count(), 0);
    }

    #[test]
    fn lower_left_inclusion() {
        let q = r((0, 1), (1, 2), (0, 1), (1, 2));
        assert!(q.contains(&(ratio(0, 1), ratio(0, 1))));
        assert!(!q.contains(&(ratio(1, 2), ratio(0, 1))));
        assert!(!q.contains(&(ratio(0, 1), ratio(1, 2))));
    }
}
