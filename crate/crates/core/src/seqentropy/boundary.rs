//! Boundary ledger of a rectangle exchange acting on a rectangle partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SegmentSet;
use crate::partition::RectanglePartition;
use crate::rational::{self, ExactRational};
use crate::seqentropy::Budgets;
use crate::systems::RectangleExchange;

/// `S_0` is the interior boundary of `xi`; `S_{n+1} = T(S_n) ∪ D'` with `D'`
/// the image discontinuities of `T`. `S_n` contains the boundary of the
/// atoms of `T^n xi`, and since `T` only translates pieces of segments,
/// `|S_{n+1}| <= |S_n| + |D'|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryLedger {
    /// `B(n) = |S_n|` for `n = 0..=N`.
    #[serde(with = "rational::serde_str_vec")]
    pub lengths: Vec<ExactRational>,
    /// `|S_0 ∪ ... ∪ S_n|`, which contains the boundary of
    /// `xi ∨ T xi ∨ ... ∨ T^n xi`.
    #[serde(with = "rational::serde_str_vec")]
    pub join_envelope: Vec<ExactRational>,
    /// Interior discontinuity length `D` of `T`.
    #[serde(with = "rational::serde_str")]
    pub discontinuity_length: ExactRational,
    /// Length of the image discontinuity set `D'`.
    #[serde(with = "rational::serde_str")]
    pub image_discontinuity_length: ExactRational,
    /// Steps `n` with `B(n+1) - B(n) = D` exactly.
    pub increments_equal_d: Vec<usize>,
}

impl BoundaryLedger {
    pub fn increments(&self) -> Vec<ExactRational> {
        self.lengths.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// `B(n) - B(0) <= n D` for every recorded `n`.
    pub fn linear_bound_holds(&self) -> bool {
        let b0 = &self.lengths[0];
        self.lengths
            .iter()
            .enumerate()
            .all(|(n, b)| b - b0 <= &self.discontinuity_length * rational::int(n as i64))
    }
}

pub fn boundary_growth(
    t: &RectangleExchange,
    xi: &RectanglePartition,
    n: usize,
    budgets: &Budgets,
) -> Result<BoundaryLedger> {
    if n as u64 > budgets.max_power {
        return Err(Error::budget("ledger steps", n as u64, budgets.max_power));
    }
    let d = t.discontinuity_length();
    let image_disc = t.image_discontinuities();
    let mut current = xi.boundary();
    let mut envelope = current.clone();
    let mut lengths = vec![current.total_length()];
    let mut joined = vec![envelope.total_length()];
    for _ in 0..n {
        let mut next = t.push_segments(&current);
        next.union_with(&image_disc);
        if next.segment_count() > budgets.max_cuts {
            return Err(Error::budget(
                "boundary segments",
                next.segment_count() as u64,
                budgets.max_cuts as u64,
            ));
        }
        envelope.union_with(&next);
        lengths.push(next.total_length());
        joined.push(envelope.total_length());
        current = next;
    }
    let increments_equal_d = lengths
        .windows(2)
        .enumerate()
        .filter(|(_, w)| &w[1] - &w[0] == d)
        .map(|(i, _)| i)
        .collect();
    Ok(BoundaryLedger {
        lengths,
        join_envelope: joined,
        discontinuity_length: d,
        image_discontinuity_length: image_disc.total_length(),
        increments_equal_d,
    })
}

/// Segment set after `n` ledger steps, for inspection.
pub fn ledger_segments(t: &RectangleExchange, xi: &RectanglePartition, n: usize) -> SegmentSet {
    let image_disc = t.image_discontinuities();
    let mut s = xi.boundary();
    for _ in 0..n {
        s = t.push_segments(&s);
        s.union_with(&image_disc);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn identity_keeps_boundary() {
        let l = boundary_growth(
            &RectangleExchange::identity(),
            &RectanglePartition::quadrants(),
            5,
            &Budgets::default(),
        )
        .unwrap();
        assert!(l.lengths.iter().all(|b| b == &ratio(2, 1)));
        assert!(l.linear_bound_holds());
    }

    #[test]
    fn trivial_partition_only_accumulates_discontinuities() {
        let t = RectangleExchange::product_rotation(&ratio(1, 3), &ratio(2, 5)).unwrap();
        let l = boundary_growth(&t, &RectanglePartition::trivial(), 6, &Budgets::default()).unwrap();
        assert_eq!(l.lengths[0], ratio(0, 1));
        for (n, b) in l.lengths.iter().enumerate() {
            assert!(b <= &(ratio(n as i64, 1) * &l.discontinuity_length));
        }
    }

    #[test]
    fn swap_with_quadrants() {
        let l = boundary_growth(
            &RectangleExchange::vertical_swap(),
            &RectanglePartition::quadrants(),
            20,
            &Budgets::default(),
        )
        .unwrap();
        assert_eq!(l.discontinuity_length, ratio(1, 1));
        assert!(l.linear_bound_holds());
        // quadrant boundary is invariant under the swap
        assert!(l.lengths.iter().all(|b| b == &ratio(2, 1)));
    }
}
