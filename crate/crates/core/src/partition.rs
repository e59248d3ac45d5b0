//! Finite labeled partitions of `[0,1)` and of the unit square.
//!
//! An atom of a partition is the union of all pieces sharing a label, so two
//! non-adjacent gaps with the same label form a single atom.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::entropy::{self, ProbabilityVector};
use crate::error::{Error, Result};
use crate::geometry::{self, Point, Rect, SegmentSet};
use crate::rational::{self, ExactRational};

pub type Label = u32;

/// Partition of `[0,1)` into half-open gaps `[cuts[i], cuts[i+1])`, the last
/// gap ending at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition<L = Label> {
    cuts: Vec<ExactRational>,
    labels: Vec<L>,
}

impl<L: Clone + Ord> IntervalPartition<L> {
    pub fn new(cuts: Vec<ExactRational>, labels: Vec<L>) -> Result<Self> {
        if cuts.is_empty() || !cuts[0].is_zero() {
            return Err(Error::validation("interval partition must start with cut 0"));
        }
        if cuts.len() != labels.len() {
            return Err(Error::validation(format!(
                "{} cuts but {} labels",
                cuts.len(),
                labels.len()
            )));
        }
        if let Some(i) = cuts.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::validation(format!(
                "cuts not strictly increasing at index {}",
                i + 1
            )));
        }
        if cuts.last().is_some_and(|c| c >= &rational::one()) {
            return Err(Error::validation("cuts must lie in [0,1)"));
        }
        Ok(IntervalPartition { cuts, labels })
    }

    /// Builds from gap lengths; every length must be positive.
    pub fn from_lengths(lengths: &[ExactRational], labels: Vec<L>) -> Result<Self> {
        if let Some(i) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(Error::validation(format!("gap {i} has non-positive length")));
        }
        let total: ExactRational = lengths.iter().sum();
        if total != rational::one() {
            return Err(Error::validation("gap lengths must sum to 1"));
        }
        let mut cuts = Vec::with_capacity(lengths.len());
        let mut acc = rational::zero();
        for l in lengths {
            cuts.push(acc.clone());
            acc += l;
        }
        Self::new(cuts, labels)
    }

    pub fn cuts(&self) -> &[ExactRational] {
        &self.cuts
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn gap_count(&self) -> usize {
        self.cuts.len()
    }

    /// `(start, end, label)` for each gap.
    pub fn gaps(&self) -> impl Iterator<Item = (&ExactRational, ExactRational, &L)> + '_ {
        (0..self.cuts.len()).map(move |i| {
            let end = self.cuts.get(i + 1).cloned().unwrap_or_else(rational::one);
            (&self.cuts[i], end, &self.labels[i])
        })
    }

    /// Label of the gap containing `x` (right-continuous).
    pub fn label_at(&self, x: &ExactRational) -> Result<&L> {
        if !rational::in_unit_interval(x) {
            return Err(Error::Domain(format!(
                "{} is outside [0,1)",
                rational::format_rational(x)
            )));
        }
        let i = self.cuts.partition_point(|c| c <= x) - 1;
        Ok(&self.labels[i])
    }

    /// Exact measure of each distinct label, in label order.
    pub fn label_measures(&self) -> BTreeMap<L, ExactRational> {
        let mut m: BTreeMap<L, ExactRational> = BTreeMap::new();
        for (a, b, l) in self.gaps() {
            *m.entry(l.clone()).or_insert_with(rational::zero) += b - a;
        }
        m
    }

    pub fn measures(&self) -> ProbabilityVector {
        ProbabilityVector::new(self.label_measures().into_values().collect())
            .expect("gap lengths of a valid partition sum to 1")
    }

    pub fn atom_count(&self) -> usize {
        self.label_measures().len()
    }

    pub fn entropy(&self) -> f64 {
        let m: Vec<ExactRational> = self.label_measures().into_values().collect();
        entropy::entropy_of_masses(&m)
    }

    /// Join: cuts are the union of both cut sets, labels are pairs.
    pub fn common_refinement<M: Clone + Ord>(
        &self,
        other: &IntervalPartition<M>,
    ) -> IntervalPartition<(L, M)> {
        let mut cuts: Vec<ExactRational> = self.cuts.iter().chain(other.cuts()).cloned().collect();
        cuts.sort();
        cuts.dedup();
        let labels = cuts
            .iter()
            .map(|c| {
                (
                    self.label_at(c).expect("cut in [0,1)").clone(),
                    other.label_at(c).expect("cut in [0,1)").clone(),
                )
            })
            .collect();
        IntervalPartition { cuts, labels }
    }

    /// Replaces labels with dense ids in order of first appearance and
    /// merges adjacent gaps that end up with the same id.
    pub fn canonical(&self) -> IntervalPartition<Label> {
        let mut ids: BTreeMap<&L, Label> = BTreeMap::new();
        let mut cuts = Vec::new();
        let mut labels = Vec::new();
        for (c, l) in self.cuts.iter().zip(&self.labels) {
            let next = ids.len() as Label;
            let id = *ids.entry(l).or_insert(next);
            if labels.last() != Some(&id) {
                cuts.push(c.clone());
                labels.push(id);
            }
        }
        IntervalPartition { cuts, labels }
    }
}

impl IntervalPartition<Label> {
    /// One atom.
    pub fn trivial() -> Self {
        IntervalPartition {
            cuts: vec![rational::zero()],
            labels: vec![0],
        }
    }

    pub fn halves() -> Self {
        Self::dyadic(1)
    }

    /// `2^depth` equal gaps with distinct labels.
    pub fn dyadic(depth: u32) -> Self {
        let n = 1u64 << depth;
        IntervalPartition {
            cuts: (0..n).map(|k| rational::dyadic(k, depth)).collect(),
            labels: (0..n as Label).collect(),
        }
    }

    /// Dyadic gaps of the given depth with caller-chosen labels (atoms may
    /// merge).
    pub fn dyadic_labeled(depth: u32, labels: Vec<Label>) -> Result<Self> {
        let n = 1usize << depth;
        if labels.len() != n {
            return Err(Error::validation(format!(
                "depth {depth} needs {n} labels, got {}",
                labels.len()
            )));
        }
        Self::new((0..n as u64).map(|k| rational::dyadic(k, depth)).collect(), labels)
    }

    /// Equal-length gaps `[i/n, (i+1)/n)`.
    pub fn uniform(n: u32) -> Self {
        IntervalPartition {
            cuts: (0..n).map(|k| rational::ratio(k as i64, n as i64)).collect(),
            labels: (0..n).collect(),
        }
    }

    pub fn label_count(&self) -> usize {
        self.atom_count()
    }
}

/// Partition of the unit square into labeled half-open rectangles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectanglePartition {
    atoms: Vec<(Rect, Label)>,
}

impl RectanglePartition {
    pub fn new(atoms: Vec<(Rect, Label)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::validation("rectangle partition is empty"));
        }
        for (i, (r, _)) in atoms.iter().enumerate() {
            if r.is_degenerate() {
                return Err(Error::validation(format!("rectangle {i} has zero area")));
            }
            if !r.within_unit_square() {
                return Err(Error::validation(format!("rectangle {i} leaves the unit square")));
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0.intersection(&atoms[j].0).is_some() {
                    return Err(Error::validation(format!("rectangles {i} and {j} overlap")));
                }
            }
        }
        let total: ExactRational = atoms.iter().map(|(r, _)| r.area()).sum();
        if total != rational::one() {
            return Err(Error::validation(format!(
                "rectangle areas sum to {}, not 1",
                rational::format_rational(&total)
            )));
        }
        Ok(RectanglePartition { atoms })
    }

    pub fn trivial() -> Self {
        RectanglePartition {
            atoms: vec![(Rect::unit(), 0)],
        }
    }

    /// `2^ax` columns by `2^ay` rows, each cell its own label (row-major from
    /// the bottom-left).
    pub fn dyadic_grid(ax: u32, ay: u32) -> Self {
        let nx = 1u64 << ax;
        let ny = 1u64 << ay;
        let mut atoms = Vec::with_capacity((nx * ny) as usize);
        for j in 0..ny {
            for i in 0..nx {
                let r = Rect::new(
                    rational::dyadic(i, ax),
                    rational::dyadic(i + 1, ax),
                    rational::dyadic(j, ay),
                    rational::dyadic(j + 1, ay),
                );
                atoms.push((r, (j * nx + i) as Label));
            }
        }
        RectanglePartition { atoms }
    }

    pub fn quadrants() -> Self {
        Self::dyadic_grid(1, 1)
    }

    pub fn vertical_halves() -> Self {
        Self::dyadic_grid(1, 0)
    }

    pub fn atoms(&self) -> &[(Rect, Label)] {
        &self.atoms
    }

    pub fn label_at(&self, p: &Point) -> Result<Label> {
        self.atoms
            .iter()
            .find(|(r, _)| r.contains(p))
            .map(|(_, l)| *l)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "({}, {}) is outside the unit square",
                    rational::format_rational(&p.0),
                    rational::format_rational(&p.1)
                ))
            })
    }

    pub fn label_measures(&self) -> BTreeMap<Label, ExactRational> {
        let mut m: BTreeMap<Label, ExactRational> = BTreeMap::new();
        for (r, l) in &self.atoms {
            *m.entry(*l).or_insert_with(rational::zero) += r.area();
        }
        m
    }

    pub fn measures(&self) -> ProbabilityVector {
        ProbabilityVector::new(self.label_measures().into_values().collect())
            .expect("areas of a valid partition sum to 1")
    }

    pub fn label_count(&self) -> usize {
        self.label_measures().len()
    }

    pub fn entropy(&self) -> f64 {
        let m: Vec<ExactRational> = self.label_measures().into_values().collect();
        entropy::entropy_of_masses(&m)
    }

    /// Interior segments separating atoms with different labels.
    pub fn boundary(&self) -> SegmentSet {
        geometry::labeled_boundary(&self.atoms)
    }
}

/// Either kind of partition, for callers that accept both.
#[derive(Debug, Clone, Copy)]
pub enum PartitionRef<'a> {
    Interval(&'a IntervalPartition),
    Rectangle(&'a RectanglePartition),
}

/// One entry per distinct label, equal to the total measure of that label.
pub fn partition_measures(p: PartitionRef<'_>) -> ProbabilityVector {
    match p {
        PartitionRef::Interval(x) => x.measures(),
        PartitionRef::Rectangle(x) => x.measures(),
    }
}
