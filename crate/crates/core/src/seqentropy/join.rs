//! Exact joins of pulled-back partitions under interval exchanges.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{self, ProbabilityVector};
use crate::error::{Error, Result};
use crate::partition::{IntervalPartition, Label};
use crate::rational::{self, ExactRational};
use crate::seqentropy::family::IndexFamily;
use crate::seqentropy::{Budgets, Direction};
use crate::systems::iet::{IntervalExchange, PowerIter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JoinMethod {
    Exact,
    Symbolic,
    MonteCarlo,
}

impl JoinMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            JoinMethod::Exact => "exact",
            JoinMethod::Symbolic => "symbolic",
            JoinMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// One atom of a join: the vector of base labels, one per family member, and
/// its measure (empirical frequency for Monte Carlo joins).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinAtom {
    pub labels: Vec<Label>,
    #[serde(with = "rational::serde_str")]
    pub measure: ExactRational,
}

/// Atom vectors are materialized only below this many stored labels.
pub const MAX_MATERIALIZED_LABELS: usize = 1 << 22;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JoinResult {
    pub method: JoinMethod,
    pub family_size: usize,
    /// `H(join)` in bits (Miller–Madow corrected for Monte Carlo).
    pub entropy_bits: f64,
    /// Number of atoms (observed support for Monte Carlo).
    #[serde(with = "biguint_str")]
    pub atom_count: BigUint,
    /// 95% half-width; 0 for exact methods.
    pub ci_half_width: f64,
    pub samples: Option<usize>,
    /// Atoms with their label vectors, when small enough to keep.
    pub atoms: Option<Vec<JoinAtom>>,
    /// The join itself as an interval partition (exact 1D joins only).
    #[serde(skip)]
    pub partition: Option<IntervalPartition<Vec<Label>>>,
}

impl JoinResult {
    /// `H(join) / |P|`.
    pub fn h(&self) -> f64 {
        self.entropy_bits / self.family_size as f64
    }

    pub fn measures(&self) -> Option<ProbabilityVector> {
        self.atoms
            .as_ref()
            .map(|a| ProbabilityVector::new(a.iter().map(|x| x.measure.clone()).collect()).expect("atoms sum to 1"))
    }

    /// JSON view; atom data only when `with_atoms`.
    pub fn to_json(&self, with_atoms: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        if !with_atoms {
            if let Some(o) = v.as_object_mut() {
                o.remove("atoms");
            }
        }
        v
    }
}

mod biguint_str {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// `V_{p in F} T^{±p} xi`: each point `x` is labeled by the vector of
/// `xi(T^{±p} x)`.
pub fn exact_join(
    t: &IntervalExchange,
    xi: &IntervalPartition,
    family: &IndexFamily,
    direction: Direction,
    budgets: &Budgets,
) -> Result<JoinResult> {
    let times: Vec<i64> = family
        .members()
        .iter()
        .map(|&p| direction.sign() * p as i64)
        .collect();
    join_over_times(t, xi, &times, budgets)
}

/// Powers `T^t` for every requested time, built by stepping through
/// consecutive powers in each direction.
pub(crate) fn powers_for(t: &IntervalExchange, times: &[i64], budgets: &Budgets) -> Result<BTreeMap<i64, IntervalExchange>> {
    let want: BTreeSet<i64> = times.iter().copied().collect();
    let max_fwd = want.iter().filter(|&&x| x > 0).max().copied().unwrap_or(0) as u64;
    let max_bwd = want.iter().filter(|&&x| x < 0).map(|x| x.unsigned_abs()).max().unwrap_or(0);
    for m in [max_fwd, max_bwd] {
        if m > budgets.max_power {
            return Err(Error::budget("largest power", m, budgets.max_power));
        }
    }
    let mut out = BTreeMap::new();
    if want.contains(&0) {
        out.insert(0, IntervalExchange::identity());
    }
    if max_fwd > 0 {
        for (k, p) in PowerIter::new(t, max_fwd, false)? {
            if want.contains(&(k as i64)) && k > 0 {
                out.insert(k as i64, p);
            }
        }
    }
    if max_bwd > 0 {
        for (k, p) in PowerIter::new(t, max_bwd, true)? {
            if want.contains(&-(k as i64)) && k > 0 {
                out.insert(-(k as i64), p);
            }
        }
    }
    Ok(out)
}

/// Join over arbitrary (possibly negative, possibly zero) times, in the
/// order given: the atom label vector lists `xi(T^t x)` for each `t` in
/// `times`. Duplicate times are allowed and simply repeat a coordinate.
pub fn join_over_times(
    t: &IntervalExchange,
    xi: &IntervalPartition,
    times: &[i64],
    budgets: &Budgets,
) -> Result<JoinResult> {
    if times.is_empty() {
        return Err(Error::validation("join over an empty set of times"));
    }
    if times.len() > budgets.max_family {
        return Err(Error::budget("family size", times.len() as u64, budgets.max_family as u64));
    }
    let powers = powers_for(t, times, budgets)?;

    // every discontinuity of T^t and every pulled-back cut of xi
    let mut cuts: BTreeSet<ExactRational> = BTreeSet::new();
    cuts.insert(rational::zero());
    for p in powers.values() {
        let inv = p.inverse();
        cuts.extend(p.cut_points().iter().cloned());
        cuts.extend(xi.cuts().iter().map(|c| inv.apply_unchecked(c)));
        if cuts.len() > budgets.max_cuts {
            return Err(Error::budget("cut points", cuts.len() as u64, budgets.max_cuts as u64));
        }
    }
    let cuts: Vec<ExactRational> = cuts.into_iter().collect();
    let two = rational::int(2);
    let mids: Vec<ExactRational> = cuts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let end = cuts.get(i + 1).cloned().unwrap_or_else(rational::one);
            (c + end) / &two
        })
        .collect();

    // refine atom ids one time at a time; memory stays O(#gaps)
    let mut ids: Vec<u32> = vec![0; mids.len()];
    for &time in times {
        let p = &powers[&time];
        let labels: Vec<Label> = mids
            .par_iter()
            .map(|m| *xi.label_at(&p.apply_unchecked(m)).expect("images stay in [0,1)"))
            .collect();
        let mut table: HashMap<(u32, Label), u32> = HashMap::new();
        for (id, l) in ids.iter_mut().zip(labels) {
            let next = table.len() as u32;
            *id = *table.entry((*id, l)).or_insert(next);
        }
    }

    let atom_count = ids.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut measures = vec![rational::zero(); atom_count];
    let mut representative: Vec<Option<usize>> = vec![None; atom_count];
    for (g, &id) in ids.iter().enumerate() {
        let end = cuts.get(g + 1).cloned().unwrap_or_else(rational::one);
        measures[id as usize] += end - &cuts[g];
        representative[id as usize].get_or_insert(g);
    }
    let entropy_bits = entropy::entropy_of_masses(&measures);

    let label_vector = |g: usize| -> Vec<Label> {
        times
            .iter()
            .map(|time| *xi.label_at(&powers[time].apply_unchecked(&mids[g])).expect("in [0,1)"))
            .collect()
    };
    let (atoms, partition) = if atom_count.max(cuts.len()) * times.len() <= MAX_MATERIALIZED_LABELS {
        let atom_labels: Vec<Vec<Label>> = representative
            .iter()
            .map(|g| label_vector(g.expect("every atom has a gap")))
            .collect();
        let atoms = atom_labels
            .iter()
            .zip(&measures)
            .map(|(l, m)| JoinAtom {
                labels: l.clone(),
                measure: m.clone(),
            })
            .collect();
        let mut pc = Vec::new();
        let mut pl: Vec<Vec<Label>> = Vec::new();
        for (g, &id) in ids.iter().enumerate() {
            if g == 0 || ids[g - 1] != id {
                pc.push(cuts[g].clone());
                pl.push(atom_labels[id as usize].clone());
            }
        }
        (Some(atoms), IntervalPartition::new(pc, pl).ok())
    } else {
        (None, None)
    };

    Ok(JoinResult {
        method: JoinMethod::Exact,
        family_size: times.len(),
        entropy_bits,
        atom_count: BigUint::from(atom_count),
        ci_half_width: 0.0,
        samples: None,
        atoms,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::seqentropy::family::{make_progression_family, Growth};
    use crate::systems::RotationSpec;

    fn b() -> Budgets {
        Budgets::default()
    }

    #[test]
    fn identity_join_is_xi() {
        let xi = IntervalPartition::from_lengths(&[ratio(1, 3), ratio(1, 6), ratio(1, 2)], vec![0, 1, 0]).unwrap();
        let f = make_progression_family(3, Growth::Constant(4), &b()).unwrap();
        let j = exact_join(&IntervalExchange::identity(), &xi, &f, Direction::Forward, &b()).unwrap();
        assert_eq!(j.entropy_bits, xi.entropy());
        assert_eq!(j.measures().unwrap(), xi.measures());
        assert_eq!(j.atom_count, BigUint::from(2u32));
    }

    #[test]
    fn rotation_single_step_cuts() {
        // cuts {0, 1/2, -a mod 1, 1/2 - a mod 1} with a = 1/5 -> {0, 3/10, 1/2, 4/5}
        let a = ratio(1, 5);
        let t = IntervalExchange::rotation(&a).unwrap();
        let xi = IntervalPartition::halves();
        let f = IndexFamily::explicit(vec![1], &b()).unwrap();
        let j = exact_join(&t, &xi, &f, Direction::Forward, &b()).unwrap();
        let p = j.partition.clone().unwrap();
        assert_eq!(p.cuts(), &[ratio(0, 1), ratio(3, 10), ratio(4, 5)]);
        // [0,3/10) -> label 0, [3/10,4/5) -> 1, [4/5,1) -> 0 (merged by label)
        assert_eq!(j.atom_count, BigUint::from(2u32));
        assert_eq!(j.measures().unwrap().entries(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn rotation_cut_growth() {
        let r = RotationSpec::golden(40).unwrap().to_iet();
        let xi = IntervalPartition::halves();
        for n in [1u64, 5, 17, 40] {
            let f = make_progression_family(1, Growth::Constant(n), &b()).unwrap();
            let j = exact_join(&r, &xi, &f, Direction::Forward, &b()).unwrap();
            assert!(j.atom_count <= BigUint::from(2 * (n + 1)));
            assert!(j.h() <= ((2 * (n + 1)) as f64).log2() / n as f64);
        }
    }

    #[test]
    fn forward_and_backward_entropy_agree() {
        let t = IntervalExchange::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)], vec![2, 1, 0]).unwrap();
        let xi = IntervalPartition::dyadic(2);
        let f = make_progression_family(2, Growth::Constant(6), &b()).unwrap();
        let fw = exact_join(&t, &xi, &f, Direction::Forward, &b()).unwrap();
        let bw = exact_join(&t, &xi, &f, Direction::Backward, &b()).unwrap();
        assert_eq!(fw.entropy_bits, bw.entropy_bits);
    }

    #[test]
    fn cut_budget() {
        let r = RotationSpec::golden(40).unwrap().to_iet();
        let f = make_progression_family(1, Growth::Constant(50), &b()).unwrap();
        let tight = Budgets {
            max_cuts: 20,
            ..Budgets::default()
        };
        let e = exact_join(&r, &IntervalPartition::halves(), &f, Direction::Forward, &tight).unwrap_err();
        assert!(e.is_budget());
    }
}
