//! `h_j` dispatch, traces over a range of `j` and the dyadic partition
//! library envelope.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{IntervalPartition, RectanglePartition};
use crate::seqentropy::bernoulli::bernoulli_join_entropy;
use crate::seqentropy::family::{FamilyGenerator, IndexFamily};
use crate::seqentropy::join::{exact_join, JoinMethod, JoinResult};
use crate::seqentropy::mc::{mc_join_entropy, McOptions};
use crate::seqentropy::{Budgets, Direction};
use crate::systems::{Baker, System};

/// The partition `xi` a join is taken over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partition {
    Interval(IntervalPartition),
    Rectangle(RectanglePartition),
    /// Symbols at coordinates `0..window` of a Bernoulli shift.
    Cylinder { window: u32 },
}

impl Partition {
    /// Number of distinct labels.
    pub fn label_count(&self, system: &System) -> usize {
        match self {
            Partition::Interval(p) => p.label_count(),
            Partition::Rectangle(p) => p.label_count(),
            Partition::Cylinder { window } => match system {
                System::Bernoulli(b) => b.symbol_count().pow(*window),
                _ => 0,
            },
        }
    }

    /// Dyadic partition of the given depth suited to `system`: `depth` equal
    /// intervals' worth of binary digits, split between the axes for planar
    /// systems (x gets the extra digit).
    pub fn dyadic_for(system: &System, depth: u32) -> Partition {
        match system {
            System::Interval(_) => Partition::Interval(IntervalPartition::dyadic(depth)),
            System::Rectangle(_) => Partition::Rectangle(RectanglePartition::dyadic_grid(depth.div_ceil(2), depth / 2)),
            System::Bernoulli(_) => Partition::Cylinder { window: depth },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Partition::Interval(p) => format!("interval partition, {} gaps", p.gap_count()),
            Partition::Rectangle(p) => format!("rectangle partition, {} atoms", p.atoms().len()),
            Partition::Cylinder { window } => format!("cylinder window {window}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HjOptions {
    pub direction: Direction,
    pub budgets: Budgets,
    pub mc: McOptions,
}

/// `H(join) / |F|`, with the join computed exactly, symbolically or by
/// sampling depending on the system and partition.
pub fn h_j(system: &System, xi: &Partition, family: &IndexFamily, opts: &HjOptions) -> Result<JoinResult> {
    let d = opts.direction;
    match (system, xi) {
        (System::Interval(t), Partition::Interval(p)) => exact_join(t, p, family, d, &opts.budgets),
        (System::Bernoulli(b), Partition::Cylinder { window }) => {
            if family.len() > opts.budgets.max_family {
                return Err(Error::budget(
                    "family size",
                    family.len() as u64,
                    opts.budgets.max_family as u64,
                ));
            }
            bernoulli_join_entropy(b, family, *window, d)
        }
        (System::Rectangle(t), Partition::Rectangle(p)) => mc_join_entropy(t, p, family, d, &opts.mc, &opts.budgets),
        (System::Bernoulli(b), Partition::Rectangle(p)) if b.has_planar_realization() => {
            mc_join_entropy(&Baker::default(), p, family, d, &opts.mc, &opts.budgets)
        }
        (s, p) => Err(Error::Unsupported(format!(
            "no join method for a {} with a {}",
            s.name(),
            p.describe()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub j: u64,
    pub family_size: usize,
    pub max_member: u64,
    pub entropy_bits: Option<f64>,
    pub h: Option<f64>,
    pub method: Option<JoinMethod>,
    pub ci_half_width: Option<f64>,
    pub atom_count: Option<String>,
    pub truncated: bool,
    pub error: Option<String>,
}

impl EntropyRow {
    fn failed(j: u64, e: &Error) -> Self {
        EntropyRow {
            j,
            family_size: 0,
            max_member: 0,
            entropy_bits: None,
            h: None,
            method: None,
            ci_half_width: None,
            atom_count: None,
            truncated: false,
            error: Some(e.to_string()),
        }
    }
}

/// Rows for each `j` plus the finite-range proxies: the max and min of
/// `h_j` over the rows that succeeded. These are proxies for `limsup` and
/// `liminf` over the printed range only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    pub rows: Vec<EntropyRow>,
    pub j_range: (u64, u64),
    pub max_h: Option<f64>,
    pub min_h: Option<f64>,
    pub warnings: Vec<String>,
}

impl EntropyTrace {
    fn from_rows(rows: Vec<EntropyRow>) -> Self {
        let hs: Vec<f64> = rows.iter().filter_map(|r| r.h).collect();
        let max_h = hs.iter().copied().reduce(f64::max);
        let min_h = hs.iter().copied().reduce(f64::min);
        let j_range = (
            rows.first().map_or(0, |r| r.j),
            rows.last().map_or(0, |r| r.j),
        );
        let mut warnings = Vec::new();
        if !rows.is_empty() {
            warnings.push(format!(
                "max/min of h_j are taken over j in [{}, {}] only; they are not limits",
                j_range.0, j_range.1
            ));
        }
        for r in &rows {
            if r.truncated {
                warnings.push(format!("family for j = {} was truncated by its exponent cap", r.j));
            }
            if let Some(e) = &r.error {
                warnings.push(format!("row j = {} failed: {e}", r.j));
            }
        }
        EntropyTrace {
            rows,
            j_range,
            max_h,
            min_h,
            warnings,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_none())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "j",
            "family_size",
            "max_member",
            "entropy_bits",
            "h_j",
            "method",
            "ci_half_width",
            "atom_count",
            "truncated",
            "error",
        ])
        .map_err(csv_err)?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.17e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.j.to_string(),
                r.family_size.to_string(),
                r.max_member.to_string(),
                opt(r.entropy_bits),
                opt(r.h),
                r.method.map(|m| m.as_str().to_string()).unwrap_or_default(),
                opt(r.ci_half_width),
                r.atom_count.clone().unwrap_or_default(),
                r.truncated.to_string(),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Unsupported(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Two-column `j h_j` data.
    pub fn to_dat(&self) -> String {
        let mut s = String::from("# j h_j\n");
        for r in &self.rows {
            if let Some(h) = r.h {
                s.push_str(&format!("{} {:.17e}\n", r.j, h));
            }
        }
        s
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Unsupported(format!("csv output failed: {e}"))
}

/// `h_j` for each `j` in `js`. Rows that fail carry their error; the rest of
/// the trace is still returned.
pub fn entropy_trace(
    system: &System,
    xi: &Partition,
    generator: &FamilyGenerator,
    js: &[u64],
    opts: &HjOptions,
) -> EntropyTrace {
    let rows: Vec<EntropyRow> = js
        .par_iter()
        .map(|&j| {
            let family = match generator.family(j, &opts.budgets) {
                Ok(f) => f,
                Err(e) => return EntropyRow::failed(j, &e),
            };
            match h_j(system, xi, &family, opts) {
                Ok(r) => EntropyRow {
                    j,
                    family_size: family.len(),
                    max_member: family.max(),
                    entropy_bits: Some(r.entropy_bits),
                    h: Some(r.h()),
                    method: Some(r.method),
                    ci_half_width: Some(r.ci_half_width),
                    atom_count: Some(r.atom_count.to_string()),
                    truncated: family.truncated(),
                    error: None,
                },
                Err(e) => {
                    let mut row = EntropyRow::failed(j, &e);
                    row.family_size = family.len();
                    row.max_member = family.max();
                    row.truncated = family.truncated();
                    row
                }
            }
        })
        .collect();
    EntropyTrace::from_rows(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryTrace {
    pub depth: u32,
    pub trace: EntropyTrace,
}

/// Traces for the dyadic library at depths `1..=depth` and their pointwise
/// max. The envelope is a lower bound for the sup over all partitions, not
/// that sup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEnvelope {
    pub traces: Vec<LibraryTrace>,
    /// `(j, max over the library of h_j)`; `None` where every member failed.
    pub envelope: Vec<(u64, Option<f64>)>,
    pub warnings: Vec<String>,
}

pub fn sup_over_partitions(
    system: &System,
    depth: u32,
    generator: &FamilyGenerator,
    js: &[u64],
    opts: &HjOptions,
) -> Result<SupEnvelope> {
    if depth == 0 {
        return Err(Error::validation("partition library depth must be at least 1"));
    }
    let traces: Vec<LibraryTrace> = (1..=depth)
        .map(|d| LibraryTrace {
            depth: d,
            trace: entropy_trace(system, &Partition::dyadic_for(system, d), generator, js, opts),
        })
        .collect();
    let envelope = js
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let best = traces.iter().filter_map(|t| t.trace.rows[i].h).reduce(f64::max);
            (j, best)
        })
        .collect();
    let mut warnings = vec![format!(
        "envelope over dyadic partitions of depth 1..={depth}; it bounds the sup over all partitions from below"
    )];
    for t in &traces {
        warnings.extend(t.trace.warnings.iter().skip(1).map(|w| format!("depth {}: {w}", t.depth)));
    }
    Ok(SupEnvelope {
        traces,
        envelope,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqentropy::family::Growth;
    use crate::systems::{BernoulliSystem, IntervalExchange, RotationSpec};

    #[test]
    fn identity_trace_decreases() {
        let sys = System::Interval(IntervalExchange::identity());
        let xi = Partition::Interval(IntervalPartition::halves());
        let g = FamilyGenerator::Progression { growth: Growth::Linear };
        let t = entropy_trace(&sys, &xi, &g, &[1, 2, 3, 4, 5], &HjOptions::default());
        let hs: Vec<f64> = t.rows.iter().map(|r| r.h.unwrap()).collect();
        assert_eq!(hs, vec![1.0, 0.5, 1.0 / 3.0, 0.25, 0.2]);
        assert_eq!(t.max_h, Some(1.0));
        assert_eq!(t.min_h, Some(0.2));
    }

    #[test]
    fn bernoulli_rows_are_one_bit() {
        let sys = System::Bernoulli(BernoulliSystem::fair());
        let g = FamilyGenerator::Progression { growth: Growth::Linear };
        let t = entropy_trace(&sys, &Partition::Cylinder { window: 1 }, &g, &[2, 4, 8], &HjOptions::default());
        assert!(t.rows.iter().all(|r| r.h == Some(1.0)));
        assert_eq!(t.max_h, t.min_h);
    }

    #[test]
    fn rotation_trace_matches_arc_count() {
        // reference values from an independent arc enumeration
        let sys = System::Interval(RotationSpec::golden(40).unwrap().to_iet());
        let xi = Partition::Interval(IntervalPartition::halves());
        let g = FamilyGenerator::Progression { growth: Growth::Linear };
        let t = entropy_trace(&sys, &xi, &g, &[4, 8, 16, 32], &HjOptions::default());
        let want = [0.479_050_916_932_346, 0.493_761_730_934_409, 0.275_728_392_116_508, 0.169_279_635_657_768];
        for (r, w) in t.rows.iter().zip(want) {
            assert!((r.h.unwrap() - w).abs() < 1e-12);
            assert!(r.h.unwrap() <= ((4 * r.j) as f64).log2() / r.j as f64);
        }
    }

    #[test]
    fn failing_rows_are_kept() {
        let sys = System::Interval(RotationSpec::golden(40).unwrap().to_iet());
        let xi = Partition::Interval(IntervalPartition::halves());
        let g = FamilyGenerator::Geometric { cap: 70 };
        let t = entropy_trace(&sys, &xi, &g, &[2, 3, 9], &HjOptions::default());
        assert!(t.rows[0].error.is_none());
        assert!(t.rows[2].error.is_some());
        assert!(!t.is_complete());
        assert!(t.to_csv().unwrap().lines().count() == 4);
    }

    #[test]
    fn bernoulli_library_envelope() {
        let sys = System::Bernoulli(BernoulliSystem::fair());
        let g = FamilyGenerator::Progression { growth: Growth::Linear };
        let s = sup_over_partitions(&sys, 2, &g, &[2, 3, 4], &HjOptions::default()).unwrap();
        assert!(s.envelope.iter().all(|(_, h)| *h == Some(2.0)));
    }

    #[test]
    fn unsupported_pairs() {
        let sys = System::Interval(IntervalExchange::identity());
        let f = IndexFamily::explicit(vec![1], &Budgets::default()).unwrap();
        let e = h_j(&sys, &Partition::Cylinder { window: 1 }, &f, &HjOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Unsupported(_)));
    }
}
