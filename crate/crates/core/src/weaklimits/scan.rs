//! Mixing-time and rigidity scans over `m`.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::iet::PowerIter;
use crate::systems::rotation::{continued_fraction, convergents};
use crate::systems::System;
use crate::weaklimits::correlation::WeakOptions;
use crate::weaklimits::distance::{CorrelationTable, DistanceEngine};
use crate::weaklimits::family::TestFamily;

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// `dist_to_theta > r` for `m > j`.
    Mixing,
    /// `dist_to_identity < eps`.
    Rigidity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: i64,
    pub value: f64,
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    pub threshold: f64,
    pub system: String,
    pub family: String,
    /// Scanned `m`, inclusive at both ends.
    pub m_range: (i64, i64),
    pub rows: Vec<ScanRow>,
    /// Mixing: the first `m > j` with `dist_to_theta > r`.
    pub first_crossing: Option<i64>,
    /// Set when the requested cap was lowered to the alias horizon.
    pub truncated_at: Option<i64>,
    /// Rotations only: convergent denominators in range, with detection flag.
    pub convergent_denominators: Option<Vec<(i64, bool)>>,
    pub warnings: Vec<String>,
}

impl ScanReport {
    pub fn events(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.event)
    }

    pub fn event_times(&self) -> Vec<i64> {
        self.events().map(|r| r.m).collect()
    }

    pub fn value_at(&self, m: i64) -> Option<f64> {
        self.rows.iter().find(|r| r.m == m).map(|r| r.value)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,value,event\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.17e},{}\n", r.m, r.value, u8::from(r.event)));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Scans `m in (j, m_cap]` for `dist_to_theta(T, m) > r`; `first_crossing`
/// is the minimal such `m`.
pub fn mixing_time_scan(
    system: &System,
    j: i64,
    r: f64,
    m_cap: i64,
    family: &TestFamily,
    opts: &WeakOptions,
) -> Result<ScanReport> {
    if j < 0 {
        return Err(Error::validation("mixing scan needs j >= 0"));
    }
    if !(r >= 0.0) {
        return Err(Error::validation("threshold r must be nonnegative"));
    }
    let mut rep = scan(system, j + 1, m_cap, family, opts, ScanKind::Mixing, r)?;
    let first = rep.events().next().map(|e| e.m);
    rep.first_crossing = first;
    Ok(rep)
}

/// Scans `m in [1, m_cap]` for `dist_to_identity(T, m) < eps`.
pub fn rigidity_scan(system: &System, m_cap: i64, eps: f64, family: &TestFamily, opts: &WeakOptions) -> Result<ScanReport> {
    if !(eps > 0.0) {
        return Err(Error::validation("rigidity threshold must be positive"));
    }
    let mut rep = scan(system, 1, m_cap, family, opts, ScanKind::Rigidity, eps)?;
    if let System::Interval(t) = system {
        if t.interval_count() == 2 && t.permutation() == [1, 0] {
            let cf = continued_fraction(&t.lengths()[1]);
            let (lo, hi) = rep.m_range;
            let dens: Vec<(i64, bool)> = convergents(&cf)
                .into_iter()
                .filter_map(|(_, q)| q.to_i64())
                .filter(|&q| q >= lo && q <= hi)
                .map(|q| (q, rep.rows[(q - lo) as usize].event))
                .collect();
            let missed = dens.iter().filter(|d| !d.1).count();
            if missed > 0 {
                rep.warnings.push(format!(
                    "{missed} of {} convergent denominators in range are not rigidity times at eps = {eps}",
                    dens.len()
                ));
            }
            rep.convergent_denominators = Some(dens);
        }
    }
    Ok(rep)
}

fn scan(
    system: &System,
    lo: i64,
    m_cap: i64,
    family: &TestFamily,
    opts: &WeakOptions,
    kind: ScanKind,
    threshold: f64,
) -> Result<ScanReport> {
    if family.len() > opts.budgets.max_family {
        return Err(Error::budget("family", family.len() as u64, opts.budgets.max_family as u64));
    }
    if m_cap < lo {
        return Err(Error::validation(format!("scan cap {m_cap} is below the first time {lo}")));
    }
    if m_cap as u64 > opts.budgets.max_power {
        return Err(Error::budget("power", m_cap as u64, opts.budgets.max_power));
    }
    let mut warnings = Vec::new();
    let mut hi = m_cap;
    let mut truncated_at = None;
    if let System::Interval(t) = system {
        if let Some(g) = t.guard() {
            let horizon = (g.horizon() / g.time.max(1)).to_i64().unwrap_or(i64::MAX);
            if horizon < hi {
                if horizon < lo {
                    return Err(Error::Aliasing {
                        time: lo as u64,
                        intervals: g.base_intervals,
                        denominator: g.denominator.to_string(),
                        safety_factor: crate::systems::iet::ALIAS_SAFETY_FACTOR,
                    });
                }
                warnings.push(format!(
                    "scan cap {m_cap} lowered to {horizon}: later powers would alias the rational approximation"
                ));
                hi = horizon;
                truncated_at = Some(horizon);
            }
        }
    }
    if matches!(system, System::Rectangle(_)) {
        warnings.push(format!(
            "rectangle exchange: correlations are Monte Carlo estimates from {} samples",
            opts.samples
        ));
    }
    let engine = DistanceEngine::new(system, family, opts)?;
    let measure = |tab: &CorrelationTable| match kind {
        ScanKind::Mixing => engine.theta_distance(tab).value,
        ScanKind::Rigidity => engine.identity_distance(tab).value,
    };
    let mut values = Vec::with_capacity((hi - lo + 1) as usize);
    match system {
        System::Interval(t) => {
            let mut powers = PowerIter::new(t, hi as u64, false)?.skip(lo as usize);
            loop {
                let chunk: Vec<_> = powers.by_ref().take(CHUNK).collect();
                if chunk.is_empty() {
                    break;
                }
                let vals: Vec<f64> = chunk
                    .par_iter()
                    .map(|(_, p)| crate::weaklimits::distance::iet_table(p, family).map(|tab| measure(&tab)))
                    .collect::<Result<_>>()?;
                values.extend(vals);
            }
        }
        _ => {
            let vals: Vec<f64> = (lo..=hi)
                .into_par_iter()
                .map(|m| engine.table(m).map(|tab| measure(&tab)))
                .collect::<Result<_>>()?;
            values = vals;
        }
    }
    let rows = (lo..=hi)
        .zip(values)
        .map(|(m, value)| ScanRow {
            m,
            value,
            event: match kind {
                ScanKind::Mixing => value > threshold,
                ScanKind::Rigidity => value < threshold,
            },
        })
        .collect();
    Ok(ScanReport {
        kind,
        threshold,
        system: system.name().into(),
        family: family.describe(),
        m_range: (lo, hi),
        rows,
        first_crossing: None,
        truncated_at,
        convergent_denominators: None,
        warnings,
    })
}
