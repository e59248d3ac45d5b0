//! Dispatch from a validated config to the library, and output writing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use seqent_core::rational::{self, format_rational};
use seqent_core::seqentropy::{
    asymmetry_ratio, boundary_growth, entropy_trace, sup_over_partitions, Direction, HjOptions, McOptions, Partition,
};
use seqent_core::weaklimits::{
    mixing_time_scan, rigidity_scan, triple_correlation, triple_limit_values, Correlation, ScanReport, WeakOptions,
};
use seqent_core::System;

use crate::config::{ExperimentConfig, ExperimentSpec, Plan};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub started_at_unix: u64,
    pub wall_time_s: f64,
    pub experiment: &'static str,
    /// The config as run, seed override included.
    pub config: ExperimentConfig,
    pub summary: Value,
    pub rows: Value,
    pub warnings: Vec<String>,
}

pub struct RunOutput {
    pub envelope: ResultEnvelope,
    pub csv: String,
    /// Two-column plot data.
    pub dat: String,
}

fn core(field: &str) -> impl Fn(seqent_core::Error) -> CliError + '_ {
    move |e| CliError::from_core(e, field)
}

fn f(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let started_at_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let plan = cfg.plan()?;
    let (summary, rows, csv, dat, mut warnings) = dispatch(cfg, &plan)?;
    let mut all = plan.warnings.clone();
    all.append(&mut warnings);
    Ok(RunOutput {
        envelope: ResultEnvelope {
            tool: "seqent",
            version: env!("CARGO_PKG_VERSION"),
            started_at_unix,
            wall_time_s: clock.elapsed().as_secs_f64(),
            experiment: cfg.experiment.name(),
            config: cfg.clone(),
            summary,
            rows,
            warnings: all,
        },
        csv,
        dat,
    })
}

type Parts = (Value, Value, String, String, Vec<String>);

fn hj_options(cfg: &ExperimentConfig) -> HjOptions {
    HjOptions {
        direction: cfg.direction,
        budgets: cfg.budgets,
        mc: McOptions {
            samples: cfg.mc.samples,
            seed: cfg.seed.unwrap_or(0),
            bootstrap: cfg.mc.bootstrap,
            block: cfg.mc.block,
        },
    }
}

fn weak_options(cfg: &ExperimentConfig) -> WeakOptions {
    WeakOptions {
        budgets: cfg.budgets,
        samples: cfg.mc.samples,
        seed: cfg.seed.unwrap_or(0),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn dispatch(cfg: &ExperimentConfig, plan: &Plan) -> Result<Parts, CliError> {
    let system = &plan.system;
    match &cfg.experiment {
        ExperimentSpec::EntropyTrace { js } | ExperimentSpec::McEntropy { js } => {
            let xi = plan.partition.as_ref().expect("planned");
            let gen = plan.generator.as_ref().expect("planned");
            let trace = entropy_trace(system, xi, gen, js, &hj_options(cfg));
            let csv = trace.to_csv().map_err(|e| CliError::Internal(e.to_string()))?;
            let summary = json!({
                "partition": xi.describe(),
                "max_h": trace.max_h,
                "min_h": trace.min_h,
                "j_range": trace.j_range,
                "complete": trace.is_complete(),
            });
            Ok((summary, to_value(&trace.rows), csv, trace.to_dat(), trace.warnings.clone()))
        }
        ExperimentSpec::SupEnvelope { js, depth } => {
            let gen = plan.generator.as_ref().expect("planned");
            let env = sup_over_partitions(system, *depth, gen, js, &hj_options(cfg)).map_err(core("experiment"))?;
            let mut csv = String::from("j");
            for t in &env.traces {
                write!(csv, ",depth_{}", t.depth).unwrap();
            }
            csv.push_str(",envelope\n");
            let mut dat = String::from("# j envelope\n");
            for (k, (j, e)) in env.envelope.iter().enumerate() {
                write!(csv, "{j}").unwrap();
                for t in &env.traces {
                    write!(csv, ",{}", t.trace.rows[k].h.map(f).unwrap_or_default()).unwrap();
                }
                writeln!(csv, ",{}", e.map(f).unwrap_or_default()).unwrap();
                if let Some(e) = e {
                    writeln!(dat, "{j} {}", f(*e)).unwrap();
                }
            }
            let summary = json!({ "depth": depth, "envelope": env.envelope });
            Ok((summary, to_value(&env.traces), csv, dat, env.warnings.clone()))
        }
        ExperimentSpec::BoundaryGrowth { steps } => {
            let (System::Rectangle(t), Some(Partition::Rectangle(xi))) = (system, &plan.partition) else {
                unreachable!("planned")
            };
            let led = boundary_growth(t, xi, *steps, &cfg.budgets).map_err(core("experiment"))?;
            let inc = led.increments();
            let mut csv = String::from("n,length,length_float,increment,increment_equals_d,join_envelope\n");
            let mut dat = String::from("# n B(n)\n");
            for (n, b) in led.lengths.iter().enumerate() {
                let (i, eq) = match n.checked_sub(1).map(|k| &inc[k]) {
                    Some(d) => (format_rational(d), (d == &led.discontinuity_length).to_string()),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    csv,
                    "{n},{},{},{i},{eq},{}",
                    format_rational(b),
                    f(rational::to_f64(b)),
                    format_rational(&led.join_envelope[n])
                )
                .unwrap();
                writeln!(dat, "{n} {}", f(rational::to_f64(b))).unwrap();
            }
            let summary = json!({
                "discontinuity_length": format_rational(&led.discontinuity_length),
                "image_discontinuity_length": format_rational(&led.image_discontinuity_length),
                "linear_bound_holds": led.linear_bound_holds(),
                "increments_equal_d": led.increments_equal_d,
            });
            let mut warnings = Vec::new();
            if !led.linear_bound_holds() {
                warnings.push("B(n) - B(0) exceeded n D".into());
            }
            Ok((summary, to_value(&led), csv, dat, warnings))
        }
        ExperimentSpec::MixingScan { j, m_cap, .. } => {
            let fam = plan.test_family.as_ref().expect("planned");
            let rep = mixing_time_scan(system, *j, plan.threshold.expect("planned"), *m_cap, fam, &weak_options(cfg))
                .map_err(core("experiment"))?;
            Ok(scan_parts(rep))
        }
        ExperimentSpec::RigidityScan { m_cap, .. } => {
            let fam = plan.test_family.as_ref().expect("planned");
            let rep = rigidity_scan(system, *m_cap, plan.threshold.expect("planned"), fam, &weak_options(cfg))
                .map_err(core("experiment"))?;
            Ok(scan_parts(rep))
        }
        ExperimentSpec::TripleCorrelation { max_lag, .. } => {
            let set = plan.test_set.as_ref().expect("planned");
            let opts = weak_options(cfg);
            let pairs: Vec<(i64, i64)> = (1..=*max_lag).flat_map(|m| (m + 1..=*max_lag).map(move |n| (m, n))).collect();
            let vals: Vec<Correlation> = pairs
                .par_iter()
                .map(|&(m, n)| triple_correlation(system, set, m, n, &opts))
                .collect::<Result<_, _>>()
                .map_err(core("experiment"))?;
            let mut csv = String::from("m,n,value,exact,half_width\n");
            let mut rows = Vec::new();
            for (&(m, n), c) in pairs.iter().zip(&vals) {
                let (exact, hw) = match c {
                    Correlation::Exact { value } => (format_rational(value), 0.0),
                    Correlation::Estimate { half_width, .. } => (String::new(), *half_width),
                };
                writeln!(csv, "{m},{n},{},{exact},{}", f(c.value_f64()), f(hw)).unwrap();
                rows.push(json!({ "m": m, "n": n, "value": c.value_f64(), "exact": exact, "half_width": hw }));
            }
            let mu = set.lebesgue();
            let (forward, backward) = triple_limit_values(&mu);
            let summary = json!({
                "measure": format_rational(&mu),
                "independent_value": format_rational(&(&mu * &mu * &mu)),
                "limit_a_plus_2a3_over_3": format_rational(&forward),
                "limit_a_squared": format_rational(&backward),
            });
            let dat = String::from("# m n value\n")
                + &pairs
                    .iter()
                    .zip(&vals)
                    .map(|(&(m, n), c)| format!("{m} {n} {}\n", f(c.value_f64())))
                    .collect::<String>();
            Ok((summary, Value::Array(rows), csv, dat, Vec::new()))
        }
        ExperimentSpec::AsymmetryRatio { block, m, n } => {
            let (System::Interval(t), Some(Partition::Interval(xi))) = (system, &plan.partition) else {
                unreachable!("planned")
            };
            let mut csv = String::from("direction,ratio\n");
            let mut rows = Vec::new();
            for d in [Direction::Forward, Direction::Backward] {
                let r = asymmetry_ratio(t, xi, *block, *m, *n, d, &cfg.budgets).map_err(core("experiment"))?;
                let name = match d {
                    Direction::Forward => "forward",
                    Direction::Backward => "backward",
                };
                writeln!(csv, "{name},{}", f(r)).unwrap();
                rows.push(json!({ "direction": name, "ratio": r }));
            }
            let summary = json!({ "block": block, "m": m, "n": n });
            let dat = format!("# direction ratio\n0 {}\n1 {}\n", rows[0]["ratio"], rows[1]["ratio"]);
            Ok((summary, Value::Array(rows), csv, dat, Vec::new()))
        }
    }
}

fn scan_parts(rep: ScanReport) -> Parts {
    let csv = rep.to_csv();
    let mut dat = String::from("# m value\n");
    for r in &rep.rows {
        writeln!(dat, "{} {}", r.m, f(r.value)).unwrap();
    }
    let summary = json!({
        "kind": rep.kind,
        "threshold": rep.threshold,
        "family": rep.family,
        "m_range": rep.m_range,
        "first_crossing": rep.first_crossing,
        "event_count": rep.events().count(),
        "truncated_at": rep.truncated_at,
        "convergent_denominators": rep.convergent_denominators,
    });
    (summary, to_value(&rep.rows), csv, dat, rep.warnings)
}

/// Writes `<stem>.csv`, `<stem>.dat` and/or `<stem>.json` into `dir`.
pub fn write_outputs(out: &RunOutput, dir: &Path, stem: &str, format: OutputFormat) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        files.push((dir.join(format!("{stem}.csv")), out.csv.clone()));
        files.push((dir.join(format!("{stem}.dat")), out.dat.clone()));
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let text = serde_json::to_string_pretty(&out.envelope).expect("envelope serializes");
        files.push((dir.join(format!("{stem}.json")), text + "\n"));
    }
    for (p, text) in &files {
        std::fs::write(p, text).map_err(|e| CliError::Internal(format!("{}: {e}", p.display())))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
