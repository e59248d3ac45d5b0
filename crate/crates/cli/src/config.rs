//! Experiment configs: TOML with every measure given as an exact fraction
//! string.

use serde::{Deserialize, Serialize};

use seqent_core::geometry::Point;
use seqent_core::rational::{self, ExactRational};
use seqent_core::seqentropy::{Budgets, Direction, FamilyGenerator, Growth, Partition};
use seqent_core::systems::rect::rect_validate;
use seqent_core::weaklimits::{TestFamily, TestSet};
use seqent_core::{
    BernoulliSystem, IntervalExchange, IntervalPartition, ProbabilityVector, Rect, RectangleExchange,
    RectanglePartition, RotationSpec, System,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub direction: Direction,
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    Identity,
    Iet {
        lengths: Vec<String>,
        permutation: Vec<usize>,
    },
    /// Guarded rotation by a rational stand-in `alpha`.
    Rotation {
        alpha: String,
    },
    ContinuedFraction {
        coefficients: Vec<u64>,
    },
    /// `F_ones / F_{ones+1}`.
    Golden {
        ones: usize,
    },
    Rect {
        sources: Vec<[String; 4]>,
        translations: Vec<[String; 2]>,
    },
    VerticalSwap,
    ProductRotation {
        alpha: String,
        beta: String,
    },
    Bernoulli {
        masses: Vec<String>,
    },
    /// The fair coin with its planar model.
    Baker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PartitionSpec {
    Dyadic {
        depth: u32,
    },
    Cuts {
        cuts: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<u32>>,
    },
    Rectangles {
        rects: Vec<[String; 4]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<u32>>,
    },
    Cylinder {
        window: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// `L(j)` from `c`, `j`, `j^2`, `c*j`.
    Progression { growth: String },
    Geometric { cap: u32 },
    Explicit { members: Vec<u64> },
}

fn default_test_depth() -> u32 {
    6
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    EntropyTrace {
        js: Vec<u64>,
    },
    SupEnvelope {
        js: Vec<u64>,
        depth: u32,
    },
    BoundaryGrowth {
        steps: usize,
    },
    MixingScan {
        j: i64,
        r: String,
        m_cap: i64,
        #[serde(default = "default_test_depth")]
        test_depth: u32,
    },
    RigidityScan {
        eps: String,
        m_cap: i64,
        #[serde(default = "default_test_depth")]
        test_depth: u32,
    },
    /// All `1 <= m < n <= max_lag`.
    TripleCorrelation {
        set: Vec<String>,
        max_lag: i64,
    },
    AsymmetryRatio {
        block: u64,
        m: u64,
        n: u64,
    },
    McEntropy {
        js: Vec<u64>,
    },
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::EntropyTrace { .. } => "entropy-trace",
            ExperimentSpec::SupEnvelope { .. } => "sup-envelope",
            ExperimentSpec::BoundaryGrowth { .. } => "boundary-growth",
            ExperimentSpec::MixingScan { .. } => "mixing-scan",
            ExperimentSpec::RigidityScan { .. } => "rigidity-scan",
            ExperimentSpec::TripleCorrelation { .. } => "triple-correlation",
            ExperimentSpec::AsymmetryRatio { .. } => "asymmetry-ratio",
            ExperimentSpec::McEntropy { .. } => "mc-entropy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSpec {
    pub samples: usize,
    pub bootstrap: usize,
    pub block: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            samples: 10_000,
            bootstrap: 200,
            block: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// A validated config with its objects built.
pub struct Plan {
    pub system: System,
    pub partition: Option<Partition>,
    pub generator: Option<FamilyGenerator>,
    pub test_family: Option<TestFamily>,
    pub test_set: Option<TestSet>,
    pub threshold: Option<f64>,
    /// Predicted work, printed by `validate`.
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Stochastic experiments need a seed.
    pub fn is_monte_carlo(&self) -> bool {
        match &self.experiment {
            ExperimentSpec::McEntropy { .. } => true,
            ExperimentSpec::EntropyTrace { .. } | ExperimentSpec::SupEnvelope { .. } => {
                matches!(self.system, SystemSpec::Rect { .. } | SystemSpec::VerticalSwap | SystemSpec::ProductRotation { .. })
                    || matches!(self.partition, Some(PartitionSpec::Rectangles { .. }))
            }
            ExperimentSpec::MixingScan { .. }
            | ExperimentSpec::RigidityScan { .. }
            | ExperimentSpec::TripleCorrelation { .. } => {
                matches!(self.system, SystemSpec::Rect { .. } | SystemSpec::VerticalSwap | SystemSpec::ProductRotation { .. })
            }
            _ => false,
        }
    }

    pub fn plan(&self) -> Result<Plan, CliError> {
        if !self.budgets.within_hard_limits() {
            return Err(CliError::Budget(format!(
                "budgets: {:?} exceed the hard limits {:?}",
                self.budgets,
                Budgets::hard_limits()
            )));
        }
        if self.is_monte_carlo() && self.seed.is_none() {
            return Err(CliError::Validation(format!(
                "seed: experiment '{}' samples points and needs a seed (config `seed` or --seed)",
                self.experiment.name()
            )));
        }
        if self.mc.samples > self.budgets.max_samples {
            return Err(CliError::Budget(format!(
                "mc.samples: {} > budget {}",
                self.mc.samples, self.budgets.max_samples
            )));
        }
        let system = build_system(&self.system)?;
        let partition = self.partition.as_ref().map(|p| build_partition(p, &system)).transpose()?;
        let generator = self.family.as_ref().map(build_generator).transpose()?;
        let mut plan = Plan {
            system,
            partition,
            generator,
            test_family: None,
            test_set: None,
            threshold: None,
            notes: Vec::new(),
            warnings: Vec::new(),
        };
        self.check_experiment(&mut plan)?;
        Ok(plan)
    }

    fn need_partition<'a>(&self, plan: &'a Plan) -> Result<&'a Partition, CliError> {
        plan.partition
            .as_ref()
            .ok_or_else(|| CliError::Validation(format!("partition: required by '{}'", self.experiment.name())))
    }

    fn need_family<'a>(&self, plan: &'a Plan) -> Result<&'a FamilyGenerator, CliError> {
        plan.generator
            .as_ref()
            .ok_or_else(|| CliError::Validation(format!("family: required by '{}'", self.experiment.name())))
    }

    fn check_experiment(&self, plan: &mut Plan) -> Result<(), CliError> {
        match &self.experiment {
            ExperimentSpec::EntropyTrace { js } | ExperimentSpec::McEntropy { js } => {
                let xi = self.need_partition(plan)?.clone();
                let generator = self.need_family(plan)?.clone();
                if js.is_empty() {
                    return Err(CliError::Validation("experiment.js: empty".into()));
                }
                if matches!(self.experiment, ExperimentSpec::McEntropy { .. }) && !matches!(xi, Partition::Rectangle(_)) {
                    return Err(CliError::Validation(
                        "partition: mc-entropy samples planar maps and needs a rectangle partition".into(),
                    ));
                }
                self.predict_joins(plan, &xi, &generator, js)?;
            }
            ExperimentSpec::SupEnvelope { js, depth } => {
                let generator = self.need_family(plan)?.clone();
                if *depth == 0 || *depth > 12 {
                    return Err(CliError::Validation(format!("experiment.depth: {depth} not in 1..=12")));
                }
                for d in 1..=*depth {
                    let xi = Partition::dyadic_for(&plan.system, d);
                    self.predict_joins(plan, &xi, &generator, js)?;
                }
            }
            ExperimentSpec::BoundaryGrowth { steps } => {
                if !matches!(plan.system, System::Rectangle(_)) {
                    return Err(CliError::Validation("system: boundary-growth needs a rectangle exchange".into()));
                }
                if !matches!(self.need_partition(plan)?, Partition::Rectangle(_)) {
                    return Err(CliError::Validation("partition: boundary-growth needs a rectangle partition".into()));
                }
                if *steps as u64 > self.budgets.max_power {
                    return Err(CliError::Budget(format!(
                        "experiment.steps: {steps} > budget {}",
                        self.budgets.max_power
                    )));
                }
            }
            ExperimentSpec::MixingScan { r, m_cap, test_depth, j } => {
                plan.threshold = Some(rational::to_f64(&fraction("experiment.r", r)?));
                if *j < 0 {
                    return Err(CliError::Validation("experiment.j: must be >= 0".into()));
                }
                self.scan_checks(plan, *m_cap, *test_depth)?;
            }
            ExperimentSpec::RigidityScan { eps, m_cap, test_depth } => {
                let e = fraction("experiment.eps", eps)?;
                if e <= rational::zero() {
                    return Err(CliError::Validation("experiment.eps: must be positive".into()));
                }
                plan.threshold = Some(rational::to_f64(&e));
                self.scan_checks(plan, *m_cap, *test_depth)?;
            }
            ExperimentSpec::TripleCorrelation { set, max_lag } => {
                let s = test_set("experiment.set", set)?;
                let planar = matches!(plan.system, System::Rectangle(_) | System::Bernoulli(_));
                if planar != matches!(s, TestSet::Rect(_)) {
                    return Err(CliError::Validation(
                        "experiment.set: give 2 endpoints for interval systems, 4 for planar ones".into(),
                    ));
                }
                if *max_lag < 2 {
                    return Err(CliError::Validation("experiment.max_lag: needs at least 2".into()));
                }
                self.horizon_check(plan, *max_lag as u64, "experiment.max_lag")?;
                plan.test_set = Some(s);
            }
            ExperimentSpec::AsymmetryRatio { block, m, n } => {
                if !matches!(plan.system, System::Interval(_)) {
                    return Err(CliError::Validation("system: asymmetry-ratio needs an interval exchange".into()));
                }
                if !matches!(self.need_partition(plan)?, Partition::Interval(_)) {
                    return Err(CliError::Validation("partition: asymmetry-ratio needs an interval partition".into()));
                }
                let reach = block + m.max(n);
                self.horizon_check(plan, reach, "experiment.block + max(m, n)")?;
            }
        }
        Ok(())
    }

    fn scan_checks(&self, plan: &mut Plan, m_cap: i64, depth: u32) -> Result<(), CliError> {
        if m_cap < 1 {
            return Err(CliError::Validation("experiment.m_cap: must be positive".into()));
        }
        if m_cap as u64 > self.budgets.max_power {
            return Err(CliError::Budget(format!(
                "experiment.m_cap: {m_cap} > power budget {}",
                self.budgets.max_power
            )));
        }
        let fam = match plan.system {
            System::Interval(_) => TestFamily::dyadic_1d(depth),
            _ => TestFamily::dyadic_2d(depth),
        }
        .map_err(|e| CliError::Validation(format!("experiment.test_depth: {e}")))?;
        if fam.len() > self.budgets.max_family {
            return Err(CliError::Budget(format!(
                "experiment.test_depth: {} test sets > family budget {}",
                fam.len(),
                self.budgets.max_family
            )));
        }
        if let System::Interval(t) = &plan.system {
            if let Some(g) = t.guard() {
                if g.check(g.time * m_cap as u64).is_err() {
                    plan.warnings.push(format!(
                        "experiment.m_cap: {m_cap} exceeds the alias horizon {}; the scan stops there",
                        g.horizon()
                    ));
                }
            }
        }
        plan.notes.push(format!(
            "scan of {m_cap} lags over {} ({} correlations per lag)",
            fam.describe(),
            fam.len() * fam.len()
        ));
        plan.test_family = Some(fam);
        Ok(())
    }

    fn horizon_check(&self, plan: &Plan, time: u64, field: &str) -> Result<(), CliError> {
        if time > self.budgets.max_power {
            return Err(CliError::Budget(format!(
                "{field}: time {time} > power budget {}",
                self.budgets.max_power
            )));
        }
        if let System::Interval(t) = &plan.system {
            if let Some(g) = t.guard() {
                if let Err(e) = g.check(time) {
                    let ratio = time as f64 * g.base_intervals as f64 * 1000.0
                        / g.denominator.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
                    return Err(CliError::Budget(format!("{field}: {e} (guard ratio {ratio:.3})")));
                }
            }
        }
        Ok(())
    }

    /// Budget estimate for the joins of a trace: family sizes, the largest
    /// power, and an upper bound on cut points for exact interval joins.
    fn predict_joins(&self, plan: &mut Plan, xi: &Partition, generator: &FamilyGenerator, js: &[u64]) -> Result<(), CliError> {
        for &j in js {
            let fam = generator
                .family(j, &self.budgets)
                .map_err(|e| wrap(&format!("family (j = {j})"), e))?;
            self.horizon_check(plan, fam.max(), &format!("family (j = {j}) largest member"))?;
            if let (System::Interval(t), Partition::Interval(p)) = (&plan.system, xi) {
                let rotation = t.interval_count() == 2 && t.permutation() == [1, 0];
                let per_power = |p: u64| -> u128 {
                    if rotation {
                        1
                    } else {
                        p as u128 * (t.interval_count() as u128 - 1)
                    }
                };
                let cuts: u128 = fam
                    .members()
                    .iter()
                    .map(|&m| (p.gap_count() as u128 - 1) + per_power(m))
                    .sum();
                plan.notes.push(format!(
                    "j = {j}: {} members, largest {}, at most {cuts} cut points",
                    fam.len(),
                    fam.max()
                ));
                if cuts > self.budgets.max_cuts as u128 {
                    plan.warnings.push(format!(
                        "j = {j}: cut-point bound {cuts} exceeds max_cuts {}; the row may fail",
                        self.budgets.max_cuts
                    ));
                }
            } else {
                plan.notes.push(format!("j = {j}: {} members, largest {}", fam.len(), fam.max()));
            }
        }
        Ok(())
    }
}

fn wrap(field: &str, e: seqent_core::Error) -> CliError {
    CliError::from_core(e, field)
}

pub fn fraction(field: &str, s: &str) -> Result<ExactRational, CliError> {
    rational::parse_rational(s).map_err(|e| CliError::Validation(format!("{field}: \"{s}\": {e}")))
}

fn fractions(field: &str, xs: &[String]) -> Result<Vec<ExactRational>, CliError> {
    xs.iter()
        .enumerate()
        .map(|(i, s)| fraction(&format!("{field}[{i}]"), s))
        .collect()
}

fn rect(field: &str, r: &[String; 4]) -> Result<Rect, CliError> {
    let v = fractions(field, r)?;
    let [x0, x1, y0, y1]: [ExactRational; 4] = v.try_into().expect("four");
    Ok(Rect::new(x0, x1, y0, y1))
}

fn test_set(field: &str, s: &[String]) -> Result<TestSet, CliError> {
    let v = fractions(field, s)?;
    let set = match v.len() {
        2 => TestSet::interval(v[0].clone(), v[1].clone()),
        4 => TestSet::Rect(Rect::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())),
        k => return Err(CliError::Validation(format!("{field}: {k} endpoints; expected 2 or 4"))),
    };
    if set.lebesgue() <= rational::zero() || !set.as_rect().within_unit_square() {
        return Err(CliError::Validation(format!("{field}: empty or outside the unit square")));
    }
    Ok(set)
}

pub fn build_system(spec: &SystemSpec) -> Result<System, CliError> {
    fn core(field: &'static str) -> impl Fn(seqent_core::Error) -> CliError {
        move |e| wrap(field, e)
    }
    Ok(match spec {
        SystemSpec::Identity => System::Interval(IntervalExchange::identity()),
        SystemSpec::Iet { lengths, permutation } => System::Interval(
            IntervalExchange::new(fractions("system.lengths", lengths)?, permutation.clone()).map_err(core("system"))?,
        ),
        SystemSpec::Rotation { alpha } => System::Interval(
            RotationSpec::from_alpha(fraction("system.alpha", alpha)?)
                .map_err(core("system.alpha"))?
                .to_iet(),
        ),
        SystemSpec::ContinuedFraction { coefficients } => System::Interval(
            RotationSpec::from_continued_fraction(coefficients.clone())
                .map_err(core("system.coefficients"))?
                .to_iet(),
        ),
        SystemSpec::Golden { ones } => {
            System::Interval(RotationSpec::golden(*ones).map_err(core("system.ones"))?.to_iet())
        }
        SystemSpec::Rect { sources, translations } => {
            let src: Vec<Rect> = sources
                .iter()
                .enumerate()
                .map(|(i, r)| rect(&format!("system.sources[{i}]"), r))
                .collect::<Result<_, _>>()?;
            let tr: Vec<Point> = translations
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let f = format!("system.translations[{i}]");
                    Ok((fraction(&f, &t[0])?, fraction(&f, &t[1])?))
                })
                .collect::<Result<_, CliError>>()?;
            rect_validate(&src, &tr).map_err(|e| CliError::Validation(format!("system: tiling: {e}")))?;
            System::Rectangle(RectangleExchange::new(src, tr).map_err(core("system"))?)
        }
        SystemSpec::VerticalSwap => System::Rectangle(RectangleExchange::vertical_swap()),
        SystemSpec::ProductRotation { alpha, beta } => System::Rectangle(
            RectangleExchange::product_rotation(&fraction("system.alpha", alpha)?, &fraction("system.beta", beta)?)
                .map_err(core("system"))?,
        ),
        SystemSpec::Bernoulli { masses } => {
            let p = ProbabilityVector::new(fractions("system.masses", masses)?).map_err(core("system.masses"))?;
            System::Bernoulli(BernoulliSystem::new(p).map_err(core("system.masses"))?)
        }
        SystemSpec::Baker => System::Bernoulli(BernoulliSystem::fair()),
    })
}

fn default_labels(n: usize) -> Vec<u32> {
    (0..n as u32).collect()
}

pub fn build_partition(spec: &PartitionSpec, system: &System) -> Result<Partition, CliError> {
    let p = match spec {
        PartitionSpec::Dyadic { depth } => {
            if *depth == 0 || *depth > 12 {
                return Err(CliError::Validation(format!("partition.depth: {depth} not in 1..=12")));
            }
            Partition::dyadic_for(system, *depth)
        }
        PartitionSpec::Cuts { cuts, labels } => {
            let c = fractions("partition.cuts", cuts)?;
            let l = labels.clone().unwrap_or_else(|| default_labels(c.len()));
            Partition::Interval(IntervalPartition::new(c, l).map_err(|e| wrap("partition", e))?)
        }
        PartitionSpec::Rectangles { rects, labels } => {
            let rs: Vec<Rect> = rects
                .iter()
                .enumerate()
                .map(|(i, r)| rect(&format!("partition.rects[{i}]"), r))
                .collect::<Result<_, _>>()?;
            let l = labels.clone().unwrap_or_else(|| default_labels(rs.len()));
            if l.len() != rs.len() {
                return Err(CliError::Validation(format!(
                    "partition.labels: {} labels for {} rectangles",
                    l.len(),
                    rs.len()
                )));
            }
            Partition::Rectangle(RectanglePartition::new(rs.into_iter().zip(l).collect()).map_err(|e| wrap("partition", e))?)
        }
        PartitionSpec::Cylinder { window } => {
            if *window == 0 || *window > 16 {
                return Err(CliError::Validation(format!("partition.window: {window} not in 1..=16")));
            }
            Partition::Cylinder { window: *window }
        }
    };
    let fits = matches!(
        (system, &p),
        (System::Interval(_), Partition::Interval(_))
            | (System::Rectangle(_), Partition::Rectangle(_))
            | (System::Bernoulli(_), Partition::Cylinder { .. })
    ) || matches!((system, &p), (System::Bernoulli(b), Partition::Rectangle(_)) if b.has_planar_realization());
    if !fits {
        return Err(CliError::Validation(format!(
            "partition: a {} does not act on a {}",
            system.name(),
            p.describe()
        )));
    }
    Ok(p)
}

pub fn build_generator(spec: &FamilySpec) -> Result<FamilyGenerator, CliError> {
    Ok(match spec {
        FamilySpec::Progression { growth } => FamilyGenerator::Progression {
            growth: growth
                .parse::<Growth>()
                .map_err(|e| CliError::Validation(format!("family.growth: {e}")))?,
        },
        FamilySpec::Geometric { cap } => FamilyGenerator::Geometric { cap: *cap },
        FamilySpec::Explicit { members } => FamilyGenerator::Explicit {
            members: members.clone(),
        },
    })
}
