//! Weighted distances of `T^m` to `Theta`, to the identity and to admissible
//! combinations, measured through correlation tables on a test family.
//!
//! Every distance is `sum_ij w_ij |C_m(i,j) - target(i,j)|`. For exact
//! systems the sum is formed exactly and rounded once, so two evaluations of
//! the same distance agree bit for bit whatever path produced the table.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::systems::{IntervalExchange, RectangleExchange, System};
use crate::weaklimits::correlation::{
    cylinder_of, intersect, rect_power_steps, sample_points, total, WeakOptions,
};
use crate::weaklimits::family::{TestFamily, TestSet};

/// Denominators above this are not tried on the `i128` path.
const SCALED_DEN_LIMIT: i128 = 1 << 62;

#[derive(Debug, Clone, PartialEq)]
pub enum TableValues {
    /// `num[k] / den`, row-major.
    Scaled { den: i128, num: Vec<i128> },
    Exact(Vec<ExactRational>),
    Estimate(Vec<f64>),
}

/// `C(i, j) = mu(T^-m A_i ∩ A_j)` for all pairs of a test family.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    n: usize,
    values: TableValues,
}

impl CorrelationTable {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &TableValues {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.values, TableValues::Estimate(_))
    }

    pub fn exact(&self, i: usize, j: usize) -> Option<ExactRational> {
        let k = i * self.n + j;
        match &self.values {
            TableValues::Scaled { den, num } => Some(ExactRational::new(BigInt::from(num[k]), BigInt::from(*den))),
            TableValues::Exact(v) => Some(v[k].clone()),
            TableValues::Estimate(_) => None,
        }
    }

    pub fn value_f64(&self, i: usize, j: usize) -> f64 {
        let k = i * self.n + j;
        match &self.values {
            TableValues::Estimate(v) => v[k],
            _ => rational::to_f64(&self.exact(i, j).expect("exact")),
        }
    }

    fn to_exact(&self) -> Option<Vec<ExactRational>> {
        match &self.values {
            TableValues::Scaled { den, num } => {
                let d = BigInt::from(*den);
                Some(num.iter().map(|&x| ExactRational::new(BigInt::from(x), d.clone())).collect())
            }
            TableValues::Exact(v) => Some(v.clone()),
            TableValues::Estimate(_) => None,
        }
    }

    fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.n * self.n).map(|k| self.value_f64(k / self.n, k % self.n)).collect()
    }

    /// `mu(A_i) mu(A_j)` read off the zero-lag table (`mu(A_i) = C_0(i, X)`).
    fn products(base: &CorrelationTable, full: usize) -> CorrelationTable {
        let n = base.n;
        if let TableValues::Scaled { den, num } = &base.values {
            if let Some(d2) = den.checked_mul(*den) {
                let col: Vec<i128> = (0..n).map(|i| num[i * n + full]).collect();
                let prods: Option<Vec<i128>> = (0..n * n).map(|k| col[k / n].checked_mul(col[k % n])).collect();
                if let Some(p) = prods {
                    return CorrelationTable {
                        n,
                        values: TableValues::Scaled { den: d2, num: p },
                    };
                }
            }
        }
        let values = match base.to_exact() {
            Some(v) => {
                let col: Vec<&ExactRational> = (0..n).map(|i| &v[i * n + full]).collect();
                TableValues::Exact((0..n * n).map(|k| col[k / n] * col[k % n]).collect())
            }
            None => {
                let col: Vec<f64> = (0..n).map(|i| base.value_f64(i, full)).collect();
                TableValues::Estimate((0..n * n).map(|k| col[k / n] * col[k % n]).collect())
            }
        };
        CorrelationTable { n, values }
    }
}

/// Table for `p = T^m` of an interval exchange.
pub fn iet_table(p: &IntervalExchange, family: &TestFamily) -> Result<CorrelationTable> {
    let n = family.len();
    let mut ranges = Vec::with_capacity(n);
    for s in family.sets() {
        match s {
            TestSet::Interval { a, b } => ranges.push((a.clone(), b.clone())),
            TestSet::Rect(_) => {
                return Err(Error::Unsupported("interval exchanges take interval test sets".into()));
            }
        }
    }
    if let Some(t) = scaled_leaf_table(p, &ranges) {
        return Ok(t);
    }
    let rows: Vec<Vec<ExactRational>> = ranges
        .par_iter()
        .map(|(a, b)| {
            let pre = p.preimage_interval(a, b);
            ranges
                .iter()
                .map(|(c, d)| total(&intersect(&pre, &vec![(c.clone(), d.clone())])))
                .collect()
        })
        .collect();
    Ok(CorrelationTable {
        n,
        values: TableValues::Exact(rows.into_iter().flatten().collect()),
    })
}

/// Smallest `k` with `x * 2^k` an integer, if `x` is dyadic.
fn dyadic_depth(x: &ExactRational) -> Option<u32> {
    let d = x.denom();
    let tz = d.trailing_zeros().unwrap_or(0);
    ((d >> tz as usize).is_one()).then_some(tz as u32)
}

fn to_i128(x: &BigInt) -> Option<i128> {
    x.to_i128()
}

/// Fast path: when all set endpoints are dyadic of depth at most 12 and the
/// piece data fit a common denominator below `2^62`, build the leaf matrix
/// `M[a][b] = |{x in leaf b : T^m x in leaf a}|` in integers and read every
/// set pair off its 2D prefix sums.
fn scaled_leaf_table(p: &IntervalExchange, ranges: &[(ExactRational, ExactRational)]) -> Option<CorrelationTable> {
    let mut depth = 0;
    for (a, b) in ranges {
        depth = depth.max(dyadic_depth(a)?).max(dyadic_depth(b)?);
    }
    if depth > 12 {
        return None;
    }
    let leaves = 1usize << depth;
    let mut den = BigInt::one() << depth as usize;
    for (s, e, sh) in p.pieces() {
        for x in [s, &e, sh] {
            den = den.lcm(x.denom());
        }
    }
    let den = to_i128(&den).filter(|&d| d <= SCALED_DEN_LIMIT)?;
    let scale = |x: &ExactRational| -> Option<i128> { to_i128(&(x.numer() * (BigInt::from(den) / x.denom()))) };
    let w = den >> depth;
    let mut m = vec![0i128; leaves * leaves];
    for (s, e, sh) in p.pieces() {
        let (s, e, sh) = (scale(s)?, scale(&e)?, scale(sh)?);
        let mut b = (s / w) as usize;
        while b < leaves && (b as i128) * w < e {
            let lo = s.max(b as i128 * w);
            let hi = e.min((b as i128 + 1) * w);
            let (ilo, ihi) = (lo + sh, hi + sh);
            let mut a = (ilo / w) as usize;
            while a < leaves && (a as i128) * w < ihi {
                let ov = ihi.min((a as i128 + 1) * w) - ilo.max(a as i128 * w);
                if ov > 0 {
                    m[a * leaves + b] += ov;
                }
                a += 1;
            }
            b += 1;
        }
    }
    let stride = leaves + 1;
    let mut pre = vec![0i128; stride * stride];
    for a in 0..leaves {
        for b in 0..leaves {
            pre[(a + 1) * stride + b + 1] =
                m[a * leaves + b] + pre[a * stride + b + 1] + pre[(a + 1) * stride + b] - pre[a * stride + b];
        }
    }
    let leaf_range = |(a, b): &(ExactRational, ExactRational)| -> (usize, usize) {
        let f = |x: &ExactRational| (x * rational::int(leaves as i64)).to_integer().to_usize().expect("dyadic");
        (f(a), f(b))
    };
    let idx: Vec<(usize, usize)> = ranges.iter().map(leaf_range).collect();
    let n = ranges.len();
    let mut num = Vec::with_capacity(n * n);
    for &(a0, a1) in &idx {
        for &(b0, b1) in &idx {
            num.push(pre[a1 * stride + b1] - pre[a0 * stride + b1] - pre[a1 * stride + b0] + pre[a0 * stride + b0]);
        }
    }
    Some(CorrelationTable {
        n,
        values: TableValues::Scaled { den, num },
    })
}

fn bernoulli_table(system: &System, family: &TestFamily, m: i64) -> Result<CorrelationTable> {
    let System::Bernoulli(b) = system else {
        unreachable!("caller checks")
    };
    if b.symbol_count() != 2 {
        return Err(Error::Unsupported(
            "dyadic test sets read binary digits; use a two-symbol Bernoulli system".into(),
        ));
    }
    let cyl: Vec<Vec<(i64, u32)>> = family.sets().iter().map(cylinder_of).collect::<Result<_>>()?;
    let n = cyl.len();
    let rows: Vec<Vec<ExactRational>> = cyl
        .par_iter()
        .map(|ca| {
            cyl.iter()
                .map(|cb| {
                    let all: Vec<(i64, u32)> = ca.iter().map(|&(k, s)| (k + m, s)).chain(cb.iter().copied()).collect();
                    b.cylinder_measure(&all)
                })
                .collect()
        })
        .collect();
    Ok(CorrelationTable {
        n,
        values: TableValues::Exact(rows.into_iter().flatten().collect()),
    })
}

fn rect_zero_lag(family: &TestFamily) -> CorrelationTable {
    let rects: Vec<_> = family.sets().iter().map(TestSet::as_rect).collect();
    let n = rects.len();
    let v = (0..n * n)
        .map(|k| {
            rects[k / n]
                .intersection(&rects[k % n])
                .map_or_else(rational::zero, |r| r.area())
        })
        .collect();
    CorrelationTable {
        n,
        values: TableValues::Exact(v),
    }
}

fn rect_estimate(t: &RectangleExchange, family: &TestFamily, m: i64, opts: &WeakOptions) -> Result<CorrelationTable> {
    if m.unsigned_abs() > opts.budgets.max_power {
        return Err(Error::budget("power", m.unsigned_abs(), opts.budgets.max_power));
    }
    if opts.samples == 0 || opts.samples > opts.budgets.max_samples {
        return Err(Error::budget("samples", opts.samples as u64, opts.budgets.max_samples as u64));
    }
    let rects: Vec<_> = family.sets().iter().map(TestSet::as_rect).collect();
    let n = rects.len();
    let steps = rect_power_steps(t, m);
    let counts: Vec<Vec<u64>> = sample_points(opts)
        .par_iter()
        .map(|blk| -> Result<Vec<u64>> {
            let mut c = vec![0u64; n * n];
            for p in blk {
                let q = steps.run(p)?;
                let ins: Vec<usize> = (0..n).filter(|&j| rects[j].contains(p)).collect();
                for i in (0..n).filter(|&i| rects[i].contains(&q)) {
                    for &j in &ins {
                        c[i * n + j] += 1;
                    }
                }
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0u64; n * n];
    for c in counts {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    let s = opts.samples as f64;
    Ok(CorrelationTable {
        n,
        values: TableValues::Estimate(total.into_iter().map(|c| c as f64 / s).collect()),
    })
}

/// `Q(T) = a Theta + sum_k a_k T^{i_k}` with nonnegative coefficients
/// summing to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSpec {
    #[serde(with = "rational::serde_str")]
    pub a: ExactRational,
    pub terms: Vec<AdmissibleTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleTerm {
    pub power: i64,
    #[serde(with = "rational::serde_str")]
    pub coefficient: ExactRational,
}

impl AdmissibleSpec {
    pub fn new(a: ExactRational, terms: Vec<(i64, ExactRational)>) -> Result<Self> {
        if a.is_negative() || terms.iter().any(|(_, c)| c.is_negative()) {
            return Err(Error::validation("admissible coefficients must be nonnegative"));
        }
        let sum: ExactRational = &a + terms.iter().map(|(_, c)| c.clone()).sum::<ExactRational>();
        if sum != rational::one() {
            return Err(Error::validation(format!(
                "admissible coefficients sum to {}, not 1",
                rational::format_rational(&sum)
            )));
        }
        Ok(AdmissibleSpec {
            a,
            terms: terms
                .into_iter()
                .map(|(power, coefficient)| AdmissibleTerm { power, coefficient })
                .collect(),
        })
    }

    pub fn theta() -> Self {
        Self::new(rational::one(), vec![]).expect("valid")
    }

    pub fn identity() -> Self {
        Self::new(rational::zero(), vec![(0, rational::one())]).expect("valid")
    }
}

/// Correlation tables of one system on one family, with the zero-lag and
/// product tables cached.
pub struct DistanceEngine<'a> {
    system: &'a System,
    family: &'a TestFamily,
    opts: WeakOptions,
    base: CorrelationTable,
    theta: CorrelationTable,
}

impl<'a> DistanceEngine<'a> {
    pub fn new(system: &'a System, family: &'a TestFamily, opts: &WeakOptions) -> Result<Self> {
        let base = match system {
            System::Interval(_) => iet_table(&IntervalExchange::identity(), family)?,
            System::Bernoulli(_) => bernoulli_table(system, family, 0)?,
            System::Rectangle(_) => rect_zero_lag(family),
        };
        let theta = CorrelationTable::products(&base, family.full_index());
        Ok(DistanceEngine {
            system,
            family,
            opts: *opts,
            base,
            theta,
        })
    }

    pub fn family(&self) -> &TestFamily {
        self.family
    }

    pub fn zero_lag(&self) -> &CorrelationTable {
        &self.base
    }

    pub fn table(&self, m: i64) -> Result<CorrelationTable> {
        match self.system {
            System::Interval(t) => iet_table(&t.power(m)?, self.family),
            System::Bernoulli(_) => bernoulli_table(self.system, self.family, m),
            System::Rectangle(t) => {
                if m == 0 {
                    Ok(self.base.clone())
                } else {
                    rect_estimate(t, self.family, m, &self.opts)
                }
            }
        }
    }

    pub fn theta_distance(&self, table: &CorrelationTable) -> Distance {
        weighted_distance(self.family, table, &[(rational::one(), &self.theta)])
    }

    pub fn identity_distance(&self, table: &CorrelationTable) -> Distance {
        weighted_distance(self.family, table, &[(rational::one(), &self.base)])
    }

    pub fn dist_to_theta(&self, m: i64) -> Result<Distance> {
        Ok(self.theta_distance(&self.table(m)?))
    }

    pub fn dist_to_identity(&self, m: i64) -> Result<Distance> {
        Ok(self.identity_distance(&self.table(m)?))
    }

    pub fn dist_to_admissible(&self, m: i64, q: &AdmissibleSpec) -> Result<Distance> {
        let lhs = self.table(m)?;
        let term_tables: Vec<CorrelationTable> = q.terms.iter().map(|t| self.table(t.power)).collect::<Result<_>>()?;
        let mut rhs: Vec<(ExactRational, &CorrelationTable)> = Vec::new();
        if !q.a.is_zero() {
            rhs.push((q.a.clone(), &self.theta));
        }
        for (t, tab) in q.terms.iter().zip(&term_tables) {
            if !t.coefficient.is_zero() {
                rhs.push((t.coefficient.clone(), tab));
            }
        }
        Ok(weighted_distance(self.family, &lhs, &rhs))
    }
}

/// A distance, with its exact value when every table involved was exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub value: f64,
    #[serde(with = "opt_rational")]
    pub exact: Option<ExactRational>,
}

mod opt_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{self, ExactRational};

    pub fn serialize<S: Serializer>(x: &Option<ExactRational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&rational::format_rational(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ExactRational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|t| rational::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl Distance {
    fn exact(v: ExactRational) -> Self {
        Distance {
            value: rational::to_f64(&v),
            exact: Some(v),
        }
    }
}

/// `sum_ij w_ij |lhs(i,j) - sum_k c_k rhs_k(i,j)|`.
pub fn weighted_distance(
    family: &TestFamily,
    lhs: &CorrelationTable,
    rhs: &[(ExactRational, &CorrelationTable)],
) -> Distance {
    if let Some(v) = scaled_distance(family, lhs, rhs) {
        return Distance::exact(v);
    }
    let n = family.len();
    let exact: Option<Vec<Vec<ExactRational>>> = std::iter::once(lhs)
        .chain(rhs.iter().map(|(_, t)| *t))
        .map(CorrelationTable::to_exact)
        .collect();
    if let Some(tabs) = exact {
        let mut diag = vec![rational::zero(); 2 * n - 1];
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                let mut d = tabs[0][k].clone();
                for ((c, _), t) in rhs.iter().zip(&tabs[1..]) {
                    d -= c * &t[k];
                }
                diag[i + j] += d.abs();
            }
        }
        let two = rational::int(2);
        let acc = diag.into_iter().fold(rational::zero(), |acc, x| acc * &two + x);
        return Distance::exact(acc / ExactRational::from_integer(family.weight_denominator()));
    }
    let l = lhs.to_f64_vec();
    let r: Vec<(f64, Vec<f64>)> = rhs.iter().map(|(c, t)| (rational::to_f64(c), t.to_f64_vec())).collect();
    let base = (1.0 - 0.5f64.powi(n as i32)).powi(2);
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            let d = l[k] - r.iter().map(|(c, t)| c * t[k]).sum::<f64>();
            s += 0.5f64.powi((i + j + 2) as i32) / base * d.abs();
        }
    }
    Distance { value: s, exact: None }
}

fn scaled_distance(
    family: &TestFamily,
    lhs: &CorrelationTable,
    rhs: &[(ExactRational, &CorrelationTable)],
) -> Option<ExactRational> {
    let TableValues::Scaled { den: d0, num: n0 } = &lhs.values else {
        return None;
    };
    let mut parts: Vec<(BigInt, BigInt, &Vec<i128>)> = Vec::new(); // (coef numer, coef denom * table den, nums)
    for (c, t) in rhs {
        let TableValues::Scaled { den, num } = &t.values else {
            return None;
        };
        parts.push((c.numer().clone(), c.denom() * BigInt::from(*den), num));
    }
    let mut big_den = BigInt::from(*d0);
    for (_, d, _) in &parts {
        big_den = big_den.lcm(d);
    }
    let f0 = to_i128(&(&big_den / BigInt::from(*d0)))?;
    let factors: Vec<i128> = parts
        .iter()
        .map(|(p, d, _)| to_i128(&(p * (&big_den / d))))
        .collect::<Option<_>>()?;
    to_i128(&big_den)?;
    let n = family.len();
    let mut diag = vec![0u128; 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            let mut d = n0[k].checked_mul(f0)?;
            for ((_, _, num), f) in parts.iter().zip(&factors) {
                d = d.checked_sub(num[k].checked_mul(*f)?)?;
            }
            diag[i + j] = diag[i + j].checked_add(d.unsigned_abs())?;
        }
    }
    let mut acc = BigUint::zero();
    for x in diag {
        acc = (acc << 1usize) + BigUint::from(x);
    }
    Some(ExactRational::new(
        BigInt::from(acc),
        big_den * family.weight_denominator(),
    ))
}

pub fn dist_to_theta(system: &System, m: i64, family: &TestFamily, opts: &WeakOptions) -> Result<f64> {
    Ok(DistanceEngine::new(system, family, opts)?.dist_to_theta(m)?.value)
}

pub fn dist_to_identity(system: &System, m: i64, family: &TestFamily, opts: &WeakOptions) -> Result<f64> {
    Ok(DistanceEngine::new(system, family, opts)?.dist_to_identity(m)?.value)
}

pub fn dist_to_admissible(
    system: &System,
    m: i64,
    q: &AdmissibleSpec,
    family: &TestFamily,
    opts: &WeakOptions,
) -> Result<f64> {
    Ok(DistanceEngine::new(system, family, opts)?.dist_to_admissible(m, q)?.value)
}
