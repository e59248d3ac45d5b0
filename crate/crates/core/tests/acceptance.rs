//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqent_core::rational::{self, ratio};
use seqent_core::seqentropy::{
    boundary_growth, entropy_trace, h_j, join_over_times, make_geometric_family, make_progression_family,
    mc_join_entropy, Budgets, Direction, FamilyGenerator, Growth, HjOptions, IndexFamily, McOptions, Partition,
};
use seqent_core::systems::{baker_apply, Baker};
use seqent_core::weaklimits::{
    correlation, mixing_time_scan, triple_correlation, triple_limit_values, Correlation, DistanceEngine, TestFamily,
    TestSet, WeakOptions,
};
use seqent_core::{
    shannon_entropy, BernoulliSystem, ExactRational, IntervalExchange, IntervalPartition, ProbabilityVector, Rect,
    RectangleExchange, RectanglePartition, RotationSpec, System,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fair() -> System {
    System::Bernoulli(BernoulliSystem::fair())
}

fn golden40() -> RotationSpec {
    RotationSpec::golden(40).expect("F40/F41")
}

fn fib(k: usize) -> i64 {
    let (mut a, mut b) = (0i64, 1i64);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

fn c1_bernoulli_blowup() -> Outcome {
    let sys = fair();
    let budgets = Budgets::default();
    let opts = HjOptions::default();
    let mut cross_checked = 0;
    for j in [1u64, 2, 4, 8, 16] {
        let fam = make_progression_family(j, Growth::Linear, &budgets).map_err(|e| e.to_string())?;
        let r = h_j(&sys, &Partition::Cylinder { window: 1 }, &fam, &opts).map_err(|e| e.to_string())?;
        check(r.h() == 1.0, format!("j={j}: symbolic h_j = {}", r.h()))?;
        if fam.len() <= 20 {
            let h = baker_cylinder_entropy(&fam, j)? / fam.len() as f64;
            check(h == 1.0, format!("j={j}: baker cylinder h_j = {h}"))?;
            cross_checked += 1;
        }
    }
    Ok(format!("h_j = 1 for j in {{1,2,4,8,16}}; baker cylinders agree on {cross_checked} families"))
}

/// Joins the vertical-halves partition of the baker map over `fam` by
/// dyadic cylinders of the x coordinate: the atom with label vector `s` is
/// `{x : digit p+1 of x is s_p for p in F}`, of measure `2^-|F|`. A sample of
/// atoms is confirmed by iterating the map exactly from a point inside it.
fn baker_cylinder_entropy(fam: &IndexFamily, seed: u64) -> Result<f64, String> {
    let members = fam.members();
    let k = members.len();
    let top = *members.last().unwrap() as usize;
    let atoms = 1usize << k;
    let masses: Vec<ExactRational> = (0..atoms)
        .map(|_| ExactRational::new(BigInt::one(), BigInt::one() << k))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16.min(atoms) {
        let code: usize = rng.gen_range(0..atoms);
        // x with digit p+1 = bit i of code, a trailing 1 past every member
        let mut num = BigInt::zero();
        for (i, &p) in members.iter().enumerate() {
            if code >> i & 1 == 1 {
                num += BigInt::one() << (top - p as usize + 1);
            }
        }
        num += BigInt::one();
        let x = ExactRational::new(num, BigInt::one() << (top + 2));
        let mut q = (x, ratio(1, 3));
        let mut next = 0;
        for t in 0..=top as u64 {
            if members.get(next) == Some(&t) {
                let bit = usize::from(q.0 >= ratio(1, 2));
                check(bit == code >> next & 1, format!("baker orbit disagrees with cylinder at t={t}"))?;
                next += 1;
            }
            q = baker_apply(&q).map_err(|e| e.to_string())?;
        }
    }
    let p = ProbabilityVector::new(masses).map_err(|e| e.to_string())?;
    Ok(shannon_entropy(&p))
}

fn c2_identity_law() -> Outcome {
    let id = System::Interval(IntervalExchange::identity());
    let budgets = Budgets::default();
    let opts = HjOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let families: Vec<IndexFamily> = (0..10)
        .map(|_| {
            let len = rng.gen_range(1..=12);
            let mut m: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=200)).collect();
            m.sort();
            m.dedup();
            IndexFamily::explicit(m, &budgets).unwrap()
        })
        .collect();
    let mut cases = 0;
    for _ in 0..20 {
        let depth = rng.gen_range(1..=4);
        let k = rng.gen_range(2..=5u32);
        let labels = (0..1usize << depth).map(|_| rng.gen_range(0..k)).collect();
        let xi = IntervalPartition::dyadic_labeled(depth, labels).map_err(|e| e.to_string())?;
        let hx = xi.entropy();
        for fam in &families {
            let r = h_j(&id, &Partition::Interval(xi.clone()), fam, &opts).map_err(|e| e.to_string())?;
            let want = hx / fam.len() as f64;
            check(r.h() == want, format!("h_j = {} but H/|F| = {want}", r.h()))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (xi, F) pairs exact"))
}

fn c3_zero_entropy_decay() -> Outcome {
    let budgets = Budgets::default();
    let rot = System::Interval(golden40().to_iet());
    let fam = make_progression_family(1, Growth::Constant(64), &budgets).map_err(|e| e.to_string())?;
    let r = h_j(
        &rot,
        &Partition::Interval(IntervalPartition::halves()),
        &fam,
        &HjOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let bound = 130f64.log2() / 64.0;
    check(r.atom_count <= BigUint::from(130u32), format!("rotation join has {} atoms", r.atom_count))?;
    check(r.h() <= bound && r.h() < 0.2, format!("rotation h = {} exceeds {bound}", r.h()))?;

    let iet = IntervalExchange::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)], vec![2, 1, 0]).unwrap();
    let xi = IntervalPartition::dyadic(2);
    let mut first = None;
    let mut last = (0usize, 0.0f64);
    for n in 1..=64usize {
        let times: Vec<i64> = (1..=n as i64).collect();
        let j = join_over_times(&iet, &xi, &times, &budgets).map_err(|e| e.to_string())?;
        let atoms = j.atom_count.to_usize().unwrap();
        let c = *first.get_or_insert(atoms);
        check(atoms <= c * n * n, format!("3-IET: {atoms} atoms at N={n} exceed {c} N^2"))?;
        last = (atoms, j.entropy_bits / n as f64);
    }
    check(last.1 < 0.35, format!("3-IET: H/N = {} at N=64", last.1))?;
    Ok(format!(
        "rotation h = {:.6} <= {bound:.6} with {} atoms; 3-IET {} atoms and H/N = {:.6} at N=64",
        r.h(),
        r.atom_count,
        last.0,
        last.1
    ))
}

fn c4_boundary_ledger() -> Outcome {
    let budgets = Budgets::default();
    let mut out = Vec::new();
    let cases = [
        ("vertical swap", RectangleExchange::vertical_swap()),
        (
            "product rotation",
            RectangleExchange::product_rotation(&ratio(5, 13), &ratio(8, 21)).unwrap(),
        ),
    ];
    for (name, t) in cases {
        let led = boundary_growth(&t, &RectanglePartition::quadrants(), 50, &budgets).map_err(|e| e.to_string())?;
        let d = &led.discontinuity_length;
        for (n, b) in led.lengths.iter().enumerate() {
            let grown = b - &led.lengths[0];
            check(
                grown <= d * rational::int(n as i64),
                format!("{name}: B({n}) - B(0) = {grown} > {n} D"),
            )?;
        }
        out.push(format!(
            "{name}: D = {}, B(50) - B(0) = {}, equality at {} of 50 steps",
            rational::format_rational(d),
            rational::format_rational(&(&led.lengths[50] - &led.lengths[0])),
            led.increments_equal_d.len()
        ));
    }
    Ok(out.join("; "))
}

fn c5_rigidity() -> Outcome {
    let sys = System::Interval(golden40().to_iet());
    let fam = TestFamily::dyadic_1d(6).map_err(|e| e.to_string())?;
    let opts = WeakOptions::default();
    let engine = DistanceEngine::new(&sys, &fam, &opts).map_err(|e| e.to_string())?;
    let mut prev = f64::INFINITY;
    let mut vals = Vec::new();
    for k in (10..=24).step_by(2) {
        let d = engine.dist_to_identity(fib(k)).map_err(|e| e.to_string())?.value;
        check(d < prev, format!("dist_to_identity(F{k}) = {d} not below {prev}"))?;
        vals.push(d);
        prev = d;
    }
    check(prev < 0.02, format!("dist_to_identity(F24) = {prev}"))?;
    let d0 = engine.dist_to_theta(0).map_err(|e| e.to_string())?.value;
    let scan = mixing_time_scan(&sys, 0, 0.05, 10_000, &fam, &opts).map_err(|e| e.to_string())?;
    check(scan.rows.len() == 10_000, "mixing scan was truncated")?;
    let min = scan.rows.iter().map(|r| r.value).fold(d0, f64::min);
    check(scan.rows.iter().all(|r| r.event) && d0 > 0.05, format!("dist_to_theta dips to {min}"))?;
    Ok(format!(
        "dist_to_identity at F10..F24: {}; min dist_to_theta over m <= 10^4 = {min:.4}",
        vals.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
    ))
}

fn c6_baker_decorrelation() -> Outcome {
    let sys = fair();
    let fam = TestFamily::dyadic_2d(4).map_err(|e| e.to_string())?;
    let opts = WeakOptions::default();
    let engine = DistanceEngine::new(&sys, &fam, &opts).map_err(|e| e.to_string())?;
    for m in 4..=100 {
        let d = engine.dist_to_theta(m).map_err(|e| e.to_string())?;
        check(d.exact == Some(rational::zero()), format!("dist_to_theta({m}) = {}", d.value))?;
    }
    let half = TestSet::Rect(Rect::new(ratio(0, 1), ratio(1, 2), ratio(0, 1), ratio(1, 1)));
    let mut count = 0;
    for m in 1..=20 {
        for n in m + 1..=20 {
            let c = triple_correlation(&sys, &half, m, n, &opts).map_err(|e| e.to_string())?;
            check(c.exact() == Some(&ratio(1, 8)), format!("triple({m},{n}) = {c:?}"))?;
            count += 1;
        }
    }
    Ok(format!("dist_to_theta = 0 for m in 4..=100; {count} triples equal 1/8"))
}

fn c7_formulas() -> Outcome {
    let (f, g) = triple_limit_values(&ratio(1, 2));
    check(f == ratio(1, 4) && g == ratio(1, 4), format!("mu = 1/2 gives {f}, {g}"))?;
    let (f, g) = triple_limit_values(&ratio(1, 3));
    check(f == ratio(11, 81) && g == ratio(1, 9), format!("mu = 1/3 gives {f}, {g}"))?;
    Ok("1/4, 1/4 at 1/2; 11/81, 1/9 at 1/3".into())
}

fn c8_mc_calibration() -> Outcome {
    let budgets = Budgets::default();
    let id_fam = IndexFamily::explicit(vec![1, 2, 3], &budgets).unwrap();
    let baker_fam = make_progression_family(1, Growth::Constant(4), &budgets).unwrap();
    let quads = RectanglePartition::quadrants();
    let halves = RectanglePartition::vertical_halves();
    let exact_id = quads.entropy();
    let exact_baker = 4.0;
    let mut cover = (0, 0);
    for seed in 0..100u64 {
        let opts = McOptions {
            samples: 10_000,
            seed,
            ..McOptions::default()
        };
        let a = mc_join_entropy(&RectangleExchange::identity(), &quads, &id_fam, Direction::Forward, &opts, &budgets)
            .map_err(|e| e.to_string())?;
        if (a.entropy_bits - exact_id).abs() <= a.ci_half_width {
            cover.0 += 1;
        }
        let b = mc_join_entropy(&Baker::default(), &halves, &baker_fam, Direction::Forward, &opts, &budgets)
            .map_err(|e| e.to_string())?;
        if (b.entropy_bits - exact_baker).abs() <= b.ci_half_width {
            cover.1 += 1;
        }
    }
    check(
        cover.0 >= 90 && cover.1 >= 90,
        format!("coverage identity {}/100, baker {}/100", cover.0, cover.1),
    )?;
    Ok(format!("coverage identity {}/100, baker {}/100", cover.0, cover.1))
}

fn random_iet(rng: &mut ChaCha8Rng) -> IntervalExchange {
    let n = rng.gen_range(1..=5);
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=40)).collect();
    let total: i64 = raw.iter().sum();
    let lengths = raw.iter().map(|&r| ratio(r, total)).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    IntervalExchange::new(lengths, perm).unwrap()
}

fn random_unit_rational(rng: &mut ChaCha8Rng) -> ExactRational {
    let d = rng.gen_range(1..=1_000_000i64);
    ratio(rng.gen_range(0..d), d)
}

/// `T^{-1}[a,b)` straight from lengths and permutation: interval `i` lands at
/// the slot `perm[i]`, after the intervals occupying earlier slots.
fn brute_preimage(t: &IntervalExchange, set: &[(ExactRational, ExactRational)]) -> Vec<(ExactRational, ExactRational)> {
    let lens = t.lengths();
    let perm = t.permutation();
    let mut out = Vec::new();
    let mut dom = rational::zero();
    for i in 0..lens.len() {
        let mut img = rational::zero();
        for k in 0..lens.len() {
            if perm[k] < perm[i] {
                img += &lens[k];
            }
        }
        let img_end = &img + &lens[i];
        for (a, b) in set {
            let lo = if a > &img { a.clone() } else { img.clone() };
            let hi = if b < &img_end { b.clone() } else { img_end.clone() };
            if lo < hi {
                out.push((&lo - &img + &dom, &hi - &img + &dom));
            }
        }
        dom += &lens[i];
    }
    out
}

fn brute_length(set: &[(ExactRational, ExactRational)], b: &(ExactRational, ExactRational)) -> ExactRational {
    let mut s = rational::zero();
    for (x, y) in set {
        let lo = if x > &b.0 { x } else { &b.0 };
        let hi = if y < &b.1 { y } else { &b.1 };
        if lo < hi {
            s += hi - lo;
        }
    }
    s
}

fn c9_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let iets: Vec<IntervalExchange> = (0..25).map(|_| random_iet(&mut rng)).collect();
    let mut points = 0;
    for (idx, t) in iets.iter().enumerate() {
        let k = rng.gen_range(0..=10i64);
        let p = t.power(k).map_err(|e| e.to_string())?;
        let other = &iets[(idx + 1) % iets.len()];
        let c = t.compose(other);
        for _ in 0..1000 {
            let x = random_unit_rational(&mut rng);
            let mut y = x.clone();
            for _ in 0..k {
                y = t.apply(&y).unwrap();
            }
            check(p.apply(&x).unwrap() == y, format!("power {k} disagrees at {x}"))?;
            let z = t.apply(&other.apply(&x).unwrap()).unwrap();
            check(c.apply(&x).unwrap() == z, format!("compose disagrees at {x}"))?;
            points += 1;
        }
    }
    let opts = WeakOptions::default();
    for _ in 0..500 {
        let t = &iets[rng.gen_range(0..iets.len())];
        let mut interval = || {
            let (x, y) = (random_unit_rational(&mut rng), random_unit_rational(&mut rng));
            if x < y {
                (x, y)
            } else if y < x {
                (y, x)
            } else {
                (rational::zero(), rational::one())
            }
        };
        let (a, b) = (interval(), interval());
        let m = rng.gen_range(0..=10i64);
        let mut pre = vec![a.clone()];
        for _ in 0..m {
            pre = brute_preimage(t, &pre);
        }
        let want = brute_length(&pre, &b);
        let got = correlation(
            &System::Interval(t.clone()),
            &TestSet::interval(a.0, a.1),
            &TestSet::interval(b.0, b.1),
            m,
            &opts,
        )
        .map_err(|e| e.to_string())?;
        check(got == Correlation::Exact { value: want.clone() }, format!("correlation {got:?} vs {want}"))?;
    }
    Ok(format!("{points} points x 2 operations and 500 correlations agree"))
}

fn c10_geometric() -> Outcome {
    let budgets = Budgets::default();
    for j in [2u64, 3, 4] {
        let f = make_geometric_family(j, 12, &budgets).map_err(|e| e.to_string())?;
        let want: Vec<u64> = (j..=(j * j).min(12)).map(|e| 1 << e).collect();
        check(f.members() == want, format!("j={j}: {:?}", f.members()))?;
    }
    let trace = entropy_trace(
        &fair(),
        &Partition::Cylinder { window: 1 },
        &FamilyGenerator::Geometric { cap: 12 },
        &[2, 3, 4],
        &HjOptions::default(),
    );
    check(trace.is_complete(), format!("{:?}", trace.warnings))?;
    check(trace.rows.iter().all(|r| r.h == Some(1.0)), format!("rows {:?}", trace.rows))?;
    Ok("members exact for j in {2,3,4}; all rows 1 bit".into())
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "Bernoulli blow-up", 5, c1_bernoulli_blowup),
        (2, "identity law", 5, c2_identity_law),
        (3, "zero-entropy decay", 60, c3_zero_entropy_decay),
        (4, "boundary ledger", 30, c4_boundary_ledger),
        (5, "rigidity scan", 120, c5_rigidity),
        (6, "baker decorrelation", 30, c6_baker_decorrelation),
        (7, "triple-limit formulas", 1, c7_formulas),
        (8, "Monte Carlo calibration", 120, c8_mc_calibration),
        (9, "oracle equivalence", 60, c9_oracles),
        (10, "geometric family", 10, c10_geometric),
    ];
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        let start = Instant::now();
        let res = f();
        let el = start.elapsed();
        let res = match res {
            Ok(d) if el > Duration::from_secs(limit) => Err(format!("{d} (took {el:.2?}, limit {limit} s)")),
            r => r,
        };
        match res {
            Ok(d) => println!("criterion {n:>2} PASS  {name} [{el:.2?}]: {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name} [{el:.2?}]: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
