//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gridspread_core::bounds::{lower_bound, upper_bound, upper_bound_linf};
use gridspread_core::construct::{construct_auto, construct_general, select_k, Method};
use gridspread_core::gridio::{parse, serialize, serialize_pair, PairDocument};
use gridspread_core::metrics::{combined_distance, min_combined_naive, min_combined_pruned};
use gridspread_core::oracle::Oracle;
use gridspread_core::{dist, upper_bound_witness, Arrangement, ArrangementPair, Cell, GridSpec, Norm};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn random_pair(spec: GridSpec, rng: &mut StdRng) -> ArrangementPair {
    let mut shuffled = || {
        let mut cells: Vec<usize> = (0..spec.cell_count()).collect();
        cells.shuffle(rng);
        Arrangement::from_cells(spec, cells).unwrap()
    };
    let (a, b) = (shuffled(), shuffled());
    ArrangementPair::new(a, b).unwrap()
}

/// Integer `floor(sqrt(n/3))` and `ceil(sqrt(n/3))` by direct search on `3 m^2` vs `n`.
fn root_third(n: u64) -> (u64, u64) {
    let mut lo = (n / 3).isqrt();
    while 3 * (lo + 1) * (lo + 1) <= n {
        lo += 1;
    }
    while 3 * lo * lo > n {
        lo -= 1;
    }
    let hi = if 3 * lo * lo == n { lo } else { lo + 1 };
    (lo, hi)
}

fn sweep_specs() -> impl Iterator<Item = GridSpec> {
    (3..=128)
        .map(|n| GridSpec::new(n, 2).unwrap())
        .chain((3..=13).map(|n| GridSpec::new(n, 3).unwrap()))
}

fn solution_count() -> Outcome {
    let start = Instant::now();
    let spec = GridSpec::new(3, 2).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    let mut shuffled: Vec<usize> = (0..9).collect();
    shuffled.shuffle(&mut rng);
    let mut counts = Vec::new();
    for base in [Arrangement::identity(spec), Arrangement::from_cells(spec, shuffled).unwrap()] {
        let oracle = Oracle::new(spec, Norm::L(1)).unwrap().with_base(base).unwrap();
        counts.push(pool.install(|| oracle.count_solutions(3.0)));
    }
    ensure(counts.iter().all(|&c| c == 840), || format!("counts {counts:?}"))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("840 placements for identity and shuffled A in {:.2?}", start.elapsed()))
}

fn sandwich() -> Outcome {
    let mut found = Vec::new();
    for n in [2usize, 3] {
        let spec = GridSpec::new(n, 2).unwrap();
        let c = Oracle::new(spec, Norm::Inf).unwrap().exact_optimum().optimum;
        let (lo, hi) = (lower_bound(n as u64) as f64, upper_bound(n as u64, 2, Norm::Inf));
        ensure(lo <= c && c <= hi, || format!("n={n}: {lo} <= {c} <= {hi} fails"))?;
        found.push(c);
    }
    ensure(found[0] == 2.0 && upper_bound(2, 2, Norm::Inf) == 2.0, || {
        format!("c_inf(2) = {}", found[0])
    })?;
    ensure(found[1] <= 3.0, || format!("c_inf(3) = {}", found[1]))?;
    Ok(format!("c_inf(2)={} c_inf(3)={}", found[0], found[1]))
}

fn construction_sweep() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for spec in sweep_specs() {
        let n = spec.n() as u64;
        let (pair, plan) = construct_auto(spec).map_err(|e| e.to_string())?;
        let min = min_combined_pruned(&pair, Norm::Inf).map_err(|e| e.to_string())?.min_combined;
        let promised = match plan.method {
            Method::General => lower_bound(n),
            Method::Special => n.isqrt(),
            Method::Identity => 0,
        };
        ensure(plan.guarantee >= promised, || format!("{spec}: plan {plan}"))?;
        ensure(min >= plan.guarantee as f64, || {
            format!("{spec}: min {min} below guarantee {}", plan.guarantee)
        })?;
        checked += 1;
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{checked} grids in {:.2?}", start.elapsed()))
}

fn select_k_range() -> Outcome {
    let start = Instant::now();
    for n in 3..=1_000_000u64 {
        let k = select_k(n as usize) as u64;
        let (lo, hi) = root_third(n);
        ensure(lo <= k && k <= hi, || format!("n={n}: k={k} outside [{lo}, {hi}]"))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("n in 3..=10^6 in {:.2?}", start.elapsed()))
}

fn witness_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let mut pairs = Vec::new();
    for _ in 0..50 {
        let spec = GridSpec::new(rng.random_range(2..=40), rng.random_range(2..=3)).unwrap();
        pairs.push(random_pair(spec, &mut rng));
    }
    for spec in sweep_specs() {
        pairs.push(construct_auto(spec).unwrap().0);
    }
    for pair in &pairs {
        let n = pair.spec().n() as u64;
        let w = upper_bound_witness(pair).map_err(|e| e.to_string())?;
        let direct = combined_distance(pair, Norm::Inf, w.witness.0, w.witness.1).unwrap();
        ensure(direct == w.combined as f64, || format!("{}: recorded {} vs {direct}", pair.spec(), w.combined))?;
        ensure(w.combined <= upper_bound_linf(n), || format!("{}: combined {}", pair.spec(), w.combined))?;
        ensure(w.u * w.v <= n - 1, || format!("{}: u={} v={}", pair.spec(), w.u, w.v))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} pairs", pairs.len()))
}

fn verifier_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    for i in 0..200 {
        let spec = GridSpec::new(rng.random_range(2..=16), rng.random_range(2..=3)).unwrap();
        let pair = random_pair(spec, &mut rng);
        let norm = [Norm::L(1), Norm::L(2), Norm::Inf][i % 3];
        let naive = min_combined_naive(&pair, norm).unwrap();
        let pruned = min_combined_pruned(&pair, norm).unwrap();
        let tolerance = if norm == Norm::L(2) { 1e-9 } else { 0.0 };
        ensure((naive.min_combined - pruned.min_combined).abs() <= tolerance, || {
            format!("{spec} {norm}: {} vs {}", naive.min_combined, pruned.min_combined)
        })?;
        ensure(naive.witness == pruned.witness, || format!("{spec} {norm}: witnesses differ"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("200 pairs in {:.2?}", start.elapsed()))
}

fn large_construction() -> Outcome {
    let start = Instant::now();
    let pair = construct_general(GridSpec::new(2048, 2).unwrap()).map_err(|e| e.to_string())?;
    pair.a().validate().map_err(|e| e.to_string())?;
    pair.b().validate().map_err(|e| e.to_string())?;
    let text = serialize_pair(&pair);
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} cells, {} bytes in {:.2?}", pair.symbol_count(), text.len(), start.elapsed()))
}

fn norm_sandwich() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(8);
    for d in [2usize, 3, 4] {
        let mut cell = || Cell::new((0..d).map(|_| rng.random_range(0..1000)).collect());
        for _ in 0..100_000 {
            let (x, y) = (cell(), cell());
            let inf = dist(Norm::Inf, &x, &y).unwrap();
            for p in [1u32, 2, 3] {
                let lp = dist(Norm::L(p), &x, &y).unwrap();
                let cap = (d as f64).powf(1.0 / p as f64) * inf;
                ensure(inf <= lp + 1e-9 && lp <= cap + 1e-9, || {
                    format!("d={d} p={p} {x:?} {y:?}: {inf} {lp} {cap}")
                })?;
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("3 x 10^5 pairs in {:.2?}", start.elapsed()))
}

fn round_trip() -> Outcome {
    let mut checked = 0;
    for spec in sweep_specs() {
        let pair = construct_auto(spec).unwrap().0;
        let text = serialize_pair(&pair);
        let doc = parse(&text).map_err(|e| e.to_string())?;
        ensure(doc.pair == pair, || format!("{spec}: parse(serialize) differs"))?;
        ensure(serialize(&doc) == text, || format!("{spec}: re-serialization differs"))?;
        let again = serialize(&PairDocument::from_pair(construct_auto(spec).unwrap().0));
        ensure(again == text, || format!("{spec}: second run differs"))?;
        checked += 1;
    }
    Ok(format!("{checked} grids"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 solution count n=3 L1 >= 3", solution_count),
        ("2 bounds sandwich n in {2,3}", sandwich),
        ("3 construction guarantee sweep", construction_sweep),
        ("4 select_k range", select_k_range),
        ("5 upper-bound witness", witness_bound),
        ("6 pruned == naive verifier", verifier_equivalence),
        ("7 n=2048 construction", large_construction),
        ("8 norm sandwich", norm_sandwich),
        ("9 round-trip I/O", round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
