//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p projlin-core --test acceptance`.

use std::alloc::{GlobalAlloc, Layout, System};
use std::collections::HashMap;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use projlin_core::arrangement::ProjectiveSampler;
use projlin_core::expectation::expected_d_projective_with;
use projlin_core::extrema::enumerate_rooted_trees;
use projlin_core::{
    class_formula, count_projective, enumerate_projective, estimate_expected_d, expected_d_projective,
    expected_dprime_projective, is_projective, make_class, max_expected, min_expected, random_tree, relative_error,
    seeded_rng, sum_edge_lengths, BigCount, ExactRational, LengthVariant, LinearArrangement, MemoTable, Method,
    RootedTree, TreeClass,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct CountingAlloc;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            if new_size >= layout.size() {
                let now = CURRENT.fetch_add(new_size - layout.size(), Ordering::Relaxed) + new_size - layout.size();
                PEAK.fetch_max(now, Ordering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

#[global_allocator]
static GLOBAL: CountingAlloc = CountingAlloc;

/// Peak heap growth while `f` runs, in bytes.
fn peak_heap<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let out = f();
    (out, PEAK.load(Ordering::Relaxed) - base)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn trees_up_to(max_n: usize) -> Vec<RootedTree> {
    (1..=max_n).flat_map(|n| enumerate_rooted_trees(n).unwrap()).collect()
}

fn oracle_equivalence() -> Outcome {
    let trees = trees_up_to(7);
    let mut bad = Vec::new();
    for t in &trees {
        let mut total = 0u64;
        let mut count = 0u64;
        for arr in enumerate_projective(t, u64::MAX).unwrap() {
            total += sum_edge_lengths(t, &arr, LengthVariant::Standard).unwrap();
            count += 1;
        }
        if ExactRational::new(total, count) != expected_d_projective(t, Method::ClosedForm) {
            bad.push(t.to_string());
        }
    }
    verdict(
        bad.is_empty() && trees.len() == 85,
        format!("{} rooted trees with n <= 7, {} mismatches {bad:?}", trees.len(), bad.len()),
    )
}

fn counting() -> Outcome {
    let trees = trees_up_to(7);
    let mut bad = Vec::new();
    for t in &trees {
        let listed = enumerate_projective(t, u64::MAX).unwrap().count();
        if BigCount::from(listed) != count_projective(t) {
            bad.push(format!("{t}: listed {listed}"));
        }
    }
    let mut filtered = 0;
    for t in trees.iter().filter(|t| t.n() <= 6) {
        let passing = (1..=t.n())
            .permutations(t.n())
            .filter(|order| is_projective(t, &LinearArrangement::from_order(order.clone()).unwrap()).unwrap())
            .count();
        filtered += 1;
        if BigCount::from(passing) != count_projective(t) {
            bad.push(format!("{t}: {passing} of n! orders projective"));
        }
    }
    verdict(
        bad.is_empty(),
        format!("{} trees enumerated, {filtered} filtered over n!, mismatches {bad:?}", trees.len()),
    )
}

fn class_formulas() -> Outcome {
    let mut rows = 0;
    let mut cases = 0;
    let mut bad = Vec::new();
    for class in TreeClass::ALL {
        let ks: Vec<Option<usize>> = if class == TreeClass::Linear {
            // one row for k = 0 and one for k > 0, every k swept
            rows += 2;
            (0..50).map(Some).collect()
        } else {
            rows += 1;
            vec![None]
        };
        for n in 4..=50 {
            for &k in &ks {
                if k.is_some_and(|k| k >= n) {
                    continue;
                }
                cases += 1;
                let tree = make_class(class, n, k).unwrap();
                let (count, value) = class_formula(class, n, k).unwrap();
                if count != count_projective(&tree) || value != expected_d_projective(&tree, Method::ClosedForm) {
                    bad.push(format!("{class} n={n} k={k:?}"));
                }
            }
        }
    }
    verdict(bad.is_empty() && rows == 8, format!("{rows} rows, {cases} (class, n, k) cases, mismatches {bad:?}"))
}

const MINIMA: [(usize, &str); 20] = [
    (1, "0"),
    (1, "1"),
    (1, "5/2"),
    (2, "9/2"),
    (1, "19/3"),
    (1, "26/3"),
    (1, "11"),
    (2, "83/6"),
    (1, "33/2"),
    (2, "58/3"),
    (1, "22"),
    (1, "151/6"),
    (2, "85/3"),
    (1, "63/2"),
    (1, "104/3"),
    (1, "38"),
    (1, "83/2"),
    (2, "45"),
    (2, "97/2"),
    (2, "52"),
];

fn minimum_table() -> Outcome {
    let start = Instant::now();
    let mut memo = MemoTable::new();
    let mut bad = Vec::new();
    let mut hard_gate = Duration::ZERO;
    for (i, &(count, value)) in MINIMA.iter().enumerate() {
        let n = i + 1;
        let entry = min_expected(n, &mut memo).unwrap();
        if entry.value != value.parse().unwrap() || entry.trees.len() != count {
            bad.push(format!("n={n}: got ({}, {})", entry.value, entry.trees.len()));
        }
        if n == 16 {
            hard_gate = start.elapsed();
        }
    }
    let total = start.elapsed();
    verdict(
        bad.is_empty() && total < Duration::from_secs(600),
        format!(
            "20 rows, mismatches {bad:?}; n <= 16 in {:.2?}, n <= 20 in {:.2?} (budget 10 min)",
            hard_gate, total
        ),
    )
}

fn maxima() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=7 {
        let (max, star) = max_expected(n).unwrap();
        let trees: Vec<RootedTree> = enumerate_rooted_trees(n).unwrap().collect();
        let at_max: Vec<&RootedTree> = trees
            .iter()
            .filter(|t| {
                let v = expected_d_projective(t, Method::ClosedForm);
                if v > max {
                    bad.push(format!("{t} exceeds the bound"));
                }
                v == max
            })
            .collect();
        if at_max.len() != 1 || at_max[0].canonical_code() != star.canonical_code() {
            bad.push(format!("n={n}: {} maximizers", at_max.len()));
        }
    }
    for n in 1..=50usize {
        let expected = ExactRational::new((n * n - 1) as i64, 3);
        if max_expected(n).unwrap().0 != expected {
            bad.push(format!("max_expected({n})"));
        }
    }
    verdict(bad.is_empty(), format!("unique star-hub maximizer for n <= 7, exact value n <= 50, failures {bad:?}"))
}

fn minus_one() -> Outcome {
    let mut rng = seeded_rng(0x0C01);
    let mut bad = 0;
    for i in 0..1000 {
        let n = 1 + (i * 37 + 11) % 200;
        let t = random_tree(n, &mut rng);
        let shift = ExactRational::from_integer(n as i64 - 1);
        let standard = expected_d_projective(&t, Method::ClosedForm);
        for method in [Method::ClosedForm, Method::Recurrence] {
            if expected_dprime_projective(&t, method) != &standard - &shift {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("1000 random trees with 1 <= n <= 200, {bad} mismatches"))
}

fn sampler_uniformity() -> Outcome {
    let trees = [
        make_class(TreeClass::StarHub, 4, None).unwrap(),
        make_class(TreeClass::Linear, 6, Some(0)).unwrap(),
        make_class(TreeClass::QuasiStarBridge, 6, None).unwrap(),
        make_class(TreeClass::StarLeaf, 6, None).unwrap(),
        make_class(TreeClass::StarHub, 6, None).unwrap(),
    ];
    let mut parts = Vec::new();
    let mut passed = true;
    for (i, t) in trees.iter().enumerate() {
        let index: HashMap<Vec<usize>, usize> = enumerate_projective(t, u64::MAX)
            .unwrap()
            .enumerate()
            .map(|(j, a)| (a.order().to_vec(), j))
            .collect();
        let cells = index.len();
        let draws = 100 * cells;
        let mut observed = vec![0u64; cells];
        let mut sampler = ProjectiveSampler::new(t);
        let mut rng = seeded_rng(0x5A3 + i as u64);
        for _ in 0..draws {
            let a = sampler.sample(&mut rng);
            observed[index[a.order()]] += 1;
        }
        let chi2: f64 = observed.iter().map(|&o| (o as f64 - 100.0).powi(2) / 100.0).sum();
        let p = ChiSquared::new((cells - 1) as f64).unwrap().sf(chi2);
        passed &= (24..=720).contains(&cells) && p > 1e-3;
        parts.push(format!("N={cells} p={p:.3}"));
    }
    verdict(passed, parts.join(", "))
}

fn mc_convergence() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(0x3C);
    let trees: Vec<RootedTree> = (0..1000).map(|i| random_tree(3 + i % 38, &mut rng)).collect();
    let mean_abs = |z: u64| {
        trees
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let exact = expected_d_projective(t, Method::ClosedForm);
                let est = estimate_expected_d(t, z, i as u64).unwrap();
                relative_error(est.mean_d, &exact).unwrap().abs()
            })
            .sum::<f64>()
            / trees.len() as f64
    };
    let low = mean_abs(10);
    let high = mean_abs(10_000);
    let elapsed = start.elapsed();
    verdict(
        high < low && high < 0.02 && elapsed < Duration::from_secs(300),
        format!("mean |rel err| {low:.5} at z=10, {high:.5} at z=10^4, {elapsed:.2?}"),
    )
}

fn linear_scaling() -> Outcome {
    let mut rng = seeded_rng(0x106);
    let small = random_tree(100_000, &mut rng);
    let big = random_tree(1_000_000, &mut rng);
    let run = |t: &RootedTree| {
        let start = Instant::now();
        let (value, peak) = peak_heap(|| {
            let metrics = t.metrics();
            expected_d_projective_with(t, &metrics, Method::ClosedForm)
        });
        (value, peak, start.elapsed())
    };
    let (_, small_peak, _) = run(&small);
    let (value, big_peak, elapsed) = run(&big);
    let bytes_per_vertex = big_peak as f64 / 1e6;
    let ratio = big_peak as f64 / small_peak as f64;
    verdict(
        elapsed < Duration::from_secs(1) && bytes_per_vertex < 128.0 && ratio < 12.0,
        format!(
            "n=10^6 in {elapsed:.2?}, value {}, peak heap {:.1} bytes/vertex, 10x vertices -> {ratio:.2}x memory",
            value.to_decimal(3),
            bytes_per_vertex
        ),
    )
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 counting", counting),
        ("3 class formulas", class_formulas),
        ("4 minimum table", minimum_table),
        ("5 maxima", maxima),
        ("6 minus-one relation", minus_one),
        ("7 sampler uniformity", sampler_uniformity),
        ("8 monte carlo convergence", mc_convergence),
        ("9 linear scaling", linear_scaling),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{name}] {} ({:.2?})", outcome.detail, start.elapsed());
        failed += !outcome.passed as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
