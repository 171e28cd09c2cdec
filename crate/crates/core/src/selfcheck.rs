//! Internal consistency checks between the closed forms and brute force.

use itertools::Itertools;

use crate::arrangement::{
    count_projective, enumerate_projective, is_projective, sum_edge_lengths, LengthVariant, LinearArrangement,
};
use crate::expectation::{class_formula, expected_d_projective, expected_dprime_projective, Method};
use crate::extrema::{code_set, enumerate_rooted_trees, max_expected, min_expected, MemoTable};
use crate::numeric::{BigCount, ExactRational};
use crate::tree::{make_class, RootedTree, TreeClass};

/// Largest `n` for which the filter over all `n!` orders runs.
const FACTORIAL_FILTER_MAX: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, failures: Vec<String>, checked: usize) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} cases")
        } else {
            format!("{} of {checked} failed, first: {}", failures.len(), failures[0])
        },
    }
}

fn all_trees(max_n: usize) -> Vec<RootedTree> {
    (1..=max_n)
        .flat_map(|n| enumerate_rooted_trees(n).expect("max_n is capped"))
        .collect()
}

/// Runs every check on all rooted trees with at most `max_n` vertices
/// (clamped to 1..=9).
pub fn run(max_n: usize) -> Vec<CheckOutcome> {
    let max_n = max_n.clamp(1, 9);
    let trees = all_trees(max_n);
    vec![
        enumeration_mean(&trees),
        enumeration_count(&trees),
        factorial_filter(&trees),
        closed_vs_recurrence(&trees),
        minus_one_relation(&trees),
        class_formulas(),
        minima_vs_exhaustive(max_n),
        star_maximum(&trees),
    ]
}

fn enumeration_mean(trees: &[RootedTree]) -> CheckOutcome {
    let mut failures = Vec::new();
    for t in trees {
        let mut total = 0u64;
        let mut count = 0u64;
        for arr in enumerate_projective(t, u64::MAX).expect("no cap") {
            total += sum_edge_lengths(t, &arr, LengthVariant::Standard).expect("sizes match");
            count += 1;
        }
        let mean = ExactRational::new(total, count);
        let exact = expected_d_projective(t, Method::ClosedForm);
        if mean != exact {
            failures.push(format!("tree {t}: enumeration {mean}, closed form {exact}"));
        }
    }
    outcome("enumeration_mean", failures, trees.len())
}

fn enumeration_count(trees: &[RootedTree]) -> CheckOutcome {
    let mut failures = Vec::new();
    for t in trees {
        let listed = enumerate_projective(t, u64::MAX).expect("no cap").count();
        let count = count_projective(t);
        if BigCount::from(listed) != count {
            failures.push(format!("tree {t}: listed {listed}, product {count}"));
        }
    }
    outcome("enumeration_count", failures, trees.len())
}

fn factorial_filter(trees: &[RootedTree]) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for t in trees.iter().filter(|t| t.n() <= FACTORIAL_FILTER_MAX) {
        checked += 1;
        let mut total = 0u64;
        let mut count = 0u64;
        for order in (1..=t.n()).permutations(t.n()) {
            let arr = LinearArrangement::from_order(order).expect("a permutation");
            if is_projective(t, &arr).expect("sizes match") {
                total += sum_edge_lengths(t, &arr, LengthVariant::Standard).expect("sizes match");
                count += 1;
            }
        }
        if BigCount::from(count) != count_projective(t) {
            failures.push(format!("tree {t}: {count} projective orders"));
        } else if ExactRational::new(total, count) != expected_d_projective(t, Method::ClosedForm) {
            failures.push(format!("tree {t}: filtered mean differs"));
        }
    }
    outcome("factorial_filter", failures, checked)
}

fn closed_vs_recurrence(trees: &[RootedTree]) -> CheckOutcome {
    let failures = trees
        .iter()
        .filter(|t| {
            expected_d_projective(t, Method::ClosedForm) != expected_d_projective(t, Method::Recurrence)
                || expected_dprime_projective(t, Method::ClosedForm)
                    != expected_dprime_projective(t, Method::Recurrence)
        })
        .map(|t| format!("tree {t}"))
        .collect();
    outcome("closed_vs_recurrence", failures, trees.len())
}

fn minus_one_relation(trees: &[RootedTree]) -> CheckOutcome {
    let failures = trees
        .iter()
        .filter(|t| {
            let shift = ExactRational::from_integer(t.n() as i64 - 1);
            expected_dprime_projective(t, Method::ClosedForm) != expected_d_projective(t, Method::ClosedForm) - shift
        })
        .map(|t| format!("tree {t}"))
        .collect();
    outcome("minus_one_relation", failures, trees.len())
}

fn class_formulas() -> CheckOutcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for class in TreeClass::ALL {
        for n in class.min_n().max(4)..=50 {
            let ks: Vec<Option<usize>> = if class == TreeClass::Linear {
                (0..n).map(Some).collect()
            } else {
                vec![None]
            };
            for k in ks {
                checked += 1;
                let tree = make_class(class, n, k).expect("n is in range");
                let (count, value) = class_formula(class, n, k).expect("n is in range");
                if count != count_projective(&tree) || value != expected_d_projective(&tree, Method::ClosedForm) {
                    failures.push(format!("{class} n={n} k={k:?}"));
                }
            }
        }
    }
    outcome("class_formulas", failures, checked)
}

fn minima_vs_exhaustive(max_n: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut memo = MemoTable::new();
    for n in 1..=max_n {
        let trees: Vec<RootedTree> = enumerate_rooted_trees(n).expect("capped").collect();
        let best = trees
            .iter()
            .map(|t| expected_d_projective(t, Method::ClosedForm))
            .min()
            .expect("at least one tree");
        let attaining: Vec<RootedTree> = trees
            .into_iter()
            .filter(|t| expected_d_projective(t, Method::ClosedForm) == best)
            .collect();
        let entry = min_expected(n, &mut memo).expect("n is within the cap");
        if entry.value != best || code_set(&entry.trees) != code_set(&attaining) {
            failures.push(format!("n={n}: dp {} vs exhaustive {best}", entry.value));
        }
    }
    outcome("minima_vs_exhaustive", failures, max_n)
}

fn star_maximum(trees: &[RootedTree]) -> CheckOutcome {
    let mut failures = Vec::new();
    for t in trees {
        let (max, star) = max_expected(t.n()).expect("n >= 1");
        let value = expected_d_projective(t, Method::ClosedForm);
        if value > max || (value == max && t.canonical_code() != star.canonical_code()) {
            failures.push(format!("tree {t}: {value} against maximum {max}"));
        }
    }
    outcome("star_maximum", failures, trees.len())
}
