//! Exact expected sums of edge lengths.
//!
//! Under uniformly random projective arrangements the expectation of `D`
//! depends only on subtree sizes `n_v` and out-degrees `d_v`:
//!
//! ```text
//! E_pr[D] = (d_r (2n + 1) + n - 1) / 6 + sum over children u of E_pr[D(subtree u)]
//!         = ( -1 + sum_v n_v (2 d_v + 1) ) / 6
//! ```
//!
//! Both forms are evaluated here, in exact rational arithmetic.

use std::str::FromStr;

use num_bigint::BigInt;

use crate::arrangement::LengthVariant;
use crate::numeric::{factorial, BigCount, ExactRational};
use crate::tree::{RootedTree, SubtreeMetrics, TreeClass, TreeError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpectationError {
    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        allowed: String,
    },
}

impl ExpectationError {
    pub fn name(&self) -> &'static str {
        "OutOfRange"
    }
}

/// How to evaluate the projective expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Single pass over `n_v (2 d_v + 1)`.
    #[default]
    ClosedForm,
    /// Bottom-up over subtrees, adding root-edge contributions.
    Recurrence,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" | "closed_form" => Ok(Method::ClosedForm),
            "recurrence" => Ok(Method::Recurrence),
            _ => Err(format!("unknown method {s:?} (expected closed or recurrence)")),
        }
    }
}

fn rational(numer: i128, denom: i128) -> ExactRational {
    ExactRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `E[D] = (n^2 - 1) / 3` over all `n!` arrangements.
pub fn expected_d_unconstrained(n: usize) -> ExactRational {
    let n = n as i128;
    rational(n * n - 1, 3)
}

/// Probability that two given vertices end up at distance `d` in a uniformly
/// random unconstrained arrangement of `n` vertices: `2 (n - d) / (n (n - 1))`.
pub fn edge_length_probability(n: usize, d: usize) -> Result<ExactRational, ExpectationError> {
    if n < 2 {
        return Err(ExpectationError::OutOfRange {
            what: "n",
            value: n,
            allowed: "n >= 2".into(),
        });
    }
    if d == 0 || d >= n {
        return Err(ExpectationError::OutOfRange {
            what: "d",
            value: d,
            allowed: format!("1..={}", n - 1),
        });
    }
    let (n, d) = (n as i128, d as i128);
    Ok(rational(2 * (n - d), n * (n - 1)))
}

/// Expected anchor of a root edge whose child subtree has `child_size` vertices:
/// `(n_u + 1) / 2`.
pub fn expected_anchor(child_size: usize) -> Result<ExactRational, ExpectationError> {
    if child_size == 0 {
        return Err(ExpectationError::OutOfRange {
            what: "n_u",
            value: 0,
            allowed: "n_u >= 1".into(),
        });
    }
    Ok(rational(child_size as i128 + 1, 2))
}

/// Expected coanchor of a root edge in an `n`-vertex tree whose child subtree
/// has `child_size` vertices: `(n - n_u - 1) / 3`.
pub fn expected_coanchor(n: usize, child_size: usize) -> Result<ExactRational, ExpectationError> {
    if child_size == 0 || child_size >= n {
        return Err(ExpectationError::OutOfRange {
            what: "n_u",
            value: child_size,
            allowed: format!("1..={}", n.saturating_sub(1)),
        });
    }
    Ok(rational(n as i128 - child_size as i128 - 1, 3))
}

/// Expected length of the edge from the root to a child: anchor plus
/// coanchor, `(2n + n_u + 1) / 6`.
pub fn expected_root_edge(n: usize, child_size: usize) -> Result<ExactRational, ExpectationError> {
    Ok(expected_anchor(child_size)? + expected_coanchor(n, child_size)?)
}

/// Expected anchor and coanchor of every edge leaving the root, in child order.
pub fn root_edge_expectations(tree: &RootedTree) -> Vec<(Vertex, ExactRational, ExactRational)> {
    let metrics = tree.metrics();
    let n = tree.n();
    tree.children(tree.root())
        .iter()
        .map(|&u| {
            let nu = metrics.size(u);
            let anchor = expected_anchor(nu).expect("subtree sizes are positive");
            let coanchor = expected_coanchor(n, nu).expect("a child subtree is smaller than the tree");
            (u, anchor, coanchor)
        })
        .collect()
}

/// `sum_v n_v (2 d_v + 1)`, the quantity both closed forms are built on.
///
/// The sum is at most `2.5 n^2`, so 128 bits hold it exactly for any tree
/// that fits in memory.
pub fn size_degree_sum(metrics: &SubtreeMetrics) -> u128 {
    metrics
        .sizes()
        .iter()
        .zip(metrics.out_degrees())
        .map(|(&s, &d)| s as u128 * (2 * d as u128 + 1))
        .sum()
}

/// `E_pr[D]`, the expected sum of edge lengths over uniformly random
/// projective arrangements. `O(n)` time and space with either method.
pub fn expected_d_projective(tree: &RootedTree, method: Method) -> ExactRational {
    let metrics = tree.metrics();
    expected_d_projective_with(tree, &metrics, method)
}

/// As [`expected_d_projective`] with precomputed metrics.
pub fn expected_d_projective_with(tree: &RootedTree, metrics: &SubtreeMetrics, method: Method) -> ExactRational {
    match method {
        Method::ClosedForm => {
            let sum = size_degree_sum(metrics);
            ExactRational::new(BigInt::from(sum) - 1, 6)
        }
        Method::Recurrence => recurrence(tree, metrics, |d, n| (d * (2 * n + 1) + n - 1) as i128),
    }
}

/// Evaluates `E(v) = local(d_v, n_v) / 6 + sum over children of E(child)`
/// bottom-up and returns `E(root)`. Every local term has denominator 6, so
/// `6 E(v)` is carried as an integer.
fn recurrence<F>(tree: &RootedTree, metrics: &SubtreeMetrics, local: F) -> ExactRational
where
    F: Fn(usize, usize) -> i128,
{
    let mut sixfold = vec![0i128; tree.n()];
    for &v in tree.bfs_order().iter().rev() {
        let d = metrics.out_degree(v);
        if d == 0 {
            continue;
        }
        let mut e = local(d, metrics.size(v));
        for &c in tree.children(v) {
            e += sixfold[c - 1];
        }
        sixfold[v - 1] = e;
    }
    rational(sixfold[tree.root() - 1], 6)
}

/// Expected sum of edge lengths when adjacent vertices count as distance
/// zero: `(5 - 6n + sum_v n_v (2 d_v + 1)) / 6`, or bottom-up with the root
/// term `(d_r (2n - 5) + n - 1) / 6`.
pub fn expected_dprime_projective(tree: &RootedTree, method: Method) -> ExactRational {
    let metrics = tree.metrics();
    match method {
        Method::ClosedForm => {
            let sum = BigInt::from(size_degree_sum(&metrics));
            let n = BigInt::from(tree.n());
            ExactRational::new(sum + 5 - n * 6, 6)
        }
        Method::Recurrence => {
            recurrence(tree, &metrics, |d, n| d as i128 * (2 * n as i128 - 5) + n as i128 - 1)
        }
    }
}

/// `E_pr` under the requested edge-length convention.
pub fn expected_projective(tree: &RootedTree, variant: LengthVariant, method: Method) -> ExactRational {
    match variant {
        LengthVariant::Standard => expected_d_projective(tree, method),
        LengthVariant::MinusOne => expected_dprime_projective(tree, method),
    }
}

/// Closed forms of `(N_pr, E_pr[D])` for the named tree classes, without
/// building the tree. `k` is only used by linear trees.
pub fn class_formula(class: TreeClass, n: usize, k: Option<usize>) -> Result<(BigCount, ExactRational), TreeError> {
    let k = class.normalize(n, k)?;
    let nn = n as i128;
    let fact = |m: usize| factorial(m as u64);
    let (count, expectation) = match class {
        TreeClass::StarHub => (fact(n), rational(nn * nn - 1, 3)),
        TreeClass::StarLeaf => (fact(n - 1) * 2u32, rational(nn * (2 * nn - 1), 6)),
        TreeClass::QuasiStarHub => (fact(n - 1) * 2u32, rational(2 * nn * nn - 2 * nn + 3, 6)),
        TreeClass::QuasiStarFarLeaf => (fact(n - 2) * 4u32, rational(2 * nn * nn - 2 * nn + 3, 6)),
        TreeClass::QuasiStarBridge => (fact(n - 2) * 6u32, rational(2 * nn * nn - 3 * nn + 7, 6)),
        TreeClass::QuasiStarEdgeLeaf => (fact(n - 2) * 4u32, rational(2 * nn * nn - 3 * nn + 7, 6)),
        TreeClass::Linear if k == 0 => (BigCount::from(2u32).pow(n as u32 - 1), rational((nn - 1) * (nn + 2), 4)),
        TreeClass::Linear => {
            let kk = k as i128;
            (
                BigCount::from(2u32).pow(n as u32 - 2) * 3u32,
                rational((nn - 1) * (3 * nn + 10) + 6 * kk * (kk + 1 - nn), 12),
            )
        }
    };
    Ok((count, expectation))
}
