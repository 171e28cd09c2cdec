//! Trees with extreme `E_pr[D]`.
//!
//! The maximum over `n`-vertex rooted trees is attained only by the star
//! rooted at its hub. Minima have no known closed form and are found by
//! dynamic programming over root degree and the partition of the remaining
//! `n - 1` vertices among the root's subtrees: an optimal tree is a root
//! over a forest of optimal smaller trees.

use std::collections::{BTreeMap, BTreeSet};

use crate::expectation::{expected_d_projective, Method};
use crate::numeric::ExactRational;
use crate::tree::{make_class, CanonicalCode, RootedTree, TreeClass};

/// Largest `n` the minimization accepts unless configured otherwise.
pub const DEFAULT_MINIMA_CAP: usize = 20;

/// Largest `n` for exhaustive rooted tree enumeration by default.
pub const DEFAULT_ROOTED_TREE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtremaError {
    #[error("n must be at least 1")]
    EmptyTree,
    #[error("n = {n} exceeds the configured cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
}

impl ExtremaError {
    pub fn name(&self) -> &'static str {
        match self {
            ExtremaError::EmptyTree => "EmptyTree",
            ExtremaError::CapExceeded { .. } => "CapExceeded",
        }
    }
}

/// `f_M(n) = (n^2 - 1) / 3`, attained by the hub-rooted star.
pub fn max_expected(n: usize) -> Result<(ExactRational, RootedTree), ExtremaError> {
    if n == 0 {
        return Err(ExtremaError::EmptyTree);
    }
    let star = make_class(TreeClass::StarHub, n, None).expect("stars exist for every n >= 1");
    let value = expected_d_projective(&star, Method::ClosedForm);
    Ok((value, star))
}

/// Minimum value for one `n` and every tree attaining it, up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimumEntry {
    pub n: usize,
    pub value: ExactRational,
    /// Canonical forms, ordered by canonical code.
    pub trees: Vec<RootedTree>,
}

/// Minima already computed, keyed by vertex count.
#[derive(Debug, Clone)]
pub struct MemoTable {
    entries: BTreeMap<usize, OptimumEntry>,
    cap: usize,
}

impl Default for MemoTable {
    fn default() -> Self {
        Self::with_cap(DEFAULT_MINIMA_CAP)
    }
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: usize) -> Self {
        MemoTable {
            entries: BTreeMap::new(),
            cap,
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn get(&self, n: usize) -> Option<&OptimumEntry> {
        self.entries.get(&n)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OptimumEntry> {
        self.entries.values()
    }
}

/// `f_m(n)` and all of its minimizers, filling `memo` for every `k <= n`.
pub fn min_expected(n: usize, memo: &mut MemoTable) -> Result<&OptimumEntry, ExtremaError> {
    if n == 0 {
        return Err(ExtremaError::EmptyTree);
    }
    if n > memo.cap {
        return Err(ExtremaError::CapExceeded { n, cap: memo.cap });
    }
    for k in 1..=n {
        if !memo.entries.contains_key(&k) {
            let entry = optimum_for(k, memo);
            memo.entries.insert(k, entry);
        }
    }
    Ok(&memo.entries[&n])
}

/// Requires entries for all `k < n` in `memo`.
fn optimum_for(n: usize, memo: &MemoTable) -> OptimumEntry {
    if n <= 2 {
        let (value, tree) = max_expected(n).expect("n >= 1");
        return OptimumEntry {
            n,
            value,
            trees: vec![tree.canonical_form()],
        };
    }
    let (mut best, _) = max_expected(n).expect("n >= 1");
    let mut winners: BTreeMap<CanonicalCode, RootedTree> = BTreeMap::new();
    for degree in 1..n {
        let root_cost = ExactRational::new((degree * (2 * n + 1) + n - 1) as i64, 6);
        for parts in partitions(n - 1, degree) {
            let mut cost = root_cost.clone();
            let mut abandoned = false;
            for &part in &parts {
                cost += &memo.entries[&part].value;
                if cost > best {
                    abandoned = true;
                    break;
                }
            }
            if abandoned {
                continue;
            }
            if cost < best {
                best = cost;
                winners.clear();
            }
            for t in combine_forests(&parts, |k| memo.entries[&k].trees.as_slice()) {
                let t = t.canonical_form();
                winners.entry(t.canonical_code()).or_insert(t);
            }
        }
    }
    OptimumEntry {
        n,
        value: best,
        trees: winners.into_values().collect(),
    }
}

/// Partitions of `total` into exactly `parts` positive summands, each listed
/// in non-increasing order.
pub fn partitions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(remaining: usize, slots: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // every later slot needs at least 1
        let hi = max_part.min(remaining + 1 - slots);
        let lo = remaining.div_ceil(slots);
        for part in (lo..=hi).rev() {
            prefix.push(part);
            go(remaining - part, slots - 1, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    if parts <= total {
        go(total, parts, total, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Roots over every forest choosing one listed tree per part, without
/// producing isomorphic repeats.
///
/// Parts are a multiset of sizes; `trees_of(k)` lists the distinct
/// candidate trees of size `k`. Among equal-size parts the chosen list
/// indices are forced to be non-decreasing, so each multiset of subtrees
/// is produced once.
pub fn combine_forests<'a, F>(part_sizes: &[usize], trees_of: F) -> ForestProduct<'a>
where
    F: Fn(usize) -> &'a [RootedTree],
{
    let mut sizes = part_sizes.to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let lists: Vec<&'a [RootedTree]> = sizes.iter().map(|&k| trees_of(k)).collect();
    let exhausted = lists.iter().any(|l| l.is_empty());
    ForestProduct {
        index: vec![0; sizes.len()],
        sizes,
        lists,
        exhausted,
    }
}

/// Iterator returned by [`combine_forests`].
pub struct ForestProduct<'a> {
    sizes: Vec<usize>,
    lists: Vec<&'a [RootedTree]>,
    index: Vec<usize>,
    exhausted: bool,
}

impl Iterator for ForestProduct<'_> {
    type Item = RootedTree;

    fn next(&mut self) -> Option<RootedTree> {
        if self.exhausted {
            return None;
        }
        let tree = RootedTree::join_under_root(self.lists.iter().zip(&self.index).map(|(l, &j)| &l[j]));
        self.exhausted = true;
        for i in (0..self.index.len()).rev() {
            if self.index[i] + 1 < self.lists[i].len() {
                self.index[i] += 1;
                for j in i + 1..self.index.len() {
                    self.index[j] = if self.sizes[j] == self.sizes[j - 1] {
                        self.index[j - 1]
                    } else {
                        0
                    };
                }
                self.exhausted = false;
                break;
            }
        }
        Some(tree)
    }
}

/// Every unlabeled rooted tree on `n` vertices, once each, for `n` up to
/// [`DEFAULT_ROOTED_TREE_CAP`].
pub fn enumerate_rooted_trees(n: usize) -> Result<RootedTrees, ExtremaError> {
    enumerate_rooted_trees_capped(n, DEFAULT_ROOTED_TREE_CAP)
}

pub fn enumerate_rooted_trees_capped(n: usize, cap: usize) -> Result<RootedTrees, ExtremaError> {
    if n == 0 {
        return Err(ExtremaError::EmptyTree);
    }
    if n > cap {
        return Err(ExtremaError::CapExceeded { n, cap });
    }
    Ok(RootedTrees {
        levels: Some((0..n).collect()),
    })
}

/// Canonical level sequences in reverse lexicographic order, from the path
/// down to the star (Beyer and Hedetniemi's successor rule).
pub struct RootedTrees {
    levels: Option<Vec<usize>>,
}

impl RootedTrees {
    fn successor(levels: &[usize]) -> Option<Vec<usize>> {
        let p = levels.iter().rposition(|&l| l > 1)?;
        let q = levels[..p].iter().rposition(|&l| l == levels[p] - 1)?;
        let shift = p - q;
        let mut next = levels.to_vec();
        for i in p..next.len() {
            next[i] = next[i - shift];
        }
        Some(next)
    }

    fn tree_of(levels: &[usize]) -> RootedTree {
        let mut last_at_level = vec![0usize; levels.len()];
        let heads: Vec<usize> = levels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                last_at_level[l] = i + 1;
                if l == 0 {
                    0
                } else {
                    last_at_level[l - 1]
                }
            })
            .collect();
        RootedTree::from_head_vector(&heads).expect("level sequences describe trees")
    }
}

impl Iterator for RootedTrees {
    type Item = RootedTree;

    fn next(&mut self) -> Option<RootedTree> {
        let levels = self.levels.take()?;
        let tree = Self::tree_of(&levels);
        self.levels = Self::successor(&levels);
        Some(tree)
    }
}

/// Codes of the trees in a minimizer set, for comparisons.
pub fn code_set(trees: &[RootedTree]) -> BTreeSet<CanonicalCode> {
    trees.iter().map(RootedTree::canonical_code).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    /// Table of (# rooted trees, # minimizers, minimum) for n = 1..=20.
    const MINIMA_TABLE: [(usize, usize, &str); 20] = [
        (1, 1, "0"),
        (1, 1, "1"),
        (1, 1, "5/2"),
        (4, 2, "9/2"),
        (9, 1, "19/3"),
        (20, 1, "26/3"),
        (48, 1, "11"),
        (115, 2, "83/6"),
        (286, 1, "33/2"),
        (719, 2, "58/3"),
        (1842, 1, "22"),
        (4766, 1, "151/6"),
        (12486, 2, "85/3"),
        (32973, 1, "63/2"),
        (87811, 1, "104/3"),
        (235381, 1, "38"),
        (634847, 1, "83/2"),
        (1721159, 2, "45"),
        (4688676, 2, "97/2"),
        (12826228, 2, "52"),
    ];

    #[test]
    fn maxima() {
        assert_eq!(max_expected(3).unwrap().0, r("8/3"));
        let (v, t) = max_expected(8).unwrap();
        assert_eq!(v, r("21"));
        assert_eq!(t.out_degree(t.root()), 7);
        assert!(max_expected(0).is_err());
    }

    #[test]
    fn six_vertex_maximum_is_unique() {
        let values: Vec<_> = enumerate_rooted_trees(6)
            .unwrap()
            .map(|t| (expected_d_projective(&t, Method::ClosedForm), t))
            .collect();
        assert_eq!(values.len(), 20);
        let top = r("35/3");
        assert!(values.iter().all(|(v, _)| *v <= top));
        let at_top: Vec<_> = values.iter().filter(|(v, _)| *v == top).collect();
        assert_eq!(at_top.len(), 1);
        assert_eq!(at_top[0].1.out_degree(at_top[0].1.root()), 5);
    }

    #[test]
    fn partition_generation() {
        assert_eq!(partitions(5, 2), vec![vec![4, 1], vec![3, 2]]);
        assert_eq!(partitions(6, 3), vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]);
        assert_eq!(partitions(3, 3), vec![vec![1, 1, 1]]);
        assert!(partitions(2, 3).is_empty());
        assert_eq!(partitions(0, 0), vec![Vec::<usize>::new()]);
        // p(19) = 490
        let total: usize = (1..=19).map(|d| partitions(19, d).len()).sum();
        assert_eq!(total, 490);
    }

    #[test]
    fn minimum_examples() {
        let mut memo = MemoTable::new();
        let e7 = min_expected(7, &mut memo).unwrap().clone();
        assert_eq!((e7.value, e7.trees.len()), (r("11"), 1));
        let e10 = min_expected(10, &mut memo).unwrap().clone();
        assert_eq!((e10.value, e10.trees.len()), (r("58/3"), 2));
        let e2 = min_expected(2, &mut memo).unwrap();
        assert_eq!((e2.value.clone(), e2.trees.len()), (r("1"), 1));
    }

    #[test]
    fn minimum_cap() {
        let mut memo = MemoTable::with_cap(5);
        assert_eq!(min_expected(6, &mut memo), Err(ExtremaError::CapExceeded { n: 6, cap: 5 }));
        assert!(min_expected(5, &mut memo).is_ok());
        assert_eq!(memo.len(), 5);
        assert_eq!(min_expected(0, &mut memo), Err(ExtremaError::EmptyTree));
    }

    #[test]
    fn minima_table_up_to_sixteen() {
        let mut memo = MemoTable::new();
        min_expected(16, &mut memo).unwrap();
        for (i, &(_, count, value)) in MINIMA_TABLE.iter().enumerate().take(16) {
            let e = memo.get(i + 1).unwrap();
            assert_eq!(e.value, r(value), "n = {}", i + 1);
            assert_eq!(e.trees.len(), count, "n = {}", i + 1);
        }
    }

    #[test]
    fn minimizers_attain_value() {
        let mut memo = MemoTable::new();
        min_expected(14, &mut memo).unwrap();
        for e in memo.iter() {
            for t in &e.trees {
                assert_eq!(t.n(), e.n);
                assert_eq!(expected_d_projective(t, Method::Recurrence), e.value);
            }
            assert_eq!(code_set(&e.trees).len(), e.trees.len());
        }
    }

    #[test]
    fn memo_is_consistent_with_fresh_runs() {
        let mut big = MemoTable::new();
        min_expected(13, &mut big).unwrap();
        for k in 1..=13 {
            let mut fresh = MemoTable::new();
            assert_eq!(min_expected(k, &mut fresh).unwrap(), big.get(k).unwrap());
        }
    }

    #[test]
    fn minima_agree_with_exhaustive_search() {
        let mut memo = MemoTable::new();
        for n in 1..=9 {
            let all: Vec<_> = enumerate_rooted_trees(n)
                .unwrap()
                .map(|t| (expected_d_projective(&t, Method::ClosedForm), t))
                .collect();
            let min = all.iter().map(|(v, _)| v.clone()).min().unwrap();
            let brute: BTreeSet<_> = all.iter().filter(|(v, _)| *v == min).map(|(_, t)| t.canonical_code()).collect();
            let entry = min_expected(n, &mut memo).unwrap();
            assert_eq!(entry.value, min, "n = {n}");
            assert_eq!(code_set(&entry.trees), brute, "n = {n}");
            if n >= 3 {
                assert!(entry.value < max_expected(n).unwrap().0);
            }
        }
    }

    #[test]
    fn rooted_tree_counts() {
        let expected = [1, 1, 2, 4, 9, 20, 48, 115, 286, 719];
        for (i, &count) in expected.iter().enumerate() {
            let n = i + 1;
            let trees: Vec<_> = enumerate_rooted_trees(n).unwrap().collect();
            assert_eq!(trees.len(), count, "n = {n}");
            assert!(trees.iter().all(|t| t.n() == n));
            let codes: HashSet<_> = trees.iter().map(RootedTree::canonical_code).collect();
            assert_eq!(codes.len(), count, "n = {n}");
        }
        assert!(matches!(enumerate_rooted_trees(11), Err(ExtremaError::CapExceeded { n: 11, cap: 10 })));
        assert_eq!(enumerate_rooted_trees_capped(11, 11).unwrap().count(), 1842);
    }

    #[test]
    fn forest_product_without_repeats() {
        let a = RootedTree::singleton();
        let path: RootedTree = "0 1 2".parse().unwrap();
        let cherry: RootedTree = "0 1 1".parse().unwrap();
        let pair: RootedTree = "0 1".parse().unwrap();

        // parts (1, 3, 3): one 1-vertex tree, two 3-vertex trees -> 3 forests, not 4
        let ones = vec![a.clone()];
        let threes = vec![path.clone(), cherry.clone()];
        let twos = vec![pair.clone()];
        let lookup = |k: usize| -> &[RootedTree] {
            match k {
                1 => &ones,
                2 => &twos,
                3 => &threes,
                _ => &[],
            }
        };
        let out: Vec<_> = combine_forests(&[1, 3, 3], lookup).collect();
        assert_eq!(out.len(), 3);
        assert_eq!(code_set(&out).len(), 3);

        let stars: Vec<_> = combine_forests(&[1, 1, 1], lookup).collect();
        assert_eq!(stars.len(), 1);
        assert_eq!(stars[0].to_string(), "0 1 1 1");

        let mixed: Vec<_> = combine_forests(&[2, 3], lookup).collect();
        assert_eq!(mixed.len(), 2);
        assert_eq!(code_set(&mixed).len(), 2);

        // the plain Cartesian product would repeat a shape
        let plain: Vec<_> = threes
            .iter()
            .flat_map(|x| threes.iter().map(|y| RootedTree::join_under_root([&a, x, y])).collect::<Vec<_>>())
            .collect();
        assert_eq!(plain.len(), 4);
        assert_eq!(code_set(&plain).len(), 3);
        assert_eq!(code_set(&plain), code_set(&out));

        assert_eq!(combine_forests(&[4], lookup).count(), 0);
    }
}
