//! Linear arrangements of rooted trees.
//!
//! A projective arrangement is built by choosing, for every vertex `v`, an
//! order of its `d_v + 1` segments: `v` itself plus one segment per child
//! subtree. Every choice gives a distinct projective arrangement and every
//! projective arrangement arises this way, which gives counting,
//! enumeration and rejection-free uniform sampling.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numeric::BigCount;
use crate::tree::{RootedTree, Vertex};

/// Enumeration refuses trees with more projective arrangements than this.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArrangementError {
    #[error("arrangement has {arrangement} positions but the tree has {tree} vertices")]
    SizeMismatch { tree: usize, arrangement: usize },
    #[error("not a permutation of 1..={n}")]
    NotAPermutation { n: usize },
    #[error("tree has {count} projective arrangements, more than the cap of {cap}")]
    CapExceeded { count: BigCount, cap: u64 },
    #[error("cannot parse arrangement: {0}")]
    Parse(String),
}

impl ArrangementError {
    pub fn name(&self) -> &'static str {
        match self {
            ArrangementError::SizeMismatch { .. } => "SizeMismatch",
            ArrangementError::NotAPermutation { .. } => "NotAPermutation",
            ArrangementError::CapExceeded { .. } => "CapExceeded",
            ArrangementError::Parse(_) => "Parse",
        }
    }
}

/// Bijection from vertices `1..=n` to positions `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearArrangement {
    pos: Vec<usize>,
    inverse: Vec<Vertex>,
}

impl LinearArrangement {
    /// From `pos[v - 1]` = position of vertex `v`.
    pub fn from_positions(pos: Vec<usize>) -> Result<Self, ArrangementError> {
        let inverse = invert(&pos)?;
        Ok(LinearArrangement { pos, inverse })
    }

    /// From the vertex sequence read left to right.
    pub fn from_order(order: Vec<Vertex>) -> Result<Self, ArrangementError> {
        let pos = invert(&order)?;
        Ok(LinearArrangement { pos, inverse: order })
    }

    pub fn identity(n: usize) -> Self {
        let ids: Vec<usize> = (1..=n).collect();
        LinearArrangement {
            pos: ids.clone(),
            inverse: ids,
        }
    }

    pub fn n(&self) -> usize {
        self.pos.len()
    }

    pub fn position(&self, v: Vertex) -> usize {
        self.pos[v - 1]
    }

    pub fn vertex_at(&self, p: usize) -> Vertex {
        self.inverse[p - 1]
    }

    pub fn positions(&self) -> &[usize] {
        &self.pos
    }

    /// Vertices by position.
    pub fn order(&self) -> &[Vertex] {
        &self.inverse
    }

    /// Mirror image: position `p` becomes `n + 1 - p`.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        let pos = self.pos.iter().map(|&p| n + 1 - p).collect();
        let inverse = self.inverse.iter().rev().copied().collect();
        LinearArrangement { pos, inverse }
    }
}

fn invert(perm: &[usize]) -> Result<Vec<usize>, ArrangementError> {
    let n = perm.len();
    let mut inverse = vec![0usize; n];
    for (i, &x) in perm.iter().enumerate() {
        if x == 0 || x > n || inverse[x - 1] != 0 {
            return Err(ArrangementError::NotAPermutation { n });
        }
        inverse[x - 1] = i + 1;
    }
    Ok(inverse)
}

impl fmt::Debug for LinearArrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearArrangement[{self}]")
    }
}

impl fmt::Display for LinearArrangement {
    /// Vertex ids by position, whitespace separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.inverse.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for LinearArrangement {
    type Err = ArrangementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let order = s
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| ArrangementError::Parse(format!("not a vertex id: {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        LinearArrangement::from_order(order)
    }
}

/// Edge length convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LengthVariant {
    /// `|pos(u) - pos(v)|`
    #[default]
    Standard,
    /// `|pos(u) - pos(v)| - 1`, so adjacent words are at distance zero.
    MinusOne,
}

impl LengthVariant {
    pub fn name(self) -> &'static str {
        match self {
            LengthVariant::Standard => "standard",
            LengthVariant::MinusOne => "minus_one",
        }
    }
}

impl FromStr for LengthVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(LengthVariant::Standard),
            "minus_one" => Ok(LengthVariant::MinusOne),
            _ => Err(format!("unknown length variant {s:?} (expected standard or minus_one)")),
        }
    }
}

fn check_size(tree: &RootedTree, arr: &LinearArrangement) -> Result<(), ArrangementError> {
    if tree.n() != arr.n() {
        return Err(ArrangementError::SizeMismatch {
            tree: tree.n(),
            arrangement: arr.n(),
        });
    }
    Ok(())
}

/// Sum of standard edge lengths for a position vector of matching size.
pub(crate) fn sum_lengths_at(tree: &RootedTree, pos: &[usize]) -> u64 {
    tree.edges()
        .map(|(u, v)| pos[u - 1].abs_diff(pos[v - 1]) as u64)
        .sum()
}

/// Sum of edge lengths `D` of `tree` laid out by `arr`.
pub fn sum_edge_lengths(
    tree: &RootedTree,
    arr: &LinearArrangement,
    variant: LengthVariant,
) -> Result<u64, ArrangementError> {
    check_size(tree, arr)?;
    let d = sum_lengths_at(tree, arr.positions());
    Ok(match variant {
        LengthVariant::Standard => d,
        LengthVariant::MinusOne => d - (tree.n() as u64 - 1),
    })
}

/// True iff every subtree occupies a contiguous run of positions.
pub fn is_projective(tree: &RootedTree, arr: &LinearArrangement) -> Result<bool, ArrangementError> {
    check_size(tree, arr)?;
    let n = tree.n();
    let mut lo = arr.positions().to_vec();
    let mut hi = lo.clone();
    let mut size = vec![1usize; n];
    for &v in tree.bfs_order().iter().rev() {
        let i = v - 1;
        if hi[i] - lo[i] + 1 != size[i] {
            return Ok(false);
        }
        if let Some(p) = tree.parent(v) {
            let j = p - 1;
            lo[j] = lo[j].min(lo[i]);
            hi[j] = hi[j].max(hi[i]);
            size[j] += size[i];
        }
    }
    Ok(true)
}

/// True iff no two edges cross when drawn above the line.
pub fn is_planar(tree: &RootedTree, arr: &LinearArrangement) -> Result<bool, ArrangementError> {
    check_size(tree, arr)?;
    let spans: Vec<(usize, usize)> = tree
        .edges()
        .map(|(u, v)| {
            let (a, b) = (arr.position(u), arr.position(v));
            (a.min(b), a.max(b))
        })
        .collect();
    for (i, &(a, b)) in spans.iter().enumerate() {
        for &(c, d) in &spans[i + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of projective arrangements, `prod_v (d_v + 1)!`.
pub fn count_projective(tree: &RootedTree) -> BigCount {
    let max_degree = tree.vertices().map(|v| tree.out_degree(v)).max().unwrap_or(0);
    let mut table = Vec::with_capacity(max_degree + 2);
    table.push(BigCount::one());
    for k in 1..=max_degree as u64 + 1 {
        let next = &table[k as usize - 1] * k;
        table.push(next);
    }
    tree.vertices()
        .filter(|&v| tree.out_degree(v) > 0)
        .fold(BigCount::one(), |acc, v| acc * &table[tree.out_degree(v) + 1])
}

/// Places every vertex given an order of segments per vertex.
///
/// `segments(v)` lists `v` and its children; `v` stands for itself, a child
/// for the block holding its subtree.
fn linearize<'s, F>(tree: &RootedTree, order: &[Vertex], sizes: &[usize], start: &mut [usize], pos: &mut [usize], segments: F)
where
    F: Fn(Vertex) -> &'s [Vertex],
{
    start[tree.root() - 1] = 1;
    for &v in order {
        let mut cursor = start[v - 1];
        for &s in segments(v) {
            if s == v {
                pos[v - 1] = cursor;
                cursor += 1;
            } else {
                start[s - 1] = cursor;
                cursor += sizes[s - 1];
            }
        }
    }
}

/// Streams every projective arrangement exactly once.
///
/// Per-vertex segment orders advance lexicographically like an odometer
/// whose most significant digit is the root (vertices in breadth-first
/// order). Within a vertex, the segment order `[v, c_1, .., c_d]` comes first.
pub struct ProjectiveArrangements<'t> {
    tree: &'t RootedTree,
    order: Vec<Vertex>,
    sizes: Vec<usize>,
    active: Vec<Vertex>,
    offsets: Vec<usize>,
    perm: Vec<usize>,
    segments: Vec<Vertex>,
    start: Vec<usize>,
    exhausted: bool,
}

impl<'t> ProjectiveArrangements<'t> {
    fn new(tree: &'t RootedTree) -> Self {
        let n = tree.n();
        let order = tree.bfs_order();
        let sizes = tree.metrics().sizes().to_vec();
        let mut offsets = vec![0usize; n + 1];
        for v in 1..=n {
            offsets[v] = offsets[v - 1] + tree.out_degree(v) + 1;
        }
        let perm = (1..=n).flat_map(|v| 0..=tree.out_degree(v)).collect();
        let active = order.iter().copied().filter(|&v| tree.out_degree(v) > 0).collect();
        let mut it = ProjectiveArrangements {
            tree,
            order,
            sizes,
            active,
            offsets,
            perm,
            segments: vec![0; 2 * n - 1],
            start: vec![0; n],
            exhausted: false,
        };
        it.sync_segments();
        it
    }

    fn sync_segments(&mut self) {
        for v in 1..=self.tree.n() {
            let range = self.offsets[v - 1]..self.offsets[v];
            let kids = self.tree.children(v);
            for i in range {
                let idx = self.perm[i];
                self.segments[i] = if idx == 0 { v } else { kids[idx - 1] };
            }
        }
    }

    fn advance(&mut self) -> bool {
        for &v in self.active.iter().rev() {
            let slot = &mut self.perm[self.offsets[v - 1]..self.offsets[v]];
            if next_permutation(slot) {
                return true;
            }
        }
        false
    }
}

impl Iterator for ProjectiveArrangements<'_> {
    type Item = LinearArrangement;

    fn next(&mut self) -> Option<LinearArrangement> {
        if self.exhausted {
            return None;
        }
        let mut pos = vec![0usize; self.tree.n()];
        let (segments, offsets) = (&self.segments, &self.offsets);
        linearize(self.tree, &self.order, &self.sizes, &mut self.start, &mut pos, |v| {
            &segments[offsets[v - 1]..offsets[v]]
        });
        if self.advance() {
            self.sync_segments();
        } else {
            self.exhausted = true;
        }
        Some(LinearArrangement::from_positions(pos).expect("segment layout is a bijection"))
    }
}

/// Rearranges `a` into the next permutation in lexicographic order. Returns
/// `false`, leaving `a` sorted ascending, when `a` was the last one.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let Some(i) = (0..a.len() - 1).rev().find(|&i| a[i] < a[i + 1]) else {
        a.reverse();
        return false;
    };
    let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).expect("a[i + 1] > a[i]");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// All projective arrangements of `tree`, failing if there are more than `cap`.
pub fn enumerate_projective(
    tree: &RootedTree,
    cap: u64,
) -> Result<ProjectiveArrangements<'_>, ArrangementError> {
    let count = count_projective(tree);
    if count > BigCount::from(cap) {
        return Err(ArrangementError::CapExceeded { count, cap });
    }
    Ok(ProjectiveArrangements::new(tree))
}

/// Draws uniformly random projective arrangements of one tree.
///
/// Each draw shuffles every vertex's segments (Fisher-Yates) and lays the
/// tree out in one breadth-first pass, so a draw costs `O(n)`.
pub struct ProjectiveSampler<'t> {
    tree: &'t RootedTree,
    order: Vec<Vertex>,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    segments: Vec<Vertex>,
    start: Vec<usize>,
    pos: Vec<usize>,
}

impl<'t> ProjectiveSampler<'t> {
    pub fn new(tree: &'t RootedTree) -> Self {
        let n = tree.n();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut segments = Vec::with_capacity(2 * n - 1);
        for v in 1..=n {
            segments.push(v);
            segments.extend_from_slice(tree.children(v));
            offsets.push(segments.len());
        }
        ProjectiveSampler {
            tree,
            order: tree.bfs_order(),
            sizes: tree.metrics().sizes().to_vec(),
            offsets,
            segments,
            start: vec![0; n],
            pos: vec![0; n],
        }
    }

    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for v in 1..=self.tree.n() {
            let (a, b) = (self.offsets[v - 1], self.offsets[v]);
            if b - a > 1 {
                self.segments[a..b].shuffle(rng);
            }
        }
        let (segments, offsets) = (&self.segments, &self.offsets);
        linearize(self.tree, &self.order, &self.sizes, &mut self.start, &mut self.pos, |v| {
            &segments[offsets[v - 1]..offsets[v]]
        });
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> LinearArrangement {
        self.draw(rng);
        LinearArrangement::from_positions(self.pos.clone()).expect("segment layout is a bijection")
    }

    /// Standard `D` of a fresh random projective arrangement.
    pub fn sample_sum_edge_lengths<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u64 {
        self.draw(rng);
        sum_lengths_at(self.tree, &self.pos)
    }
}

/// The generator used for every seeded draw in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One uniformly random projective arrangement, reproducible from `seed`.
pub fn sample_projective(tree: &RootedTree, seed: u64) -> LinearArrangement {
    let mut rng = seeded_rng(seed);
    ProjectiveSampler::new(tree).sample(&mut rng)
}
