//! Rooted trees, their subtree metrics, named tree classes and canonical codes.
//!
//! Vertices are numbered `1..=n`. A tree is serialized as a head vector: the
//! `i`-th entry holds the parent of vertex `i`, and `0` marks the root.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

/// Vertex id, 1-based.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("bad root {root}: the root must be a vertex without a head")]
    BadRoot { root: usize },
    #[error("no vertex has head 0, so there is no root")]
    NoRoot,
    #[error("vertex {vertex} has more than one head")]
    MultipleHeads { vertex: Vertex },
    #[error("vertex {vertex} is not connected to the root")]
    Disconnected { vertex: Vertex },
    #[error("cycle through vertex {vertex}")]
    CycleDetected { vertex: Vertex },
    #[error("{class} is undefined for n = {n}{}", .k.map(|k| format!(", k = {k}")).unwrap_or_default())]
    UnsupportedSize { class: TreeClass, n: usize, k: Option<usize> },
    #[error("cannot parse head vector: {0}")]
    Parse(String),
    #[error("malformed canonical code")]
    BadCode,
}

impl TreeError {
    /// Short name of the violated condition, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            TreeError::Empty => "Empty",
            TreeError::VertexOutOfRange { .. } => "VertexOutOfRange",
            TreeError::BadRoot { .. } => "BadRoot",
            TreeError::NoRoot => "NoRoot",
            TreeError::MultipleHeads { .. } => "MultipleHeads",
            TreeError::Disconnected { .. } => "Disconnected",
            TreeError::CycleDetected { .. } => "CycleDetected",
            TreeError::UnsupportedSize { .. } => "UnsupportedSize",
            TreeError::Parse(_) => "Parse",
            TreeError::BadCode => "BadCode",
        }
    }
}

/// A directed tree with edges oriented away from the root.
///
/// Immutable once built. Children are kept in insertion order, stored in a
/// flat adjacency array so that trees with millions of vertices stay compact.
/// Two trees are equal when they have the same head vector, whatever the
/// order in which children were inserted.
#[derive(Clone)]
pub struct RootedTree {
    root: Vertex,
    parent: Vec<usize>,
    child_offsets: Vec<usize>,
    child_list: Vec<Vertex>,
}

impl RootedTree {
    /// Validates `(child, parent)` links and builds the tree rooted at `root`.
    ///
    /// Checks single-headedness, that every non-root vertex has a head,
    /// and that every vertex is reachable from the root (which, given the
    /// first two, rules out cycles).
    pub fn build(n: usize, links: &[(Vertex, Vertex)], root: Vertex) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if root == 0 || root > n {
            return Err(TreeError::BadRoot { root });
        }
        let in_range = |v: usize| {
            if v == 0 || v > n {
                Err(TreeError::VertexOutOfRange { vertex: v, n })
            } else {
                Ok(v)
            }
        };
        let mut parent = vec![0usize; n];
        let mut degree = vec![0usize; n + 1];
        for &(child, head) in links {
            in_range(child)?;
            in_range(head)?;
            if child == head {
                return Err(TreeError::CycleDetected { vertex: child });
            }
            if parent[child - 1] != 0 {
                return Err(TreeError::MultipleHeads { vertex: child });
            }
            if child == root {
                return Err(TreeError::BadRoot { root });
            }
            parent[child - 1] = head;
            degree[head] += 1;
        }
        if let Some(v) = (1..=n).find(|&v| v != root && parent[v - 1] == 0) {
            return Err(TreeError::Disconnected { vertex: v });
        }

        let mut child_offsets = vec![0usize; n + 1];
        for v in 1..=n {
            child_offsets[v] = child_offsets[v - 1] + degree[v];
        }
        let mut fill = child_offsets.clone();
        let mut child_list = vec![0usize; n - 1];
        for &(child, head) in links {
            child_list[fill[head - 1]] = child;
            fill[head - 1] += 1;
        }

        let tree = RootedTree {
            root,
            parent,
            child_offsets,
            child_list,
        };
        let order = tree.bfs_order();
        if order.len() < n {
            let mut seen = vec![false; n + 1];
            for &v in &order {
                seen[v] = true;
            }
            let vertex = (1..=n).find(|&v| !seen[v]).unwrap_or(root);
            return Err(TreeError::CycleDetected { vertex });
        }
        Ok(tree)
    }

    /// Builds a tree from a head vector (`0` marks the root).
    pub fn from_head_vector(heads: &[usize]) -> Result<Self, TreeError> {
        if heads.is_empty() {
            return Err(TreeError::Empty);
        }
        let mut roots = heads.iter().enumerate().filter(|(_, &h)| h == 0).map(|(i, _)| i + 1);
        let root = roots.next().ok_or(TreeError::NoRoot)?;
        if let Some(second) = roots.next() {
            return Err(TreeError::Disconnected { vertex: second });
        }
        let links: Vec<(Vertex, Vertex)> = heads
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0)
            .map(|(i, &h)| (i + 1, h))
            .collect();
        Self::build(heads.len(), &links, root)
    }

    /// Single vertex tree.
    pub fn singleton() -> Self {
        RootedTree {
            root: 1,
            parent: vec![0],
            child_offsets: vec![0, 0],
            child_list: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent[v - 1] {
            0 => None,
            p => Some(p),
        }
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.child_list[self.child_offsets[v - 1]..self.child_offsets[v]]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.child_offsets[v] - self.child_offsets[v - 1]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n()
    }

    /// Edges as `(parent, child)` pairs, grouped by parent.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |v| self.children(v).iter().map(move |&c| (v, c)))
    }

    pub fn head_vector(&self) -> Vec<usize> {
        self.parent.clone()
    }

    /// Vertices in breadth-first order from the root; parents precede children.
    pub fn bfs_order(&self) -> Vec<Vertex> {
        let mut order = Vec::with_capacity(self.n());
        order.push(self.root);
        let mut i = 0;
        while i < order.len() && order.len() <= self.n() {
            let v = order[i];
            order.extend_from_slice(self.children(v));
            i += 1;
        }
        order
    }

    /// Vertices of the subtree rooted at `v`, in breadth-first order.
    pub fn subtree_vertices(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &c in self.children(u) {
                out.push(c);
                queue.push_back(c);
            }
        }
        out
    }

    pub fn metrics(&self) -> SubtreeMetrics {
        SubtreeMetrics::compute(self)
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        CanonicalCode::of(self)
    }

    /// The isomorphic tree whose vertices are numbered in the preorder of the
    /// canonical code. Isomorphic trees have identical canonical forms.
    pub fn canonical_form(&self) -> RootedTree {
        RootedTree::from_canonical_code(&self.canonical_code())
            .expect("canonical codes produced by CanonicalCode::of are well formed")
    }

    /// Rebuilds a tree from a canonical code, numbering vertices in preorder.
    pub fn from_canonical_code(code: &CanonicalCode) -> Result<Self, TreeError> {
        let mut heads = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for &b in code.as_bytes() {
            match b {
                b'(' => {
                    if !heads.is_empty() && stack.is_empty() {
                        return Err(TreeError::BadCode);
                    }
                    heads.push(stack.last().copied().unwrap_or(0));
                    stack.push(heads.len());
                }
                b')' => {
                    stack.pop().ok_or(TreeError::BadCode)?;
                }
                _ => return Err(TreeError::BadCode),
            }
        }
        if !stack.is_empty() || heads.is_empty() {
            return Err(TreeError::BadCode);
        }
        RootedTree::from_head_vector(&heads)
    }

    /// A new tree whose root has the given subtrees as children, in order.
    ///
    /// The new root is vertex 1; each subtree's vertices follow in a block,
    /// keeping their relative numbering.
    pub fn join_under_root<'a, I>(subtrees: I) -> RootedTree
    where
        I: IntoIterator<Item = &'a RootedTree>,
    {
        let mut heads = vec![0usize];
        for sub in subtrees {
            let offset = heads.len();
            heads.extend(sub.parent.iter().map(|&p| if p == 0 { 1 } else { p + offset }));
        }
        RootedTree::from_head_vector(&heads).expect("joining valid trees yields a valid tree")
    }

    /// Same shape with vertex `v` renamed to `mapping[v - 1]`.
    pub fn relabel(&self, mapping: &[Vertex]) -> Result<RootedTree, TreeError> {
        let n = self.n();
        let mut heads = vec![0usize; n];
        for v in 1..=n {
            let new_v = *mapping.get(v - 1).ok_or(TreeError::VertexOutOfRange { vertex: v, n })?;
            if new_v == 0 || new_v > n {
                return Err(TreeError::VertexOutOfRange { vertex: new_v, n });
            }
            heads[new_v - 1] = self.parent(v).map_or(0, |p| mapping[p - 1]);
        }
        RootedTree::from_head_vector(&heads)
    }
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.parent == other.parent
    }
}

impl Eq for RootedTree {}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootedTree[{self}]")
    }
}

impl fmt::Display for RootedTree {
    /// Head vector, whitespace separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parent.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for RootedTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let heads = s
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| TreeError::Parse(format!("not a vertex id: {tok:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        RootedTree::from_head_vector(&heads)
    }
}

/// Subtree sizes and out-degrees, indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeMetrics {
    size: Vec<usize>,
    out_degree: Vec<usize>,
}

impl SubtreeMetrics {
    /// One pass in reverse breadth-first order.
    pub fn compute(tree: &RootedTree) -> Self {
        let n = tree.n();
        let mut size = vec![1usize; n];
        for &v in tree.bfs_order().iter().rev() {
            if let Some(p) = tree.parent(v) {
                size[p - 1] += size[v - 1];
            }
        }
        let out_degree = (1..=n).map(|v| tree.out_degree(v)).collect();
        SubtreeMetrics { size, out_degree }
    }

    pub fn size(&self, v: Vertex) -> usize {
        self.size[v - 1]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out_degree[v - 1]
    }

    /// Sizes for vertices `1..=n`, in vertex order.
    pub fn sizes(&self) -> &[usize] {
        &self.size
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out_degree
    }
}

/// Canonical encoding of an unlabeled rooted tree.
///
/// Each vertex is written as `(` followed by its children's codes in sorted
/// order, then `)`. Two trees get the same code iff they are isomorphic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn of(tree: &RootedTree) -> Self {
        let n = tree.n();
        let mut codes: Vec<Vec<u8>> = vec![Vec::new(); n];
        for &v in tree.bfs_order().iter().rev() {
            let mut kids: Vec<Vec<u8>> =
                tree.children(v).iter().map(|&c| std::mem::take(&mut codes[c - 1])).collect();
            kids.sort_unstable();
            let len = 2 + kids.iter().map(Vec::len).sum::<usize>();
            let mut code = Vec::with_capacity(len);
            code.push(b'(');
            for k in kids {
                code.extend_from_slice(&k);
            }
            code.push(b')');
            codes[v - 1] = code;
        }
        CanonicalCode(std::mem::take(&mut codes[tree.root() - 1]))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Number of vertices encoded.
    pub fn vertex_count(&self) -> usize {
        self.0.len() / 2
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).map_err(|_| fmt::Error)?)
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({self})")
    }
}

/// The named rooted trees with closed-form counts and expectations.
///
/// Quasi-stars are stars with one edge subdivided: a hub, a bridge vertex
/// hanging from it, a far leaf below the bridge, and `n - 3` leaves on the hub.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeClass {
    /// Star rooted at its hub.
    StarHub,
    /// Star rooted at a leaf.
    StarLeaf,
    /// Quasi-star rooted at its hub.
    QuasiStarHub,
    /// Quasi-star rooted at a leaf adjacent to the hub.
    QuasiStarEdgeLeaf,
    /// Quasi-star rooted at the leaf not adjacent to the hub.
    QuasiStarFarLeaf,
    /// Quasi-star rooted at the internal vertex that is not the hub.
    QuasiStarBridge,
    /// Path rooted at distance `k` from one of its ends.
    Linear,
}

impl TreeClass {
    pub const ALL: [TreeClass; 7] = [
        TreeClass::StarHub,
        TreeClass::StarLeaf,
        TreeClass::QuasiStarHub,
        TreeClass::QuasiStarEdgeLeaf,
        TreeClass::QuasiStarFarLeaf,
        TreeClass::QuasiStarBridge,
        TreeClass::Linear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeClass::StarHub => "star_hub",
            TreeClass::StarLeaf => "star_leaf",
            TreeClass::QuasiStarHub => "qstar_hub",
            TreeClass::QuasiStarEdgeLeaf => "qstar_edge_leaf",
            TreeClass::QuasiStarFarLeaf => "qstar_far_leaf",
            TreeClass::QuasiStarBridge => "qstar_bridge",
            TreeClass::Linear => "linear_k",
        }
    }

    /// Smallest admissible vertex count.
    pub fn min_n(self) -> usize {
        match self {
            TreeClass::StarHub | TreeClass::Linear => 1,
            TreeClass::StarLeaf => 2,
            _ => 4,
        }
    }

    /// Checks the size constraints and returns the normalized offset
    /// (`min(k, n - 1 - k)` for linear trees, `0` otherwise).
    pub fn normalize(self, n: usize, k: Option<usize>) -> Result<usize, TreeError> {
        let unsupported = TreeError::UnsupportedSize { class: self, n, k };
        if n < self.min_n() {
            return Err(unsupported);
        }
        match self {
            TreeClass::Linear => {
                let k = k.unwrap_or(0);
                if k > n - 1 {
                    return Err(unsupported);
                }
                Ok(k.min(n - 1 - k))
            }
            _ => Ok(0),
        }
    }
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeClass {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" | "linear_k" => Ok(TreeClass::Linear),
            _ => TreeClass::ALL
                .iter()
                .copied()
                .find(|c| c.name() == s)
                .ok_or_else(|| TreeError::Parse(format!("unknown tree class {s:?}"))),
        }
    }
}

/// Builds a member of a named class.
///
/// `k` is only read for linear trees, where it is normalized to
/// `min(k, n - 1 - k)` and the root is put at that distance from vertex 1.
pub fn make_class(class: TreeClass, n: usize, k: Option<usize>) -> Result<RootedTree, TreeError> {
    let k = class.normalize(n, k)?;
    let heads: Vec<usize> = match class {
        // hub = 1
        TreeClass::StarHub => (1..=n).map(|v| if v == 1 { 0 } else { 1 }).collect(),
        // leaf root = 1, hub = 2
        TreeClass::StarLeaf => (1..=n)
            .map(|v| match v {
                1 => 0,
                2 => 1,
                _ => 2,
            })
            .collect(),
        TreeClass::QuasiStarHub
        | TreeClass::QuasiStarEdgeLeaf
        | TreeClass::QuasiStarFarLeaf
        | TreeClass::QuasiStarBridge => {
            // hub = 1, bridge = 2, far leaf = 3, hub leaves = 4..=n
            let edges: Vec<(usize, usize)> = [(1, 2), (2, 3)]
                .into_iter()
                .chain((4..=n).map(|v| (1, v)))
                .collect();
            let root = match class {
                TreeClass::QuasiStarHub => 1,
                TreeClass::QuasiStarBridge => 2,
                TreeClass::QuasiStarFarLeaf => 3,
                _ => 4,
            };
            return orient(n, &edges, root);
        }
        TreeClass::Linear => {
            let root = k + 1;
            (1..=n)
                .map(|v| match v.cmp(&root) {
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Less => v + 1,
                    std::cmp::Ordering::Greater => v - 1,
                })
                .collect()
        }
    };
    RootedTree::from_head_vector(&heads)
}

/// Orients an undirected tree on `1..=n` away from `root`.
pub fn orient(n: usize, edges: &[(Vertex, Vertex)], root: Vertex) -> Result<RootedTree, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    if root == 0 || root > n {
        return Err(TreeError::BadRoot { root });
    }
    let mut adjacency = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        for w in [u, v] {
            if w == 0 || w > n {
                return Err(TreeError::VertexOutOfRange { vertex: w, n });
            }
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut visited = vec![false; n + 1];
    visited[root] = true;
    let mut links = Vec::with_capacity(n.saturating_sub(1));
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if !visited[w] {
                visited[w] = true;
                links.push((w, u));
                queue.push_back(w);
            }
        }
    }
    if let Some(vertex) = (1..=n).find(|&v| !visited[v]) {
        return Err(TreeError::Disconnected { vertex });
    }
    if edges.len() != n - 1 {
        return Err(TreeError::CycleDetected { vertex: root });
    }
    RootedTree::build(n, &links, root)
}

/// A uniformly random labeled tree on `n` vertices (via a random Prüfer
/// sequence) rooted at a uniformly random vertex.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RootedTree {
    assert!(n >= 1, "random_tree needs n >= 1");
    let root = rng.random_range(1..=n);
    if n == 1 {
        return RootedTree::singleton();
    }
    if n == 2 {
        return orient(2, &[(1, 2)], root).expect("valid edge");
    }
    // Linear-time Prüfer decoding on 0-based labels.
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = degree.iter().position(|&d| d == 1).expect("a leaf exists");
    let mut leaf = ptr;
    for &x in &seq {
        edges.push((leaf + 1, x + 1));
        degree[x] -= 1;
        if degree[x] == 1 && x < ptr {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf + 1, n));
    orient(n, &edges, root).expect("Prüfer decoding yields a tree")
}

/// `tree` with its vertices renamed by a uniformly random permutation.
pub fn shuffle_labels<R: Rng + ?Sized>(tree: &RootedTree, rng: &mut R) -> RootedTree {
    let mut mapping: Vec<usize> = (1..=tree.n()).collect();
    mapping.shuffle(rng);
    tree.relabel(&mapping).expect("a permutation is a valid relabeling")
}
