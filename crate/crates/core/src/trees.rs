//! Labeled and unlabeled trivalent trees: construction from iterated
//! sequences, tree weight vectors, cherries, canonical forms, enumeration
//! and the converse tree-to-sequence construction.
//!
//! A tree with n leaves stores leaves 1..n and internal vertices
//! n+1..2n-2, numbered in creation order. Unlabeled comparisons go through
//! [`canonical_form`], a rooted canonical encoding at the tree's center.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::plucker::{plucker_indices, PluckerIndex, WeightVector};
use crate::seq::{build_iterated_sequence, IteratedSequence, SeqError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree must have at least 3 leaves, got n={0}")]
    TooFewLeaves(u32),
    #[error("expected vertices 1..={expected}, found vertex {found}")]
    BadVertex { expected: u32, found: u32 },
    #[error("expected {expected} edges for n leaves, got {got}")]
    WrongEdgeCount { expected: usize, got: usize },
    #[error("vertex {vertex} has degree {got}, expected {expected}")]
    BadDegree { vertex: u32, expected: usize, got: usize },
    #[error("edge list does not describe a connected graph")]
    Disconnected,
    #[error("duplicate or degenerate edge ({0},{1})")]
    BadEdge(u32, u32),
    #[error("operation requires k=2, got k={k}")]
    RequiresK2 { k: u32 },
    #[error("permutation is not a bijection on 1..={0}")]
    BadPermutation(u32),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// A trivalent tree with leaves 1..n and internal vertices n+1..2n-2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    n: u32,
    /// Normalized (min,max) pairs, sorted.
    edges: Vec<(u32, u32)>,
}

impl LabeledTree {
    pub fn new(n: u32, edges: Vec<(u32, u32)>) -> Result<Self, TreeError> {
        if n < 3 {
            return Err(TreeError::TooFewLeaves(n));
        }
        let vertex_count = 2 * n - 2;
        let expected_edges = (2 * n - 3) as usize;
        if edges.len() != expected_edges {
            return Err(TreeError::WrongEdgeCount { expected: expected_edges, got: edges.len() });
        }
        let mut normalized: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b || a == 0 || b == 0 {
                return Err(TreeError::BadEdge(a, b));
            }
            for v in [a, b] {
                if v > vertex_count {
                    return Err(TreeError::BadVertex { expected: vertex_count, found: v });
                }
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            let (a, b) = normalized[0];
            return Err(TreeError::BadEdge(a, b));
        }
        let tree = LabeledTree { n, edges: normalized };
        let adj = tree.adjacency();
        for v in 1..=vertex_count {
            let deg = adj.get(&v).map_or(0, |ns| ns.len());
            let expected = if v <= n { 1 } else { 3 };
            if deg != expected {
                return Err(TreeError::BadDegree { vertex: v, expected, got: deg });
            }
        }
        // |E| = |V| - 1 with correct degrees; connectivity makes it a tree.
        let mut seen = BTreeSet::new();
        let mut stack = vec![1u32];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            stack.extend(adj[&v].iter().copied());
        }
        if seen.len() != vertex_count as usize {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        v <= self.n
    }

    pub fn adjacency(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for ns in adj.values_mut() {
            ns.sort_unstable();
        }
        adj
    }

    /// Leaf bipartitions induced by internal edges: for each, the side not
    /// containing leaf 1, sorted. Two leaf-labeled trees are isomorphic as
    /// such iff their split sets agree.
    pub fn leaf_splits(&self) -> BTreeSet<Vec<u32>> {
        let adj = self.adjacency();
        let mut splits = BTreeSet::new();
        for &(a, b) in &self.edges {
            if self.is_leaf(a) || self.is_leaf(b) {
                continue;
            }
            // Collect leaves on b's side of the removed edge (a,b).
            let mut side = Vec::new();
            let mut stack = vec![b];
            let mut seen = BTreeSet::from([a, b]);
            while let Some(v) = stack.pop() {
                if self.is_leaf(v) {
                    side.push(v);
                }
                for &w in &adj[&v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            side.sort_unstable();
            if side.contains(&1) {
                let side_set: BTreeSet<u32> = side.into_iter().collect();
                side = (1..=self.n).filter(|v| !side_set.contains(v)).collect();
            }
            splits.insert(side);
        }
        splits
    }

    /// DOT rendering: leaves as boxes, internal vertices as points.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph {name} {{\n  node [shape=point];\n"));
        for v in 1..=self.n {
            out.push_str(&format!("  {v} [shape=box, label=\"{v}\"];\n"));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  {a} -- {b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl Serialize for LabeledTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TreeRepr { n: self.n, edges: self.edges.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LabeledTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = TreeRepr::deserialize(deserializer)?;
        LabeledTree::new(repr.n, repr.edges).map_err(D::Error::custom)
    }
}

/// Label-free canonical encoding; equal iff the unlabeled trees are
/// isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalTree(String);

impl CanonicalTree {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn tree_centers(tree: &LabeledTree) -> Vec<u32> {
    let adj = tree.adjacency();
    let mut degree: BTreeMap<u32, usize> =
        adj.iter().map(|(&v, ns)| (v, ns.len())).collect();
    let mut active: BTreeSet<u32> = degree.keys().copied().collect();
    while active.len() > 2 {
        let shell: Vec<u32> =
            active.iter().copied().filter(|v| degree[v] <= 1).collect();
        for v in shell {
            active.remove(&v);
            for &w in &adj[&v] {
                if active.contains(&w) {
                    *degree.get_mut(&w).unwrap() -= 1;
                }
            }
        }
    }
    active.into_iter().collect()
}

fn encode_rooted(v: u32, parent: Option<u32>, adj: &BTreeMap<u32, Vec<u32>>) -> String {
    let mut children: Vec<String> = adj[&v]
        .iter()
        .filter(|&&w| Some(w) != parent)
        .map(|&w| encode_rooted(w, Some(v), adj))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

/// Rooted canonical form at the tree's center vertex or center edge.
pub fn canonical_form(tree: &LabeledTree) -> CanonicalTree {
    let adj = tree.adjacency();
    let centers = tree_centers(tree);
    match centers.as_slice() {
        [c] => CanonicalTree(encode_rooted(*c, None, &adj)),
        [a, b] => {
            let mut halves = [encode_rooted(*a, Some(*b), &adj), encode_rooted(*b, Some(*a), &adj)];
            halves.sort();
            CanonicalTree(format!("({}{})", halves[0], halves[1]))
        }
        _ => unreachable!("a tree has one or two centers"),
    }
}

/// Leaves in the order visited by a canonical traversal (children sorted by
/// encoding). Matching positions across two trees of equal canonical form
/// give an unlabeled isomorphism.
fn canonical_leaf_order(tree: &LabeledTree) -> Vec<u32> {
    let adj = tree.adjacency();
    let centers = tree_centers(tree);
    let mut leaves = Vec::with_capacity(tree.n as usize);
    let mut roots: Vec<(String, u32, Option<u32>)> = match centers.as_slice() {
        [c] => vec![(encode_rooted(*c, None, &adj), *c, None)],
        [a, b] => vec![
            (encode_rooted(*a, Some(*b), &adj), *a, Some(*b)),
            (encode_rooted(*b, Some(*a), &adj), *b, Some(*a)),
        ],
        _ => unreachable!(),
    };
    roots.sort();
    for (_, root, parent) in roots {
        collect_leaves(root, parent, &adj, tree.n, &mut leaves);
    }
    leaves
}

fn collect_leaves(
    v: u32,
    parent: Option<u32>,
    adj: &BTreeMap<u32, Vec<u32>>,
    n: u32,
    out: &mut Vec<u32>,
) {
    if v <= n {
        out.push(v);
        return;
    }
    let mut children: Vec<(String, u32)> = adj[&v]
        .iter()
        .filter(|&&w| Some(w) != parent)
        .map(|&w| (encode_rooted(w, Some(v), adj), w))
        .collect();
    children.sort();
    for (_, w) in children {
        collect_leaves(w, Some(v), adj, n, out);
    }
}

/// A bijection of 1..=n, stored as the image list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self, TreeError> {
        let n = images.len() as u32;
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x == 0 || x > n || seen[(x - 1) as usize] {
                return Err(TreeError::BadPermutation(n));
            }
            seen[(x - 1) as usize] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: u32) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn transposition(n: u32, a: u32, b: u32) -> Self {
        let mut images: Vec<u32> = (1..=n).collect();
        images.swap((a - 1) as usize, (b - 1) as usize);
        Permutation(images)
    }

    pub fn random<R: rand::Rng>(n: u32, rng: &mut R) -> Self {
        let mut images: Vec<u32> = (1..=n).collect();
        for a in (1..images.len()).rev() {
            let b = rng.gen_range(0..=a);
            images.swap(a, b);
        }
        Permutation(images)
    }

    pub fn n(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.0[(i - 1) as usize]
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            images[(x - 1) as usize] = i as u32 + 1;
        }
        Permutation(images)
    }
}

/// The 3-leaf tree: leaves 1,2,3 on the single internal vertex 4.
fn star3() -> LabeledTree {
    LabeledTree::new(3, vec![(1, 4), (2, 4), (3, 4)]).expect("static tree")
}

/// Subdivides the leaf edge of `i` with a fresh internal vertex carrying a
/// new cherry (i, new_leaf). Internal vertices shift by one to stay in
/// creation order for the grown leaf count.
fn attach_cherry(tree: &LabeledTree, i: u32, new_leaf: u32) -> LabeledTree {
    let old_n = tree.n;
    debug_assert!(i <= old_n && new_leaf == old_n + 1);
    let shift = |v: u32| if v > old_n { v + 1 } else { v };
    let neighbor = tree
        .edges
        .iter()
        .find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
        .expect("leaf i has a unique neighbor");
    let fresh = 2 * (old_n + 1) - 2;
    let mut edges: Vec<(u32, u32)> = tree
        .edges
        .iter()
        .filter(|&&e| e != (i.min(neighbor), i.max(neighbor)))
        .map(|&(a, b)| (shift(a), shift(b)))
        .collect();
    edges.push((shift(neighbor), fresh));
    edges.push((i, fresh));
    edges.push((new_leaf, fresh));
    LabeledTree::new(old_n + 1, edges).expect("cherry attachment preserves validity")
}

/// Runs the cherry-insertion construction on an iterated sequence: starting
/// from the 3-leaf tree, level l attaches the cherry (i_l, l) on the leaf
/// edge of i_l. Only the first index of each step is consumed. Returns the
/// final tree T_S and the full level sequence (T_3, ..., T_n).
pub fn tree_from_sequence(
    seq: &IteratedSequence,
) -> Result<(LabeledTree, Vec<LabeledTree>), TreeError> {
    if seq.k() != 2 {
        return Err(TreeError::RequiresK2 { k: seq.k() });
    }
    let mut current = star3();
    let mut levels = vec![current.clone()];
    for l in 4..=seq.n() {
        let i = seq.step_at_level(l)[0];
        current = attach_cherry(&current, i, l);
        levels.push(current.clone());
    }
    Ok((current, levels))
}

/// Integer weight vector of a tree: entry (i<j) is minus the number of
/// internal edges on the unique path from leaf i to leaf j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeWeightVector {
    n: u32,
    entries: Vec<i64>,
}

impl TreeWeightVector {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Entries in lexicographic order on I_{2,n}.
    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn entry(&self, i: u32, j: u32) -> i64 {
        let (i, j) = (i.min(j), i.max(j));
        let indices = plucker_indices(2, self.n).expect("n >= 3");
        let pos = indices
            .iter()
            .position(|idx| idx == &PluckerIndex::pair(i, j))
            .expect("pair within range");
        self.entries[pos]
    }

    pub fn to_weight_vector(&self) -> WeightVector {
        WeightVector::from_integers(2, self.n, &self.entries).expect("lengths agree")
    }
}

pub fn tree_weight_vector(tree: &LabeledTree) -> TreeWeightVector {
    let adj = tree.adjacency();
    let n = tree.n;
    let mut entries = Vec::with_capacity((n * (n - 1) / 2) as usize);
    for index in plucker_indices(2, n).expect("n >= 3") {
        let (i, j) = (index.indices()[0], index.indices()[1]);
        // Walk the unique path from i to j and count internal edges.
        let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
        let mut stack = vec![i];
        let mut seen = BTreeSet::from([i]);
        while let Some(v) = stack.pop() {
            if v == j {
                break;
            }
            for &w in &adj[&v] {
                if seen.insert(w) {
                    parent.insert(w, v);
                    stack.push(w);
                }
            }
        }
        let mut internal_edges = 0i64;
        let mut v = j;
        while v != i {
            let p = parent[&v];
            if !tree.is_leaf(v) && !tree.is_leaf(p) {
                internal_edges += 1;
            }
            v = p;
        }
        entries.push(-internal_edges);
    }
    TreeWeightVector { n, entries }
}

/// All unordered leaf pairs sharing an internal neighbor, sorted.
pub fn find_cherries(tree: &LabeledTree) -> Vec<(u32, u32)> {
    let adj = tree.adjacency();
    let mut cherries = Vec::new();
    for v in (tree.n + 1)..=(2 * tree.n - 2) {
        let leaves: Vec<u32> =
            adj[&v].iter().copied().filter(|&w| tree.is_leaf(w)).collect();
        for pair in leaves.iter().combinations(2) {
            cherries.push((*pair[0], *pair[1]));
        }
    }
    cherries.sort_unstable();
    cherries
}

/// Relabels leaves by σ; internal vertices are untouched.
pub fn permute_tree(sigma: &Permutation, tree: &LabeledTree) -> Result<LabeledTree, TreeError> {
    if sigma.n() != tree.n {
        return Err(TreeError::BadPermutation(tree.n));
    }
    let map = |v: u32| if v <= tree.n { sigma.apply(v) } else { v };
    let edges = tree.edges.iter().map(|&(a, b)| (map(a), map(b))).collect();
    LabeledTree::new(tree.n, edges)
}

/// w_{σ(T)}(i,j) = w_T(σ⁻¹(i), σ⁻¹(j)).
pub fn permute_weight(
    sigma: &Permutation,
    w: &TreeWeightVector,
) -> Result<TreeWeightVector, TreeError> {
    if sigma.n() != w.n {
        return Err(TreeError::BadPermutation(w.n));
    }
    let inv = sigma.inverse();
    let entries = plucker_indices(2, w.n)
        .expect("n >= 3")
        .iter()
        .map(|index| {
            let (i, j) = (index.indices()[0], index.indices()[1]);
            w.entry(inv.apply(i), inv.apply(j))
        })
        .collect();
    Ok(TreeWeightVector { n: w.n, entries })
}

/// Every labeled trivalent tree on leaves 1..n, generated by inserting leaf
/// m into each edge of every tree on m-1 leaves. Internal vertices are
/// numbered n+1, n+2, ... in creation order.
pub fn enumerate_labeled_trees(n: u32) -> Result<Vec<LabeledTree>, TreeError> {
    if n < 3 {
        return Err(TreeError::TooFewLeaves(n));
    }
    // Intermediate edge lists use the final internal id range already.
    let mut trees: Vec<(Vec<(u32, u32)>, u32)> =
        vec![(vec![(1, n + 1), (2, n + 1), (3, n + 1)], n + 2)];
    for leaf in 4..=n {
        let mut next = Vec::with_capacity(trees.len() * (2 * leaf as usize - 5));
        for (edges, fresh) in &trees {
            for split in 0..edges.len() {
                let mut grown: Vec<(u32, u32)> = edges
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pos != split)
                    .map(|(_, &e)| e)
                    .collect();
                let (a, b) = edges[split];
                grown.push((a, *fresh));
                grown.push((b, *fresh));
                grown.push((leaf, *fresh));
                next.push((grown, fresh + 1));
            }
        }
        trees = next;
    }
    trees
        .into_iter()
        .map(|(edges, _)| LabeledTree::new(n, edges))
        .collect()
}

/// One representative per unlabeled isomorphism class, keyed and sorted by
/// canonical form.
pub fn enumerate_tree_classes(n: u32) -> Result<Vec<(CanonicalTree, LabeledTree)>, TreeError> {
    let mut classes: BTreeMap<CanonicalTree, LabeledTree> = BTreeMap::new();
    for tree in enumerate_labeled_trees(n)? {
        classes.entry(canonical_form(&tree)).or_insert(tree);
    }
    Ok(classes.into_iter().collect())
}

/// Uniformly random labeled trivalent tree via random edge insertion.
pub fn random_labeled_tree<R: rand::Rng>(n: u32, rng: &mut R) -> Result<LabeledTree, TreeError> {
    if n < 3 {
        return Err(TreeError::TooFewLeaves(n));
    }
    let mut edges: Vec<(u32, u32)> = vec![(1, n + 1), (2, n + 1), (3, n + 1)];
    let mut fresh = n + 2;
    for leaf in 4..=n {
        let split = rng.gen_range(0..edges.len());
        let (a, b) = edges.swap_remove(split);
        edges.push((a, fresh));
        edges.push((b, fresh));
        edges.push((leaf, fresh));
        fresh += 1;
    }
    LabeledTree::new(n, edges)
}

/// The unlabeled isomorphism σ (as a leaf bijection, σ(leaf of a) = leaf of
/// b) between two trees of equal canonical form.
pub fn leaf_isomorphism(a: &LabeledTree, b: &LabeledTree) -> Option<Permutation> {
    if a.n != b.n || canonical_form(a) != canonical_form(b) {
        return None;
    }
    let order_a = canonical_leaf_order(a);
    let order_b = canonical_leaf_order(b);
    let mut images = vec![0u32; a.n as usize];
    for (la, lb) in order_a.iter().zip(&order_b) {
        images[(*la - 1) as usize] = *lb;
    }
    Some(Permutation::new(images).expect("leaf orders are bijections"))
}

/// Deletes leaf `y` (which must sit in a cherry), suppresses its internal
/// neighbor and relabels to a valid tree on n-1 leaves. Returns the tree and
/// the order-preserving old-leaf -> new-leaf map.
fn remove_cherry_leaf(tree: &LabeledTree, y: u32) -> (LabeledTree, BTreeMap<u32, u32>) {
    let adj = tree.adjacency();
    let c = adj[&y][0];
    let others: Vec<u32> = adj[&c].iter().copied().filter(|&w| w != y).collect();
    debug_assert_eq!(others.len(), 2);
    let n = tree.n;
    let leaf_map: BTreeMap<u32, u32> = (1..=n)
        .filter(|&v| v != y)
        .enumerate()
        .map(|(new, old)| (old, new as u32 + 1))
        .collect();
    let internal_map: BTreeMap<u32, u32> = ((n + 1)..=(2 * n - 2))
        .filter(|&v| v != c)
        .enumerate()
        .map(|(new, old)| (old, n - 1 + new as u32 + 1))
        .collect();
    let map = |v: u32| {
        if v <= n {
            leaf_map[&v]
        } else {
            internal_map[&v]
        }
    };
    let mut edges: Vec<(u32, u32)> = tree
        .edges
        .iter()
        .filter(|&&(a, b)| a != c && b != c && a != y && b != y)
        .map(|&(a, b)| (map(a), map(b)))
        .collect();
    edges.push((map(others[0]), map(others[1])));
    let small = LabeledTree::new(n - 1, edges).expect("cherry removal preserves validity");
    (small, leaf_map)
}

/// Builds an iterated sequence whose constructed tree has the same
/// canonical form as the input: peel a cherry, recurse, then attach the
/// recorded cherry onto the corresponding leaf of the rebuilt tree. The
/// free second index of each step is the smallest index distinct from the
/// cherry index.
pub fn sequence_from_tree(tree: &LabeledTree) -> Result<IteratedSequence, TreeError> {
    let n = tree.n;
    if n == 3 {
        return Ok(build_iterated_sequence(2, 3, &[vec![1, 2]])?);
    }
    let cherries = find_cherries(tree);
    let &(x, y) = cherries.first().expect("every trivalent tree with n >= 4 leaves has a cherry");
    let (small, leaf_map) = remove_cherry_leaf(tree, y);
    let sub = sequence_from_tree(&small)?;
    let (rebuilt, _) = tree_from_sequence(&sub)?;
    let iso = leaf_isomorphism(&small, &rebuilt)
        .expect("recursion rebuilds the same unlabeled shape");
    let i = iso.apply(leaf_map[&x]);
    let j = (1..n).find(|&j| j != i).expect("n >= 4 leaves at least two indices");
    let mut steps = vec![vec![i, j]];
    steps.extend(sub.steps().iter().cloned());
    Ok(build_iterated_sequence(2, n, &steps)?)
}

/// Canonical forms of the level trees (T_3, ..., T_n); consecutive entries
/// differ by one leaf-edge attachment.
pub fn tree_graph_path(seq: &IteratedSequence) -> Result<Vec<CanonicalTree>, TreeError> {
    let (_, levels) = tree_from_sequence(seq)?;
    Ok(levels.iter().map(canonical_form).collect())
}
