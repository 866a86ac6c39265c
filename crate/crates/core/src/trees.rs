//! Levelled trees: rooted trees whose level strictly increases away from the
//! root, with distance counted in generations (edges).

use std::collections::HashMap;
use std::fmt::Display;

use crate::coverings::{CoveringSequence, ElementId};
use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelledTree<L> {
    parent: Vec<Option<NodeId>>,
    level: Vec<i32>,
    depth: Vec<u32>,
    label: Vec<L>,
    children: Vec<Vec<NodeId>>,
}

impl<L> LevelledTree<L> {
    pub fn new(root_level: i32, root_label: L) -> Self {
        Self {
            parent: vec![None],
            level: vec![root_level],
            depth: vec![0],
            label: vec![root_label],
            children: vec![Vec::new()],
        }
    }

    /// Adds a child; its level must exceed the parent's.
    pub fn add_child(&mut self, parent: NodeId, level: i32, label: L) -> Result<NodeId> {
        if level <= self.level[parent] {
            return Err(Error::Tree(format!(
                "child level {level} does not exceed parent level {}",
                self.level[parent]
            )));
        }
        let id = self.parent.len();
        self.parent.push(Some(parent));
        self.level.push(level);
        self.depth.push(self.depth[parent] + 1);
        self.label.push(label);
        self.children.push(Vec::new());
        self.children[parent].push(id);
        Ok(id)
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, u: NodeId) -> Option<NodeId> {
        self.parent[u]
    }

    pub fn children(&self, u: NodeId) -> &[NodeId] {
        &self.children[u]
    }

    pub fn level(&self, u: NodeId) -> i32 {
        self.level[u]
    }

    pub fn label(&self, u: NodeId) -> &L {
        &self.label[u]
    }

    /// Generations between `u` and the root.
    pub fn depth(&self, u: NodeId) -> u32 {
        self.depth[u]
    }

    /// Path from `u` up to the root, `u` first.
    pub fn ancestors(&self, u: NodeId) -> Vec<NodeId> {
        let mut path = vec![u];
        let mut cur = u;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }

    /// Whether `a` lies on the root path of `d` (every vertex is its own ancestor).
    pub fn is_ancestor(&self, a: NodeId, d: NodeId) -> bool {
        let mut cur = d;
        loop {
            if cur == a {
                return true;
            }
            if self.depth[cur] <= self.depth[a] {
                return false;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Youngest common ancestor.
    pub fn common_ancestor(&self, mut u: NodeId, mut v: NodeId) -> NodeId {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u].expect("deeper vertex has a parent");
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v].expect("deeper vertex has a parent");
        }
        while u != v {
            u = self.parent[u].expect("not the root");
            v = self.parent[v].expect("not the root");
        }
        u
    }

    /// Number of edges on the path between `u` and `v`.
    pub fn generation_distance(&self, u: NodeId, v: NodeId) -> u32 {
        let w = self.common_ancestor(u, v);
        self.depth[u] + self.depth[v] - 2 * self.depth[w]
    }

    /// Minimum-level vertex of the path between `u` and `v`.
    pub fn lowest_segment_vertex(&self, u: NodeId, v: NodeId) -> NodeId {
        self.common_ancestor(u, v)
    }

    /// Vertices of the path from `u` to `v`, in order.
    pub fn segment(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let w = self.common_ancestor(u, v);
        let mut left: Vec<NodeId> = self.ancestors(u).into_iter().take_while(|&x| x != w).collect();
        let right: Vec<NodeId> = self.ancestors(v).into_iter().take_while(|&x| x != w).collect();
        left.push(w);
        left.extend(right.into_iter().rev());
        left
    }

    /// Generation distance from `u` to the nearest vertex of level at most `i`.
    pub fn distance_to_sublevel(&self, u: NodeId, i: i32) -> Option<u32> {
        self.ancestors(u)
            .into_iter()
            .find(|&a| self.level[a] <= i)
            .map(|a| self.depth[u] - self.depth[a])
    }

    pub fn max_valence(&self) -> usize {
        (0..self.len())
            .map(|u| self.children[u].len() + usize::from(self.parent[u].is_some()))
            .max()
            .unwrap_or(0)
    }

    /// Checks strict level monotonicity along every edge.
    pub fn levels_monotone(&self) -> bool {
        (1..self.len()).all(|u| self.parent[u].is_some_and(|p| self.level[p] < self.level[u]))
    }
}

impl<L: Display> LevelledTree<L> {
    /// `id parentId level label`, one vertex per line; the root's parent is `-`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for u in 0..self.len() {
            let parent = self.parent[u].map_or_else(|| "-".to_string(), |p| p.to_string());
            out.push_str(&format!("{u} {parent} {} {}\n", self.level[u], self.label[u]));
        }
        out
    }
}

/// The tree of all same-color covering elements under inclusion.
#[derive(Clone, Debug)]
pub struct ColorTree {
    color: usize,
    tree: LevelledTree<ElementId>,
    node_of: HashMap<ElementId, NodeId>,
}

impl ColorTree {
    pub fn color(&self) -> usize {
        self.color
    }

    pub fn tree(&self) -> &LevelledTree<ElementId> {
        &self.tree
    }

    pub fn node(&self, element: ElementId) -> Option<NodeId> {
        self.node_of.get(&element).copied()
    }

    pub fn element(&self, node: NodeId) -> ElementId {
        *self.tree.label(node)
    }

    /// `id parentId level color:element`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for u in 0..self.tree.len() {
            let parent = self.tree.parent(u).map_or_else(|| "-".to_string(), |p| p.to_string());
            out.push_str(&format!(
                "{u} {parent} {} {}:{}\n",
                self.tree.level(u),
                self.color,
                self.element(u)
            ));
        }
        out
    }
}

/// Parent of `U` is the inclusion-ancestor of maximal level; the inclusion
/// ancestors of every vertex must form its root path.
pub fn build_color_tree(seq: &CoveringSequence, color: usize) -> Result<ColorTree> {
    if color >= seq.colors() {
        return Err(Error::Tree(format!("color {color} is out of range")));
    }
    let root_family = seq.family(0, color);
    if root_family.len() != 1 {
        return Err(Error::Tree(format!("color {color} has {} roots", root_family.len())));
    }
    let root = root_family[0];
    let mut tree = LevelledTree::new(0, root);
    let mut node_of = HashMap::from([(root, 0)]);
    for j in 1..=seq.max_level() {
        for &u in seq.family(j, color) {
            let members = &seq.element(u).members;
            let above: Vec<ElementId> = (0..j)
                .flat_map(|jp| seq.family(jp, color).iter().copied())
                .filter(|&w| members.is_subset(&seq.element(w).members))
                .collect();
            let parent = above
                .iter()
                .copied()
                .max_by_key(|&w| seq.element(w).level)
                .ok_or_else(|| Error::Tree(format!("element {u} has no ancestor")))?;
            let node = tree.add_child(node_of[&parent], j, u)?;
            node_of.insert(u, node);
            let mut chain: Vec<ElementId> = tree.ancestors(node).into_iter().skip(1).map(|a| *tree.label(a)).collect();
            let mut expected = above;
            chain.sort_unstable();
            expected.sort_unstable();
            if chain != expected {
                return Err(Error::Tree(format!(
                    "inclusion ancestors of element {u} are not a chain"
                )));
            }
        }
    }
    Ok(ColorTree { color, tree, node_of })
}

/// Generation distance in a word tree: `|a| + |b| - 2 lcp(a, b)`.
pub fn word_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    a.len() + b.len() - 2 * common
}

/// Bits per letter for an alphabet of `n` letters: `floor(log2 n) + 1`, or 1 below three letters.
pub fn binary_width(n: usize) -> usize {
    if n < 3 {
        1
    } else {
        n.ilog2() as usize + 1
    }
}

/// Replaces each letter `1..=n` by its zero-padded binary code; below three
/// letters, letter `k` becomes the single bit `k - 1`.
pub fn binary_embed(word: &[usize], n: usize) -> Result<Vec<u8>> {
    let width = binary_width(n);
    let mut out = Vec::with_capacity(word.len() * width);
    for &letter in word {
        if letter == 0 || letter > n {
            return Err(Error::Tree(format!("letter {letter} is outside 1..={n}")));
        }
        let code = if n < 3 { letter - 1 } else { letter };
        for bit in (0..width).rev() {
            out.push(((code >> bit) & 1) as u8);
        }
    }
    Ok(out)
}

/// `lambda (L - 2) + 2 <= L_bin <= lambda L` for one pair of words.
pub fn binary_sandwich(a: &[usize], b: &[usize], n: usize) -> Result<bool> {
    let lambda = binary_width(n) as i64;
    let l = word_distance(a, b) as i64;
    let lb = word_distance(&binary_embed(a, n)?, &binary_embed(b, n)?) as i64;
    Ok(lambda * (l - 2) + 2 <= lb && lb <= lambda * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> LevelledTree<&'static str> {
        // root(0) -> a(1) -> c(3), root -> b(2)
        let mut t = LevelledTree::new(0, "root");
        let a = t.add_child(0, 1, "a").unwrap();
        t.add_child(0, 2, "b").unwrap();
        t.add_child(a, 3, "c").unwrap();
        t
    }

    #[test]
    fn distances() {
        let t = sample();
        assert_eq!(t.generation_distance(3, 3), 0);
        assert_eq!(t.generation_distance(0, 3), 2);
        assert_eq!(t.generation_distance(1, 2), 2);
        assert_eq!(t.generation_distance(3, 2), 3);
        assert_eq!(t.segment(3, 2), vec![3, 1, 0, 2]);
    }

    #[test]
    fn lowest_vertex() {
        let t = sample();
        assert_eq!(t.lowest_segment_vertex(3, 1), 1);
        assert_eq!(t.lowest_segment_vertex(1, 2), 0);
        assert_eq!(t.lowest_segment_vertex(2, 2), 2);
    }

    #[test]
    fn level_must_increase() {
        let mut t = sample();
        assert!(t.add_child(1, 1, "x").is_err());
        assert!(t.levels_monotone());
    }

    #[test]
    fn sublevel_distance() {
        let t = sample();
        assert_eq!(t.distance_to_sublevel(3, 1), Some(1));
        assert_eq!(t.distance_to_sublevel(3, 0), Some(2));
        assert_eq!(t.distance_to_sublevel(3, -1), None);
    }

    #[test]
    fn export_format() {
        let t = sample();
        assert_eq!(t.export(), "0 - 0 root\n1 0 1 a\n2 0 2 b\n3 1 3 c\n");
    }

    #[test]
    fn binary_examples() {
        assert_eq!(binary_width(3), 2);
        assert_eq!(binary_embed(&[3, 1], 3).unwrap(), vec![1, 1, 0, 1]);
        assert!(binary_embed(&[], 3).unwrap().is_empty());
        assert_eq!(binary_embed(&[2, 1], 2).unwrap(), vec![1, 0]);
        assert!(binary_embed(&[4], 3).is_err());
    }

    #[test]
    fn word_tree_distance() {
        assert_eq!(word_distance::<u8>(&[], &[]), 0);
        assert_eq!(word_distance(&[1, 2, 3], &[1, 2]), 1);
        assert_eq!(word_distance(&[1, 2], &[2, 1]), 4);
    }

    fn random_tree() -> impl Strategy<Value = LevelledTree<()>> {
        prop::collection::vec((any::<prop::sample::Index>(), 1i32..4), 0..30).prop_map(|steps| {
            let mut t = LevelledTree::new(0, ());
            for (idx, gap) in steps {
                let parent = idx.index(t.len());
                let level = t.level(parent) + gap;
                t.add_child(parent, level, ()).unwrap();
            }
            t
        })
    }

    proptest! {
        #[test]
        fn incomparable_vertices_meet_lower(t in random_tree(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
            let (u, v) = (a.index(t.len()), b.index(t.len()));
            let w = t.lowest_segment_vertex(u, v);
            prop_assert!(t.is_ancestor(w, u) && t.is_ancestor(w, v));
            if !t.is_ancestor(u, v) && !t.is_ancestor(v, u) {
                prop_assert!(t.level(w) < t.level(u).min(t.level(v)));
            }
            let seg = t.segment(u, v);
            prop_assert_eq!(seg.len() as u32, t.generation_distance(u, v) + 1);
            prop_assert_eq!(seg.iter().map(|&x| t.level(x)).min(), Some(t.level(w)));
        }

        #[test]
        fn sandwich_on_random_words(n in 3usize..10, a in prop::collection::vec(1usize..10, 0..8), b in prop::collection::vec(1usize..10, 0..8)) {
            let clip = |w: Vec<usize>| w.into_iter().map(|x| (x - 1) % n + 1).collect::<Vec<_>>();
            prop_assert!(binary_sandwich(&clip(a), &clip(b), n).unwrap());
        }
    }
}
