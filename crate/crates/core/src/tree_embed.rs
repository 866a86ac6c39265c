//! Maps from the approximation graph into the color trees and the pairwise
//! distortion checks of the product map.

use rayon::prelude::*;
use serde::Serialize;

use crate::coverings::CoveringSequence;
use crate::error::{Error, Result};
use crate::hyper_approx::{ApproxGraph, DistanceMatrix, VertexId};
use crate::rational::{self, Rational};
use crate::report::{LemmaCheck, SuiteReport, Tally};
use crate::trees::{build_color_tree, ColorTree, NodeId};

/// Kind of a vertex pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PairKind {
    /// Both levels nonnegative and `d < r^(min level)` (including `v = v'`).
    Close,
    /// Both levels nonnegative and `r^l <= d < r^(l-1)` with `l <= min level`.
    Distinct { critical: i32 },
    /// A vertex of negative level is involved.
    Other,
}

impl PairKind {
    pub fn tag(self) -> &'static str {
        match self {
            PairKind::Close => "close",
            PairKind::Distinct { .. } => "distinct",
            PairKind::Other => "other",
        }
    }
}

/// Smallest `l` with `r^l <= d`; `d` must be positive.
pub fn critical_level(d: &Rational, r: &Rational) -> i32 {
    let mut l = 0;
    while rational::pow(r, l) > *d {
        l += 1;
    }
    while rational::pow(r, l - 1) <= *d {
        l -= 1;
    }
    l
}

/// The maps `f_c` for every color.
pub struct Stage1<'a> {
    graph: &'a ApproxGraph,
    seq: &'a CoveringSequence,
    trees: Vec<ColorTree>,
    images: Vec<Vec<NodeId>>,
}

impl<'a> Stage1<'a> {
    pub fn build(graph: &'a ApproxGraph, seq: &'a CoveringSequence) -> Result<Self> {
        let trees = (0..seq.colors())
            .map(|c| build_color_tree(seq, c))
            .collect::<Result<Vec<_>>>()?;
        let mut stage = Self { graph, seq, trees, images: Vec::new() };
        stage.images = (0..seq.colors())
            .map(|c| (0..graph.len()).map(|v| stage.compute_image(c, v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(stage)
    }

    /// Highest-level same-color element of level `<= level(v) - 1` containing
    /// `B(v)`; the root, and any vertex of level `<= 0`, go to the tree root.
    fn compute_image(&self, c: usize, v: VertexId) -> Result<NodeId> {
        let level = self.graph.level(v);
        let tree = &self.trees[c];
        if level <= 0 {
            return Ok(tree.tree().root());
        }
        let ball = self.graph.ball(level, self.graph.center(v));
        for j in (0..=(level - 1).min(self.seq.max_level())).rev() {
            if let Some(&u) = self
                .seq
                .family(j, c)
                .iter()
                .find(|&&u| ball.is_subset(&self.seq.element(u).members))
            {
                return Ok(tree.node(u).expect("every element is a tree vertex"));
            }
        }
        Err(Error::Embedding(format!(
            "no element of color {c} contains the ball of {}",
            self.graph.vertex(v)
        )))
    }

    pub fn graph(&self) -> &ApproxGraph {
        self.graph
    }

    pub fn sequence(&self) -> &CoveringSequence {
        self.seq
    }

    pub fn colors(&self) -> usize {
        self.trees.len()
    }

    pub fn tree(&self, c: usize) -> &ColorTree {
        &self.trees[c]
    }

    pub fn map_fc(&self, c: usize, v: VertexId) -> NodeId {
        self.images[c][v]
    }

    /// `L(f_c(v), f_c(v'))`.
    pub fn tree_distance(&self, c: usize, v: VertexId, w: VertexId) -> u32 {
        self.trees[c].tree().generation_distance(self.images[c][v], self.images[c][w])
    }

    /// l1 distance in the product of trees.
    pub fn product_distance(&self, v: VertexId, w: VertexId) -> u32 {
        (0..self.colors()).map(|c| self.tree_distance(c, v, w)).sum()
    }

    pub fn classify_pair(&self, v: VertexId, w: VertexId) -> PairKind {
        let g = self.graph;
        let min_level = g.level(v).min(g.level(w));
        if min_level < 0 {
            return PairKind::Other;
        }
        let d = g.center_distance(v, w);
        if *d < g.scale().scale(min_level) {
            PairKind::Close
        } else {
            PairKind::Distinct { critical: critical_level(d, g.scale().r()) }
        }
    }

    /// All stage-one checks plus one row per unordered pair.
    pub fn report(&self, dist: &DistanceMatrix) -> Stage1Report {
        let n = self.graph.len();
        let parts: Vec<PairAccumulator> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut acc = PairAccumulator::default();
                for w in v..n {
                    self.check_pair(dist, v, w, &mut acc);
                }
                acc
            })
            .collect();
        let mut total = PairAccumulator::default();
        for part in parts {
            total.merge(part);
        }
        let mut suite = SuiteReport::new("stage1");
        suite.push(self.check_root());
        suite.push(self.check_images());
        suite.push(self.check_tree_shape());
        suite.push(self.check_radial());
        let PairAccumulator { tallies, rows, summary } = total;
        for (id, tally) in PAIR_CHECKS.iter().zip(tallies) {
            suite.push(tally.finish(*id));
        }
        Stage1Report { suite, rows, summary }
    }

    fn check_root(&self) -> LemmaCheck {
        let mut tally = Tally::default();
        for c in 0..self.colors() {
            let root = self.map_fc(c, self.graph.root());
            tally.record(root == self.trees[c].tree().root(), || format!("color {c}: root not mapped to root"));
        }
        tally.finish("stage1.root_to_root")
    }

    /// Containment, level bound and maximality of every image.
    fn check_images(&self) -> LemmaCheck {
        let mut tally = Tally::default();
        for c in 0..self.colors() {
            for v in 0..self.graph.len() {
                let level = self.graph.level(v);
                if level <= 0 {
                    continue;
                }
                let node = self.map_fc(c, v);
                let image = self.seq.element(self.trees[c].element(node));
                let ball = self.graph.ball(level, self.graph.center(v));
                let higher = (image.level + 1..level).any(|j| {
                    self.seq.family(j, c).iter().any(|&u| ball.is_subset(&self.seq.element(u).members))
                });
                let ok = ball.is_subset(&image.members) && image.level < level && !higher;
                tally.record(ok, || format!("color {c}: bad image of {}", self.graph.vertex(v)));
            }
        }
        tally.finish("stage1.image_maximal")
    }

    fn check_tree_shape(&self) -> LemmaCheck {
        let k0 = self.graph.scale().k0();
        let mut tally = Tally::default();
        for (c, tree) in self.trees.iter().enumerate() {
            let t = tree.tree();
            tally.record(t.levels_monotone(), || format!("color {c}: levels not monotone"));
            for u in 0..t.len() {
                let bound = (t.level(u) - k0) as u32;
                tally.record(t.depth(u) <= bound, || {
                    format!("color {c}: vertex {u} has depth {} > {bound}", t.depth(u))
                });
            }
        }
        tally.finish("stage1.tree_depth")
    }

    /// For `v` at level `j + 1` and `0 <= i <= j`, some color keeps `f_c(v)`
    /// at generation distance at least `M = ceil((j - i + 1)/|C|) - 1` from the
    /// level-`i` vertices and from its ancestors of level at most `i`.
    fn check_radial(&self) -> LemmaCheck {
        let colors = self.colors() as i32;
        let mut tally = Tally::default();
        for v in 0..self.graph.len() {
            let top = self.graph.level(v) - 1;
            for i in 0..=top {
                let m = ((top - i + 1) + colors - 1) / colors - 1;
                let found = (0..self.colors()).any(|c| {
                    let t = self.trees[c].tree();
                    let x = self.map_fc(c, v);
                    let to_level = (0..t.len())
                        .filter(|&u| t.level(u) == i)
                        .map(|u| t.generation_distance(x, u))
                        .min();
                    let to_ancestor = t.distance_to_sublevel(x, i);
                    to_level.is_none_or(|d| d as i32 >= m) && to_ancestor.is_none_or(|d| d as i32 >= m)
                });
                tally.record(found, || format!("{} at i = {i}: no color reaches M = {m}", self.graph.vertex(v)));
            }
        }
        tally.finish("stage1.radial_depth")
    }

    fn check_pair(&self, dist: &DistanceMatrix, v: VertexId, w: VertexId, acc: &mut PairAccumulator) {
        let g = self.graph;
        let colors = self.colors() as i64;
        let d = i64::from(dist.get(v, w));
        let label = || format!("{} {}", g.vertex(v), g.vertex(w));
        let tree_d: Vec<i64> = (0..self.colors()).map(|c| i64::from(self.tree_distance(c, v, w))).collect();
        let sum: i64 = tree_d.iter().sum();
        let mut violated = false;

        for (c, &l) in tree_d.iter().enumerate() {
            let ok = l <= 2 * d;
            violated |= !ok;
            acc.tallies[LIPSCHITZ].record(ok, || format!("{}: color {c} distance {l} > 2*{d}", label()));
            acc.summary.lipschitz_worst = acc.summary.lipschitz_worst.max(l - 2 * d);
        }

        let global_rhs = 2 * colors * sum + 2 * colors + 1;
        let ok = d <= global_rhs;
        violated |= !ok;
        acc.tallies[GLOBAL].record(ok, || format!("{}: {d} > {global_rhs}", label()));
        acc.summary.global_worst = acc.summary.global_worst.max(d - global_rhs);

        let kind = self.classify_pair(v, w);
        let (mut best_color, mut bound_rhs) = (None, global_rhs);
        match kind {
            PairKind::Other => acc.summary.other += 1,
            PairKind::Close => {
                acc.summary.close += 1;
                if v != w {
                    let delta = i64::from(g.level(v).abs_diff(g.level(w)));
                    let ok = g.level(v) != g.level(w) && d <= delta + 1;
                    violated |= !ok;
                    acc.tallies[RADCLOSE].record(ok, || format!("{}: |vv'| = {d}", label()));
                }
                for c in 0..self.colors() {
                    let t = self.trees[c].tree();
                    let (a, b) = (self.map_fc(c, v), self.map_fc(c, w));
                    let low = t.lowest_segment_vertex(a, b);
                    let ok = low == a || low == b;
                    violated |= !ok;
                    acc.tallies[CLOSE_RADIAL].record(ok, || format!("{}: color {c} segment not radial", label()));
                }
                let (c, l) = argmax(&tree_d);
                let rhs = colors * l + colors + 1;
                let ok = d <= rhs;
                violated |= !ok;
                acc.tallies[CLOSE_BOUND].record(ok, || format!("{}: {d} > {rhs}", label()));
                best_color = Some(c);
                bound_rhs = rhs;
            }
            PairKind::Distinct { critical } => {
                acc.summary.distinct += 1;
                // Orient so that the first vertex has the larger level.
                let (v, w) = if g.level(v) >= g.level(w) { (v, w) } else { (w, v) };
                let span = i64::from(g.level(v) + g.level(w) - 2 * critical + 3);
                let ok = d <= span;
                violated |= !ok;
                acc.tallies[CRITLEVEL_DIST].record(ok, || format!("{}: {d} > {span}", label()));

                let ok = self.critical_level_shape(v, w, critical);
                violated |= !ok;
                acc.tallies[CRITLEVEL].record(ok, || format!("{}: critical level {critical}", label()));

                let mut best: Option<(usize, i64)> = None;
                for c in 0..self.colors() {
                    let t = self.trees[c].tree();
                    let (a, b) = (self.map_fc(c, v), self.map_fc(c, w));
                    let low = t.lowest_segment_vertex(a, b);
                    let reach = i64::from(t.generation_distance(a, low));
                    let top = i64::from(t.level(a).max(t.level(b)));
                    let first = top - i64::from(critical) < colors * (reach + 1);
                    let second = d <= 2 * colors * reach + 2 * colors + 1;
                    if first && second && best.is_none_or(|(_, r)| reach > r) {
                        best = Some((c, reach));
                    }
                }
                let ok = best.is_some();
                violated |= !ok;
                acc.tallies[DISTINCT_BOUND].record(ok, || format!("{}: no color satisfies both bounds", label()));
                if let Some((c, reach)) = best {
                    best_color = Some(c);
                    bound_rhs = 2 * colors * reach + 2 * colors + 1;
                }
            }
        }
        if v != w {
            acc.rows.push(PairRow {
                v: g.vertex(v).to_string(),
                w: g.vertex(w).to_string(),
                distance: d,
                class: kind.tag(),
                critical: match kind {
                    PairKind::Distinct { critical } => Some(critical),
                    _ => None,
                },
                tree_sum: sum,
                best_color,
                bound_rhs,
                violation: violated,
            });
        }
    }

    /// Every same-color `U` containing the center of `v` and `U'` containing
    /// the center of `w` meet below the critical level, with at most three
    /// sub-critical vertices on each side of the segment.
    fn critical_level_shape(&self, v: VertexId, w: VertexId, critical: i32) -> bool {
        let (pv, pw) = (self.graph.center(v), self.graph.center(w));
        (0..self.colors()).all(|c| {
            let tree = &self.trees[c];
            let t = tree.tree();
            let holding = |p: usize| -> Vec<NodeId> {
                (0..t.len()).filter(|&u| self.seq.element(tree.element(u)).members.contains(p)).collect()
            };
            let (us, ws) = (holding(pv), holding(pw));
            us.iter().all(|&a| {
                ws.iter().all(|&b| {
                    let low = t.lowest_segment_vertex(a, b);
                    let below = |x: NodeId| {
                        t.ancestors(x)
                            .into_iter()
                            .take_while(|&y| y != low)
                            .chain(std::iter::once(low))
                            .filter(|&y| t.level(y) < critical)
                            .count()
                    };
                    t.level(low) < critical && below(a) <= 3 && below(b) <= 3
                })
            })
        })
    }
}

fn argmax(values: &[i64]) -> (usize, i64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold((0, i64::MIN), |best, (i, x)| if x > best.1 { (i, x) } else { best })
}

const LIPSCHITZ: usize = 0;
const GLOBAL: usize = 1;
const RADCLOSE: usize = 2;
const CLOSE_RADIAL: usize = 3;
const CLOSE_BOUND: usize = 4;
const CRITLEVEL_DIST: usize = 5;
const CRITLEVEL: usize = 6;
const DISTINCT_BOUND: usize = 7;
const PAIR_CHECKS: [&str; 8] = [
    "stage1.lipschitz",
    "stage1.global_bound",
    "stage1.close_levels",
    "stage1.close_radial_segment",
    "stage1.close_bound",
    "stage1.critical_level_distance",
    "stage1.critical_level_segment",
    "stage1.distinct_bound",
];

#[derive(Default)]
struct PairAccumulator {
    tallies: [Tally; 8],
    rows: Vec<PairRow>,
    summary: Stage1Summary,
}

impl PairAccumulator {
    fn merge(&mut self, other: PairAccumulator) {
        for (mine, theirs) in self.tallies.iter_mut().zip(other.tallies) {
            *mine = std::mem::take(mine).merge(theirs);
        }
        self.rows.extend(other.rows);
        let s = &mut self.summary;
        s.close += other.summary.close;
        s.distinct += other.summary.distinct;
        s.other += other.summary.other;
        s.lipschitz_worst = s.lipschitz_worst.max(other.summary.lipschitz_worst);
        s.global_worst = s.global_worst.max(other.summary.global_worst);
    }
}

/// Pair counts by class and the largest excess over the Lipschitz and global
/// bounds (nonpositive when the bounds hold).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stage1Summary {
    pub close: u64,
    pub distinct: u64,
    pub other: u64,
    pub lipschitz_worst: i64,
    pub global_worst: i64,
}

impl Default for Stage1Summary {
    fn default() -> Self {
        Self { close: 0, distinct: 0, other: 0, lipschitz_worst: i64::MIN, global_worst: i64::MIN }
    }
}

/// One line of the pair dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairRow {
    pub v: String,
    pub w: String,
    pub distance: i64,
    pub class: &'static str,
    pub critical: Option<i32>,
    pub tree_sum: i64,
    pub best_color: Option<usize>,
    pub bound_rhs: i64,
    pub violation: bool,
}

#[derive(Clone, Debug)]
pub struct Stage1Report {
    pub suite: SuiteReport,
    pub rows: Vec<PairRow>,
    pub summary: Stage1Summary,
}

impl Stage1Report {
    /// `v v' |vv'| class l sum_tree_dist best_color bound_rhs violation?`
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("v v' |vv'| class l sum_tree_dist best_color bound_rhs violation?\n");
        for r in &self.rows {
            let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{} {} {} {} {} {} {} {} {}\n",
                r.v,
                r.w,
                r.distance,
                r.class,
                opt(r.critical.map(|l| l.to_string())),
                r.tree_sum,
                opt(r.best_color.map(|c| c.to_string())),
                r.bound_rhs,
                if r.violation { "yes" } else { "no" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::coverings::{generate_covering_sequence, CoveringKind};
    use crate::hyper_approx::ContainmentMode;
    use crate::metric_space::{generate_space, FiniteMetricSpace, ScaleParams, SpaceKind};
    use crate::rational::{integer, ratio};

    #[test]
    fn critical_level_examples() {
        assert_eq!(critical_level(&ratio(1, 7), &ratio(1, 6)), 2);
        assert_eq!(critical_level(&ratio(1, 36), &ratio(1, 6)), 2);
        assert_eq!(critical_level(&ratio(1, 2), &ratio(1, 6)), 1);
        assert_eq!(critical_level(&integer(1), &ratio(1, 6)), 0);
        assert_eq!(critical_level(&integer(2), &ratio(1, 6)), 0);
    }

    #[test]
    fn single_vertex_graph_is_vacuous() {
        let rows = vec![vec![integer(0), ratio(1, 2)], vec![ratio(1, 2), integer(0)]];
        let space = Arc::new(FiniteMetricSpace::from_matrix("pair", rows).unwrap());
        let scale = ScaleParams::for_space(&space, ratio(1, 9), Some(0)).unwrap();
        let graph = ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap();
        let seq = crate::coverings::CoveringSequence::from_certificates(
            graph.space(),
            ratio(1, 9),
            1,
            vec![vec![vec![crate::coverings::Certificate::Whole]]],
        )
        .unwrap();
        let stage = Stage1::build(&graph, &seq).unwrap();
        let report = stage.report(&graph.distances());
        assert!(report.suite.passed());
        assert!(report.rows.is_empty());
        assert_eq!(stage.product_distance(0, 0), 0);
    }

    #[test]
    fn cantor_pairs_pass() {
        let space = Arc::new(generate_space(SpaceKind::Cantor { depth: 3 }).unwrap());
        let scale = ScaleParams::for_space(&space, ratio(1, 9), Some(3)).unwrap();
        let graph = ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap();
        let seq = generate_covering_sequence(&CoveringKind::Ultrametric, &graph).unwrap();
        let stage = Stage1::build(&graph, &seq).unwrap();
        let report = stage.report(&graph.distances());
        assert!(report.suite.passed(), "{:#?}", report.suite);
        assert!(report.summary.distinct > 0 && report.summary.close > 0);
        for v in 0..graph.len() {
            assert_eq!(stage.product_distance(v, v), 0);
        }
    }
}
