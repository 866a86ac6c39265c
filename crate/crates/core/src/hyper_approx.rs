//! The hyperbolic approximation graph: one vertex per (level, net center),
//! horizontal edges between intersecting balls of one level and radial edges
//! between nested balls of neighbouring levels.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric_space::{compute_k0, maximal_separated_net, FiniteMetricSpace, ScaleParams};
use crate::rational::{self, Rational};
use crate::report::{LemmaCheck, SuiteReport, Tally};

pub type VertexId = usize;

/// Graphs up to this size get an exhaustive δ scan.
pub const EXHAUSTIVE_DELTA_LIMIT: usize = 300;
/// Graphs up to this size get every pair in the geodesic-shape check.
pub const EXHAUSTIVE_GEODESIC_LIMIT: usize = 400;
const SAMPLED_TRIPLES: usize = 200_000;
const SAMPLED_PAIRS: usize = 50_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    Horizontal,
    Radial,
}

impl EdgeKind {
    pub fn tag(self) -> &'static str {
        match self {
            EdgeKind::Horizontal => "H",
            EdgeKind::Radial => "R",
        }
    }
}

/// How `B(upper) ⊆ B(lower)` is decided for radial edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContainmentMode {
    /// `d(upper, lower) + 2r^(k+1) <= 2r^k`.
    #[default]
    Certificate,
    /// Containment of the sampled open balls.
    Pointwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApproxVertex {
    pub level: i32,
    pub center: usize,
}

impl fmt::Display for ApproxVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.center)
    }
}

/// `a < b`; for radial edges `a` is the lower-level endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub kind: EdgeKind,
}

/// Comparisons that landed exactly on an edge threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryTies {
    pub horizontal: u64,
    pub radial: u64,
}

#[derive(Clone, Debug)]
pub struct ApproxGraph {
    space: Arc<FiniteMetricSpace>,
    scale: ScaleParams,
    mode: ContainmentMode,
    vertices: Vec<ApproxVertex>,
    level_offsets: Vec<usize>,
    lookahead: Vec<usize>,
    index: HashMap<ApproxVertex, VertexId>,
    adjacency: Vec<Vec<(VertexId, EdgeKind)>>,
    edges: Vec<Edge>,
    ties: BoundaryTies,
}

impl ApproxGraph {
    /// Builds levels `k0..=J` from greedy nets; the net at `J + 1` is kept as
    /// lookahead for the covering and labelling stages.
    pub fn build(
        space: Arc<FiniteMetricSpace>,
        scale: ScaleParams,
        mode: ContainmentMode,
    ) -> Result<Self> {
        let k0 = compute_k0(space.diam(), scale.r())?;
        if k0 != scale.k0() {
            return Err(Error::Scale(format!(
                "root level {} does not match the diameter (expected {k0})",
                scale.k0()
            )));
        }
        let order: Vec<usize> = (0..space.len()).collect();
        let mut vertices = Vec::new();
        let mut level_offsets = vec![0];
        for level in scale.k0()..=scale.max_level() {
            let centers = maximal_separated_net(&space, &scale.scale(level), &order);
            vertices.extend(centers.into_iter().map(|center| ApproxVertex { level, center }));
            level_offsets.push(vertices.len());
        }
        let lookahead =
            maximal_separated_net(&space, &scale.scale(scale.max_level() + 1), &order);
        let index = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut graph = Self {
            space,
            scale,
            mode,
            adjacency: vec![Vec::new(); vertices.len()],
            vertices,
            level_offsets,
            lookahead,
            index,
            edges: Vec::new(),
            ties: BoundaryTies::default(),
        };
        graph.connect();
        Ok(graph)
    }

    fn connect(&mut self) {
        let two = rational::integer(2);
        let four = rational::integer(4);
        let mut edges = Vec::new();
        let mut ties = BoundaryTies::default();
        for level in self.levels() {
            let here = self.vertices_at(level);
            let reach = self.scale.scale(level) * &four;
            for a in here.clone() {
                for b in (a + 1)..here.end {
                    let d = self.center_distance(a, b);
                    if *d == reach {
                        ties.horizontal += 1;
                    }
                    if *d <= reach {
                        edges.push(Edge { a, b, kind: EdgeKind::Horizontal });
                    }
                }
            }
            if level == self.scale.max_level() {
                continue;
            }
            let lower_radius = self.scale.scale(level) * &two;
            let upper_radius = self.scale.scale(level + 1) * &two;
            for a in here.clone() {
                for b in self.vertices_at(level + 1) {
                    let slack = self.center_distance(a, b) + &upper_radius;
                    if slack == lower_radius {
                        ties.radial += 1;
                    }
                    let nested = match self.mode {
                        ContainmentMode::Certificate => slack <= lower_radius,
                        ContainmentMode::Pointwise => self
                            .ball(self.vertices[b].level, self.vertices[b].center)
                            .is_subset(&self.ball(level, self.vertices[a].center)),
                    };
                    if nested {
                        edges.push(Edge { a, b, kind: EdgeKind::Radial });
                    }
                }
            }
        }
        edges.sort();
        for e in &edges {
            self.adjacency[e.a].push((e.b, e.kind));
            self.adjacency[e.b].push((e.a, e.kind));
        }
        for list in &mut self.adjacency {
            list.sort();
        }
        self.edges = edges;
        self.ties = ties;
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn shared_space(&self) -> Arc<FiniteMetricSpace> {
        Arc::clone(&self.space)
    }

    pub fn scale(&self) -> &ScaleParams {
        &self.scale
    }

    pub fn mode(&self) -> ContainmentMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<i32> {
        self.scale.k0()..=self.scale.max_level()
    }

    pub fn vertex(&self, v: VertexId) -> ApproxVertex {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[ApproxVertex] {
        &self.vertices
    }

    pub fn level(&self, v: VertexId) -> i32 {
        self.vertices[v].level
    }

    pub fn center(&self, v: VertexId) -> usize {
        self.vertices[v].center
    }

    /// Vertex ids at `level`; empty outside `k0..=J`.
    pub fn vertices_at(&self, level: i32) -> Range<VertexId> {
        if !self.levels().contains(&level) {
            return 0..0;
        }
        let i = (level - self.scale.k0()) as usize;
        self.level_offsets[i]..self.level_offsets[i + 1]
    }

    /// Net centers at any level `k0..=J+1`.
    pub fn net(&self, level: i32) -> Vec<usize> {
        if level == self.scale.max_level() + 1 {
            self.lookahead.clone()
        } else {
            self.vertices_at(level).map(|v| self.vertices[v].center).collect()
        }
    }

    pub fn find(&self, level: i32, center: usize) -> Option<VertexId> {
        self.index.get(&ApproxVertex { level, center }).copied()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeKind)] {
        &self.adjacency[v]
    }

    pub fn edge_kind(&self, a: VertexId, b: VertexId) -> Option<EdgeKind> {
        self.adjacency[a]
            .binary_search_by(|(w, _)| w.cmp(&b))
            .ok()
            .map(|i| self.adjacency[a][i].1)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary_ties(&self) -> BoundaryTies {
        self.ties
    }

    pub fn center_distance(&self, a: VertexId, b: VertexId) -> &Rational {
        self.space.dist(self.vertices[a].center, self.vertices[b].center)
    }

    /// Sample points of the open ball of radius `2r^level` around `center`.
    pub fn ball(&self, level: i32, center: usize) -> FixedBitSet {
        let radius = self.scale.ball_radius(level);
        let mut set = FixedBitSet::with_capacity(self.space.len());
        for z in 0..self.space.len() {
            if *self.space.dist(center, z) < radius {
                set.insert(z);
            }
        }
        set
    }

    /// Breadth-first distance between two vertices.
    pub fn graph_distance(&self, a: VertexId, b: VertexId) -> u32 {
        self.bfs(a)[b]
    }

    fn bfs(&self, source: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = std::collections::VecDeque::from([source]);
        dist[source] = 0;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adjacency[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs distances, one BFS per source.
    pub fn distances(&self) -> DistanceMatrix {
        let rows: Vec<Vec<u32>> = (0..self.len()).into_par_iter().map(|s| self.bfs(s)).collect();
        DistanceMatrix { n: self.len(), d: rows.into_iter().flatten().collect() }
    }

    /// First vertex one level down, within `r^(level)` of `v`, radially joined
    /// to `v` and to every horizontal neighbour of `v`.
    pub fn central_ancestor(&self, v: VertexId) -> Option<VertexId> {
        let level = self.level(v);
        if level <= self.scale.k0() {
            return None;
        }
        let limit = self.scale.scale(level - 1);
        let horizontal: Vec<VertexId> = self.adjacency[v]
            .iter()
            .filter(|(_, k)| *k == EdgeKind::Horizontal)
            .map(|(w, _)| *w)
            .collect();
        self.vertices_at(level - 1).find(|&w| {
            *self.center_distance(v, w) <= limit
                && self.edge_kind(v, w) == Some(EdgeKind::Radial)
                && horizontal.iter().all(|&u| self.edge_kind(u, w) == Some(EdgeKind::Radial))
        })
    }

    /// Twice the Gromov product `(x|y)_o`.
    pub fn gromov_product(&self, dist: &DistanceMatrix, o: VertexId, x: VertexId, y: VertexId) -> HalfInt {
        HalfInt::from_twice(
            i64::from(dist.get(o, x)) + i64::from(dist.get(o, y)) - i64::from(dist.get(x, y)),
        )
    }

    /// Largest defect `min{(x|y),(y|z)} - (x|z)` at the root.
    pub fn estimate_delta(&self, dist: &DistanceMatrix, seed: u64) -> DeltaEstimate {
        let n = self.len();
        let o = self.root();
        let g = |x: usize, y: usize| {
            i64::from(dist.get(o, x)) + i64::from(dist.get(o, y)) - i64::from(dist.get(x, y))
        };
        let defect = |x, y, z| g(x, y).min(g(y, z)) - g(x, z);
        if n <= EXHAUSTIVE_DELTA_LIMIT {
            let worst = (0..n)
                .into_par_iter()
                .map(|x| {
                    let mut worst = 0;
                    for z in x..n {
                        for y in 0..n {
                            worst = worst.max(defect(x, y, z));
                        }
                    }
                    worst
                })
                .max()
                .unwrap_or(0);
            let triples = (n * (n + 1) / 2 * n) as u64;
            DeltaEstimate { delta: HalfInt::from_twice(worst), exhaustive: true, triples }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triples: Vec<(usize, usize, usize)> = (0..SAMPLED_TRIPLES)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            let worst = triples
                .par_iter()
                .map(|&(x, y, z)| defect(x, y, z).max(defect(z, y, x)))
                .max()
                .unwrap_or(0)
                .max(0);
            DeltaEstimate {
                delta: HalfInt::from_twice(worst),
                exhaustive: false,
                triples: SAMPLED_TRIPLES as u64,
            }
        }
    }

    /// Extremes of `d(v, v') a^((v|v')_root)` over deepest-level pairs.
    pub fn visual_metric_constants(&self, dist: &DistanceMatrix) -> Result<VisualConstants> {
        let deepest = self.vertices_at(self.scale.max_level());
        if deepest.len() < 2 {
            return Err(Error::Graph(format!(
                "level {} has fewer than two vertices",
                self.scale.max_level()
            )));
        }
        let a = rational::to_f64(&self.scale.a());
        let mut c1 = f64::INFINITY;
        let mut c2 = 0f64;
        let mut pairs = 0u64;
        for v in deepest.clone() {
            for w in (v + 1)..deepest.end {
                let product = self.gromov_product(dist, self.root(), v, w);
                let value = rational::to_f64(self.center_distance(v, w)) * a.powf(product.to_f64());
                c1 = c1.min(value);
                c2 = c2.max(value);
                pairs += 1;
            }
        }
        Ok(VisualConstants { c1, c2, pairs })
    }

    /// `level:center level:center H|R`, one edge per line.
    pub fn export_edges(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                self.vertices[e.a],
                self.vertices[e.b],
                e.kind.tag()
            ));
        }
        out
    }

    pub fn summary(&self, delta: Option<&DeltaEstimate>, visual: Option<&VisualConstants>) -> GraphSummary {
        let levels = self
            .levels()
            .map(|level| LevelCount { level, vertices: self.vertices_at(level).len() })
            .collect();
        let horizontal = self.edges.iter().filter(|e| e.kind == EdgeKind::Horizontal).count();
        GraphSummary {
            levels,
            vertex_count: self.len(),
            edge_counts: EdgeCounts { horizontal, radial: self.edges.len() - horizontal },
            boundary_ties: self.ties,
            delta: delta.map(|d| d.delta),
            delta_exhaustive: delta.map(|d| d.exhaustive),
            c1: visual.map(|v| v.c1),
            c2: visual.map(|v| v.c2),
        }
    }

    /// Whether some shortest `s`-`t` path has at most one horizontal edge,
    /// and that edge (if any) sits at the minimum level of the path.
    pub fn geodesic_shape_ok(&self, dist: &DistanceMatrix, s: VertexId, t: VertexId) -> bool {
        let total = dist.get(s, t);
        if total == u32::MAX {
            return false;
        }
        // State: (horizontal edge used, minimum level so far); an edge used at
        // level h forces the minimum to stay at h.
        let mut states: HashMap<VertexId, Vec<(bool, i32)>> = HashMap::new();
        states.insert(s, vec![(false, self.level(s))]);
        let mut layer = vec![s];
        for step in 0..total {
            let mut next: Vec<VertexId> = Vec::new();
            for &x in &layer {
                let from = states.get(&x).cloned().unwrap_or_default();
                for &(y, kind) in &self.adjacency[x] {
                    if dist.get(s, y) != step + 1 || dist.get(y, t) != total - step - 1 {
                        continue;
                    }
                    let ly = self.level(y);
                    for &(used, min) in &from {
                        let state = match kind {
                            EdgeKind::Horizontal if used || min < ly => continue,
                            EdgeKind::Horizontal => (true, ly),
                            EdgeKind::Radial if used && ly < min => continue,
                            EdgeKind::Radial => (used, min.min(ly)),
                        };
                        let entry = states.entry(y).or_default();
                        if entry.is_empty() {
                            next.push(y);
                        }
                        if !entry.contains(&state) {
                            entry.push(state);
                        }
                    }
                }
            }
            layer = next;
        }
        states.get(&t).is_some_and(|v| !v.is_empty())
    }

    /// Runs every graph-level check.
    pub fn verify(&self, dist: &DistanceMatrix, seed: u64) -> SuiteReport {
        let mut report = SuiteReport::new("approx");
        report.push(self.check_connected(dist));
        report.push(self.check_root_depth(dist));
        report.push(self.check_balls_intersect(dist));
        report.push(self.check_central_ancestor());
        report.push(self.check_horizontal_descent(dist));
        report.push(self.check_geodesic_shape(dist, seed));
        report
    }

    fn check_connected(&self, dist: &DistanceMatrix) -> LemmaCheck {
        let mut tally = Tally::default();
        for v in 0..self.len() {
            tally.record(dist.get(self.root(), v) != u32::MAX, || {
                format!("{} unreachable from the root", self.vertices[v])
            });
        }
        tally.finish("approx.connected")
    }

    fn check_root_depth(&self, dist: &DistanceMatrix) -> LemmaCheck {
        let mut tally = Tally::default();
        for v in 0..self.len() {
            let bound = (self.level(v) - self.scale.k0()) as u32;
            let d = dist.get(self.root(), v);
            tally.record(d <= bound, || format!("|root {}| = {d} > {bound}", self.vertices[v]));
        }
        tally.finish("approx.root_depth")
    }

    fn check_balls_intersect(&self, dist: &DistanceMatrix) -> LemmaCheck {
        let tally = (0..self.len())
            .into_par_iter()
            .map(|v| {
                let mut tally = Tally::default();
                let rv = self.scale.ball_radius(self.level(v));
                for w in v..self.len() {
                    let reach = &rv + self.scale.ball_radius(self.level(w));
                    if *self.center_distance(v, w) >= reach {
                        continue;
                    }
                    let bound = self.level(v).abs_diff(self.level(w)) + 1;
                    let d = dist.get(v, w);
                    tally.record(d <= bound, || {
                        format!("|{} {}| = {d} > {bound}", self.vertices[v], self.vertices[w])
                    });
                }
                tally
            })
            .reduce(Tally::default, Tally::merge);
        tally.finish("approx.balls_intersect")
    }

    fn check_central_ancestor(&self) -> LemmaCheck {
        let mut tally = Tally::default();
        for v in 1..self.len() {
            tally.record(self.central_ancestor(v).is_some(), || {
                format!("{} has no central ancestor", self.vertices[v])
            });
        }
        tally.finish("approx.central_ancestor")
    }

    fn check_horizontal_descent(&self, dist: &DistanceMatrix) -> LemmaCheck {
        let lower = |v: VertexId| -> Vec<VertexId> {
            self.adjacency[v]
                .iter()
                .filter(|&&(w, _)| self.level(w) + 1 == self.level(v))
                .map(|&(w, _)| w)
                .collect()
        };
        let mut tally = Tally::default();
        for level in self.levels() {
            let here = self.vertices_at(level);
            for v in here.clone() {
                let below_v = lower(v);
                for u in v..here.end {
                    if dist.get(v, u) > 1 {
                        continue;
                    }
                    for &w in &below_v {
                        for &x in &lower(u) {
                            let d = dist.get(w, x);
                            tally.record(d <= 1, || {
                                format!(
                                    "{}~{} descend to {} {} at distance {d}",
                                    self.vertices[v], self.vertices[u], self.vertices[w], self.vertices[x]
                                )
                            });
                        }
                    }
                }
            }
        }
        tally.finish("approx.horizontal_descent")
    }

    fn check_geodesic_shape(&self, dist: &DistanceMatrix, seed: u64) -> LemmaCheck {
        let n = self.len();
        let pairs: Vec<(VertexId, VertexId)> = if n <= EXHAUSTIVE_GEODESIC_LIMIT {
            (0..n).flat_map(|s| (s + 1..n).map(move |t| (s, t))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..SAMPLED_PAIRS).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
        };
        let tally = pairs
            .par_iter()
            .map(|&(s, t)| {
                let mut tally = Tally::default();
                tally.record(self.geodesic_shape_ok(dist, s, t), || {
                    format!("no well-shaped geodesic {} -> {}", self.vertices[s], self.vertices[t])
                });
                tally
            })
            .reduce(Tally::default, Tally::merge);
        tally.finish("approx.geodesic_shape")
    }
}

/// Dense all-pairs graph distances; `u32::MAX` marks unreachable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn get(&self, a: VertexId, b: VertexId) -> u32 {
        self.d[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// A number of the form `m / 2`, stored as `m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn from_int(n: i64) -> Self {
        Self(2 * n)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            let sign = if self.0 < 0 { "-" } else { "" };
            write!(f, "{sign}{}.5", self.0.abs() / 2)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaEstimate {
    pub delta: HalfInt,
    pub exhaustive: bool,
    pub triples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VisualConstants {
    pub c1: f64,
    pub c2: f64,
    pub pairs: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCount {
    pub level: i32,
    pub vertices: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCounts {
    pub horizontal: usize,
    pub radial: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphSummary {
    pub levels: Vec<LevelCount>,
    pub vertex_count: usize,
    pub edge_counts: EdgeCounts,
    pub boundary_ties: BoundaryTies,
    pub delta: Option<HalfInt>,
    pub delta_exhaustive: Option<bool>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_space::{generate_space, SpaceKind};
    use crate::rational::{integer, ratio};

    fn two_points() -> ApproxGraph {
        let rows = vec![vec![integer(0), integer(1)], vec![integer(1), integer(0)]];
        let space = Arc::new(FiniteMetricSpace::from_matrix("pair", rows).unwrap());
        let scale = ScaleParams::new(ratio(1, 6), -1, 0).unwrap();
        ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap()
    }

    fn cantor(depth: u32, max_level: i32) -> ApproxGraph {
        let space = Arc::new(generate_space(SpaceKind::Cantor { depth }).unwrap());
        let scale = ScaleParams::for_space(&space, ratio(1, 9), Some(max_level)).unwrap();
        ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap()
    }

    #[test]
    fn two_point_example() {
        let g = two_points();
        assert_eq!(g.len(), 3);
        assert_eq!(g.vertices_at(-1).len(), 1);
        let (a, b) = (1, 2);
        assert_eq!(g.edge_kind(a, b), Some(EdgeKind::Horizontal));
        assert_eq!(g.edge_kind(0, a), Some(EdgeKind::Radial));
        assert_eq!(g.edge_kind(0, b), Some(EdgeKind::Radial));
        assert_eq!(g.graph_distance(a, b), 1);
        assert_eq!(g.central_ancestor(a), Some(0));
        assert_eq!(g.central_ancestor(b), Some(0));
        assert_eq!(g.central_ancestor(0), None);
    }

    #[test]
    fn root_only_graph() {
        let space = Arc::new(generate_space(SpaceKind::Circle { n: 4 }).unwrap());
        let scale = ScaleParams::for_space(&space, ratio(1, 6), Some(0)).unwrap();
        let g = ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.edges().is_empty());
        let dist = g.distances();
        assert_eq!(g.estimate_delta(&dist, 1).delta, HalfInt::default());
        assert!(g.visual_metric_constants(&dist).is_err());
    }

    #[test]
    fn mismatched_root_level_is_rejected() {
        let space = Arc::new(generate_space(SpaceKind::Circle { n: 4 }).unwrap());
        let scale = ScaleParams::new(ratio(1, 6), 1, 2).unwrap();
        assert!(ApproxGraph::build(space, scale, ContainmentMode::Certificate).is_err());
    }

    #[test]
    fn gromov_product_identities() {
        let g = cantor(3, 2);
        let d = g.distances();
        for x in 0..g.len() {
            assert_eq!(g.gromov_product(&d, 0, x, x), HalfInt::from_int(d.get(0, x).into()));
            assert_eq!(g.gromov_product(&d, 0, 0, x), HalfInt::default());
            for y in 0..g.len() {
                assert!(g.gromov_product(&d, 0, x, y) >= HalfInt::default());
            }
        }
    }

    #[test]
    fn cantor_graph_passes_every_check() {
        let g = cantor(3, 3);
        let d = g.distances();
        let report = g.verify(&d, DEFAULT_SEED);
        assert!(report.passed(), "{report:#?}");
        let visual = g.visual_metric_constants(&d).unwrap();
        assert!(visual.c1 > 0.0 && visual.c1 <= visual.c2);
    }

    #[test]
    fn radial_only_graph_is_a_tree() {
        // Far-apart clusters at every scale give no horizontal edges below the root.
        let g = cantor(3, 3);
        let tree_like = g.edges().iter().all(|e| e.kind == EdgeKind::Radial);
        let d = g.distances();
        if tree_like {
            assert_eq!(g.estimate_delta(&d, 1).delta, HalfInt::default());
        }
        assert!(g.estimate_delta(&d, 1).exhaustive);
    }

    #[test]
    fn pointwise_mode_contains_certificate_edges() {
        let space = Arc::new(generate_space(SpaceKind::Circle { n: 27 }).unwrap());
        let scale = ScaleParams::for_space(&space, ratio(1, 9), Some(2)).unwrap();
        let cert = ApproxGraph::build(space.clone(), scale.clone(), ContainmentMode::Certificate).unwrap();
        let point = ApproxGraph::build(space, scale, ContainmentMode::Pointwise).unwrap();
        for e in cert.edges() {
            assert_eq!(point.edge_kind(e.a, e.b), Some(e.kind));
        }
    }

    #[test]
    fn half_int_display() {
        assert_eq!(HalfInt::from_twice(3).to_string(), "1.5");
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-1.5");
        assert_eq!(HalfInt::from_twice(4).to_string(), "2");
    }

    #[test]
    fn edge_export_format() {
        let g = two_points();
        assert_eq!(g.export_edges(), "-1:0 0:0 R\n-1:0 0:1 R\n0:0 0:1 H\n");
    }
}
