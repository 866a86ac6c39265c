//! Net colorings, edge words over the finite alphabet, sentences of tree
//! vertices and the diary maps into the word tree over pages.

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use rayon::prelude::*;
use serde::Serialize;

use crate::coverings::ElementId;
use crate::diary::{encode, reconstruct, Diary, Page, Sentence, Symbol, Token};
use crate::error::{Error, Result};
use crate::hyper_approx::{ApproxGraph, DistanceMatrix, VertexId};
use crate::morse_thue::{is_well_decorated, levels, mt_bit, strip, Decorated};
use crate::rational::{self, Rational};
use crate::report::{LemmaCheck, SuiteReport, Tally};
use crate::tree_embed::{PairKind, Stage1};
use crate::trees::{binary_embed, binary_sandwich, binary_width, word_distance, NodeId};

/// Per-level colorings `mu_j` of the nets `V_j`, levels `k0..=J+1`.
#[derive(Clone, Debug)]
pub struct NetColoring {
    k0: i32,
    /// `colors[j - k0][i]` is the color of the `i`-th center of `net(j)`.
    colors: Vec<Vec<u32>>,
    centers: Vec<Vec<usize>>,
    palette: usize,
}

impl NetColoring {
    pub fn k0(&self) -> i32 {
        self.k0
    }

    pub fn max_level(&self) -> i32 {
        self.k0 + self.colors.len() as i32 - 1
    }

    /// `|F|`.
    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn centers(&self, level: i32) -> &[usize] {
        &self.centers[(level - self.k0) as usize]
    }

    pub fn colors(&self, level: i32) -> &[u32] {
        &self.colors[(level - self.k0) as usize]
    }

    /// Conflict distance `2 r^(j-2)`.
    pub fn conflict_radius(graph: &ApproxGraph, level: i32) -> Rational {
        graph.scale().scale(level - 2) * rational::integer(2)
    }

    /// Every conflicting pair colored differently, per level.
    pub fn check(&self, graph: &ApproxGraph) -> LemmaCheck {
        let space = graph.space();
        let mut tally = Tally::default();
        for j in self.k0..=self.max_level() {
            let radius = Self::conflict_radius(graph, j);
            let (centers, colors) = (self.centers(j), self.colors(j));
            for a in 0..centers.len() {
                for b in a + 1..centers.len() {
                    if *space.dist(centers[a], centers[b]) < radius {
                        tally.record(colors[a] != colors[b], || {
                            format!("level {j}: centers {} and {} share a color", centers[a], centers[b])
                        });
                    }
                }
            }
        }
        tally.finish("labelling.coloring")
    }
}

/// Greedy coloring of each net in ascending center order.
pub fn color_nets(graph: &ApproxGraph) -> NetColoring {
    let space = graph.space();
    let k0 = graph.scale().k0();
    let top = graph.scale().max_level() + 1;
    let mut colors = Vec::new();
    let mut centers = Vec::new();
    let mut palette = 1;
    for j in k0..=top {
        let mut net = graph.net(j);
        net.sort_unstable();
        let radius = NetColoring::conflict_radius(graph, j);
        let mut assigned: Vec<u32> = Vec::with_capacity(net.len());
        for (i, &z) in net.iter().enumerate() {
            let mut used = vec![false; i + 1];
            for (k, &y) in net[..i].iter().enumerate() {
                if *space.dist(z, y) < radius {
                    used[assigned[k] as usize] = true;
                }
            }
            let color = used.iter().position(|u| !u).expect("a free color among i + 1");
            palette = palette.max(color + 1);
            assigned.push(color as u32);
        }
        colors.push(assigned);
        centers.push(net);
    }
    NetColoring { k0, colors, centers, palette }
}

/// A nonempty set of net colors, the undecorated part of a letter; bit `c`
/// of the packed words marks color `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ColorSet(pub Vec<u64>);

impl ColorSet {
    pub fn from_colors(colors: impl IntoIterator<Item = usize>) -> Self {
        let mut words: Vec<u64> = Vec::new();
        for c in colors {
            if words.len() <= c / 64 {
                words.resize(c / 64 + 1, 0);
            }
            words[c / 64] |= 1 << (c % 64);
        }
        ColorSet(words)
    }

    pub fn contains(&self, color: usize) -> bool {
        self.0.get(color / 64).is_some_and(|w| w >> (color % 64) & 1 == 1)
    }

    pub fn colors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&c| self.contains(c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

impl Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.colors().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", members.join(","))
    }
}

/// Symbols of labelled sentences: decorated color sets and stop signs.
pub type Label = Decorated<Token<ColorSet>>;
pub type LabelSentence = Sentence<Label>;
pub type LabelPage = Page<Label>;

/// Symbol `a` of a page as text: `{0,2}1` for a letter, `s0` for a stop.
pub fn label_text(label: &Label) -> String {
    label.to_string()
}

pub fn page_text(page: &LabelPage) -> String {
    let mut parts: Vec<String> = page.tokens.iter().map(label_text).collect();
    if page.star {
        parts.push("⋆".into());
    }
    parts.join(" ")
}

/// Minimum diary constant for `colors` covering colors.
pub fn min_kappa(colors: usize) -> usize {
    15 * colors + 1
}

/// `max(3|C|+1, 15|C|^2 + 4|C| + 1)`.
pub fn sigma_lower(colors: usize) -> i64 {
    let c = colors as i64;
    (3 * c + 1).max(15 * c * c + 4 * c + 1)
}

/// Letters, sentences and diaries of every color tree.
pub struct Labelling<'s, 'a> {
    stage1: &'s Stage1<'a>,
    coloring: NetColoring,
    kappa: usize,
    research: bool,
    /// Per level `k0..=J+1`: the balls `B(v)` of the net.
    balls: Vec<Vec<fixedbitset::FixedBitSet>>,
    sentences: Vec<Vec<LabelSentence>>,
    diaries: Vec<Vec<Diary<Label>>>,
}

impl<'s, 'a> Labelling<'s, 'a> {
    /// Rejects `kappa < 15|C| + 1` unless `research` is set.
    pub fn build(stage1: &'s Stage1<'a>, coloring: NetColoring, kappa: usize, research: bool) -> Result<Self> {
        let needed = min_kappa(stage1.colors());
        if kappa == 0 || (kappa < needed && !research) {
            return Err(Error::Config(format!(
                "diary constant {kappa} is below {needed} for {} colors",
                stage1.colors()
            )));
        }
        let graph = stage1.graph();
        let balls = (coloring.k0..=coloring.max_level())
            .map(|j| coloring.centers(j).iter().map(|&z| graph.ball(j, z)).collect())
            .collect();
        let mut out = Self { stage1, coloring, kappa, research, balls, sentences: Vec::new(), diaries: Vec::new() };
        for c in 0..stage1.colors() {
            let tree = stage1.tree(c).tree();
            let mut sentences: Vec<LabelSentence> = Vec::with_capacity(tree.len());
            for node in 0..tree.len() {
                let sentence = match tree.parent(node) {
                    None => Sentence::empty(),
                    Some(p) => {
                        let mut tokens = sentences[p].tokens().to_vec();
                        for (k, set) in out.edge_word(c, node)? {
                            tokens.push(Decorated { symbol: Token::Letter(set), bit: mt_bit(k as u64) });
                        }
                        let last = tree.level(node);
                        tokens.push(Decorated { symbol: Token::Stop, bit: mt_bit(last as u64) });
                        Sentence::new(tokens)?
                    }
                };
                sentences.push(sentence);
            }
            let diaries = sentences.iter().map(|s| encode(s, kappa)).collect::<std::result::Result<_, _>>()?;
            out.sentences.push(sentences);
            out.diaries.push(diaries);
        }
        Ok(out)
    }

    pub fn stage1(&self) -> &Stage1<'a> {
        self.stage1
    }

    pub fn coloring(&self) -> &NetColoring {
        &self.coloring
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn research(&self) -> bool {
        self.research
    }

    /// `a_k'`: colors of the level-`k+1` balls meeting `members`.
    pub fn letter(&self, k: i32, members: &fixedbitset::FixedBitSet) -> Result<ColorSet> {
        let level = k + 1;
        if level < self.coloring.k0 || level > self.coloring.max_level() {
            return Err(Error::Embedding(format!("no net colors at level {level}")));
        }
        let i = (level - self.coloring.k0) as usize;
        let set = ColorSet::from_colors(
            self.balls[i]
                .iter()
                .zip(self.coloring.colors(level))
                .filter(|(ball, _)| !ball.is_disjoint(members))
                .map(|(_, &color)| color as usize),
        );
        if set.is_empty() {
            return Err(Error::Embedding(format!("empty letter at level {k}")));
        }
        Ok(set)
    }

    /// Letters `(k, a_k')` of the edge from `node` up to its parent.
    pub fn edge_word(&self, c: usize, node: NodeId) -> Result<Vec<(i32, ColorSet)>> {
        let tree = self.stage1.tree(c).tree();
        let parent = tree.parent(node).ok_or_else(|| Error::Embedding("the root has no edge word".into()))?;
        let members = &self.stage1.sequence().element(self.stage1.tree(c).element(node)).members;
        (tree.level(parent) + 1..=tree.level(node)).map(|k| Ok((k, self.letter(k, members)?))).collect()
    }

    /// `alpha(U)` for the tree vertex `node` of color `c`.
    pub fn sentence_of(&self, c: usize, node: NodeId) -> &LabelSentence {
        &self.sentences[c][node]
    }

    /// `psi_c(U)`.
    pub fn diary_of(&self, c: usize, node: NodeId) -> &Diary<Label> {
        &self.diaries[c][node]
    }

    /// `eta_c(v) = psi_c(f_c(v))`.
    pub fn eta(&self, c: usize, v: VertexId) -> &Diary<Label> {
        self.diary_of(c, self.stage1.map_fc(c, v))
    }

    /// The letter of level `l` in `alpha(U)` and its word index `m`
    /// (number of stops before it).
    pub fn letter_at_level(&self, c: usize, node: NodeId, l: i32) -> Option<(Label, usize)> {
        let tree = self.stage1.tree(c).tree();
        let root_level = tree.level(tree.root());
        let tokens = self.sentence_of(c, node).tokens();
        let want = u64::try_from(l - root_level).ok().filter(|&x| x >= 1)?;
        let lv = levels(tokens);
        let i = (0..tokens.len()).find(|&i| !tokens[i].is_stop() && lv[i] == want)?;
        Some((tokens[i].clone(), tokens[..i].iter().filter(|t| t.is_stop()).count()))
    }

    /// Critical-level letters `(a, m, a', m')` for `U`, `U'` of color `c`
    /// holding `v`, `v'`; `None` when the hypotheses are unmet.
    pub fn critical_letters(
        &self,
        c: usize,
        u: NodeId,
        u2: NodeId,
        v: VertexId,
        v2: VertexId,
    ) -> Option<(Label, usize, Label, usize)> {
        let l = match self.stage1.classify_pair(v, v2) {
            PairKind::Distinct { critical } => critical,
            _ => return None,
        };
        let tree = self.stage1.tree(c);
        let seq = self.stage1.sequence();
        let (eu, eu2) = (seq.element(tree.element(u)), seq.element(tree.element(u2)));
        let graph = self.stage1.graph();
        if u == u2
            || !eu.members.contains(graph.center(v))
            || !eu2.members.contains(graph.center(v2))
            || eu.level < l + 1
            || eu2.level < l + 1
        {
            return None;
        }
        let (a, m) = self.letter_at_level(c, u, l)?;
        let (a2, m2) = self.letter_at_level(c, u2, l)?;
        Some((a, m, a2, m2))
    }

    /// Pages occurring in any diary, in sorted order.
    pub fn used_pages(&self) -> BTreeMap<&LabelPage, usize> {
        let mut pages: BTreeMap<&LabelPage, usize> = BTreeMap::new();
        for diaries in &self.diaries {
            for d in diaries {
                for p in &d.pages {
                    pages.insert(p, 0);
                }
            }
        }
        for (i, v) in pages.values_mut().enumerate() {
            *v = i + 1;
        }
        pages
    }

    /// Page words of every vertex, per color, with pages numbered `1..=n`.
    pub fn page_words(&self) -> (usize, Vec<Vec<Vec<usize>>>) {
        let index = self.used_pages();
        let words = (0..self.stage1.colors())
            .map(|c| {
                (0..self.stage1.graph().len())
                    .map(|v| self.eta(c, v).pages.iter().map(|p| index[p]).collect())
                    .collect()
            })
            .collect();
        (index.len(), words)
    }

    /// All stage-two checks.
    pub fn report(&self, dist: &DistanceMatrix) -> Result<Stage2Report> {
        let graph = self.stage1.graph();
        let colors = self.stage1.colors();
        let mut suite = SuiteReport::new("stage2");
        suite.push(self.coloring.check(graph));
        suite.push(self.check_sentences());
        suite.push(self.check_root());
        suite.push(self.check_radial());
        suite.push(self.check_composition());

        let (n_pages, words) = self.page_words();
        let lambda = binary_width(n_pages);
        let bits: Vec<Vec<Vec<u8>>> = words
            .iter()
            .map(|ws| ws.iter().map(|w| binary_embed(w, n_pages)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let containing = self.containing_elements();
        let n = graph.len();
        let parts: Vec<Stage2Acc> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut acc = Stage2Acc::default();
                for w in v..n {
                    self.check_pair(dist, &words, &bits, lambda, &containing, v, w, &mut acc);
                }
                acc
            })
            .collect();
        let mut total = Stage2Acc::default();
        for part in parts {
            total.merge(part);
        }
        for (id, tally) in STAGE2_PAIR_CHECKS.iter().zip(total.tallies) {
            suite.push(tally.finish(*id));
        }
        suite.push(binary_words_check(n_pages, &words));
        let violations = suite.checks.iter().filter(|c| c.violations > 0).flat_map(|c| c.examples.clone()).collect();
        let qi = QiReport {
            pairs: total.pairs,
            colors,
            kappa: self.kappa,
            sigma_lower: sigma_lower(colors),
            upper_worst: total.upper_worst,
            lower_worst: total.lower_worst,
            lambda_fit: total.lambda_fit,
            sigma_fit: total.sigma_fit.max(0),
            violations,
        };
        let binary = BinaryReport {
            pages_used: n_pages,
            lambda,
            upper_worst: total.bin_upper_worst,
            lower_worst: total.bin_lower_worst,
        };
        Ok(Stage2Report { suite, qi, binary })
    }

    /// Sentence shape and decoration per tree vertex.
    fn check_sentences(&self) -> LemmaCheck {
        let mut tally = Tally::default();
        for c in 0..self.stage1.colors() {
            let tree = self.stage1.tree(c).tree();
            let root_level = tree.level(tree.root());
            for node in 0..tree.len() {
                let s = self.sentence_of(c, node);
                let letters = s.tokens().iter().filter(|t| !t.is_stop()).count() as i64;
                let words = s.words();
                let ok = words.len() as u32 == tree.depth(node)
                    && words.iter().all(|w| !w.is_empty())
                    && letters == (tree.level(node) - root_level) as i64
                    && words.len() as i64 <= letters
                    && (root_level != 0 || is_well_decorated(s))
                    && strip(s).word_count() == words.len();
                tally.record(ok, || format!("color {c}: malformed sentence at node {node}: {}", sentence_text(s)));
            }
        }
        tally.finish("labelling.sentence_shape")
    }

    fn check_root(&self) -> LemmaCheck {
        let root = self.stage1.graph().root();
        let ok = (0..self.stage1.colors()).all(|c| self.eta(c, root).pages.is_empty());
        LemmaCheck::single("labelling.root_to_root", ok, || "the root has a nonempty diary".into())
    }

    fn check_radial(&self) -> LemmaCheck {
        let mut tally = Tally::default();
        for c in 0..self.stage1.colors() {
            let tree = self.stage1.tree(c).tree();
            for v in 0..self.stage1.graph().len() {
                let node = self.stage1.map_fc(c, v);
                tally.record(self.eta(c, v).pages.len() as u32 == tree.depth(node), || {
                    format!("color {c}: diary of {} has the wrong length", self.stage1.graph().vertex(v))
                });
            }
        }
        tally.finish("labelling.radial_isometry")
    }

    /// The reconstruction of each diary admits the sentence it came from.
    fn check_composition(&self) -> LemmaCheck {
        let mut tally = Tally::default();
        for c in 0..self.stage1.colors() {
            for (node, d) in self.diaries[c].iter().enumerate() {
                let ok = reconstruct(d).map(|s| s.contains(self.sentence_of(c, node))).unwrap_or(false);
                tally.record(ok, || format!("color {c}: node {node} not recovered from its diary"));
            }
        }
        tally.finish("labelling.composition")
    }

    /// `containing[c][z]`: elements of color `c` holding point `z`.
    fn containing_elements(&self) -> Vec<Vec<Vec<ElementId>>> {
        let seq = self.stage1.sequence();
        let n = self.stage1.graph().space().len();
        (0..self.stage1.colors())
            .map(|c| {
                let mut out = vec![Vec::new(); n];
                for j in 0..=seq.max_level() {
                    for &u in seq.family(j, c) {
                        for z in seq.element(u).members.ones() {
                            out[z].push(u);
                        }
                    }
                }
                out
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn check_pair(
        &self,
        dist: &DistanceMatrix,
        words: &[Vec<Vec<usize>>],
        bits: &[Vec<Vec<u8>>],
        lambda: usize,
        containing: &[Vec<Vec<ElementId>>],
        v: VertexId,
        w: VertexId,
        acc: &mut Stage2Acc,
    ) {
        let graph = self.stage1.graph();
        let colors = self.stage1.colors() as i64;
        let d = dist.get(v, w) as i64;
        let lambda = lambda as i64;
        let label = || format!("{} {}", graph.vertex(v), graph.vertex(w));
        let [lip, upper, lower, crit, sandwich, bin_upper, bin_lower] = &mut acc.tallies;
        acc.pairs += 1;

        let mut sum = 0i64;
        let mut bin_sum = 0i64;
        for c in 0..self.stage1.colors() {
            let l = word_distance(&words[c][v], &words[c][w]) as i64;
            let lb = word_distance(&bits[c][v], &bits[c][w]) as i64;
            lip.record(l <= 2 * d, || format!("color {c}: {} has L = {l} > 2 * {d}", label()));
            sandwich.record(lambda * (l - 2) + 2 <= lb && lb <= lambda * l, || {
                format!("color {c}: {} has L = {l}, L_bin = {lb}, lambda = {lambda}", label())
            });
            sum += l;
            bin_sum += lb;
        }
        let sigma = sigma_lower(self.stage1.colors());
        upper.record(sum <= 2 * colors * d, || format!("{}: sum {sum} > 2|C| * {d}", label()));
        lower.record(d <= 2 * colors * sum + sigma, || format!("{}: {d} > 2|C| * {sum} + {sigma}", label()));
        // Binary words: L <= L_bin / lambda + 2 per color.
        bin_upper.record(bin_sum <= lambda * 2 * colors * d, || {
            format!("{}: binary sum {bin_sum} > lambda * 2|C| * {d}", label())
        });
        let bin_rhs = 2 * colors * (bin_sum + 2 * colors * lambda) + sigma * lambda;
        bin_lower.record(lambda * d <= bin_rhs, || format!("{}: binary lower bound fails", label()));

        if d > 0 {
            acc.upper_worst = acc.upper_worst.max(sum - 2 * colors * d);
            acc.lambda_fit = acc.lambda_fit.max(sum as f64 / d as f64);
        }
        acc.lower_worst = acc.lower_worst.max(d - 2 * colors * sum - sigma);
        acc.sigma_fit = acc.sigma_fit.max(d - 2 * colors * sum);
        acc.bin_upper_worst = acc.bin_upper_worst.max(bin_sum - lambda * 2 * colors * d);
        acc.bin_lower_worst = acc.bin_lower_worst.max(lambda * d - bin_rhs);

        if v == w {
            return;
        }
        let (zv, zw) = (graph.center(v), graph.center(w));
        let PairKind::Distinct { critical } = self.stage1.classify_pair(v, w) else {
            return;
        };
        for c in 0..self.stage1.colors() {
            let tree = self.stage1.tree(c);
            for &u in &containing[c][zv] {
                for &u2 in &containing[c][zw] {
                    let (nu, nu2) = (tree.node(u).expect("tree vertex"), tree.node(u2).expect("tree vertex"));
                    let seq = self.stage1.sequence();
                    if seq.element(u).level < critical + 1 || seq.element(u2).level < critical + 1 {
                        continue;
                    }
                    match self.critical_letters(c, nu, nu2, v, w) {
                        Some((a, m, a2, m2)) => crit.record(a != a2 && m.abs_diff(m2) <= 2, || {
                            format!("color {c}: {} at level {critical}: {a} (word {m}) vs {a2} (word {m2})", label())
                        }),
                        None => crit.skip(),
                    }
                }
            }
        }
    }

    /// Embedding dump: per vertex, per color, the pages and their binary code.
    pub fn embedding(&self) -> Result<EmbeddingDump> {
        let (n_pages, words) = self.page_words();
        let graph = self.stage1.graph();
        let vertices = (0..graph.len())
            .map(|v| {
                let colors = (0..self.stage1.colors())
                    .map(|c| {
                        let bits = binary_embed(&words[c][v], n_pages)?;
                        Ok(ColorImage {
                            color: c,
                            node: self.stage1.map_fc(c, v),
                            pages: self.eta(c, v).pages.iter().map(page_text).collect(),
                            binary: bits.iter().map(|b| char::from(b'0' + b)).collect(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(VertexImage { vertex: graph.vertex(v).to_string(), colors })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EmbeddingDump {
            kappa: self.kappa,
            palette: self.coloring.palette(),
            pages_used: n_pages,
            lambda: binary_width(n_pages),
            vertices,
        })
    }
}

/// Space-separated symbols of a labelled sentence.
pub fn sentence_text(s: &LabelSentence) -> String {
    s.tokens().iter().map(label_text).collect::<Vec<_>>().join(" ")
}

/// The binary sandwich over every pair of distinct occurring page words,
/// all colors pooled.
pub fn binary_words_check(n_pages: usize, words: &[Vec<Vec<usize>>]) -> LemmaCheck {
    let mut distinct: Vec<&Vec<usize>> = words.iter().flatten().collect();
    distinct.sort();
    distinct.dedup();
    let parts: Vec<Tally> = (0..distinct.len())
        .into_par_iter()
        .map(|i| {
            let mut tally = Tally::default();
            for j in i..distinct.len() {
                let ok = binary_sandwich(distinct[i], distinct[j], n_pages).unwrap_or(false);
                tally.record(ok, || format!("{:?} vs {:?}", distinct[i], distinct[j]));
            }
            tally
        })
        .collect();
    parts.into_iter().fold(Tally::default(), Tally::merge).finish("labelling.binary_words")
}

const STAGE2_PAIR_CHECKS: [&str; 7] = [
    "labelling.lipschitz",
    "labelling.qi_upper",
    "labelling.qi_lower",
    "labelling.critical_letters",
    "labelling.binary_sandwich",
    "labelling.binary_upper",
    "labelling.binary_lower",
];

struct Stage2Acc {
    tallies: [Tally; 7],
    pairs: u64,
    upper_worst: i64,
    lower_worst: i64,
    lambda_fit: f64,
    sigma_fit: i64,
    bin_upper_worst: i64,
    bin_lower_worst: i64,
}

impl Default for Stage2Acc {
    fn default() -> Self {
        Self {
            tallies: Default::default(),
            pairs: 0,
            upper_worst: i64::MIN,
            lower_worst: i64::MIN,
            lambda_fit: 0.0,
            sigma_fit: i64::MIN,
            bin_upper_worst: i64::MIN,
            bin_lower_worst: i64::MIN,
        }
    }
}

impl Stage2Acc {
    fn merge(&mut self, other: Stage2Acc) {
        for (mine, theirs) in self.tallies.iter_mut().zip(other.tallies) {
            *mine = std::mem::take(mine).merge(theirs);
        }
        self.pairs += other.pairs;
        self.upper_worst = self.upper_worst.max(other.upper_worst);
        self.lower_worst = self.lower_worst.max(other.lower_worst);
        self.lambda_fit = self.lambda_fit.max(other.lambda_fit);
        self.sigma_fit = self.sigma_fit.max(other.sigma_fit);
        self.bin_upper_worst = self.bin_upper_worst.max(other.bin_upper_worst);
        self.bin_lower_worst = self.bin_lower_worst.max(other.bin_lower_worst);
    }
}

/// Quasi-isometry summary. `upperWorst` and `lowerWorst` are the largest
/// excesses over the two bounds (nonpositive when they hold); `lambdaFit` is
/// the largest ratio `|eta(v) eta(v')|_1 / |vv'|` and `sigmaFit` the smallest
/// additive constant for the lower bound at slope `2|C|`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QiReport {
    pub pairs: u64,
    pub colors: usize,
    pub kappa: usize,
    pub sigma_lower: i64,
    pub upper_worst: i64,
    pub lower_worst: i64,
    pub lambda_fit: f64,
    pub sigma_fit: i64,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BinaryReport {
    pub pages_used: usize,
    pub lambda: usize,
    pub upper_worst: i64,
    pub lower_worst: i64,
}

#[derive(Clone, Debug)]
pub struct Stage2Report {
    pub suite: SuiteReport,
    pub qi: QiReport,
    pub binary: BinaryReport,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbeddingDump {
    pub kappa: usize,
    pub palette: usize,
    pub pages_used: usize,
    pub lambda: usize,
    pub vertices: Vec<VertexImage>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexImage {
    pub vertex: String,
    pub colors: Vec<ColorImage>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColorImage {
    pub color: usize,
    pub node: NodeId,
    pub pages: Vec<String>,
    pub binary: String,
}
