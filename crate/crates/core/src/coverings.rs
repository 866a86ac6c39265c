//! Colored covering sequences: geometric generators and the validator for
//! the mesh, ball-containment and separation properties.
//!
//! Elements are judged by their member sets in the sample; the geometric
//! certificate only describes which sample points belong to an element.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyper_approx::ApproxGraph;
use crate::metric_space::{Coordinates, FiniteMetricSpace};
use crate::rational::{self, ratio, Rational};
use crate::report::{LemmaCheck, SuiteReport, Tally};

pub type ElementId = usize;

/// Geometric description of a covering element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Whole,
    /// Union of half-open intervals `[lo, hi)` on the line.
    Intervals(Vec<(Rational, Rational)>),
    /// Union of half-open arcs `[lo, hi)` of the circle parameter, taken mod 1.
    Arcs(Vec<(Rational, Rational)>),
    /// Union of half-open boxes `[x0, x1) x [y0, y1)`.
    Boxes(Vec<[Rational; 4]>),
    /// An explicit set of point ids.
    Points(Vec<usize>),
}

fn in_half_open(x: &Rational, lo: &Rational, hi: &Rational) -> bool {
    lo <= x && x < hi
}

fn in_arc(t: &Rational, lo: &Rational, hi: &Rational) -> bool {
    let offset = t - lo;
    let offset = &offset - offset.floor();
    offset < hi - lo
}

impl Certificate {
    /// Sample points inside the certificate.
    pub fn members(&self, space: &FiniteMetricSpace) -> Result<FixedBitSet> {
        let n = space.len();
        let mut set = FixedBitSet::with_capacity(n);
        let mismatch = || Error::Covering(format!("certificate does not fit the coordinates of {}", space.name()));
        match (self, space.coordinates()) {
            (Certificate::Whole, _) => set.insert_range(..),
            (Certificate::Points(ids), _) => {
                for &p in ids {
                    if p >= n {
                        return Err(Error::Covering(format!("point {p} is out of range")));
                    }
                    set.insert(p);
                }
            }
            (Certificate::Intervals(parts), Some(Coordinates::Line(xs))) => {
                for (i, x) in xs.iter().enumerate() {
                    if parts.iter().any(|(lo, hi)| in_half_open(x, lo, hi)) {
                        set.insert(i);
                    }
                }
            }
            (Certificate::Arcs(parts), Some(Coordinates::Circle(ts))) => {
                for (i, t) in ts.iter().enumerate() {
                    if parts.iter().any(|(lo, hi)| in_arc(t, lo, hi)) {
                        set.insert(i);
                    }
                }
            }
            (Certificate::Boxes(parts), Some(Coordinates::Plane(ps))) => {
                for (i, (x, y)) in ps.iter().enumerate() {
                    if parts
                        .iter()
                        .any(|[x0, x1, y0, y1]| in_half_open(x, x0, x1) && in_half_open(y, y0, y1))
                    {
                        set.insert(i);
                    }
                }
            }
            _ => return Err(mismatch()),
        }
        Ok(set)
    }

    /// Geometric diameter for single-piece certificates; `None` otherwise.
    pub fn diameter(&self) -> Option<Rational> {
        match self {
            Certificate::Intervals(parts) if parts.len() == 1 => Some(&parts[0].1 - &parts[0].0),
            Certificate::Arcs(parts) if parts.len() == 1 => {
                let len = &parts[0].1 - &parts[0].0;
                Some(len.min(ratio(1, 2)))
            }
            Certificate::Boxes(parts) if parts.len() == 1 => {
                let [x0, x1, y0, y1] = &parts[0];
                Some((x1 - x0).max(y1 - y0))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringElement {
    pub id: ElementId,
    pub color: usize,
    pub level: i32,
    pub certificate: Certificate,
    pub members: FixedBitSet,
}

/// Families `U_j^c` for levels `0..=J` and colors `0..|C|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringSequence {
    r: Rational,
    colors: usize,
    elements: Vec<CoveringElement>,
    families: Vec<Vec<Vec<ElementId>>>,
}

impl CoveringSequence {
    /// `levels[j][c]` lists the certificates of `U_j^c`. Empty member sets are rejected.
    pub fn from_certificates(
        space: &FiniteMetricSpace,
        r: Rational,
        colors: usize,
        levels: Vec<Vec<Vec<Certificate>>>,
    ) -> Result<Self> {
        if colors == 0 {
            return Err(Error::Covering("at least one color is required".into()));
        }
        let mut elements = Vec::new();
        let mut families = Vec::with_capacity(levels.len());
        for (j, per_color) in levels.into_iter().enumerate() {
            if per_color.len() != colors {
                return Err(Error::Covering(format!(
                    "level {j} has {} color families, expected {colors}",
                    per_color.len()
                )));
            }
            let mut level_families = Vec::with_capacity(colors);
            for (color, certs) in per_color.into_iter().enumerate() {
                let mut ids = Vec::with_capacity(certs.len());
                for certificate in certs {
                    let members = certificate.members(space)?;
                    if members.is_clear() {
                        return Err(Error::Covering(format!(
                            "empty element in level {j}, color {color}"
                        )));
                    }
                    ids.push(elements.len());
                    elements.push(CoveringElement {
                        id: elements.len(),
                        color,
                        level: j as i32,
                        certificate,
                        members,
                    });
                }
                level_families.push(ids);
            }
            families.push(level_families);
        }
        if families.is_empty() {
            return Err(Error::Covering("a covering sequence needs level 0".into()));
        }
        Ok(Self { r, colors, elements, families })
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn max_level(&self) -> i32 {
        self.families.len() as i32 - 1
    }

    pub fn element(&self, id: ElementId) -> &CoveringElement {
        &self.elements[id]
    }

    pub fn elements(&self) -> &[CoveringElement] {
        &self.elements
    }

    /// Ids of `U_j^c`; empty outside the stored levels.
    pub fn family(&self, level: i32, color: usize) -> &[ElementId] {
        usize::try_from(level)
            .ok()
            .and_then(|j| self.families.get(j))
            .map_or(&[], |f| &f[color])
    }

    /// Ids of `U_j` over all colors.
    pub fn level(&self, level: i32) -> Vec<ElementId> {
        (0..self.colors).flat_map(|c| self.family(level, c).iter().copied()).collect()
    }

    /// Serializes to the covering file format.
    pub fn to_file(&self) -> CoveringFile {
        let levels = self
            .families
            .iter()
            .enumerate()
            .map(|(j, per_color)| {
                let families = per_color
                    .iter()
                    .enumerate()
                    .map(|(c, ids)| {
                        let entries = ids.iter().map(|&id| FileElement::from(&self.elements[id])).collect();
                        (c.to_string(), entries)
                    })
                    .collect();
                FileLevel { j: j as i32, families }
            })
            .collect();
        CoveringFile { r: rational::format_rational(&self.r), colors: self.colors, levels }
    }

    /// Loads the covering file format against a space with matching coordinates.
    pub fn from_file(space: &FiniteMetricSpace, file: &CoveringFile) -> Result<Self> {
        let r = rational::parse_rational(&file.r)?;
        let mut levels: Vec<Vec<Vec<Certificate>>> = Vec::new();
        let mut sorted: Vec<&FileLevel> = file.levels.iter().collect();
        sorted.sort_by_key(|l| l.j);
        for (expected, level) in sorted.into_iter().enumerate() {
            if level.j != expected as i32 {
                return Err(Error::Covering(format!("level {} is missing", expected)));
            }
            let mut per_color = vec![Vec::new(); file.colors];
            for (color, entries) in &level.families {
                let c: usize = color
                    .parse()
                    .ok()
                    .filter(|c| *c < file.colors)
                    .ok_or_else(|| Error::Covering(format!("unknown color {color:?}")))?;
                for entry in entries {
                    per_color[c].push(entry.certificate(space)?);
                }
            }
            levels.push(per_color);
        }
        Self::from_certificates(space, r, file.colors, levels)
    }
}

/// One level of the covering file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileLevel {
    pub j: i32,
    pub families: BTreeMap<String, Vec<FileElement>>,
}

/// Covering file: rationals travel as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringFile {
    pub r: String,
    pub colors: usize,
    pub levels: Vec<FileLevel>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileElement {
    #[serde(default)]
    pub id: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub whole: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boxes: Vec<[String; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<usize>,
}

impl From<&CoveringElement> for FileElement {
    fn from(e: &CoveringElement) -> Self {
        let pair = |(lo, hi): &(Rational, Rational)| [rational::format_rational(lo), rational::format_rational(hi)];
        let mut out = FileElement { id: Some(e.id), ..Default::default() };
        match &e.certificate {
            Certificate::Whole => out.whole = true,
            Certificate::Intervals(parts) | Certificate::Arcs(parts) => {
                out.intervals = parts.iter().map(pair).collect();
            }
            Certificate::Boxes(parts) => {
                out.boxes = parts
                    .iter()
                    .map(|b| b.clone().map(|x| rational::format_rational(&x)))
                    .collect();
            }
            Certificate::Points(_) => {}
        }
        out.points = e.members.ones().collect();
        out
    }
}

impl FileElement {
    /// The geometric certificate, falling back to `points` when the space lacks coordinates.
    fn certificate(&self, space: &FiniteMetricSpace) -> Result<Certificate> {
        if self.whole {
            return Ok(Certificate::Whole);
        }
        let geometric = self.geometric(space)?;
        match geometric {
            Some(cert) if cert.members(space).is_ok() => Ok(cert),
            _ if !self.points.is_empty() => Ok(Certificate::Points(self.points.clone())),
            Some(cert) => Ok(cert),
            None => Err(Error::Covering("covering element has no certificate".into())),
        }
    }

    fn geometric(&self, space: &FiniteMetricSpace) -> Result<Option<Certificate>> {
        let parse = |s: &String| rational::parse_rational(s);
        if !self.boxes.is_empty() {
            let boxes = self
                .boxes
                .iter()
                .map(|b| Ok([parse(&b[0])?, parse(&b[1])?, parse(&b[2])?, parse(&b[3])?]))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Some(Certificate::Boxes(boxes)));
        }
        if self.intervals.is_empty() {
            return Ok(None);
        }
        let parts = self
            .intervals
            .iter()
            .map(|[lo, hi]| Ok((parse(lo)?, parse(hi)?)))
            .collect::<Result<Vec<_>>>()?;
        match space.coordinates() {
            Some(Coordinates::Circle(_)) => Ok(Some(Certificate::Arcs(parts))),
            _ => Ok(Some(Certificate::Intervals(parts))),
        }
    }
}

/// Largest distance inside a member set.
pub fn set_diameter(space: &FiniteMetricSpace, set: &FixedBitSet) -> Rational {
    let ids: Vec<usize> = set.ones().collect();
    let mut diam = Rational::zero();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            if *space.dist(a, b) > diam {
                diam = space.dist(a, b).clone();
            }
        }
    }
    diam
}

/// Maximum member-set diameter of a family.
pub fn mesh(space: &FiniteMetricSpace, family: &[&FixedBitSet]) -> Result<Rational> {
    family
        .iter()
        .map(|set| set_diameter(space, set))
        .max()
        .ok_or_else(|| Error::Covering("mesh of an empty family".into()))
}

/// Maximum certificate diameter of a family of single-piece certificates.
pub fn certificate_mesh(family: &[Certificate]) -> Result<Rational> {
    family
        .iter()
        .map(|c| c.diameter().ok_or_else(|| Error::Covering("certificate has no closed-form diameter".into())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .ok_or_else(|| Error::Covering("mesh of an empty family".into()))
}

/// `min_z min{ sup_U dist(z, Z \ U), mesh }`; an element equal to `Z`
/// contributes an infinite distance, clipped by the mesh.
pub fn lebesgue_number(space: &FiniteMetricSpace, family: &[&FixedBitSet]) -> Result<Rational> {
    let mesh = mesh(space, family)?;
    let mut best: Option<Rational> = None;
    for z in 0..space.len() {
        let mut local: Option<Rational> = None;
        let mut covered = false;
        for set in family {
            if !set.contains(z) {
                continue;
            }
            covered = true;
            let gap = (0..space.len())
                .filter(|y| !set.contains(*y))
                .map(|y| space.dist(z, y).clone())
                .min()
                .unwrap_or_else(|| mesh.clone());
            if local.as_ref().is_none_or(|l| gap > *l) {
                local = Some(gap);
            }
        }
        if !covered {
            return Err(Error::Covering(format!("point {z} is covered by no element")));
        }
        let local = local.expect("covered point").min(mesh.clone());
        if best.as_ref().is_none_or(|b| local < *b) {
            best = Some(local);
        }
    }
    Ok(best.expect("nonempty space"))
}

/// Covering generators; each must match the coordinates of its space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringKind {
    /// One color of triadic blocks on a line sample.
    Ultrametric,
    /// Arcs of length `len * r^j` with period `r^j`, one family per shift.
    ShiftedArcs { len: Rational, shifts: Vec<Rational> },
    /// Squares of side `side * r^j` with period `r^j`, one family per shift.
    ShiftedCubes { side: Rational, shifts: Vec<(Rational, Rational)> },
}

impl CoveringKind {
    pub fn colors(&self) -> usize {
        match self {
            CoveringKind::Ultrametric => 1,
            CoveringKind::ShiftedArcs { shifts, .. } => shifts.len(),
            CoveringKind::ShiftedCubes { shifts, .. } => shifts.len(),
        }
    }

    /// Arcs of length 7/9 of the period; the first `colors` shifts of `0, 4/9, 2/9, 6/9`.
    pub fn arcs(colors: usize) -> Self {
        let shifts = [ratio(0, 1), ratio(4, 9), ratio(2, 9), ratio(6, 9)];
        CoveringKind::ShiftedArcs {
            len: ratio(7, 9),
            shifts: shifts.into_iter().cycle().take(colors).collect(),
        }
    }

    /// Squares of side 7/9 of the period shifted along the diagonal by thirds.
    pub fn cubes(colors: usize) -> Self {
        let shifts = (0..colors as i64).map(|i| (ratio(i, 3), ratio(i, 3))).collect();
        CoveringKind::ShiftedCubes { side: ratio(7, 9), shifts }
    }
}

/// Number of periods of length `r^level` in the unit interval; requires `1/r` integral.
fn periods(r: &Rational, level: i32) -> Result<i64> {
    let count = rational::pow(r, level).recip();
    if !count.is_integer() {
        return Err(Error::Covering(format!(
            "shifted families need 1/r to be an integer, got r = {}",
            rational::Display(r)
        )));
    }
    count.to_integer().try_into().map_err(|_| Error::Covering("too many periods".into()))
}

/// Builds the certificates for levels `0..=top` without validating them.
pub fn build_covering_sequence(
    kind: &CoveringKind,
    space: &FiniteMetricSpace,
    r: &Rational,
    top: i32,
) -> Result<CoveringSequence> {
    let colors = kind.colors();
    if colors == 0 {
        return Err(Error::Covering("at least one color is required".into()));
    }
    let mut levels = vec![vec![vec![Certificate::Whole]; colors]];
    for j in 1..=top.max(0) {
        let mut per_color = Vec::with_capacity(colors);
        match kind {
            CoveringKind::Ultrametric => {
                let Some(Coordinates::Line(xs)) = space.coordinates() else {
                    return Err(Error::Covering("ultrametric blocks need a line sample".into()));
                };
                // Triadic blocks of width 3^-d <= r^j hold sets of diameter < r^j.
                let bound = rational::pow(r, j);
                let mut width = rational::integer(1);
                while width > bound {
                    width /= rational::integer(3);
                }
                let mut blocks: BTreeMap<num_bigint::BigInt, ()> = BTreeMap::new();
                for x in xs {
                    blocks.insert(rational::floor(&(x / &width)), ());
                }
                let certs = blocks
                    .into_keys()
                    .map(|m| {
                        let lo = Rational::from_integer(m) * &width;
                        let hi = &lo + &width;
                        Certificate::Intervals(vec![(lo, hi)])
                    })
                    .collect();
                per_color.push(certs);
            }
            CoveringKind::ShiftedArcs { len, shifts } => {
                let n = periods(r, j)?;
                let p = rational::pow(r, j);
                for shift in shifts {
                    let mut certs = Vec::new();
                    for i in 0..n {
                        let lo = (shift + rational::integer(i)) * &p;
                        let hi = &lo + len * &p;
                        certs.push(Certificate::Arcs(vec![(lo, hi)]));
                    }
                    per_color.push(certs);
                }
            }
            CoveringKind::ShiftedCubes { side, shifts } => {
                let n = periods(r, j)?;
                let p = rational::pow(r, j);
                for (sx, sy) in shifts {
                    let mut certs = Vec::new();
                    for i in -1..n {
                        for k in -1..n {
                            let x0 = (sx + rational::integer(i)) * &p;
                            let y0 = (sy + rational::integer(k)) * &p;
                            let x1 = &x0 + side * &p;
                            let y1 = &y0 + side * &p;
                            certs.push(Certificate::Boxes(vec![[x0, x1, y0, y1]]));
                        }
                    }
                    per_color.push(certs);
                }
            }
        }
        // Drop certificates that miss the sample entirely.
        let per_color = per_color
            .into_iter()
            .map(|certs| {
                certs
                    .into_iter()
                    .map(|c| c.members(space).map(|m| (c, m)))
                    .collect::<Result<Vec<_>>>()
                    .map(|v| v.into_iter().filter(|(_, m)| !m.is_clear()).map(|(c, _)| c).collect())
            })
            .collect::<Result<Vec<Vec<Certificate>>>>()?;
        levels.push(per_color);
    }
    CoveringSequence::from_certificates(space, r.clone(), colors, levels)
}

/// Generates a covering sequence aligned with `graph` and validates it; the
/// first violation becomes the error.
pub fn generate_covering_sequence(kind: &CoveringKind, graph: &ApproxGraph) -> Result<CoveringSequence> {
    let seq = build_covering_sequence(kind, graph.space(), graph.scale().r(), graph.scale().max_level())?;
    let report = validate_covering_sequence(&seq, graph)?;
    if let Some(check) = report.checks.iter().find(|c| !c.status.is_ok()) {
        return Err(Error::Covering(format!(
            "{} failed: {}",
            check.id,
            check.examples.first().cloned().unwrap_or_default()
        )));
    }
    Ok(seq)
}

fn describe(seq: &CoveringSequence, id: ElementId) -> String {
    let e = seq.element(id);
    format!("U#{} (level {}, color {})", e.id, e.level, e.color)
}

/// Checks properties (1)-(3) on member sets. Levels of the sequence must be
/// `0..=max(J, 0)` for the graph's truncation level `J`.
pub fn validate_covering_sequence(seq: &CoveringSequence, graph: &ApproxGraph) -> Result<SuiteReport> {
    let top = graph.scale().max_level().max(0);
    if seq.max_level() != top {
        return Err(Error::Covering(format!(
            "sequence has levels 0..={} but the graph needs 0..={top}",
            seq.max_level()
        )));
    }
    if seq.r() != graph.scale().r() {
        return Err(Error::Covering("sequence and graph use different parameters r".into()));
    }
    let space = graph.space();
    let n = space.len();
    let mut report = SuiteReport::new("covering");

    let mut whole = Tally::default();
    for c in 0..seq.colors() {
        let family = seq.family(0, c);
        let ok = family.len() == 1 && seq.element(family[0]).members.count_ones(..) == n;
        whole.record(ok, || format!("color {c} level 0 is not {{Z}}"));
    }
    report.push(whole.finish("covering.level0_whole"));

    let mut mesh = Tally::default();
    let mut disjoint = Tally::default();
    let mut covers = Tally::default();
    for j in 1..=top {
        let bound = rational::pow(seq.r(), j);
        for c in 0..seq.colors() {
            let family = seq.family(j, c);
            for (i, &a) in family.iter().enumerate() {
                let diam = set_diameter(space, &seq.element(a).members);
                mesh.record(diam < bound, || {
                    format!("{} has diameter {} >= r^{j}", describe(seq, a), rational::Display(&diam))
                });
                for &b in &family[i + 1..] {
                    let ok = seq.element(a).members.is_disjoint(&seq.element(b).members);
                    disjoint.record(ok, || format!("{} meets {}", describe(seq, a), describe(seq, b)));
                }
            }
        }
    }
    for j in 0..=top {
        let mut union = FixedBitSet::with_capacity(n);
        for id in seq.level(j) {
            union.union_with(&seq.element(id).members);
        }
        covers.record(union.count_ones(..) == n, || format!("level {j} misses some points"));
    }
    report.push(mesh.finish("covering.mesh"));
    report.push(disjoint.finish("covering.disjoint"));
    report.push(covers.finish("covering.covers"));

    // Balls of the level-(j+1) net, the lookahead net at the top.
    let balls: Vec<Vec<(usize, FixedBitSet)>> = (0..=top)
        .map(|j| graph.net(j + 1).into_iter().map(|v| (v, graph.ball(j + 1, v))).collect())
        .collect();

    let mut containment = Tally::default();
    let mut unique = Tally::default();
    for j in 0..=top {
        for (v, ball) in &balls[j as usize] {
            let mut any = false;
            for c in 0..seq.colors() {
                let witnesses = seq
                    .family(j, c)
                    .iter()
                    .filter(|&&id| ball.is_subset(&seq.element(id).members))
                    .count();
                any |= witnesses > 0;
                unique.record(witnesses <= 1, || format!("ball {}:{v} has {witnesses} witnesses of color {c}", j + 1));
            }
            containment.record(any, || format!("ball {}:{v} lies in no element of level {j}", j + 1));
        }
    }
    report.push(containment.finish("covering.ball_containment"));
    report.push(unique.finish("covering.witness_unique"));

    let mut separation = Tally::default();
    for j in 0..=top {
        for c in 0..seq.colors() {
            for &u in seq.family(j, c) {
                let members = &seq.element(u).members;
                let mut hull = FixedBitSet::with_capacity(n);
                for (_, ball) in &balls[j as usize] {
                    if !ball.is_disjoint(members) {
                        hull.union_with(ball);
                    }
                }
                for jp in 0..=j {
                    for &w in seq.family(jp, c) {
                        if w == u {
                            continue;
                        }
                        let other = &seq.element(w).members;
                        let ok = hull.is_subset(other) || hull.is_disjoint(other);
                        separation.record(ok, || {
                            format!("B({}) straddles {}", describe(seq, u), describe(seq, w))
                        });
                    }
                }
            }
        }
    }
    report.push(separation.finish("covering.separation"));
    Ok(report)
}

/// A single-check report stating whether `seq` failed validation, for negative controls.
pub fn expect_invalid(id: &str, seq: Result<CoveringSequence>, graph: &ApproxGraph) -> LemmaCheck {
    let failed = match seq {
        Err(_) => true,
        Ok(seq) => validate_covering_sequence(&seq, graph).map_or(true, |r| !r.passed()),
    };
    LemmaCheck::single(id, !failed, || "sequence validated".into()).expect_failure()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hyper_approx::ContainmentMode;
    use crate::metric_space::{generate_space, ScaleParams, SpaceKind};

    fn graph(kind: SpaceKind, r: Rational, max_level: i32) -> ApproxGraph {
        let space = Arc::new(generate_space(kind).unwrap());
        let scale = ScaleParams::for_space(&space, r, Some(max_level)).unwrap();
        ApproxGraph::build(space, scale, ContainmentMode::Certificate).unwrap()
    }

    #[test]
    fn trivial_sequence_passes() {
        let g = graph(SpaceKind::Cantor { depth: 2 }, ratio(1, 9), 0);
        let seq = build_covering_sequence(&CoveringKind::Ultrametric, g.space(), g.scale().r(), 0).unwrap();
        assert_eq!(seq.max_level(), 0);
        assert!(validate_covering_sequence(&seq, &g).unwrap().passed());
    }

    #[test]
    fn ultrametric_cantor_validates() {
        let g = graph(SpaceKind::Cantor { depth: 3 }, ratio(1, 9), 3);
        let seq = generate_covering_sequence(&CoveringKind::Ultrametric, &g).unwrap();
        assert_eq!(seq.family(1, 0).len(), 4);
    }

    #[test]
    fn circle_needs_two_colors() {
        let g = graph(SpaceKind::Circle { n: 81 }, ratio(1, 9), 2);
        assert!(generate_covering_sequence(&CoveringKind::arcs(2), &g).is_ok());
        let one = build_covering_sequence(&CoveringKind::arcs(1), g.space(), g.scale().r(), 2).unwrap();
        let report = validate_covering_sequence(&one, &g).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn identical_shifts_fail() {
        let g = graph(SpaceKind::Circle { n: 81 }, ratio(1, 9), 2);
        let kind = CoveringKind::ShiftedArcs { len: ratio(7, 9), shifts: vec![ratio(0, 1), ratio(0, 1)] };
        assert!(generate_covering_sequence(&kind, &g).is_err());
    }

    #[test]
    fn overlapping_same_color_arcs_break_disjointness() {
        let g = graph(SpaceKind::Circle { n: 81 }, ratio(1, 9), 2);
        let seq = build_covering_sequence(&CoveringKind::arcs(2), g.space(), g.scale().r(), 2).unwrap();
        let mut file = seq.to_file();
        let extra = FileElement {
            intervals: vec![["3/81".into(), "9/81".into()]],
            ..Default::default()
        };
        file.levels[1].families.get_mut("0").unwrap().push(extra);
        let broken = CoveringSequence::from_file(g.space(), &file).unwrap();
        let report = validate_covering_sequence(&broken, &g).unwrap();
        assert!(!report.get("covering.disjoint").unwrap().status.is_ok());
    }

    #[test]
    fn misaligned_levels_are_an_error() {
        let g = graph(SpaceKind::Cantor { depth: 3 }, ratio(1, 9), 3);
        let seq = build_covering_sequence(&CoveringKind::Ultrametric, g.space(), g.scale().r(), 2).unwrap();
        assert!(validate_covering_sequence(&seq, &g).is_err());
    }

    #[test]
    fn file_round_trip() {
        let g = graph(SpaceKind::Circle { n: 27 }, ratio(1, 9), 1);
        let seq = build_covering_sequence(&CoveringKind::arcs(2), g.space(), g.scale().r(), 1).unwrap();
        let text = serde_json::to_string(&seq.to_file()).unwrap();
        let file: CoveringFile = serde_json::from_str(&text).unwrap();
        assert_eq!(CoveringSequence::from_file(g.space(), &file).unwrap(), seq);
    }

    #[test]
    fn mesh_examples() {
        let space = generate_space(SpaceKind::Circle { n: 8 }).unwrap();
        let all = FixedBitSet::with_capacity_and_blocks(8, [0xff]);
        assert_eq!(mesh(&space, &[&all]).unwrap(), *space.diam());
        assert!(mesh(&space, &[]).is_err());
        let arcs = [
            Certificate::Arcs(vec![(ratio(0, 1), ratio(1, 9))]),
            Certificate::Arcs(vec![(ratio(1, 2), ratio(1, 2) + ratio(1, 10))]),
        ];
        assert_eq!(certificate_mesh(&arcs).unwrap(), ratio(1, 9));
    }

    #[test]
    fn lebesgue_examples() {
        let space = generate_space(SpaceKind::Circle { n: 12 }).unwrap();
        let all = Certificate::Whole.members(&space).unwrap();
        assert_eq!(lebesgue_number(&space, &[&all]).unwrap(), ratio(1, 2));
        // Two half circles overlapping by 1/6 on each side.
        let a = Certificate::Arcs(vec![(ratio(0, 1), ratio(2, 3))]).members(&space).unwrap();
        let b = Certificate::Arcs(vec![(ratio(1, 2), ratio(7, 6))]).members(&space).unwrap();
        let value = lebesgue_number(&space, &[&a, &b]).unwrap();
        assert!(value >= ratio(1, 12), "{value}");
        let half = Certificate::Arcs(vec![(ratio(0, 1), ratio(1, 2))]).members(&space).unwrap();
        assert!(lebesgue_number(&space, &[&half]).is_err());
    }

    #[test]
    fn ultrametric_needs_line_coordinates() {
        let space = generate_space(SpaceKind::Circle { n: 9 }).unwrap();
        assert!(build_covering_sequence(&CoveringKind::Ultrametric, &space, &ratio(1, 9), 1).is_err());
    }
}
