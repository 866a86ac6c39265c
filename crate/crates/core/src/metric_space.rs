//! Finite metric spaces with exact rational distances, the three built-in
//! sample generators, and the maximal separated nets the approximation graph
//! is built from.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, MetricViolation, Result};
use crate::rational::{self, ratio, Rational};

/// Ambient coordinates of a generated sample, used by covering certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coordinates {
    /// Points on the real line.
    Line(Vec<Rational>),
    /// Arc parameter in `[0, 1)` on a circle of circumference one.
    Circle(Vec<Rational>),
    /// Points of the unit square.
    Plane(Vec<(Rational, Rational)>),
}

/// Built-in sample spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Left endpoints of the `2^depth` triadic Cantor intervals, line metric.
    Cantor { depth: u32 },
    /// `n` equispaced points, arc-length metric of diameter at most 1/2.
    Circle { n: u32 },
    /// `n x n` points of the unit square with the sup metric.
    Grid { n: u32 },
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Cantor { depth } => write!(f, "cantor({depth})"),
            SpaceKind::Circle { n } => write!(f, "circle({n})"),
            SpaceKind::Grid { n } => write!(f, "grid({n})"),
        }
    }
}

/// A finite metric space. Frozen after construction.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    name: String,
    len: usize,
    dist: Vec<Rational>,
    diam: Rational,
    min_distance: Rational,
    coordinates: Option<Coordinates>,
}

impl FiniteMetricSpace {
    /// Builds a space from a full distance matrix, validating every metric axiom.
    pub fn from_matrix(name: impl Into<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        validate_metric(&rows)?;
        Self::from_valid_rows(name.into(), rows, None)
    }

    fn from_valid_rows(
        name: String,
        rows: Vec<Vec<Rational>>,
        coordinates: Option<Coordinates>,
    ) -> Result<Self> {
        let len = rows.len();
        if len < 2 {
            return Err(Error::TrivialSpace(format!(
                "{name} has {len} point(s); at least two are required"
            )));
        }
        let dist: Vec<Rational> = rows.into_iter().flatten().collect();
        let mut diam = Rational::zero();
        let mut min_distance: Option<Rational> = None;
        for i in 0..len {
            for j in (i + 1)..len {
                let d = &dist[i * len + j];
                if *d > diam {
                    diam = d.clone();
                }
                if min_distance.as_ref().is_none_or(|m| d < m) {
                    min_distance = Some(d.clone());
                }
            }
        }
        Ok(Self {
            name,
            len,
            dist,
            diam,
            min_distance: min_distance.expect("at least two points"),
            coordinates,
        })
    }

    /// Reads the CSV format: first line `n`, then `n` rows of `n` decimals.
    pub fn from_csv_str(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty distance file".into()))?;
        let n: usize = header
            .trim_end_matches(',')
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad point count {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for (row, line) in lines.enumerate() {
            let values = line
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(rational::parse_rational)
                .collect::<Result<Vec<_>>>()?;
            if values.len() != n {
                return Err(MetricViolation::Shape { row, len: values.len(), expected: n }.into());
            }
            rows.push(values);
        }
        if rows.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        Self::from_matrix(name, rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dist(&self, a: usize, b: usize) -> &Rational {
        &self.dist[a * self.len + b]
    }

    pub fn diam(&self) -> &Rational {
        &self.diam
    }

    /// Smallest distance between distinct points.
    pub fn min_distance(&self) -> &Rational {
        &self.min_distance
    }

    pub fn coordinates(&self) -> Option<&Coordinates> {
        self.coordinates.as_ref()
    }

    /// Rows of the distance matrix, in the order points were given.
    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.dist.chunks(self.len).map(<[Rational]>::to_vec).collect()
    }

    /// Writes the space in the CSV distance-matrix format.
    pub fn to_csv_string(&self) -> String {
        let mut out = format!("{}\n", self.len);
        for row in self.dist.chunks(self.len) {
            let cells: Vec<String> = row.iter().map(rational::format_rational).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Checks the shape, zero diagonal, positivity, symmetry and triangle
/// inequality of a distance matrix, returning the first violation found.
pub fn validate_metric(rows: &[Vec<Rational>]) -> Result<(), MetricViolation> {
    let n = rows.len();
    for (row, values) in rows.iter().enumerate() {
        if values.len() != n {
            return Err(MetricViolation::Shape { row, len: values.len(), expected: n });
        }
    }
    for i in 0..n {
        if !rows[i][i].is_zero() {
            return Err(MetricViolation::Diagonal(i));
        }
        for j in 0..n {
            if rows[i][j].is_negative() {
                return Err(MetricViolation::Negative(i, j));
            }
            if rows[i][j] != rows[j][i] {
                return Err(MetricViolation::Asymmetric(i.min(j), i.max(j)));
            }
            if i != j && rows[i][j].is_zero() {
                return Err(MetricViolation::Coincident(i.min(j), i.max(j)));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if rows[a][c] > &rows[a][b] + &rows[b][c] {
                    return Err(MetricViolation::Triangle { a, b, c });
                }
            }
        }
    }
    Ok(())
}

/// Generates one of the built-in sample spaces with exact distances.
pub fn generate_space(kind: SpaceKind) -> Result<FiniteMetricSpace> {
    let name = kind.to_string();
    match kind {
        SpaceKind::Cantor { depth } => {
            if depth == 0 {
                return Err(Error::TrivialSpace(format!("{name} is a single point")));
            }
            let scale = num_traits::pow(BigInt::from(3), depth as usize);
            let points: Vec<Rational> = (0u64..(1u64 << depth))
                .map(|bits| {
                    // Triadic digits are 0 or 2; bit i (from the top) picks digit i.
                    let mut numer = BigInt::zero();
                    for i in 0..depth {
                        numer *= 3;
                        if bits >> (depth - 1 - i) & 1 == 1 {
                            numer += 2;
                        }
                    }
                    Rational::new(numer, scale.clone())
                })
                .collect();
            let rows = points
                .iter()
                .map(|x| points.iter().map(|y| (x - y).abs()).collect())
                .collect();
            FiniteMetricSpace::from_valid_rows(name, rows, Some(Coordinates::Line(points)))
        }
        SpaceKind::Circle { n } => {
            if n < 2 {
                return Err(Error::TrivialSpace(format!("{name} is a single point")));
            }
            let n_i = i64::from(n);
            let rows = (0..n_i)
                .map(|i| {
                    (0..n_i)
                        .map(|j| {
                            let gap = (i - j).abs();
                            ratio(gap.min(n_i - gap), n_i)
                        })
                        .collect()
                })
                .collect();
            let params = (0..n_i).map(|i| ratio(i, n_i)).collect();
            FiniteMetricSpace::from_valid_rows(name, rows, Some(Coordinates::Circle(params)))
        }
        SpaceKind::Grid { n } => {
            if n < 2 {
                return Err(Error::TrivialSpace(format!("{name} is a single point")));
            }
            let n_i = i64::from(n);
            let points: Vec<(i64, i64)> =
                (0..n_i).flat_map(|i| (0..n_i).map(move |j| (i, j))).collect();
            let rows = points
                .iter()
                .map(|&(xi, yi)| {
                    points
                        .iter()
                        .map(|&(xj, yj)| ratio((xi - xj).abs().max((yi - yj).abs()), n_i))
                        .collect()
                })
                .collect();
            let coords = points.iter().map(|&(x, y)| (ratio(x, n_i), ratio(y, n_i))).collect();
            FiniteMetricSpace::from_valid_rows(name, rows, Some(Coordinates::Plane(coords)))
        }
    }
}

/// Largest integer `k` with `diam < r^k`.
pub fn compute_k0(diam: &Rational, r: &Rational) -> Result<i32> {
    if !diam.is_positive() {
        return Err(Error::TrivialSpace("diameter must be positive".into()));
    }
    check_parameter(r)?;
    // r^k decreases in k; walk to the boundary from k = 0.
    let mut k = 0i32;
    if *diam < rational::pow(r, 0) {
        while *diam < rational::pow(r, k + 1) {
            k += 1;
        }
    } else {
        while *diam >= rational::pow(r, k) {
            k -= 1;
        }
    }
    Ok(k)
}

fn check_parameter(r: &Rational) -> Result<()> {
    if !r.is_positive() || *r > ratio(1, 6) {
        return Err(Error::Scale(format!(
            "parameter r = {} must lie in (0, 1/6]",
            rational::Display(r)
        )));
    }
    Ok(())
}

/// Levels beyond full separation only add radial chains; cap the default.
pub const DEFAULT_EXTRA_LEVELS: i32 = 8;

/// Scale parameters of a hyperbolic approximation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleParams {
    r: Rational,
    k0: i32,
    max_level: i32,
}

impl ScaleParams {
    pub fn new(r: Rational, k0: i32, max_level: i32) -> Result<Self> {
        check_parameter(&r)?;
        if max_level < k0 {
            return Err(Error::Scale(format!(
                "maximum level {max_level} lies below the root level {k0}"
            )));
        }
        Ok(Self { r, k0, max_level })
    }

    /// Scale for `space`; without an explicit `max_level` the truncation is
    /// the first level whose net is all of the space.
    pub fn for_space(space: &FiniteMetricSpace, r: Rational, max_level: Option<i32>) -> Result<Self> {
        let k0 = compute_k0(space.diam(), &r)?;
        let max_level = match max_level {
            Some(level) => level,
            None => full_separation_level(space, &r, k0).min(k0 + DEFAULT_EXTRA_LEVELS),
        };
        Self::new(r, k0, max_level)
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    /// The visual parameter `a = 1/r`.
    pub fn a(&self) -> Rational {
        self.r.recip()
    }

    pub fn k0(&self) -> i32 {
        self.k0
    }

    pub fn max_level(&self) -> i32 {
        self.max_level
    }

    /// `r^k`.
    pub fn scale(&self, level: i32) -> Rational {
        rational::pow(&self.r, level)
    }

    /// Ball radius `2 r^k` attached to level-`k` vertices.
    pub fn ball_radius(&self, level: i32) -> Rational {
        self.scale(level) * rational::integer(2)
    }
}

/// First level `k >= k0` with `r^k <= min distance`, where the greedy net is everything.
pub fn full_separation_level(space: &FiniteMetricSpace, r: &Rational, k0: i32) -> i32 {
    let mut k = k0;
    while rational::pow(r, k) > *space.min_distance() {
        k += 1;
    }
    k
}

/// A maximal separated net at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub level: i32,
    pub centers: Vec<usize>,
    pub separation: Rational,
}

impl Net {
    /// The level-`k` net with separation `r^k`, swept in ascending point order.
    pub fn at_level(space: &FiniteMetricSpace, scale: &ScaleParams, level: i32) -> Self {
        let separation = scale.scale(level);
        let order: Vec<usize> = (0..space.len()).collect();
        let centers = maximal_separated_net(space, &separation, &order);
        Self { level, centers, separation }
    }
}

/// Greedy sweep: accept a point when it is at distance `>= separation` from
/// every previously accepted center. The result is separated and maximal
/// among the swept points.
pub fn maximal_separated_net(
    space: &FiniteMetricSpace,
    separation: &Rational,
    order: &[usize],
) -> Vec<usize> {
    let mut centers: Vec<usize> = Vec::new();
    for &p in order {
        if centers.iter().all(|&c| space.dist(p, c) >= separation) {
            centers.push(p);
        }
    }
    centers
}

/// Empirical doubling constant: over every center and every radius in the
/// distance set, the size of a greedy half-radius cover of the open ball.
pub fn doubling_estimate(space: &FiniteMetricSpace) -> usize {
    let n = space.len();
    let mut radii: Vec<&Rational> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| space.dist(i, j))
        .collect();
    radii.sort();
    radii.dedup();
    let two = rational::integer(2);
    let mut best = 1;
    for center in 0..n {
        for &radius in &radii {
            let ball: Vec<usize> = (0..n).filter(|&z| space.dist(center, z) < radius).collect();
            let half = radius / &two;
            let mut uncovered = ball.clone();
            let mut count = 0;
            while let Some(&c) = uncovered.first() {
                count += 1;
                uncovered.retain(|&z| *space.dist(c, z) > half);
            }
            best = best.max(count);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::integer;

    fn line(points: &[Rational]) -> FiniteMetricSpace {
        let rows = points
            .iter()
            .map(|x| points.iter().map(|y| (x - y).abs()).collect())
            .collect();
        FiniteMetricSpace::from_matrix("line", rows).unwrap()
    }

    #[test]
    fn cantor_depth_one_is_two_points() {
        let space = generate_space(SpaceKind::Cantor { depth: 1 }).unwrap();
        assert_eq!(space.len(), 2);
        assert_eq!(*space.dist(0, 1), ratio(2, 3));
    }

    #[test]
    fn circle_of_two_is_antipodal() {
        let space = generate_space(SpaceKind::Circle { n: 2 }).unwrap();
        assert_eq!(*space.dist(0, 1), ratio(1, 2));
        assert_eq!(*space.diam(), ratio(1, 2));
    }

    #[test]
    fn single_point_spaces_are_rejected() {
        assert!(matches!(
            generate_space(SpaceKind::Grid { n: 1 }),
            Err(Error::TrivialSpace(_))
        ));
        assert!(generate_space(SpaceKind::Cantor { depth: 0 }).is_err());
        assert!(FiniteMetricSpace::from_matrix("one", vec![vec![integer(0)]]).is_err());
    }

    #[test]
    fn generators_produce_valid_metrics() {
        for kind in [
            SpaceKind::Cantor { depth: 3 },
            SpaceKind::Circle { n: 9 },
            SpaceKind::Grid { n: 3 },
        ] {
            let space = generate_space(kind).unwrap();
            assert_eq!(validate_metric(&space.rows()), Ok(()), "{kind}");
        }
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        let rows = vec![
            vec![integer(0), integer(1), integer(5)],
            vec![integer(1), integer(0), integer(1)],
            vec![integer(5), integer(1), integer(0)],
        ];
        assert_eq!(
            validate_metric(&rows),
            Err(MetricViolation::Triangle { a: 0, b: 1, c: 2 })
        );
    }

    #[test]
    fn asymmetry_is_reported() {
        let rows = vec![vec![integer(0), integer(1)], vec![integer(2), integer(0)]];
        assert_eq!(validate_metric(&rows), Err(MetricViolation::Asymmetric(0, 1)));
    }

    #[test]
    fn k0_examples() {
        let r = ratio(1, 6);
        assert_eq!(compute_k0(&integer(1), &r).unwrap(), -1);
        assert_eq!(compute_k0(&ratio(1, 2), &r).unwrap(), 0);
        assert_eq!(compute_k0(&integer(5), &r).unwrap(), -1);
        assert_eq!(compute_k0(&integer(6), &r).unwrap(), -2);
        assert_eq!(compute_k0(&ratio(1, 36), &r).unwrap(), 1);
        assert!(compute_k0(&integer(0), &r).is_err());
        assert!(compute_k0(&integer(1), &ratio(1, 5)).is_err());
    }

    #[test]
    fn k0_brackets_the_diameter() {
        let r = ratio(1, 9);
        for diam in [ratio(1, 1000), ratio(1, 9), ratio(26, 27), integer(1), integer(100)] {
            let k0 = compute_k0(&diam, &r).unwrap();
            assert!(diam < rational::pow(&r, k0));
            assert!(diam >= rational::pow(&r, k0 + 1));
        }
    }

    #[test]
    fn greedy_net_examples() {
        let space = line(&[integer(0), ratio(2, 5), integer(1)]);
        let order = [0, 1, 2];
        assert_eq!(maximal_separated_net(&space, &ratio(1, 2), &order), vec![0, 2]);
        assert_eq!(maximal_separated_net(&space, &ratio(3, 10), &order), vec![0, 1, 2]);
        assert_eq!(maximal_separated_net(&space, &ratio(1, 2), &[1]), vec![1]);
    }

    #[test]
    fn doubling_examples() {
        let two = generate_space(SpaceKind::Cantor { depth: 1 }).unwrap();
        assert_eq!(doubling_estimate(&two), 1);
        let cantor = generate_space(SpaceKind::Cantor { depth: 4 }).unwrap();
        let value = doubling_estimate(&cantor);
        assert!((1..=4).contains(&value), "{value}");
        let grid = generate_space(SpaceKind::Grid { n: 4 }).unwrap();
        let value = doubling_estimate(&grid);
        assert!((1..=16).contains(&value), "{value}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let text = "3\n0,0.25,1/2\n1/4,0,0.25\n0.5,0.25,0\n";
        let space = FiniteMetricSpace::from_csv_str("csv", text).unwrap();
        assert_eq!(*space.dist(0, 2), ratio(1, 2));
        let again = FiniteMetricSpace::from_csv_str("again", &space.to_csv_string()).unwrap();
        assert_eq!(again.rows(), space.rows());
    }

    #[test]
    fn csv_shape_errors() {
        assert!(FiniteMetricSpace::from_csv_str("x", "2\n0,1\n1\n").is_err());
        assert!(FiniteMetricSpace::from_csv_str("x", "2\n0,1\n").is_err());
        assert!(FiniteMetricSpace::from_csv_str("x", "").is_err());
    }

    #[test]
    fn default_truncation_is_full_separation() {
        let space = generate_space(SpaceKind::Cantor { depth: 4 }).unwrap();
        let scale = ScaleParams::for_space(&space, ratio(1, 9), None).unwrap();
        assert_eq!(scale.k0(), 0);
        assert_eq!(scale.max_level(), 2);
        let net = Net::at_level(&space, &scale, scale.max_level());
        assert_eq!(net.centers.len(), space.len());
        let net = Net::at_level(&space, &scale, 1);
        assert_eq!(net.centers.len(), 4);
    }

    #[test]
    fn scale_rejects_large_parameter_and_inverted_levels() {
        assert!(ScaleParams::new(ratio(1, 5), 0, 2).is_err());
        assert!(ScaleParams::new(ratio(1, 6), 0, -1).is_err());
        assert!(ScaleParams::new(ratio(1, 6), -1, -1).is_ok());
    }
}
