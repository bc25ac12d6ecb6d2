//! Planar geometry, regions, population grid cells and Poisson user sampling.
//!
//! All coordinates are planar meters (x east, y north).

use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

/// Side length of a population grid square.
pub const POPULATION_CELL_SIZE_M: f64 = 500.0;

const BOUNDARY_EPS_M: f64 = 1e-9;
const MEAN_EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("region {id:?} is degenerate: {reason}")]
    DegenerateRegion { id: String, reason: String },
    #[error("region {id:?} boundary is self-intersecting (edges {first} and {second})")]
    SelfIntersecting { id: String, first: usize, second: usize },
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),
    #[error("population cell at ({x}, {y}) has invalid population {population}")]
    InvalidPopulation { x: f64, y: f64, population: f64 },
    #[error("population cell at ({x}, {y}) has urbanity {urbanity}, expected 1..=5")]
    InvalidUrbanity { x: f64, y: f64, urbanity: u8 },
    #[error("invalid sampling parameter: {0}")]
    InvalidSampling(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Distance from `p` to the segment `a`-`b`.
pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&Point::new(a.x + t * dx, a.y + t * dy))
}

fn orientation(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// A simple closed polygon with a cached area centroid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    id: String,
    boundary: Vec<Point>,
    centroid: Point,
}

impl Region {
    /// Builds a region from an open or closed vertex ring.
    pub fn new(id: impl Into<String>, mut boundary: Vec<Point>) -> Result<Self, GeoError> {
        let id = id.into();
        if let Some(bad) = boundary.iter().find(|p| !p.is_finite()) {
            return Err(GeoError::NonFinite(format!("region {id:?} vertex {bad:?}")));
        }
        if boundary.len() > 1 && boundary.first() == boundary.last() {
            boundary.pop();
        }
        if boundary.len() < 3 {
            return Err(GeoError::DegenerateRegion {
                id,
                reason: format!("{} distinct vertices, need at least 3", boundary.len()),
            });
        }

        let n = boundary.len();
        let (mut area2, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (a, b) = (&boundary[i], &boundary[(i + 1) % n]);
            let cross = a.x * b.y - b.x * a.y;
            area2 += cross;
            cx += (a.x + b.x) * cross;
            cy += (a.y + b.y) * cross;
        }
        for i in 0..n {
            let (a, b) = (&boundary[i], &boundary[(i + 1) % n]);
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = (&boundary[j], &boundary[(j + 1) % n]);
                let hit = if adjacent {
                    // Neighbouring edges share one vertex; they may only overlap there.
                    let shared = if j == i + 1 { b } else { a };
                    let (other_a, other_far) = if j == i + 1 { (a, d) } else { (b, c) };
                    (orientation(a, b, other_far) == 0.0 && on_segment(a, b, other_far) && other_far != shared)
                        || (orientation(c, d, other_a) == 0.0 && on_segment(c, d, other_a) && other_a != shared)
                } else {
                    segments_intersect(a, b, c, d)
                };
                if hit {
                    return Err(GeoError::SelfIntersecting {
                        id,
                        first: i,
                        second: j,
                    });
                }
            }
        }

        if area2.abs() <= f64::EPSILON * bbox_scale(&boundary).powi(2) {
            return Err(GeoError::DegenerateRegion {
                id,
                reason: "zero area".into(),
            });
        }
        let centroid = Point::new(cx / (3.0 * area2), cy / (3.0 * area2));

        Ok(Self { id, boundary, centroid })
    }

    /// Axis-aligned rectangle with corners `min` and `max`.
    pub fn rectangle(id: impl Into<String>, min: Point, max: Point) -> Result<Self, GeoError> {
        Self::new(id, vec![min, Point::new(max.x, min.y), max, Point::new(min.x, max.y)])
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.boundary {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }

    fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.boundary.len();
        (0..n).map(move |i| (&self.boundary[i], &self.boundary[(i + 1) % n]))
    }

    pub fn distance_to_boundary(&self, p: &Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Boundary points count as inside.
    pub fn contains(&self, p: &Point) -> bool {
        if self.distance_to_boundary(p) <= BOUNDARY_EPS_M {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn bbox_scale(points: &[Point]) -> f64 {
    points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max)
}

pub fn point_in_region(p: &Point, region: &Region) -> bool {
    region.contains(p)
}

/// Equirectangular projection around a fixed geographic origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTangentPlane {
    pub origin_lat: f64,
    pub origin_lon: f64,
}

impl LocalTangentPlane {
    pub fn project(&self, lat: f64, lon: f64) -> Point {
        let k = MEAN_EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        Point::new(
            k * (lon - self.origin_lon) * self.origin_lat.to_radians().cos(),
            k * (lat - self.origin_lat),
        )
    }
}

/// One square of the population grid; `origin` is its southwest corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationCell {
    pub origin: Point,
    pub size: f64,
    pub population: f64,
    pub urbanity: u8,
}

impl PopulationCell {
    pub fn new(origin: Point, population: f64, urbanity: u8) -> Self {
        Self {
            origin,
            size: POPULATION_CELL_SIZE_M,
            population,
            urbanity,
        }
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        if !self.origin.is_finite() || !self.size.is_finite() || self.size <= 0.0 {
            return Err(GeoError::NonFinite(format!("population cell {:?}", self.origin)));
        }
        if !self.population.is_finite() || self.population < 0.0 {
            return Err(GeoError::InvalidPopulation {
                x: self.origin.x,
                y: self.origin.y,
                population: self.population,
            });
        }
        if !(1..=5).contains(&self.urbanity) {
            return Err(GeoError::InvalidUrbanity {
                x: self.origin.x,
                y: self.origin.y,
                urbanity: self.urbanity,
            });
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.origin.x
            && p.x <= self.origin.x + self.size
            && p.y >= self.origin.y
            && p.y <= self.origin.y + self.size
    }

    pub fn center(&self) -> Point {
        Point::new(self.origin.x + self.size / 2.0, self.origin.y + self.size / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorId(pub String);

impl OperatorId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Which operator's cells a user may use outside roaming.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subscription {
    Operator(OperatorId),
    /// No home operator: every cell is a candidate in any mode.
    Any,
}

impl Subscription {
    pub fn label(&self) -> &str {
        match self {
            Subscription::Operator(op) => op.as_str(),
            Subscription::Any => "any",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: u64,
    pub position: Point,
    pub subscription: Subscription,
    /// Minimum rate requirement in bits/s.
    pub rate_requirement: f64,
}

/// Everything needed to draw users from a population grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    cells: Vec<PopulationCell>,
    active_fraction: f64,
    rate_band_bps: (f64, f64),
    operators: Vec<OperatorId>,
    split: Vec<f64>,
    clip: Option<Region>,
}

impl SamplingPlan {
    pub fn new(
        cells: Vec<PopulationCell>,
        active_fraction: f64,
        rate_band_bps: (f64, f64),
        operators: Vec<OperatorId>,
        split: Vec<f64>,
    ) -> Result<Self, GeoError> {
        for c in &cells {
            c.validate()?;
        }
        if !(0.0..=1.0).contains(&active_fraction) {
            return Err(GeoError::InvalidSampling(format!(
                "active fraction {active_fraction} outside [0, 1]"
            )));
        }
        let (lo, hi) = rate_band_bps;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
            return Err(GeoError::InvalidSampling(format!(
                "rate band [{lo}, {hi}] is not an ordered non-negative interval"
            )));
        }
        if operators.len() != split.len() {
            return Err(GeoError::InvalidSampling(format!(
                "{} operators but {} split fractions",
                operators.len(),
                split.len()
            )));
        }
        if !operators.is_empty() {
            let total: f64 = split.iter().sum();
            if split.iter().any(|s| !s.is_finite() || *s < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(GeoError::InvalidSampling(format!(
                    "split fractions {split:?} must be non-negative and sum to 1"
                )));
            }
        }
        Ok(Self {
            cells,
            active_fraction,
            rate_band_bps,
            operators,
            split,
            clip: None,
        })
    }

    /// Equal split over `operators`.
    pub fn equal_split(
        cells: Vec<PopulationCell>,
        active_fraction: f64,
        rate_band_bps: (f64, f64),
        operators: Vec<OperatorId>,
    ) -> Result<Self, GeoError> {
        let n = operators.len();
        let split = vec![1.0 / n as f64; n];
        Self::new(cells, active_fraction, rate_band_bps, operators, split)
    }

    /// Drops users that fall outside `region` after sampling.
    pub fn with_clip(mut self, region: Region) -> Self {
        self.clip = Some(region);
        self
    }

    pub fn cells(&self) -> &[PopulationCell] {
        &self.cells
    }

    pub fn operators(&self) -> &[OperatorId] {
        &self.operators
    }

    pub fn sample(self, seed: u64) -> UserSet {
        let users = self.draw(1.0, 0, seed);
        UserSet {
            users,
            plan: Arc::new(self),
        }
    }

    fn draw(&self, intensity_scale: f64, first_id: u64, seed: u64) -> Vec<User> {
        let mut rng = seed::rng(seed);
        let weights = if self.operators.is_empty() {
            None
        } else {
            Some(WeightedIndex::new(&self.split).expect("split validated at construction"))
        };
        let (rate_lo, rate_hi) = self.rate_band_bps;
        let mut users = Vec::new();
        for cell in &self.cells {
            let lambda = cell.population * self.active_fraction * intensity_scale;
            if lambda <= 0.0 {
                continue;
            }
            let count = Poisson::new(lambda)
                .expect("positive finite intensity")
                .sample(&mut rng) as u64;
            for _ in 0..count {
                let position = Point::new(
                    cell.origin.x + cell.size * rng.random::<f64>(),
                    cell.origin.y + cell.size * rng.random::<f64>(),
                );
                let subscription = match &weights {
                    Some(w) => Subscription::Operator(self.operators[w.sample(&mut rng)].clone()),
                    None => Subscription::Any,
                };
                let rate_requirement = if rate_hi > rate_lo {
                    rng.random_range(rate_lo..=rate_hi)
                } else {
                    rate_lo
                };
                users.push((position, subscription, rate_requirement));
            }
        }
        users
            .into_iter()
            .filter(|(p, _, _)| self.clip.as_ref().is_none_or(|r| r.contains(p)))
            .enumerate()
            .map(|(i, (position, subscription, rate_requirement))| User {
                id: first_id + i as u64,
                position,
                subscription,
                rate_requirement,
            })
            .collect()
    }
}

/// Sampled active users together with the plan that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet {
    users: Vec<User>,
    plan: Arc<SamplingPlan>,
}

impl UserSet {
    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }
}

pub fn sample_users(
    cells: Vec<PopulationCell>,
    active_fraction: f64,
    rate_band_bps: (f64, f64),
    operators: Vec<OperatorId>,
    split: Vec<f64>,
    seed: u64,
) -> Result<UserSet, GeoError> {
    Ok(SamplingPlan::new(cells, active_fraction, rate_band_bps, operators, split)?.sample(seed))
}

/// Adds `p_pop` percent more users drawn from the same plan. Existing users are kept
/// unchanged and new ids continue after the largest existing one.
pub fn scale_users(users: &UserSet, p_pop: f64, seed: u64) -> Result<UserSet, GeoError> {
    if !p_pop.is_finite() || p_pop < 0.0 {
        return Err(GeoError::InvalidSampling(format!(
            "user increase {p_pop}% must be non-negative"
        )));
    }
    let mut out = users.clone();
    if p_pop == 0.0 {
        return Ok(out);
    }
    let first_id = users.users.iter().map(|u| u.id + 1).max().unwrap_or(0);
    out.users.extend(users.plan.draw(p_pop / 100.0, first_id, seed));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Region {
        Region::rectangle("unit", Point::new(0.0, 0.0), Point::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn point_in_unit_square() {
        let r = unit_square();
        assert!(point_in_region(&Point::new(0.5, 0.5), &r));
        assert!(!point_in_region(&Point::new(2.0, 2.0), &r));
        assert!(point_in_region(&Point::new(0.5, 0.0), &r));
        assert!(point_in_region(&Point::new(1.0, 1.0), &r));
    }

    #[test]
    fn concave_region() {
        // L-shape
        let r = Region::new(
            "L",
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 1.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 2.0),
                Point::new(0.0, 2.0),
            ],
        )
        .unwrap();
        assert!(r.contains(&Point::new(0.5, 1.5)));
        assert!(!r.contains(&Point::new(1.5, 1.5)));
        let (min, max) = r.bounding_box();
        let c = r.centroid();
        assert!(c.x >= min.x && c.x <= max.x && c.y >= min.y && c.y <= max.y);
    }

    #[test]
    fn degenerate_regions_rejected() {
        let two = Region::new("a", vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
        assert!(matches!(two, Err(GeoError::DegenerateRegion { .. })));
        let line = Region::new(
            "b",
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
        );
        assert!(line.is_err());
    }

    #[test]
    fn closed_ring_accepted() {
        let r = Region::new(
            "tri",
            vec![
                Point::new(0.0, 0.0),
                Point::new(4.0, 0.0),
                Point::new(0.0, 3.0),
                Point::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(r.boundary().len(), 3);
        assert!((r.centroid().x - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.centroid().y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bowtie_rejected() {
        let r = Region::new(
            "bow",
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
        );
        assert!(matches!(r, Err(GeoError::SelfIntersecting { .. })));
    }

    #[test]
    fn distance_to_boundary_outside() {
        let r = Region::rectangle("sq", Point::new(0.0, 0.0), Point::new(1000.0, 1000.0)).unwrap();
        assert!((r.distance_to_boundary(&Point::new(2500.0, 500.0)) - 1500.0).abs() < 1e-9);
    }

    #[test]
    fn tangent_plane_origin_maps_to_zero() {
        let proj = LocalTangentPlane {
            origin_lat: 52.0,
            origin_lon: 6.9,
        };
        assert_eq!(proj.project(52.0, 6.9), Point::new(0.0, 0.0));
        let north = proj.project(52.01, 6.9);
        assert!((north.y - 1111.95).abs() < 0.1, "{north:?}");
        let east = proj.project(52.0, 6.91);
        assert!(east.x < north.y && east.x > 600.0);
    }

    fn one_cell(population: f64) -> Vec<PopulationCell> {
        vec![PopulationCell::new(Point::new(0.0, 0.0), population, 2)]
    }

    #[test]
    fn zero_population_gives_no_users() {
        let u = sample_users(one_cell(0.0), 0.02, (8e6, 20e6), vec![], vec![], 1).unwrap();
        assert!(u.is_empty());
    }

    #[test]
    fn negative_population_rejected() {
        let err = sample_users(one_cell(-99997.0), 0.02, (8e6, 20e6), vec![], vec![], 1);
        assert!(matches!(err, Err(GeoError::InvalidPopulation { .. })));
    }

    #[test]
    fn bad_split_rejected() {
        let ops = vec![OperatorId::new("a"), OperatorId::new("b")];
        assert!(sample_users(one_cell(10.0), 0.5, (1.0, 2.0), ops.clone(), vec![0.5, 0.6], 0).is_err());
        assert!(sample_users(one_cell(10.0), 0.5, (1.0, 2.0), ops, vec![1.0], 0).is_err());
        assert!(sample_users(one_cell(10.0), 1.5, (1.0, 2.0), vec![], vec![], 0).is_err());
        assert!(sample_users(one_cell(10.0), 0.5, (3.0, 2.0), vec![], vec![], 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let ops = vec![OperatorId::new("a"), OperatorId::new("b")];
        let a = sample_users(one_cell(5000.0), 0.02, (8e6, 20e6), ops.clone(), vec![0.5, 0.5], 9).unwrap();
        let b = sample_users(one_cell(5000.0), 0.02, (8e6, 20e6), ops, vec![0.5, 0.5], 9).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn users_lie_in_source_cell_with_rates_in_band() {
        let u = sample_users(one_cell(5000.0), 0.1, (8e6, 20e6), vec![], vec![], 4).unwrap();
        for user in u.users() {
            assert!(one_cell(0.0)[0].contains(&user.position));
            assert!((8e6..=20e6).contains(&user.rate_requirement));
            assert_eq!(user.subscription, Subscription::Any);
        }
    }

    #[test]
    fn clip_removes_outside_users_and_keeps_ids_contiguous() {
        let half = Region::rectangle("half", Point::new(0.0, 0.0), Point::new(250.0, 500.0)).unwrap();
        let plan = SamplingPlan::new(one_cell(5000.0), 0.1, (1.0, 1.0), vec![], vec![])
            .unwrap()
            .with_clip(half.clone());
        let u = plan.sample(3);
        assert!(u.users().iter().all(|x| half.contains(&x.position)));
        for (i, user) in u.users().iter().enumerate() {
            assert_eq!(user.id, i as u64);
        }
    }

    #[test]
    fn scale_zero_is_identity() {
        let u = sample_users(one_cell(5000.0), 0.02, (8e6, 20e6), vec![], vec![], 9).unwrap();
        assert_eq!(scale_users(&u, 0.0, 5).unwrap(), u);
        assert!(scale_users(&u, -1.0, 5).is_err());
    }

    #[test]
    fn scale_keeps_prefix_and_extends_ids() {
        let u = sample_users(one_cell(5000.0), 0.02, (8e6, 20e6), vec![], vec![], 9).unwrap();
        let s = scale_users(&u, 100.0, 5).unwrap();
        assert_eq!(&s.users()[..u.len()], u.users());
        for (i, user) in s.users().iter().enumerate() {
            assert_eq!(user.id, i as u64);
        }
    }

    #[test]
    fn scale_on_empty_population_stays_empty() {
        let u = sample_users(one_cell(0.0), 0.02, (8e6, 20e6), vec![], vec![], 9).unwrap();
        assert!(scale_users(&u, 50.0, 1).unwrap().is_empty());
    }
}
