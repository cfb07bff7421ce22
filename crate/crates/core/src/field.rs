//! Step-vector field mined from historical routes.
//!
//! Every history contributes the displacement between consecutive zone
//! centroids, cut into pieces of at most `beta` meters. The heading at a
//! point is the sum of nearby step vectors weighted by `exp(-alpha * d)`,
//! where `d` is the distance from the point to the step's origin. Only
//! origins within `max_d` are visited, via a radius query on a k-d tree.

use std::path::Path;

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geo::{angle_between, Point, Projection};
use crate::instance::{parse_json, read_text, write_text, HistoricalRoute, DEPOT_ZONE};
use crate::zones::{centroid, ZoneIndex};

pub const DEFAULT_BETA: f64 = 200.0;
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Weight below which a step vector is ignored by the pruned query.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepVector {
    pub origin: Point,
    pub tip: Point,
}

impl StepVector {
    pub fn vector(&self) -> Point {
        self.tip.sub(self.origin)
    }

    pub fn length(&self) -> f64 {
        self.vector().norm()
    }

    pub fn direction(&self) -> Point {
        let v = self.vector();
        v.scale(1.0 / v.norm())
    }
}

/// Splits the segment `from -> to` into consecutive steps of length `beta`;
/// the last one carries the remainder.
pub fn split_segment(from: Point, to: Point, beta: f64) -> Vec<StepVector> {
    let len = from.distance(to);
    if len == 0.0 {
        return Vec::new();
    }
    let dir = to.sub(from).scale(1.0 / len);
    let mut steps = Vec::with_capacity((len / beta).ceil() as usize);
    let mut start = 0.0;
    // sub-micrometre remainders come from rounding, not geometry
    while len - start > 1e-9 {
        let end = (start + beta).min(len);
        let tip = if end == len { to } else { from.add(dir.scale(end)) };
        steps.push(StepVector {
            origin: from.add(dir.scale(start)),
            tip,
        });
        start = end;
    }
    steps
}

/// Customer-zone centroids of a history in visiting order.
fn history_centroids(route: &HistoricalRoute) -> Vec<(f64, f64)> {
    let mut blocks: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for p in &route.sequence {
        let Some(zone) = p.zone_id.as_deref() else {
            continue;
        };
        if zone == DEPOT_ZONE {
            continue;
        }
        match blocks.last_mut() {
            Some((z, pts)) if *z == zone => pts.push((p.lat, p.lng)),
            _ => blocks.push((zone, vec![(p.lat, p.lng)])),
        }
    }
    blocks.iter().map(|(_, pts)| centroid(pts)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Heading {
    pub vector: Point,
    /// No step vector inside the query radius.
    pub empty: bool,
}

pub struct VectorField {
    steps: Vec<StepVector>,
    alpha: f64,
    beta: f64,
    projection: Projection,
    max_d: f64,
    tree: Option<ImmutableKdTree<f64, 2>>,
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField")
            .field("steps", &self.steps.len())
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("max_d", &self.max_d)
            .finish()
    }
}

/// Radius beyond which `exp(-alpha * d)` is below [`NEGLIGIBLE_WEIGHT`].
pub fn pruning_radius(alpha: f64) -> f64 {
    (1.0 / NEGLIGIBLE_WEIGHT).ln() / alpha
}

impl VectorField {
    pub fn from_steps(steps: Vec<StepVector>, alpha: f64, beta: f64, projection: Projection) -> Self {
        let tree = if steps.is_empty() {
            None
        } else {
            let origins: Vec<[f64; 2]> = steps.iter().map(|s| [s.origin.x, s.origin.y]).collect();
            Some(ImmutableKdTree::new_from_slice(&origins).expect("non-empty finite origins"))
        };
        VectorField {
            steps,
            alpha,
            beta,
            projection,
            max_d: pruning_radius(alpha),
            tree,
        }
    }

    /// Same field with a different query radius.
    pub fn with_max_d(mut self, max_d: f64) -> Self {
        self.max_d = max_d;
        self
    }

    /// Unpruned sum over every step vector.
    pub fn heading_exhaustive(&self, p: Point) -> Point {
        self.steps.iter().fold(Point::ZERO, |acc, s| {
            let w = (-s.origin.distance(p) * self.alpha).exp();
            acc.add(s.vector().scale(w))
        })
    }

    pub fn steps(&self) -> &[StepVector] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn max_d(&self) -> f64 {
        self.max_d
    }

    pub fn projection(&self) -> Projection {
        self.projection
    }

    /// Weighted sum of step vectors whose origin lies within `max_d` of `p`.
    pub fn heading(&self, p: Point) -> Heading {
        let Some(tree) = &self.tree else {
            return Heading {
                vector: Point::ZERO,
                empty: true,
            };
        };
        let hits = tree
            .query(&[p.x, p.y])
            .within::<SquaredEuclidean<f64>>(self.max_d * self.max_d)
            .unsorted()
            .execute();
        let mut sum = Point::ZERO;
        for hit in &hits {
            let step = &self.steps[hit.item as usize];
            let w = (-hit.distance.sqrt() * self.alpha).exp();
            sum = sum.add(step.vector().scale(w));
        }
        Heading {
            vector: sum,
            empty: hits.is_empty(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let file = FieldFile {
            steps: self
                .steps
                .iter()
                .map(|s| StepRecord {
                    ox: s.origin.x,
                    oy: s.origin.y,
                    tx: s.tip.x,
                    ty: s.tip.y,
                })
                .collect(),
            alpha: self.alpha,
            beta: self.beta,
            projection_ref_lat: self.projection.ref_lat,
        };
        serde_json::to_string(&file).expect("field serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: FieldFile = parse_json(text)?;
        let steps = file
            .steps
            .into_iter()
            .map(|s| StepVector {
                origin: Point::new(s.ox, s.oy),
                tip: Point::new(s.tx, s.ty),
            })
            .collect();
        Ok(VectorField::from_steps(
            steps,
            file.alpha,
            file.beta,
            Projection::new(file.projection_ref_lat),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    ox: f64,
    oy: f64,
    tx: f64,
    ty: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    steps: Vec<StepRecord>,
    alpha: f64,
    beta: f64,
    projection_ref_lat: f64,
}

pub fn save_field(field: &VectorField, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &field.to_json_string())
}

pub fn load_field(path: impl AsRef<Path>) -> Result<VectorField> {
    VectorField::from_json_str(&read_text(path.as_ref())?)
}

/// Builds the field from executed routes. The projection is centred on the
/// mean latitude of all history points. Histories touching fewer than two
/// customer zones contribute nothing.
pub fn build_field(histories: &[HistoricalRoute], beta: f64, alpha: f64) -> VectorField {
    let coords: Vec<(f64, f64)> = histories
        .iter()
        .flat_map(|h| h.sequence.iter().map(|p| (p.lat, p.lng)))
        .collect();
    let projection = Projection::fit(&coords);
    let mut steps = Vec::new();
    for route in histories {
        let pts: Vec<Point> = history_centroids(route)
            .into_iter()
            .map(|(lat, lng)| projection.project(lat, lng))
            .collect();
        for pair in pts.windows(2) {
            steps.extend(split_segment(pair[0], pair[1], beta));
        }
    }
    VectorField::from_steps(steps, alpha, beta, projection)
}

/// Square matrix over customer zones with a flag per entry telling whether
/// it was derived from history or defaulted to 0.5.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix {
    m: usize,
    values: Vec<f64>,
    informed: Vec<bool>,
}

impl ProbabilityMatrix {
    pub fn uninformed(m: usize) -> Self {
        ProbabilityMatrix {
            m,
            values: vec![0.5; m * m],
            informed: vec![false; m * m],
        }
    }

    /// Square matrix with every entry marked informed.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let m = rows.len();
        let values: Vec<f64> = rows.iter().flatten().copied().collect();
        assert_eq!(values.len(), m * m, "probability matrix must be square");
        ProbabilityMatrix {
            m,
            values,
            informed: vec![true; m * m],
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn is_informed(&self, i: usize, j: usize) -> bool {
        self.informed[i * self.m + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.m + j] = v;
        self.informed[i * self.m + j] = true;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.m.max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// Zone centroids of an instance in the field's planar frame.
pub fn projected_centroids(field: &VectorField, zi: &ZoneIndex) -> Vec<Point> {
    let proj = field.projection();
    zi.centroids()
        .iter()
        .map(|&(lat, lng)| proj.project(lat, lng))
        .collect()
}

pub fn zone_headings(field: &VectorField, centroids: &[Point]) -> Vec<Heading> {
    centroids.iter().map(|&c| field.heading(c)).collect()
}

/// Transition probabilities `H[i][j] = delta/2 + (1 - delta) * eps` where
/// `delta` is the centroid distance over the largest centroid distance and
/// `eps = (1 + cos theta) / 2` measures how well the heading at `i` points
/// towards `j`. Rows without a heading stay at 0.5.
pub fn transition_from_headings(centroids: &[Point], headings: &[Heading]) -> ProbabilityMatrix {
    let m = centroids.len();
    let mut out = ProbabilityMatrix::uninformed(m);
    let max_dist = max_pairwise_distance(centroids);
    for i in 0..m {
        if headings[i].empty {
            continue;
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            let u = centroids[j].sub(centroids[i]);
            let Some(theta) = angle_between(headings[i].vector, u) else {
                continue;
            };
            let delta = if max_dist > 0.0 { u.norm() / max_dist } else { 0.0 };
            let eps = (1.0 + theta.cos()) / 2.0;
            out.set(i, j, (0.5 * delta + (1.0 - delta) * eps).clamp(0.0, 1.0));
        }
    }
    out
}

/// Deviation probabilities `A[i][j] = a / 180` with `a` the angle in degrees
/// between the heading at `i` and the direction from `i` to `j`.
pub fn deviation_from_headings(centroids: &[Point], headings: &[Heading]) -> ProbabilityMatrix {
    let m = centroids.len();
    let mut out = ProbabilityMatrix::uninformed(m);
    for i in 0..m {
        if headings[i].empty {
            continue;
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            let u = centroids[j].sub(centroids[i]);
            if let Some(theta) = angle_between(headings[i].vector, u) {
                out.set(i, j, (theta.to_degrees() / 180.0).clamp(0.0, 1.0));
            }
        }
    }
    out
}

fn max_pairwise_distance(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(a.distance(*b));
        }
    }
    best
}

pub fn transition_matrix(field: &VectorField, zi: &ZoneIndex) -> ProbabilityMatrix {
    let c = projected_centroids(field, zi);
    transition_from_headings(&c, &zone_headings(field, &c))
}

pub fn deviation_matrix(field: &VectorField, zi: &ZoneIndex) -> ProbabilityMatrix {
    let c = projected_centroids(field, zi);
    deviation_from_headings(&c, &zone_headings(field, &c))
}

/// Per-instance history information: headings at each zone centroid plus
/// the H and A matrices derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryMatrices {
    pub headings: Vec<Heading>,
    pub transition: ProbabilityMatrix,
    pub deviation: ProbabilityMatrix,
}

impl HistoryMatrices {
    pub fn from_field(field: &VectorField, zi: &ZoneIndex) -> Self {
        let c = projected_centroids(field, zi);
        let headings = zone_headings(field, &c);
        HistoryMatrices {
            transition: transition_from_headings(&c, &headings),
            deviation: deviation_from_headings(&c, &headings),
            headings,
        }
    }

    pub fn uninformed(m: usize) -> Self {
        HistoryMatrices {
            headings: vec![
                Heading {
                    vector: Point::ZERO,
                    empty: true
                };
                m
            ],
            transition: ProbabilityMatrix::uninformed(m),
            deviation: ProbabilityMatrix::uninformed(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::HistoryPoint;

    fn step(ox: f64, oy: f64, vx: f64, vy: f64) -> StepVector {
        StepVector {
            origin: Point::new(ox, oy),
            tip: Point::new(ox + vx, oy + vy),
        }
    }

    #[test]
    fn splits_450_m_into_three_steps() {
        let steps = split_segment(Point::new(0.0, 0.0), Point::new(450.0, 0.0), 200.0);
        let lens: Vec<f64> = steps.iter().map(StepVector::length).collect();
        assert_eq!(lens.len(), 3);
        assert!((lens[0] - 200.0).abs() < 1e-9);
        assert!((lens[1] - 200.0).abs() < 1e-9);
        assert!((lens[2] - 50.0).abs() < 1e-9);
        assert_eq!(steps[2].tip, Point::new(450.0, 0.0));
        assert!(split_segment(Point::ZERO, Point::ZERO, 200.0).is_empty());
        assert_eq!(split_segment(Point::ZERO, Point::new(0.0, 400.0), 200.0).len(), 2);
    }

    #[test]
    fn heading_of_a_single_step_at_its_origin() {
        let f = VectorField::from_steps(vec![step(5.0, 5.0, 1.0, 0.0)], 0.01, 200.0, Projection::new(0.0));
        let h = f.heading(Point::new(5.0, 5.0));
        assert!(!h.empty);
        assert_eq!(h.vector, Point::new(1.0, 0.0));
    }

    #[test]
    fn opposite_steps_cancel() {
        let f = VectorField::from_steps(
            vec![step(-10.0, 0.0, 1.0, 0.0), step(10.0, 0.0, -1.0, 0.0)],
            0.01,
            200.0,
            Projection::new(0.0),
        );
        let h = f.heading(Point::ZERO);
        assert!(h.vector.norm() < 1e-15);
        assert!(!h.empty);
    }

    #[test]
    fn far_query_is_empty() {
        let f = VectorField::from_steps(vec![step(0.0, 0.0, 1.0, 0.0)], 0.01, 200.0, Projection::new(0.0));
        let h = f.heading(Point::new(f.max_d() * 1.01, 0.0));
        assert!(h.empty);
        assert_eq!(h.vector, Point::ZERO);
        let empty = build_field(&[], 200.0, 0.01);
        assert!(empty.heading(Point::ZERO).empty);
    }

    #[test]
    fn pruning_radius_matches_cutoff() {
        let r = pruning_radius(0.01);
        assert!(((-0.01 * r).exp() - NEGLIGIBLE_WEIGHT).abs() < 1e-15);
    }

    #[test]
    fn history_with_one_zone_adds_nothing() {
        let p = |lat: f64, z: &str| HistoryPoint {
            lat,
            lng: 0.0,
            zone_id: Some(z.to_owned()),
        };
        let one = HistoricalRoute {
            instance_ref: None,
            sequence: vec![p(0.0, DEPOT_ZONE), p(0.01, "A"), p(0.011, "A")],
        };
        assert!(build_field(&[one], 200.0, 0.01).is_empty());
    }

    #[test]
    fn field_json_round_trip() {
        let f = VectorField::from_steps(
            vec![step(1.5, -2.25, 3.0, 4.0), step(0.1, 0.2, 0.3, 0.4)],
            0.01,
            200.0,
            Projection::new(41.2),
        );
        let g = VectorField::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(g.steps(), f.steps());
        assert_eq!(g.alpha(), 0.01);
        assert_eq!(g.projection(), f.projection());
        assert_eq!(g.to_json_string(), f.to_json_string());
    }

    fn heading(x: f64, y: f64) -> Heading {
        Heading {
            vector: Point::new(x, y),
            empty: false,
        }
    }

    #[test]
    fn deviation_angles() {
        let c = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(-10.0, 0.0), Point::new(0.0, 10.0)];
        let hs = [heading(1.0, 0.0), heading(1.0, 0.0), heading(1.0, 0.0), heading(1.0, 0.0)];
        let a = deviation_from_headings(&c, &hs);
        assert!(a.get(0, 1).abs() < 1e-12);
        assert!((a.get(0, 2) - 1.0).abs() < 1e-12);
        assert!((a.get(0, 3) - 0.5).abs() < 1e-12);
        assert!(a.is_informed(0, 1));
    }

    #[test]
    fn empty_heading_rows_default_to_half() {
        let c = [Point::new(0.0, 0.0), Point::new(10.0, 0.0)];
        let hs = [
            Heading {
                vector: Point::ZERO,
                empty: true,
            },
            heading(1.0, 0.0),
        ];
        let h = transition_from_headings(&c, &hs);
        let a = deviation_from_headings(&c, &hs);
        assert_eq!(h.get(0, 1), 0.5);
        assert_eq!(a.get(0, 1), 0.5);
        assert!(!h.is_informed(0, 1));
    }

    #[test]
    fn coincident_centroids_are_uninformed() {
        let c = [Point::new(0.0, 0.0), Point::new(0.0, 0.0)];
        let hs = [heading(1.0, 0.0), heading(1.0, 0.0)];
        let a = deviation_from_headings(&c, &hs);
        assert_eq!(a.get(0, 1), 0.5);
        assert!(!a.is_informed(0, 1));
    }

    #[test]
    fn farthest_pair_is_half_regardless_of_heading() {
        let c = [Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(30.0, 0.0)];
        for h in [heading(1.0, 0.0), heading(-1.0, 0.0), heading(0.0, 1.0)] {
            let m = transition_from_headings(&c, &[h, h, h]);
            assert!((m.get(0, 1) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn near_aligned_zone_has_high_transition_probability() {
        // delta(0, 2) = 0.3; heading points straight at zone 2
        let c = [Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(30.0, 0.0)];
        let m = transition_from_headings(&c, &[heading(1.0, 0.0); 3]);
        assert!((m.get(0, 2) - (0.15 + 0.7)).abs() < 1e-12);
        let m = transition_from_headings(&c, &[heading(-1.0, 0.0); 3]);
        assert!((m.get(0, 2) - 0.15).abs() < 1e-12);
    }
}
