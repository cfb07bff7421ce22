//! Planar geometry on projected coordinates.
//!
//! Lat/lng pairs are mapped to meters with an equirectangular projection
//! around a reference latitude. At city scale the distortion is well below
//! the noise in stop coordinates.

use serde::{Deserialize, Serialize};

pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        self.sub(other).norm()
    }
}

/// Equirectangular projection with a fixed reference latitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub ref_lat: f64,
}

impl Projection {
    pub fn new(ref_lat: f64) -> Self {
        Projection { ref_lat }
    }

    /// Projection centred on the mean latitude of `coords` (lat, lng).
    pub fn fit<'a>(coords: impl IntoIterator<Item = &'a (f64, f64)>) -> Self {
        let (sum, count) = coords
            .into_iter()
            .fold((0.0, 0usize), |(s, c), &(lat, _)| (s + lat, c + 1));
        let ref_lat = if count == 0 { 0.0 } else { sum / count as f64 };
        Projection { ref_lat }
    }

    pub fn project(&self, lat: f64, lng: f64) -> Point {
        let k = self.ref_lat.to_radians().cos();
        Point::new(
            EARTH_RADIUS_M * lng.to_radians() * k,
            EARTH_RADIUS_M * lat.to_radians(),
        )
    }

    pub fn unproject(&self, p: Point) -> (f64, f64) {
        let k = self.ref_lat.to_radians().cos();
        let lat = (p.y / EARTH_RADIUS_M).to_degrees();
        let lng = (p.x / (EARTH_RADIUS_M * k)).to_degrees();
        (lat, lng)
    }
}

/// Unsigned angle in radians between two vectors, in `[0, pi]`.
/// Returns `None` when either vector has zero length.
pub fn angle_between(a: Point, b: Point) -> Option<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    // atan2 stays accurate near 0 and pi where acos loses precision.
    Some(a.cross(b).abs().atan2(a.dot(b)))
}

/// Sign of the orientation of the triangle (a, b, c).
fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let v = b.sub(a).cross(c.sub(a));
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// True when the segments cross at a single interior point of both.
/// Touching endpoints, collinear overlaps and zero-length segments are not
/// proper intersections.
pub fn segments_properly_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    if p1 == p2 || q1 == q2 {
        return false;
    }
    if p1.x.max(p2.x) < q1.x.min(q2.x)
        || q1.x.max(q2.x) < p1.x.min(p2.x)
        || p1.y.max(p2.y) < q1.y.min(q2.y)
        || q1.y.max(q2.y) < p1.y.min(p2.y)
    {
        return false;
    }
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_round_trip() {
        let proj = Projection::new(40.7);
        let p = proj.project(40.71, -74.01);
        let (lat, lng) = proj.unproject(p);
        assert!((lat - 40.71).abs() < 1e-12);
        assert!((lng + 74.01).abs() < 1e-12);
    }

    #[test]
    fn one_degree_latitude_is_about_111_km() {
        let proj = Projection::new(0.0);
        let d = proj.project(1.0, 0.0).distance(proj.project(0.0, 0.0));
        assert!((d - 111_195.0).abs() < 10.0, "{d}");
    }

    #[test]
    fn angles() {
        let e = Point::new(1.0, 0.0);
        assert_eq!(angle_between(e, e), Some(0.0));
        let a = angle_between(e, Point::new(0.0, 2.0)).unwrap();
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let a = angle_between(e, Point::new(-3.0, 0.0)).unwrap();
        assert!((a - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(angle_between(e, Point::ZERO), None);
    }

    #[test]
    fn proper_intersection_cases() {
        let p = |x, y| Point::new(x, y);
        assert!(segments_properly_intersect(p(0., 0.), p(1., 1.), p(1., 0.), p(0., 1.)));
        // shared endpoint
        assert!(!segments_properly_intersect(p(0., 0.), p(1., 1.), p(1., 1.), p(2., 0.)));
        // T-junction
        assert!(!segments_properly_intersect(p(0., 0.), p(2., 0.), p(1., 0.), p(1., 1.)));
        // collinear overlap
        assert!(!segments_properly_intersect(p(0., 0.), p(2., 0.), p(1., 0.), p(3., 0.)));
        // zero length
        assert!(!segments_properly_intersect(p(0.5, 0.5), p(0.5, 0.5), p(1., 0.), p(0., 1.)));
        // disjoint
        assert!(!segments_properly_intersect(p(0., 0.), p(1., 0.), p(0., 1.), p(1., 1.)));
    }
}
