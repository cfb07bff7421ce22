//! Heuristic box splitting over (travel time, history deviation).
//!
//! Both objectives are minimized. A rectangle is stored by its upper-left
//! corner (low f1, high f2) and lower-right corner (high f1, low f2).

use serde::{Deserialize, Serialize};

use crate::context::RouteContext;
use crate::error::{Error, Result};
use crate::instance::RouteSolution;
use crate::solver::{nearest_neighbor_tour, objective_pair, roh, SearchConfig};

pub const DEFAULT_N_MAX: usize = 50;
pub const DEFAULT_F1_MAX: f64 = 86_400.0;
pub const DEFAULT_F2_MIN: f64 = 0.0;
pub const DEFAULT_DELTA_MIN: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjPoint {
    pub f1: f64,
    pub f2: f64,
}

impl ObjPoint {
    pub fn new(f1: f64, f2: f64) -> Self {
        ObjPoint { f1, f2 }
    }

    /// At least as good on both objectives.
    pub fn weakly_dominates(&self, other: &ObjPoint) -> bool {
        self.f1 <= other.f1 && self.f2 <= other.f2
    }

    /// At least as good on both and strictly better on one.
    pub fn dominates(&self, other: &ObjPoint) -> bool {
        self.weakly_dominates(other) && (self.f1 < other.f1 || self.f2 < other.f2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub upper_left: ObjPoint,
    pub lower_right: ObjPoint,
}

impl Rectangle {
    pub fn new(upper_left: ObjPoint, lower_right: ObjPoint) -> Self {
        Rectangle {
            upper_left,
            lower_right,
        }
    }

    pub fn height(&self) -> f64 {
        self.upper_left.f2 - self.lower_right.f2
    }

    pub fn width(&self) -> f64 {
        self.lower_right.f1 - self.upper_left.f1
    }
}

/// Area of `r` with each axis divided by the matching extent of `initial`.
/// Zero extents count as 1.
pub fn rectangle_area(r: &Rectangle, initial: &Rectangle) -> f64 {
    let norm = |v: f64| if v > 0.0 { v } else { 1.0 };
    (r.width() / norm(initial.width())) * (r.height() / norm(initial.height()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveEntry {
    pub solution: RouteSolution,
    pub point: ObjPoint,
    /// Bound on f2 the solution was found under; `None` for the extreme point.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParetoArchive {
    pub entries: Vec<ArchiveEntry>,
    pub rectangles: Vec<Rectangle>,
    /// Number of constrained solver runs, extreme point included.
    pub roh_calls: usize,
    pub iterations: usize,
}

impl ParetoArchive {
    pub fn points(&self) -> Vec<ObjPoint> {
        self.entries.iter().map(|e| e.point).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when some archived point weakly dominates `p`.
    pub fn covers(&self, p: &ObjPoint) -> bool {
        self.entries.iter().any(|e| e.point.weakly_dominates(p))
    }

    /// Entries sorted by increasing f1.
    pub fn sorted(&self) -> Vec<&ArchiveEntry> {
        let mut v: Vec<&ArchiveEntry> = self.entries.iter().collect();
        v.sort_by(|a, b| a.point.f1.total_cmp(&b.point.f1).then(b.point.f2.total_cmp(&a.point.f2)));
        v
    }
}

/// Adds `entry` unless an archived point weakly dominates it, then drops
/// every archived point it dominates. Returns whether it was added.
pub fn archive_insert(arch: &mut ParetoArchive, entry: ArchiveEntry) -> bool {
    if arch.covers(&entry.point) {
        return false;
    }
    arch.entries.retain(|e| !entry.point.dominates(&e.point));
    arch.entries.push(entry);
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum F1Max {
    Seconds(f64),
    /// Travel time of the greedy nearest-neighbor tour.
    NearestNeighbor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HbsConfig {
    pub n_max: usize,
    pub f1_max: F1Max,
    pub f2_min: f64,
    pub delta_min: f64,
}

impl Default for HbsConfig {
    fn default() -> Self {
        HbsConfig {
            n_max: DEFAULT_N_MAX,
            f1_max: F1Max::Seconds(DEFAULT_F1_MAX),
            f2_min: DEFAULT_F2_MIN,
            delta_min: DEFAULT_DELTA_MIN,
        }
    }
}

fn entry(ctx: &RouteContext, cfg: &SearchConfig, sol: RouteSolution, bound: Option<f64>) -> ArchiveEntry {
    let (f1, f2) = objective_pair(ctx, &sol.order, &cfg.weights);
    ArchiveEntry {
        solution: sol,
        point: ObjPoint::new(f1, f2),
        bound,
    }
}

/// Approximates the Pareto front of (raw travel time, weighted history
/// deviation) by repeatedly bisecting the largest open rectangle with an
/// f2 bound.
pub fn pareto_solve(ctx: &RouteContext, cfg: &SearchConfig, hbs: &HbsConfig) -> Result<ParetoArchive> {
    if !(hbs.delta_min >= 0.0) || !hbs.f2_min.is_finite() {
        return Err(Error::Config("delta_min and f2_min must be finite and >= 0".into()));
    }
    let mut arch = ParetoArchive::default();
    let first = roh(ctx, cfg, f64::INFINITY)?.expect("unbounded problem is feasible");
    arch.roh_calls += 1;
    let first = entry(ctx, cfg, first, None);
    let z1 = first.point;
    let f1_max = match hbs.f1_max {
        F1Max::Seconds(s) => s,
        F1Max::NearestNeighbor => ctx
            .instance()
            .travel_times()
            .path_time(&nearest_neighbor_tour(ctx)),
    }
    .max(z1.f1);
    arch.entries.push(first);
    let initial = Rectangle::new(z1, ObjPoint::new(f1_max, hbs.f2_min.min(z1.f2)));
    if initial.height() > hbs.delta_min {
        arch.rectangles.push(initial);
    }

    for _ in 0..hbs.n_max {
        if arch.rectangles.is_empty() {
            break;
        }
        arch.iterations += 1;
        let mut pick = 0;
        let mut best_area = f64::NEG_INFINITY;
        for (k, r) in arch.rectangles.iter().enumerate() {
            let a = rectangle_area(r, &initial);
            if a > best_area {
                best_area = a;
                pick = k;
            }
        }
        let y = arch.rectangles[pick];
        let c = 0.5 * (y.upper_left.f2 + y.lower_right.f2);
        let found = roh(ctx, cfg, c)?;
        arch.roh_calls += 1;
        let candidate = found.map(|s| entry(ctx, cfg, s, Some(c)));
        let x = match candidate {
            Some(e) if !arch.covers(&e.point) => e,
            _ => {
                let r = &mut arch.rectangles[pick];
                r.lower_right.f2 = c;
                if r.height() <= hbs.delta_min {
                    arch.rectangles.remove(pick);
                }
                continue;
            }
        };
        let xp = x.point;
        archive_insert(&mut arch, x);

        let r1 = arch
            .rectangles
            .iter()
            .position(|r| r.upper_left.f1 < xp.f1 && xp.f1 <= r.lower_right.f1);
        let r2 = arch
            .rectangles
            .iter()
            .position(|r| r.upper_left.f2 >= xp.f2 && xp.f2 >= r.lower_right.f2);
        let mut added = Vec::new();
        if let Some(k) = r1 {
            let r = arch.rectangles[k];
            let corner = ObjPoint::new(xp.f1, r.lower_right.f2.max(c));
            if r.upper_left.f2 - corner.f2 > hbs.delta_min {
                added.push(Rectangle::new(r.upper_left, corner));
            }
        }
        if let Some(k) = r2 {
            let r = arch.rectangles[k];
            let corner = ObjPoint::new(xp.f1.max(r.upper_left.f1), xp.f2);
            if corner.f2 - r.lower_right.f2 > hbs.delta_min {
                added.push(Rectangle::new(corner, r.lower_right));
            }
        }
        let mut drop: Vec<usize> = r1.into_iter().chain(r2).collect();
        drop.sort_unstable();
        drop.dedup();
        for k in drop.into_iter().rev() {
            arch.rectangles.remove(k);
        }
        arch.rectangles.extend(added);
        arch.rectangles.retain(|r| !xp.dominates(&r.upper_left));
    }
    Ok(arch)
}

/// Area dominated by `points` and bounded by `reference`, both minimized.
/// Points not strictly better than the reference on both axes add nothing.
pub fn hypervolume(points: &[ObjPoint], reference: ObjPoint) -> f64 {
    let mut pts: Vec<ObjPoint> = points
        .iter()
        .copied()
        .filter(|p| p.f1 < reference.f1 && p.f2 < reference.f2)
        .collect();
    pts.sort_by(|a, b| a.f1.total_cmp(&b.f1).then(a.f2.total_cmp(&b.f2)));
    let mut area = 0.0;
    let mut ceiling = reference.f2;
    for p in pts {
        if p.f2 < ceiling {
            area += (reference.f1 - p.f1) * (ceiling - p.f2);
            ceiling = p.f2;
        }
    }
    area
}

/// Non-dominated subset of `points`, duplicates collapsed.
pub fn nondominated(points: &[ObjPoint]) -> Vec<ObjPoint> {
    let mut out: Vec<ObjPoint> = Vec::new();
    for p in points {
        if out.iter().any(|q| q.weakly_dominates(p)) {
            continue;
        }
        out.retain(|q| !p.dominates(q));
        out.push(*p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f1: f64, f2: f64) -> ArchiveEntry {
        ArchiveEntry {
            solution: RouteSolution {
                order: vec![],
                total_time: f1,
                components: Default::default(),
            },
            point: ObjPoint::new(f1, f2),
            bound: None,
        }
    }

    fn pts(a: &ParetoArchive) -> Vec<(f64, f64)> {
        let mut v: Vec<_> = a.entries.iter().map(|e| (e.point.f1, e.point.f2)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    #[test]
    fn insert_sequence() {
        let mut a = ParetoArchive::default();
        assert!(archive_insert(&mut a, e(10.0, 5.0)));
        assert!(archive_insert(&mut a, e(8.0, 7.0)));
        assert!(archive_insert(&mut a, e(9.0, 4.0)));
        assert_eq!(pts(&a), vec![(8.0, 7.0), (9.0, 4.0)]);
        assert!(!archive_insert(&mut a, e(9.0, 4.0)));
        assert_eq!(a.len(), 2);
        assert!(archive_insert(&mut a, e(1.0, 1.0)));
        assert_eq!(pts(&a), vec![(1.0, 1.0)]);
    }

    #[test]
    fn areas() {
        let init = Rectangle::new(ObjPoint::new(100.0, 3.0), ObjPoint::new(1100.0, 1.0));
        assert!((rectangle_area(&init, &init) - 1.0).abs() < 1e-15);
        let half = Rectangle::new(ObjPoint::new(100.0, 3.0), ObjPoint::new(1100.0, 2.0));
        assert!((rectangle_area(&half, &init) - 0.5).abs() < 1e-15);
        let flat = Rectangle::new(ObjPoint::new(1.0, 1.0), ObjPoint::new(5.0, 1.0));
        assert_eq!(rectangle_area(&flat, &init), 0.0);
    }

    #[test]
    fn hypervolume_of_staircase() {
        let r = ObjPoint::new(10.0, 10.0);
        assert_eq!(hypervolume(&[], r), 0.0);
        assert_eq!(hypervolume(&[ObjPoint::new(5.0, 5.0)], r), 25.0);
        let two = [ObjPoint::new(2.0, 8.0), ObjPoint::new(6.0, 3.0)];
        // 8 * 2 + 4 * 5
        assert_eq!(hypervolume(&two, r), 36.0);
        let with_dominated = [two[0], two[1], ObjPoint::new(7.0, 9.0)];
        assert_eq!(hypervolume(&with_dominated, r), 36.0);
    }

    #[test]
    fn nondominated_filter() {
        let p = |a, b| ObjPoint::new(a, b);
        let out = nondominated(&[p(1.0, 5.0), p(2.0, 2.0), p(3.0, 3.0), p(2.0, 2.0), p(0.5, 9.0)]);
        assert_eq!(out, vec![p(1.0, 5.0), p(2.0, 2.0), p(0.5, 9.0)]);
    }
}
