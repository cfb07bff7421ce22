//! Seeded synthetic neighborhoods with driver histories.
//!
//! Zones are Gaussian stop clusters spread over a fan a few kilometres out
//! from the depot. Each seed owns a cell of a 32 x 32 grid of neighborhoods
//! 20 km apart, so histories of different seeds can share one field without
//! overlapping.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geo::{Point, Projection};
use crate::instance::{HistoricalRoute, HistoryPoint, Instance, Stop, TravelTimes, DEPOT_ZONE};

pub const SPEED_MPS: f64 = 8.0;
pub const NOISE_RANGE: (f64, f64) = (1.0, 1.2);
pub const HISTORIES_PER_NEIGHBORHOOD: usize = 30;

const GRID: u64 = 32;
const CELL_LAT_DEG: f64 = 0.18;
const CELL_LNG_DEG: f64 = 0.25;
const ORIGIN: (f64, f64) = (40.0, -74.0);
const RADIUS_RANGE: (f64, f64) = (5000.0, 7000.0);
/// Half the angular width of the fan of zones seen from the depot.
const FAN_HALF_WIDTH: f64 = 0.45;
const ANGLE_JITTER: f64 = 0.2;
const STOP_SPREAD_M: f64 = 150.0;
const SWAP_PROB: f64 = 0.15;
const ZONE_KEEP_PROB: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriverPolicy {
    /// Zones by angle around the depot with occasional adjacent swaps.
    Sweep,
    /// Greedy nearest zone.
    Nearest,
}

impl fmt::Display for DriverPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriverPolicy::Sweep => "sweep",
            DriverPolicy::Nearest => "nearest",
        })
    }
}

impl FromStr for DriverPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(DriverPolicy::Sweep),
            "nearest" => Ok(DriverPolicy::Nearest),
            _ => Err(Error::Config(format!("unknown driver policy `{s}`"))),
        }
    }
}

/// An instance, the neighborhood's past routes and the route a driver
/// actually ran on the instance (stop ids, depot at both ends).
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCase {
    pub instance: Instance,
    pub histories: Vec<HistoricalRoute>,
    pub executed: Vec<String>,
}

struct Neighborhood {
    projection: Projection,
    depot: Point,
    centers: Vec<Point>,
    /// +1 counter-clockwise, -1 clockwise.
    direction: f64,
}

impl Neighborhood {
    fn new(seed: u64, n_zones: usize, rng: &mut ChaCha8Rng) -> Self {
        let cell = seed % (GRID * GRID);
        let lat = ORIGIN.0 + (cell / GRID) as f64 * CELL_LAT_DEG;
        let lng = ORIGIN.1 + (cell % GRID) as f64 * CELL_LNG_DEG;
        let projection = Projection::new(lat);
        let depot = projection.project(lat, lng);
        let bearing = rng.gen_range(0.0..TAU);
        let centers = (0..n_zones)
            .map(|i| {
                let jitter = rng.gen_range(-ANGLE_JITTER..ANGLE_JITTER);
                let share = (i as f64 + 0.5 + jitter) / n_zones as f64;
                let a = bearing + FAN_HALF_WIDTH * (2.0 * share - 1.0);
                let r = rng.gen_range(RADIUS_RANGE.0..RADIUS_RANGE.1);
                depot.add(Point::new(a.cos(), a.sin()).scale(r))
            })
            .collect();
        let direction = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        Neighborhood {
            projection,
            depot,
            centers,
            direction,
        }
    }

    fn scatter(&self, zone: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
        let normal = Normal::new(0.0, STOP_SPREAD_M).expect("positive spread");
        let c = self.centers[zone];
        (0..count)
            .map(|_| c.add(Point::new(normal.sample(rng), normal.sample(rng))))
            .collect()
    }

    fn latlng(&self, p: Point) -> (f64, f64) {
        self.projection.unproject(p)
    }
}

fn mean(points: &[Point]) -> Point {
    let s = points.iter().fold(Point::ZERO, |a, &p| a.add(p));
    s.scale(1.0 / points.len() as f64)
}

/// Orders zones (given by centroid) the way a driver under `policy` would.
fn order_zones(
    policy: DriverPolicy,
    hood: &Neighborhood,
    centroids: &[(usize, Point)],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    match policy {
        DriverPolicy::Sweep => {
            let mut by_angle: Vec<(f64, usize)> = centroids
                .iter()
                .map(|&(z, c)| {
                    let d = c.sub(hood.depot);
                    ((hood.direction * d.y.atan2(d.x)).rem_euclid(TAU), z)
                })
                .collect();
            by_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
            // start right after the widest empty sector
            let k = by_angle.len();
            let mut start = 0;
            let mut widest = -1.0;
            for i in 0..k {
                let next = by_angle[(i + 1) % k].0;
                let gap = (next - by_angle[i].0).rem_euclid(TAU);
                let gap = if k == 1 { TAU } else { gap };
                if gap > widest {
                    widest = gap;
                    start = (i + 1) % k;
                }
            }
            let mut seq: Vec<usize> = (0..k).map(|i| by_angle[(start + i) % k].1).collect();
            for i in 0..k.saturating_sub(1) {
                if rng.gen_bool(SWAP_PROB) {
                    seq.swap(i, i + 1);
                }
            }
            seq
        }
        DriverPolicy::Nearest => {
            let mut left: Vec<(usize, Point)> = centroids.to_vec();
            let mut cur = hood.depot;
            let mut seq = Vec::with_capacity(left.len());
            while !left.is_empty() {
                let mut best = 0;
                for (i, (_, c)) in left.iter().enumerate() {
                    if c.distance(cur) < left[best].1.distance(cur) {
                        best = i;
                    }
                }
                let (z, c) = left.remove(best);
                seq.push(z);
                cur = c;
            }
            seq
        }
    }
}

/// Visits `items` greedily by `cost` starting from `from`.
fn nearest_chain<T: Copy>(from: T, mut items: Vec<T>, cost: impl Fn(T, T) -> f64) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    let mut cur = from;
    while !items.is_empty() {
        let mut best = 0;
        for i in 1..items.len() {
            if cost(cur, items[i]) < cost(cur, items[best]) {
                best = i;
            }
        }
        cur = items.remove(best);
        out.push(cur);
    }
    out
}

fn zone_label(z: usize) -> String {
    format!("Z{z:02}")
}

/// Deterministic synthetic instance plus histories for one seed.
pub fn generate_synthetic(
    seed: u64,
    n_zones: usize,
    stops_per_zone: usize,
    policy: DriverPolicy,
) -> Result<SyntheticCase> {
    if n_zones == 0 || stops_per_zone == 0 {
        return Err(Error::Config("need at least one zone and one stop per zone".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hood = Neighborhood::new(seed, n_zones, &mut rng);

    // instance stops in shuffled file order
    let mut placed: Vec<(usize, Point)> = Vec::with_capacity(n_zones * stops_per_zone);
    for z in 0..n_zones {
        placed.extend(hood.scatter(z, stops_per_zone, &mut rng).into_iter().map(|p| (z, p)));
    }
    placed.shuffle(&mut rng);
    let mut nodes = vec![hood.depot];
    nodes.extend(placed.iter().map(|&(_, p)| p));
    let n = nodes.len();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                let noise = rng.gen_range(NOISE_RANGE.0..=NOISE_RANGE.1);
                *cell = (nodes[i].distance(nodes[j]) / SPEED_MPS * noise * 10.0).round() / 10.0;
            }
        }
    }
    let (dlat, dlng) = hood.latlng(hood.depot);
    let stops: Vec<Stop> = placed
        .iter()
        .enumerate()
        .map(|(k, &(z, p))| {
            let (lat, lng) = hood.latlng(p);
            Stop::new(format!("S{:03}", k + 1), lat, lng, Some(&zone_label(z)))
        })
        .collect();
    let instance = Instance::new(
        format!("syn-{seed}"),
        Stop::new("DEPOT", dlat, dlng, None),
        stops,
        TravelTimes::from_rows(&rows)?,
    )?;

    // the executed route on this instance
    let centroids: Vec<(usize, Point)> = (0..n_zones)
        .map(|z| {
            let pts: Vec<Point> = placed.iter().filter(|s| s.0 == z).map(|s| s.1).collect();
            (z, mean(&pts))
        })
        .collect();
    let zseq = order_zones(policy, &hood, &centroids, &mut rng);
    let mut order = vec![0usize];
    for z in zseq {
        let members: Vec<usize> = (1..n).filter(|&k| placed[k - 1].0 == z).collect();
        let last = *order.last().expect("starts at depot");
        order.extend(nearest_chain(last, members, |a, b| rows[a][b]));
    }
    order.push(0);
    let executed = instance.ids_of(&order);

    let histories = (0..HISTORIES_PER_NEIGHBORHOOD)
        .map(|_| history(&hood, instance.id(), stops_per_zone, policy, &mut rng))
        .collect();

    Ok(SyntheticCase {
        instance,
        histories,
        executed,
    })
}

fn history(
    hood: &Neighborhood,
    instance_id: &str,
    stops_per_zone: usize,
    policy: DriverPolicy,
    rng: &mut ChaCha8Rng,
) -> HistoricalRoute {
    let m = hood.centers.len();
    let mut zones: Vec<usize> = (0..m).filter(|_| rng.gen_bool(ZONE_KEEP_PROB)).collect();
    let need = m.min(2);
    while zones.len() < need {
        let z = rng.gen_range(0..m);
        if !zones.contains(&z) {
            zones.push(z);
        }
    }
    zones.sort_unstable();
    let visits: Vec<(usize, Vec<Point>)> = zones
        .iter()
        .map(|&z| {
            let count = rng.gen_range(1..=stops_per_zone);
            (z, hood.scatter(z, count, rng))
        })
        .collect();
    let centroids: Vec<(usize, Point)> = visits.iter().map(|(z, p)| (*z, mean(p))).collect();
    let zseq = order_zones(policy, hood, &centroids, rng);

    let point = |p: Point, zone: &str| {
        let (lat, lng) = hood.latlng(p);
        HistoryPoint {
            lat,
            lng,
            zone_id: Some(zone.to_owned()),
        }
    };
    let mut sequence = vec![point(hood.depot, DEPOT_ZONE)];
    let mut cur = hood.depot;
    for z in zseq {
        let pts = visits.iter().find(|v| v.0 == z).expect("zone visited").1.clone();
        let label = zone_label(z);
        for p in nearest_chain(cur, pts, |a, b| a.distance(b)) {
            sequence.push(point(p, &label));
            cur = p;
        }
    }
    HistoricalRoute {
        instance_ref: Some(instance_id.to_owned()),
        sequence,
    }
}
