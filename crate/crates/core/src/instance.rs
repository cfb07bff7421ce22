//! Instance data model, file formats and route feasibility.
//!
//! Node indices are shared across the crate: node `0` is the depot and
//! nodes `1..=n` are the stops in file order. The travel-time matrix is
//! indexed the same way.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Components;

/// Zone label reserved for the depot. Never valid on a stop.
pub const DEPOT_ZONE: &str = "__DEPOT__";

pub const DEPOT: usize = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub id: String,
    pub lat: f64,
    pub lng: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone_id: Option<String>,
}

impl Stop {
    pub fn new(id: impl Into<String>, lat: f64, lng: f64, zone_id: Option<&str>) -> Self {
        Stop {
            id: id.into(),
            lat,
            lng,
            zone_id: zone_id.map(str::to_owned),
        }
    }
}

/// Dense square matrix of travel times in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct TravelTimes {
    dim: usize,
    data: Vec<f64>,
}

impl TravelTimes {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "travel_time row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(TravelTimes { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.dim + to]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Travel time along consecutive nodes of `order`.
    pub fn path_time(&self, order: &[usize]) -> f64 {
        order.windows(2).map(|w| self.get(w[0], w[1])).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    id: String,
    depot: Stop,
    stops: Vec<Stop>,
    travel_time: TravelTimes,
}

impl Instance {
    /// Builds and validates an instance. The depot's zone is forced to
    /// [`DEPOT_ZONE`].
    pub fn new(
        id: impl Into<String>,
        mut depot: Stop,
        stops: Vec<Stop>,
        travel_time: TravelTimes,
    ) -> Result<Self> {
        depot.zone_id = Some(DEPOT_ZONE.to_owned());
        check_coords("depot", &depot)?;
        let mut ids = HashSet::with_capacity(stops.len() + 1);
        ids.insert(depot.id.as_str());
        for (i, stop) in stops.iter().enumerate() {
            let field = format!("stops[{i}]");
            check_coords(&field, stop)?;
            if !ids.insert(stop.id.as_str()) {
                return Err(Error::schema(
                    format!("{field}.id"),
                    format!("duplicate id `{}`", stop.id),
                ));
            }
            if stop.zone_id.as_deref() == Some(DEPOT_ZONE) {
                return Err(Error::schema(
                    format!("{field}.zone_id"),
                    format!("`{DEPOT_ZONE}` is reserved for the depot"),
                ));
            }
        }
        if !stops.iter().any(|s| s.zone_id.is_some()) {
            return Err(Error::schema("stops", "no stop carries a zone_id"));
        }
        let expected = stops.len() + 1;
        if travel_time.dim() != expected {
            return Err(Error::Dimension(format!(
                "travel_time is {d}x{d} but {} stops plus depot need {expected}x{expected}",
                stops.len(),
                d = travel_time.dim(),
            )));
        }
        for i in 0..expected {
            for j in 0..expected {
                let t = travel_time.get(i, j);
                if !t.is_finite() || t < 0.0 {
                    return Err(Error::schema(
                        format!("travel_time[{i}][{j}]"),
                        format!("must be finite and non-negative, got {t}"),
                    ));
                }
                if i == j && t != 0.0 {
                    return Err(Error::schema(
                        format!("travel_time[{i}][{i}]"),
                        "diagonal must be zero",
                    ));
                }
            }
        }
        Ok(Instance {
            id: id.into(),
            depot,
            stops,
            travel_time,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn depot(&self) -> &Stop {
        &self.depot
    }

    pub fn stops(&self) -> &[Stop] {
        &self.stops
    }

    /// Number of stops, depot excluded.
    pub fn n_stops(&self) -> usize {
        self.stops.len()
    }

    pub fn node_count(&self) -> usize {
        self.stops.len() + 1
    }

    pub fn travel_times(&self) -> &TravelTimes {
        &self.travel_time
    }

    #[inline]
    pub fn t(&self, from: usize, to: usize) -> f64 {
        self.travel_time.get(from, to)
    }

    pub fn node(&self, node: usize) -> &Stop {
        if node == DEPOT {
            &self.depot
        } else {
            &self.stops[node - 1]
        }
    }

    pub fn coords(&self, node: usize) -> (f64, f64) {
        let s = self.node(node);
        (s.lat, s.lng)
    }

    /// Replaces stop zone labels; used by imputation.
    pub(crate) fn with_zones(&self, zones: Vec<Option<String>>) -> Instance {
        let mut out = self.clone();
        for (stop, zone) in out.stops.iter_mut().zip(zones) {
            stop.zone_id = zone;
        }
        out
    }

    /// Node index of every id in `ids`.
    pub fn nodes_of(&self, ids: &[String]) -> Result<Vec<usize>> {
        let index: HashMap<&str, usize> = std::iter::once(self.depot.id.as_str())
            .chain(self.stops.iter().map(|s| s.id.as_str()))
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        ids.iter()
            .map(|id| {
                index
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| Error::IncomparableRoutes(format!("unknown stop id `{id}`")))
            })
            .collect()
    }

    pub fn ids_of(&self, order: &[usize]) -> Vec<String> {
        order.iter().map(|&n| self.node(n).id.clone()).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Instance> {
        let raw: InstanceFile = parse_json(text)?;
        raw.into_instance()
    }

    pub fn to_json_string(&self) -> String {
        let raw = InstanceFile {
            id: self.id.clone(),
            depot: DepotRecord {
                id: self.depot.id.clone(),
                lat: self.depot.lat,
                lng: self.depot.lng,
            },
            stops: self.stops.clone(),
            travel_time: self.travel_time.rows(),
        };
        serde_json::to_string(&raw).expect("instance serializes")
    }
}

fn check_coords(field: &str, stop: &Stop) -> Result<()> {
    if !(-90.0..=90.0).contains(&stop.lat) {
        return Err(Error::schema(
            format!("{field}.lat"),
            format!("{} is outside [-90, 90]", stop.lat),
        ));
    }
    if !(-180.0..=180.0).contains(&stop.lng) {
        return Err(Error::schema(
            format!("{field}.lng"),
            format!("{} is outside [-180, 180]", stop.lng),
        ));
    }
    Ok(())
}

pub(crate) fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Json(inner)
        } else {
            Error::schema(path, inner.to_string())
        }
    })
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct DepotRecord {
    id: String,
    lat: f64,
    lng: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    id: String,
    depot: DepotRecord,
    stops: Vec<Stop>,
    travel_time: Vec<Vec<f64>>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<Instance> {
        let depot = Stop {
            id: self.depot.id,
            lat: self.depot.lat,
            lng: self.depot.lng,
            zone_id: None,
        };
        let travel_time = TravelTimes::from_rows(&self.travel_time)?;
        Instance::new(self.id, depot, self.stops, travel_time)
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json_str(&read_text(path.as_ref())?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &inst.to_json_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub lat: f64,
    pub lng: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone_id: Option<String>,
}

/// An executed route from the past, depot first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoricalRoute {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_ref: Option<String>,
    pub sequence: Vec<HistoryPoint>,
}

impl HistoricalRoute {
    /// Every zone label occupies a single contiguous block. Unlabeled
    /// entries are ignored.
    pub fn is_zone_contiguous(&self) -> bool {
        let mut closed: HashSet<&str> = HashSet::new();
        let mut current: Option<&str> = None;
        for zone in self.sequence.iter().filter_map(|p| p.zone_id.as_deref()) {
            if current == Some(zone) {
                continue;
            }
            if let Some(prev) = current {
                closed.insert(prev);
            }
            if closed.contains(zone) {
                return false;
            }
            current = Some(zone);
        }
        true
    }
}

pub fn histories_from_json_str(text: &str) -> Result<Vec<HistoricalRoute>> {
    let routes: Vec<HistoricalRoute> = parse_json(text)?;
    for (i, route) in routes.iter().enumerate() {
        if !route.is_zone_contiguous() {
            return Err(Error::schema(
                format!("[{i}].sequence"),
                "zone visits are not contiguous",
            ));
        }
    }
    Ok(routes)
}

pub fn load_histories(path: impl AsRef<Path>) -> Result<Vec<HistoricalRoute>> {
    histories_from_json_str(&read_text(path.as_ref())?)
}

pub fn save_histories(routes: &[HistoricalRoute], path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string(routes).expect("histories serialize");
    write_text(path.as_ref(), &text)
}

/// A visiting order written by stop id, depot at both ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_id: Option<String>,
    pub order: Vec<String>,
}

pub fn load_route(path: impl AsRef<Path>) -> Result<RouteFile> {
    parse_json(&read_text(path.as_ref())?)
}

pub fn save_route(route: &RouteFile, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string(route).expect("route serializes");
    write_text(path.as_ref(), &text)
}

/// A tour as node indices: depot, every stop once, depot.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteSolution {
    pub order: Vec<usize>,
    /// Raw travel time in seconds.
    pub total_time: f64,
    pub components: Components,
}

impl RouteSolution {
    pub fn new(inst: &Instance, order: Vec<usize>) -> Self {
        let total_time = inst.travel_times().path_time(&order);
        RouteSolution {
            order,
            total_time,
            components: Components::default(),
        }
    }

    /// Stops only, in visiting order.
    pub fn stops(&self) -> &[usize] {
        let n = self.order.len();
        if n < 2 {
            &[]
        } else {
            &self.order[1..n - 1]
        }
    }
}

/// Checks the tour constraints: a permutation of all stops bracketed by the
/// depot, with each zone visited as one contiguous block.
pub fn validate_solution(inst: &Instance, sol: &RouteSolution) -> bool {
    let order = &sol.order;
    let n = inst.n_stops();
    if order.len() != n + 2 || order[0] != DEPOT || order[n + 1] != DEPOT {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for &node in &order[1..=n] {
        if node == DEPOT || node > n || seen[node] {
            return false;
        }
        seen[node] = true;
    }
    let mut span: HashMap<&str, (usize, usize, usize)> = HashMap::new();
    for (pos, &node) in order[1..=n].iter().enumerate() {
        if let Some(z) = inst.node(node).zone_id.as_deref() {
            let e = span.entry(z).or_insert((pos, pos, 0));
            e.1 = pos;
            e.2 += 1;
        }
    }
    span.values().all(|&(lo, hi, count)| hi - lo + 1 == count)
}
