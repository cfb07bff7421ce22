//! Adapter for a locally provided directory in the public last-mile
//! challenge layout: `route_data.json`, `travel_times.json` and
//! `actual_sequences.json`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::instance::{
    parse_json, read_text, HistoricalRoute, HistoryPoint, Instance, Stop, TravelTimes, DEPOT_ZONE,
};

#[derive(Deserialize)]
struct RouteRecord {
    stops: BTreeMap<String, StopRecord>,
}

#[derive(Deserialize)]
struct StopRecord {
    lat: f64,
    lng: f64,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    zone_id: Option<String>,
}

#[derive(Deserialize)]
struct ActualRecord {
    actual: BTreeMap<String, usize>,
}

/// One route of the dataset with its executed stop order.
#[derive(Clone, Debug, PartialEq)]
pub struct AmazonRoute {
    pub instance: Instance,
    /// Stop ids, depot at both ends.
    pub executed: Vec<String>,
}

impl AmazonRoute {
    /// The executed route as a history entry.
    pub fn as_history(&self) -> HistoricalRoute {
        let nodes = self
            .instance
            .nodes_of(&self.executed[..self.executed.len() - 1])
            .expect("executed ids belong to the instance");
        HistoricalRoute {
            instance_ref: Some(self.instance.id().to_owned()),
            sequence: nodes
                .into_iter()
                .map(|n| {
                    let s = self.instance.node(n);
                    HistoryPoint {
                        lat: s.lat,
                        lng: s.lng,
                        zone_id: s.zone_id.clone(),
                    }
                })
                .collect(),
        }
    }
}

fn convert(
    id: &str,
    route: RouteRecord,
    times: &BTreeMap<String, BTreeMap<String, f64>>,
    actual: &BTreeMap<String, usize>,
) -> Result<AmazonRoute> {
    let mut depot = None;
    let mut stops = Vec::new();
    for (sid, s) in route.stops {
        if s.kind == "Station" {
            depot = Some(Stop::new(sid, s.lat, s.lng, None));
        } else {
            let zone = s.zone_id.filter(|z| !z.is_empty() && z != "nan" && z != DEPOT_ZONE);
            stops.push(Stop {
                id: sid,
                lat: s.lat,
                lng: s.lng,
                zone_id: zone,
            });
        }
    }
    let depot = depot.ok_or_else(|| Error::schema(format!("{id}.stops"), "no Station stop"))?;
    let ids: Vec<&str> = std::iter::once(depot.id.as_str())
        .chain(stops.iter().map(|s| s.id.as_str()))
        .collect();
    let rows = ids
        .iter()
        .map(|a| {
            ids.iter()
                .map(|b| {
                    if a == b {
                        return Ok(0.0);
                    }
                    times
                        .get(*a)
                        .and_then(|r| r.get(*b))
                        .copied()
                        .ok_or_else(|| Error::schema(format!("{id}.travel_times.{a}.{b}"), "missing"))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let instance = Instance::new(id, depot, stops, TravelTimes::from_rows(&rows)?)?;
    let mut by_pos: Vec<(usize, &String)> = actual.iter().map(|(s, &p)| (p, s)).collect();
    by_pos.sort();
    let mut executed: Vec<String> = by_pos.into_iter().map(|(_, s)| s.clone()).collect();
    executed.push(instance.depot().id.clone());
    Ok(AmazonRoute { instance, executed })
}

/// Reads every route of the directory, in route-id order.
pub fn load_amazon_dir(dir: impl AsRef<Path>) -> Result<Vec<AmazonRoute>> {
    let dir = dir.as_ref();
    let routes: BTreeMap<String, RouteRecord> = parse_json(&read_text(&dir.join("route_data.json"))?)?;
    let times: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>> =
        parse_json(&read_text(&dir.join("travel_times.json"))?)?;
    let actual: BTreeMap<String, ActualRecord> =
        parse_json(&read_text(&dir.join("actual_sequences.json"))?)?;
    routes
        .into_iter()
        .map(|(id, route)| {
            let t = times
                .get(&id)
                .ok_or_else(|| Error::schema(format!("travel_times.{id}"), "missing route"))?;
            let a = actual
                .get(&id)
                .ok_or_else(|| Error::schema(format!("actual_sequences.{id}"), "missing route"))?;
            convert(&id, route, t, &a.actual)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_a_two_stop_route() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("route_data.json"),
            r#"{"R1":{"station_code":"X","stops":{
                "AA":{"lat":47.6,"lng":-122.3,"type":"Station","zone_id":null},
                "BB":{"lat":47.61,"lng":-122.3,"type":"Dropoff","zone_id":"A-1.1a"},
                "CC":{"lat":47.62,"lng":-122.3,"type":"Dropoff","zone_id":null}}}}"#,
        )
        .unwrap();
        std::fs::write(
            dir.path().join("travel_times.json"),
            r#"{"R1":{"AA":{"AA":0,"BB":10,"CC":20},"BB":{"AA":11,"BB":0,"CC":5},"CC":{"AA":21,"BB":6,"CC":0}}}"#,
        )
        .unwrap();
        std::fs::write(
            dir.path().join("actual_sequences.json"),
            r#"{"R1":{"actual":{"AA":0,"CC":1,"BB":2}}}"#,
        )
        .unwrap();
        let routes = load_amazon_dir(dir.path()).unwrap();
        assert_eq!(routes.len(), 1);
        let r = &routes[0];
        assert_eq!(r.instance.n_stops(), 2);
        assert_eq!(r.instance.t(1, 2), 5.0);
        assert_eq!(r.executed, ["AA", "CC", "BB", "AA"]);
        assert_eq!(r.as_history().sequence.len(), 3);
    }
}
