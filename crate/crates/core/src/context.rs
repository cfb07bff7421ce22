//! Everything a solver needs about one instance, computed once.

use crate::error::Result;
use crate::field::{HistoryMatrices, ProbabilityMatrix, VectorField};
use crate::geo::{Point, Projection};
use crate::instance::Instance;
use crate::zones::{impute_zones, zone_time_matrix, ZoneIndex, ZoneTimeMatrix};

#[derive(Clone, Debug)]
pub struct RouteContext {
    instance: Instance,
    zones: ZoneIndex,
    zone_times: ZoneTimeMatrix,
    history: HistoryMatrices,
    has_history: bool,
    points: Vec<Point>,
    max_time: f64,
}

impl RouteContext {
    /// Imputes missing zones, builds the zone index and zone travel times,
    /// and derives the history matrices when a field is given.
    pub fn prepare(inst: &Instance, field: Option<&VectorField>) -> Result<Self> {
        let instance = impute_zones(inst)?;
        let zones = ZoneIndex::build(&instance)?;
        let zone_times = zone_time_matrix(&instance, &zones);
        let (history, has_history) = match field {
            Some(f) => (HistoryMatrices::from_field(f, &zones), true),
            None => (HistoryMatrices::uninformed(zones.len()), false),
        };
        let projection = instance_projection(&instance);
        let points = (0..instance.node_count())
            .map(|n| {
                let (lat, lng) = instance.coords(n);
                projection.project(lat, lng)
            })
            .collect();
        let max_time = instance.travel_times().max();
        Ok(RouteContext {
            instance,
            zones,
            zone_times,
            history,
            has_history,
            points,
            max_time,
        })
    }

    /// The instance with every stop zoned.
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn zones(&self) -> &ZoneIndex {
        &self.zones
    }

    pub fn zone_times(&self) -> &ZoneTimeMatrix {
        &self.zone_times
    }

    pub fn history(&self) -> &HistoryMatrices {
        &self.history
    }

    pub fn transition(&self) -> &ProbabilityMatrix {
        &self.history.transition
    }

    pub fn deviation(&self) -> &ProbabilityMatrix {
        &self.history.deviation
    }

    /// False when prepared without a field; H and A are then all 0.5.
    pub fn has_history(&self) -> bool {
        self.has_history
    }

    /// Node coordinates in meters.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Largest entry of the stop travel-time matrix.
    pub fn max_time(&self) -> f64 {
        self.max_time
    }
}

/// Equirectangular projection at the mean latitude of depot and stops.
pub fn instance_projection(inst: &Instance) -> Projection {
    let coords: Vec<(f64, f64)> = (0..inst.node_count()).map(|n| inst.coords(n)).collect();
    Projection::fit(&coords)
}
