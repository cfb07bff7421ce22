//! Objective components and the weighted single and bi-objective functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::context::RouteContext;
use crate::error::{Error, Result};
use crate::field::ProbabilityMatrix;
use crate::zones::ZoneTimeMatrix;

/// Normalized total time, heading deviation, angular deviation and
/// zone-to-zone time of a route.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub tau: f64,
    pub eta: f64,
    pub phi: f64,
    pub lam: f64,
}

/// Non-negative weights of the four components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub total_time: f64,
    pub heading: f64,
    pub angle: f64,
    pub zone_time: f64,
}

impl Weights {
    pub fn new(total_time: f64, heading: f64, angle: f64, zone_time: f64) -> Result<Self> {
        let w = Weights {
            total_time,
            heading,
            angle,
            zone_time,
        };
        if w.as_array().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config(format!("weights must be finite and >= 0, got {w}")));
        }
        Ok(w)
    }

    /// History-aware weights (3, 1, 1, 5).
    pub const DM: Weights = Weights {
        total_time: 3.0,
        heading: 1.0,
        angle: 1.0,
        zone_time: 5.0,
    };

    /// Travel-time-only weights (3, 0, 0, 5).
    pub const BASE: Weights = Weights {
        total_time: 3.0,
        heading: 0.0,
        angle: 0.0,
        zone_time: 5.0,
    };

    /// Bi-objective weights (1, 1, 1, 5); the first applies to raw seconds.
    pub const BI_OBJECTIVE: Weights = Weights {
        total_time: 1.0,
        heading: 1.0,
        angle: 1.0,
        zone_time: 5.0,
    };

    pub fn as_array(&self) -> [f64; 4] {
        [self.total_time, self.heading, self.angle, self.zone_time]
    }

    /// Weighted sum of all four components.
    pub fn combine(&self, c: &Components) -> f64 {
        self.total_time * c.tau + self.heading * c.eta + self.angle * c.phi + self.zone_time * c.lam
    }

    /// Weighted sum of the zone-sequence components only.
    pub fn zone_part(&self, c: &Components) -> f64 {
        self.heading * c.eta + self.angle * c.phi + self.zone_time * c.lam
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.total_time, self.heading, self.angle, self.zone_time
        )
    }
}

impl FromStr for Weights {
    type Err = Error;

    /// Parses four comma-separated numbers, e.g. `3,1,1,5`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "expected 4 comma-separated weights, got `{s}`"
            )));
        }
        let mut v = [0.0; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::Config(format!("`{p}` is not a number")))?;
        }
        Weights::new(v[0], v[1], v[2], v[3])
    }
}

/// All values of a route under one weight vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub components: Components,
    pub f_o: f64,
    /// Raw travel time in seconds.
    pub f1: f64,
    pub f2: f64,
}

/// Total travel time over `(n + 1) * max t`; 0 for an all-zero matrix.
pub fn tau(ctx: &RouteContext, order: &[usize]) -> f64 {
    let arcs = order.len().saturating_sub(1);
    let denom = arcs as f64 * ctx.max_time();
    if denom == 0.0 {
        return 0.0;
    }
    ctx.instance().travel_times().path_time(order) / denom
}

/// Mean of `1 - H` over consecutive customer-zone transitions, divided by
/// the zone count.
pub fn eta(zone_seq: &[usize], transition: &ProbabilityMatrix) -> f64 {
    let m = transition.len();
    if m == 0 {
        return 0.0;
    }
    let sum: f64 = zone_seq
        .windows(2)
        .map(|w| 1.0 - transition.get(w[0], w[1]))
        .sum();
    sum / m as f64
}

/// Sum of `A` over consecutive customer-zone transitions, divided by the
/// zone count.
pub fn phi(zone_seq: &[usize], deviation: &ProbabilityMatrix) -> f64 {
    let m = deviation.len();
    if m == 0 {
        return 0.0;
    }
    let sum: f64 = zone_seq.windows(2).map(|w| deviation.get(w[0], w[1])).sum();
    sum / m as f64
}

/// Zone travel time from the depot through `zone_seq` and back, over the
/// largest zone-matrix entry.
pub fn lam(zone_seq: &[usize], zone_times: &ZoneTimeMatrix) -> f64 {
    let max = zone_times.max();
    if max == 0.0 {
        return 0.0;
    }
    zone_times.tour_time(zone_seq) / max
}

/// Components that depend only on the zone sequence; `tau` is left at 0.
pub fn zone_components(ctx: &RouteContext, zone_seq: &[usize]) -> Components {
    Components {
        tau: 0.0,
        eta: eta(zone_seq, ctx.transition()),
        phi: phi(zone_seq, ctx.deviation()),
        lam: lam(zone_seq, ctx.zone_times()),
    }
}

pub fn components(ctx: &RouteContext, order: &[usize]) -> Components {
    let zseq = ctx.zones().zone_sequence(order);
    Components {
        tau: tau(ctx, order),
        ..zone_components(ctx, &zseq)
    }
}

pub fn f_single(ctx: &RouteContext, order: &[usize], w: &Weights) -> f64 {
    w.combine(&components(ctx, order))
}

/// `(f1, f2)`: raw seconds and the weighted history/zone part.
pub fn f_pair(ctx: &RouteContext, order: &[usize], w: &Weights) -> (f64, f64) {
    let f1 = ctx.instance().travel_times().path_time(order);
    (f1, w.zone_part(&components(ctx, order)))
}

pub fn evaluate(ctx: &RouteContext, order: &[usize], w: &Weights) -> ObjectiveValue {
    let c = components(ctx, order);
    ObjectiveValue {
        components: c,
        f_o: w.combine(&c),
        f1: ctx.instance().travel_times().path_time(order),
        f2: w.zone_part(&c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, Stop, TravelTimes};

    fn ctx(zones: &[&str], rows: Vec<Vec<f64>>) -> RouteContext {
        let stops = zones
            .iter()
            .enumerate()
            .map(|(i, z)| Stop::new(format!("s{i}"), 40.0 + i as f64 * 1e-3, -74.0, Some(z)))
            .collect();
        let inst = Instance::new(
            "o",
            Stop::new("d", 40.0, -74.0, None),
            stops,
            TravelTimes::from_rows(&rows).unwrap(),
        )
        .unwrap();
        RouteContext::prepare(&inst, None).unwrap()
    }

    fn uniform(n: usize, v: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { v }).collect())
            .collect()
    }

    #[test]
    fn weights_parse() {
        let w: Weights = "3,1,1,5".parse().unwrap();
        assert_eq!(w, Weights::DM);
        assert_eq!(w.to_string().parse::<Weights>().unwrap(), w);
        assert!("3,1,1".parse::<Weights>().is_err());
        assert!("3,1,x,5".parse::<Weights>().is_err());
        assert!("3,-1,1,5".parse::<Weights>().is_err());
    }

    #[test]
    fn tau_at_matrix_maximum_is_one() {
        let c = ctx(&["A", "A", "B"], uniform(4, 7.0));
        assert!((tau(&c, &[0, 1, 2, 3, 0]) - 1.0).abs() < 1e-15);
        let z = ctx(&["A"], uniform(2, 0.0));
        assert_eq!(tau(&z, &[0, 1, 0]), 0.0);
    }

    #[test]
    fn tau_drops_with_a_faster_arc() {
        let mut rows = uniform(4, 7.0);
        let c = ctx(&["A", "A", "A"], rows.clone());
        let before = tau(&c, &[0, 1, 2, 3, 0]);
        rows[1][2] = 3.0;
        let c = ctx(&["A", "A", "A"], rows);
        assert!(tau(&c, &[0, 1, 2, 3, 0]) < before);
    }

    #[test]
    fn uninformed_eta_and_phi() {
        let c = ctx(&["A", "B", "C", "D"], uniform(5, 1.0));
        let seq = [0, 1, 2, 3];
        assert!((eta(&seq, c.transition()) - 3.0 * 0.5 / 4.0).abs() < 1e-15);
        assert!((phi(&seq, c.deviation()) - 3.0 * 0.5 / 4.0).abs() < 1e-15);
        assert_eq!(eta(&[2], c.transition()), 0.0);
    }

    #[test]
    fn hand_evaluated_phi_and_eta() {
        let a = ProbabilityMatrix::from_rows(&[
            vec![0.0, 0.5, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert!((phi(&[0, 1, 2], &a) - 0.5 / 3.0).abs() < 1e-15);
        let ones = ProbabilityMatrix::from_rows(&[vec![1.0; 3], vec![1.0; 3], vec![1.0; 3]]);
        assert_eq!(eta(&[0, 1, 2], &ones), 0.0);
        assert!((phi(&[0, 1, 2], &ones) - 2.0 / 3.0).abs() < 1e-15);
        let zeros = ProbabilityMatrix::from_rows(&[vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]]);
        assert!((eta(&[2, 0, 1], &zeros) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_zone_lambda_uses_depot_legs() {
        // depot -> A: (3 + 5) / 3, A -> depot: (4 + 2) / 3, max = 8/3
        let rows = vec![vec![0., 3., 5.], vec![4., 0., 1.], vec![2., 9., 0.]];
        let c = ctx(&["A", "A"], rows);
        let m = c.zone_times();
        assert!((m.get(1, 0) - 8.0 / 3.0).abs() < 1e-12);
        assert!((lam(&[0], m) - (8.0 / 3.0 + 2.0) / (8.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn lambda_counts_transitions_at_the_maximum() {
        let c = ctx(&["A", "B", "C"], uniform(4, 6.0));
        assert!((lam(&[0, 1, 2], c.zone_times()) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn base_weights_ignore_history_parts() {
        let c = ctx(&["A", "B", "A"], uniform(4, 2.0));
        let order = [0, 1, 3, 2, 0];
        let comp = components(&c, &order);
        let base = f_single(&c, &order, &Weights::BASE);
        assert!((base - (3.0 * comp.tau + 5.0 * comp.lam)).abs() < 1e-12);
        let zero = Weights::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(f_single(&c, &order, &zero), 0.0);
        let (f1, f2) = f_pair(&c, &order, &Weights::BI_OBJECTIVE);
        assert_eq!(f1, 8.0);
        assert!((f2 - (comp.eta + comp.phi + 5.0 * comp.lam)).abs() < 1e-12);
    }
}
