//! Visual attractiveness of a single route.
//!
//! Routes are full orders with the depot at both ends. Compactness uses
//! travel times; crossings and bending use projected coordinates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::context::RouteContext;
use crate::error::{Error, Result};
use crate::geo::{angle_between, segments_properly_intersect, Point};
use crate::instance::TravelTimes;
use crate::objective::{components, Weights};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VisualMetric {
    Adc,
    Cdc,
    Nc,
    Be,
}

impl VisualMetric {
    pub const ALL: [VisualMetric; 4] = [
        VisualMetric::Adc,
        VisualMetric::Cdc,
        VisualMetric::Nc,
        VisualMetric::Be,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VisualMetric::Adc => "adc",
            VisualMetric::Cdc => "cdc",
            VisualMetric::Nc => "nc",
            VisualMetric::Be => "be",
        }
    }
}

impl fmt::Display for VisualMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VisualMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VisualMetric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown visual metric `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisualReport {
    pub adc: f64,
    pub cdc: f64,
    pub nc: usize,
    pub be: f64,
}

/// Mean leg time over the mean of the `ceil(0.2 L)` longest legs.
pub fn avg_distance_compactness(tt: &TravelTimes, order: &[usize]) -> Result<f64> {
    let mut legs: Vec<f64> = order.windows(2).map(|w| tt.get(w[0], w[1])).collect();
    if legs.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "compactness needs at least 2 legs, route has {}",
            legs.len()
        )));
    }
    let mean = legs.iter().sum::<f64>() / legs.len() as f64;
    let top = ((0.2 * legs.len() as f64).ceil() as usize).max(1);
    legs.sort_by(|a, b| b.total_cmp(a));
    let top_mean = legs[..top].iter().sum::<f64>() / top as f64;
    if top_mean == 0.0 {
        return Ok(1.0);
    }
    Ok(mean / top_mean)
}

/// Stop at the 1-based median position `floor((n + 1) / 2)` of the stops.
pub fn center_stop(order: &[usize]) -> Option<usize> {
    let stops = inner(order);
    if stops.is_empty() {
        return None;
    }
    Some(stops[(stops.len() + 1) / 2 - 1])
}

/// Sum of travel times from every stop to the center stop.
pub fn center_distance_compactness(tt: &TravelTimes, order: &[usize]) -> f64 {
    let Some(c) = center_stop(order) else {
        return 0.0;
    };
    inner(order).iter().map(|&i| tt.get(i, c)).sum()
}

/// Pairs of arcs of the closed route whose segments properly intersect.
pub fn crossing_count(points: &[Point], order: &[usize]) -> usize {
    let arcs: Vec<(Point, Point)> = order
        .windows(2)
        .map(|w| (points[w[0]], points[w[1]]))
        .collect();
    let k = arcs.len();
    let mut count = 0;
    for i in 0..k {
        for j in i + 2..k {
            // first and last arcs meet at the depot
            if i == 0 && j == k - 1 {
                continue;
            }
            if segments_properly_intersect(arcs[i].0, arcs[i].1, arcs[j].0, arcs[j].1) {
                count += 1;
            }
        }
    }
    count
}

fn turning_sum(pts: &[Point]) -> f64 {
    pts.windows(3)
        .map(|w| angle_between(w[1].sub(w[0]), w[2].sub(w[1])).unwrap_or(0.0))
        .sum()
}

/// Turning angles along an open path divided by its point count.
pub fn path_bending_energy(pts: &[Point]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    turning_sum(pts) / pts.len() as f64
}

/// Turning angles at every interior position of the closed route divided by
/// the node count (stops plus depot).
pub fn bending_energy(points: &[Point], order: &[usize]) -> f64 {
    if order.len() < 2 {
        return 0.0;
    }
    let pts: Vec<Point> = order.iter().map(|&n| points[n]).collect();
    turning_sum(&pts) / (order.len() - 1) as f64
}

fn inner(order: &[usize]) -> &[usize] {
    if order.len() < 2 {
        &[]
    } else {
        &order[1..order.len() - 1]
    }
}

pub fn visual_report(ctx: &RouteContext, order: &[usize]) -> Result<VisualReport> {
    let tt = ctx.instance().travel_times();
    Ok(VisualReport {
        adc: avg_distance_compactness(tt, order)?,
        cdc: center_distance_compactness(tt, order),
        nc: crossing_count(ctx.points(), order),
        be: bending_energy(ctx.points(), order),
    })
}

/// Raw value of one metric.
pub fn metric_value(ctx: &RouteContext, order: &[usize], metric: VisualMetric) -> Result<f64> {
    let tt = ctx.instance().travel_times();
    Ok(match metric {
        VisualMetric::Adc => avg_distance_compactness(tt, order)?,
        VisualMetric::Cdc => center_distance_compactness(tt, order),
        VisualMetric::Nc => crossing_count(ctx.points(), order) as f64,
        VisualMetric::Be => bending_energy(ctx.points(), order),
    })
}

/// Divisor applied to a raw metric before it enters the objective.
/// Center distance and crossings are scaled by their value on a reference
/// route; the other two are used as is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisualScale {
    pub metric: VisualMetric,
    pub divisor: f64,
}

impl VisualScale {
    pub fn unit(metric: VisualMetric) -> Self {
        VisualScale {
            metric,
            divisor: 1.0,
        }
    }

    pub fn from_reference(ctx: &RouteContext, reference: &[usize], metric: VisualMetric) -> Result<Self> {
        let divisor = match metric {
            VisualMetric::Cdc | VisualMetric::Nc => {
                let v = metric_value(ctx, reference, metric)?;
                if v > 0.0 {
                    v
                } else {
                    1.0
                }
            }
            VisualMetric::Adc | VisualMetric::Be => 1.0,
        };
        Ok(VisualScale { metric, divisor })
    }
}

/// `total_time * tau + zone_time * lam + visual_weight * v`, where `v` is the
/// scaled metric, subtracted for compactness `adc`.
pub fn visual_objective(
    ctx: &RouteContext,
    order: &[usize],
    scale: &VisualScale,
    weights: &Weights,
    visual_weight: f64,
) -> Result<f64> {
    let c = components(ctx, order);
    let v = metric_value(ctx, order, scale.metric)? / scale.divisor;
    let signed = if scale.metric == VisualMetric::Adc { -v } else { v };
    Ok(weights.total_time * c.tau + weights.zone_time * c.lam + visual_weight * signed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn line_times(legs: &[f64]) -> (TravelTimes, Vec<usize>) {
        // a path 0 -> 1 -> ... -> k with the given leg times
        let k = legs.len();
        let mut rows = vec![vec![1.0; k + 1]; k + 1];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for (i, &t) in legs.iter().enumerate() {
            rows[i][i + 1] = t;
        }
        (TravelTimes::from_rows(&rows).unwrap(), (0..=k).collect())
    }

    #[test]
    fn adc_examples() {
        let (tt, order) = line_times(&[4.0, 4.0, 4.0]);
        assert_eq!(avg_distance_compactness(&tt, &order).unwrap(), 1.0);
        let (tt, order) = line_times(&[1.0, 1.0, 1.0, 1.0, 6.0]);
        assert!((avg_distance_compactness(&tt, &order).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let (tt, order) = line_times(&[2.0, 2.0, 2.0, 2.0, 12.0]);
        assert!((avg_distance_compactness(&tt, &order).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let (tt, order) = line_times(&[3.0]);
        assert!(matches!(
            avg_distance_compactness(&tt, &order),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn cdc_examples() {
        let rows = vec![vec![0.0, 7.0], vec![7.0, 0.0]];
        let tt = TravelTimes::from_rows(&rows).unwrap();
        assert_eq!(center_distance_compactness(&tt, &[0, 1, 0]), 0.0);

        // stops 1, 2, 3 on a line; 2 is the center
        let rows = vec![
            vec![0., 1., 1., 1.],
            vec![1., 0., 5., 10.],
            vec![1., 5., 0., 5.],
            vec![1., 10., 5., 0.],
        ];
        let tt = TravelTimes::from_rows(&rows).unwrap();
        assert_eq!(center_stop(&[0, 1, 2, 3, 0]), Some(2));
        assert_eq!(center_distance_compactness(&tt, &[0, 1, 2, 3, 0]), 10.0);
        assert_eq!(center_distance_compactness(&tt, &[0, 3, 2, 1, 0]), 10.0);
        assert_eq!(center_stop(&[0, 1, 2, 3, 4, 0]), Some(2));
    }

    #[test]
    fn crossing_examples() {
        // depot at the origin, unit square corners
        let pts = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        assert_eq!(crossing_count(&pts, &[0, 1, 2, 3, 0]), 0);
        // (0,0) -> (1,1) -> (1,0) -> (0,1) -> (0,0)
        assert_eq!(crossing_count(&pts, &[0, 2, 1, 3, 0]), 1);
        let dup = [p(0., 0.), p(1., 1.), p(1., 1.), p(0., 1.)];
        assert_eq!(crossing_count(&dup, &[0, 1, 2, 3, 0]), 0);
    }

    #[test]
    fn bending_examples() {
        let straight = [p(0., 0.), p(1., 0.), p(2., 0.), p(3., 0.)];
        assert_eq!(path_bending_energy(&straight), 0.0);
        let turn = [p(0., 0.), p(1., 0.), p(1., 1.)];
        assert!((path_bending_energy(&turn) - FRAC_PI_2 / 3.0).abs() < 1e-15);
        let back = [p(0., 0.), p(1., 0.), p(0., 0.)];
        assert!((path_bending_energy(&back) - PI / 3.0).abs() < 1e-15);
        // out and back: one reversal over two nodes
        let pts = [p(0., 0.), p(1., 0.)];
        assert!((bending_energy(&pts, &[0, 1, 0]) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in VisualMetric::ALL {
            assert_eq!(m.name().parse::<VisualMetric>().unwrap(), m);
        }
        assert!("xyz".parse::<VisualMetric>().is_err());
    }
}
