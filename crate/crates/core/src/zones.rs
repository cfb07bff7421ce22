//! Zone bookkeeping: imputation of missing labels, zone membership,
//! centroids and the zone-to-zone travel-time matrix.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, DEPOT};

/// Gives every unlabeled stop the zone of the labeled stop with the
/// shortest travel time *from* that labeled stop. Ties go to the lower
/// stop index.
pub fn impute_zones(inst: &Instance) -> Result<Instance> {
    let labeled: Vec<usize> = (1..=inst.n_stops())
        .filter(|&node| inst.node(node).zone_id.is_some())
        .collect();
    if labeled.is_empty() {
        return Err(Error::Imputation("no stop carries a zone_id".into()));
    }
    if labeled.len() == inst.n_stops() {
        return Ok(inst.clone());
    }
    let zones = (1..=inst.n_stops())
        .map(|node| {
            let own = &inst.node(node).zone_id;
            if own.is_some() {
                return own.clone();
            }
            let mut best = labeled[0];
            for &cand in &labeled[1..] {
                if inst.t(cand, node) < inst.t(best, node) {
                    best = cand;
                }
            }
            inst.node(best).zone_id.clone()
        })
        .collect();
    Ok(inst.with_zones(zones))
}

/// Arithmetic mean of (lat, lng) pairs.
pub fn centroid(coords: &[(f64, f64)]) -> (f64, f64) {
    let n = coords.len() as f64;
    let (lat, lng) = coords
        .iter()
        .fold((0.0, 0.0), |(a, b), &(lat, lng)| (a + lat, b + lng));
    (lat / n, lng / n)
}

/// Partition of the stops into zones. Zones are numbered `0..m` in order of
/// first appearance in the stop list; the depot belongs to none of them.
#[derive(Clone, Debug, PartialEq)]
pub struct ZoneIndex {
    labels: Vec<String>,
    members: Vec<Vec<usize>>,
    zone_of: Vec<usize>,
    centroids: Vec<(f64, f64)>,
}

impl ZoneIndex {
    pub fn build(inst: &Instance) -> Result<Self> {
        let mut lookup: HashMap<&str, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut zone_of = vec![usize::MAX; inst.node_count()];
        for node in 1..=inst.n_stops() {
            let stop = inst.node(node);
            let label = stop.zone_id.as_deref().ok_or_else(|| {
                Error::Config(format!("stop `{}` has no zone; impute zones first", stop.id))
            })?;
            let z = *lookup.entry(label).or_insert_with(|| {
                labels.push(label.to_owned());
                members.push(Vec::new());
                labels.len() - 1
            });
            members[z].push(node);
            zone_of[node] = z;
        }
        let centroids = members
            .iter()
            .map(|nodes| {
                let coords: Vec<_> = nodes.iter().map(|&n| inst.coords(n)).collect();
                centroid(&coords)
            })
            .collect();
        Ok(ZoneIndex {
            labels,
            members,
            zone_of,
            centroids,
        })
    }

    /// Number of customer zones `m`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn members(&self, zone: usize) -> &[usize] {
        &self.members[zone]
    }

    pub fn zone_of(&self, node: usize) -> usize {
        debug_assert_ne!(node, DEPOT);
        self.zone_of[node]
    }

    pub fn centroids(&self) -> &[(f64, f64)] {
        &self.centroids
    }

    /// Zones in the order a tour enters them, depot excluded.
    pub fn zone_sequence(&self, order: &[usize]) -> Vec<usize> {
        let mut seq: Vec<usize> = Vec::with_capacity(self.len());
        for &node in order.iter().filter(|&&n| n != DEPOT) {
            let z = self.zone_of[node];
            if seq.last() != Some(&z) {
                seq.push(z);
            }
        }
        seq
    }
}

/// Zone-to-zone travel times. Customer zones use indices `0..m`; the depot
/// is treated as a one-stop zone at index `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZoneTimeMatrix {
    m: usize,
    data: Vec<f64>,
    max: f64,
}

impl ZoneTimeMatrix {
    pub fn zones(&self) -> usize {
        self.m
    }

    pub fn depot_index(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * (self.m + 1) + to]
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// Sum of entries along depot -> `seq` -> depot.
    pub fn tour_time(&self, seq: &[usize]) -> f64 {
        let d = self.m;
        let mut prev = d;
        let mut total = 0.0;
        for &z in seq {
            total += self.get(prev, z);
            prev = z;
        }
        total + self.get(prev, d)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.m + 1).map(<[f64]>::to_vec).collect()
    }
}

/// `M[g][h]` is the sum of `t[k][l]` over `k` in zone `g` and `l` in zone
/// `h`, divided by `|g| + |h|`. The diagonal is zero.
pub fn zone_time_matrix(inst: &Instance, zi: &ZoneIndex) -> ZoneTimeMatrix {
    let m = zi.len();
    let depot = [DEPOT];
    let group = |g: usize| -> &[usize] {
        if g == m {
            &depot
        } else {
            zi.members(g)
        }
    };
    let mut data = vec![0.0; (m + 1) * (m + 1)];
    for g in 0..=m {
        for h in 0..=m {
            if g == h {
                continue;
            }
            let (from, to) = (group(g), group(h));
            let sum: f64 = from
                .iter()
                .flat_map(|&k| to.iter().map(move |&l| inst.t(k, l)))
                .sum();
            data[g * (m + 1) + h] = sum / (from.len() + to.len()) as f64;
        }
    }
    let max = data.iter().copied().fold(0.0, f64::max);
    ZoneTimeMatrix { m, data, max }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Stop, TravelTimes};

    fn instance(zones: &[Option<&str>], rows: Vec<Vec<f64>>) -> Instance {
        let stops = zones
            .iter()
            .enumerate()
            .map(|(i, z)| Stop::new(format!("s{}", i + 1), i as f64 * 1e-3, 0.0, *z))
            .collect();
        Instance::new(
            "z",
            Stop::new("d", 0.0, 0.0, None),
            stops,
            TravelTimes::from_rows(&rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn imputes_from_nearest_labeled_stop() {
        // t[from][to]; stop 3 is unlabeled. From stop 1 (A) it takes 9 s,
        // from stop 2 (B) 4 s. The reverse direction would pick A.
        let rows = vec![
            vec![0., 1., 1., 1.],
            vec![1., 0., 1., 9.],
            vec![1., 1., 0., 4.],
            vec![1., 2., 8., 0.],
        ];
        let inst = instance(&[Some("A"), Some("B"), None], rows);
        let out = impute_zones(&inst).unwrap();
        assert_eq!(out.node(3).zone_id.as_deref(), Some("B"));
    }

    #[test]
    fn imputation_ties_go_to_the_lower_index() {
        let rows = vec![
            vec![0., 1., 1., 1.],
            vec![1., 0., 1., 5.],
            vec![1., 1., 0., 5.],
            vec![1., 5., 5., 0.],
        ];
        let inst = instance(&[Some("B"), Some("A"), None], rows);
        let out = impute_zones(&inst).unwrap();
        assert_eq!(out.node(3).zone_id.as_deref(), Some("B"));
    }

    #[test]
    fn fully_labeled_is_unchanged_and_idempotent() {
        let rows = vec![vec![0., 1., 2.], vec![3., 0., 4.], vec![5., 6., 0.]];
        let inst = instance(&[Some("A"), Some("B")], rows);
        assert_eq!(impute_zones(&inst).unwrap(), inst);

        let rows = vec![vec![0., 1., 2.], vec![3., 0., 4.], vec![5., 6., 0.]];
        let partial = instance(&[Some("A"), None], rows);
        let once = impute_zones(&partial).unwrap();
        assert_eq!(impute_zones(&once).unwrap(), once);
    }

    #[test]
    fn zone_index_requires_labels() {
        let rows = vec![vec![0., 1., 2.], vec![3., 0., 4.], vec![5., 6., 0.]];
        let inst = instance(&[Some("A"), None], rows);
        assert!(matches!(ZoneIndex::build(&inst), Err(Error::Config(_))));
    }

    #[test]
    fn single_pair_zone_time_is_half() {
        let rows = vec![vec![0., 3., 3.], vec![3., 0., 10.], vec![3., 7., 0.]];
        let inst = instance(&[Some("A"), Some("B")], rows);
        let zi = ZoneIndex::build(&inst).unwrap();
        let m = zone_time_matrix(&inst, &zi);
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.get(1, 0), 3.5);
        assert_eq!(m.get(m.depot_index(), 0), 1.5);
        for z in 0..=2 {
            assert_eq!(m.get(z, z), 0.0);
        }
    }

    #[test]
    fn zone_time_divides_by_member_count_sum() {
        // zone A = {1, 2}, zone B = {3}; t[1][3] = 4, t[2][3] = 6
        let rows = vec![
            vec![0., 1., 1., 1.],
            vec![1., 0., 1., 4.],
            vec![1., 1., 0., 6.],
            vec![1., 1., 1., 0.],
        ];
        let inst = instance(&[Some("A"), Some("A"), Some("B")], rows);
        let zi = ZoneIndex::build(&inst).unwrap();
        let m = zone_time_matrix(&inst, &zi);
        assert!((m.get(0, 1) - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn centroids_are_means() {
        assert_eq!(centroid(&[(3.0, 4.0)]), (3.0, 4.0));
        assert_eq!(centroid(&[(0.0, 0.0), (2.0, 2.0)]), (1.0, 1.0));
        let a = centroid(&[(0.1, 0.7), (0.3, 0.2), (0.5, 0.9)]);
        let b = centroid(&[(0.5, 0.9), (0.1, 0.7), (0.3, 0.2)]);
        assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    }

    #[test]
    fn zone_sequence_collapses_blocks() {
        let rows = vec![vec![0.; 5]; 5]
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                for (j, v) in r.iter_mut().enumerate() {
                    *v = if i == j { 0.0 } else { 1.0 };
                }
                r
            })
            .collect();
        let inst = instance(&[Some("A"), Some("B"), Some("A"), Some("C")], rows);
        let zi = ZoneIndex::build(&inst).unwrap();
        assert_eq!(zi.labels(), ["A", "B", "C"]);
        assert_eq!(zi.members(0), [1, 3]);
        assert_eq!(zi.zone_sequence(&[0, 4, 1, 3, 2, 0]), vec![2, 0, 1]);
    }
}
