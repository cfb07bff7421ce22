//! Two-stage GRASP over zone-contiguous tours.
//!
//! Each iteration draws a random zone order, improves it by first-improvement
//! zone relocation, shuffles stops inside every zone and runs a VND over
//! intra-zone relocate and swap moves. The best iteration under the mode's
//! objective is returned.
//!
//! Iteration `i` draws from its own ChaCha8 stream `i` seeded with the run
//! seed, so the first `L` iterations of a run with `L' > L` replay exactly.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::context::RouteContext;
use crate::error::{Error, Result};
use crate::instance::{RouteSolution, TravelTimes, DEPOT};
use crate::objective::{components, f_single, zone_components, Weights};
use crate::visual::{visual_objective, VisualMetric, VisualScale};
use crate::zones::ZoneIndex;

pub const DEFAULT_ITERATIONS: usize = 50;

/// Improvements smaller than this are treated as ties.
const IMPROVEMENT_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Travel time and zone time only.
    Base,
    /// Travel time, zone time and history.
    Dm,
    /// Travel time, zone time and one visual metric.
    Visual(VisualMetric),
    /// Raw travel time in seconds.
    TravelTime,
}

impl Mode {
    pub fn default_weights(self) -> Weights {
        match self {
            Mode::Dm => Weights::DM,
            _ => Weights::BASE,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Base => f.write_str("base"),
            Mode::Dm => f.write_str("dm"),
            Mode::Visual(m) => write!(f, "visual:{m}"),
            Mode::TravelTime => f.write_str("time"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Mode::Base),
            "dm" => Ok(Mode::Dm),
            "time" => Ok(Mode::TravelTime),
            _ => match s.strip_prefix("visual:") {
                Some(m) => Ok(Mode::Visual(m.parse()?)),
                None => Err(Error::Config(format!("unknown mode `{s}`"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    pub iterations: usize,
    pub seed: u64,
    pub mode: Mode,
    pub weights: Weights,
    /// Weight of the visual metric in visual modes.
    pub visual_weight: f64,
}

impl SearchConfig {
    pub fn new(mode: Mode) -> Self {
        SearchConfig {
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            mode,
            weights: mode.default_weights(),
            visual_weight: 1.0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = weights;
        self
    }

    fn check(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn iteration_rng(seed: u64, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    rng
}

fn random_zone_order(m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut z: Vec<usize> = (0..m).collect();
    z.shuffle(rng);
    z
}

/// Full order visiting zones in `zone_seq`, stops of each zone shuffled.
pub fn random_stop_order(zones: &ZoneIndex, zone_seq: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let len: usize = zone_seq.iter().map(|&z| zones.members(z).len()).sum();
    let mut order = Vec::with_capacity(len + 2);
    order.push(DEPOT);
    for &z in zone_seq {
        let start = order.len();
        order.extend_from_slice(zones.members(z));
        order[start..].shuffle(rng);
    }
    order.push(DEPOT);
    order
}

/// Moves single zones to other positions, accepting the first move that
/// strictly lowers `cost`, until none does.
pub fn relocate_zones<K, F>(mut seq: Vec<usize>, cost: F) -> Vec<usize>
where
    K: PartialOrd,
    F: Fn(&[usize]) -> K,
{
    let m = seq.len();
    let mut current = cost(&seq);
    let mut cand = seq.clone();
    'restart: loop {
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                cand.clone_from(&seq);
                let z = cand.remove(i);
                cand.insert(j, z);
                let c = cost(&cand);
                if c < current {
                    std::mem::swap(&mut seq, &mut cand);
                    current = c;
                    continue 'restart;
                }
            }
        }
        return seq;
    }
}

/// Half-open position ranges of the zone blocks of `order`.
fn zone_blocks(zones: &ZoneIndex, order: &[usize]) -> Vec<(usize, usize)> {
    let n = order.len();
    let mut blocks = Vec::new();
    let mut start = 1;
    for p in 2..n {
        if order[p] == DEPOT || zones.zone_of(order[p]) != zones.zone_of(order[start]) {
            blocks.push((start, p));
            start = p;
        }
    }
    blocks
}

/// Cost change of moving the node at position `i` to position `j`.
fn relocate_delta(tt: &TravelTimes, o: &[usize], i: usize, j: usize) -> f64 {
    let t = |a: usize, b: usize| tt.get(o[a], o[b]);
    let x = o[i];
    if j > i {
        let old = t(i - 1, i) + t(i, i + 1) + t(j, j + 1);
        let new = t(i - 1, i + 1) + tt.get(o[j], x) + tt.get(x, o[j + 1]);
        new - old
    } else {
        let old = t(j - 1, j) + t(i - 1, i) + t(i, i + 1);
        let new = tt.get(o[j - 1], x) + tt.get(x, o[j]) + t(i - 1, i + 1);
        new - old
    }
}

/// Cost change of exchanging the nodes at positions `i < j`.
fn swap_delta(tt: &TravelTimes, o: &[usize], i: usize, j: usize) -> f64 {
    let g = |a: usize, b: usize| tt.get(a, b);
    let (a, x, y, b) = (o[i - 1], o[i], o[j], o[j + 1]);
    if j == i + 1 {
        let old = g(a, x) + g(x, y) + g(y, b);
        let new = g(a, y) + g(y, x) + g(x, b);
        return new - old;
    }
    let (x1, y0) = (o[i + 1], o[j - 1]);
    let old = g(a, x) + g(x, x1) + g(y0, y) + g(y, b);
    let new = g(a, y) + g(y, x1) + g(y0, x) + g(x, b);
    new - old
}

fn best_relocate(tt: &TravelTimes, o: &[usize], blocks: &[(usize, usize)]) -> Option<(usize, usize)> {
    let mut best = (-IMPROVEMENT_EPS, None);
    for &(s, e) in blocks {
        for i in s..e {
            for j in s..e {
                if i != j {
                    let d = relocate_delta(tt, o, i, j);
                    if d < best.0 {
                        best = (d, Some((i, j)));
                    }
                }
            }
        }
    }
    best.1
}

fn best_swap(tt: &TravelTimes, o: &[usize], blocks: &[(usize, usize)]) -> Option<(usize, usize)> {
    let mut best = (-IMPROVEMENT_EPS, None);
    for &(s, e) in blocks {
        for i in s..e {
            for j in i + 1..e {
                let d = swap_delta(tt, o, i, j);
                if d < best.0 {
                    best = (d, Some((i, j)));
                }
            }
        }
    }
    best.1
}

/// Variable neighborhood descent on travel time with intra-zone moves:
/// best relocate, then best swap, back to relocate after any improvement.
pub fn vnd(tt: &TravelTimes, zones: &ZoneIndex, mut order: Vec<usize>) -> Vec<usize> {
    let blocks = zone_blocks(zones, &order);
    loop {
        if let Some((i, j)) = best_relocate(tt, &order, &blocks) {
            let x = order.remove(i);
            order.insert(j, x);
            continue;
        }
        if let Some((i, j)) = best_swap(tt, &order, &blocks) {
            order.swap(i, j);
            continue;
        }
        return order;
    }
}

fn finish(ctx: &RouteContext, order: Vec<usize>) -> RouteSolution {
    let mut sol = RouteSolution::new(ctx.instance(), order);
    sol.components = components(ctx, &sol.order);
    sol
}

/// Runs the GRASP loop. `score` returns `None` for rejected routes; the
/// lowest score wins, earliest iteration on ties.
fn grasp<K, Z, S>(ctx: &RouteContext, cfg: &SearchConfig, zone_cost: Z, mut score: S) -> Result<Option<Vec<usize>>>
where
    K: PartialOrd,
    Z: Fn(&[usize]) -> K,
    S: FnMut(&[usize]) -> Result<Option<f64>>,
{
    cfg.check()?;
    let zones = ctx.zones();
    let tt = ctx.instance().travel_times();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for it in 0..cfg.iterations {
        let mut rng = iteration_rng(cfg.seed, it);
        let zseq = random_zone_order(zones.len(), &mut rng);
        let zseq = relocate_zones(zseq, &zone_cost);
        let order = random_stop_order(zones, &zseq, &mut rng);
        let order = vnd(tt, zones, order);
        if let Some(v) = score(&order)? {
            if best.as_ref().map_or(true, |(b, _)| v < *b) {
                best = Some((v, order));
            }
        }
    }
    Ok(best.map(|(_, o)| o))
}

/// Random solution drawn from the first iteration's stream; visual metrics
/// are scaled by their value on it.
pub fn reference_solution(ctx: &RouteContext, seed: u64) -> Vec<usize> {
    let mut rng = iteration_rng(seed, 0);
    let zseq = random_zone_order(ctx.zones().len(), &mut rng);
    random_stop_order(ctx.zones(), &zseq, &mut rng)
}

/// Best-of-L solution under the configured mode.
pub fn solve(ctx: &RouteContext, cfg: &SearchConfig) -> Result<RouteSolution> {
    let w = cfg.weights;
    let zt = ctx.zone_times();
    let tt = ctx.instance().travel_times();
    let best = match cfg.mode {
        Mode::Dm => {
            if !ctx.has_history() {
                return Err(Error::Config("mode dm needs a history field".into()));
            }
            grasp(
                ctx,
                cfg,
                |z| w.zone_part(&zone_components(ctx, z)),
                |o| Ok(Some(f_single(ctx, o, &w))),
            )?
        }
        Mode::Base => grasp(ctx, cfg, |z| zt.tour_time(z), |o| Ok(Some(f_single(ctx, o, &w))))?,
        Mode::TravelTime => grasp(ctx, cfg, |z| zt.tour_time(z), |o| Ok(Some(tt.path_time(o))))?,
        Mode::Visual(metric) => {
            let scale = VisualScale::from_reference(ctx, &reference_solution(ctx, cfg.seed), metric)?;
            grasp(
                ctx,
                cfg,
                |z| zt.tour_time(z),
                |o| visual_objective(ctx, o, &scale, &w, cfg.visual_weight).map(Some),
            )?
        }
    };
    Ok(finish(ctx, best.expect("every iteration yields a candidate")))
}

/// Minimizes raw travel time subject to `f2 <= bound`, with `f2` the
/// zone part of `cfg.weights`. Returns `None` when no iteration meets the
/// bound. Zone relocation minimizes the bound violation first and zone
/// travel time second.
pub fn roh(ctx: &RouteContext, cfg: &SearchConfig, bound: f64) -> Result<Option<RouteSolution>> {
    let w = cfg.weights;
    let zt = ctx.zone_times();
    let tt = ctx.instance().travel_times();
    let zone_cost = |z: &[usize]| {
        let excess = if bound.is_finite() {
            (w.zone_part(&zone_components(ctx, z)) - bound).max(0.0)
        } else {
            0.0
        };
        (excess, zt.tour_time(z))
    };
    let best = grasp(ctx, cfg, zone_cost, |o| {
        let zseq = ctx.zones().zone_sequence(o);
        let f2 = w.zone_part(&zone_components(ctx, &zseq));
        Ok((f2 <= bound).then(|| tt.path_time(o)))
    })?;
    Ok(best.map(|o| finish(ctx, o)))
}

/// `(f1, f2)` of a solution with the same arithmetic as [`roh`].
pub fn objective_pair(ctx: &RouteContext, order: &[usize], w: &Weights) -> (f64, f64) {
    let zseq = ctx.zones().zone_sequence(order);
    let f2 = w.zone_part(&zone_components(ctx, &zseq));
    (ctx.instance().travel_times().path_time(order), f2)
}

/// Zone-contiguous greedy tour: from the current node go to the nearest
/// unvisited stop, then finish its zone by nearest neighbor.
pub fn nearest_neighbor_tour(ctx: &RouteContext) -> Vec<usize> {
    let inst = ctx.instance();
    let zones = ctx.zones();
    let n = inst.n_stops();
    let mut visited = vec![false; n + 1];
    let mut zone_done = vec![false; zones.len()];
    let mut order = vec![DEPOT];
    let mut cur = DEPOT;
    let nearest = |cur: usize, cands: &mut dyn Iterator<Item = usize>| -> Option<usize> {
        let mut best: Option<usize> = None;
        for c in cands {
            if best.map_or(true, |b| inst.t(cur, c) < inst.t(cur, b)) {
                best = Some(c);
            }
        }
        best
    };
    while order.len() <= n {
        let next = nearest(cur, &mut (1..=n).filter(|&s| !zone_done[zones.zone_of(s)]))
            .expect("unvisited stop remains");
        let z = zones.zone_of(next);
        zone_done[z] = true;
        cur = next;
        visited[cur] = true;
        order.push(cur);
        while let Some(s) = nearest(cur, &mut zones.members(z).iter().copied().filter(|&s| !visited[s])) {
            cur = s;
            visited[cur] = true;
            order.push(cur);
        }
    }
    order.push(DEPOT);
    order
}
