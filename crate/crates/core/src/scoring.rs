//! Similarity of a planned route to an executed one.
//!
//! Routes are node sequences that start at the depot; a trailing copy of
//! the first node is ignored. Both routes must visit the same nodes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, TravelTimes};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub sd: f64,
    pub erp_norm: f64,
    pub erp_e: usize,
    pub score: f64,
}

impl ScoreReport {
    pub const ZERO: ScoreReport = ScoreReport {
        sd: 0.0,
        erp_norm: 0.0,
        erp_e: 0,
        score: 0.0,
    };
}

/// How edit operations are priced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringRule {
    /// Each operation costs the share of the executed route's time spent on
    /// the arc into the touched position.
    #[default]
    Positional,
    /// Substitutions cost the standardized travel time between the two
    /// stops, insertions and deletions a fixed gap penalty; sequence
    /// deviation ignores the depot.
    Challenge,
}

pub const CHALLENGE_GAP: f64 = 1000.0;

fn open(route: &[usize]) -> &[usize] {
    match route {
        [first, .., last] if first == last => &route[..route.len() - 1],
        _ => route,
    }
}

/// Position of every node of `b`; errors unless `x` is a permutation of `b`.
fn positions(x: &[usize], b: &[usize]) -> Result<HashMap<usize, usize>> {
    let pos: HashMap<usize, usize> = b.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    if pos.len() != b.len() {
        return Err(Error::IncomparableRoutes("reference route repeats a stop".into()));
    }
    if x.len() != b.len() {
        return Err(Error::IncomparableRoutes(format!(
            "routes visit {} and {} stops",
            x.len(),
            b.len()
        )));
    }
    let mut seen = vec![false; b.len()];
    for n in x {
        match pos.get(n) {
            Some(&p) if !seen[p] => seen[p] = true,
            Some(_) => return Err(Error::IncomparableRoutes(format!("stop {n} repeats"))),
            None => return Err(Error::IncomparableRoutes(format!("stop {n} not in both routes"))),
        }
    }
    Ok(pos)
}

fn deviation_sum(x: &[usize], pos: &HashMap<usize, usize>) -> f64 {
    x.windows(2)
        .map(|w| (pos[&w[1]] as f64 - pos[&w[0]] as f64).abs() - 1.0)
        .sum()
}

/// `2 / (n (n - 1))` times the sum of `|g_i - g_{i-1}| - 1`, with `g` the
/// positions in `b` of the nodes of `x` (depot included as `g_0`) and `n`
/// the stop count. Zero when `n < 2`.
pub fn sequence_deviation(x: &[usize], b: &[usize]) -> Result<f64> {
    let (x, b) = (open(x), open(b));
    let pos = positions(x, b)?;
    let n = b.len().saturating_sub(1) as f64;
    if n < 2.0 {
        return Ok(0.0);
    }
    Ok(2.0 / (n * (n - 1.0)) * deviation_sum(x, &pos))
}

/// Unit-cost Levenshtein distance.
pub fn edit_ops<T: PartialEq>(x: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, xi) in x.iter().enumerate() {
        cur[0] = i + 1;
        for (j, bj) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(xi != bj);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditOp {
    Match { x: usize, b: usize },
    Substitute { x: usize, b: usize },
    /// Remove `x[x]`.
    Delete { x: usize },
    /// Insert `b[b]`.
    Insert { b: usize },
}

/// An optimal unit-cost edit script from `x` to `b`, in sequence order.
/// Backtracking prefers match or substitution, then deletion, then insertion.
pub fn edit_script<T: PartialEq>(x: &[T], b: &[T]) -> Vec<EditOp> {
    let (n, m) = (x.len(), b.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for i in 0..=n {
        d[i * w] = i;
    }
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = d[(i - 1) * w + j - 1] + usize::from(x[i - 1] != b[j - 1]);
            d[i * w + j] = sub.min(d[(i - 1) * w + j] + 1).min(d[i * w + j - 1] + 1);
        }
    }
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let same = x[i - 1] == b[j - 1];
            if d[(i - 1) * w + j - 1] + usize::from(!same) == here {
                ops.push(if same {
                    EditOp::Match { x: i - 1, b: j - 1 }
                } else {
                    EditOp::Substitute { x: i - 1, b: j - 1 }
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * w + j] + 1 == here {
            ops.push(EditOp::Delete { x: i - 1 });
            i -= 1;
        } else {
            ops.push(EditOp::Insert { b: j - 1 });
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

/// Share of the executed route's closed-tour time spent on the arc into
/// each position; position 0 takes the closing arc.
fn position_costs(b: &[usize], tt: &TravelTimes) -> Vec<f64> {
    let k = b.len();
    let arc = |p: usize| tt.get(b[(p + k - 1) % k], b[p]);
    let total: f64 = (0..k).map(arc).sum();
    if total == 0.0 {
        return vec![0.0; k];
    }
    (0..k).map(|p| arc(p) / total).collect()
}

/// Travel-time weighted edit distance and the number of edit operations.
pub fn erp(x: &[usize], b: &[usize], tt: &TravelTimes) -> Result<(f64, usize)> {
    let (x, b) = (open(x), open(b));
    let pos = positions(x, b)?;
    let cost = position_costs(b, tt);
    let mut total = 0.0;
    let mut count = 0;
    for op in edit_script(x, b) {
        let c = match op {
            EditOp::Match { .. } => continue,
            EditOp::Substitute { b: p, .. } | EditOp::Insert { b: p } => cost[p],
            EditOp::Delete { x: p } => cost[pos[&x[p]]],
        };
        total += c;
        count += 1;
    }
    Ok((total, count))
}

pub fn erp_norm(x: &[usize], b: &[usize], tt: &TravelTimes) -> Result<f64> {
    erp(x, b, tt).map(|(v, _)| v)
}

/// Similarity score of `x` against the executed route `b`; 0 for identical
/// sequences.
pub fn score(x: &[usize], b: &[usize], tt: &TravelTimes) -> Result<ScoreReport> {
    score_with(x, b, tt, ScoringRule::Positional)
}

pub fn score_with(x: &[usize], b: &[usize], tt: &TravelTimes, rule: ScoringRule) -> Result<ScoreReport> {
    let (xo, bo) = (open(x), open(b));
    positions(xo, bo)?;
    if xo == bo {
        return Ok(ScoreReport::ZERO);
    }
    let (sd, erp_norm, erp_e) = match rule {
        ScoringRule::Positional => {
            let (v, e) = erp(xo, bo, tt)?;
            (sequence_deviation(xo, bo)?, v, e)
        }
        ScoringRule::Challenge => {
            let (v, e) = challenge_erp(xo, bo, tt);
            (challenge_sequence_deviation(xo, bo)?, v, e)
        }
    };
    let score = if erp_e == 0 { 0.0 } else { sd * erp_norm / erp_e as f64 };
    Ok(ScoreReport {
        sd,
        erp_norm,
        erp_e,
        score,
    })
}

/// Scores routes given as stop ids of `inst`.
pub fn score_ids(inst: &Instance, x: &[String], b: &[String], rule: ScoringRule) -> Result<ScoreReport> {
    let xn = inst.nodes_of(x)?;
    let bn = inst.nodes_of(b)?;
    score_with(&xn, &bn, inst.travel_times(), rule)
}

/// Sequence deviation over stops only (depot dropped), normalized by the
/// stop count.
fn challenge_sequence_deviation(x: &[usize], b: &[usize]) -> Result<f64> {
    let (x, b) = (&x[1..], &b[1..]);
    let pos = positions(x, b)?;
    let n = b.len() as f64;
    if n < 2.0 {
        return Ok(0.0);
    }
    Ok(2.0 / (n * (n - 1.0)) * deviation_sum(x, &pos))
}

/// Matrix standardized by the mean and population standard deviation of
/// all entries, then shifted so its minimum is 0.
pub fn standardized_times(tt: &TravelTimes) -> Vec<Vec<f64>> {
    let rows = tt.rows();
    let all: Vec<f64> = rows.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    let sd = (all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    let min = all.iter().map(|v| (v - mean) / sd).fold(f64::INFINITY, f64::min);
    rows.iter()
        .map(|r| r.iter().map(|v| (v - mean) / sd - min).collect())
        .collect()
}

/// Edit distance on closed tours with standardized substitution costs and a
/// fixed gap cost; the count follows the chosen path, preferring
/// substitution, then deletion, then insertion on ties.
fn challenge_erp(x: &[usize], b: &[usize], tt: &TravelTimes) -> (f64, usize) {
    let mat = standardized_times(tt);
    let close = |r: &[usize]| -> Vec<usize> { r.iter().copied().chain(r.first().copied()).collect() };
    let (a, s) = (close(b), close(x));
    let (n, m) = (a.len(), s.len());
    let w = m + 1;
    // suffix tables: cost and count for a[i..] vs s[j..]
    let mut cost = vec![0.0f64; (n + 1) * w];
    let mut cnt = vec![0usize; (n + 1) * w];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            let k = i * w + j;
            if i == n {
                cost[k] = CHALLENGE_GAP * (m - j) as f64;
                cnt[k] = m - j;
            } else if j == m {
                cost[k] = CHALLENGE_GAP * (n - i) as f64;
                cnt[k] = n - i;
            } else {
                let o1 = cost[(i + 1) * w + j + 1] + mat[a[i]][s[j]];
                let o2 = cost[(i + 1) * w + j] + CHALLENGE_GAP;
                let o3 = cost[i * w + j + 1] + CHALLENGE_GAP;
                let d = o1.min(o2).min(o3);
                cost[k] = d;
                cnt[k] = if d == o1 {
                    cnt[(i + 1) * w + j + 1] + usize::from(a[i] != s[j])
                } else if d == o2 {
                    cnt[(i + 1) * w + j] + 1
                } else {
                    cnt[i * w + j + 1] + 1
                };
            }
        }
    }
    (cost[0], cnt[0])
}
