use std::collections::HashMap;

use catsp_core::scoring::{edit_ops, erp, score_with, sequence_deviation, ScoringRule};
use catsp_core::{score, TravelTimes};
use proptest::prelude::*;

/// Memoized top-down Levenshtein, written independently of the row DP.
fn lev_oracle(x: &[u8], b: &[u8]) -> usize {
    fn go(x: &[u8], b: &[u8], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == x.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return x.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if x[i] == b[j] {
            go(x, b, i + 1, j + 1, memo)
        } else {
            1 + go(x, b, i + 1, j + 1, memo)
                .min(go(x, b, i + 1, j, memo))
                .min(go(x, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(x, b, 0, 0, &mut HashMap::new())
}

/// Direct transcription of the deviation sum with linear position search.
fn sd_oracle(x: &[usize], b: &[usize]) -> f64 {
    let n = (b.len() - 1) as f64;
    if n < 2.0 {
        return 0.0;
    }
    let g: Vec<f64> = x
        .iter()
        .map(|v| b.iter().position(|w| w == v).unwrap() as f64)
        .collect();
    let mut s = 0.0;
    for i in 1..g.len() {
        s += (g[i] - g[i - 1]).abs() - 1.0;
    }
    2.0 * s / (n * (n - 1.0))
}

fn times(n: usize, seed: &[u16]) -> TravelTimes {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { 1.0 + seed[(i * n + j) % seed.len()] as f64 })
                .collect()
        })
        .collect();
    TravelTimes::from_rows(&rows).unwrap()
}

fn route_pair() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2usize..=10).prop_flat_map(|n| {
        let stops: Vec<usize> = (1..n).collect();
        (
            Just(stops.clone()).prop_shuffle(),
            Just(stops).prop_shuffle(),
        )
            .prop_map(|(a, b)| {
                let close = |s: Vec<usize>| {
                    let mut r = vec![0];
                    r.extend(s);
                    r
                };
                (close(a), close(b))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn identical_route_scores_zero((x, _) in route_pair(), w in prop::collection::vec(0u16..500, 1..40)) {
        let tt = times(x.len(), &w);
        for rule in [ScoringRule::Positional, ScoringRule::Challenge] {
            let r = score_with(&x, &x, &tt, rule).unwrap();
            prop_assert_eq!(r.score, 0.0);
            prop_assert_eq!(r.erp_e, 0);
        }
    }

    #[test]
    fn zero_score_only_for_equal_routes((x, b) in route_pair(), w in prop::collection::vec(0u16..500, 1..40)) {
        let tt = times(x.len(), &w);
        let r = score(&x, &b, &tt).unwrap();
        prop_assert_eq!(r.score == 0.0, x == b);
        prop_assert!(r.sd >= 0.0 && r.erp_norm >= 0.0 && r.score >= 0.0);
    }

    #[test]
    fn edit_ops_is_symmetric_and_matches_oracle(
        x in prop::collection::vec(0u8..4, 0..=10),
        b in prop::collection::vec(0u8..4, 0..=10),
    ) {
        let d = edit_ops(&x, &b);
        prop_assert_eq!(d, edit_ops(&b, &x));
        prop_assert_eq!(d, lev_oracle(&x, &b));
    }

    #[test]
    fn sd_matches_oracle((x, b) in route_pair()) {
        let got = sequence_deviation(&x, &b).unwrap();
        prop_assert!((got - sd_oracle(&x, &b)).abs() < 1e-12);
    }

    #[test]
    fn sd_ignores_relabeling((x, b) in route_pair(), salt in 1usize..1000) {
        let relabel = |r: &[usize]| -> Vec<usize> { r.iter().map(|&v| if v == 0 { 0 } else { v * 7919 + salt }).collect() };
        let a = sequence_deviation(&x, &b).unwrap();
        let c = sequence_deviation(&relabel(&x), &relabel(&b)).unwrap();
        prop_assert_eq!(a, c);
    }

    #[test]
    fn erp_count_is_edit_distance((x, b) in route_pair(), w in prop::collection::vec(0u16..500, 1..40)) {
        let tt = times(x.len(), &w);
        let (v, e) = erp(&x, &b, &tt).unwrap();
        prop_assert_eq!(e, edit_ops(&x, &b));
        prop_assert!(v >= 0.0);
    }
}
