mod common;

use common::naive_ranks;
use proptest::prelude::*;
use specgp_core::stats::{bonferroni, friedman, wilcoxon_signed_rank, PMethod};
use specgp_core::tseries::{cv_5x2, dtw, interpolate_scalar, knn1_dtw, ProjectedSeries};
use specgp_core::{seeded_rng, Label};

/// Minimum cost over every monotone alignment path, by exhaustive search.
fn brute_dtw(x: &[f64], y: &[f64]) -> f64 {
    fn walk(x: &[f64], y: &[f64], i: usize, j: usize, acc: f64) -> f64 {
        let acc = acc + (x[i] - y[j]).abs();
        if i + 1 == x.len() && j + 1 == y.len() {
            return acc;
        }
        let mut best = f64::INFINITY;
        if i + 1 < x.len() {
            best = best.min(walk(x, y, i + 1, j, acc));
        }
        if j + 1 < y.len() {
            best = best.min(walk(x, y, i, j + 1, acc));
        }
        if i + 1 < x.len() && j + 1 < y.len() {
            best = best.min(walk(x, y, i + 1, j + 1, acc));
        }
        best
    }
    walk(x, y, 0, 0, 0.0)
}

fn series(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 1..=max)
}

/// Two-sided signed-rank p by enumerating all 2^n sign patterns.
fn enumerated_wilcoxon_p(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if d.is_empty() {
        return 1.0;
    }
    let ranks = naive_ranks(&d.iter().map(|x| x.abs()).collect::<Vec<_>>());
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total: f64 = ranks.iter().sum();
    let w = w_plus.min(total - w_plus);
    let n = d.len();
    let mut at_most = 0u64;
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        if s <= w + 1e-9 {
            at_most += 1;
        }
    }
    (2.0 * at_most as f64 / (1u64 << n) as f64).min(1.0)
}

proptest! {
    #[test]
    fn dtw_matches_exhaustive(x in series(6), y in series(6)) {
        prop_assert_eq!(dtw(&x, &y).unwrap(), brute_dtw(&x, &y));
    }

    #[test]
    fn dtw_metric_like(x in series(12), y in series(12)) {
        let d = dtw(&x, &y).unwrap();
        prop_assert_eq!(d, dtw(&y, &x).unwrap());
        prop_assert!(d >= 0.0);
        prop_assert_eq!(dtw(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn dtw_below_diagonal_path(pairs in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..15)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let diag: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!(dtw(&x, &y).unwrap() <= diag + 1e-12);
    }

    #[test]
    fn knn_matches_scan(train in prop::collection::vec((series(6), prop::bool::ANY), 1..10), q in series(6)) {
        let train: Vec<ProjectedSeries> = train
            .into_iter()
            .map(|(values, b)| ProjectedSeries { area_id: String::new(), label: if b { Label::B } else { Label::A }, values })
            .collect();
        let dists: Vec<f64> = train.iter().map(|s| brute_dtw(&s.values, &q)).collect();
        let best = dists.iter().copied().fold(f64::INFINITY, f64::min);
        let first = dists.iter().position(|&d| d == best).unwrap();
        prop_assert_eq!(knn1_dtw(&train, &q).unwrap(), train[first].label);
    }

    #[test]
    fn interpolation_exact_on_lines(
        a in -10.0..10.0f64,
        b in -10.0..10.0f64,
        len in 3usize..40,
        drop in prop::collection::vec(prop::bool::ANY, 40),
    ) {
        let line: Vec<f64> = (0..len).map(|t| a + b * t as f64).collect();
        let gappy: Vec<Option<f64>> = (0..len)
            .map(|t| if t > 0 && t + 1 < len && drop[t] { None } else { Some(line[t]) })
            .collect();
        let filled = interpolate_scalar(&gappy, 1.0).unwrap();
        for (f, l) in filled.iter().zip(&line) {
            prop_assert!((f - l).abs() <= 1e-12 * (1.0 + l.abs()), "{f} vs {l}");
        }
    }

    #[test]
    fn five_by_two_is_stratified(seed in any::<u64>(), bits in prop::collection::vec(prop::bool::ANY, 4..80)) {
        let mut labels: Vec<Label> = bits.iter().map(|&b| if b { Label::B } else { Label::A }).collect();
        labels[..2].fill(Label::A);
        labels[2..4].fill(Label::B);
        let splits = cv_5x2(&mut seeded_rng(seed), &labels).unwrap();
        prop_assert_eq!(splits.len(), 10);
        for s in &splits {
            let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for l in Label::BOTH {
                let tr = s.train.iter().filter(|&&i| labels[i] == l).count() as i64;
                let te = s.test.iter().filter(|&&i| labels[i] == l).count() as i64;
                prop_assert!((tr - te).abs() <= 1);
            }
        }
    }

    #[test]
    fn wilcoxon_exact_matches_enumeration(
        pairs in prop::collection::vec((0i32..6, 0i32..6), 1..=10),
    ) {
        // Small integers make ties and zero differences common.
        let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        let want = enumerated_wilcoxon_p(&a, &b);
        if !r.all_zero {
            prop_assert_eq!(r.method, PMethod::Exact);
        }
        prop_assert!((r.p_value - want).abs() < 1e-12, "{} vs {want}", r.p_value);
    }

    #[test]
    fn friedman_invariant_under_monotone_maps(rows in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 2..12)) {
        let f = friedman(&rows).unwrap();
        let mapped: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| (3.0 * x).exp() - 7.0).collect()).collect();
        let g = friedman(&mapped).unwrap();
        prop_assert!((f.statistic - g.statistic).abs() < 1e-9);
        prop_assert!((f.p_value - g.p_value).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&f.p_value));
    }

    #[test]
    fn bonferroni_bounds(ps in prop::collection::vec(0.0..=1.0f64, 1..10), m in 1usize..10) {
        for (p, q) in ps.iter().zip(bonferroni(&ps, m)) {
            prop_assert!(q >= *p && q <= 1.0);
        }
    }
}

#[test]
fn wilcoxon_all_equal_is_one() {
    let a = [0.8, 0.9, 0.7];
    let r = wilcoxon_signed_rank(&a, &a).unwrap();
    assert!(r.all_zero);
    assert_eq!(r.p_value, 1.0);
}
