//! Nonparametric comparison of methods over paired cross-validation scores.

use alloc::vec;
use alloc::vec::Vec;

use crate::special::{chi2_sf, normal_sf};

/// Largest number of nonzero differences for which the Wilcoxon p-value is
/// computed exactly.
pub const WILCOXON_EXACT_MAX_N: usize = 12;

/// Significance level used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("paired samples differ in length: {0} vs {1}")]
    Unpaired(usize, usize),
    #[error("non-finite score")]
    NonFinite,
}

/// Ranks `values` ascending from 1, giving tied values their average rank.
/// Also returns the tie correction term `sum(t^3 - t)` over tie groups.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j share ranks i+1..=j.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmanResult {
    /// Tie-corrected chi-square statistic.
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom, `k - 1`.
    pub df: usize,
}

/// Friedman test over an `n x k` matrix: `n` experiments (rows), `k` methods
/// (columns). Methods are ranked within each row.
pub fn friedman(matrix: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    let n = matrix.len();
    if n < 2 {
        return Err(StatsError::TooFew {
            what: "experiments",
            needed: 2,
            got: n,
        });
    }
    let k = matrix[0].len();
    if k < 2 {
        return Err(StatsError::TooFew {
            what: "methods",
            needed: 2,
            got: k,
        });
    }
    let mut rank_sums = vec![0.0; k];
    let mut tie_sum = 0.0;
    for (row, values) in matrix.iter().enumerate() {
        if values.len() != k {
            return Err(StatsError::Ragged {
                row,
                got: values.len(),
                expected: k,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        let (ranks, ties) = average_ranks(values);
        for (s, r) in rank_sums.iter_mut().zip(ranks) {
            *s += r;
        }
        tie_sum += ties;
    }
    let (nf, kf) = (n as f64, k as f64);
    let sum_sq: f64 = rank_sums.iter().map(|r| r * r).sum();
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * sum_sq - 3.0 * nf * (kf + 1.0);
    let correction = 1.0 - tie_sum / (nf * kf * (kf * kf - 1.0));
    let df = k - 1;
    if correction <= 1e-12 {
        // Every row fully tied.
        return Ok(FriedmanResult {
            statistic: 0.0,
            p_value: 1.0,
            df,
        });
    }
    let statistic = (raw / correction).max(0.0);
    Ok(FriedmanResult {
        statistic,
        p_value: chi2_sf(statistic, df as f64),
        df,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `min(w_plus, w_minus)`.
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Number of nonzero differences.
    pub n_effective: usize,
    /// Two-sided.
    pub p_value: f64,
    pub method: PMethod,
    /// All paired differences were zero; `p_value` is 1.
    pub all_zero: bool,
}

/// Wilcoxon signed-rank test on paired samples `a` and `b`.
///
/// Zero differences are dropped, absolute differences get average ranks on
/// ties. The two-sided p-value is `min(1, 2 P(W+ <= W))`, exact over all sign
/// assignments for up to [`WILCOXON_EXACT_MAX_N`] nonzero differences and by
/// the tie-corrected normal approximation with continuity correction above.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::Unpaired(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(StatsError::TooFew {
            what: "pairs",
            needed: 1,
            got: 0,
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            p_value: 1.0,
            method: PMethod::Exact,
            all_zero: true,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| libm::fabs(*d)).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);

    let (p_value, method) = if n <= WILCOXON_EXACT_MAX_N {
        (exact_p(&ranks, w), PMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        let p = if var <= 0.0 {
            1.0
        } else {
            let z = ((mean - w).abs() - 0.5).max(0.0) / libm::sqrt(var);
            2.0 * normal_sf(z)
        };
        (p.min(1.0), PMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        w,
        w_plus,
        w_minus,
        n_effective: n,
        p_value,
        method,
        all_zero: false,
    })
}

/// `min(1, 2 P(W+ <= w))` by counting sign assignments. Ranks are averages of
/// integers, so doubling them gives integers and the count is a subset-sum
/// table over doubled ranks.
fn exact_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks
        .iter()
        .map(|r| libm::round(2.0 * r) as usize)
        .collect();
    let max_sum: usize = doubled.iter().sum();
    let mut ways = vec![0f64; max_sum + 1];
    ways[0] = 1.0;
    for &r in &doubled {
        for s in (r..=max_sum).rev() {
            ways[s] += ways[s - r];
        }
    }
    let limit = libm::round(2.0 * w) as usize;
    let hits: f64 = ways[..=limit.min(max_sum)].iter().sum();
    let total = libm::pow(2.0, ranks.len() as f64);
    (2.0 * hits / total).min(1.0)
}

/// Bonferroni adjustment: each p-value times `m`, capped at 1.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    let m = m.max(1) as f64;
    p_values.iter().map(|p| (p * m).min(1.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Superior,
    Inferior,
    Tied,
}

impl Verdict {
    pub fn glyph(self) -> &'static str {
        match self {
            Verdict::Superior => "\u{25B2}",
            Verdict::Inferior => "\u{25BC}",
            Verdict::Tied => "\u{2022}",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Superior => "superior",
            Verdict::Inferior => "inferior",
            Verdict::Tied => "tied",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub wilcoxon: WilcoxonResult,
    pub adjusted_p: f64,
    /// Mean of `candidate - baseline` over the paired scores.
    pub mean_difference: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub friedman: FriedmanResult,
    /// One entry per baseline, in input order.
    pub comparisons: Vec<Comparison>,
}

/// Compares `candidate` against each baseline over paired scores.
///
/// A Friedman test runs across all methods; each candidate/baseline pair
/// gets a Wilcoxon test, Bonferroni-adjusted over the number of baselines. A
/// pair is tied unless both the Friedman p and its adjusted p are below
/// `alpha`, otherwise the sign of the mean paired difference decides.
pub fn verdicts(
    candidate: &[f64],
    baselines: &[Vec<f64>],
    alpha: f64,
) -> Result<VerdictReport, StatsError> {
    if baselines.is_empty() {
        return Err(StatsError::TooFew {
            what: "baselines",
            needed: 1,
            got: 0,
        });
    }
    for b in baselines {
        if b.len() != candidate.len() {
            return Err(StatsError::Unpaired(candidate.len(), b.len()));
        }
    }
    let matrix: Vec<Vec<f64>> = (0..candidate.len())
        .map(|i| {
            core::iter::once(candidate[i])
                .chain(baselines.iter().map(|b| b[i]))
                .collect()
        })
        .collect();
    let fr = friedman(&matrix)?;
    let tests = baselines
        .iter()
        .map(|b| wilcoxon_signed_rank(candidate, b))
        .collect::<Result<Vec<_>, _>>()?;
    let raw: Vec<f64> = tests.iter().map(|t| t.p_value).collect();
    let adjusted = bonferroni(&raw, baselines.len());
    let comparisons = tests
        .into_iter()
        .zip(adjusted)
        .zip(baselines)
        .map(|((wilcoxon, adjusted_p), b)| {
            let mean_difference =
                candidate.iter().zip(b).map(|(c, x)| c - x).sum::<f64>() / candidate.len() as f64;
            let significant = fr.p_value < alpha && adjusted_p < alpha;
            let verdict = if !significant || mean_difference == 0.0 {
                Verdict::Tied
            } else if mean_difference > 0.0 {
                Verdict::Superior
            } else {
                Verdict::Inferior
            };
            Comparison {
                wilcoxon,
                adjusted_p,
                mean_difference,
                verdict,
            }
        })
        .collect();
    Ok(VerdictReport {
        friedman: fr,
        comparisons,
    })
}
