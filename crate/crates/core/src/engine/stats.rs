//! Descriptive statistics, binning and threshold fractions over integer-backed columns.
//!
//! All routines skip nulls. Sums are exact (`i128`); the only floating point step is the
//! final division/square root of the standard deviation, so results do not depend on
//! input order.

use serde::{Deserialize, Serialize};

use super::{EngineError, Result};
use crate::money::round_ratio;

/// Exact mean as an unreduced ratio `sum / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mean {
    pub numerator: i128,
    pub denominator: u64,
}

impl Mean {
    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Mean rounded to the column's unit (cents for money), halves away from zero.
    pub fn rounded(&self) -> i64 {
        round_ratio(self.numerator, i128::from(self.denominator)) as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: u64,
    pub sum: Option<i128>,
    pub mean: Option<Mean>,
    /// Defined for n >= 2.
    pub std_sample: Option<f64>,
    pub min: Option<i64>,
    pub max: Option<i64>,
    /// Lower-middle element for even n.
    pub median: Option<i64>,
}

/// Sample standard deviation from exact `n`, `Σx` and `Σx²`.
///
/// With `Σx = q·n + r` (`0 <= r < n`), `n·Σx² − (Σx)² = n·(Σx² − q²n − 2qr) − r²`, where the
/// bracketed term stays near `(n−1)·var` and is computed exactly.
pub(crate) fn sample_std(n: u64, sum: i128, sum_sq: i128) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let n_i = i128::from(n);
    let q = sum.div_euclid(n_i);
    let r = sum.rem_euclid(n_i);
    let centered = q
        .checked_mul(q)
        .and_then(|qq| qq.checked_mul(n_i))
        .and_then(|qqn| sum_sq.checked_sub(qqn))
        .and_then(|t| t.checked_sub(2 * q * r));
    let nf = n as f64;
    let var = match centered {
        Some(t) => (t as f64 - (r as f64) * (r as f64) / nf) / (nf - 1.0),
        None => (sum_sq as f64 - (sum as f64) * (sum as f64) / nf) / (nf - 1.0),
    };
    Some(var.max(0.0).sqrt())
}

pub fn describe(values: &[Option<i64>]) -> Stats {
    let mut present: Vec<i64> = values.iter().flatten().copied().collect();
    let n = present.len() as u64;
    if n == 0 {
        return Stats {
            n: 0,
            sum: None,
            mean: None,
            std_sample: None,
            min: None,
            max: None,
            median: None,
        };
    }
    let (sum, sum_sq) = present.iter().fold((0i128, 0i128), |(s, q), &x| {
        let x = i128::from(x);
        (s + x, q + x * x)
    });
    let mid = (present.len() - 1) / 2;
    let (_, median, _) = present.select_nth_unstable(mid);
    let median = *median;
    Stats {
        n,
        sum: Some(sum),
        mean: Some(Mean {
            numerator: sum,
            denominator: n,
        }),
        std_sample: sample_std(n, sum, sum_sq),
        min: present.iter().min().copied(),
        max: present.iter().max().copied(),
        median: Some(median),
    }
}

/// Fixed-width bins `[lo + i·w, lo + (i+1)·w)` plus out-of-range tallies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: i64,
    pub bin_width: i64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    /// Exclusive upper edge of the last bin.
    pub fn hi(&self) -> i128 {
        i128::from(self.lo) + i128::from(self.bin_width) * self.counts.len() as i128
    }

    pub fn left_edge(&self, bin: usize) -> i64 {
        self.lo + self.bin_width * bin as i64
    }

    /// Underflow + overflow + binned values.
    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }
}

pub fn histogram(values: &[Option<i64>], lo: i64, bin_width: i64, bins: usize) -> Result<Histogram> {
    if bin_width <= 0 {
        return Err(EngineError::NonPositiveBinWidth(bin_width));
    }
    if bins == 0 {
        return Err(EngineError::InvalidBinCount);
    }
    let mut h = Histogram {
        lo,
        bin_width,
        counts: vec![0; bins],
        underflow: 0,
        overflow: 0,
    };
    let (lo, w) = (i128::from(lo), i128::from(bin_width));
    for &v in values.iter().flatten() {
        let offset = i128::from(v) - lo;
        if offset < 0 {
            h.underflow += 1;
            continue;
        }
        match usize::try_from(offset / w) {
            Ok(bin) if bin < bins => h.counts[bin] += 1,
            _ => h.overflow += 1,
        }
    }
    Ok(h)
}

/// `below / total` kept as exact counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub below: u64,
    pub total: u64,
}

impl Proportion {
    pub fn value(&self) -> f64 {
        self.below as f64 / self.total as f64
    }
}

/// Share of non-null values strictly less than `threshold`.
pub fn fraction_below(values: &[Option<i64>], threshold: i64) -> Result<Proportion> {
    let (below, total) = values
        .iter()
        .flatten()
        .fold((0u64, 0u64), |(b, t), &v| (b + u64::from(v < threshold), t + 1));
    if total == 0 {
        return Err(EngineError::EmptyColumn);
    }
    Ok(Proportion { below, total })
}

/// Nearest-rank percentile: the element at 1-based rank `⌈p/100·n⌉` of the sorted values,
/// with `p = 0` giving the minimum.
pub fn percentile(values: &[Option<i64>], p: f64) -> Result<i64> {
    if !(0.0..=100.0).contains(&p) {
        return Err(EngineError::InvalidPercentile(p));
    }
    let mut present: Vec<i64> = values.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(EngineError::EmptyColumn);
    }
    let rank = nearest_rank(p, present.len());
    let (_, v, _) = present.select_nth_unstable(rank - 1);
    Ok(*v)
}

pub(crate) fn nearest_rank(p: f64, n: usize) -> usize {
    let rank = (p / 100.0 * n as f64).ceil() as usize;
    rank.clamp(1, n)
}
