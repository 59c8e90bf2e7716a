//! Oblivious geometric interval decomposition of `{1..n}` and the flattening
//! map that averages a pmf within each interval.

use serde::Serialize;

use crate::dist_core::Pmf;
use crate::error::{param, Error, Result};

/// Consecutive intervals covering `{1..n}`, stored as right endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalPartition {
    n: usize,
    alpha: f64,
    bounds: Vec<usize>,
}

/// Intervals of sizes `⌊(1+α)^k⌋`, `k = 1, 2, ..`, emitted greedily; when the
/// remainder is smaller than the next size it becomes a final, truncated
/// interval.
pub fn birge_partition(n: usize, alpha: f64) -> Result<IntervalPartition> {
    if n == 0 {
        return param("n must be at least 1");
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return param(format!("alpha must be positive, got {alpha}"));
    }
    let mut bounds = Vec::new();
    let mut end = 0usize;
    let mut k = 1i32;
    while end < n {
        let size = (1.0 + alpha).powi(k).floor();
        let size = if size >= n as f64 { n } else { (size as usize).max(1) };
        end = if size > n - end { n } else { end + size };
        bounds.push(end);
        k += 1;
    }
    Ok(IntervalPartition { n, alpha, bounds })
}

impl IntervalPartition {
    /// Arbitrary partition from strictly increasing right endpoints ending at
    /// `n`. `alpha` is recorded as 0.
    pub fn from_bounds(n: usize, bounds: Vec<usize>) -> Result<Self> {
        if bounds.last() != Some(&n) || bounds[0] == 0 {
            return param("right endpoints must be positive and end at n");
        }
        if !bounds.windows(2).all(|w| w[0] < w[1]) {
            return param("right endpoints must be strictly increasing");
        }
        Ok(IntervalPartition {
            n,
            alpha: 0.0,
            bounds,
        })
    }

    /// One interval per element.
    pub fn singletons(n: usize) -> Self {
        IntervalPartition {
            n,
            alpha: 0.0,
            bounds: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of intervals.
    pub fn ell(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// 1-based inclusive endpoints of the 0-based interval `k`.
    pub fn interval(&self, k: usize) -> (usize, usize) {
        let lo = if k == 0 { 1 } else { self.bounds[k - 1] + 1 };
        (lo, self.bounds[k])
    }

    pub fn len(&self, k: usize) -> usize {
        let (lo, hi) = self.interval(k);
        hi - lo + 1
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn lengths(&self) -> Vec<usize> {
        (0..self.ell()).map(|k| self.len(k)).collect()
    }

    /// Index of the interval holding the 1-based element `x`.
    pub fn locate(&self, x: usize) -> usize {
        self.bounds.partition_point(|&b| b < x)
    }

    /// Interval masses of `d`.
    pub fn masses(&self, d: &Pmf) -> Result<Vec<f64>> {
        if d.n() != self.n {
            return Err(Error::SizeMismatch(d.n(), self.n));
        }
        Ok((0..self.ell())
            .map(|k| {
                let (lo, hi) = self.interval(k);
                d.mass(lo, hi)
            })
            .collect())
    }

    /// Per-element vector that is `levels[k]` on interval `k`.
    pub fn expand(&self, levels: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        for (k, &v) in levels.iter().enumerate() {
            out.extend(std::iter::repeat_n(v, self.len(k)));
        }
        out
    }

    /// The pmf that spreads `masses[k]` evenly over interval `k`.
    pub fn spread(&self, masses: &[f64]) -> Result<Pmf> {
        let levels: Vec<f64> = masses
            .iter()
            .enumerate()
            .map(|(k, m)| m / self.len(k) as f64)
            .collect();
        Pmf::from_weights(self.expand(&levels))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.bounds).expect("bounds serialize")
    }
}

/// Averages `d` within each interval; preserves interval masses.
pub fn flatten(d: &Pmf, part: &IntervalPartition) -> Result<Pmf> {
    let masses = part.masses(d)?;
    part.spread(&masses)
}
