//! Exact L1 projection onto non-increasing histograms of total mass 1.
//!
//! The problem is the linear program
//!
//! ```text
//! minimize   Σ_j w_j |x_j - y_j|
//! subject to x_1 ≥ x_2 ≥ … ≥ x_ℓ ≥ 0,   Σ_j w_j x_j = 1
//! ```
//!
//! Dualizing the mass constraint with multiplier `μ ∈ (-1, 1)` leaves a
//! weighted isotonic quantile regression at level `τ = (1+μ)/2`, which pool
//! adjacent violators solves exactly. The mass of that solution is
//! non-decreasing in `τ`; bisecting on `τ` isolates the multiplier where it
//! crosses 1, and the mass-1 point on the segment between the two one-sided
//! solutions there is optimal for the original program.

use serde::{Deserialize, Serialize};

use crate::dist_core::Pmf;
use crate::error::{Error, Result};

/// Largest domain accepted by [`distance_to_monotone_exact`].
pub const ORACLE_LIMIT: usize = 10_000;

/// Piecewise-constant histogram: `levels[j]` is the per-element mass on an
/// interval of `lengths[j]` elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedHistogram {
    pub levels: Vec<f64>,
    pub lengths: Vec<usize>,
}

impl WeightedHistogram {
    pub fn new(levels: Vec<f64>, lengths: Vec<usize>) -> Result<Self> {
        if levels.len() != lengths.len() {
            return Err(Error::SizeMismatch(levels.len(), lengths.len()));
        }
        if levels.is_empty() {
            return Err(Error::Parameter("empty histogram".into()));
        }
        if lengths.contains(&0) {
            return Err(Error::Parameter("interval lengths must be positive".into()));
        }
        if levels.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Parameter("levels must be non-negative".into()));
        }
        Ok(WeightedHistogram { levels, lengths })
    }

    /// Histogram of interval masses over the given lengths.
    pub fn from_masses(masses: &[f64], lengths: &[usize]) -> Result<Self> {
        let levels = masses
            .iter()
            .zip(lengths)
            .map(|(m, &l)| m / l as f64)
            .collect();
        Self::new(levels, lengths.to_vec())
    }

    pub fn mass(&self) -> f64 {
        weighted_sum(&self.levels, &self.lengths)
    }

    pub fn masses(&self) -> Vec<f64> {
        self.levels
            .iter()
            .zip(&self.lengths)
            .map(|(x, &l)| x * l as f64)
            .collect()
    }

    /// `Σ_j w_j |x_j - y_j|` against `other`.
    pub fn l1(&self, other: &[f64]) -> f64 {
        self.levels
            .iter()
            .zip(other)
            .zip(&self.lengths)
            .map(|((x, y), &l)| l as f64 * (x - y).abs())
            .sum()
    }
}

fn weighted_sum(levels: &[f64], lengths: &[usize]) -> f64 {
    levels.iter().zip(lengths).map(|(x, &l)| x * l as f64).sum()
}

struct Block {
    // sorted by value
    items: Vec<(f64, f64)>,
    weight: f64,
    level: f64,
    count: usize,
}

fn lower_quantile(items: &[(f64, f64)], weight: f64, tau: f64) -> f64 {
    let target = tau * weight;
    let mut acc = 0.0;
    for &(v, w) in items {
        acc += w;
        if acc >= target {
            return v;
        }
    }
    items.last().unwrap().0
}

fn merge_sorted(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].0 <= b[j].0 {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Non-increasing weighted lower-`τ`-quantile regression by pooling adjacent
/// violators.
fn quantile_pava(y: &[f64], w: &[f64], tau: f64) -> Vec<f64> {
    let mut stack: Vec<Block> = Vec::with_capacity(y.len());
    for (&v, &wt) in y.iter().zip(w) {
        let mut cur = Block {
            items: vec![(v, wt)],
            weight: wt,
            level: v,
            count: 1,
        };
        while let Some(prev) = stack.last() {
            if prev.level >= cur.level {
                break;
            }
            let prev = stack.pop().unwrap();
            let items = merge_sorted(prev.items, cur.items);
            let weight = prev.weight + cur.weight;
            cur = Block {
                level: lower_quantile(&items, weight, tau),
                items,
                weight,
                count: prev.count + cur.count,
            };
        }
        stack.push(cur);
    }
    let mut out = Vec::with_capacity(y.len());
    for b in stack {
        out.extend(std::iter::repeat_n(b.level, b.count));
    }
    out
}

/// Closest non-increasing mass-1 histogram in length-weighted L1, together
/// with the optimal objective `Σ_j |I_j|·|x_j - y_j|`.
///
/// When the optimum is not unique the result is the mass-1 point between the
/// smallest and largest optimal quantile fits at the optimal multiplier.
pub fn closest_monotone_histogram(h: &WeightedHistogram) -> Result<(WeightedHistogram, f64)> {
    let h = WeightedHistogram::new(h.levels.clone(), h.lengths.clone())?;
    if h.levels.iter().all(|&x| x == 0.0) {
        return Err(Error::Infeasible("all-zero histogram cannot be normalized".into()));
    }
    let y = &h.levels;
    let w: Vec<f64> = h.lengths.iter().map(|&l| l as f64).collect();
    let mass = |x: &[f64]| weighted_sum(x, &h.lengths);

    let finish = |levels: Vec<f64>| {
        let out = WeightedHistogram {
            levels,
            lengths: h.lengths.clone(),
        };
        let cost = out.l1(y);
        Ok((out, cost))
    };

    // Smallest non-increasing majorant; optimal for every multiplier near 1.
    let mut upper = y.clone();
    for j in (0..upper.len().saturating_sub(1)).rev() {
        upper[j] = upper[j].max(upper[j + 1]);
    }
    let m_upper = mass(&upper);
    if m_upper <= 1.0 {
        upper[0] += (1.0 - m_upper) / w[0];
        return finish(upper);
    }
    // Largest non-increasing minorant; optimal for every multiplier near -1.
    let mut lower = y.clone();
    for j in 1..lower.len() {
        lower[j] = lower[j].min(lower[j - 1]);
    }
    let m_lower = mass(&lower);
    if m_lower >= 1.0 {
        return finish(lower.iter().map(|x| x / m_lower).collect());
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut xa, mut ma) = (lower, m_lower);
    let (mut xb, mut mb) = (upper, m_upper);
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        // off-centre split so probes avoid the dyadic breakpoints
        let mid = lo + (hi - lo) * 0.497_793_1;
        let x = quantile_pava(y, &w, mid);
        let m = mass(&x);
        if m < 1.0 {
            lo = mid;
            xa = x;
            ma = m;
        } else {
            hi = mid;
            xb = x;
            mb = m;
        }
    }
    let theta = (1.0 - ma) / (mb - ma);
    let levels = xa
        .iter()
        .zip(&xb)
        .map(|(a, b)| (a + theta * (b - a)).max(0.0))
        .collect();
    finish(levels)
}

/// Masses of the closest monotone histogram to interval masses `masses`
/// over intervals of the given lengths.
pub fn project_masses(masses: &[f64], lengths: &[usize]) -> Result<Vec<f64>> {
    let h = WeightedHistogram::from_masses(masses, lengths)?;
    Ok(closest_monotone_histogram(&h)?.0.masses())
}

fn check_oracle_size(d: &Pmf) -> Result<()> {
    if d.n() > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n: d.n(),
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

/// Total variation distance from `d` to the set of non-increasing pmfs.
pub fn distance_to_monotone_exact(d: &Pmf) -> Result<f64> {
    check_oracle_size(d)?;
    let h = WeightedHistogram::new(d.probs().to_vec(), vec![1; d.n()])?;
    Ok(closest_monotone_histogram(&h)?.1 / 2.0)
}

/// A closest non-increasing pmf to `d` in total variation.
pub fn closest_monotone_pmf(d: &Pmf) -> Result<Pmf> {
    check_oracle_size(d)?;
    let h = WeightedHistogram::new(d.probs().to_vec(), vec![1; d.n()])?;
    Pmf::from_weights(closest_monotone_histogram(&h)?.0.levels)
}
