//! Corrector with cdf-query access.
//!
//! The flattened input is grouped into `K` superbuckets of `L` consecutive
//! buckets. Preprocessing learns the superbucket masses with `K` cdf queries
//! and reweights them so that superbucket averages are non-increasing. Each
//! superbucket also receives a budget `b_j = D2(S_j)/(1+ε)`.
//!
//! At sampling time a superbucket is drawn, its buckets and those of its left
//! neighbour are queried (once, then cached) and corrected locally, and the
//! boundary between the two is repaired by pouring mass from the head of the
//! right superbucket into the tail of the left one. Unused budget sends the
//! sampler back to the start, which redistributes it proportionally.
//!
//! All quantities are kept in unnormalized units where superbucket `j` holds
//! `D2(S_j)` plus its budget. Since `λ3 = (1+ε)/(2+ε)`, normalizing gives
//! back `D3(S_j) = D2(S_j)` exactly.

use crate::birge::{birge_partition, IntervalPartition};
use crate::dist_core::{DistAccess, Pmf};
use crate::error::{param, Error, Result};
use crate::isotonic::{closest_monotone_histogram, WeightedHistogram};
use crate::rng::Coins;

/// Non-increasing bucket levels of one superbucket together with its
/// average level `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    /// Per-element mass of each bucket.
    pub levels: Vec<f64>,
    pub lengths: Vec<usize>,
    pub mu: f64,
}

impl Staircase {
    /// Mass above level `t`.
    fn above(&self, t: f64) -> f64 {
        self.levels
            .iter()
            .zip(&self.lengths)
            .map(|(w, &l)| l as f64 * (w - t).max(0.0))
            .sum()
    }

    /// Mass needed to raise every bucket to at least `s`.
    fn below(&self, s: f64) -> f64 {
        self.levels
            .iter()
            .zip(&self.lengths)
            .map(|(v, &l)| l as f64 * (s - v).max(0.0))
            .sum()
    }

    /// Mass above the average.
    pub fn surplus(&self) -> f64 {
        self.above(self.mu)
    }

    /// Mass missing below the average.
    pub fn deficit(&self) -> f64 {
        self.below(self.mu)
    }

    fn max(&self) -> f64 {
        self.levels[0]
    }

    fn min(&self) -> f64 {
        *self.levels.last().unwrap()
    }
}

/// Outcome of repairing the boundary between superbuckets `i` and `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRecord {
    /// Budget of `S_{i+1}` left unused.
    pub unused: f64,
    /// Mass moved from the head of `S_{i+1}` to the first bucket of the domain.
    pub front: f64,
    /// Mass added to each bucket of `S_i`.
    pub increments: Vec<f64>,
    /// Levels of `S_{i+1}` are capped at this value.
    pub head_cap: f64,
    /// Budget spent on the pour.
    pub budget_used: f64,
}

impl BoundaryRecord {
    pub fn poured(&self) -> f64 {
        self.increments.iter().sum()
    }
}

/// Level `t` where the head of `right` lowered to `t` exactly fills the tail
/// of `left` raised to `t`. The difference of the two is piecewise linear, so
/// it is evaluated at every level and interpolated on the bracketing segment.
fn meeting_level(left: &Staircase, right: &Staircase) -> f64 {
    let (lo, hi) = (left.min(), right.max());
    let g = |t: f64| right.above(t) - left.below(t);
    let mut pts: Vec<f64> = left
        .levels
        .iter()
        .chain(&right.levels)
        .copied()
        .filter(|&t| t > lo && t < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    for w in pts.windows(2) {
        let (g0, g1) = (g(w[0]), g(w[1]));
        if g0 >= 0.0 && g1 <= 0.0 {
            if g0 == g1 {
                return w[0];
            }
            return w[0] + (w[1] - w[0]) * g0 / (g0 - g1);
        }
    }
    hi
}

/// Repairs the boundary between `left = S_i` and `right = S_{i+1}`.
///
/// The head of `right` may drop to its average and the tail of `left` may
/// rise to its average. If they meet in between, the pour is free. If
/// `right` runs dry first, the difference comes out of `budget`; exceeding
/// it is a promise violation. If `left` fills first, the remaining excess of
/// `right` above `left`'s average moves to the front of the domain.
pub fn water_boundary_correction(
    left: &Staircase,
    right: &Staircase,
    budget: f64,
) -> Result<BoundaryRecord> {
    let untouched = |unused| BoundaryRecord {
        unused,
        front: 0.0,
        increments: vec![0.0; left.levels.len()],
        head_cap: f64::INFINITY,
        budget_used: 0.0,
    };
    if right.max() <= left.min() {
        return Ok(untouched(budget));
    }
    let t = meeting_level(left, right);
    let (fill, cap, front, used) = if t > left.mu {
        let fill = left.mu;
        (fill, fill, right.above(fill) - left.below(fill), 0.0)
    } else if t < right.mu {
        let fill = right.mu;
        let used = left.below(fill) - right.above(fill);
        if used > budget * (1.0 + 1e-9) + 1e-15 {
            return Err(Error::PromiseViolation(format!(
                "boundary pour needs {used} but the budget is {budget}"
            )));
        }
        (fill, fill, 0.0, used.clamp(0.0, budget))
    } else {
        (t, t, 0.0, 0.0)
    };
    let increments = left
        .levels
        .iter()
        .zip(&left.lengths)
        .map(|(v, &l)| l as f64 * (fill - v).max(0.0))
        .collect();
    Ok(BoundaryRecord {
        unused: budget - used,
        front: front.max(0.0),
        increments,
        head_cap: cap,
        budget_used: used,
    })
}

/// State of the cdf-query corrector: superbucket layout, reweighted masses,
/// budgets, and the lazily filled caches of local corrections and boundary
/// repairs.
#[derive(Debug, Clone)]
pub struct WaterfillState {
    pub eps: f64,
    pub m: usize,
    part: IntervalPartition,
    k_target: usize,
    l: usize,
    /// Bucket index ranges `[start, end)` of each superbucket.
    sb: Vec<(usize, usize)>,
    sb_len: Vec<usize>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    budgets: Vec<f64>,
    lambda3: f64,
    d3: Vec<f64>,
    cdf_cache: Vec<Option<f64>>,
    local: Vec<Option<Staircase>>,
    boundary: Vec<Option<BoundaryRecord>>,
    queries_used: u64,
    restarts: u64,
    emitted: u64,
}

impl WaterfillState {
    /// Learns superbucket masses with one cdf query per superbucket and sets
    /// up budgets. Uses `K = ⌈√(mℓ)⌉` and `L = ⌈ℓ/K⌉`; the layout keeps
    /// `max(1, ⌊ℓ/L⌋)` superbuckets and the last one absorbs leftover buckets.
    pub fn preprocess(access: &mut DistAccess, eps: f64, m: usize) -> Result<Self> {
        if !access.has_cdf() {
            return Err(Error::Capability("cdf query"));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return param(format!("eps must lie in (0,1], got {eps}"));
        }
        if m == 0 {
            return param("m must be at least 1");
        }
        let part = birge_partition(access.n(), eps)?;
        let ell = part.ell();
        let k_target = ((m * ell) as f64).sqrt().ceil() as usize;
        let l = ell.div_ceil(k_target);
        let k = (ell / l).max(1);
        let sb: Vec<(usize, usize)> = (0..k)
            .map(|j| (j * l, if j + 1 == k { ell } else { (j + 1) * l }))
            .collect();
        let sb_len: Vec<usize> = sb
            .iter()
            .map(|&(a, b)| (a..b).map(|t| part.len(t)).sum())
            .collect();

        let mut state = WaterfillState {
            eps,
            m,
            k_target,
            l,
            sb_len,
            d1: vec![0.0; k],
            d2: vec![0.0; k],
            budgets: vec![0.0; k],
            lambda3: 1.0,
            d3: vec![0.0; k],
            cdf_cache: vec![None; ell],
            local: vec![None; k],
            boundary: vec![None; k],
            queries_used: 0,
            restarts: 0,
            emitted: 0,
            sb,
            part,
        };
        let mut prev = 0.0;
        for j in 0..k {
            let c = state.bucket_cdf(access, state.sb[j].1 - 1)?;
            state.d1[j] = (c - prev).max(0.0);
            prev = c;
        }
        let h = WeightedHistogram::from_masses(&state.d1, &state.sb_len)?;
        state.d2 = closest_monotone_histogram(&h)?
            .0
            .masses()
            .into_iter()
            .map(|x| x.max(0.0))
            .collect();
        state.budgets = state.d2.iter().map(|d| d / (1.0 + eps)).collect();
        state.lambda3 = 1.0 / (1.0 + state.budgets.iter().sum::<f64>());
        state.d3 = state
            .d2
            .iter()
            .zip(&state.budgets)
            .map(|(d, b)| state.lambda3 * (d + b))
            .collect();
        Ok(state)
    }

    fn bucket_cdf(&mut self, access: &mut DistAccess, bucket: usize) -> Result<f64> {
        if let Some(c) = self.cdf_cache[bucket] {
            return Ok(c);
        }
        let c = access.ceval(self.part.bounds()[bucket])?;
        self.queries_used += 1;
        self.cdf_cache[bucket] = Some(c);
        Ok(c)
    }

    /// Number of superbuckets.
    pub fn k(&self) -> usize {
        self.sb.len()
    }

    /// `⌈√(mℓ)⌉`, the target superbucket count.
    pub fn k_target(&self) -> usize {
        self.k_target
    }

    /// Buckets per superbucket.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn partition(&self) -> &IntervalPartition {
        &self.part
    }

    pub fn superbucket_masses(&self) -> &[f64] {
        &self.d3
    }

    pub fn reweighted_masses(&self) -> &[f64] {
        &self.d2
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }

    /// Average level of each superbucket after reweighting.
    pub fn averages(&self) -> Vec<f64> {
        self.d2
            .iter()
            .zip(&self.sb_len)
            .map(|(d, &s)| d / s as f64)
            .collect()
    }

    pub fn queries_used(&self) -> u64 {
        self.queries_used
    }

    pub fn restarts(&self) -> u64 {
        self.restarts
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Bucket masses of `S_j` under the flattened input, queried on demand.
    fn bucket_masses(&mut self, access: &mut DistAccess, j: usize) -> Result<Vec<f64>> {
        let (a, b) = self.sb[j];
        let mut prev = if a == 0 {
            0.0
        } else {
            self.bucket_cdf(access, a - 1)?
        };
        let mut out = Vec::with_capacity(b - a);
        for t in a..b {
            let c = self.bucket_cdf(access, t)?;
            out.push((c - prev).max(0.0));
            prev = c;
        }
        Ok(out)
    }

    /// Local correction of `S_j`: the conditional on `S_j` projected onto
    /// non-increasing histograms and scaled to `D2(S_j)`.
    pub fn local(&mut self, access: &mut DistAccess, j: usize) -> Result<&Staircase> {
        if self.local[j].is_none() {
            let masses = self.bucket_masses(access, j)?;
            let (a, b) = self.sb[j];
            let lengths: Vec<usize> = (a..b).map(|t| self.part.len(t)).collect();
            let total: f64 = masses.iter().sum();
            let cond: Vec<f64> = if total > 0.0 {
                masses
                    .iter()
                    .zip(&lengths)
                    .map(|(m, &l)| m / total / l as f64)
                    .collect()
            } else {
                vec![1.0 / self.sb_len[j] as f64; b - a]
            };
            let h = WeightedHistogram::new(cond, lengths.clone())?;
            let (proj, _) = closest_monotone_histogram(&h)?;
            let d2 = self.d2[j];
            self.local[j] = Some(Staircase {
                levels: proj.levels.iter().map(|x| x * d2).collect(),
                lengths,
                mu: d2 / self.sb_len[j] as f64,
            });
        }
        Ok(self.local[j].as_ref().unwrap())
    }

    /// Repair of the boundary between `S_{j-1}` and `S_j`, for `j ≥ 1`.
    pub fn boundary(&mut self, access: &mut DistAccess, j: usize) -> Result<&BoundaryRecord> {
        if j == 0 || j >= self.k() {
            return param(format!("boundary index {j} outside 1..{}", self.k()));
        }
        if self.boundary[j].is_none() {
            let left = self.local(access, j - 1)?.clone();
            let right = self.local(access, j)?.clone();
            let rec = water_boundary_correction(&left, &right, self.budgets[j])?;
            self.boundary[j] = Some(rec);
        }
        Ok(self.boundary[j].as_ref().unwrap())
    }

    /// One output of the corrected distribution.
    pub fn sample(&mut self, access: &mut DistAccess, coins: &mut Coins) -> Result<usize> {
        loop {
            let j = coins.weighted(&self.d3);
            let total = self.d2[j] + self.budgets[j];
            let u = coins.uniform() * total;
            let bucket = if j == 0 {
                // no left neighbour, so the whole budget is unused
                if u < self.budgets[0] {
                    self.restarts += 1;
                    continue;
                }
                let s = self.local(access, 0)?;
                let w = bucket_weights(s, f64::INFINITY);
                coins.weighted(&w)
            } else {
                let rec = self.boundary(access, j)?.clone();
                let mut u = u;
                if u < rec.unused {
                    self.restarts += 1;
                    continue;
                }
                u -= rec.unused;
                if u < rec.front {
                    0
                } else if u - rec.front < rec.poured() {
                    self.sb[j - 1].0 + coins.weighted(&rec.increments)
                } else {
                    let s = self.local[j].as_ref().unwrap();
                    self.sb[j].0 + coins.weighted(&bucket_weights(s, rec.head_cap))
                }
            };
            let (lo, hi) = self.part.interval(bucket);
            self.emitted += 1;
            return Ok(coins.range(lo, hi));
        }
    }

    /// Resolves every superbucket and boundary and returns the bucket masses
    /// of the output, before normalization.
    fn output_bucket_masses(&mut self, access: &mut DistAccess) -> Result<Vec<f64>> {
        let k = self.k();
        for j in 0..k {
            self.local(access, j)?;
        }
        for j in 1..k {
            self.boundary(access, j)?;
        }
        let mut out = vec![0.0; self.part.ell()];
        for j in 0..k {
            let cap = if j == 0 {
                f64::INFINITY
            } else {
                self.boundary[j].as_ref().unwrap().head_cap
            };
            let s = self.local[j].as_ref().unwrap();
            for (t, w) in bucket_weights(s, cap).into_iter().enumerate() {
                out[self.sb[j].0 + t] += w;
            }
            if j >= 1 {
                let rec = self.boundary[j].as_ref().unwrap();
                out[0] += rec.front;
                for (t, w) in rec.increments.iter().enumerate() {
                    out[self.sb[j - 1].0 + t] += w;
                }
            }
        }
        Ok(out)
    }

    /// The output distribution in closed form. Queries every bucket.
    pub fn materialize(&mut self, access: &mut DistAccess) -> Result<Pmf> {
        let masses = self.output_bucket_masses(access)?;
        self.part.spread(&masses)
    }

    /// The reweighted input and its local-only correction, both on the
    /// element domain.
    pub fn intermediate_pmfs(&mut self, access: &mut DistAccess) -> Result<(Pmf, Pmf)> {
        let ell = self.part.ell();
        let mut d2 = vec![0.0; ell];
        let mut local = vec![0.0; ell];
        for j in 0..self.k() {
            let masses = self.bucket_masses(access, j)?;
            let total: f64 = masses.iter().sum();
            let (a, _) = self.sb[j];
            for (t, m) in masses.iter().enumerate() {
                d2[a + t] = if total > 0.0 {
                    self.d2[j] * m / total
                } else {
                    self.d2[j] * self.part.len(a + t) as f64 / self.sb_len[j] as f64
                };
            }
            let s = self.local(access, j)?;
            for (t, w) in bucket_weights(s, f64::INFINITY).into_iter().enumerate() {
                local[a + t] = w;
            }
        }
        Ok((self.part.spread(&d2)?, self.part.spread(&local)?))
    }
}

fn bucket_weights(s: &Staircase, cap: f64) -> Vec<f64> {
    s.levels
        .iter()
        .zip(&s.lengths)
        .map(|(w, &l)| l as f64 * w.min(cap))
        .collect()
}
