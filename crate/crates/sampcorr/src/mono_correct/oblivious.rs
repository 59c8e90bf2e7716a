use crate::birge::{birge_partition, IntervalPartition};
use crate::dist_core::{DistAccess, Pmf};
use crate::error::{param, Error, Result};
use crate::rng::Coins;

/// Fixed decreasing staircase mixed into the input.
///
/// With step ratios `r_j = |I_{j+1}|/|I_j|`, the added interval masses are
/// `a_k = 0` and `a_j = (a_{j+1} + ε(1+r_j)) / min(1, r_j)`. For a constant
/// ratio `1+c` this is `ε(k-j)(2+c)`; the `min` only matters for a truncated
/// last interval. Any histogram that is `ε`-close to non-increasing satisfies
/// `D(I_{j+1}) ≤ r_j·D(I_j) + ε(1+r_j)`, which is exactly what the staircase
/// compensates.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliviousPlan {
    pub eps: f64,
    pub lengths: Vec<usize>,
    pub additive: Vec<f64>,
    /// `1 / (1 + Σ_j a_j)`.
    pub lambda: f64,
}

impl ObliviousPlan {
    /// Plan for arbitrary interval lengths.
    pub fn new(lengths: &[usize], eps: f64) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return param("interval lengths must be positive");
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return param(format!("eps must be non-negative, got {eps}"));
        }
        let k = lengths.len();
        let mut additive = vec![0.0; k];
        for j in (0..k - 1).rev() {
            let r = lengths[j + 1] as f64 / lengths[j] as f64;
            additive[j] = (additive[j + 1] + eps * (1.0 + r)) / r.min(1.0);
        }
        let total: f64 = additive.iter().sum();
        if total >= 1.0 {
            return Err(Error::OutOfRegime(format!(
                "staircase mass {total} is not below 1"
            )));
        }
        Ok(ObliviousPlan {
            eps,
            lengths: lengths.to_vec(),
            additive,
            lambda: 1.0 / (1.0 + total),
        })
    }

    /// Plan requiring every step ratio to equal `1 + c`.
    pub fn with_ratio(lengths: &[usize], c: f64, eps: f64) -> Result<Self> {
        for w in lengths.windows(2) {
            let r = w[1] as f64 / w[0] as f64;
            if (r - (1.0 + c)).abs() > 1e-9 {
                return param(format!("interval ratio {r} differs from {}", 1.0 + c));
            }
        }
        Self::new(lengths, eps)
    }

    pub fn k(&self) -> usize {
        self.lengths.len()
    }

    /// Upper bound on the total variation distance between input and output:
    /// `(1 - (1-A)/(1+A)) / 2` with `A = Σ_j a_j`.
    pub fn tv_bound(&self) -> f64 {
        let a: f64 = self.additive.iter().sum();
        0.5 * (1.0 - (1.0 - a) / (1.0 + a))
    }
}

/// `D̃(I_j) = λ(D(I_j) + a_j)`. Fails if some step exceeds what an
/// `ε`-close input allows.
pub fn oblivious_correct(hist_masses: &[f64], plan: &ObliviousPlan) -> Result<Vec<f64>> {
    if hist_masses.len() != plan.k() {
        return Err(Error::SizeMismatch(hist_masses.len(), plan.k()));
    }
    for j in 0..plan.k() - 1 {
        let r = plan.lengths[j + 1] as f64 / plan.lengths[j] as f64;
        let cap = r * hist_masses[j] + plan.eps * (1.0 + r);
        if hist_masses[j + 1] > cap + 1e-12 {
            return Err(Error::OutOfRegime(format!(
                "interval {} mass {} exceeds {cap}; input is not eps-close to monotone",
                j + 2,
                hist_masses[j + 1]
            )));
        }
    }
    Ok(hist_masses
        .iter()
        .zip(&plan.additive)
        .map(|(d, a)| plan.lambda * (d + a))
        .collect())
}

/// Promised distance under which the oblivious corrector with target
/// `eps_prime` is run: `ε′³ / (10 log₂² n)`.
pub fn oblivious_promise(n: usize, eps_prime: f64) -> f64 {
    let lg = (n.max(2) as f64).log2();
    eps_prime.powi(3) / (10.0 * lg * lg)
}

/// Corrector for inputs promised to be very close to non-increasing:
/// flattening on a partition with `α = ε′/2`, then the staircase mixture.
#[derive(Debug, Clone)]
pub struct ObliviousCorrector {
    pub part: IntervalPartition,
    pub plan: ObliviousPlan,
    staircase: Vec<f64>,
}

impl ObliviousCorrector {
    pub fn new(n: usize, eps_prime: f64) -> Result<Self> {
        Self::with_promise(n, eps_prime, oblivious_promise(n, eps_prime))
    }

    pub fn with_promise(n: usize, eps_prime: f64, eps: f64) -> Result<Self> {
        if !(eps_prime > 0.0 && eps_prime < 1.0) {
            return param(format!("eps' must lie in (0,1), got {eps_prime}"));
        }
        let part = birge_partition(n, eps_prime / 2.0)?;
        let plan = ObliviousPlan::new(&part.lengths(), eps)?;
        Ok(ObliviousCorrector {
            staircase: plan.additive.clone(),
            part,
            plan,
        })
    }

    /// Output pmf for a known input.
    pub fn correct_exact(&self, d: &Pmf) -> Result<Pmf> {
        let masses = self.part.masses(d)?;
        let out = oblivious_correct(&masses, &self.plan)?;
        self.part.spread(&out)
    }

    /// One output: with probability `λ` a draw from the input spread over its
    /// interval, otherwise a draw from the staircase.
    pub fn sample(&self, access: &mut DistAccess, coins: &mut Coins) -> Result<usize> {
        let k = if coins.bernoulli(self.plan.lambda) {
            self.part.locate(access.draw()?)
        } else {
            coins.weighted(&self.staircase)
        };
        let (lo, hi) = self.part.interval(k);
        Ok(coins.range(lo, hi))
    }
}
