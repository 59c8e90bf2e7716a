use crate::birge::{birge_partition, IntervalPartition};
use crate::dist_core::{dkw_count, DistAccess, Mode, Pmf};
use crate::error::{param, Error, Result};
use crate::isotonic::project_masses;
use crate::rng::Coins;

/// Output of the learn-then-project corrector.
#[derive(Debug, Clone)]
pub struct LearnedCorrector {
    pub part: IntervalPartition,
    /// The corrected, non-increasing distribution.
    pub pmf: Pmf,
    /// Input draws consumed while learning.
    pub samples_used: usize,
}

/// Learns the histogram of the input on a geometric partition with
/// `α = cε/3` and projects it onto non-increasing histograms.
///
/// Exact mode reads interval masses off the known pmf. Sample mode draws
/// `⌈ln(2/δ)/(2(ε/6)²)⌉` samples, enough for the empirical cdf to be within
/// Kolmogorov distance `ε/6` with probability `1 - δ`.
pub fn learned_corrector_build(
    access: &mut DistAccess,
    eps: f64,
    c: f64,
    delta: f64,
    mode: Mode,
) -> Result<LearnedCorrector> {
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps must lie in (0,1), got {eps}"));
    }
    if c <= 0.0 {
        return param("c must be positive");
    }
    let n = access.n();
    let part = birge_partition(n, c * eps / 3.0)?;
    let (masses, samples_used) = match mode {
        Mode::Exact => {
            let d = access
                .exact_pmf()
                .ok_or(Error::Capability("exact pmf"))?;
            (part.masses(d)?, 0)
        }
        Mode::Sample => {
            if !(delta > 0.0 && delta < 1.0) {
                return param("delta must lie in (0,1) in sample mode");
            }
            let m = dkw_count(eps / 6.0, delta);
            let draws = access.draw_many(m)?;
            let mut masses = vec![0.0; part.ell()];
            for x in draws {
                masses[part.locate(x)] += 1.0 / m as f64;
            }
            (masses, m)
        }
    };
    let projected = project_masses(&masses, &part.lengths())?;
    let pmf = part.spread(&projected)?;
    Ok(LearnedCorrector {
        part,
        pmf,
        samples_used,
    })
}

impl LearnedCorrector {
    /// One output; uses only the corrector's own coins.
    pub fn sample(&self, coins: &mut Coins) -> usize {
        coins.weighted(self.pmf.probs()) + 1
    }
}
