use super::Outcome;
use crate::dist_core::{dkw_count, DistAccess};
use crate::error::{param, Error, Result};

/// Margin `c` in `ε < 1/2 - c` for the plain von Neumann corrector.
const VN_MARGIN: f64 = 0.01;
/// Rounds of bit assembly before giving up when `n` is not a power of two.
const MAX_ROUNDS: usize = 64;

fn bits_for(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Pair attempts per bit, `⌈ln(2/δ′)/ln(1/(1-c))⌉`. A pair of draws yields a
/// bit unless both land on the same side, which has probability at most
/// `1 - c` when the side probability lies in `[c, 1-c]`.
pub fn vn_pair_budget(c: f64, delta_bit: f64) -> usize {
    ((2.0 / delta_bit).ln() / (1.0 / (1.0 - c)).ln()).ceil() as usize
}

/// One unbiased bit from pairs of draws split at `split`: `(low, high)`
/// gives 0 and `(high, low)` gives 1.
fn vn_bit(access: &mut DistAccess, split: usize, pairs: usize) -> Result<Option<usize>> {
    for _ in 0..pairs {
        let a = access.draw()? > split;
        let b = access.draw()? > split;
        if a != b {
            return Ok(Some(a as usize));
        }
    }
    Ok(None)
}

/// Uniform element of `{1..n}` from `⌈log2 n⌉` extracted bits, redrawing
/// values past `n`.
fn assemble(access: &mut DistAccess, split: usize, pairs: usize) -> Result<Outcome> {
    let n = access.n();
    if n == 1 {
        return Ok(Outcome::Value(1));
    }
    let bits = bits_for(n);
    for _ in 0..MAX_ROUNDS {
        let mut v = 0usize;
        for i in 0..bits {
            match vn_bit(access, split, pairs)? {
                Some(b) => v |= b << i,
                None => return Ok(Outcome::Fail),
            }
        }
        if v < n {
            return Ok(Outcome::Value(v + 1));
        }
    }
    Ok(Outcome::Fail)
}

/// Uniform sample of `{1..n}` from an input `ε`-close to uniform, splitting
/// the domain into `{1..⌊n/2⌋}` and the rest. Fails with probability at most
/// `δ` per assembled value.
pub fn vn_sample(access: &mut DistAccess, eps: f64, delta: f64) -> Result<Outcome> {
    if !(0.0..0.5 - VN_MARGIN).contains(&eps) {
        return Err(Error::OutOfRegime(format!("eps = {eps} must lie in [0, 0.49)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return param("delta must lie in (0, 1)");
    }
    let n = access.n();
    let delta_bit = delta / bits_for(n).max(1) as f64;
    assemble(access, n / 2, vn_pair_budget(VN_MARGIN, delta_bit))
}

/// Uniform randomness drawn from an input close to monotone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotoneExtractor {
    /// The input is close to all mass on element 1.
    PointMass,
    /// Bits come from which side of `split` each draw lands on.
    Split { split: usize, pairs: usize },
}

impl MonotoneExtractor {
    /// Learns the cdf to Kolmogorov distance `ε/4` with probability
    /// `1 - δ/2` and locates `m̂ = min{i : F̂(i) ≥ 1 - ε/2}`. When `m̂ = 1` the
    /// input is close to a point mass. Otherwise the split is `m̂ - 1`, the
    /// last index where `F̂` stays below `1 - ε/2`, and the side probability
    /// then lies in `[1/2 - 3ε, 1 - ε/4]`.
    pub fn calibrate(access: &mut DistAccess, eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 / 3.0) {
            return param(format!("eps = {eps} must lie in (0, 1/3)"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return param("delta must lie in (0, 1)");
        }
        let c = (eps / 4.0).min(0.5 - 3.0 * eps);
        if c <= 0.0 {
            return Err(Error::OutOfRegime(format!(
                "eps = {eps} leaves no margin 1/2 - 3ε for the side probability"
            )));
        }
        let n = access.n();
        let m = dkw_count(eps / 4.0, delta / 2.0);
        let mut counts = vec![0usize; n];
        for _ in 0..m {
            counts[access.draw()? - 1] += 1;
        }
        let target = (1.0 - eps / 2.0) * m as f64;
        let mut acc = 0usize;
        let mut m_hat = n;
        for (i, &k) in counts.iter().enumerate() {
            acc += k;
            if acc as f64 >= target {
                m_hat = i + 1;
                break;
            }
        }
        if m_hat == 1 {
            return Ok(MonotoneExtractor::PointMass);
        }
        let delta_bit = delta / 2.0 / bits_for(n).max(1) as f64;
        Ok(MonotoneExtractor::Split {
            split: m_hat - 1,
            pairs: vn_pair_budget(c, delta_bit),
        })
    }

    pub fn sample(&self, access: &mut DistAccess) -> Result<Outcome> {
        match *self {
            MonotoneExtractor::PointMass => Ok(Outcome::PointMass),
            MonotoneExtractor::Split { split, pairs } => assemble(access, split, pairs),
        }
    }
}

/// Calibrates and extracts a single value.
pub fn randomness_from_monotone(access: &mut DistAccess, eps: f64, delta: f64) -> Result<Outcome> {
    MonotoneExtractor::calibrate(access, eps, delta)?.sample(access)
}
