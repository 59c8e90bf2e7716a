//! Improvers for uniformity on `Z_n` that spend no randomness of their own.
//!
//! Element `x ∈ {1..n}` stands for the residue `x - 1`. Every procedure here
//! is a deterministic function of the input draws, so the output
//! distribution is fixed once the input distribution and the parameters are.

mod convolution;
mod subgroup;
mod vn;

pub use convolution::{
    convolution_order, hybrid_coin_bias, BootstrapImprover, ConvolutionImprover, HybridImprover,
};
pub use subgroup::{conditional_on_subgroup, find_subgroup_generator, SubgroupImprover};
pub use vn::{randomness_from_monotone, vn_pair_budget, vn_sample, MonotoneExtractor};

use serde::Serialize;

use crate::dist_core::Pmf;
use crate::error::{param, Result};

/// Uniform on the residues `{⌊εn/2⌋, …}` forming an interval of length
/// `⌊(1-ε)n⌋` centred in `Z_n`. Its distance to uniform is `ε` up to rounding,
/// and one self-convolution only brings it to about `ε + ¾ε²`, so the
/// squaring bound is tight to second order.
pub fn interval_instance(n: usize, eps: f64) -> Result<Pmf> {
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps must lie in (0, 1), got {eps}"));
    }
    let len = ((1.0 - eps) * n as f64).floor() as usize;
    if len == 0 {
        return param(format!("n = {n} too small for eps = {eps}"));
    }
    let lo = (n - len) / 2;
    Pmf::from_weights((0..n).map(|r| if (lo..lo + len).contains(&r) { 1.0 } else { 0.0 }).collect())
}

/// Result of a procedure that may abstain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Value(usize),
    /// Permitted failure, at most the stated `δ` in probability.
    Fail,
    /// The input is close to all mass on element 1; no randomness available.
    PointMass,
}

impl Outcome {
    pub fn value(self) -> Option<usize> {
        match self {
            Outcome::Value(x) => Some(x),
            _ => None,
        }
    }
}

/// A cyclic group `Z_n` and optionally the subgroup generated by `h | n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupSpec {
    pub n: usize,
    pub subgroup_gen: Option<usize>,
}

impl GroupSpec {
    pub fn new(n: usize, subgroup_gen: Option<usize>) -> Result<Self> {
        if n == 0 {
            return param("group order must be positive");
        }
        if let Some(h) = subgroup_gen {
            if h == 0 || n % h != 0 {
                return param(format!("subgroup generator {h} must divide {n}"));
            }
        }
        Ok(GroupSpec { n, subgroup_gen })
    }

    /// Order of the subgroup, or of the whole group.
    pub fn order(&self) -> usize {
        self.subgroup_gen.map_or(self.n, |h| self.n / h)
    }

    /// Whether the 1-based element `x` lies in the subgroup.
    pub fn contains(&self, x: usize) -> bool {
        self.subgroup_gen.is_none_or(|h| (x - 1) % h == 0)
    }
}

/// Derived constants of the convolution-based improvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImproverSchedule {
    /// Convolution order for the plain improver.
    pub k: usize,
    /// Bias of the same-half coin, when the input pmf is known.
    pub p0: Option<f64>,
    /// Number of bootstrapping stages.
    pub boot_k: usize,
    /// Per-stage target of the bootstrapping improver.
    pub boot_alpha: f64,
}

impl ImproverSchedule {
    pub fn new(eps: f64, eps2: f64) -> Result<Self> {
        let k = convolution_order(eps, eps2)?;
        let (boot_k, boot_alpha) = convolution::bootstrap_depth(eps, eps2)?;
        Ok(ImproverSchedule {
            k,
            p0: None,
            boot_k,
            boot_alpha,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_spec_checks_divisibility() {
        assert!(GroupSpec::new(30, Some(7)).is_err());
        let g = GroupSpec::new(30, Some(3)).unwrap();
        assert_eq!(g.order(), 10);
        assert!(g.contains(1) && g.contains(4) && !g.contains(2));
        assert_eq!(GroupSpec::new(8, None).unwrap().order(), 8);
    }

    #[test]
    fn interval_instance_shape() {
        let d = interval_instance(100, 0.2).unwrap();
        assert_eq!(d.probs().iter().filter(|&&x| x > 0.0).count(), 80);
        assert!(d.at(11) > 0.0 && d.at(10) == 0.0 && d.at(90) > 0.0 && d.at(91) == 0.0);
        let u = Pmf::uniform(100);
        assert!((crate::dist_core::tv_distance(&d, &u).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn schedule_example() {
        let s = ImproverSchedule::new(0.25, 0.05).unwrap();
        assert_eq!(s.boot_k, 3);
        assert!((s.boot_alpha - 0.0015625).abs() < 1e-15);
        // ½(0.5)^k ≤ 0.05 first at k = 4
        assert_eq!(s.k, 4);
    }
}
