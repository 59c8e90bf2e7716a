use num_integer::Integer;

use super::convolution::ConvolutionImprover;
use super::Outcome;
use crate::dist_core::{CorrectorParams, DistAccess, Pmf};
use crate::error::{param, Error, Result};

/// `gcd(n, s_1 - 1, …, s_k - 1)` over `k = ⌈log2(1/ε)⌉ + 1` draws. Including
/// `n` keeps the result a divisor of `n`; if every draw is the identity the
/// result is `n`, the trivial subgroup.
pub fn find_subgroup_generator(access: &mut DistAccess, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 0.49) {
        return param(format!("eps = {eps} must lie in (0, 0.49)"));
    }
    let k = (1.0 / eps).log2().ceil() as usize + 1;
    let mut g = access.n();
    for _ in 0..k {
        g = g.gcd(&(access.draw()? - 1));
    }
    Ok(g)
}

/// The conditional distribution on the subgroup generated by `h`, as a pmf
/// on `Z_n`.
pub fn conditional_on_subgroup(d: &Pmf, h: usize) -> Result<Pmf> {
    let n = d.n();
    if h == 0 || n % h != 0 {
        return param(format!("{h} does not divide {n}"));
    }
    let w: Vec<f64> = (0..n).map(|r| if r % h == 0 { d.probs()[r] } else { 0.0 }).collect();
    if w.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Infeasible("no mass on the subgroup".into()));
    }
    Pmf::from_weights(w)
}

/// Learns the support subgroup, then runs the convolution improver on draws
/// conditioned to land in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgroupImprover {
    pub n: usize,
    /// Estimated generator; the subgroup is `{0, h, 2h, …}`.
    pub h: usize,
    pub inner: ConvolutionImprover,
    /// Rejection attempts allowed per needed draw.
    pub retries: usize,
}

impl SubgroupImprover {
    /// Uses `params.eps`, `params.eps2` and `params.batch`. The retry budget
    /// `⌈ln(10q)/ln(1/(2ε))⌉` keeps each needed draw's failure chance at
    /// `1/(10q)`, since a draw misses the subgroup with probability below `2ε`.
    pub fn build(access: &mut DistAccess, params: &CorrectorParams) -> Result<Self> {
        let h = find_subgroup_generator(access, params.eps)?;
        Self::with_generator(access.n(), h, params)
    }

    pub fn with_generator(n: usize, h: usize, params: &CorrectorParams) -> Result<Self> {
        if h == 0 || n % h != 0 {
            return param(format!("{h} does not divide {n}"));
        }
        let inner = ConvolutionImprover::new(params.eps, params.eps2)?;
        let q = params.batch.max(1) as f64;
        let retries = ((10.0 * q).ln() / (1.0 / (2.0 * params.eps)).ln()).ceil().max(1.0) as usize;
        Ok(SubgroupImprover {
            n,
            h,
            inner,
            retries,
        })
    }

    /// Order of the estimated subgroup.
    pub fn order(&self) -> usize {
        self.n / self.h
    }

    fn draw_in_subgroup(&self, access: &mut DistAccess) -> Result<Option<usize>> {
        for _ in 0..self.retries {
            let r = access.draw()? - 1;
            if r % self.h == 0 {
                return Ok(Some(r / self.h));
            }
        }
        Ok(None)
    }

    pub fn sample(&self, access: &mut DistAccess) -> Result<Outcome> {
        let m = self.order();
        let mut acc = 0usize;
        for _ in 0..self.inner.k {
            match self.draw_in_subgroup(access)? {
                Some(i) => acc = (acc + i) % m,
                None => return Ok(Outcome::Fail),
            }
        }
        Ok(Outcome::Value(acc * self.h + 1))
    }

    /// Output pmf on `Z_n` ignoring the (bounded) failure event.
    pub fn exact(&self, d: &Pmf) -> Result<Pmf> {
        let cond = conditional_on_subgroup(d, self.h)?;
        let m = self.order();
        let idx = Pmf::from_weights((0..m).map(|i| cond.probs()[i * self.h]).collect())?;
        let out = self.inner.exact(&idx)?;
        let mut p = vec![0.0; self.n];
        for (i, &x) in out.probs().iter().enumerate() {
            p[i * self.h] = x;
        }
        Pmf::from_weights(p)
    }
}
