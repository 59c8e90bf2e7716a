use crate::dist_core::{convolve_power, DistAccess, Pmf};
use crate::error::{param, Error, Result};

const MAX_ORDER: usize = 64;

/// Smallest `k ≥ 1` with `½(2ε)^k ≤ ε2`, the guaranteed distance of the
/// `k`-fold self-convolution to uniform.
pub fn convolution_order(eps: f64, eps2: f64) -> Result<usize> {
    if !(0.0..1.0 / std::f64::consts::SQRT_2).contains(&eps) {
        return Err(Error::OutOfRegime(format!(
            "eps = {eps} must lie in [0, 1/√2)"
        )));
    }
    if !(eps2 > 0.0) {
        return param("eps2 must be positive");
    }
    let mut bound = eps;
    for k in 1..=MAX_ORDER {
        if bound <= eps2 {
            return Ok(k);
        }
        bound *= 2.0 * eps;
    }
    Err(Error::OutOfRegime(format!(
        "no convolution order up to {MAX_ORDER} reaches eps2 = {eps2} from eps = {eps}"
    )))
}

fn sum_draws(access: &mut DistAccess, k: usize) -> Result<usize> {
    let n = access.n();
    let mut acc = 0usize;
    for _ in 0..k {
        acc = (acc + access.draw()? - 1) % n;
    }
    Ok(acc + 1)
}

fn in_low_half(x: usize, n: usize) -> bool {
    x <= n / 2
}

/// `d0² + d1²`, the chance two draws land in the same half
/// `{1..⌊n/2⌋}` or `{⌊n/2⌋+1..n}`.
pub fn hybrid_coin_bias(d: &Pmf) -> f64 {
    let d0 = d.mass(1, d.n() / 2);
    let d1 = 1.0 - d0;
    d0 * d0 + d1 * d1
}

/// Sums `k` draws modulo `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionImprover {
    pub k: usize,
}

impl ConvolutionImprover {
    pub fn new(eps: f64, eps2: f64) -> Result<Self> {
        Ok(ConvolutionImprover {
            k: convolution_order(eps, eps2)?,
        })
    }

    pub fn sample(&self, access: &mut DistAccess) -> Result<usize> {
        sum_draws(access, self.k)
    }

    /// `D^(k)`.
    pub fn exact(&self, d: &Pmf) -> Result<Pmf> {
        convolve_power(d, self.k)
    }
}

/// Mixes the input with its `k`-fold convolution, choosing the branch with
/// a coin made from two input draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridImprover {
    pub k: usize,
}

impl Default for HybridImprover {
    fn default() -> Self {
        HybridImprover { k: 3 }
    }
}

impl HybridImprover {
    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::OutOfRegime(format!("eps = {eps} must lie in [0, 1/2]")));
        }
        Ok(Self::default())
    }

    pub fn sample(&self, access: &mut DistAccess) -> Result<usize> {
        let n = access.n();
        let same = in_low_half(access.draw()?, n) == in_low_half(access.draw()?, n);
        if same {
            sum_draws(access, self.k)
        } else {
            access.draw()
        }
    }

    /// `(1 - p0)·D + p0·D^(k)`.
    pub fn exact(&self, d: &Pmf) -> Result<Pmf> {
        mix_with_power(d, self.k)
    }
}

fn mix_with_power(d: &Pmf, k: usize) -> Result<Pmf> {
    let p0 = hybrid_coin_bias(d);
    let dk = convolve_power(d, k)?;
    Pmf::from_weights(
        d.probs()
            .iter()
            .zip(dk.probs())
            .map(|(a, b)| (1.0 - p0) * a + p0 * b)
            .collect(),
    )
}

/// `(boot_k, α)`: stages needed so that `ε/2^k ≤ ε2(1 - ε²)`, and the
/// per-stage target `α = ε2·ε²/2`.
pub(crate) fn bootstrap_depth(eps: f64, eps2: f64) -> Result<(usize, f64)> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::OutOfRegime(format!("eps = {eps} must lie in (0, 1/2]")));
    }
    if !(eps2 > 0.0 && eps2 < eps) {
        return param(format!("need 0 < eps2 < eps, got eps2 = {eps2}"));
    }
    let k = (eps / (eps2 * (1.0 - eps * eps))).log2().ceil().max(0.0) as usize;
    Ok((k, eps2 * eps * eps / 2.0))
}

/// Applies the hybrid construction repeatedly. Stage `j` convolves to order
/// `k_j`, the smallest order taking the running bound `u_j` to `α`, where
/// `u_0 = ε` and `u_{j+1} = u_j/2 + α`.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapImprover {
    pub alpha: f64,
    pub orders: Vec<usize>,
    pub eps: f64,
}

impl BootstrapImprover {
    pub fn new(eps: f64, eps2: f64) -> Result<Self> {
        let (boot_k, alpha) = bootstrap_depth(eps, eps2)?;
        let mut orders = Vec::with_capacity(boot_k);
        let mut u = eps;
        for _ in 0..boot_k {
            orders.push(convolution_order(u, alpha)?);
            u = u / 2.0 + alpha;
        }
        Ok(BootstrapImprover { alpha, orders, eps })
    }

    pub fn depth(&self) -> usize {
        self.orders.len()
    }

    /// Bounds `(u_j, v_j)` on the distance of stage `j` to uniform and to
    /// the input, `j = 0..=depth`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(self.eps, 0.0)];
        for _ in 0..self.depth() {
            let (u, v) = *out.last().unwrap();
            out.push((u / 2.0 + self.alpha, v + u / 2.0 + 2.0 * u.powi(3) + self.alpha));
        }
        out
    }

    pub fn sample(&self, access: &mut DistAccess) -> Result<usize> {
        self.sample_stage(self.depth(), access)
    }

    fn sample_stage(&self, j: usize, access: &mut DistAccess) -> Result<usize> {
        if j == 0 {
            return access.draw();
        }
        let n = access.n();
        let a = self.sample_stage(j - 1, access)?;
        let b = self.sample_stage(j - 1, access)?;
        if in_low_half(a, n) != in_low_half(b, n) {
            return self.sample_stage(j - 1, access);
        }
        let mut acc = 0usize;
        for _ in 0..self.orders[j - 1] {
            acc = (acc + self.sample_stage(j - 1, access)? - 1) % n;
        }
        Ok(acc + 1)
    }

    /// Every stage's pmf, `D_0 = D` through `D_depth`.
    pub fn exact_stages(&self, d: &Pmf) -> Result<Vec<Pmf>> {
        let mut out = vec![d.clone()];
        for &k in &self.orders {
            let next = mix_with_power(out.last().unwrap(), k)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn exact(&self, d: &Pmf) -> Result<Pmf> {
        Ok(self.exact_stages(d)?.pop().unwrap())
    }
}
