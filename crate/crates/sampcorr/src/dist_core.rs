//! Probability mass functions on `{1..n}`, distances, oracle access and
//! cyclic convolution.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng::{stream, ORACLE_STREAM};

/// Tolerance for the sum-to-one check on in-memory pmfs.
pub const MASS_TOL: f64 = 1e-9;
/// Tolerance for the sum-to-one check when loading pmfs from JSON.
pub const LOAD_TOL: f64 = 1e-6;

/// Execution path of a corrector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The input pmf is known and the output pmf is materialized.
    Exact,
    /// The input is only reachable through draws (and maybe cdf queries).
    Sample,
}

/// A pmf on `{1..n}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    n: usize,
    p: Vec<f64>,
    #[serde(skip)]
    renormalized: Option<f64>,
}

#[derive(Deserialize)]
struct RawPmf {
    n: usize,
    p: Vec<f64>,
}

impl Pmf {
    /// Strict constructor: entries must be finite, non-negative and sum to 1
    /// within [`MASS_TOL`].
    pub fn new(p: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(p, MASS_TOL, false)
    }

    fn with_tolerance(p: Vec<f64>, tol: f64, renormalize: bool) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidPmf("empty domain".into()));
        }
        if let Some(i) = p.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidPmf(format!("entry {} is {}", i + 1, p[i])));
        }
        let s: f64 = p.iter().sum();
        let dev = (s - 1.0).abs();
        if dev > tol && !renormalize {
            return Err(Error::InvalidPmf(format!("mass {s} differs from 1")));
        }
        if s <= 0.0 {
            return Err(Error::InvalidPmf("zero total mass".into()));
        }
        let mut pmf = Pmf {
            n: p.len(),
            p,
            renormalized: None,
        };
        if dev > 0.0 && (renormalize || dev > f64::EPSILON * pmf.n as f64) {
            pmf.p.iter_mut().for_each(|x| *x /= s);
            pmf.renormalized = Some(dev);
        }
        Ok(pmf)
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn from_weights(w: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(w, f64::INFINITY, true)
    }

    /// Parses `{"n": .., "p": [..]}`. Without `renormalize`, mass must be 1
    /// within [`LOAD_TOL`].
    pub fn from_json(s: &str, renormalize: bool) -> Result<Self> {
        let raw: RawPmf = serde_json::from_str(s)?;
        if raw.n != raw.p.len() {
            return Err(Error::SizeMismatch(raw.n, raw.p.len()));
        }
        Self::with_tolerance(raw.p, LOAD_TOL, renormalize)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pmf serializes")
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        Pmf {
            n,
            p: vec![1.0 / n as f64; n],
            renormalized: None,
        }
    }

    /// Point mass on the 1-based element `x`.
    pub fn point(n: usize, x: usize) -> Self {
        let mut p = vec![0.0; n];
        p[x - 1] = 1.0;
        Pmf {
            n,
            p,
            renormalized: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probabilities, 0-based.
    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// Probability of the 1-based element `x`.
    pub fn at(&self, x: usize) -> f64 {
        self.p[x - 1]
    }

    /// Magnitude of the mass deviation corrected at construction, if any.
    pub fn renormalized(&self) -> Option<f64> {
        self.renormalized
    }

    /// Mass of the 1-based inclusive range `[i, j]`; empty when `i > j`.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        if i > j {
            return 0.0;
        }
        self.p[i - 1..j].iter().sum()
    }

    /// Cumulative masses; `cdf()[j-1] = D([1..j])`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.p
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect()
    }

    /// Non-increasing up to `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        is_non_increasing(&self.p, tol)
    }
}

pub(crate) fn is_non_increasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + tol)
}

/// Budgets of a corrector or improver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectorParams {
    /// Promised distance of the input to the property.
    pub eps: f64,
    /// Allowed distance of the output to the input.
    pub eps1: f64,
    /// Allowed distance of the output to the property.
    pub eps2: f64,
    /// Failure probability.
    pub delta: f64,
    /// Number of committed output queries.
    pub batch: usize,
}

impl CorrectorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return param(format!("eps must lie in (0,1], got {}", self.eps));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return param(format!("delta must lie in [0,1], got {}", self.delta));
        }
        if self.eps1 < 0.0 || self.eps2 < 0.0 {
            return param("eps1 and eps2 must be non-negative");
        }
        if self.batch == 0 {
            return param("batch must be at least 1");
        }
        if self.eps1 + self.eps2 < self.eps {
            return param("eps1 + eps2 must be at least eps");
        }
        Ok(())
    }
}

fn check_sizes(p: &Pmf, q: &Pmf) -> Result<()> {
    if p.n != q.n {
        return Err(Error::SizeMismatch(p.n, q.n));
    }
    Ok(())
}

/// Half the L1 distance.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_sizes(p, q)?;
    Ok(tv_slices(&p.p, &q.p))
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Largest absolute difference between the two cdfs.
pub fn kolmogorov_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_sizes(p, q)?;
    let (mut fp, mut fq, mut best) = (0.0, 0.0, 0.0f64);
    for (x, y) in p.p.iter().zip(&q.p) {
        fp += x;
        fq += y;
        best = best.max((fp - fq).abs());
    }
    Ok(best)
}

/// Frequencies of 1-based samples.
pub fn empirical_pmf(samples: &[usize], n: usize) -> Result<Pmf> {
    if samples.is_empty() {
        return param("at least one sample is required");
    }
    let mut c = vec![0.0; n];
    for &s in samples {
        if s == 0 || s > n {
            return param(format!("sample {s} outside 1..={n}"));
        }
        c[s - 1] += 1.0;
    }
    let m = samples.len() as f64;
    c.iter_mut().for_each(|x| *x /= m);
    Ok(Pmf {
        n,
        p: c,
        renormalized: None,
    })
}

/// Samples needed so that the empirical cdf is within Kolmogorov distance
/// `eps` of the truth with probability at least `1 - delta`.
pub fn dkw_count(eps: f64, delta: f64) -> usize {
    ((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as usize
}

const DIRECT_CONVOLVE_LIMIT: usize = 4096;

/// Cyclic convolution on `Z_n`, identifying element `x` with residue `x - 1`.
pub fn convolve(p: &Pmf, q: &Pmf) -> Result<Pmf> {
    check_sizes(p, q)?;
    let r = if p.n <= DIRECT_CONVOLVE_LIMIT {
        convolve_direct(&p.p, &q.p)
    } else {
        let (a, b) = (&p.p, &q.p);
        // Run-compress the operand with fewer constant stretches.
        if runs(&a).len() < runs(&b).len() {
            convolve_runs(b, a)
        } else {
            convolve_runs(a, b)
        }
    };
    Pmf::from_weights(r.into_iter().map(|x| x.max(0.0)).collect())
}

/// `k`-fold self-convolution; `k = 1` returns a copy.
pub fn convolve_power(d: &Pmf, k: usize) -> Result<Pmf> {
    if k == 0 {
        return param("convolution order must be at least 1");
    }
    let mut acc = d.clone();
    for _ in 1..k {
        acc = convolve(&acc, d)?;
    }
    Ok(acc)
}

fn convolve_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for (g, &bg) in b.iter().enumerate() {
        if bg == 0.0 {
            continue;
        }
        for (h, &ah) in a.iter().enumerate() {
            let x = if g + h >= n { g + h - n } else { g + h };
            out[x] += ah * bg;
        }
    }
    out
}

/// Maximal constant stretches `(start, len, value)`.
fn runs(v: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        match out.last_mut() {
            Some(r) if r.2 == x => r.1 += 1,
            _ => out.push((i, 1, x)),
        }
    }
    out
}

/// `out(x) = Σ_runs v · Σ_{g in run} a(x - g)`, the inner sum read off cyclic
/// prefix sums of `a`.
fn convolve_runs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut pre = vec![0.0; 2 * n + 1];
    for i in 0..2 * n {
        pre[i + 1] = pre[i] + a[i % n];
    }
    let mut out = vec![0.0; n];
    for (s, len, v) in runs(b) {
        if v == 0.0 {
            continue;
        }
        for (x, o) in out.iter_mut().enumerate() {
            // x-g for g in [s, s+len) is the cyclic window starting at x-s-len+1
            let lo = (x + 2 * n + 1 - s - len) % n;
            *o += v * (pre[lo + len] - pre[lo]);
        }
    }
    out
}

enum Sampler {
    Exact(Vec<f64>),
    Stream { data: Vec<usize>, pos: usize },
    Func(Box<dyn FnMut(&mut ChaCha8Rng) -> usize + Send>),
}

/// Oracle access to a distribution: i.i.d. draws, optional cdf queries and
/// an optional exact pmf, with counters for each.
pub struct DistAccess {
    n: usize,
    exact: Option<Pmf>,
    sampler: Sampler,
    cdf: Option<Vec<f64>>,
    rng: ChaCha8Rng,
    draws: u64,
    cdf_queries: u64,
}

impl std::fmt::Debug for DistAccess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DistAccess")
            .field("n", &self.n)
            .field("exact", &self.exact.is_some())
            .field("cdf", &self.cdf.is_some())
            .field("draws", &self.draws)
            .field("cdf_queries", &self.cdf_queries)
            .finish()
    }
}

impl DistAccess {
    /// Draws and cdf queries both derived from `pmf`.
    pub fn exact(pmf: Pmf, seed: u64) -> Self {
        let cdf = pmf.cdf();
        DistAccess {
            n: pmf.n,
            sampler: Sampler::Exact(cdf.clone()),
            cdf: Some(cdf),
            exact: Some(pmf),
            rng: stream(seed, ORACLE_STREAM),
            draws: 0,
            cdf_queries: 0,
        }
    }

    /// Like [`DistAccess::exact`] but without the cdf capability.
    pub fn samples_only(pmf: Pmf, seed: u64) -> Self {
        let mut a = Self::exact(pmf, seed);
        a.cdf = None;
        a
    }

    /// A finite recorded stream; running past its end is an error.
    pub fn from_stream(n: usize, data: Vec<usize>) -> Result<Self> {
        if let Some(&s) = data.iter().find(|&&s| s == 0 || s > n) {
            return param(format!("sample {s} outside 1..={n}"));
        }
        Ok(DistAccess {
            n,
            exact: None,
            sampler: Sampler::Stream { data, pos: 0 },
            cdf: None,
            rng: stream(0, ORACLE_STREAM),
            draws: 0,
            cdf_queries: 0,
        })
    }

    /// Draws produced by an arbitrary procedure fed from the oracle stream.
    pub fn from_fn<F>(n: usize, seed: u64, f: F) -> Self
    where
        F: FnMut(&mut ChaCha8Rng) -> usize + Send + 'static,
    {
        DistAccess {
            n,
            exact: None,
            sampler: Sampler::Func(Box::new(f)),
            cdf: None,
            rng: stream(seed, ORACLE_STREAM),
            draws: 0,
            cdf_queries: 0,
        }
    }

    /// Attaches a tabulated cdf, `table[j-1] = D([1..j])`.
    pub fn with_cdf_table(mut self, table: Vec<f64>) -> Result<Self> {
        if table.len() != self.n {
            return Err(Error::SizeMismatch(self.n, table.len()));
        }
        if !table.windows(2).all(|w| w[1] >= w[0] - MASS_TOL) {
            return param("cdf table must be non-decreasing");
        }
        if (table[self.n - 1] - 1.0).abs() > LOAD_TOL {
            return param("cdf table must end at 1");
        }
        self.cdf = Some(table);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exact_pmf(&self) -> Option<&Pmf> {
        self.exact.as_ref()
    }

    pub fn has_cdf(&self) -> bool {
        self.cdf.is_some()
    }

    /// One 1-based draw.
    pub fn draw(&mut self) -> Result<usize> {
        let x = match &mut self.sampler {
            Sampler::Exact(cdf) => sample_cdf(cdf, self.rng.random::<f64>()),
            Sampler::Stream { data, pos } => {
                if *pos >= data.len() {
                    return Err(Error::InsufficientSamples {
                        required: *pos + 1,
                        available: data.len(),
                    });
                }
                *pos += 1;
                data[*pos - 1]
            }
            Sampler::Func(f) => f(&mut self.rng),
        };
        self.draws += 1;
        Ok(x)
    }

    pub fn draw_many(&mut self, m: usize) -> Result<Vec<usize>> {
        if let Sampler::Stream { data, pos } = &self.sampler {
            let available = data.len() - *pos;
            if available < m {
                return Err(Error::InsufficientSamples {
                    required: m,
                    available,
                });
            }
        }
        (0..m).map(|_| self.draw()).collect()
    }

    /// Remaining draws for a recorded stream, `None` when unbounded.
    pub fn remaining(&self) -> Option<usize> {
        match &self.sampler {
            Sampler::Stream { data, pos } => Some(data.len() - pos),
            _ => None,
        }
    }

    /// `D([1..j])`, with `ceval(0) = 0`.
    pub fn ceval(&mut self, j: usize) -> Result<f64> {
        let cdf = self.cdf.as_ref().ok_or(Error::Capability("cdf query"))?;
        if j > self.n {
            return param(format!("cdf index {j} beyond n = {}", self.n));
        }
        self.cdf_queries += 1;
        Ok(if j == 0 { 0.0 } else { cdf[j - 1].min(1.0) })
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn cdf_queries(&self) -> u64 {
        self.cdf_queries
    }
}

/// Inverse-cdf lookup of `u ∈ [0,1)`, returning a 1-based element of
/// positive mass.
pub(crate) fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().unwrap();
    let t = u * total;
    let i = cdf.partition_point(|&c| c <= t);
    if i < cdf.len() {
        i + 1
    } else {
        // u rounded onto the top; fall back to the last element with mass.
        let mut j = cdf.len() - 1;
        while j > 0 && cdf[j] == cdf[j - 1] {
            j -= 1;
        }
        j + 1
    }
}
