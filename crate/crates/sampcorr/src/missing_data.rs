//! Interval deletions and their repair.
//!
//! A deletion removes all mass of an interval `[i, j]` of a monotone
//! distribution and renormalizes the rest, as rejection sampling would. The
//! improver locates the hole, estimates how much mass the next interval of
//! equal length carries, and moves that much mass from the far tail back
//! into the hole while flattening the next interval.

use serde::Serialize;

use crate::dist_core::{dkw_count, empirical_pmf, is_non_increasing, DistAccess, Mode, Pmf};
use crate::error::{param, Error, Result};
use crate::rng::Coins;

/// Where the hole is, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    Gap { a: usize, b: usize },
    Close,
}

/// Outcome of the preprocessing stage.
///
/// With `I = [a, b]`, `J = [b+1, 2b-a+1]` (clipped to `n`) and `K = [c, n]`,
/// `gamma` estimates `D′(J)` and `gamma_prime` estimates `D′(K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MissingDataReport {
    pub kind: GapKind,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub c: usize,
    pub alpha: f64,
}

impl MissingDataReport {
    fn close(alpha: f64, n: usize) -> Self {
        MissingDataReport {
            kind: GapKind::Close,
            gamma: 0.0,
            gamma_prime: 0.0,
            c: n,
            alpha,
        }
    }

    /// `J` as a 1-based inclusive range; empty (`lo > hi`) when `b = n`.
    pub fn j_interval(&self, n: usize) -> Option<(usize, usize)> {
        match self.kind {
            GapKind::Gap { a, b } => Some((b + 1, (2 * b + 1 - a).min(n))),
            GapKind::Close => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Deletes `[i, j]` from `d` and renormalizes. Returns the faulty pmf and
/// the deleted mass `w`.
pub fn inject_missing(d: &Pmf, i: usize, j: usize) -> Result<(Pmf, f64)> {
    let n = d.n();
    if !(1 <= i && i <= j && j <= n) {
        return param(format!("need 1 <= i <= j <= {n}, got [{i}, {j}]"));
    }
    let w = d.mass(i, j);
    if w >= 1.0 - 1e-15 {
        return Err(Error::Infeasible("deleting the interval removes all mass".into()));
    }
    if w == 0.0 {
        return Ok((d.clone(), 0.0));
    }
    let p = d
        .probs()
        .iter()
        .enumerate()
        .map(|(k, &x)| if k + 1 >= i && k < j { 0.0 } else { x / (1.0 - w) })
        .collect();
    Ok((Pmf::from_weights(p)?, w))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0 / 3.0) {
        return param(format!("alpha must lie in (0, 1/3), got {alpha}"));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta must lie in (0, 1), got {delta}"));
    }
    Ok(())
}

/// The estimate `D̂` the preprocessing works from: the pmf itself in exact
/// mode, the empirical pmf of `m` fresh draws otherwise.
fn estimate(access: &mut DistAccess, mode: Mode, m: usize) -> Result<(Pmf, usize)> {
    match mode {
        Mode::Exact => Ok((
            access.exact_pmf().ok_or(Error::Capability("exact pmf"))?.clone(),
            0,
        )),
        Mode::Sample => {
            let draws = access.draw_many(m)?;
            Ok((empirical_pmf(&draws, access.n())?, m))
        }
    }
}

/// Largest gap between a cumulative sequence and its least concave
/// majorant. Zero exactly when the increments are non-increasing.
fn concavity_defect(increments: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    pts.push((0.0, 0.0));
    for (k, &x) in increments.iter().enumerate() {
        acc += x;
        pts.push(((k + 1) as f64, acc));
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop `a` unless it lies strictly above the chord o-p
            if (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut worst = 0.0f64;
    let mut h = 0;
    for &(x, y) in &pts {
        while h + 1 < hull.len() && hull[h + 1].0 < x {
            h += 1;
        }
        let (x0, y0) = hull[h];
        let top = if h + 1 < hull.len() {
            let (x1, y1) = hull[h + 1];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        } else {
            y0
        };
        worst = worst.max(top - y);
    }
    worst
}

/// Locates the deleted interval, or reports that the input is already close
/// to monotone.
///
/// Elements with estimated mass at least `4α³/5` form the head `{1..r}`; a
/// hole there shows up as a run of near-empty elements and is returned
/// exactly. Otherwise the tail `[r+1, n]` is cut into intervals of estimated
/// mass about `α²` and growing prefixes of them are tested for monotonicity.
/// The first rejected prefix `ℓ*` gives `[a, b] = I_{ℓ*-1} ∪ I_{ℓ*}`.
///
/// Exact mode tests prefixes directly. Sample mode draws
/// `⌈ln(4/δ)/(2(α³/5)²)⌉` samples once and, per prefix, compares the
/// conditional empirical cdf with its least concave majorant, rejecting when
/// they differ by more than twice the prefix's Kolmogorov radius. A monotone
/// prefix stays within that margin, while a hole followed by mass `p` opens a
/// gap of about `p/2`.
pub fn detect_gap(
    access: &mut DistAccess,
    alpha: f64,
    delta: f64,
    mode: Mode,
) -> Result<(MissingDataReport, usize)> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    let n = access.n();
    let a3 = alpha.powi(3);
    let (dhat, used) = estimate(access, mode, dkw_count(a3 / 5.0, delta / 2.0))?;
    let p = dhat.probs();

    let r = p.iter().rposition(|&x| x >= 0.8 * a3).map_or(0, |k| k + 1);
    let holes: Vec<usize> = (1..=r).filter(|&x| p[x - 1] < 0.3 * a3).collect();
    if let (Some(&lo), Some(&hi)) = (holes.first(), holes.last()) {
        if hi - lo + 1 != holes.len() {
            return Err(Error::PromiseViolation(
                "more than one hole among the heavy elements".into(),
            ));
        }
        let mut rep = MissingDataReport::close(alpha, n);
        rep.kind = GapKind::Gap { a: lo, b: hi };
        return Ok((rep, used));
    }

    // equal-mass cuts of the tail
    let a2 = alpha * alpha;
    let mut cuts: Vec<(usize, usize)> = Vec::new();
    let mut start = r + 1;
    let mut acc = 0.0;
    for x in r + 1..=n {
        acc += p[x - 1];
        if acc >= a2 || x == n {
            cuts.push((start, x));
            start = x + 1;
            acc = 0.0;
        }
    }
    let t = cuts.len();
    for l in 0..t {
        let (lo, hi) = (cuts[0].0, cuts[l].1);
        let slice = &p[lo - 1..hi];
        let mass: f64 = slice.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        let rejected = match mode {
            Mode::Exact => !is_non_increasing(slice, 1e-12 * mass),
            Mode::Sample => {
                let cond: Vec<f64> = slice.iter().map(|x| x / mass).collect();
                let count = mass * used as f64;
                let radius = ((2.0 * t as f64 / delta).ln() / (2.0 * count)).sqrt();
                concavity_defect(&cond) > 2.0 * radius
            }
        };
        if rejected {
            let a = cuts[l.saturating_sub(1)].0;
            let b = cuts[l].1;
            let mut rep = MissingDataReport::close(alpha, n);
            rep.kind = GapKind::Gap { a, b };
            return Ok((rep, used));
        }
    }
    Ok((MissingDataReport::close(alpha, n), used))
}

/// Fills in `γ`, `c` and `γ′` for a detected hole `[a, b]`.
///
/// `γ = D̂(J)` clamped to `[0, 1]`, `c = max{x : D̂([x, n]) ≥ γ}` and
/// `γ′ = D̂([c, n])`. Sample mode draws `⌈ln(2/δ)/(2(α³/2)²)⌉` samples.
/// Fails with a promise violation when `γ > 2ε + 4α³`, which cannot happen
/// for an input `ε`-close to monotone.
pub fn estimate_weights(
    access: &mut DistAccess,
    a: usize,
    b: usize,
    alpha: f64,
    delta: f64,
    eps: f64,
    mode: Mode,
) -> Result<(MissingDataReport, usize)> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    let n = access.n();
    if !(1 <= a && a <= b && b <= n) {
        return param(format!("need 1 <= a <= b <= {n}, got [{a}, {b}]"));
    }
    let a3 = alpha.powi(3);
    let (dhat, used) = estimate(access, mode, dkw_count(a3 / 2.0, delta))?;
    let mut rep = MissingDataReport::close(alpha, n);
    rep.kind = GapKind::Gap { a, b };
    let (jl, jh) = rep.j_interval(n).expect("gap report");
    rep.gamma = dhat.mass(jl, jh).clamp(0.0, 1.0);
    if rep.gamma > 2.0 * eps + 4.0 * a3 {
        return Err(Error::PromiseViolation(format!(
            "estimated weight {} after the hole exceeds 2ε + 4α³ = {}",
            rep.gamma,
            2.0 * eps + 4.0 * a3
        )));
    }
    let p = dhat.probs();
    let mut tail = 0.0;
    let mut c = n;
    for x in (1..=n).rev() {
        tail += p[x - 1];
        if tail >= rep.gamma {
            c = x;
            break;
        }
    }
    rep.c = c;
    rep.gamma_prime = dhat.mass(c, n);
    Ok((rep, used))
}

/// `γ/γ′`, the chance a draw landing in `K` is moved into the hole.
fn move_ratio(rep: &MissingDataReport) -> f64 {
    if rep.gamma_prime > 0.0 {
        (rep.gamma / rep.gamma_prime).min(1.0)
    } else {
        0.0
    }
}

fn check_disjoint(rep: &MissingDataReport, n: usize) -> Result<()> {
    if let Some((jl, jh)) = rep.j_interval(n) {
        if rep.gamma > 0.0 && jl <= jh && rep.c <= jh {
            return Err(Error::Overlap {
                j_lo: jl,
                j_hi: jh,
                k_lo: rep.c,
                k_hi: n,
            });
        }
    }
    Ok(())
}

/// Output distribution of the improver for a completed report:
/// on `I` it is `D′(x) + (γ/γ′)·D′(K)/|I|`, on `J` the flat `D′(J)/|J|`, on
/// `K` it is `D′(x)·(1 - γ/γ′)`, and `D′` elsewhere.
pub fn corrected_pmf_exact(dprime: &Pmf, rep: &MissingDataReport) -> Result<Pmf> {
    let n = dprime.n();
    let GapKind::Gap { a, b } = rep.kind else {
        return Ok(dprime.clone());
    };
    if rep.gamma <= 0.0 {
        return Ok(dprime.clone());
    }
    check_disjoint(rep, n)?;
    let (jl, jh) = rep.j_interval(n).expect("gap report");
    let ratio = move_ratio(rep);
    let mut p = dprime.probs().to_vec();
    let k_mass = dprime.mass(rep.c, n);
    let fill = ratio * k_mass / (b - a + 1) as f64;
    p[a - 1..b].iter_mut().for_each(|x| *x += fill);
    if jl <= jh {
        let level = dprime.mass(jl, jh) / (jh - jl + 1) as f64;
        p[jl - 1..jh].iter_mut().for_each(|x| *x = level);
    }
    p[rep.c - 1..n].iter_mut().for_each(|x| *x *= 1.0 - ratio);
    Pmf::from_weights(p)
}

/// Batch improver for inputs from the interval-deletion model, run with
/// `α = √ε2`.
#[derive(Debug, Clone)]
pub struct MissingDataImprover {
    pub report: MissingDataReport,
    /// Draws spent on preprocessing.
    pub samples_used: usize,
    n: usize,
    pass_through: bool,
}

impl MissingDataImprover {
    /// Runs gap detection and weight estimation, each with half of `δ`.
    pub fn preprocess(
        access: &mut DistAccess,
        eps: f64,
        eps2: f64,
        delta: f64,
        mode: Mode,
    ) -> Result<Self> {
        if !(eps2 > 0.0 && eps2 < eps) {
            return param(format!("need 0 < eps2 < eps, got eps2 = {eps2}, eps = {eps}"));
        }
        let alpha = eps2.sqrt();
        if alpha >= 1.0 / 3.0 {
            return Err(Error::OutOfRegime(format!(
                "eps2 = {eps2} gives alpha = {alpha} >= 1/3"
            )));
        }
        let n = access.n();
        let (found, mut used) = detect_gap(access, alpha, delta / 2.0, mode)?;
        let report = match found.kind {
            GapKind::Close => found,
            GapKind::Gap { a, b } => {
                let (rep, u) = estimate_weights(access, a, b, alpha, delta / 2.0, eps, mode)?;
                used += u;
                rep
            }
        };
        let pass_through =
            report.kind == GapKind::Close || report.gamma < 5.0 * eps2.powf(1.5);
        if !pass_through {
            check_disjoint(&report, n)?;
        }
        Ok(MissingDataImprover {
            report,
            samples_used: used,
            n,
            pass_through,
        })
    }

    /// Whether queries are answered with unmodified draws.
    pub fn passes_through(&self) -> bool {
        self.pass_through
    }

    /// Distribution of each output.
    pub fn output_pmf(&self, dprime: &Pmf) -> Result<Pmf> {
        if self.pass_through {
            Ok(dprime.clone())
        } else {
            corrected_pmf_exact(dprime, &self.report)
        }
    }

    /// One output from one input draw.
    pub fn sample(&self, access: &mut DistAccess, coins: &mut Coins) -> Result<usize> {
        let s = access.draw()?;
        if self.pass_through {
            return Ok(s);
        }
        let GapKind::Gap { a, b } = self.report.kind else {
            return Ok(s);
        };
        let (jl, jh) = self.report.j_interval(self.n).expect("gap report");
        if s >= self.report.c {
            if coins.bernoulli(move_ratio(&self.report)) {
                return Ok(coins.range(a, b));
            }
            return Ok(s);
        }
        if jl <= s && s <= jh {
            return Ok(coins.range(jl, jh));
        }
        Ok(s)
    }

    /// `q` consistent outputs.
    pub fn sample_batch(
        &self,
        access: &mut DistAccess,
        coins: &mut Coins,
        q: usize,
    ) -> Result<Vec<usize>> {
        (0..q).map(|_| self.sample(access, coins)).collect()
    }
}
