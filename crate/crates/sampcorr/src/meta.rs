//! Reductions between correcting, learning and tolerant testing, with
//! simple histogram-based plug-ins for the estimator and the tester.

use serde::Serialize;

use crate::birge::{birge_partition, flatten, IntervalPartition};
use crate::dist_core::{DistAccess, Pmf};
use crate::error::{param, Error, Result};
use crate::isotonic::{closest_monotone_histogram, distance_to_monotone_exact, WeightedHistogram};
use crate::rng::stream;

/// Draw budget above which the surrogate estimator refuses to run.
pub const MAX_ESTIMATOR_DRAWS: usize = 200_000_000;

/// A distribution learner for (near-)monotone inputs.
pub trait Learner {
    /// Hypothesis within `eta` of the input with probability `1 - delta`.
    fn learn(&self, access: &mut DistAccess, eta: f64, delta: f64) -> Result<Pmf>;
    /// Input draws [`Learner::learn`] takes.
    fn sample_cost(&self, n: usize, eta: f64, delta: f64) -> Result<usize>;
    /// Whether hypotheses are always non-increasing.
    fn proper(&self) -> bool;
}

/// Reads the known pmf; costs no draws.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactLearner;

impl Learner for ExactLearner {
    fn learn(&self, access: &mut DistAccess, _eta: f64, _delta: f64) -> Result<Pmf> {
        access
            .exact_pmf()
            .cloned()
            .ok_or(Error::Capability("exact pmf"))
    }

    fn sample_cost(&self, _n: usize, _eta: f64, _delta: f64) -> Result<usize> {
        Ok(0)
    }

    fn proper(&self) -> bool {
        false
    }
}

/// Empirical interval masses on the geometric partition with `α = η/2`,
/// spread evenly within each interval. Uses `⌈4(ℓ + ln(2/δ))/α²⌉` draws,
/// which bounds the histogram's estimation error by `α/2` with probability
/// `1 - δ`; flattening a monotone input costs at most another `α`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BirgeLearner;

impl BirgeLearner {
    fn partition(n: usize, eta: f64) -> Result<IntervalPartition> {
        if !(eta > 0.0 && eta <= 1.0) {
            return param(format!("eta must lie in (0, 1], got {eta}"));
        }
        birge_partition(n, eta / 2.0)
    }
}

impl Learner for BirgeLearner {
    fn learn(&self, access: &mut DistAccess, eta: f64, delta: f64) -> Result<Pmf> {
        let part = Self::partition(access.n(), eta)?;
        let m = self.sample_cost(access.n(), eta, delta)?;
        let mut masses = vec![0.0; part.ell()];
        for _ in 0..m {
            masses[part.locate(access.draw()?)] += 1.0 / m as f64;
        }
        part.spread(&masses)
    }

    fn sample_cost(&self, n: usize, eta: f64, delta: f64) -> Result<usize> {
        if !(delta > 0.0 && delta < 1.0) {
            return param("delta must lie in (0, 1)");
        }
        let part = Self::partition(n, eta)?;
        let alpha = eta / 2.0;
        Ok((4.0 * (part.ell() as f64 + (2.0 / delta).ln()) / (alpha * alpha)).ceil() as usize)
    }

    fn proper(&self) -> bool {
        false
    }
}

/// Wraps a learner and projects its hypotheses onto non-increasing pmfs.
/// The projection at most doubles the error, so the inner learner runs at
/// `η/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProjectedLearner<L>(pub L);

impl<L: Learner> Learner for ProjectedLearner<L> {
    fn learn(&self, access: &mut DistAccess, eta: f64, delta: f64) -> Result<Pmf> {
        project_monotone(&self.0.learn(access, eta / 2.0, delta)?)
    }

    fn sample_cost(&self, n: usize, eta: f64, delta: f64) -> Result<usize> {
        self.0.sample_cost(n, eta / 2.0, delta)
    }

    fn proper(&self) -> bool {
        true
    }
}

/// Closest non-increasing pmf in total variation. Runs of equal entries are
/// pooled first, so histograms with few pieces stay cheap at any `n`.
pub fn project_monotone(p: &Pmf) -> Result<Pmf> {
    let mut levels = Vec::new();
    let mut lengths = Vec::new();
    for &x in p.probs() {
        if levels.last() == Some(&x) {
            *lengths.last_mut().unwrap() += 1;
        } else {
            levels.push(x);
            lengths.push(1usize);
        }
    }
    let (h, _) = closest_monotone_histogram(&WeightedHistogram::new(levels, lengths)?)?;
    let mut out = Vec::with_capacity(p.n());
    for (&v, &l) in h.levels.iter().zip(&h.lengths) {
        out.extend(std::iter::repeat_n(v, l));
    }
    Pmf::from_weights(out)
}

/// A corrected distribution, sampled with its own seed so that no further
/// input draws are spent.
#[derive(Debug, Clone)]
pub struct CorrectedSource {
    pub pmf: Pmf,
    /// Input draws spent building it.
    pub draws_used: u64,
}

impl CorrectedSource {
    /// Access to the corrected distribution.
    pub fn stream(&self, seed: u64) -> DistAccess {
        DistAccess::exact(self.pmf.clone(), seed)
    }
}

/// Something that turns access to a near-monotone input into a monotone
/// distribution close to it.
pub trait Corrector {
    fn correct(
        &self,
        access: &mut DistAccess,
        eps: f64,
        eps1: f64,
        delta: f64,
    ) -> Result<CorrectedSource>;
}

/// Learn-then-project corrector built from any learner.
#[derive(Debug, Clone, Copy, Default)]
pub struct LearningCorrector<L>(pub L);

impl<L: Learner> Corrector for LearningCorrector<L> {
    fn correct(
        &self,
        access: &mut DistAccess,
        eps: f64,
        eps1: f64,
        delta: f64,
    ) -> Result<CorrectedSource> {
        corrector_from_learner(&self.0, access, eps, eps1, delta)
    }
}

/// Learns the input to accuracy `η = (ε1 - ε)/2` and projects onto
/// non-increasing pmfs; the result is within `ε + 2η = ε1` of an input that
/// is `ε`-close to monotone.
pub fn corrector_from_learner(
    learner: &dyn Learner,
    access: &mut DistAccess,
    eps: f64,
    eps1: f64,
    delta: f64,
) -> Result<CorrectedSource> {
    if !(eps >= 0.0 && eps1 > eps) {
        return param(format!("need 0 <= eps < eps1, got eps = {eps}, eps1 = {eps1}"));
    }
    let before = access.draws();
    let hyp = learner.learn(access, (eps1 - eps) / 2.0, delta)?;
    let pmf = project_monotone(&hyp)?;
    Ok(CorrectedSource {
        pmf,
        draws_used: access.draws() - before,
    })
}

/// Hypothesis of the agnostic learner and its input cost.
#[derive(Debug, Clone)]
pub struct AgnosticOutcome {
    pub hypothesis: Pmf,
    pub draws_used: u64,
}

/// Corrects with budgets `(ôpt, ôpt + ε, δ/2)` and learns the corrected
/// distribution at `(ε, δ/2)`. The hypothesis is within `ôpt + 2ε` of the
/// input whenever `OPT ≤ ôpt`.
pub fn agnostic_from_corrector(
    corrector: &dyn Corrector,
    learner: &dyn Learner,
    access: &mut DistAccess,
    opt_hat: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<AgnosticOutcome> {
    if !(eps > 0.0 && opt_hat >= 0.0) {
        return param("need eps > 0 and opt_hat >= 0");
    }
    let corrected = corrector.correct(access, opt_hat, opt_hat + eps, delta / 2.0)?;
    let mut s = corrected.stream(seed);
    let hypothesis = learner.learn(&mut s, eps, delta / 2.0)?;
    Ok(AgnosticOutcome {
        hypothesis,
        draws_used: corrected.draws_used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Accept,
    Reject,
}

fn interval_counts(access: &mut DistAccess, part: &IntervalPartition, m: usize) -> Result<Vec<f64>> {
    let mut c = vec![0.0; part.ell()];
    for _ in 0..m {
        c[part.locate(access.draw()?)] += 1.0 / m as f64;
    }
    Ok(c)
}

/// Draws per side for [`surrogate_distance_estimator`]: each cdf to
/// Kolmogorov distance `κ = α/(2ℓ)` with probability `1 - δ/2`.
pub fn estimator_cost(part: &IntervalPartition, alpha: f64, delta: f64) -> usize {
    let kappa = alpha / (2.0 * part.ell() as f64);
    ((4.0 / delta).ln() / (2.0 * kappa * kappa)).ceil() as usize
}

/// Half the L1 distance between the interval masses of two inputs, from
/// equal numbers of draws. Interval masses are within `2κ` each, so the
/// estimate is within `α` of the distance between the flattened inputs.
pub fn surrogate_distance_estimator(
    a: &mut DistAccess,
    b: &mut DistAccess,
    part: &IntervalPartition,
    alpha: f64,
    delta: f64,
) -> Result<(f64, usize)> {
    if a.n() != b.n() || a.n() != part.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    if !(alpha > 0.0 && delta > 0.0 && delta < 1.0) {
        return param("need alpha > 0 and delta in (0, 1)");
    }
    let m = estimator_cost(part, alpha, delta);
    if m > MAX_ESTIMATOR_DRAWS {
        return Err(Error::InsufficientSamples {
            required: m,
            available: MAX_ESTIMATOR_DRAWS,
        });
    }
    let ca = interval_counts(a, part, m)?;
    let cb = interval_counts(b, part, m)?;
    let est = 0.5 * ca.iter().zip(&cb).map(|(x, y)| (x - y).abs()).sum::<f64>();
    Ok((est, m))
}

/// Draws for [`surrogate_monotonicity_tester`], `⌈4(ℓ + ln(2/δ))/α²⌉`.
pub fn tester_cost(part: &IntervalPartition, alpha: f64, delta: f64) -> usize {
    (4.0 * (part.ell() as f64 + (2.0 / delta).ln()) / (alpha * alpha)).ceil() as usize
}

/// Rejects when the empirical histogram on `part` is more than `α/2` from
/// non-increasing.
pub fn surrogate_monotonicity_tester(
    access: &mut DistAccess,
    part: &IntervalPartition,
    alpha: f64,
    delta: f64,
) -> Result<(Verdict, usize)> {
    if !(alpha > 0.0 && delta > 0.0 && delta < 1.0) {
        return param("need alpha > 0 and delta in (0, 1)");
    }
    let m = tester_cost(part, alpha, delta);
    let masses = interval_counts(access, part, m)?;
    let h = WeightedHistogram::from_masses(&masses, &part.lengths())?;
    let (_, cost) = closest_monotone_histogram(&h)?;
    let verdict = if cost / 2.0 > alpha / 2.0 {
        Verdict::Reject
    } else {
        Verdict::Accept
    };
    Ok((verdict, m))
}

/// Decision and bookkeeping of the tolerant tester.
#[derive(Debug, Clone, Serialize)]
pub struct TolerantOutcome {
    pub verdict: Verdict,
    /// Estimated distance between the input and its correction.
    pub estimate: f64,
    /// Whether the tester stage ran.
    pub tested: bool,
    /// Draws from the input, corrector and estimator combined.
    pub input_draws: u64,
    /// Draws from the corrected distribution.
    pub corrected_draws: usize,
}

/// Tolerant monotonicity tester: with `β = (ε - ε′)/4` and `ε1 = ε′ + β`,
/// corrects at `(ε′, ε1, δ/3)`, rejects if the estimated distance to the
/// correction exceeds `(ε + ε′)/2`, and otherwise runs the tester at `β` on
/// the corrected distribution. Estimator and tester work on the geometric
/// partition with parameter `β`.
pub fn tolerant_tester_from_corrector(
    corrector: &dyn Corrector,
    access: &mut DistAccess,
    eps_prime: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<TolerantOutcome> {
    if !(0.0 <= eps_prime && eps_prime < eps && eps <= 1.0) {
        return param(format!("need 0 <= eps' < eps <= 1, got {eps_prime}, {eps}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return param("delta must lie in (0, 1)");
    }
    let beta = (eps - eps_prime) / 4.0;
    let start = access.draws();
    let corrected = corrector.correct(access, eps_prime, eps_prime + beta, delta / 3.0)?;
    let part = birge_partition(access.n(), beta)?;
    let mut tilde = corrected.stream(seed);
    let (estimate, m_est) =
        surrogate_distance_estimator(access, &mut tilde, &part, beta, delta / 3.0)?;
    if estimate > (eps + eps_prime) / 2.0 {
        return Ok(TolerantOutcome {
            verdict: Verdict::Reject,
            estimate,
            tested: false,
            input_draws: access.draws() - start,
            corrected_draws: m_est,
        });
    }
    let (verdict, m_test) = surrogate_monotonicity_tester(&mut tilde, &part, beta, delta / 3.0)?;
    Ok(TolerantOutcome {
        verdict,
        estimate,
        tested: true,
        input_draws: access.draws() - start,
        corrected_draws: m_est + m_test,
    })
}

fn mixture_parts(n: usize, seed: u64) -> Result<(Pmf, Pmf)> {
    use rand::Rng;
    if n < 2 {
        return param("n must be at least 2");
    }
    let mut rng = stream(seed, 0);
    let mut m: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(2) + 0.05).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    // mass climbing towards the right end
    let r = rng.random_range(0.3..0.7f64).powf(32.0 / n as f64);
    let r = Pmf::from_weights((0..n).map(|k| r.powi((n - 1 - k) as i32)).collect())?;
    Ok((Pmf::from_weights(m)?, r))
}

fn mix_parts(m: &Pmf, r: &Pmf, t: f64) -> Result<Pmf> {
    Pmf::from_weights(
        m.probs()
            .iter()
            .zip(r.probs())
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect(),
    )
}

/// The fixture family of [`perturbed_monotone`] at a given mixing weight
/// `t ∈ [0, 1]`, with its exact distance to monotone, which is at most `t`.
pub fn perturbed_mixture(n: usize, t: f64, seed: u64) -> Result<(Pmf, f64)> {
    if !(0.0..=1.0).contains(&t) {
        return param(format!("t must lie in [0, 1], got {t}"));
    }
    let (m, r) = mixture_parts(n, seed)?;
    let p = mix_parts(&m, &r, t)?;
    let d = distance_to_monotone_exact(&p)?;
    Ok((p, d))
}

/// A fixture `(1-t)·M + t·R` with a random non-increasing `M` and an
/// increasing `R`, with `t` bisected until the exact distance to monotone is
/// `dist` within `1e-9`. The target must lie below the distance of `R`,
/// which is at least 0.7 for the ramp used here. Returns the pmf and its certified distance.
pub fn perturbed_monotone(n: usize, dist: f64, seed: u64) -> Result<(Pmf, f64)> {
    if !(0.0..0.9).contains(&dist) {
        return param(format!("dist must lie in [0, 0.9), got {dist}"));
    }
    let (m, r) = mixture_parts(n, seed)?;
    let mix = |t: f64| mix_parts(&m, &r, t);
    if dist == 0.0 {
        return Ok((m, 0.0));
    }
    if distance_to_monotone_exact(&r)? < dist {
        return Err(Error::Infeasible(format!("cannot reach distance {dist} at n = {n}")));
    }
    // d(t) <= t, so the root lies past t = dist; doubling gives a factor-2
    // bracket, and as d is convex in t, regula falsi with the Illinois
    // down-weighting finishes quickly, with a bisection step now and then
    let (mut lo, mut f_lo) = (0.0f64, -dist);
    let mut hi = dist;
    let mut f_hi = distance_to_monotone_exact(&mix(hi)?)? - dist;
    while f_hi < 0.0 && hi < 1.0 {
        (lo, f_lo) = (hi, f_hi);
        hi = (2.0 * hi).min(1.0);
        f_hi = distance_to_monotone_exact(&mix(hi)?)? - dist;
    }
    let mut side = 0i8;
    for it in 0..200 {
        let mid = if it % 8 == 7 {
            0.5 * (lo + hi)
        } else {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        };
        let p = mix(mid)?;
        let d = distance_to_monotone_exact(&p)?;
        let f = d - dist;
        if f.abs() <= 1e-9 {
            return Ok((p, d));
        }
        if f < 0.0 {
            lo = mid;
            f_lo = f;
            if side == -1 {
                f_hi /= 2.0;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f;
            if side == 1 {
                f_lo /= 2.0;
            }
            side = 1;
        }
    }
    let p = mix(0.5 * (lo + hi))?;
    let d = distance_to_monotone_exact(&p)?;
    Ok((p, d))
}

/// Distance of the flattening on `part` to monotone, a lower bound on what
/// the histogram-based plug-ins can see.
pub fn flattened_distance(d: &Pmf, part: &IntervalPartition) -> Result<f64> {
    let f = flatten(d, part)?;
    let (_, cost) = closest_monotone_histogram(&WeightedHistogram::from_masses(
        &part.masses(&f)?,
        &part.lengths(),
    )?)?;
    Ok(cost / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_core::tv_distance;
    use crate::isotonic::closest_monotone_pmf;
    use crate::mono_correct::learned_corrector_build;
    use crate::Mode;

    #[test]
    fn exact_learner_correction_is_the_projection() {
        let d = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
        let mut acc = DistAccess::exact(d.clone(), 1);
        let c = corrector_from_learner(&ExactLearner, &mut acc, 0.15, 0.2, 0.1).unwrap();
        let want = closest_monotone_pmf(&d).unwrap();
        assert!(tv_distance(&c.pmf, &want).unwrap() < 1e-9);
        assert!((tv_distance(&c.pmf, &d).unwrap() - 0.15).abs() < 1e-9);
        assert_eq!(c.draws_used, 0);
        // sampling the correction leaves the input counter alone
        let mut s = c.stream(3);
        s.draw_many(100).unwrap();
        assert_eq!(acc.draws(), 0);
    }

    #[test]
    fn projection_handles_long_runs() {
        let mut w = vec![1.0; 5000];
        w.extend(vec![3.0; 5000]);
        w.extend(vec![0.5; 10000]);
        let p = Pmf::from_weights(w).unwrap();
        let q = project_monotone(&p).unwrap();
        assert!(q.is_monotone(1e-15));
        assert_eq!(q.n(), 20000);
    }

    #[test]
    fn birge_learner_agrees_with_learned_corrector_on_exact_masses() {
        // same partition and projection as the learned corrector when the
        // masses are exact
        let n = 200;
        let d = Pmf::from_weights((0..n).map(|k| 1.0 / (k as f64 + 3.0)).collect()).unwrap();
        let eps = 0.15;
        let part = birge_partition(n, eps / 3.0).unwrap();
        let hyp = part.spread(&part.masses(&d).unwrap()).unwrap();
        let ours = project_monotone(&hyp).unwrap();
        let mut acc = DistAccess::exact(d, 1);
        let theirs = learned_corrector_build(&mut acc, eps, 1.0, 0.1, Mode::Exact).unwrap();
        assert!(tv_distance(&ours, &theirs.pmf).unwrap() < 1e-9);
    }

    #[test]
    fn birge_learner_accuracy() {
        let n = 128;
        let d = Pmf::from_weights((0..n).map(|k| 0.97f64.powi(k as i32)).collect()).unwrap();
        let eta = 0.1;
        for seed in 0..5 {
            let mut acc = DistAccess::samples_only(d.clone(), seed);
            let h = BirgeLearner.learn(&mut acc, eta, 0.1).unwrap();
            assert!(tv_distance(&h, &d).unwrap() <= eta);
            assert_eq!(
                acc.draws() as usize,
                BirgeLearner.sample_cost(n, eta, 0.1).unwrap()
            );
        }
    }

    #[test]
    fn agnostic_example() {
        let (d, opt) = perturbed_monotone(64, 0.05, 4).unwrap();
        assert!((opt - 0.05).abs() < 1e-6);
        let mut acc = DistAccess::exact(d.clone(), 2);
        let out = agnostic_from_corrector(
            &LearningCorrector(ExactLearner),
            &ProjectedLearner(BirgeLearner),
            &mut acc,
            0.05,
            0.02,
            0.1,
            7,
        )
        .unwrap();
        assert!(out.hypothesis.is_monotone(1e-12));
        assert!(tv_distance(&d, &out.hypothesis).unwrap() <= 0.09);
    }

    #[test]
    fn tolerant_thresholds() {
        let beta: f64 = (0.5 - 0.1) / 4.0;
        assert!((beta - 0.1).abs() < 1e-15);
        assert!(((0.5 + 0.1) / 2.0 - 0.3f64).abs() < 1e-15);
    }

    #[test]
    fn estimator_on_a_known_pair() {
        // 8 intervals of 4; halves swapped between the two inputs
        let part = IntervalPartition::from_bounds(32, (1..=8).map(|k| 4 * k).collect()).unwrap();
        let a = Pmf::from_weights((0..32).map(|k| if k < 16 { 3.0 } else { 1.0 }).collect())
            .unwrap();
        let b = Pmf::from_weights((0..32).map(|k| if k < 16 { 1.0 } else { 3.0 }).collect())
            .unwrap();
        // tv = 0.5; mix towards a to bring it to 0.25
        let b = Pmf::from_weights(
            a.probs().iter().zip(b.probs()).map(|(x, y)| 0.5 * x + 0.5 * y).collect(),
        )
        .unwrap();
        assert!((tv_distance(&a, &b).unwrap() - 0.25).abs() < 1e-12);
        let mut hits = 0;
        for seed in 0..200 {
            let mut x = DistAccess::samples_only(a.clone(), seed);
            let mut y = DistAccess::samples_only(b.clone(), seed + 1000);
            let (est, _) = surrogate_distance_estimator(&mut x, &mut y, &part, 0.05, 0.1).unwrap();
            hits += (0.20..=0.30).contains(&est) as usize;
        }
        assert!(hits >= 190, "{hits}");
    }

    #[test]
    fn identical_inputs_estimate_below_alpha() {
        let d = Pmf::from_weights((0..64).map(|k| 1.0 + (k % 7) as f64).collect()).unwrap();
        let part = birge_partition(64, 0.1).unwrap();
        for seed in 0..10 {
            let mut x = DistAccess::samples_only(d.clone(), seed);
            let mut y = DistAccess::samples_only(d.clone(), seed + 99);
            let (est, _) = surrogate_distance_estimator(&mut x, &mut y, &part, 0.1, 0.1).unwrap();
            assert!(est <= 0.1);
        }
    }

    #[test]
    fn estimator_refuses_huge_budgets() {
        let part = IntervalPartition::singletons(1000);
        let mut x = DistAccess::samples_only(Pmf::uniform(1000), 1);
        let mut y = DistAccess::samples_only(Pmf::uniform(1000), 2);
        let e = surrogate_distance_estimator(&mut x, &mut y, &part, 0.001, 0.1).unwrap_err();
        assert!(matches!(e, Error::InsufficientSamples { .. }));
        assert_eq!(x.draws(), 0);
    }

    #[test]
    fn sample_accounting_matches_formulas() {
        let (d, _) = perturbed_monotone(64, 0.05, 2).unwrap();
        let (eps, eps1, delta) = (0.1, 0.3, 0.1);
        let mut acc = DistAccess::samples_only(d.clone(), 1);
        let c = corrector_from_learner(&BirgeLearner, &mut acc, eps, eps1, delta).unwrap();
        let q_l = BirgeLearner.sample_cost(64, (eps1 - eps) / 2.0, delta).unwrap();
        assert_eq!(c.draws_used as usize, q_l);

        let (lo, hi) = (0.1, 0.5);
        let beta = (hi - lo) / 4.0;
        let part = birge_partition(64, beta).unwrap();
        let mut acc = DistAccess::samples_only(d, 3);
        let out = tolerant_tester_from_corrector(
            &LearningCorrector(BirgeLearner),
            &mut acc,
            lo,
            hi,
            delta,
            4,
        )
        .unwrap();
        let q_l = BirgeLearner.sample_cost(64, beta / 2.0, delta / 3.0).unwrap();
        let q_e = estimator_cost(&part, beta, delta / 3.0);
        let q_t = tester_cost(&part, beta, delta / 3.0);
        assert_eq!(out.input_draws as usize, q_l + q_e);
        assert_eq!(acc.draws(), out.input_draws);
        assert!(out.tested);
        assert_eq!(out.corrected_draws, q_e + q_t);
        assert_eq!(out.verdict, Verdict::Accept);
    }

    #[test]
    fn distance_zero_fixture_is_accepted() {
        let (d, _) = perturbed_monotone(64, 0.0, 5).unwrap();
        let mut acc = DistAccess::exact(d, 5);
        let out =
            tolerant_tester_from_corrector(&LearningCorrector(ExactLearner), &mut acc, 0.1, 0.5, 0.1, 6)
                .unwrap();
        assert_eq!(out.verdict, Verdict::Accept);
    }

    #[test]
    fn mixture_distance_is_at_most_the_weight() {
        for seed in 0..5 {
            for t in [0.0, 1e-4, 0.01, 0.2] {
                let (_, d) = perturbed_mixture(128, t, seed).unwrap();
                assert!(d <= t + 1e-12);
            }
        }
    }

    #[test]
    fn tester_accepts_monotone() {
        let d = Pmf::from_weights((0..64).map(|k| 1.0 / (k as f64 + 1.0)).collect()).unwrap();
        let part = birge_partition(64, 0.1).unwrap();
        let mut acc = 0;
        for seed in 0..20 {
            let mut a = DistAccess::samples_only(d.clone(), seed);
            acc += (surrogate_monotonicity_tester(&mut a, &part, 0.1, 0.1).unwrap().0
                == Verdict::Accept) as usize;
        }
        assert!(acc >= 19);
    }

    #[test]
    fn fixtures_hit_their_distance() {
        for (n, dist) in [(64, 0.1), (64, 0.5), (1024, 0.05)] {
            let (p, d) = perturbed_monotone(n, dist, 9).unwrap();
            assert!((d - dist).abs() < 1e-6);
            assert!((distance_to_monotone_exact(&p).unwrap() - dist).abs() < 1e-6);
        }
        assert!(perturbed_monotone(64, 0.0, 1).unwrap().0.is_monotone(0.0));
    }
}
