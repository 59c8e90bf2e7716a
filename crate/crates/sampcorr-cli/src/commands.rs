use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Result};
use clap::ValueEnum;
use rand::Rng;
use serde_json::json;

use sampcorr::isotonic::ORACLE_LIMIT;
use sampcorr::meta::{
    perturbed_monotone, tolerant_tester_from_corrector, BirgeLearner, ExactLearner,
    LearningCorrector,
};
use sampcorr::missing_data::{inject_missing, MissingDataImprover};
use sampcorr::mono_correct::{
    learned_corrector_build, oblivious_promise, ObliviousCorrector, WaterfillState,
};
use sampcorr::rng::stream;
use sampcorr::uniformity::{
    conditional_on_subgroup, interval_instance, vn_sample, BootstrapImprover,
    ConvolutionImprover, HybridImprover, MonotoneExtractor, Outcome, SubgroupImprover,
};
use sampcorr::{
    birge_partition, distance_to_monotone_exact, empirical_pmf, tv_distance, Coins,
    CorrectorParams, DistAccess, Error, Pmf,
};

use crate::io::{emit, number, pmf_bytes, stream_bytes, Input};
use crate::report::Report;
use crate::{Cli, Command, CorrectArgs, CorruptCmd, EvalCmd, GenArgs, GenKind, Method, ModeArg, TestCmd};

/// Failures beyond the stated `δ` budget; exit code 1.
#[derive(Debug)]
pub struct ContractFailure(pub String);

impl fmt::Display for ContractFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "contract failure: {}", self.0)
    }
}

impl std::error::Error for ContractFailure {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ContractFailure>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::PromiseViolation(_)) => 1,
        _ => 2,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Command::Gen(a) => gen(cli, a),
        Command::Corrupt { what } => corrupt(cli, what),
        Command::Correct(a) => correct(cli, a),
        Command::Eval { what } => eval(cli, what),
        Command::Test { what } => test(cli, what),
    }
}

fn finish(cli: &Cli, mut rep: Report, bytes: &[u8]) -> Result<()> {
    rep.set("output_digest", crate::io::digest(bytes));
    emit(cli.out.as_deref(), bytes)?;
    rep.write(cli.report.as_deref())
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| anyhow!("--{name} is required here"))
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<()> {
    let mut rep = Report::new("gen", cli.seed, cli.mode.name());
    let kind = a.kind.to_possible_value().unwrap().get_name().to_string();
    rep.set("method", kind);
    rep.param("n", a.n);
    if a.n == 0 {
        bail!("n must be positive");
    }
    let n = a.n;
    let p = match a.kind {
        GenKind::Uniform => Pmf::uniform(n),
        GenKind::ZipfMonotone => {
            rep.param("exponent", a.exponent);
            if a.exponent < 0.0 {
                bail!("exponent must be non-negative");
            }
            Pmf::from_weights((1..=n).map(|x| (x as f64).powf(-a.exponent)).collect())?
        }
        GenKind::GeometricMonotone => {
            rep.param("ratio", a.ratio);
            if !(a.ratio > 0.0 && a.ratio <= 1.0) {
                bail!("ratio must lie in (0, 1]");
            }
            Pmf::from_weights((0..n).map(|k| a.ratio.powi(k as i32)).collect())?
        }
        GenKind::Staircase => {
            rep.param("steps", a.steps);
            if a.steps == 0 || a.steps > n {
                bail!("steps must lie in 1..=n");
            }
            let mut rng = stream(cli.seed, 2);
            let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, a.steps - 1)
                .into_iter()
                .map(|c| c + 1)
                .collect();
            cuts.sort_unstable();
            cuts.push(n);
            let mut levels: Vec<f64> = (0..a.steps).map(|_| rng.random::<f64>() + 0.01).collect();
            levels.sort_by(|x, y| y.total_cmp(x));
            let mut w = Vec::with_capacity(n);
            let mut start = 0;
            for (&end, &v) in cuts.iter().zip(&levels) {
                w.extend(std::iter::repeat_n(v, end - start));
                start = end;
            }
            Pmf::from_weights(w)?
        }
        GenKind::IntervalUniform => {
            let eps = need(a.eps, "eps")?;
            rep.param("eps", eps);
            interval_instance(n, eps)?
        }
        GenKind::PerturbedMonotone => {
            let dist = need(a.dist, "dist")?;
            rep.param("dist", dist);
            let (p, d) = perturbed_monotone(n, dist, cli.seed)?;
            rep.set("certified_distance", d);
            rep.set("tv_to_property", d);
            rep.set("distance_basis", "exact");
            p
        }
    };
    match cli.mode {
        ModeArg::Exact => finish(cli, rep, &pmf_bytes(&p)),
        ModeArg::Sample => {
            rep.param("draws", a.draws);
            let mut acc = DistAccess::samples_only(p, cli.seed);
            let s = acc.draw_many(a.draws)?;
            finish(cli, rep, &stream_bytes(&s)?)
        }
    }
}

fn corrupt(cli: &Cli, what: &CorruptCmd) -> Result<()> {
    let CorruptCmd::Missing { input, from, to, n } = what;
    let mut rep = Report::new("corrupt", cli.seed, cli.mode.name());
    rep.set("method", "missing");
    rep.param("from", *from);
    rep.param("to", *to);
    let inp = Input::read(input)?;
    rep.set("input_digest", inp.digest());
    match cli.mode {
        ModeArg::Exact => {
            let d = inp.pmf()?;
            let (dp, w) = inject_missing(&d, *from, *to)?;
            rep.set("deleted_weight", w);
            rep.set("tv_to_input", tv_distance(&d, &dp)?);
            rep.set("distance_basis", "exact");
            finish(cli, rep, &pmf_bytes(&dp))
        }
        ModeArg::Sample => {
            let n = n.ok_or_else(|| anyhow!("--n is required for a sample stream"))?;
            if !(1 <= *from && from <= to && *to <= n) {
                bail!("need 1 <= from <= to <= n");
            }
            let s = inp.stream()?;
            if let Some(&x) = s.iter().find(|&&x| x == 0 || x > n) {
                bail!("sample {x} outside 1..={n}");
            }
            let kept: Vec<usize> = s.iter().copied().filter(|x| !(from..=to).contains(&x)).collect();
            rep.set("draws_consumed", s.len());
            rep.set("deleted_weight", 1.0 - kept.len() as f64 / s.len().max(1) as f64);
            rep.set("distance_basis", "empirical");
            finish(cli, rep, &stream_bytes(&kept)?)
        }
    }
}

/// Input access for the chosen mode, with the exact pmf when known.
fn open(cli: &Cli, inp: &Input, n: Option<usize>) -> Result<(DistAccess, Option<Pmf>, Option<Pmf>)> {
    match cli.mode {
        ModeArg::Exact => {
            let d = inp.pmf()?;
            Ok((DistAccess::exact(d.clone(), cli.seed), Some(d.clone()), Some(d)))
        }
        ModeArg::Sample => {
            let n = n.ok_or_else(|| anyhow!("--n is required for a sample stream"))?;
            let s = inp.stream()?;
            let emp = if s.is_empty() { None } else { Some(empirical_pmf(&s, n)?) };
            Ok((DistAccess::from_stream(n, s)?, None, emp))
        }
    }
}

enum Target {
    Monotone,
    Uniform,
    Subgroup(usize),
}

impl Target {
    fn distance(&self, p: &Pmf) -> Result<Option<f64>> {
        Ok(match self {
            Target::Monotone if p.n() <= ORACLE_LIMIT => Some(distance_to_monotone_exact(p)?),
            Target::Monotone => None,
            Target::Uniform => Some(tv_distance(p, &Pmf::uniform(p.n()))?),
            Target::Subgroup(h) => {
                Some(tv_distance(p, &conditional_on_subgroup(&Pmf::uniform(p.n()), *h)?)?)
            }
        })
    }
}

enum Produced {
    Pmf(Pmf),
    Samples(Vec<usize>),
}

fn outcomes(
    q: usize,
    fails: &mut u64,
    mut f: impl FnMut() -> sampcorr::Result<Outcome>,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(q);
    for _ in 0..q {
        match f()? {
            Outcome::Value(x) => out.push(x),
            Outcome::Fail => *fails += 1,
            Outcome::PointMass => {}
        }
    }
    Ok(out)
}

fn correct(cli: &Cli, a: &CorrectArgs) -> Result<()> {
    let mut rep = Report::new("correct", cli.seed, cli.mode.name());
    rep.set("method", a.method.to_possible_value().unwrap().get_name());
    let inp = Input::read(&a.input)?;
    rep.set("input_digest", inp.digest());
    let (mut access, exact, reference) = open(cli, &inp, a.n)?;
    if let Some(cf) = &a.ceval_file {
        let table = Input::read(cf)?.cdf_table()?;
        access = access.with_cdf_table(table)?;
    }
    let n = access.n();
    let exact_mode = cli.mode == ModeArg::Exact;
    let mut coins = Coins::new(cli.seed);
    let (delta, q) = (a.delta, a.queries);
    rep.param("delta", delta);
    let mut fails = 0u64;
    let mut restarts = 0u64;
    let mut target = Target::Uniform;

    let produced = match a.method {
        Method::Learned => {
            target = Target::Monotone;
            let eps = need(a.eps, "eps")?;
            rep.param("eps", eps);
            rep.param("c", a.c);
            let lc = learned_corrector_build(&mut access, eps, a.c, delta, cli.mode.lib())?;
            if exact_mode {
                Produced::Pmf(lc.pmf)
            } else {
                Produced::Samples((0..q).map(|_| lc.sample(&mut coins)).collect())
            }
        }
        Method::Oblivious => {
            target = Target::Monotone;
            let eps1 = a.eps1.unwrap_or(0.2);
            let eps = a.eps.unwrap_or_else(|| oblivious_promise(n, eps1));
            rep.param("eps", eps);
            rep.param("eps1", eps1);
            let cor = ObliviousCorrector::with_promise(n, eps1, eps)?;
            match &exact {
                Some(d) => Produced::Pmf(cor.correct_exact(d)?),
                None => Produced::Samples(
                    (0..q)
                        .map(|_| cor.sample(&mut access, &mut coins))
                        .collect::<sampcorr::Result<_>>()?,
                ),
            }
        }
        Method::Waterfill => {
            target = Target::Monotone;
            let eps = a.eps.unwrap_or(0.1);
            rep.param("eps", eps);
            rep.param("m", a.m);
            let mut st = WaterfillState::preprocess(&mut access, eps, a.m)?;
            let out = if exact_mode {
                Produced::Pmf(st.materialize(&mut access)?)
            } else {
                Produced::Samples(
                    (0..q)
                        .map(|_| st.sample(&mut access, &mut coins))
                        .collect::<sampcorr::Result<_>>()?,
                )
            };
            restarts = st.restarts();
            out
        }
        Method::MissingData => {
            target = Target::Monotone;
            let eps2 = need(a.eps2, "eps2")?;
            let eps = a.eps.unwrap_or(2.0 * eps2);
            rep.param("eps", eps);
            rep.param("eps2", eps2);
            let imp = MissingDataImprover::preprocess(&mut access, eps, eps2, delta, cli.mode.lib())?;
            rep.set("missing_data_report", serde_json::from_str::<serde_json::Value>(&imp.report.to_json())?);
            rep.set("pass_through", imp.passes_through());
            match &exact {
                Some(d) => Produced::Pmf(imp.output_pmf(d)?),
                None => Produced::Samples(imp.sample_batch(&mut access, &mut coins, q)?),
            }
        }
        Method::Vn => {
            let eps = a.eps.unwrap_or(0.1);
            rep.param("eps", eps);
            Produced::Samples(outcomes(q, &mut fails, || vn_sample(&mut access, eps, delta))?)
        }
        Method::MonoExtract => {
            let eps = a.eps.unwrap_or(0.1);
            rep.param("eps", eps);
            let ex = MonotoneExtractor::calibrate(&mut access, eps, delta)?;
            rep.set("point_mass", ex == MonotoneExtractor::PointMass);
            Produced::Samples(outcomes(q, &mut fails, || ex.sample(&mut access))?)
        }
        Method::Convolution | Method::Hybrid | Method::Bootstrap => {
            let eps = need(a.eps, "eps")?;
            rep.param("eps", eps);
            enum Imp {
                C(ConvolutionImprover),
                H(HybridImprover),
                B(BootstrapImprover),
            }
            let imp = match a.method {
                Method::Convolution => {
                    let eps2 = need(a.eps2, "eps2")?;
                    rep.param("eps2", eps2);
                    Imp::C(ConvolutionImprover::new(eps, eps2)?)
                }
                Method::Hybrid => Imp::H(HybridImprover::new(eps)?),
                _ => {
                    let eps2 = need(a.eps2, "eps2")?;
                    rep.param("eps2", eps2);
                    Imp::B(BootstrapImprover::new(eps, eps2)?)
                }
            };
            match (&exact, &imp) {
                (Some(d), Imp::C(i)) => Produced::Pmf(i.exact(d)?),
                (Some(d), Imp::H(i)) => Produced::Pmf(i.exact(d)?),
                (Some(d), Imp::B(i)) => Produced::Pmf(i.exact(d)?),
                (None, imp) => Produced::Samples(
                    (0..q)
                        .map(|_| match imp {
                            Imp::C(i) => i.sample(&mut access),
                            Imp::H(i) => i.sample(&mut access),
                            Imp::B(i) => i.sample(&mut access),
                        })
                        .collect::<sampcorr::Result<_>>()?,
                ),
            }
        }
        Method::Subgroup => {
            let eps = need(a.eps, "eps")?;
            let eps2 = need(a.eps2, "eps2")?;
            rep.param("eps", eps);
            rep.param("eps2", eps2);
            let params = CorrectorParams {
                eps,
                eps1: eps + eps2,
                eps2,
                delta,
                batch: q,
            };
            let imp = SubgroupImprover::build(&mut access, &params)?;
            rep.set("subgroup_gen", imp.h);
            target = Target::Subgroup(imp.h);
            match &exact {
                Some(d) => Produced::Pmf(imp.exact(d)?),
                None => Produced::Samples(outcomes(q, &mut fails, || imp.sample(&mut access))?),
            }
        }
    };

    rep.set("draws_consumed", access.draws());
    rep.set("cdf_queries", access.cdf_queries());
    rep.set("coins_used", coins.used());
    rep.set("fail_count", fails);
    rep.set("restarts", restarts);

    let bytes = match &produced {
        Produced::Pmf(p) => {
            if let Some(d) = &exact {
                rep.set("tv_to_input", tv_distance(d, p)?);
            }
            rep.set("tv_to_property", json!(target.distance(p)?));
            rep.set("distance_basis", "exact");
            pmf_bytes(p)
        }
        Produced::Samples(s) => {
            if !s.is_empty() {
                let emp = empirical_pmf(s, n)?;
                if let Some(r) = &reference {
                    rep.set("tv_to_input", tv_distance(r, &emp)?);
                }
                rep.set("tv_to_property", json!(target.distance(&emp)?));
                rep.set("distance_basis", "empirical");
            }
            stream_bytes(s)?
        }
    };
    let budget = (delta * q as f64).ceil() as u64;
    finish(cli, rep, &bytes)?;
    if fails > budget {
        return Err(ContractFailure(format!("{fails} FAIL outcomes in {q} queries exceed δ·q = {budget}")).into());
    }
    Ok(())
}

fn read_pmf(path: &Path) -> Result<(Pmf, String)> {
    let inp = Input::read(path)?;
    Ok((inp.pmf()?, inp.digest()))
}

fn eval(cli: &Cli, what: &EvalCmd) -> Result<()> {
    let mut rep = Report::new("eval", cli.seed, "exact");
    let bytes = match what {
        EvalCmd::DistToMonotone { input } => {
            rep.set("method", "dist-to-monotone");
            let (d, dig) = read_pmf(input)?;
            rep.set("input_digest", dig);
            let v = distance_to_monotone_exact(&d)?;
            rep.set("tv_to_property", v);
            rep.set("distance_basis", "exact");
            format!("{}\n", number(v)).into_bytes()
        }
        EvalCmd::Tv { input, other } => {
            rep.set("method", "tv");
            let (p, dig) = read_pmf(input)?;
            let (q, dig2) = read_pmf(other)?;
            rep.set("input_digest", dig);
            rep.set("other_digest", dig2);
            let v = tv_distance(&p, &q)?;
            rep.set("tv_to_input", v);
            rep.set("distance_basis", "exact");
            format!("{}\n", number(v)).into_bytes()
        }
        EvalCmd::Cdf { input } => {
            rep.set("method", "cdf");
            let (d, dig) = read_pmf(input)?;
            rep.set("input_digest", dig);
            format!("{}\n", serde_json::to_string(&d.cdf())?).into_bytes()
        }
        EvalCmd::Partition { n, alpha } => {
            rep.set("method", "partition");
            rep.param("n", *n);
            rep.param("alpha", *alpha);
            let part = birge_partition(*n, *alpha)?;
            rep.set("intervals", part.ell());
            format!("{}\n", part.to_json()).into_bytes()
        }
    };
    finish(cli, rep, &bytes)
}

fn test(cli: &Cli, what: &TestCmd) -> Result<()> {
    let TestCmd::TolerantMonotone {
        input,
        n,
        eps_lo,
        eps_hi,
        delta,
    } = what;
    let mut rep = Report::new("test", cli.seed, cli.mode.name());
    rep.set("method", "tolerant-monotone");
    rep.param("eps_lo", *eps_lo);
    rep.param("eps_hi", *eps_hi);
    rep.param("delta", *delta);
    let inp = Input::read(input)?;
    rep.set("input_digest", inp.digest());
    let (mut access, exact, _) = open(cli, &inp, *n)?;
    // tester stage draws from the correction under its own seed stream
    let tilde_seed = cli.seed.wrapping_add(1);
    let out = if exact.is_some() {
        tolerant_tester_from_corrector(
            &LearningCorrector(ExactLearner),
            &mut access,
            *eps_lo,
            *eps_hi,
            *delta,
            tilde_seed,
        )?
    } else {
        tolerant_tester_from_corrector(
            &LearningCorrector(BirgeLearner),
            &mut access,
            *eps_lo,
            *eps_hi,
            *delta,
            tilde_seed,
        )?
    };
    rep.set("verdict", json!(out.verdict));
    rep.set("estimate", out.estimate);
    rep.set("distance_basis", "empirical");
    rep.set("tested", out.tested);
    rep.set("draws_consumed", out.input_draws);
    rep.set("corrected_draws", out.corrected_draws);
    rep.set("cdf_queries", access.cdf_queries());
    let verdict = rep.get("verdict").and_then(|v| v.as_str()).unwrap_or("").to_string();
    finish(cli, rep, format!("{verdict}\n").as_bytes())
}
