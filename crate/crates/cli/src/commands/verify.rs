//! `verify ...`: exact and exhaustive checks; exit 1 when a check fails.

use clap::{Args, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_rational, MDefault, SchemeArgs};
use crate::error::CliError;
use crate::report::{Outcome, Status};
use weak_tt::games::{
    adversary_by_name, collect_evidence, input_matching_sweep, weak_index_hiding_verdict, xor_identity_exact, Verdict,
};
use weak_tt::primitives::{PrfKey, PrfRole, PrfShape, RunSeed};
use weak_tt::schemes::{check_correctness, check_hybrids, Coverage};
use weak_tt::stats::{
    renyi_divergence, statistical_distance, verify_conditional_hash_lemma, FiniteDist, HashFamily,
};

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Dec(sk_i, c) = 1{i <= j} over every user and covered ciphertext.
    Correctness(CorrectnessArgs),
    /// Functional equivalence of the claimed-identical hybrid programs.
    Hybrids(HybridArgs),
    /// Punctured keys agree with the parent off the set and give bottom on it.
    Puncture(PunctureArgs),
    /// TwoAdv = 2 Adv^2 for the stateless decoder, in exact arithmetic.
    XorIdentity(XorArgs),
    /// Conditioning a hash family on h(x) = y for random x in M barely moves it.
    LemmaHash(LemmaArgs),
    /// SD <= sqrt(RD - 1)/2 for two explicit distributions.
    SdRd(SdRdArgs),
    /// Exact input-matching advantage is non-increasing in the domain size.
    InputMatching(MatchingArgs),
    /// Weak index hiding: few decoders have advantage above 1/(4en).
    IndexHiding(IndexHidingArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrectnessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1)]
    pub setups: u64,
    /// Fresh encryptions per index when ciphertexts are sampled.
    #[arg(long, default_value_t = 16)]
    pub per_index: u64,
    /// Sample ciphertexts even when every preimage could be checked.
    #[arg(long)]
    pub sampled: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HybridArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    /// Check this index only; every index when omitted.
    #[arg(long)]
    pub i_star: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PunctureArgs {
    #[arg(long = "lambda", default_value_t = 64)]
    pub lambda_bits: u32,
    #[arg(long, default_value_t = 256)]
    pub domain: u64,
    #[arg(long, default_value_t = 16)]
    pub range: u64,
    /// One puncture set, e.g. `3` or `3,17`. Default: every single point plus random pairs.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<u64>>,
    #[arg(long, default_value_t = 32)]
    pub pairs: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XorArgs {
    /// Acceptance probability on i*; given with --q1 to check one pair.
    #[arg(long, value_parser = parse_rational, requires = "q1")]
    #[serde(serialize_with = "weak_tt::json::opt_ratio")]
    pub q0: Option<BigRational>,
    #[arg(long, value_parser = parse_rational, requires = "q0")]
    #[serde(serialize_with = "weak_tt::json::opt_ratio")]
    pub q1: Option<BigRational>,
    /// Random pairs with denominators up to 1000, checked alongside (1,0), (1/2,1/2), (3/4,1/4).
    #[arg(long, default_value_t = 1000)]
    pub random: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    AllFunctions,
    Constant,
    Ggm,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LemmaArgs {
    #[arg(long, value_enum, default_value = "all-functions")]
    pub family: FamilyKind,
    /// Domain size T.
    #[arg(long, default_value_t = 4)]
    pub t: u64,
    /// Range size K.
    #[arg(long, default_value_t = 2)]
    pub k: u64,
    /// The set M. Default: every nonempty subset of [T].
    #[arg(long, value_delimiter = ',')]
    pub target: Option<Vec<u64>>,
    /// Default: every y in [K].
    #[arg(long)]
    pub y: Option<u64>,
    /// Keys in the GGM family.
    #[arg(long, default_value_t = 256)]
    pub seeds: u64,
    #[arg(long = "lambda", default_value_t = 64)]
    pub lambda_bits: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SdRdArgs {
    /// Probabilities, e.g. `1/2,1/4,1/4`.
    #[arg(long, value_parser = parse_rational, value_delimiter = ',', required = true)]
    #[serde(serialize_with = "weak_tt::json::ratios")]
    pub p: Vec<BigRational>,
    #[arg(long, value_parser = parse_rational, value_delimiter = ',', required = true)]
    #[serde(serialize_with = "weak_tt::json::ratios")]
    pub q: Vec<BigRational>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatchingArgs {
    /// Range size n.
    #[arg(long, default_value_t = 2)]
    pub range: u64,
    /// Domain sizes m.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    pub domains: Vec<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IndexHidingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value = "black-box-decrypt")]
    pub adversary: String,
    /// Independent (setup, decoder) draws per index.
    #[arg(long, default_value_t = 100)]
    pub decoders: u64,
    /// Challenges per decoder.
    #[arg(long, default_value_t = 1000)]
    pub challenges: u64,
    /// TwoIndexHiding trials per index; 0 skips them.
    #[arg(long, default_value_t = 0)]
    pub two_trials: u64,
    /// Multiplier on both thresholds.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}



pub fn run(cmd: &VerifyCommand, seed: &RunSeed) -> Result<Outcome, CliError> {
    match cmd {
        VerifyCommand::Correctness(a) => correctness(a, seed),
        VerifyCommand::Hybrids(a) => hybrids(a, seed),
        VerifyCommand::Puncture(a) => puncture(a, seed),
        VerifyCommand::XorIdentity(a) => xor_identity(a, seed),
        VerifyCommand::LemmaHash(a) => lemma_hash(a, seed),
        VerifyCommand::SdRd(a) => sd_rd(a),
        VerifyCommand::InputMatching(a) => matching(a),
        VerifyCommand::IndexHiding(a) => index_hiding(a, seed),
    }
}

fn correctness(a: &CorrectnessArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let (params, formula) = a.scheme.resolve(MDefault::Scheme)?;
    let coverage = if a.sampled {
        Coverage::Sampled(a.per_index)
    } else {
        Coverage::default_for(&params, a.per_index)
    };
    let r = check_correctness(&params, a.setups, coverage, seed)?;
    let line = format!(
        "{} n = {} m = {}: {} decryptions over {} setups, {} failures",
        params.scheme, params.n, params.m, r.checks, r.setups, r.failures
    );
    Ok(Outcome::new(Status::from_pass(r.pass()), r, line)?.formula("m", formula))
}

fn hybrids(a: &HybridArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let (params, formula) = a.scheme.resolve(MDefault::Simulation)?;
    let r = check_hybrids(&params, a.i_star, seed)?;
    let line = format!("{} hybrid steps checked, {} failed", r.steps.len(), r.failures);
    Ok(Outcome::new(Status::from_pass(r.pass()), r, line)?.formula("m", formula))
}

#[derive(Serialize)]
struct PunctureCase {
    points: Vec<u64>,
    mismatches: u64,
}

fn puncture(a: &PunctureArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let shape = PrfShape::index(a.lambda_bits, a.domain, a.range, PrfRole::Generic)?;
    let key = PrfKey::random(shape, &seed.derive("key"));
    let table = key.evaluate_all()?;
    let sets: Vec<Vec<u64>> = match &a.points {
        Some(p) => vec![p.clone()],
        None => {
            let mut rng = seed.derive("pairs").rng();
            let mut sets: Vec<Vec<u64>> = (0..a.domain).map(|x| vec![x]).collect();
            if a.domain >= 2 {
                for _ in 0..a.pairs {
                    let x = rng.random_range(0..a.domain);
                    let mut y = rng.random_range(0..a.domain - 1);
                    if y >= x {
                        y += 1;
                    }
                    sets.push(vec![x, y]);
                }
            }
            sets
        }
    };
    let cases = sets
        .into_iter()
        .map(|points| {
            let pk = key.puncture(&points)?;
            let mut mismatches = 0;
            for x in 0..a.domain {
                let expect = (!points.contains(&x)).then(|| table[x as usize]);
                if pk.eval(x)? != expect {
                    mismatches += 1;
                }
            }
            Ok(PunctureCase { points, mismatches })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let bad = cases.iter().filter(|c| c.mismatches > 0).count();
    let line = format!("{} puncture sets over domain {}, {} with mismatches", cases.len(), a.domain, bad);
    let results = json!({
        "domain": a.domain,
        "range": a.range,
        "sets": cases.len(),
        "failing_sets": bad,
        "failures": cases.iter().filter(|c| c.mismatches > 0).collect::<Vec<_>>(),
    });
    Outcome::new(Status::from_pass(bad == 0), results, line)
}

fn xor_identity(a: &XorArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let mut pairs = vec![(r(1, 1), r(0, 1)), (r(1, 2), r(1, 2)), (r(3, 4), r(1, 4))];
    if let (Some(q0), Some(q1)) = (&a.q0, &a.q1) {
        pairs.insert(0, (q0.clone(), q1.clone()));
    }
    let listed = pairs.len();
    let mut rng = seed.derive("pairs").rng();
    for _ in 0..a.random {
        let den: i64 = rng.random_range(1..=1000);
        pairs.push((r(rng.random_range(0..=den), den), r(rng.random_range(0..=den), den)));
    }
    let checks = pairs
        .iter()
        .map(|(q0, q1)| xor_identity_exact(q0, q1))
        .collect::<Result<Vec<_>, _>>()?;
    let failures: Vec<_> = checks.iter().filter(|x| !x.identity_holds).collect();
    let line = format!("two_adv = 2 adv^2 on {} pairs, {} failures", checks.len(), failures.len());
    let results = json!({
        "pairs": checks.len(),
        "listed": &checks[..listed],
        "failures": failures,
    });
    Ok(Outcome::new(Status::from_pass(failures.is_empty()), results, line)?
        .formula("adv", "|Pr[1 - S(c) = b] - 1/2| = |q0 - q1|/2")
        .formula("two_adv", "Pr[S(c0) xor S(c1) = b0 xor b1] - 1/2"))
}

fn lemma_hash(a: &LemmaArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let family = match a.family {
        FamilyKind::AllFunctions => HashFamily::all_functions(a.t, a.k)?,
        FamilyKind::Constant => HashFamily::constant_functions(a.t, a.k)?,
        FamilyKind::Ggm => HashFamily::ggm(a.t, a.k, a.lambda_bits, a.seeds, seed)?,
    };
    let targets: Vec<Vec<u64>> = match &a.target {
        Some(t) => vec![t.clone()],
        None if a.t <= 16 => (1u64..1 << a.t)
            .map(|mask| (0..a.t).filter(|x| mask >> x & 1 == 1).collect())
            .collect(),
        None => return Err(CliError::usage("T > 16: pass --target explicitly")),
    };
    let ys: Vec<u64> = match a.y {
        Some(y) => vec![y],
        None => (0..a.k).collect(),
    };
    let mut reports = Vec::new();
    for m in &targets {
        for &y in &ys {
            match verify_conditional_hash_lemma(&family, m, y) {
                Ok(r) => reports.push(r),
                // h(x) = y impossible on all of M: nothing to condition on.
                Err(weak_tt::Error::Parameter(_)) if a.target.is_none() || a.y.is_none() => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    let failures = reports.iter().filter(|r| !r.pass).count();
    let line = format!("{}: {} instances, {} failures", family.description, reports.len(), failures);
    let results = json!({ "family": family, "instances": reports.len(), "failures": failures, "reports": reports });
    Ok(Outcome::new(Status::from_pass(failures == 0), results, line)?
        .formula("statement_bound", "(1/2) sqrt(K/m + 7 K^2 delta)")
        .formula("rd_bound", "1 + (K - 1)/m + 7 K^2 delta")
        .formula("delta", "max |Pr[h(x0) = y0 and h(x1) = y1] - 1/K^2| over x0 != x1"))
}

fn sd_rd(a: &SdRdArgs) -> Result<Outcome, CliError> {
    if a.p.len() != a.q.len() {
        return Err(CliError::usage("p and q need the same number of outcomes"));
    }
    let dist = |v: &[BigRational]| FiniteDist::new(v.iter().cloned().enumerate().collect());
    let (p, q) = (dist(&a.p)?, dist(&a.q)?);
    let sd = statistical_distance(&p, &q)?;
    let rd = renyi_divergence(&p, &q)?;
    let holds = rd.bounds_sd(&sd);
    let line = format!("SD = {sd}, sqrt(RD - 1)/2 = {:.6}, bound holds: {holds}", rd.sd_bound());
    let results = json!({
        "sd": crate::report::ratio_value(&sd),
        "rd": rd,
        "sd_bound": weak_tt::json::decimal_string(rd.sd_bound()),
        "holds": holds,
    });
    Ok(Outcome::new(Status::from_pass(holds), results, line)?
        .formula("sd", "(1/2) sum |p - q|")
        .formula("rd", "sum q^2 / p"))
}

fn matching(a: &MatchingArgs) -> Result<Outcome, CliError> {
    let s = input_matching_sweep(a.range, &a.domains)?;
    let line = format!(
        "optimal advantage at n = {}: {}; non-increasing: {}",
        a.range,
        s.rows.iter().map(|r| format!("m={} {}", r.m, r.optimal_advantage)).collect::<Vec<_>>().join(", "),
        s.monotone_non_increasing
    );
    let pass = s.monotone_non_increasing;
    Ok(Outcome::new(Status::from_pass(pass), s, line)?
        .formula("fitted_c", "max over rows of optimal_advantage / sqrt(n/m)"))
}

fn index_hiding(a: &IndexHidingArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let (params, formula) = a.scheme.resolve(MDefault::Simulation)?;
    let adversary = adversary_by_name(&a.adversary)?;
    let evidence = collect_evidence(&params, adversary.as_ref(), a.decoders, a.challenges, a.two_trials, seed)?;
    let v = weak_index_hiding_verdict(&evidence, params.n, a.scale)?;
    let status = match v.verdict {
        Verdict::Pass => Status::Pass,
        Verdict::Fail => Status::Fail,
        Verdict::Inconclusive => Status::Inconclusive,
    };
    let line = format!("weak index hiding vs {}: {:?}", a.adversary, v.verdict).to_lowercase();
    Ok(Outcome::new(status, json!({ "params": params, "verdict": v, "evidence": evidence }), line)?
        .formula("m", formula)
        .formula("good_decoder", "Adv > scale/(4en)")
        .formula("allowed_fraction", "scale/(2en), widened by a Hoeffding margin over decoders"))
}
