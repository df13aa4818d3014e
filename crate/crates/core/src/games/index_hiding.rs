//! IndexHiding and TwoIndexHiding.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::adversary::{Adversary, AdversaryView, Challenge};
use super::{hoeffding_half_width, Thresholds, CONFIDENCE};
use crate::error::{Error, Result};
use crate::obf::obfuscate;
use crate::primitives::RunSeed;
use crate::schemes::short_ctext::{build_hybrid_sc, ScChallenge, XStar};
use crate::schemes::short_key::build_hybrid_sk;
use crate::schemes::{setup, Ciphertext, Instance, SchemeKind, SchemeParams, UserKey};

/// Optional knobs shared by both games.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GameOptions {
    /// Run the game against hybrid `level` instead of the real scheme.
    pub hybrid_level: Option<u8>,
}

/// Frequencies of the two challenge bits, for checking their independence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitStats {
    /// `counts[b0][b1]`.
    pub counts: [[u64; 2]; 2],
    /// `Pr[b0 = b1] - 1/2`, estimated.
    #[serde(serialize_with = "crate::json::ratio")]
    pub agreement_bias: BigRational,
    #[serde(serialize_with = "crate::json::decimal")]
    pub ci_low: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameResult {
    pub game: String,
    pub scheme: Option<SchemeKind>,
    pub adversary: String,
    pub n: u64,
    pub i_star: Option<u64>,
    pub trials: u64,
    pub successes: u64,
    /// Trials where the adversary raised an error; scored as wrong guesses.
    pub adversary_errors: u64,
    /// `successes/trials - 1/2`.
    #[serde(serialize_with = "crate::json::ratio")]
    pub advantage_estimate: BigRational,
    #[serde(serialize_with = "crate::json::decimal")]
    pub ci_low: f64,
    #[serde(serialize_with = "crate::json::decimal")]
    pub ci_high: f64,
    pub ci_method: String,
    pub thresholds: Thresholds,
    pub hybrid_level: Option<u8>,
    pub bit_stats: Option<BitStats>,
}

impl GameResult {
    pub(crate) fn from_counts(
        game: &str,
        adversary: String,
        n: u64,
        trials: u64,
        successes: u64,
        adversary_errors: u64,
    ) -> Self {
        let adv = if trials == 0 {
            BigRational::from_integer(0.into())
        } else {
            BigRational::new(BigInt::from(successes), BigInt::from(trials))
                - BigRational::new(1.into(), 2.into())
        };
        let est = crate::json::to_f64(&adv);
        let hw = hoeffding_half_width(trials, CONFIDENCE);
        GameResult {
            game: game.to_owned(),
            scheme: None,
            adversary,
            n,
            i_star: None,
            trials,
            successes,
            adversary_errors,
            advantage_estimate: adv,
            ci_low: (est - hw).max(-0.5),
            ci_high: (est + hw).min(0.5),
            ci_method: format!("hoeffding two-sided {CONFIDENCE}"),
            thresholds: Thresholds::new(n.max(1)),
            hybrid_level: None,
            bit_stats: None,
        }
    }

    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.successes as f64 / self.trials as f64
    }

    pub fn ci_contains_zero(&self) -> bool {
        self.ci_low <= 0.0 && 0.0 <= self.ci_high
    }
}

pub(crate) struct Trial {
    pub success: bool,
    pub adversary_error: bool,
    pub bits: (u8, u8),
}

/// Runs `trials` independent trials with seeds `seed.derive(t)` and merges in
/// trial order.
pub(crate) fn run_trials<F>(trials: u64, seed: &RunSeed, f: F) -> Result<Vec<Trial>>
where
    F: Fn(RunSeed) -> Result<Trial> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(seed.derive(t)))
        .collect()
}

fn check_i_star(params: &SchemeParams, i_star: u64) -> Result<()> {
    if i_star == 0 || i_star > params.n {
        return Err(Error::param(format!("i* = {i_star} out of 1..={}", params.n)));
    }
    Ok(())
}

fn random_bit(seed: &RunSeed) -> u8 {
    seed.rng().random_range(0..2)
}

/// Challenge ciphertexts for `bits` plus the keys handed to the adversary,
/// under the real scheme or the requested hybrid.
fn challenge_material(
    inst: &Instance,
    level: Option<u8>,
    i_star: u64,
    bits: &[u8],
    seed: &RunSeed,
) -> Result<(Vec<Ciphertext>, Vec<UserKey>)> {
    let mut held: Vec<UserKey> = inst
        .users()
        .into_iter()
        .filter(|k| k.index() != i_star)
        .collect();
    let level = level.unwrap_or(0);
    let cts = match inst {
        Instance::ShortCtext(sys) => {
            let cts = bits
                .iter()
                .enumerate()
                .map(|(k, &b)| inst.encrypt(i_star - u64::from(b), &seed.derive("c").derive(k)))
                .collect::<Result<Vec<_>>>()?;
            if level > 0 {
                let raw: Vec<u64> = cts
                    .iter()
                    .map(|c| match c {
                        Ciphertext::ShortCtext(c) => *c,
                        Ciphertext::ShortKey(_) => unreachable!(),
                    })
                    .collect();
                let (c1, b1) = if raw.len() > 1 { (raw[1], bits[1]) } else { (raw[0], bits[0]) };
                let challenge = ScChallenge {
                    c0: raw[0],
                    b0: bits[0],
                    c1,
                    b1,
                };
                let d = build_hybrid_sc(
                    level,
                    sys,
                    i_star,
                    Some(challenge),
                    XStar::Honest,
                    &seed.derive("hybrid"),
                )?;
                let prog = obfuscate(d, &held_backend(sys), &seed.derive("obfuscate"))?;
                for k in &mut held {
                    if let UserKey::ShortCtext(k) = k {
                        k.program = prog.clone();
                    }
                }
            }
            cts
        }
        Instance::ShortKey(sys) => {
            // Both challenges share one s̃.
            let s_tilde = seed.derive("s-tilde").rng().random_range(0..sys.params.m);
            bits.iter()
                .enumerate()
                .map(|(k, &b)| {
                    build_hybrid_sk(level, &sys.master, i_star, b, Some(s_tilde), &seed.derive("c").derive(k))
                        .map(|(c, _)| Ciphertext::ShortKey(c))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok((cts, held))
}

fn held_backend(sys: &crate::schemes::ScSystem) -> String {
    sys.users
        .first()
        .map(|k| k.program.backend.clone())
        .unwrap_or_else(|| crate::obf::TRANSPARENT.to_owned())
}

fn play(
    params: &SchemeParams,
    i_star: u64,
    adversary: &dyn Adversary,
    options: GameOptions,
    two: bool,
    ts: RunSeed,
) -> Result<Trial> {
    let inst = setup(params, &ts.derive("setup"))?;
    let b0 = random_bit(&ts.derive("b0"));
    let b1 = if two { random_bit(&ts.derive("b1")) } else { 0 };
    let bits: Vec<u8> = if two { vec![b0, b1] } else { vec![b0] };
    let (cts, held) = challenge_material(&inst, options.hybrid_level, i_star, &bits, &ts.derive("challenge"))?;
    let view = AdversaryView {
        scheme: params.scheme,
        n: params.n,
        m: params.m,
        i_star,
        keys: &held,
    };
    let mut rng = ts.derive("adversary").rng();
    let challenge = if two {
        Challenge::Pair(&cts[0], &cts[1])
    } else {
        Challenge::Single(&cts[0])
    };
    let target = if two { b0 ^ b1 } else { b0 };
    let guess = adversary
        .build(&view)
        .and_then(|d| d.guess(challenge, &mut rng));
    Ok(match guess {
        Ok(g) => Trial {
            success: g == target,
            adversary_error: false,
            bits: (b0, b1),
        },
        Err(_) => Trial {
            success: false,
            adversary_error: true,
            bits: (b0, b1),
        },
    })
}

fn summarize(
    game: &str,
    params: &SchemeParams,
    i_star: u64,
    adversary: &dyn Adversary,
    options: GameOptions,
    outcomes: &[Trial],
    with_bits: bool,
) -> GameResult {
    let trials = outcomes.len() as u64;
    let successes = outcomes.iter().filter(|t| t.success).count() as u64;
    let errors = outcomes.iter().filter(|t| t.adversary_error).count() as u64;
    let mut r = GameResult::from_counts(game, adversary.name(), params.n, trials, successes, errors);
    r.scheme = Some(params.scheme);
    r.i_star = Some(i_star);
    r.hybrid_level = options.hybrid_level;
    if with_bits {
        let mut counts = [[0u64; 2]; 2];
        for t in outcomes {
            counts[t.bits.0 as usize][t.bits.1 as usize] += 1;
        }
        let agree = counts[0][0] + counts[1][1];
        let bias = if trials == 0 {
            BigRational::from_integer(0.into())
        } else {
            BigRational::new(BigInt::from(agree), BigInt::from(trials))
                - BigRational::new(1.into(), 2.into())
        };
        let est = crate::json::to_f64(&bias);
        let hw = hoeffding_half_width(trials, CONFIDENCE);
        r.bit_stats = Some(BitStats {
            counts,
            agreement_bias: bias,
            ci_low: est - hw,
            ci_high: est + hw,
        });
    }
    r
}

/// IndexHiding\[i*\]: one challenge to `i* - b`; success iff the guess is `b`.
pub fn run_index_hiding(
    params: &SchemeParams,
    i_star: u64,
    adversary: &dyn Adversary,
    trials: u64,
    seed: &RunSeed,
    options: GameOptions,
) -> Result<GameResult> {
    check_i_star(params, i_star)?;
    let outcomes = run_trials(trials, seed, |ts| play(params, i_star, adversary, options, false, ts))?;
    Ok(summarize("index-hiding", params, i_star, adversary, options, &outcomes, false))
}

/// TwoIndexHiding\[i*\]: challenges to `i* - b0` and `i* - b1`; success iff the
/// guess is `b0 ⊕ b1`.
pub fn run_two_index_hiding(
    params: &SchemeParams,
    i_star: u64,
    adversary: &dyn Adversary,
    trials: u64,
    seed: &RunSeed,
    options: GameOptions,
) -> Result<GameResult> {
    check_i_star(params, i_star)?;
    let outcomes = run_trials(trials, seed, |ts| play(params, i_star, adversary, options, true, ts))?;
    Ok(summarize("two-index-hiding", params, i_star, adversary, options, &outcomes, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{BlackBoxDecrypt, Constant, Synthetic, WhiteBoxTransparent};

    fn sc(n: u64) -> SchemeParams {
        SchemeParams::new(SchemeKind::ShortCtext, 64, n, Some(8 * n)).unwrap()
    }

    fn sk(n: u64) -> SchemeParams {
        SchemeParams::new(SchemeKind::ShortKey, 64, n, Some(16)).unwrap()
    }

    #[test]
    fn white_box_always_wins() {
        let seed = RunSeed::from_master(1);
        for p in [sc(4), sk(4)] {
            let r = run_index_hiding(&p, 2, &WhiteBoxTransparent, 200, &seed, GameOptions::default()).unwrap();
            assert_eq!(r.successes, 200, "{:?}", p.scheme);
            let r = run_two_index_hiding(&p, 3, &WhiteBoxTransparent, 200, &seed, GameOptions::default()).unwrap();
            assert_eq!(r.successes, 200, "{:?}", p.scheme);
        }
    }

    #[test]
    fn constant_has_no_advantage() {
        let seed = RunSeed::from_master(2);
        let r = run_index_hiding(&sc(3), 2, &Constant(1), 2000, &seed, GameOptions::default()).unwrap();
        assert!(r.ci_contains_zero());
        assert!(r.ci_low <= crate::json::to_f64(&r.advantage_estimate));
    }

    #[test]
    fn black_box_has_no_advantage() {
        let seed = RunSeed::from_master(3);
        let r = run_index_hiding(&sc(4), 3, &BlackBoxDecrypt, 2000, &seed, GameOptions::default()).unwrap();
        assert!(r.ci_contains_zero(), "{r:?}");
        let r = run_two_index_hiding(&sk(4), 2, &BlackBoxDecrypt, 2000, &seed, GameOptions::default()).unwrap();
        assert!(r.ci_contains_zero(), "{r:?}");
    }

    #[test]
    fn synthetic_one_zero_wins_two_index() {
        let seed = RunSeed::from_master(4);
        let adv = Synthetic::new(1.0, 0.0).unwrap();
        let r = run_two_index_hiding(&sc(3), 2, &adv, 300, &seed, GameOptions::default()).unwrap();
        assert_eq!(r.successes, 300);
    }

    #[test]
    fn same_seed_same_result() {
        let seed = RunSeed::from_master(5);
        let a = run_index_hiding(&sk(3), 1, &BlackBoxDecrypt, 100, &seed, GameOptions::default()).unwrap();
        let b = run_index_hiding(&sk(3), 1, &BlackBoxDecrypt, 100, &seed, GameOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn final_hybrids_blind_the_white_box() {
        let seed = RunSeed::from_master(6);
        let opts = GameOptions { hybrid_level: Some(4) };
        let r = run_two_index_hiding(&sc(4), 2, &WhiteBoxTransparent, 2000, &seed, opts).unwrap();
        assert!(r.ci_contains_zero(), "{r:?}");
        let opts = GameOptions { hybrid_level: Some(6) };
        let r = run_two_index_hiding(&sk(4), 2, &WhiteBoxTransparent, 2000, &seed, opts).unwrap();
        assert!(r.ci_contains_zero(), "{r:?}");
    }

    #[test]
    fn bad_i_star() {
        let seed = RunSeed::from_master(0);
        assert!(run_index_hiding(&sc(3), 0, &Constant(0), 1, &seed, GameOptions::default()).is_err());
        assert!(run_index_hiding(&sc(3), 4, &Constant(0), 1, &seed, GameOptions::default()).is_err());
    }
}
