//! The Puncture and InputMatching games for the PRF family.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::index_hiding::{run_trials, GameResult, Trial};
use crate::error::{Error, Result};
use crate::primitives::{
    sample_from_preimages, sample_surjective_prf, PrfKey, PrfRole, PrfShape, PuncturedPrfKey,
    RunSeed, DEFAULT_REJECTION_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrfGameParams {
    pub lambda_bits: u32,
    pub domain: u64,
    pub range: u64,
}

impl PrfGameParams {
    fn shape(&self) -> Result<PrfShape> {
        PrfShape::index(self.lambda_bits, self.domain, self.range, PrfRole::Generic)
    }
}

/// Adversaries for the PRF games.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrfAdversary {
    Constant(u8),
    /// Puncture game: evaluates the punctured key at a neighbour of `x*` and
    /// guesses "real" iff it equals `y`. Input matching: guesses `b0 = b1` iff
    /// the neighbour's value is `y0`.
    ReEvaluate,
    /// Input matching: guesses `b0 ⊕ b1 = 1` iff `x0 ≠ x1`.
    Equality,
}

impl PrfAdversary {
    pub fn name(&self) -> String {
        match self {
            PrfAdversary::Constant(b) => format!("constant-{b}"),
            PrfAdversary::ReEvaluate => "re-evaluate".into(),
            PrfAdversary::Equality => "equality".into(),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "constant" | "constant-0" => PrfAdversary::Constant(0),
            "constant-1" => PrfAdversary::Constant(1),
            "re-evaluate" => PrfAdversary::ReEvaluate,
            "equality" => PrfAdversary::Equality,
            _ => return Err(Error::Configuration(format!("unknown PRF-game adversary {name:?}"))),
        })
    }

    fn puncture_guess(&self, y: u64, key: &PuncturedPrfKey, x_star: u64, _rng: &mut ChaCha20Rng) -> Result<u8> {
        match self {
            PrfAdversary::Constant(b) => Ok(*b),
            PrfAdversary::ReEvaluate | PrfAdversary::Equality => {
                let d = key.domain();
                if d == 1 {
                    return Ok(0);
                }
                let probe = (x_star + 1) % d;
                Ok(u8::from(key.eval(probe)? != Some(y)))
            }
        }
    }

    fn matching_guess(&self, x0: u64, x1: u64, y0: u64, key: &PuncturedPrfKey) -> Result<u8> {
        match self {
            PrfAdversary::Constant(b) => Ok(*b),
            PrfAdversary::Equality => Ok(u8::from(x0 != x1)),
            PrfAdversary::ReEvaluate => {
                let d = key.domain();
                let probe = (0..d).find(|x| *x != x0 && *x != x1);
                match probe {
                    Some(p) => Ok(u8::from(key.eval(p)? != Some(y0))),
                    None => Ok(0),
                }
            }
        }
    }
}

/// Puncture game: `y_0 = PRF(x*)`, `y_1` uniform; the adversary sees
/// `(y_b, PRF^{x*})` and guesses `b`.
pub fn run_puncture_game(
    params: PrfGameParams,
    x_star: u64,
    adversary: PrfAdversary,
    trials: u64,
    seed: &RunSeed,
) -> Result<GameResult> {
    let shape = params.shape()?;
    if x_star >= params.domain {
        return Err(Error::param(format!("x* = {x_star} out of [0, {})", params.domain)));
    }
    let outcomes = run_trials(trials, seed, |ts| {
        let key = PrfKey::random(shape, &ts.derive("key"));
        let b: u8 = ts.derive("b").rng().random_range(0..2);
        let y = if b == 0 {
            key.eval(x_star)?
        } else {
            ts.derive("y1").rng().random_range(0..params.range)
        };
        let punctured = key.puncture(&[x_star])?;
        let mut rng = ts.derive("adversary").rng();
        let guess = adversary.puncture_guess(y, &punctured, x_star, &mut rng);
        Ok(score(guess, b))
    })?;
    Ok(tally("puncture", adversary.name(), params.range, &outcomes))
}

/// InputMatching\[y0, y1\]: surjective `PRF`, `x_k` uniform in `PRF⁻¹(y_{b_k})`;
/// the adversary sees `(x0, x1, PRF^{x0,x1})` and guesses `b0 ⊕ b1`.
pub fn run_input_matching(
    params: PrfGameParams,
    y0: u64,
    y1: u64,
    adversary: PrfAdversary,
    trials: u64,
    seed: &RunSeed,
) -> Result<GameResult> {
    let shape = params.shape()?;
    if y0 == y1 || y0 >= params.range || y1 >= params.range {
        return Err(Error::param(format!("targets ({y0}, {y1}) must be distinct points of [{}]", params.range)));
    }
    let outcomes = run_trials(trials, seed, |ts| {
        let (key, table) = sample_surjective_prf(&ts.derive("key"), shape, DEFAULT_REJECTION_BUDGET)?.value;
        let b0: u8 = ts.derive("b0").rng().random_range(0..2);
        let b1: u8 = ts.derive("b1").rng().random_range(0..2);
        let target = |b: u8| if b == 0 { y0 } else { y1 };
        let x0 = sample_from_preimages(&table[target(b0) as usize], &ts.derive("x0"))?;
        let x1 = sample_from_preimages(&table[target(b1) as usize], &ts.derive("x1"))?;
        let points = if x0 == x1 { vec![x0] } else { vec![x0, x1] };
        let punctured = key.puncture(&points)?;
        let guess = adversary.matching_guess(x0, x1, y0, &punctured);
        Ok(score(guess, b0 ^ b1))
    })?;
    Ok(tally("input-matching", adversary.name(), params.range, &outcomes))
}

fn score(guess: Result<u8>, target: u8) -> Trial {
    match guess {
        Ok(g) => Trial {
            success: g == target,
            adversary_error: false,
            bits: (target, 0),
        },
        Err(_) => Trial {
            success: false,
            adversary_error: true,
            bits: (target, 0),
        },
    }
}

fn tally(game: &str, adversary: String, n: u64, outcomes: &[Trial]) -> GameResult {
    let trials = outcomes.len() as u64;
    let successes = outcomes.iter().filter(|t| t.success).count() as u64;
    let errors = outcomes.iter().filter(|t| t.adversary_error).count() as u64;
    GameResult::from_counts(game, adversary, n, trials, successes, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(domain: u64, range: u64) -> PrfGameParams {
        PrfGameParams {
            lambda_bits: 64,
            domain,
            range,
        }
    }

    #[test]
    fn puncture_constant_and_re_evaluate_see_nothing() {
        let seed = RunSeed::from_master(1);
        for a in [PrfAdversary::Constant(0), PrfAdversary::ReEvaluate] {
            let r = run_puncture_game(p(64, 4), 17, a, 4000, &seed).unwrap();
            assert!(r.ci_contains_zero(), "{a:?}: {r:?}");
        }
    }

    #[test]
    fn range_one_view_is_independent_of_b() {
        // y is forced to 0 in both worlds, so the adversary's input does not
        // depend on b; its guess for a given key is fixed.
        let key = PrfKey::random(p(16, 1).shape().unwrap(), &RunSeed::from_master(2));
        let punctured = key.puncture(&[3]).unwrap();
        let mut rng = RunSeed::from_master(0).rng();
        let y_real = key.eval(3).unwrap();
        assert_eq!(y_real, 0);
        let g = PrfAdversary::ReEvaluate.puncture_guess(y_real, &punctured, 3, &mut rng).unwrap();
        assert_eq!(g, PrfAdversary::ReEvaluate.puncture_guess(0, &punctured, 3, &mut rng).unwrap());
    }

    #[test]
    fn input_matching_constant() {
        let seed = RunSeed::from_master(3);
        let r = run_input_matching(p(32, 2), 0, 1, PrfAdversary::Constant(1), 4000, &seed).unwrap();
        assert!(r.ci_contains_zero(), "{r:?}");
    }

    #[test]
    fn input_matching_equality_has_small_edge() {
        // Pr[x0 = x1 | b0 = b1] ≈ 2/m, so the edge is about 1/m.
        let seed = RunSeed::from_master(4);
        let r = run_input_matching(p(8, 2), 0, 1, PrfAdversary::Equality, 20_000, &seed).unwrap();
        assert!(r.ci_high > 0.0 && r.ci_low < 0.25, "{r:?}");
    }

    #[test]
    fn input_matching_rejects_equal_targets() {
        let seed = RunSeed::from_master(0);
        assert!(run_input_matching(p(8, 2), 1, 1, PrfAdversary::Equality, 1, &seed).is_err());
    }
}
