//! Security games as Monte-Carlo experiments, plus the exact arithmetic that
//! relates one- and two-challenge advantages.

use serde::Serialize;

mod adversary;
mod exact;
mod index_hiding;
mod prf_games;
mod verdict;

pub use adversary::{
    adversary_by_name, Adversary, AdversaryView, BlackBoxDecrypt, Challenge, Constant, Decoder,
    Synthetic, WhiteBoxTransparent,
};
pub use exact::{
    exact_input_matching, input_matching_sweep, xor_identity_exact, xor_identity_f64,
    InputMatchingExact, InputMatchingSweep, XorIdentity,
};
pub use index_hiding::{
    run_index_hiding, run_two_index_hiding, BitStats, GameOptions, GameResult,
};
pub use prf_games::{run_input_matching, run_puncture_game, PrfAdversary, PrfGameParams};
pub use verdict::{
    collect_evidence, decoder_advantages, lemma_constants, weak_index_hiding_verdict,
    DecoderAdvantage, IndexEvidence, IndexVerdict, LemmaConstants, MarkovCheck, Verdict,
    VerdictReport,
};

/// Default trial budget per game.
pub const DEFAULT_TRIALS: u64 = 10_000;

/// Confidence level of every interval the harness reports.
pub const CONFIDENCE: f64 = 0.99;

/// Two-sided Hoeffding half-width for the mean of `trials` values in `[0, 1]`:
/// `sqrt(ln(2/α) / (2N))` with `α = 1 - confidence`.
pub fn hoeffding_half_width(trials: u64, confidence: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    let alpha = 1.0 - confidence;
    ((2.0 / alpha).ln() / (2.0 * trials as f64)).sqrt()
}

/// The constants of weak index hiding for `n` users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub n: u64,
    /// Allowed probability of a good decoder, `1/(2en)`.
    #[serde(serialize_with = "crate::json::decimal")]
    pub one_over_2en: f64,
    /// A decoder is good when its advantage exceeds `1/(4en)`.
    #[serde(serialize_with = "crate::json::decimal")]
    pub one_over_4en: f64,
    /// Two-challenge target, `1/(200 n³)`.
    #[serde(serialize_with = "crate::json::decimal")]
    pub one_over_200n3: f64,
}

impl Thresholds {
    pub fn new(n: u64) -> Self {
        let nf = n as f64;
        let e = std::f64::consts::E;
        Thresholds {
            n,
            one_over_2en: 1.0 / (2.0 * e * nf),
            one_over_4en: 1.0 / (4.0 * e * nf),
            one_over_200n3: 1.0 / (200.0 * nf * nf * nf),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_for_one_user() {
        let t = Thresholds::new(1);
        assert!((t.one_over_2en - 0.18393972058572117).abs() < 1e-15);
        assert!((t.one_over_4en - 0.09196986029286058).abs() < 1e-15);
        assert_eq!(t.one_over_200n3, 0.005);
    }

    #[test]
    fn hoeffding_width() {
        // ln(200)/20000 under the root
        let w = hoeffding_half_width(10_000, 0.99);
        assert!((w - 0.016276).abs() < 1e-5, "{w}");
        assert!(hoeffding_half_width(0, 0.99).is_infinite());
    }
}
