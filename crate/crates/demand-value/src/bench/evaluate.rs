//! Scoring approximators against exact Shapley values over repeated runs.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::approx::{Algorithm, EstimatorSpec};
use crate::bench::synthetic::derive_seed;
use crate::game::ValuationGame;
use crate::valuation::{exact_shapley_with_limit, ValuationError};

/// Players with an exact value at or below this magnitude are excluded from
/// the percentage-error average, which would otherwise blow up on them.
pub const PERCENTAGE_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("standard deviation over repetitions needs at least 2, got {0}")]
    TooFewRepetitions(usize),
    #[error("zone {zone} has fewer than 2 sources; cooperation is undefined")]
    TooFewSources { zone: String },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// Accuracy and robustness of one approximator configuration over repeated
/// seeded runs against the exact values.
#[derive(Debug, Clone, Serialize)]
pub struct ApproximatorEvaluation {
    pub algorithm: String,
    pub rounds: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_threshold: Option<f64>,
    pub repetitions: usize,
    /// Mean over repetitions of the mean absolute error across players.
    pub aaae: f64,
    /// Mean over repetitions of the mean percentage error across players with
    /// exact values above [`PERCENTAGE_FLOOR`].
    pub aape: f64,
    /// Mean over players of the sample standard deviation of the estimate
    /// across repetitions.
    pub aastd: f64,
    /// Mean value-function evaluations per repetition.
    pub mean_evaluations: f64,
}

/// Runs an estimator `repetitions` times against fresh caches of the game and
/// scores it against `exact_phi`. Repetition `r` uses the seed derived from
/// `(master_seed, r)`, so results are independent of scheduling.
pub fn evaluate_approximator(
    game: &ValuationGame,
    spec: &EstimatorSpec,
    repetitions: usize,
    exact_phi: &[f64],
    master_seed: u64,
) -> Result<ApproximatorEvaluation, BenchError> {
    if repetitions < 2 {
        return Err(BenchError::TooFewRepetitions(repetitions));
    }
    let n = game.n_players();
    assert_eq!(exact_phi.len(), n, "exact values must cover every player");

    let runs: Vec<(Vec<f64>, u64)> = (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let fresh = game.fresh();
            if spec.algorithm == Algorithm::Exact {
                let phi = exact_shapley_with_limit(&fresh, 64).expect("exact fits the limit");
                let evaluations = fresh.evaluations();
                (phi, evaluations)
            } else {
                let result = spec.estimate(&fresh, derive_seed(master_seed, r as u64));
                (result.phi, result.evaluations)
            }
        })
        .collect();

    let mut aaae = 0.0;
    let mut aape = 0.0;
    for (phi, _) in &runs {
        let mut abs_sum = 0.0;
        let mut pct_sum = 0.0;
        let mut pct_count = 0usize;
        for (est, exact) in phi.iter().zip(exact_phi) {
            let err = (est - exact).abs();
            abs_sum += err;
            if exact.abs() > PERCENTAGE_FLOOR {
                pct_sum += err / exact.abs();
                pct_count += 1;
            }
        }
        aaae += abs_sum / n as f64;
        if pct_count > 0 {
            aape += pct_sum / pct_count as f64;
        }
    }
    aaae /= repetitions as f64;
    aape /= repetitions as f64;

    let mut aastd = 0.0;
    for i in 0..n {
        let mean = runs.iter().map(|(phi, _)| phi[i]).sum::<f64>() / repetitions as f64;
        let ss: f64 = runs.iter().map(|(phi, _)| (phi[i] - mean).powi(2)).sum();
        aastd += (ss / (repetitions - 1) as f64).sqrt();
    }
    aastd /= n as f64;

    let mean_evaluations =
        runs.iter().map(|(_, e)| *e as f64).sum::<f64>() / repetitions as f64;

    Ok(ApproximatorEvaluation {
        algorithm: spec.name(),
        rounds: spec.rounds,
        tau: spec.truncation.enabled.then_some(spec.truncation.tau),
        convergence_threshold: (spec.algorithm == Algorithm::Mc).then_some(spec.convergence_threshold),
        repetitions,
        aaae,
        aape,
        aastd,
        mean_evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::synthetic::{AdditiveGame, SaturatingGame};
    use crate::valuation::exact_shapley;

    #[test]
    fn exact_run_as_approximator_scores_zero_everywhere() {
        let game = ValuationGame::new(SaturatingGame::new(6, 3, 0.4, 1.0, 0.02, 1));
        let exact = exact_shapley(&game).unwrap();
        let eval =
            evaluate_approximator(&game, &EstimatorSpec::exact(), 3, &exact, 0).unwrap();
        assert_eq!(eval.aaae, 0.0);
        assert_eq!(eval.aape, 0.0);
        // The mean of bit-identical values can round, leaving dust in the std.
        assert!(eval.aastd < 1e-15, "aastd {}", eval.aastd);
        assert_eq!(eval.mean_evaluations, 64.0);
    }

    #[test]
    fn additive_games_are_error_free_for_any_sampler() {
        let game = ValuationGame::new(AdditiveGame::new(vec![0.1, 0.4, 0.5]));
        let exact = exact_shapley(&game).unwrap();
        for name in ["rs", "ss"] {
            let spec = EstimatorSpec::from_name(name, 3, 0.01, 0.95).unwrap();
            let eval = evaluate_approximator(&game, &spec, 5, &exact, 9).unwrap();
            assert!(eval.aaae < 1e-12, "{name}: aaae {}", eval.aaae);
            assert!(eval.aape < 1e-12, "{name}: aape {}", eval.aape);
        }
    }

    #[test]
    fn one_repetition_cannot_define_a_standard_deviation() {
        let game = ValuationGame::new(AdditiveGame::new(vec![0.5, 0.5]));
        let err = evaluate_approximator(
            &game,
            &EstimatorSpec::from_name("rs", 1, 0.01, 0.95).unwrap(),
            1,
            &[0.5, 0.5],
            0,
        )
        .unwrap_err();
        assert_eq!(err, BenchError::TooFewRepetitions(1));
    }

    #[test]
    fn memoization_is_invisible_to_the_scores() {
        let cached = ValuationGame::new(SaturatingGame::new(7, 4, 0.4, 1.0, 0.02, 6));
        let uncached = ValuationGame::uncached(SaturatingGame::new(7, 4, 0.4, 1.0, 0.02, 6));
        let exact = exact_shapley(&cached).unwrap();
        let spec = EstimatorSpec::from_name("ss", 3, 0.01, 0.95).unwrap();
        let a = evaluate_approximator(&cached, &spec, 8, &exact, 21).unwrap();
        let b = evaluate_approximator(&uncached, &spec, 8, &exact, 21).unwrap();
        assert_eq!(a.aaae, b.aaae);
        assert_eq!(a.aape, b.aape);
        assert_eq!(a.aastd, b.aastd);
        // Only the cost accounting differs: the uncached game pays per call.
        assert!(b.mean_evaluations >= a.mean_evaluations);
    }

    #[test]
    fn evaluation_is_reproducible() {
        let game = ValuationGame::new(SaturatingGame::new(8, 5, 0.35, 1.0, 0.02, 2));
        let exact = exact_shapley(&game).unwrap();
        let spec = EstimatorSpec::from_name("ss", 2, 0.01, 0.95).unwrap();
        let a = evaluate_approximator(&game, &spec, 10, &exact, 123).unwrap();
        let b = evaluate_approximator(&game, &spec, 10, &exact, 123).unwrap();
        assert_eq!(a.aaae, b.aaae);
        assert_eq!(a.aape, b.aape);
        assert_eq!(a.aastd, b.aastd);
        assert_eq!(a.mean_evaluations, b.mean_evaluations);
    }

    #[test]
    fn structured_sampling_beats_random_sampling_on_the_saturating_family() {
        let game = ValuationGame::new(SaturatingGame::new(16, 8, 0.35, 1.0, 0.02, 7));
        let exact = exact_shapley(&game).unwrap();
        let ss = EstimatorSpec::from_name("ss", 16, 0.01, 0.95).unwrap();
        let rs = EstimatorSpec::from_name("rs", 16, 0.01, 0.95).unwrap();
        let ss_eval = evaluate_approximator(&game, &ss, 50, &exact, 11).unwrap();
        let rs_eval = evaluate_approximator(&game, &rs, 50, &exact, 11).unwrap();
        assert!(
            ss_eval.aape < rs_eval.aape,
            "ss {} vs rs {}",
            ss_eval.aape,
            rs_eval.aape
        );
    }
}
