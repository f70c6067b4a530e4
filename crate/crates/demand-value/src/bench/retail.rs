//! Retail-market questions: how many sources does a target accuracy take, and
//! how does a marketplace select them batch by batch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::fisher_yates_shuffle;
use crate::bench::synthetic::derive_seed;
use crate::coalition::Coalition;
use crate::game::ValuationGame;

/// One point of the accuracy-probability curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: usize,
    /// Fraction of sampled k-subsets whose value reaches the target.
    pub probability: f64,
}

/// Estimates, for each `k`, the probability that a uniformly drawn coalition
/// of `k` sources reaches `target_fraction` of the full-coalition value.
///
/// Subset draws for each `k` use the seed derived from `(seed, k)`, so the
/// per-k work can run in parallel without changing results.
pub fn accuracy_probability_curve(
    game: &ValuationGame,
    k_values: &[usize],
    samples_per_k: usize,
    target_fraction: f64,
    seed: u64,
) -> Vec<CurvePoint> {
    let n = game.n_players();
    assert!(samples_per_k >= 1, "need at least one sample per k");
    assert!(
        target_fraction > 0.0 && target_fraction <= 1.0,
        "target fraction must be in (0, 1]"
    );
    for &k in k_values {
        assert!(k >= 1 && k <= n, "subset size {k} out of range for {n} players");
    }
    let target = target_fraction * game.value(&Coalition::full(n));
    k_values
        .par_iter()
        .map(|&k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
            let mut players: Vec<usize> = (0..n).collect();
            let mut hits = 0usize;
            for _ in 0..samples_per_k {
                fisher_yates_shuffle(&mut players, &mut rng);
                let coalition =
                    Coalition::new(players[..k].iter().copied(), n).expect("indices in range");
                if game.value(&coalition) >= target {
                    hits += 1;
                }
            }
            CurvePoint {
                k,
                probability: hits as f64 / samples_per_k as f64,
            }
        })
        .collect()
}

/// Result of a marketplace selection run.
#[derive(Debug, Clone, Serialize)]
pub struct PimsOutcome {
    /// Sources whose data was pulled in, in panel-index form.
    pub selected: Vec<usize>,
    /// Value of the selected coalition.
    pub value: f64,
    pub batches_used: usize,
    /// Whether the accuracy target was reached; failure is an outcome, not an
    /// error.
    pub achieved: bool,
}

/// Selects sources batch by batch until the value of the selection reaches
/// `accuracy_target` or `max_batches` batches have been consumed.
///
/// Batches are disjoint: the player pool is shuffled once up front and
/// consumed in `batch_size` chunks, so coverage grows monotonically.
pub fn pims_select(
    game: &ValuationGame,
    accuracy_target: f64,
    batch_size: usize,
    max_batches: usize,
    seed: u64,
) -> PimsOutcome {
    assert!(batch_size >= 1, "batch size must be at least 1");
    assert!(max_batches >= 1, "need at least one batch");
    assert!(accuracy_target.is_finite(), "target must be finite");
    let n = game.n_players();
    let mut pool: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fisher_yates_shuffle(&mut pool, &mut rng);

    let mut selected = Vec::new();
    let mut batches_used = 0usize;
    let mut value = 0.0;
    let mut achieved = false;
    let mut remaining = pool.as_slice();
    while batches_used < max_batches && !remaining.is_empty() {
        let take = batch_size.min(remaining.len());
        selected.extend_from_slice(&remaining[..take]);
        remaining = &remaining[take..];
        batches_used += 1;
        let coalition = Coalition::new(selected.iter().copied(), n).expect("indices in range");
        value = game.value(&coalition);
        if value >= accuracy_target {
            achieved = true;
            break;
        }
    }
    selected.sort_unstable();
    PimsOutcome {
        selected,
        value,
        batches_used,
        achieved,
    }
}
