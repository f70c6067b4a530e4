//! Shapley approximation by permutation sampling.
//!
//! Three samplers share one walk: Monte Carlo streams permutations until the
//! estimates stop moving, random sampling draws a fixed budget of uniform
//! permutations, and structured sampling plans the budget through a Latin
//! square so that every player occupies every position the same number of
//! times. Each can be truncated: once a permutation's prefix value comes
//! within a set fraction of the full-coalition value, the remaining players
//! in that permutation are credited zero marginal contribution without
//! spending any evaluations on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::game::ValuationGame;

/// How a plan's permutations were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanKind {
    /// Streamed one at a time by the Monte Carlo loop.
    McStream,
    /// Independent uniform draws.
    Rs,
    /// Latin-square structured rounds.
    Ss,
}

/// An ordered list of player permutations to walk, with its provenance and
/// the seed that produced it.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub permutations: Vec<Vec<usize>>,
    pub provenance: PlanKind,
    pub rounds: u32,
    pub seed: u64,
}

impl SamplePlan {
    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }
}

/// In-place Durstenfeld variant of the Fisher-Yates shuffle: one swap per
/// index from the back, uniform given a uniform generator.
pub fn fisher_yates_shuffle<T>(items: &mut [T], rng: &mut impl Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// The cyclic Latin square of order `n`: `square[i][j] = (i + j) mod n`.
/// Every row and every column is a permutation of `0..n`.
pub fn build_latin_square(n: usize) -> Vec<Vec<usize>> {
    assert!(n >= 1, "latin square order must be at least 1");
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

/// Plans `rounds * n` independent uniform permutations.
pub fn rs_plan(n: usize, rounds: u32, seed: u64) -> SamplePlan {
    assert!(n >= 1 && rounds >= 1, "rs_plan needs n >= 1 and rounds >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let permutations = (0..rounds as usize * n)
        .map(|_| {
            let mut perm: Vec<usize> = (0..n).collect();
            fisher_yates_shuffle(&mut perm, &mut rng);
            perm
        })
        .collect();
    SamplePlan {
        permutations,
        provenance: PlanKind::Rs,
        rounds,
        seed,
    }
}

/// Plans `rounds * n` permutations through the cyclic Latin square: each round
/// shuffles the player list `Q` and emits the `n` permutations that place
/// player `Q[square[i][j]]` at position `j`. Every player lands on every
/// position exactly `rounds` times (column balance), which is the whole point.
pub fn ss_plan(n: usize, rounds: u32, seed: u64) -> SamplePlan {
    assert!(n >= 1 && rounds >= 1, "ss_plan needs n >= 1 and rounds >= 1");
    let square = build_latin_square(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ordering: Vec<usize> = (0..n).collect();
    let mut permutations = Vec::with_capacity(rounds as usize * n);
    for _ in 0..rounds {
        fisher_yates_shuffle(&mut ordering, &mut rng);
        for row in &square {
            permutations.push(row.iter().map(|&cell| ordering[cell]).collect());
        }
    }
    SamplePlan {
        permutations,
        provenance: PlanKind::Ss,
        rounds,
        seed,
    }
}

/// Truncation policy: once a prefix value exceeds `tau * v(full)`, the rest of
/// the permutation is credited zero marginal contribution without evaluation.
///
/// Enabling truncation costs one up-front evaluation of the full coalition to
/// fix the threshold; that evaluation is counted like any other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub enabled: bool,
    pub tau: f64,
}

impl TruncationPolicy {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            tau: 1.0,
        }
    }

    pub fn at(tau: f64) -> Self {
        assert!(tau > 0.0 && tau <= 1.0, "truncation fraction must be in (0, 1]");
        Self { enabled: true, tau }
    }

    fn threshold(&self, game: &ValuationGame) -> Option<f64> {
        if self.enabled {
            Some(self.tau * game.value(&Coalition::full(game.n_players())))
        } else {
            None
        }
    }
}

/// Outcome of a sampling run: estimates plus the cost actually paid.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    /// Per-player mean marginal contribution over the walked permutations.
    pub phi: Vec<f64>,
    /// Distinct value-function evaluations consumed (cache-aware).
    pub evaluations: u64,
    pub permutations_used: usize,
    /// Positions skipped by truncation instead of evaluated.
    pub truncation_skips: u64,
}

/// Walks one permutation left to right, returning each player's marginal
/// contribution and the number of truncation skips.
fn walk_permutation(
    game: &ValuationGame,
    permutation: &[usize],
    threshold: Option<f64>,
) -> (Vec<f64>, u64) {
    let n = game.n_players();
    let mut marginals = vec![0.0; n];
    let mut prefix = Coalition::empty(n);
    let mut previous = 0.0;
    let mut skips = 0u64;
    for &player in permutation {
        prefix = prefix.with_member(player).expect("plan players are in range");
        let value = match threshold {
            Some(threshold) if previous > threshold => {
                skips += 1;
                previous
            }
            _ => game.value(&prefix),
        };
        marginals[player] = value - previous;
        previous = value;
    }
    (marginals, skips)
}

/// Folds per-permutation marginal vectors into the running mean, in plan order.
fn running_mean(per_permutation: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut phi = vec![0.0; n];
    for (t, marginals) in per_permutation.iter().enumerate() {
        let t = (t + 1) as f64;
        for (acc, m) in phi.iter_mut().zip(marginals) {
            *acc = (t - 1.0) / t * *acc + m / t;
        }
    }
    phi
}

/// Runs a prepared plan against a game.
///
/// Permutations are walked in parallel (each walk is independent given the
/// fixed truncation threshold) and reduced in plan order, so the result is
/// bit-identical across worker counts and runs.
pub fn run_plan(game: &ValuationGame, plan: &SamplePlan, policy: TruncationPolicy) -> ApproxResult {
    let n = game.n_players();
    let before = game.evaluations();
    let threshold = policy.threshold(game);
    let walks: Vec<(Vec<f64>, u64)> = plan
        .permutations
        .par_iter()
        .map(|p| walk_permutation(game, p, threshold))
        .collect();
    let marginals: Vec<Vec<f64>> = walks.iter().map(|(m, _)| m.clone()).collect();
    let truncation_skips = walks.iter().map(|(_, s)| s).sum();
    ApproxResult {
        phi: running_mean(&marginals, n),
        evaluations: game.evaluations() - before,
        permutations_used: plan.len(),
        truncation_skips,
    }
}

/// Guard against division by zero in the convergence test for estimates near 0.
const CONVERGENCE_DELTA: f64 = 1e-6;

/// Monte Carlo estimation: streams uniform permutations, updating the running
/// mean, and stops once the largest relative step of any estimate falls below
/// `convergence_threshold`. The test fires only from `min_permutations` onward
/// because the raw stopping rule alone can halt spuriously after two
/// permutations.
pub fn mc_shapley(
    game: &ValuationGame,
    convergence_threshold: f64,
    policy: TruncationPolicy,
    seed: u64,
    min_permutations: usize,
    max_permutations: usize,
) -> ApproxResult {
    assert!(
        convergence_threshold > 0.0 && convergence_threshold < 1.0,
        "convergence threshold must be in (0, 1)"
    );
    let n = game.n_players();
    let before = game.evaluations();
    let threshold = policy.threshold(game);
    let min_permutations = min_permutations.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut permutation: Vec<usize> = (0..n).collect();
    let mut phi = vec![0.0; n];
    let mut truncation_skips = 0u64;
    let mut used = 0usize;
    while used < max_permutations {
        fisher_yates_shuffle(&mut permutation, &mut rng);
        let (marginals, skips) = walk_permutation(game, &permutation, threshold);
        truncation_skips += skips;
        used += 1;
        let t = used as f64;
        let mut max_relative_step = 0.0f64;
        for (acc, m) in phi.iter_mut().zip(&marginals) {
            let next = (t - 1.0) / t * *acc + m / t;
            let step = (next - *acc).abs() / (next.abs() + CONVERGENCE_DELTA);
            max_relative_step = max_relative_step.max(step);
            *acc = next;
        }
        if used >= min_permutations && max_relative_step < convergence_threshold {
            break;
        }
    }
    ApproxResult {
        phi,
        evaluations: game.evaluations() - before,
        permutations_used: used,
        truncation_skips,
    }
}

/// Default minimum number of Monte Carlo permutations before the convergence
/// test may fire.
pub fn default_min_permutations(n_players: usize) -> usize {
    2 * n_players
}

/// Algorithm selector covering the exact route and all samplers, by the names
/// used in run configs (`exact`, `mc`, `tmc`, `rs`, `trs`, `ss`, `tss`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub algorithm: Algorithm,
    pub rounds: u32,
    pub convergence_threshold: f64,
    pub truncation: TruncationPolicy,
    pub max_permutations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exact,
    Mc,
    Rs,
    Ss,
}

impl EstimatorSpec {
    pub fn exact() -> Self {
        Self {
            algorithm: Algorithm::Exact,
            rounds: 0,
            convergence_threshold: 0.01,
            truncation: TruncationPolicy::disabled(),
            max_permutations: 0,
        }
    }

    /// Parses the run-config algorithm names. The leading `t` selects the
    /// truncated variant with the given fraction.
    pub fn from_name(name: &str, rounds: u32, convergence_threshold: f64, tau: f64) -> Option<Self> {
        let (algorithm, truncated) = match name {
            "exact" => (Algorithm::Exact, false),
            "mc" => (Algorithm::Mc, false),
            "tmc" => (Algorithm::Mc, true),
            "rs" => (Algorithm::Rs, false),
            "trs" => (Algorithm::Rs, true),
            "ss" => (Algorithm::Ss, false),
            "tss" => (Algorithm::Ss, true),
            _ => return None,
        };
        Some(Self {
            algorithm,
            rounds,
            convergence_threshold,
            truncation: if truncated {
                TruncationPolicy::at(tau)
            } else {
                TruncationPolicy::disabled()
            },
            max_permutations: 0,
        })
    }

    pub fn name(&self) -> String {
        let base = match self.algorithm {
            Algorithm::Exact => return "exact".to_owned(),
            Algorithm::Mc => "mc",
            Algorithm::Rs => "rs",
            Algorithm::Ss => "ss",
        };
        if self.truncation.enabled {
            format!("t{base}")
        } else {
            base.to_owned()
        }
    }

    pub fn is_stochastic(&self) -> bool {
        self.algorithm != Algorithm::Exact
    }

    /// Runs the selected sampler against a game. Not valid for `exact` (which
    /// returns a `Result` through [`crate::valuation::exact_shapley`] instead).
    pub fn estimate(&self, game: &ValuationGame, seed: u64) -> ApproxResult {
        let n = game.n_players();
        match self.algorithm {
            Algorithm::Exact => panic!("estimate() is for sampling algorithms; use exact_shapley"),
            Algorithm::Mc => {
                let max = if self.max_permutations == 0 {
                    self.rounds.max(1) as usize * n * 50
                } else {
                    self.max_permutations
                };
                mc_shapley(
                    game,
                    self.convergence_threshold,
                    self.truncation,
                    seed,
                    default_min_permutations(n),
                    max,
                )
            }
            Algorithm::Rs => run_plan(game, &rs_plan(n, self.rounds, seed), self.truncation),
            Algorithm::Ss => run_plan(game, &ss_plan(n, self.rounds, seed), self.truncation),
        }
    }
}
