//! Seed-deterministic synthetic games and panels.
//!
//! The benchmark harness never needs the multi-gigabyte ride datasets: these
//! families reproduce the behaviours that matter (position-dependent
//! marginals, complementarity, data that hurts) at desk scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::Coalition;
use crate::game::CharacteristicFunction;
use crate::grid::TimeGrid;
use crate::panel::DemandPanel;
use crate::series::SourceId;

/// Stable per-index sub-seed derivation (splitmix64 finalizer), so that
/// repetitions and per-k draws own independent seeds no matter how work is
/// scheduled.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix64(master ^ splitmix64(index))
}

/// v(K) = sum of member weights. Every sampler recovers the weights exactly.
#[derive(Debug, Clone)]
pub struct AdditiveGame {
    weights: Vec<f64>,
}

impl AdditiveGame {
    pub fn new(weights: Vec<f64>) -> Self {
        assert!(!weights.is_empty());
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CharacteristicFunction for AdditiveGame {
    fn n_players(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        coalition.members().iter().map(|&i| self.weights[i]).sum()
    }
}

/// v(K) = 1 exactly when K contains every required player.
#[derive(Debug, Clone)]
pub struct UnanimityGame {
    n_players: usize,
    required: Vec<usize>,
}

impl UnanimityGame {
    pub fn new(n_players: usize, required: impl IntoIterator<Item = usize>) -> Self {
        let mut required: Vec<usize> = required.into_iter().collect();
        required.sort_unstable();
        required.dedup();
        assert!(!required.is_empty() && *required.last().unwrap() < n_players);
        Self { n_players, required }
    }
}

impl CharacteristicFunction for UnanimityGame {
    fn n_players(&self) -> usize {
        self.n_players
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if self.required.iter().all(|&r| coalition.contains(r)) {
            1.0
        } else {
            0.0
        }
    }
}

/// Two players, each worthless alone, worth 1 together. The smallest game on
/// which Shapley ([0.5, 0.5]) and leave-one-out ([1, 1]) visibly disagree.
#[derive(Debug, Clone, Copy)]
pub struct ComplementaryPairGame;

impl CharacteristicFunction for ComplementaryPairGame {
    fn n_players(&self) -> usize {
        2
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if coalition.len() == 2 {
            1.0
        } else {
            0.0
        }
    }
}

/// Diminishing-returns game: `v(K) = v_max * (1 - (1-beta)^|K ∩ H|)` for a
/// heavy subset `H` (the first `heavy_count` players), plus a small seeded
/// per-member noise term. The value saturates quickly in the number of heavy
/// members, so a player's marginal contribution depends strongly on its
/// position in a permutation, the regime where structured sampling earns its
/// keep and truncation pays.
#[derive(Debug, Clone)]
pub struct SaturatingGame {
    n_players: usize,
    heavy_count: usize,
    beta: f64,
    v_max: f64,
    noise: Vec<f64>,
}

impl SaturatingGame {
    pub fn new(n_players: usize, heavy_count: usize, beta: f64, v_max: f64, noise_scale: f64, seed: u64) -> Self {
        assert!(n_players >= 1 && heavy_count <= n_players);
        assert!(beta > 0.0 && beta < 1.0);
        assert!(v_max > 0.0 && noise_scale >= 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = (0..n_players)
            .map(|_| if noise_scale == 0.0 { 0.0 } else { rng.gen_range(0.0..noise_scale) })
            .collect();
        Self {
            n_players,
            heavy_count,
            beta,
            v_max,
            noise,
        }
    }
}

impl CharacteristicFunction for SaturatingGame {
    fn n_players(&self) -> usize {
        self.n_players
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        let heavy = coalition.members().iter().filter(|&&m| m < self.heavy_count).count();
        let noise: f64 = coalition.members().iter().map(|&m| self.noise[m]).sum();
        self.v_max * (1.0 - (1.0 - self.beta).powi(heavy as i32)) + noise
    }
}

/// Seed-deterministic arbitrary game: every coalition gets an independent
/// uniform value in [0, 1), except the empty coalition which is worth 0.
/// Limited to 20 players (values are derived from the coalition bitmask).
#[derive(Debug, Clone, Copy)]
pub struct RandomGame {
    n_players: usize,
    seed: u64,
}

impl RandomGame {
    pub fn new(n_players: usize, seed: u64) -> Self {
        assert!(n_players <= 20);
        Self { n_players, seed }
    }
}

impl CharacteristicFunction for RandomGame {
    fn n_players(&self) -> usize {
        self.n_players
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if coalition.is_empty() {
            return 0.0;
        }
        let mask = coalition.key().as_u64().expect("random games fit in 64 bits");
        // 53 high bits of the derived seed, mapped to [0, 1).
        (derive_seed(self.seed, mask) >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Monotone concave game: `v(K) = (sum of member weights / total weight)^gamma`
/// with seeded positive weights and `gamma` in (0, 1]. v of the full coalition
/// is 1, marginals shrink with coalition size, and adding a player never hurts.
#[derive(Debug, Clone)]
pub struct RandomMonotoneGame {
    weights: Vec<f64>,
    total: f64,
    gamma: f64,
}

impl RandomMonotoneGame {
    pub fn new(n_players: usize, seed: u64) -> Self {
        assert!(n_players >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..n_players).map(|_| rng.gen_range(0.1..1.0)).collect();
        let gamma = rng.gen_range(0.3..1.0);
        let total = weights.iter().sum();
        Self { weights, total, gamma }
    }
}

impl CharacteristicFunction for RandomMonotoneGame {
    fn n_players(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if coalition.is_empty() {
            return 0.0;
        }
        let sum: f64 = coalition.members().iter().map(|&i| self.weights[i]).sum();
        (sum / self.total).powf(self.gamma)
    }
}

// --- synthetic demand panels ---

/// Hours in one week at the default bin width.
pub const HOURS_PER_WEEK: usize = 168;

/// Builds an hourly panel from per-source hour-of-week profiles. Each source's
/// counts repeat its 168-value profile over `obs_weeks + control_weeks` weeks,
/// with optional multiplicative noise `max(0, 1 + sigma * z)` per bin.
pub fn weekly_profile_panel(
    profiles: &[(SourceId, Vec<f64>)],
    obs_weeks: usize,
    control_weeks: usize,
    noise_sigma: f64,
    seed: u64,
) -> DemandPanel {
    use chrono::TimeZone;
    assert!(obs_weeks >= 2, "the default forecaster needs two observed weeks");
    assert!(control_weeks >= 1);
    let start = chrono::Utc.with_ymd_and_hms(2019, 3, 4, 0, 0, 0).unwrap();
    let n_bins = (obs_weeks + control_weeks) * HOURS_PER_WEEK;
    let grid = TimeGrid::hourly(start, n_bins)
        .unwrap()
        .split_at(start + chrono::Duration::weeks(obs_weeks as i64))
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let series = profiles
        .iter()
        .map(|(source, profile)| {
            assert_eq!(profile.len(), HOURS_PER_WEEK, "profiles are hour-of-week");
            let counts = (0..n_bins)
                .map(|t| {
                    let base = profile[t % HOURS_PER_WEEK];
                    if noise_sigma > 0.0 {
                        // Uniform multiplicative noise with standard deviation sigma.
                        let z = rng.gen_range(-1.0..1.0) * 3f64.sqrt();
                        (base * (1.0 + noise_sigma * z)).max(0.0)
                    } else {
                        base
                    }
                })
                .collect();
            (source.clone(), counts)
        })
        .collect();
    DemandPanel::new(grid, None, series).unwrap()
}

/// Two sources serving disjoint halves of the week: worthless alone for
/// predicting the combined demand's shape, strong together.
pub fn complementary_pair_panel(obs_weeks: usize, control_weeks: usize) -> DemandPanel {
    let mut first = vec![0.0; HOURS_PER_WEEK];
    let mut second = vec![0.0; HOURS_PER_WEEK];
    for h in 0..HOURS_PER_WEEK {
        // Alternate half-days so both windows keep a strong within-day shape.
        let wave = 6.0 + 4.0 * ((h % 24) as f64 / 4.0).sin().abs();
        if (h / 12) % 2 == 0 {
            first[h] = wave;
        } else {
            second[h] = wave;
        }
    }
    weekly_profile_panel(
        &[
            (SourceId::new("half-a"), first),
            (SourceId::new("half-b"), second),
        ],
        obs_weeks,
        control_weeks,
        0.0,
        0,
    )
}

/// A panel of scaled copies of one profile: every coalition predicts equally
/// well, so cooperation buys nothing and all value methods agree.
pub fn scaled_copies_panel(scales: &[f64], obs_weeks: usize, control_weeks: usize) -> DemandPanel {
    let base: Vec<f64> = (0..HOURS_PER_WEEK)
        .map(|h| 8.0 + ((h % 24) as f64 - 12.0).abs() + if h / 24 >= 5 { 5.0 } else { 0.0 })
        .collect();
    let profiles: Vec<(SourceId, Vec<f64>)> = scales
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            assert!(s > 0.0);
            (
                SourceId::new(format!("copy-{i}")),
                base.iter().map(|v| v * s).collect(),
            )
        })
        .collect();
    weekly_profile_panel(&profiles, obs_weeks, control_weeks, 0.0, 0)
}

/// Six sources: five large day-time sources with proportional shapes and one
/// small source that alone covers the night hours at a low rate. The night
/// source holds under 2% of the rides yet is the only route to the night bins,
/// the standard case where volume pricing misjudges worth.
pub fn night_coverage_panel(obs_weeks: usize, control_weeks: usize) -> DemandPanel {
    let mut day = vec![0.0; HOURS_PER_WEEK];
    let mut night = vec![0.0; HOURS_PER_WEEK];
    for h in 0..HOURS_PER_WEEK {
        let hod = h % 24;
        if (8..20).contains(&hod) {
            day[h] = 15.0 + 0.5 * (hod as f64 - 8.0);
        } else {
            night[h] = 2.0;
        }
    }
    let mut profiles: Vec<(SourceId, Vec<f64>)> = (0..5)
        .map(|i| {
            let scale = 1.0 + 0.1 * i as f64;
            (
                SourceId::new(format!("day-{i}")),
                day.iter().map(|v| v * scale).collect(),
            )
        })
        .collect();
    profiles.push((SourceId::new("night"), night));
    weekly_profile_panel(&profiles, obs_weeks, control_weeks, 0.0, 0)
}
