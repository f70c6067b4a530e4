//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with the measured numbers. Everything runs at desk scale on seeded
//! synthetic data; no external datasets are required.

mod common;

use demand_value::approx::{run_plan, ss_plan, EstimatorSpec, TruncationPolicy};
use demand_value::bench::evaluate::evaluate_approximator;
use demand_value::bench::synthetic::{
    derive_seed, night_coverage_panel, ComplementaryPairGame, RandomGame, RandomMonotoneGame,
    SaturatingGame,
};
use demand_value::coalition::Coalition;
use demand_value::forecast::SeasonalProfile;
use demand_value::game::{CharacteristicFunction, ValuationGame};
use demand_value::series::SourceId;
use demand_value::similarity::{
    cosine_similarity, dtw_distance, numerical_similarity, relative_dtw, SimilarityMetric,
};
use demand_value::valuation::{exact_shapley, leave_one_out, volume_shares, ForecastValueGame};

use common::{dtw_brute_force, permutation_shapley_oracle};

use std::time::Instant;

/// A random game with a built-in symmetric pair (players 0 and 1) and a
/// built-in dummy (the last player), so the symmetry and dummy axioms have
/// something non-vacuous to bite on.
struct StructuredAxiomGame {
    inner: RandomGame,
    n: usize,
}

impl StructuredAxiomGame {
    fn new(n: usize, seed: u64) -> Self {
        Self {
            inner: RandomGame::new(n, seed),
            n,
        }
    }
}

impl CharacteristicFunction for StructuredAxiomGame {
    fn n_players(&self) -> usize {
        self.n
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        let mut mask = coalition.key().as_u64().expect("small game");
        mask &= !(1u64 << (self.n - 1)); // last player contributes nothing
        if mask & 0b10 != 0 && mask & 0b01 == 0 {
            mask = (mask & !0b10) | 0b01; // players 0 and 1 are interchangeable
        }
        self.inner.value(&Coalition::from_mask(mask, self.n))
    }
}

#[test]
fn criterion_1_shapley_axioms() {
    let started = Instant::now();
    let mut oracle_checked = 0;
    for g in 0..200u64 {
        let n = 3 + (g as usize % 8); // sizes 3..=10
        let structured = g % 2 == 1;
        let game = if structured {
            ValuationGame::new(StructuredAxiomGame::new(n, derive_seed(0xA1, g)))
        } else {
            ValuationGame::new(RandomGame::new(n, derive_seed(0xA2, g)))
        };
        let phi = exact_shapley(&game).unwrap();
        let v_full = game.value(&Coalition::full(n));

        let sum: f64 = phi.iter().sum();
        assert!(
            (sum - v_full).abs() <= 1e-9,
            "efficiency violated on game {g}: {sum} vs {v_full}"
        );
        if structured {
            assert!(
                (phi[0] - phi[1]).abs() <= 1e-9,
                "symmetry violated on game {g}: {} vs {}",
                phi[0],
                phi[1]
            );
            assert!(
                phi[n - 1].abs() <= 1e-9,
                "dummy violated on game {g}: {}",
                phi[n - 1]
            );
        }
        if !structured && n <= 6 {
            let oracle = permutation_shapley_oracle(&game);
            for (i, (a, b)) in phi.iter().zip(&oracle).enumerate() {
                assert!(
                    (a - b).abs() <= 1e-9,
                    "game {g} player {i}: subset weights {a} vs permutation oracle {b}"
                );
            }
            oracle_checked += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "axioms suite took {elapsed:?}");
    println!(
        "PASS: shapley axioms on 200 games (oracle cross-check on {oracle_checked}) in {elapsed:?}"
    );
}

#[test]
fn criterion_2_estimator_correctness() {
    let mut worst: f64 = 0.0;
    for g in 0..20u64 {
        let game = ValuationGame::new(RandomMonotoneGame::new(8, derive_seed(0xB0, g)));
        let exact = exact_shapley(&game).unwrap();
        let range = game.value(&Coalition::full(8)); // v(empty) is 0, monotone
        for name in ["rs", "ss"] {
            let spec = EstimatorSpec::from_name(name, 200, 0.01, 0.95).unwrap();
            let result = spec.estimate(&game.fresh(), derive_seed(0xB1, g));
            let mean_err: f64 = result
                .phi
                .iter()
                .zip(&exact)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                / 8.0;
            assert!(
                mean_err <= 0.02 * range,
                "{name} on game {g}: mean error {mean_err} vs budget {}",
                0.02 * range
            );
            worst = worst.max(mean_err / range);
        }

        // Truncating at the full value must change nothing, bit for bit.
        let plan = ss_plan(8, 200, derive_seed(0xB2, g));
        let base = run_plan(&game.fresh(), &plan, TruncationPolicy::disabled());
        let truncated = run_plan(&game.fresh(), &plan, TruncationPolicy::at(1.0));
        assert_eq!(base.phi, truncated.phi, "tau=1 changed the estimates on game {g}");
        assert_eq!(base.evaluations, truncated.evaluations);
        assert_eq!(truncated.truncation_skips, 0);
    }
    println!("PASS: rs/ss r=200 within 2% of range on 20 games (worst {worst:.4}); tau=1 is bit-exact");
}

#[test]
fn criterion_3_ss_dominance() {
    let started = Instant::now();
    let mut wins = 0;
    let mut report = String::new();
    for master in 0..10u64 {
        let game = ValuationGame::new(SaturatingGame::new(16, 12, 0.35, 1.0, 0.05, master));
        let exact = exact_shapley(&game).unwrap();
        let ss = EstimatorSpec::from_name("ss", 4, 0.01, 0.95).unwrap();
        let rs = EstimatorSpec::from_name("rs", 4, 0.01, 0.95).unwrap();
        let ss_eval = evaluate_approximator(&game, &ss, 50, &exact, derive_seed(master, 1)).unwrap();
        let rs_eval = evaluate_approximator(&game, &rs, 50, &exact, derive_seed(master, 2)).unwrap();
        let win = ss_eval.aape <= rs_eval.aape && ss_eval.aastd <= rs_eval.aastd;
        wins += win as u32;
        report.push_str(&format!(
            "  seed {master}: aape {:.4} vs {:.4}, aastd {:.4} vs {:.4} -> {}\n",
            ss_eval.aape,
            rs_eval.aape,
            ss_eval.aastd,
            rs_eval.aastd,
            if win { "ss" } else { "rs" }
        ));
    }
    let elapsed = started.elapsed();
    assert!(wins >= 8, "structured sampling won only {wins}/10 seeds:\n{report}");
    assert!(elapsed.as_secs() < 600, "dominance suite took {elapsed:?}");
    println!("PASS: ss dominates rs on {wins}/10 master seeds in {elapsed:?}\n{report}");
}

#[test]
fn criterion_4_accuracy_vs_budget() {
    let game = ValuationGame::new(SaturatingGame::new(16, 12, 0.35, 1.0, 0.05, 0));
    let exact = exact_shapley(&game).unwrap();
    let cheap = EstimatorSpec::from_name("ss", 1, 0.01, 0.95).unwrap();
    let rich = EstimatorSpec::from_name("ss", 16, 0.01, 0.95).unwrap();
    let cheap_eval = evaluate_approximator(&game, &cheap, 50, &exact, 41).unwrap();
    let rich_eval = evaluate_approximator(&game, &rich, 50, &exact, 42).unwrap();
    assert!(
        cheap_eval.aape <= 0.15,
        "ss r=1 average percentage error {} above 0.15",
        cheap_eval.aape
    );
    assert!(
        rich_eval.aape <= 0.06,
        "ss r=16 average percentage error {} above 0.06",
        rich_eval.aape
    );
    println!(
        "PASS: budget trend aape(r=1) = {:.4} <= 0.15, aape(r=16) = {:.4} <= 0.06",
        cheap_eval.aape, rich_eval.aape
    );
}

#[test]
fn criterion_5_truncation_tradeoff() {
    // Early-saturating family: no noise, high saturation rate.
    let game = ValuationGame::new(SaturatingGame::new(16, 12, 0.8, 1.0, 0.0, 0));
    let exact = exact_shapley(&game).unwrap();
    let ss = EstimatorSpec::from_name("ss", 4, 0.01, 0.95).unwrap();
    let tss = EstimatorSpec::from_name("tss", 4, 0.01, 0.95).unwrap();
    let ss_eval = evaluate_approximator(&game, &ss, 50, &exact, 5).unwrap();
    let tss_eval = evaluate_approximator(&game, &tss, 50, &exact, 5).unwrap();
    let speedup = ss_eval.mean_evaluations / tss_eval.mean_evaluations;
    let error_ratio = tss_eval.aape / ss_eval.aape;
    assert!(
        speedup >= 4.0,
        "truncation speedup {speedup:.2}x below 4x ({} vs {})",
        ss_eval.mean_evaluations,
        tss_eval.mean_evaluations
    );
    assert!(
        error_ratio <= 3.0,
        "truncation error ratio {error_ratio:.2}x above 3x ({} vs {})",
        tss_eval.aape,
        ss_eval.aape
    );
    println!("PASS: truncation cuts evaluations {speedup:.2}x for {error_ratio:.2}x the error");
}

#[test]
fn criterion_6_metric_identities() {
    // Cosine similarity.
    assert_eq!(cosine_similarity(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 1.0);
    assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
    assert!((cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

    // Numerical similarity.
    assert_eq!(numerical_similarity(&[4.0, 1.0], &[4.0, 1.0]), 1.0);
    assert_eq!(numerical_similarity(&[1.0, 1.0], &[0.0, 0.0]), 0.0);
    assert_eq!(numerical_similarity(&[2.0, 0.0], &[0.0, 2.0]), 0.0);

    // DTW distance.
    assert_eq!(dtw_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
    assert_eq!(dtw_distance(&[0.0, 0.0], &[1.0, 1.0]), 2.0);
    assert_eq!(dtw_distance(&[1.0, 2.0], &[1.0, 1.0, 2.0]), 0.0);

    // Relative DTW. The swapped-support case is frozen from the brute-force
    // path enumeration: every path between the normalized series costs 4 and
    // the zero-series reference costs 2, so the similarity is -1.
    assert_eq!(relative_dtw(&[1.0, 3.0], &[1.0, 3.0]), 1.0);
    assert_eq!(relative_dtw(&[1.0, 3.0], &[0.0, 0.0]), 0.0);
    let num = dtw_brute_force(&[0.0, 2.0], &[2.0, 0.0]);
    let den = dtw_brute_force(&[0.0, 2.0], &[0.0, 0.0]);
    assert_eq!((num, den), (4.0, 2.0));
    assert_eq!(relative_dtw(&[0.0, 2.0], &[2.0, 0.0]), 1.0 - num / den);

    // DP against exhaustive path enumeration on random short series.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD7);
    for _ in 0..100 {
        let la = rng.gen_range(1..=6);
        let lb = rng.gen_range(1..=6);
        let a: Vec<f64> = (0..la).map(|_| rng.gen_range(0..12) as f64).collect();
        let b: Vec<f64> = (0..lb).map(|_| rng.gen_range(0..12) as f64).collect();
        assert_eq!(dtw_distance(&a, &b), dtw_brute_force(&a, &b), "{a:?} vs {b:?}");
    }
    println!("PASS: metric identities and 100 brute-force DTW cross-checks");
}

#[test]
fn criterion_7_forecaster_sanity() {
    use demand_value::bench::synthetic::{weekly_profile_panel, HOURS_PER_WEEK};
    let base: Vec<f64> = (0..HOURS_PER_WEEK)
        .map(|h| {
            let hod = h % 24;
            let day_window = if (7..22).contains(&hod) { 9.0 } else { 0.0 };
            let weekend = if h / 24 >= 5 { 4.0 } else { 0.0 };
            6.0 + day_window + weekend + (hod as f64 - 12.0).abs() * 0.3
        })
        .collect();
    let mut min_accuracy = f64::INFINITY;
    for seed in 0..20u64 {
        let profiles: Vec<(SourceId, Vec<f64>)> = [0.5, 0.3, 0.2]
            .iter()
            .enumerate()
            .map(|(i, share)| {
                (
                    SourceId::new(format!("s{i}")),
                    base.iter().map(|v| v * share).collect::<Vec<f64>>(),
                )
            })
            .collect();
        // Four observed weeks, a two-week control window, 10% multiplicative noise.
        let panel = weekly_profile_panel(&profiles, 4, 2, 0.1, seed);
        let game = ForecastValueGame::new(panel, Box::new(SeasonalProfile), SimilarityMetric::CosSim)
            .unwrap()
            .into_game();
        let accuracy = game.value(&Coalition::full(3));
        min_accuracy = min_accuracy.min(accuracy);
        assert!(
            accuracy >= 0.95,
            "seed {seed}: full-coalition accuracy {accuracy} below 0.95"
        );
    }
    println!("PASS: forecaster sanity, worst cosine accuracy over 20 seeds = {min_accuracy:.4}");
}

#[test]
fn criterion_8_heuristic_divergence() {
    // The two-player complementary game: Shapley splits evenly, LOO credits
    // the whole value to both players.
    let game = ValuationGame::new(ComplementaryPairGame);
    let phi = exact_shapley(&game).unwrap();
    assert!((phi[0] - 0.5).abs() <= 1e-9 && (phi[1] - 0.5).abs() <= 1e-9, "{phi:?}");
    let loo = leave_one_out(&game);
    assert_eq!(loo, vec![1.0, 1.0]);

    // Six-source panel where a low-volume source alone covers the night bins:
    // its Shapley rank must beat its volume rank strictly.
    let panel = night_coverage_panel(3, 1);
    let volumes = volume_shares(&panel);
    let night = panel
        .sources()
        .iter()
        .position(|s| s.as_str() == "night")
        .unwrap();
    let game = ForecastValueGame::new(panel.clone(), Box::new(SeasonalProfile), SimilarityMetric::NumSim)
        .unwrap()
        .into_game();
    let phi = exact_shapley(&game).unwrap();
    let rank = |values: &[f64], idx: usize| values.iter().filter(|v| **v > values[idx]).count() + 1;
    let shapley_rank = rank(&phi, night);
    let volume_rank = rank(&volumes, night);
    assert!(
        shapley_rank < volume_rank,
        "night source: shapley rank {shapley_rank} does not beat volume rank {volume_rank} (phi {phi:?}, volumes {volumes:?})"
    );
    println!(
        "PASS: heuristics diverge; night source shapley rank {shapley_rank} vs volume rank {volume_rank}"
    );
}

// --- criterion 9: reproducibility of the command-line pipelines ---

fn cli() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_demand-value"))
}

fn run_ok(args: &[&str]) {
    let output = cli().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read(dir: &std::path::Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn criterion_9_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = tmp.path().join("trips.csv");
    common::write_fixture_csv(&fixture);
    let fixture = fixture.to_str().unwrap();

    // Identical bench-approx invocations produce identical bytes.
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        run_ok(&[
            "bench-approx",
            "--family", "saturating",
            "--n", "10",
            "--heavy", "7",
            "--beta", "0.5",
            "--noise-scale", "0.02",
            "--algos", "rs,ss",
            "--rounds", "4",
            "--reps", "10",
            "--seed", "1",
            "--out", dir.to_str().unwrap(),
        ]);
    }
    for name in ["bench.csv", "bench.json"] {
        assert_eq!(read(&a, name), read(&b, name), "{name} differs between identical runs");
    }
    // Manifests agree on everything but the output directory itself.
    let strip_out = |dir: &std::path::Path| {
        let mut v: serde_json::Value = serde_json::from_slice(&read(dir, "manifest.json")).unwrap();
        v.as_object_mut().unwrap().remove("out");
        v
    };
    assert_eq!(strip_out(&a), strip_out(&b), "manifests differ beyond the out dir");

    // A stochastic value run re-run from its own manifest, under different
    // worker counts, reproduces the reports byte for byte.
    let c = tmp.path().join("c");
    run_ok(&[
        "value",
        "--input", fixture,
        "--schema", "generic",
        "--zone", "z1",
        "--from", "2019-03-04",
        "--to", "2019-04-01",
        "--control-start", "2019-03-25",
        "--algo", "tss",
        "--rounds", "3",
        "--tau", "0.95",
        "--seed", "7",
        "--out", c.to_str().unwrap(),
    ]);
    let manifest = c.join("manifest.json");
    let manifest = manifest.to_str().unwrap();
    let reruns = [
        (tmp.path().join("d"), vec![]),
        (tmp.path().join("e"), vec!["--workers", "1"]),
        (tmp.path().join("f"), vec!["--workers", "4"]),
    ];
    for (dir, extra) in &reruns {
        let mut args = vec!["value", "--config", manifest, "--out", dir.to_str().unwrap()];
        args.extend(extra);
        run_ok(&args);
        for name in ["value_report.csv", "value_report.json"] {
            assert_eq!(
                read(&c, name),
                read(dir, name),
                "{name} differs on re-run with {extra:?}"
            );
        }
    }

    // Same for a sampling curve on a synthetic game.
    let (g, h) = (tmp.path().join("g"), tmp.path().join("h"));
    for (dir, workers) in [(&g, "1"), (&h, "3")] {
        run_ok(&[
            "retail-curve",
            "--family", "saturating",
            "--n", "12",
            "--heavy", "8",
            "--beta", "0.5",
            "--k-values", "2,4,8",
            "--samples-per-k", "50",
            "--seed", "3",
            "--workers", workers,
            "--out", dir.to_str().unwrap(),
        ]);
    }
    assert_eq!(read(&g, "curve.csv"), read(&h, "curve.csv"), "curve differs across workers");

    println!("PASS: byte-identical outputs across re-runs, manifests and worker counts");
}
