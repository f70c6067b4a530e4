//! Cross-metric validation: compute Shapley shares under cosine, numerical
//! and relative-DTW similarity and check how well they agree.
//!
//! Run with: cargo run --example metric_comparison

use demand_value::approx::EstimatorSpec;
use demand_value::bench::cross_metric::metric_cross_validation;
use demand_value::bench::synthetic::{weekly_profile_panel, HOURS_PER_WEEK};
use demand_value::forecast::ForecasterKind;
use demand_value::series::SourceId;
use demand_value::similarity::SimilarityMetric;

fn main() {
    println!("=== Metric Comparison Example ===\n");

    // Four sources with genuinely different shapes.
    let profiles: Vec<(SourceId, Vec<f64>)> = [
        ("steady", Box::new(|_h: usize, hod: usize| 6.0 + 0.1 * hod as f64) as Box<dyn Fn(usize, usize) -> f64>),
        ("rush", Box::new(|_h, hod| if (7..10).contains(&hod) || (16..19).contains(&hod) { 14.0 } else { 1.0 })),
        ("nightlife", Box::new(|h, hod| if !(3..21).contains(&hod) { 9.0 + (h / 24 >= 4) as usize as f64 * 5.0 } else { 0.5 })),
        ("weekend", Box::new(|h, hod| if h / 24 >= 5 { 10.0 + (hod as f64 - 14.0).abs() * -0.3 + 5.0 } else { 1.0 })),
    ]
    .into_iter()
    .map(|(name, f)| {
        let profile = (0..HOURS_PER_WEEK).map(|h| f(h, h % 24).max(0.0)).collect();
        (SourceId::new(name), profile)
    })
    .collect();
    let panel = weekly_profile_panel(&profiles, 3, 1, 0.05, 13);

    let result = metric_cross_validation(
        &panel,
        ForecasterKind::SeasonalProfile,
        &SimilarityMetric::ALL,
        &EstimatorSpec::exact(),
        0,
        2,
    )
    .unwrap();

    println!("{:<10} {:>9} {:>9} {:>9}", "source", "cossim", "numsim", "rdtw");
    for (i, source) in result.sources.iter().enumerate() {
        println!(
            "{:<10} {:>8.1}% {:>8.1}% {:>8.1}%",
            source.as_str(),
            100.0 * result.per_metric[0].shares[i],
            100.0 * result.per_metric[1].shares[i],
            100.0 * result.per_metric[2].shares[i]
        );
    }

    println!("\npairwise agreement of the share vectors:");
    for pair in &result.pairs {
        println!(
            "  {:<7} vs {:<7}  R^2 = {:.3}, top-{} overlap = {}/{}",
            pair.first, pair.second, pair.r_squared, result.top_k, pair.top_k_overlap, result.top_k
        );
    }

    println!("\nthe metrics weigh errors differently, but the ranking of who");
    println!("matters stays stable; a valuation that flips under a reasonable");
    println!("metric change would not be worth much.");
}
