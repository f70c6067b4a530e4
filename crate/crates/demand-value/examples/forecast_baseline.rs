//! The default forecaster on its own: hour-of-week profile with a level
//! trend, scored by all three similarity metrics.
//!
//! Run with: cargo run --example forecast_baseline

use demand_value::bench::synthetic::{weekly_profile_panel, HOURS_PER_WEEK};
use demand_value::forecast::{Forecaster, SeasonalProfile};
use demand_value::series::SourceId;
use demand_value::similarity::{cosine_similarity, numerical_similarity, relative_dtw};

fn main() {
    println!("=== Forecast Baseline Example ===\n");

    // One city-wide series: commuter peaks on weekdays, a flatter weekend.
    let profile: Vec<f64> = (0..HOURS_PER_WEEK)
        .map(|h| {
            let hod = h % 24;
            let weekday = h / 24 < 5;
            let peaks = if weekday && ((7..10).contains(&hod) || (16..19).contains(&hod)) {
                12.0
            } else {
                0.0
            };
            let base = 4.0 + 6.0 * f64::exp(-((hod as f64 - 13.0) / 5.0).powi(2));
            (base + peaks).round()
        })
        .collect();

    // Four observed weeks, two control weeks, 10% multiplicative noise.
    let panel = weekly_profile_panel(
        &[(SourceId::new("city"), profile)],
        4,
        2,
        0.1,
        2024,
    );
    let grid = panel.grid();
    println!(
        "series: {} hourly bins, observing {} and predicting {}\n",
        grid.n_bins(),
        grid.observation_len(),
        grid.control_len()
    );

    let forecast = SeasonalProfile
        .fit_predict(panel.ground_truth(), grid)
        .expect("two full weeks observed");
    let truth = panel.control_truth();

    println!("first day of the control window (truth vs prediction):");
    for (hour, (t, p)) in truth.iter().zip(&forecast.values).take(24).enumerate() {
        let bar = |v: f64| "*".repeat((v / 2.0).round() as usize);
        println!("  {hour:02}h  truth {t:>5.1} {:<14} pred {p:>5.1} {}", bar(*t), bar(*p));
    }

    println!("\naccuracy over the full two-week control window:");
    println!("  cosine similarity    = {:.4}", cosine_similarity(truth, &forecast.values));
    println!("  numerical similarity = {:.4}", numerical_similarity(truth, &forecast.values));
    println!("  relative dtw         = {:.4}", relative_dtw(truth, &forecast.values));

    println!("\nthe profile predictor is deliberately plain: the library judges");
    println!("what data is worth under a reasonable forecaster, and any model");
    println!("implementing the Forecaster trait can slot in instead.");
}
