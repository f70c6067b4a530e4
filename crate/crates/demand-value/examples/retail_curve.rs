//! Retail-market questions: how many randomly chosen sources does a target
//! accuracy take, and how does a marketplace grow a selection batch by batch?
//!
//! Run with: cargo run --example retail_curve

use demand_value::bench::retail::{accuracy_probability_curve, pims_select};
use demand_value::bench::synthetic::SaturatingGame;
use demand_value::coalition::Coalition;
use demand_value::game::ValuationGame;

fn main() {
    println!("=== Retail Curve & Selection Example ===\n");

    // Stand-in for a driver-level game: value saturates once enough of the
    // informative sources are aboard.
    let n = 24;
    let game = ValuationGame::new(SaturatingGame::new(n, 18, 0.35, 1.0, 0.005, 3));
    let v_full = game.value(&Coalition::full(n));
    println!("{n} sources, v(all) = {v_full:.4}\n");

    // Probability that k random sources reach 95% of the full value.
    let k_values: Vec<usize> = (1..=n).step_by(2).collect();
    let curve = accuracy_probability_curve(&game, &k_values, 400, 0.95, 11);
    println!("P[v(K) >= 0.95 * v(all)] by coalition size:");
    for point in &curve {
        let bar = "#".repeat((point.probability * 40.0).round() as usize);
        println!("  k={:>2}  {:>5.2}  {bar}", point.k, point.probability);
    }
    let smallest_reliable = curve.iter().find(|p| p.probability >= 0.5).map(|p| p.k);
    if let Some(k) = smallest_reliable {
        println!("\nsmallest k with at least even odds: {k}");
    }

    // A marketplace filling a buyer's accuracy request batch by batch.
    println!("\nbatch-by-batch selection toward 0.95 * v(all):");
    for seed in [1u64, 2, 3] {
        let outcome = pims_select(&game, 0.95 * v_full, 4, 6, seed);
        println!(
            "  seed {seed}: {} after {} batches ({} sources, value {:.4})",
            if outcome.achieved { "reached" } else { "failed" },
            outcome.batches_used,
            outcome.selected.len(),
            outcome.value
        );
    }

    println!("\nan unreachable request fails cleanly instead of erroring:");
    let outcome = pims_select(&game, v_full * 1.01, 4, 6, 1);
    println!(
        "  target {:.4}: achieved = {}, best value {:.4} after {} batches",
        v_full * 1.01,
        outcome.achieved,
        outcome.value,
        outcome.batches_used
    );
}
