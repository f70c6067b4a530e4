//! Helpers shared by the integration suites: independent oracles and a
//! synthetic trip-CSV fixture generator.

#![allow(dead_code)]

use demand_value::coalition::Coalition;
use demand_value::game::ValuationGame;

use std::fmt::Write as _;
use std::path::Path;

/// Definitional Shapley value: the average marginal contribution over every
/// ordering of the players. Exponential cost, only for small games; kept
/// independent of the library's subset-weight implementation.
pub fn permutation_shapley_oracle(game: &ValuationGame) -> Vec<f64> {
    fn orderings(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut all = Vec::new();
        for (i, &first) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut perm in orderings(&rest) {
                perm.insert(0, first);
                all.push(perm);
            }
        }
        all
    }
    let n = game.n_players();
    let players: Vec<usize> = (0..n).collect();
    let perms = orderings(&players);
    let mut phi = vec![0.0; n];
    for perm in &perms {
        let mut prefix = Coalition::empty(n);
        let mut previous = 0.0;
        for &player in perm {
            prefix = prefix.with_member(player).unwrap();
            let value = game.value(&prefix);
            phi[player] += value - previous;
            previous = value;
        }
    }
    for p in &mut phi {
        *p /= perms.len() as f64;
    }
    phi
}

/// Brute-force DTW: enumerate every monotone boundary-matched warping path.
pub fn dtw_brute_force(a: &[f64], b: &[f64]) -> f64 {
    fn walk(a: &[f64], b: &[f64], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + (a[i] - b[j]).abs();
        if acc >= *best {
            return;
        }
        if i == a.len() - 1 && j == b.len() - 1 {
            *best = acc;
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, 0, 0, 0.0, &mut best);
    best
}

/// Writes a 4-week synthetic trip CSV in the generic schema: three sources
/// with distinct hour-of-week ride counts in zone "z1", plus a smaller block
/// in zone "z2". One row per ride, integer counts, fully deterministic.
pub fn write_fixture_csv(path: &Path) {
    let mut text = String::from("start_time,source_id,zone_id\n");
    let start = chrono::NaiveDate::from_ymd_opt(2019, 3, 4).unwrap();
    for day in 0..28u32 {
        let date = start + chrono::Duration::days(day as i64);
        let weekday = day % 7;
        for hour in 0..24u32 {
            let day_lift = if (8..20).contains(&hour) { 2 } else { 0 };
            let weekend_lift = if weekday >= 5 { 1 } else { 0 };
            let rides = [
                1 + day_lift,
                1 + day_lift + weekend_lift,
                if hour < 6 { 2 } else { 1 },
            ];
            for (source, &count) in ["alpha", "bravo", "charlie"].iter().zip(&rides) {
                for _ in 0..count {
                    let _ = writeln!(text, "{date}T{hour:02}:00:00,{source},z1");
                }
            }
            if hour % 3 == 0 {
                for source in ["alpha", "delta"] {
                    let _ = writeln!(text, "{date}T{hour:02}:00:00,{source},z2");
                }
            }
        }
    }
    std::fs::write(path, text).unwrap();
}

/// Writes a multi-zone CSV: `zones` zones, each holding two sources that are
/// active on complementary halves of the day (so cooperation pays everywhere).
pub fn write_multi_zone_csv(path: &Path, zones: usize) {
    let mut text = String::from("start_time,source_id,zone_id\n");
    let start = chrono::NaiveDate::from_ymd_opt(2019, 3, 4).unwrap();
    for day in 0..28u32 {
        let date = start + chrono::Duration::days(day as i64);
        for hour in 0..24u32 {
            for zone in 0..zones {
                let wave = 1 + ((hour as usize + zone) % 4);
                let source = if hour < 12 {
                    format!("z{zone}-early")
                } else {
                    format!("z{zone}-late")
                };
                for _ in 0..wave {
                    let _ = writeln!(text, "{date}T{hour:02}:00:00,{source},zone-{zone}");
                }
            }
        }
    }
    std::fs::write(path, text).unwrap();
}
