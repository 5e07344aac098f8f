//! Scans corner-barrier parameters at s = 1/2 and records, for each, the
//! curvature at ramp points near the corner.
//!
//! Usage: `cargo run --release --example barrier_search -- fixtures/barrier_search.json`

use nonlocal_graphs::solver::{barrier_curvature_scan, BarrierParams, Cap};
use nonlocal_graphs::FractionalOrder;
use serde_json::json;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "barrier_search.json".into());
    let order = FractionalOrder::new(0.5).expect("valid order");
    let distances = [0.01, 0.02, 0.05];
    let mut rows = Vec::new();
    for delta in [0.0, 0.5] {
        for slope in [0.25, 0.5, 1.0, 2.0] {
            for ramp_end in [0.1, 0.25, 0.5, 1.0, 2.0] {
                for cap in [Cap::Flat, Cap::Bent { slope: -1.0 }] {
                    let params = BarrierParams {
                        delta,
                        slope,
                        ramp_end,
                        cap,
                    };
                    let samples = barrier_curvature_scan(&order, &params, &distances, 1e-6).expect("scan");
                    let values: Vec<f64> = samples.iter().map(|c| c.value).collect();
                    let negative = values.iter().all(|v| *v < 0.0);
                    println!("{params:?}: {values:?}");
                    rows.push(json!({ "params": params, "values": values, "all_negative": negative }));
                }
            }
        }
    }
    // The library default is the configuration used downstream; it must lie
    // in the negative region.
    let chosen = BarrierParams::default();
    let chosen_values: Vec<f64> = barrier_curvature_scan(&order, &chosen, &distances, 1e-6)
        .expect("scan")
        .iter()
        .map(|c| c.value)
        .collect();
    assert!(chosen_values.iter().all(|v| *v < 0.0), "default barrier is not negative");
    let doc = json!({
        "s": 0.5,
        "tolerance": 1e-6,
        "distances": distances,
        "chosen": { "params": chosen, "values": chosen_values },
        "results": rows,
    });
    std::fs::write(&out, serde_json::to_string_pretty(&doc).unwrap()).expect("write fixtures");
}
