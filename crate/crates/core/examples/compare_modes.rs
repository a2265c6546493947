//! Runs the adaptive-vs-fixed comparison at desk scale and prints the
//! numbers behind the headline claim: widening the beam when the tracker is
//! unsure buys a lower time-averaged angle error than always using the full
//! array.
//!
//! ```text
//! cargo run --release -p beamtrack-core --example compare_modes
//! ```

use beamtrack_core::{aggregate, correlation, run_episodes, Mode, Result, SimConfig};

fn main() -> Result<()> {
    let cfg = SimConfig {
        runs: 200,
        k_steps: 50,
        ..SimConfig::default()
    };

    let start = std::time::Instant::now();
    let adaptive_traces = run_episodes(&cfg)?;
    let fixed_traces = run_episodes(&cfg.with_mode(Mode::Fixed))?;
    let elapsed = start.elapsed();

    let adaptive = aggregate(&adaptive_traces)?;
    let fixed = aggregate(&fixed_traces)?;

    let rmse_a = adaptive.time_averaged_rmse().to_degrees();
    let rmse_f = fixed.time_averaged_rmse().to_degrees();
    println!(
        "episodes            : {} x {} slots (both modes)",
        cfg.runs, cfg.k_steps
    );
    println!("time-avg RMSE  adaptive: {rmse_a:.4} deg");
    println!("time-avg RMSE  fixed   : {rmse_f:.4} deg");
    println!(
        "relative improvement   : {:.1}%",
        100.0 * (rmse_f - rmse_a) / rmse_f
    );
    println!(
        "pooled corr(e_k, |err|): {:.4}",
        correlation(&adaptive_traces)?
    );

    // Mean active elements per quintile of the tracker's error proxy.
    let mut pool: Vec<(f64, usize)> = adaptive_traces
        .iter()
        .flat_map(|t| t.rows.iter().map(|r| (r.e_k, r.m_k)))
        .collect();
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("mean m_k by e_k quintile (low to high):");
    for (q, chunk) in pool.chunks(pool.len().div_ceil(5)).enumerate() {
        let mean_m: f64 = chunk.iter().map(|&(_, m)| m as f64).sum::<f64>() / chunk.len() as f64;
        let lo = chunk.first().map(|p| p.0.to_degrees()).unwrap_or(f64::NAN);
        let hi = chunk.last().map(|p| p.0.to_degrees()).unwrap_or(f64::NAN);
        println!(
            "  q{}: e_k in [{lo:.3}, {hi:.3}] deg -> mean m = {mean_m:.2}",
            q + 1
        );
    }
    println!("wall time              : {elapsed:.2?}");
    Ok(())
}
