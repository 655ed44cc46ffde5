//! Monte Carlo estimate of the field error next to the analytic value.
//!
//! ```text
//! cargo run --release --example simulate_field -- [horizon] [replications]
//! ```

use fieldaoi::error_law::eps;
use fieldaoi::sim::{simulate_field_error, FieldSimOptions};
use fieldaoi::{CorrelationParams, Discipline, SystemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let horizon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2e3);
    let replications: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);

    let params = CorrelationParams::new(1.0, 1.0)?;
    let cases = [
        SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs),
        SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs),
    ];
    for config in cases {
        let analytic = eps(&config, &params)?.eps_bar;
        let options = FieldSimOptions::new(200.0, horizon, replications, 2024);
        let start = std::time::Instant::now();
        let sim = simulate_field_error(&config, &params, &options)?;
        println!(
            "{}: analytic {analytic:.6}  simulated {:.6} ± {:.6}  mean AoI {:.4}  ({:.1} s)",
            config.discipline,
            sim.eps_hat,
            sim.ci95,
            sim.aoi_mean.mean,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
