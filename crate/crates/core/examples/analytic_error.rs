//! Average estimation error in closed form, with its error distribution.
//!
//! ```text
//! cargo run --example analytic_error
//! ```

use fieldaoi::error_law::{eps, CombinedLaw};
use fieldaoi::{CorrelationParams, Discipline, SystemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CorrelationParams::new(1.0, 1.0)?;
    let cases = [
        SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs),
        SystemConfig::new(1.0, 3.0, 8.0, Discipline::Fcfs),
        SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs),
        SystemConfig::new(1.0, 1e6, 2.0, Discipline::Lcfs),
    ];
    for config in cases {
        let summary = eps(&config, &params)?;
        println!(
            "{} lambda_s={} lambda_t={} mu_bar={}: eps = {:.10} ({:?}, cross-check gap {:.1e})",
            config.discipline,
            config.lambda_s,
            config.lambda_t,
            config.mu_bar,
            summary.eps_bar,
            summary.method,
            summary.max_discrepancy()
        );
        let law = CombinedLaw::new(&config, &params)?;
        let quantiles: Vec<String> = [0.25, 0.5, 0.75, 0.9]
            .iter()
            .map(|&z| Ok(format!("P(e<={z})={:.4}", law.error_cdf(z)?)))
            .collect::<Result<_, fieldaoi::Error>>()?;
        println!("    {}", quantiles.join("  "));
    }

    let unstable = SystemConfig::new(1.0, 8.0, 4.0, Discipline::Fcfs);
    println!("unstable FCFS: {}", eps(&unstable, &params).unwrap_err());
    Ok(())
}
