//! Error-minimizing spatial and temporal sampling rates.
//!
//! ```text
//! cargo run --release --example optimize_rates
//! ```

use fieldaoi::optimize::{optimize_fcfs, optimize_lcfs, SearchOptions, TimeRate};
use fieldaoi::CorrelationParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (a, b, mu_bar) in [(1.0, 1.0, 4.0), (0.1, 0.01, 5e-5), (2.0, 0.5, 10.0)] {
        let params = CorrelationParams::new(a, b)?;
        println!("a={a} b={b} mu_bar={mu_bar}");

        let fcfs = optimize_fcfs(&params, mu_bar, &SearchOptions::default())?;
        let lt = fcfs.lambda_t_star.finite().unwrap_or(f64::NAN);
        println!(
            "  FCFS lambda_s*={:.6e} lambda_t*={lt:.6e} rho0={:.4} eps*={:.8} ({} evaluations, {} local minima)",
            fcfs.lambda_s_star,
            fcfs.lambda_s_star * lt / mu_bar,
            fcfs.eps_star,
            fcfs.evaluations,
            fcfs.local_minima.len()
        );

        let lcfs = optimize_lcfs(&params, mu_bar)?;
        assert_eq!(lcfs.lambda_t_star, TimeRate::Unbounded);
        println!(
            "  LCFS lambda_s*={:.6e} lambda_t*=unbounded eps*={:.8}; lambda_t >= {:.4e} is within 1%",
            lcfs.lambda_s_star,
            lcfs.eps_star,
            lcfs.practical_lambda_t.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
