//! Shared-channel simulation against per-point service laws: exponential
//! under uniform random scheduling, Erlang under round robin.
//!
//! ```text
//! cargo run --release --example mode_equivalence -- [horizon] [replications]
//! ```

use fieldaoi::sim::{equivalence_check, EquivalenceParams};
use fieldaoi::{Discipline, Scheduler};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let horizon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5e4);
    let replications: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    let cases = [
        (Scheduler::UniformRandom, Discipline::Fcfs, 0.1, 4.0, 4),
        (Scheduler::UniformRandom, Discipline::Lcfs, 0.5, 4.0, 4),
        (Scheduler::RoundRobin, Discipline::Fcfs, 0.5, 1.0, 1),
        // Round robin over several points: the channel-level pointer keeps
        // cycling, so a packet arriving at an idle point waits a residual
        // cycle rather than a fresh Erlang time. Expect a mismatch here.
        (Scheduler::RoundRobin, Discipline::Fcfs, 0.1, 4.0, 4),
    ];
    for (scheduler, discipline, lambda_t, mu, points) in cases {
        let params = EquivalenceParams {
            discipline,
            lambda_t,
            mu,
            points,
            horizon,
            replications,
        };
        let report = equivalence_check(scheduler, &params, &[7])?;
        println!("[{}] {}", if report.passed { "pass" } else { "FAIL" }, report.label);
        for c in &report.comparisons {
            println!(
                "    {:<10} {:.6} vs {:.6}  diff {:+.2e}  pooled 95% {:.2e}",
                c.statistic, c.first.mean, c.second.mean, c.difference, c.pooled_ci95
            );
        }
    }
    Ok(())
}
