//! Closed-form AoI laws next to simulated sample paths.
//!
//! ```text
//! cargo run --release --example aoi_laws -- [horizon] [replications]
//! ```

use fieldaoi::aoi::AoiLaw;
use fieldaoi::sim::{replicate_aoi, AoiSimParams, ChannelMode};
use fieldaoi::{Discipline, Scheduler};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let horizon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e5);
    let replications: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);

    let cases = [
        ("FCFS/UR  lambda_t=0.5 mu0=1", AoiLaw::fcfs_uniform(0.5, 1.0)?, Discipline::Fcfs, Scheduler::UniformRandom, 1.0, 1, ChannelMode::ChannelLevel),
        ("LCFS/UR  lambda_t=1   mu0=1", AoiLaw::lcfs_uniform(1.0, 1.0)?, Discipline::Lcfs, Scheduler::UniformRandom, 1.0, 1, ChannelMode::ChannelLevel),
        ("FCFS/UR  lambda_t=0.1 mu=4 M=4", AoiLaw::fcfs_uniform(0.1, 1.0)?, Discipline::Fcfs, Scheduler::UniformRandom, 4.0, 4, ChannelMode::ChannelLevel),
        ("FCFS/RR  lambda_t=0.1 mu=4 M=4", AoiLaw::fcfs_round_robin(0.1, 4.0, 4)?, Discipline::Fcfs, Scheduler::RoundRobin, 4.0, 4, ChannelMode::Decoupled),
    ];
    for (label, law, discipline, scheduler, mu, points, mode) in cases {
        let lambda_t = match law {
            AoiLaw::FcfsUniform { lambda_t, .. } | AoiLaw::LcfsUniform { lambda_t, .. } | AoiLaw::FcfsRoundRobin { lambda_t, .. } => lambda_t,
        };
        let params = AoiSimParams::new(discipline, scheduler, lambda_t, mu, points, horizon).with_mode(mode);
        let sim = replicate_aoi(&params, 17, replications)?;
        println!("{label}");
        println!(
            "  mean AoI   exact {:.6}  simulated {:.6} ± {:.6}",
            law.mean()?,
            sim.mean_age.mean,
            sim.mean_age.ci95
        );
        for (s, est) in &sim.lst {
            println!("  LST s={s:<4} exact {:.6}  simulated {:.6} ± {:.6}", law.lst(*s), est.mean, est.ci95);
        }
    }
    Ok(())
}
