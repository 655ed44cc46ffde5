//! Built-in check suites run by `check --suite ...`.

use rand::Rng;
use serde::Serialize;

use crate::aoi::{fcfs_rr_lst, fcfs_ur_lst, mean_from_lst, AoiLaw};
use crate::error_law::{eps, eps_fcfs, eps_lcfs, eps_via_lst_at_one, f_ratio, CombinedLaw};
use crate::model::{CorrelationParams, Discipline, Scheduler, SystemConfig};
use crate::numerics::integrate_to_infinity;
use crate::optimize::optimize_lcfs;
use crate::rng::{stream, Purpose, SimRng};
use crate::sim::{compare_setups, equivalence_check, replicate_aoi, AoiSimParams, ChannelMode, EquivalenceParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Simulation effort of the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckEffort {
    pub seed: u64,
    pub horizon: f64,
    pub replications: usize,
}

fn log_uniform(rng: &mut SimRng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// A random stable configuration: rates log-uniform over two decades and
/// `rho0` uniform in `[0.05, 0.95]`.
pub fn random_stable_config(rng: &mut SimRng, discipline: Discipline) -> (SystemConfig, CorrelationParams) {
    let a = log_uniform(rng, 0.1, 10.0);
    let b = log_uniform(rng, 0.1, 10.0);
    let ls = log_uniform(rng, 0.1, 10.0);
    let lt = log_uniform(rng, 0.1, 10.0);
    let rho = 0.05 + 0.9 * rng.random::<f64>();
    (
        SystemConfig::new(ls, lt, ls * lt / rho, discipline),
        CorrelationParams::new(a, b).expect("positive"),
    )
}

/// Closed-form identities and reference values.
pub fn identities(seed: u64) -> Vec<CheckLine> {
    let mut out = Vec::new();
    let mut rng = stream(seed, 0, 0, Purpose::Channel);

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (c, p) = random_stable_config(&mut rng, Discipline::Fcfs);
        let direct = eps_fcfs(&c, &p).map(|s| s.eps_bar);
        let via = eps_via_lst_at_one(&c, &p).map(|s| s.eps_bar);
        worst = worst.max(match (direct, via) {
            (Ok(x), Ok(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        });
    }
    out.push(CheckLine::new(
        "fcfs: product form vs 1 - LST_K(1) over 1000 configs",
        worst <= 1e-9,
        format!("max gap {worst:e} (tol 1e-9)"),
    ));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (c, p) = random_stable_config(&mut rng, Discipline::Lcfs);
        let r = (2.0 * c.lambda_s / p.b(), c.lambda_t / p.a(), c.mu_bar / c.lambda_s / p.a());
        let product = 1.0 - f_ratio(r.0) * f_ratio(r.1) * f_ratio(r.2);
        worst = worst.max(match eps_lcfs(&c, &p) {
            Ok(s) => (s.eps_bar - product).abs(),
            Err(_) => f64::INFINITY,
        });
    }
    out.push(CheckLine::new(
        "lcfs: partial fractions vs product form over 1000 configs",
        worst <= 1e-10,
        format!("max gap {worst:e} (tol 1e-10)"),
    ));

    let (mut worst_mass, mut worst_mean, mut tested) = (0.0f64, 0.0f64, 0);
    while tested < 20 {
        let (c, p) = random_stable_config(&mut rng, Discipline::Fcfs);
        let Ok(law) = CombinedLaw::new(&c, &p) else { continue };
        let Ok(pdf) = law.pdf_coefficients() else { continue };
        // z = 1 - e^{-x} moves the endpoint singularities to an exponential tail.
        let mass = integrate_to_infinity(|x| pdf.k_density(x), 0.0, 1e-12, 1e-12);
        let mean = integrate_to_infinity(|x| -(-x).exp_m1() * pdf.k_density(x), 0.0, 1e-12, 1e-12);
        let (Ok(mass), Ok(mean)) = (mass, mean) else {
            worst_mass = f64::INFINITY;
            break;
        };
        worst_mass = worst_mass.max((mass - 1.0).abs());
        worst_mean = worst_mean.max((mean - law.summary().eps_bar).abs());
        tested += 1;
    }
    out.push(CheckLine::new(
        "fcfs: error pdf integrates to 1 with mean eps",
        worst_mass <= 1e-6 && worst_mean <= 1e-6,
        format!("max |mass - 1| {worst_mass:e}, max |mean - eps| {worst_mean:e} (tol 1e-6)"),
    ));

    let unit = CorrelationParams::new(1.0, 1.0).expect("positive");
    let reference = [
        ("fcfs reference eps = 0.68", SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), 0.68),
        ("lcfs reference eps = 11/14", SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs), 11.0 / 14.0),
    ];
    for (name, c, expect) in reference {
        let got = eps(&c, &unit).map(|s| s.eps_bar).unwrap_or(f64::NAN);
        out.push(CheckLine::new(name, (got - expect).abs() <= 1e-12, format!("got {got}")));
    }
    match optimize_lcfs(&unit, 2.0) {
        Ok(r) => out.push(CheckLine::new(
            "lcfs optimum lambda_s* = 1, eps* = 5/9",
            (r.lambda_s_star - 1.0).abs() <= 1e-12 && (r.eps_star - 5.0 / 9.0).abs() <= 1e-12,
            format!("lambda_s* = {}, eps* = {}", r.lambda_s_star, r.eps_star),
        )),
        Err(e) => out.push(CheckLine::new("lcfs optimum", false, e.to_string())),
    }
    out
}

/// AoI laws: transform identities and simulated means and LSTs.
pub fn aoi_laws(effort: CheckEffort) -> Vec<CheckLine> {
    let mut out = Vec::new();
    let fcfs = AoiLaw::fcfs_uniform(0.5, 1.0).expect("stable");
    let fcfs_mean = mean_from_lst(|s| fcfs.lst(s));
    out.push(CheckLine::new(
        "fcfs mean AoI from the LST = 3.5 (lambda_t = 0.5, mu0 = 1)",
        fcfs_mean.as_ref().is_ok_and(|m| (m - 3.5).abs() <= 1e-6),
        format!("{fcfs_mean:?}"),
    ));
    let lcfs = AoiLaw::lcfs_uniform(1.0, 1.0).expect("positive rates");
    let lcfs_mean = mean_from_lst(|s| lcfs.lst(s));
    out.push(CheckLine::new(
        "lcfs mean AoI from the LST = 2 (lambda_t = 1, mu0 = 1)",
        lcfs_mean.as_ref().is_ok_and(|m| (m - 2.0).abs() <= 1e-6),
        format!("{lcfs_mean:?}"),
    ));
    let gap = [0.25, 1.0, 4.0]
        .iter()
        .map(|&s| match (fcfs_rr_lst(0.3, 1.0, 1, s), fcfs_ur_lst(0.3, 1.0, s)) {
            (Ok(x), Ok(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    out.push(CheckLine::new(
        "round robin with one point equals uniform scheduling",
        gap <= 1e-10,
        format!("max gap {gap:e}"),
    ));

    let CheckEffort {
        seed,
        horizon,
        replications,
    } = effort;
    let mean_cases = [
        ("simulated fcfs mean AoI within 2% of 3.5", Discipline::Fcfs, 0.5, 3.5),
        ("simulated lcfs mean AoI within 2% of 2", Discipline::Lcfs, 1.0, 2.0),
    ];
    for (name, d, lt, expect) in mean_cases {
        let p = AoiSimParams::new(d, Scheduler::UniformRandom, lt, 1.0, 1, horizon);
        out.push(match replicate_aoi(&p, seed, replications) {
            Ok(s) => CheckLine::new(
                name,
                (s.mean_age.mean - expect).abs() <= 0.02 * expect,
                format!("{} ± {}", s.mean_age.mean, s.mean_age.ci95),
            ),
            Err(e) => CheckLine::new(name, false, e.to_string()),
        });
    }

    let lst_cases: [(&str, Scheduler, ChannelMode); 2] = [
        ("simulated fcfs/ur LST (lambda_t = 0.1, mu = 4, M = 4)", Scheduler::UniformRandom, ChannelMode::ChannelLevel),
        ("simulated fcfs/rr LST (lambda_t = 0.1, mu = 4, M = 4)", Scheduler::RoundRobin, ChannelMode::Decoupled),
    ];
    for (name, sched, mode) in lst_cases {
        let p = AoiSimParams::new(Discipline::Fcfs, sched, 0.1, 4.0, 4, horizon).with_mode(mode);
        out.push(match replicate_aoi(&p, seed, replications) {
            Ok(s) => {
                let mut ok = true;
                let mut detail = Vec::new();
                for (sv, est) in &s.lst {
                    let exact = match sched {
                        Scheduler::UniformRandom => fcfs_ur_lst(0.1, 1.0, *sv),
                        Scheduler::RoundRobin => fcfs_rr_lst(0.1, 4.0, 4, *sv),
                    }
                    .unwrap_or(f64::NAN);
                    ok &= est.contains(exact);
                    detail.push(format!("s={sv}: {:.6} ± {:.6} vs {exact:.6}", est.mean, est.ci95));
                }
                CheckLine::new(name, ok, detail.join("; "))
            }
            Err(e) => CheckLine::new(name, false, e.to_string()),
        });
    }
    out
}

/// Channel-level vs decoupled equivalence on the reference set.
pub fn appendix_a(effort: CheckEffort) -> Vec<CheckLine> {
    let seeds = [effort.seed];
    let cases = [
        (Scheduler::UniformRandom, Discipline::Fcfs, 0.1, 4.0, 4),
        (Scheduler::UniformRandom, Discipline::Fcfs, 0.5, 1.0, 1),
        (Scheduler::UniformRandom, Discipline::Lcfs, 0.5, 4.0, 4),
        (Scheduler::RoundRobin, Discipline::Fcfs, 0.5, 1.0, 1),
    ];
    let mut out = Vec::new();
    for (sched, d, lt, mu, m) in cases {
        let params = EquivalenceParams {
            discipline: d,
            lambda_t: lt,
            mu,
            points: m,
            horizon: effort.horizon,
            replications: effort.replications,
        };
        out.push(report_line(equivalence_check(sched, &params, &seeds)));
    }
    let ur = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, 0.5, 1.0, 1, effort.horizon);
    let rr = AoiSimParams::new(Discipline::Fcfs, Scheduler::RoundRobin, 0.5, 1.0, 1, effort.horizon);
    out.push(report_line(compare_setups(
        "fcfs M=1: round robin vs uniform",
        &rr,
        &ur,
        &seeds,
        effort.replications,
    )));
    out
}

fn report_line(report: crate::error::Result<crate::sim::EquivalenceReport>) -> CheckLine {
    match report {
        Ok(r) => {
            let detail = r
                .comparisons
                .iter()
                .map(|c| format!("{}: diff {:.2e} / pooled {:.2e}", c.statistic, c.difference, c.pooled_ci95))
                .collect::<Vec<_>>()
                .join("; ");
            CheckLine::new(r.label, r.passed, detail)
        }
        Err(e) => CheckLine::new("equivalence", false, e.to_string()),
    }
}
