use fieldaoi::aoi::fcfs_ur_lst;
use fieldaoi::sim::{
    compare_setups, equivalence_check, replicate_aoi, simulate_aoi, simulate_field_error, spatial_only_error,
    AoiSimParams, ChannelMode, EquivalenceParams, EquivalenceReport, FieldSimOptions,
};
use fieldaoi::{CorrelationParams, Discipline, Error, Scheduler, SystemConfig};

fn unit() -> CorrelationParams {
    CorrelationParams::new(1.0, 1.0).unwrap()
}

/// Four correlated 95% comparisons fail together too often for a unit test;
/// allow roughly three standard errors instead.
fn assert_within_noise(r: &EquivalenceReport) {
    for c in &r.comparisons {
        assert!(c.difference.abs() <= 1.5 * c.pooled_ci95, "{}: {c:?}", r.label);
    }
}

#[test]
fn sawtooth_paths_are_consistent() {
    for discipline in [Discipline::Fcfs, Discipline::Lcfs] {
        for mode in [ChannelMode::ChannelLevel, ChannelMode::Decoupled] {
            let p = AoiSimParams::new(discipline, Scheduler::UniformRandom, 0.3, 2.0, 3, 500.0)
                .with_mode(mode)
                .with_warmup(50.0)
                .with_s_values(vec![0.0, 1.0])
                .recording_paths();
            let run = simulate_aoi(&p, 5).unwrap();
            let paths = run.paths.as_ref().unwrap();
            for (i, path) in paths.iter().enumerate() {
                assert_eq!(path[0].start, 0.0);
                assert_eq!(path[0].start_age, 0.0);
                let mut integral = 0.0;
                for w in path.windows(2) {
                    let end = w[0].start + w[0].duration;
                    assert!((w[1].start - end).abs() < 1e-9);
                    // A delivery never increases the age.
                    assert!(w[1].start_age <= w[0].start_age + w[0].duration + 1e-9);
                    assert!(w[1].start_age >= 0.0);
                }
                let last = path.last().unwrap();
                assert!((last.start + last.duration - 500.0).abs() < 1e-9);
                for seg in path {
                    let lo = seg.start.max(50.0);
                    let hi = (seg.start + seg.duration).min(500.0);
                    if hi > lo {
                        let a0 = seg.start_age + (lo - seg.start);
                        integral += (hi - lo) * (a0 + 0.5 * (hi - lo));
                    }
                }
                let mean = integral / 450.0;
                assert!((mean - run.points[i].mean_age).abs() < 1e-9 * mean.max(1.0));
                assert!((run.points[i].lst[0] - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let c = SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs);
    let o = FieldSimOptions::new(30.0, 500.0, 4, 99);
    let a = simulate_field_error(&c, &unit(), &o).unwrap();
    let b = simulate_field_error(&c, &unit(), &o).unwrap();
    assert_eq!(a, b);
    let other = simulate_field_error(&c, &unit(), &FieldSimOptions::new(30.0, 500.0, 4, 100)).unwrap();
    assert_ne!(a.eps_hat, other.eps_hat);
    assert_eq!(a.seeds.seed, 99);
    assert_eq!(a.replication_eps.len(), 4);
}

#[test]
fn decoupled_fcfs_queue_is_mm1() {
    let p = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, 0.5, 1.0, 1, 2e5)
        .with_mode(ChannelMode::Decoupled);
    let s = replicate_aoi(&p, 8, 5).unwrap();
    assert!((s.mean_queue.mean - 1.0).abs() < 0.05, "{:?}", s.mean_queue);
    assert!((s.mean_age.mean - 3.5).abs() < 0.05 * 3.5, "{:?}", s.mean_age);
    let lst = fcfs_ur_lst(0.5, 1.0, 1.0).unwrap();
    assert!((s.lst[1].1.mean - lst).abs() < 0.01);
}

#[test]
fn warmup_doubling_is_within_noise() {
    let c = SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs);
    let base = FieldSimOptions::new(50.0, 5e3, 10, 17);
    let first = simulate_field_error(&c, &unit(), &base).unwrap();
    let mut doubled = base.clone();
    doubled.warmup = Some(2.0 * first.warmup);
    let second = simulate_field_error(&c, &unit(), &doubled).unwrap();
    let noise = first.ci95.hypot(second.ci95);
    assert!((first.eps_hat - second.eps_hat).abs() <= noise, "{} vs {} ± {noise}", first.eps_hat, second.eps_hat);
}

#[test]
fn spatial_only_diagnostic_matches_distance_law() {
    // 1 - E[e^{-b d}] = 1 - 2λs/(2λs + b) = 1/3
    let e = spatial_only_error(1.0, 1e4, &unit(), 100_000, 2).unwrap();
    assert!((e - 1.0 / 3.0).abs() < 0.01, "{e}");
}

#[test]
fn input_errors() {
    let c = SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs);
    let mut o = FieldSimOptions::new(30.0, 500.0, 2, 1);
    o.probes = 0;
    assert!(matches!(simulate_field_error(&c, &unit(), &o), Err(Error::InvalidParameter { .. })));
    let mut o = FieldSimOptions::new(30.0, 500.0, 2, 1);
    o.warmup = Some(600.0);
    assert!(simulate_field_error(&c, &unit(), &o).is_err());
    let p = AoiSimParams::new(Discipline::Lcfs, Scheduler::UniformRandom, 1e-3, 1e-3, 1, 1e-3).with_warmup(0.0);
    assert_eq!(simulate_aoi(&p, 1), Err(Error::NoDeliveries));
}

#[test]
fn empty_point_sets_are_redrawn() {
    let c = SystemConfig::new(0.05, 0.5, 0.5, Discipline::Lcfs);
    let o = FieldSimOptions::new(10.0, 200.0, 12, 4);
    let r = simulate_field_error(&c, &unit(), &o).unwrap();
    assert!(r.redraws > 0);
    assert!(r.warnings.iter().any(|w| w.contains("< 10")));
}

#[test]
fn unstable_fcfs_is_flagged() {
    let p = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, 2.0, 1.0, 1, 100.0).with_warmup(1.0);
    let run = simulate_aoi(&p, 1).unwrap();
    assert!(!run.warnings.is_empty());
}

#[test]
fn channel_level_and_decoupled_agree() {
    for (scheduler, discipline) in [
        (Scheduler::UniformRandom, Discipline::Fcfs),
        (Scheduler::UniformRandom, Discipline::Lcfs),
        (Scheduler::RoundRobin, Discipline::Fcfs),
    ] {
        let params = EquivalenceParams {
            discipline,
            lambda_t: 0.1,
            mu: 1.0,
            points: if scheduler == Scheduler::RoundRobin { 1 } else { 3 },
            horizon: 2e4,
            replications: 10,
        };
        let r = equivalence_check(scheduler, &params, &[21]).unwrap();
        assert_within_noise(&r);
        assert_eq!(r.comparisons.len(), 4);
    }
}

#[test]
fn round_robin_with_one_point_is_uniform() {
    let rr = AoiSimParams::new(Discipline::Fcfs, Scheduler::RoundRobin, 0.5, 1.0, 1, 2e4);
    let ur = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, 0.5, 1.0, 1, 2e4);
    let r = compare_setups("rr vs ur", &rr, &ur, &[3], 10).unwrap();
    assert_within_noise(&r);
}
