use fieldaoi::aoi::{fcfs_ur_cdf, lcfs_ur_cdf};
use fieldaoi::error_law::{
    combined_cdf, eps, eps_fcfs, eps_lcfs, eps_via_lst_at_one, error_cdf_z, pdf_coefficients, CombinedLaw,
    ErrorMethod,
};
use fieldaoi::numerics::integrate;
use fieldaoi::{CorrelationParams, Discipline, Error, Scheduler, SystemConfig};
use proptest::prelude::*;

fn unit() -> CorrelationParams {
    CorrelationParams::new(1.0, 1.0).unwrap()
}

/// `P(D + aΔ <= x) = ∫₀ˣ r_D e^{-r_D y} F_Δ((x - y)/a) dy`.
fn convolution(config: &SystemConfig, p: &CorrelationParams, x: f64) -> f64 {
    let rd = 2.0 * config.lambda_s / p.b();
    let mu0 = config.mu_bar / config.lambda_s;
    let f_age = |t: f64| match config.discipline {
        Discipline::Fcfs => fcfs_ur_cdf(config.lambda_t, mu0, t).unwrap(),
        Discipline::Lcfs => lcfs_ur_cdf(config.lambda_t, mu0, t).unwrap(),
    };
    integrate(|y| rd * (-rd * y).exp() * f_age((x - y) / p.a()), 0.0, x, 1e-14, 1e-12).unwrap()
}

#[test]
fn combined_cdf_matches_convolution() {
    let cases = [
        (SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs), unit()),
        (SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), unit()),
        (SystemConfig::new(0.7, 0.3, 2.0, Discipline::Fcfs), CorrelationParams::new(0.4, 2.5).unwrap()),
        (SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs), unit()),
        (SystemConfig::new(1.5, 1.0, 3.0, Discipline::Lcfs), CorrelationParams::new(1.5, 2.0).unwrap()),
    ];
    for (c, p) in cases {
        for x in [0.1, 0.5, 1.0, 3.0, 8.0] {
            let got = combined_cdf(&c, &p, x).unwrap();
            let oracle = convolution(&c, &p, x);
            assert!((got - oracle).abs() < 1e-9, "{c:?} x={x}: {got} vs {oracle}");
        }
    }
}

#[test]
fn closed_form_and_mixture_routes_agree() {
    for c in [
        SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs),
        SystemConfig::new(0.3, 1.7, 5.0, Discipline::Fcfs),
        SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs),
    ] {
        let law = CombinedLaw::new(&c, &unit()).unwrap();
        let mix = law.mixture();
        for x in [0.0, 0.2, 1.0, 2.5, 10.0, 40.0] {
            assert!((law.cdf(x).unwrap() - mix.cdf(x)).abs() < 1e-12, "x={x}");
        }
        assert!((mix.lst(1.0) - law.lst(1.0)).abs() < 1e-13);
    }
}

#[test]
fn cdf_endpoints() {
    let c = SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs);
    assert_eq!(combined_cdf(&c, &unit(), 0.0).unwrap(), 0.0);
    assert_eq!(error_cdf_z(&c, &unit(), 0.0).unwrap(), 0.0);
    assert!((error_cdf_z(&c, &unit(), 1.0 - 1e-15).unwrap() - 1.0).abs() < 1e-6);
    let half = error_cdf_z(&c, &unit(), 0.5).unwrap();
    assert!((half - combined_cdf(&c, &unit(), std::f64::consts::LN_2).unwrap()).abs() < 1e-15);
    // r_D = 3, r_λ = 1, r_μ = 4/3
    let l = SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs);
    assert!((combined_cdf(&l, &unit(), 1e6).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn reference_values() {
    let fcfs = eps_fcfs(&SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), &unit()).unwrap();
    assert!((fcfs.eps_bar - 17.0 / 25.0).abs() < 1e-15);
    let fcfs8 = eps_fcfs(&SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs), &unit()).unwrap();
    assert!((fcfs8.eps_bar - 3111.0 / 5103.0).abs() < 1e-15);
    let lcfs = eps_lcfs(&SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs), &unit()).unwrap();
    assert!((lcfs.eps_bar - 11.0 / 14.0).abs() < 1e-15);
    assert_eq!(lcfs.method, ErrorMethod::PartialFraction);
    let via = eps_via_lst_at_one(&SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), &unit()).unwrap();
    assert!((via.eps_bar - 0.68).abs() < 1e-12);
}

#[test]
fn quadrature_of_the_cdf_reproduces_eps() {
    for c in [
        SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs),
        SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs),
        SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs),
    ] {
        let law = CombinedLaw::new(&c, &unit()).unwrap();
        let q = law.eps_by_quadrature().unwrap();
        assert!((q - law.summary().eps_bar).abs() < 1e-10);
    }
}

#[test]
fn pdf_coefficients_normalize() {
    // Distinct rates: r_D = 2, r_λ = 3, r_μ = 8, r_q = 5.
    let c = SystemConfig::new(1.0, 3.0, 8.0, Discipline::Fcfs);
    let k = pdf_coefficients(&c, &unit()).unwrap();
    let mass = integrate(|z| k.density(z), 0.0, 1.0, 1e-12, 1e-12).unwrap();
    let mean = integrate(|z| z * k.density(z), 0.0, 1.0, 1e-12, 1e-12).unwrap();
    let e = eps_fcfs(&c, &unit()).unwrap().eps_bar;
    assert!((mass - 1.0).abs() < 1e-6);
    assert!((mean - e).abs() < 1e-6);
    assert!((k.mean_error() - e).abs() < 1e-12);
    // The density is the derivative of the error CDF.
    let h = 1e-5;
    for z in [0.2, 0.5, 0.8] {
        let num = (error_cdf_z(&c, &unit(), z + h).unwrap() - error_cdf_z(&c, &unit(), z - h).unwrap()) / (2.0 * h);
        assert!((num - k.density(z)).abs() < 1e-6, "z={z}");
    }
}

#[test]
fn confluent_rates_are_reported() {
    // r_D = 2, r_λ = 2, r_μ = 4, r_q = 2
    let c = SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs);
    assert!(matches!(pdf_coefficients(&c, &unit()), Err(Error::ConfluentRates { .. })));
    // a = b = 1, λs = 1, λt = 2, μ̄ = 8 repeats r_D = r_λ = 2.
    let c8 = SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs);
    assert!(matches!(pdf_coefficients(&c8, &unit()), Err(Error::ConfluentRates { .. })));
}

#[test]
fn limits() {
    let tiny = eps_fcfs(&SystemConfig::new(1.0, 1e-9, 4.0, Discipline::Fcfs), &unit()).unwrap();
    assert!(tiny.eps_bar > 1.0 - 1e-8);
    let fast = eps_lcfs(&SystemConfig::new(1.0, 1e12, 2.0, Discipline::Lcfs), &unit()).unwrap();
    assert!((fast.eps_bar - 5.0 / 9.0).abs() < 1e-9);
    let slow = eps_lcfs(&SystemConfig::new(1.0, 1e-12, 2.0, Discipline::Lcfs), &unit()).unwrap();
    assert!(slow.eps_bar > 1.0 - 1e-11);
    let perfect = CorrelationParams::new(1e-12, 1e-12).unwrap();
    let e = eps_via_lst_at_one(&SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), &perfect).unwrap();
    assert!(e.eps_bar < 1e-10);
}

#[test]
fn unsupported_and_unstable() {
    let rr = SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs).with_scheduler(Scheduler::RoundRobin);
    assert!(matches!(eps(&rr, &unit()), Err(Error::Unsupported(_))));
    let unstable = SystemConfig::new(2.0, 2.0, 4.0, Discipline::Fcfs);
    assert!(matches!(eps(&unstable, &unit()), Err(Error::Unstable { .. })));
}

proptest! {
    #[test]
    fn eps_is_a_proper_fraction(
        a in 0.01f64..100.0, b in 0.01f64..100.0, ls in 0.01f64..100.0, lt in 0.01f64..100.0, rho in 0.01f64..0.99
    ) {
        let p = CorrelationParams::new(a, b).unwrap();
        for d in [Discipline::Fcfs, Discipline::Lcfs] {
            let s = eps(&SystemConfig::new(ls, lt, ls * lt / rho, d), &p).unwrap();
            prop_assert!(s.eps_bar > 0.0 && s.eps_bar < 1.0);
            prop_assert!(s.is_consistent(), "{:?}", s);
        }
    }

    #[test]
    fn lcfs_error_falls_with_arrival_rate(ls in 0.1f64..10.0, lt in 0.1f64..10.0, f in 1.01f64..10.0, mub in 0.1f64..10.0) {
        let p = unit();
        let e1 = eps_lcfs(&SystemConfig::new(ls, lt, mub, Discipline::Lcfs), &p).unwrap().eps_bar;
        let e2 = eps_lcfs(&SystemConfig::new(ls, lt * f, mub, Discipline::Lcfs), &p).unwrap().eps_bar;
        prop_assert!(e2 <= e1 + 1e-15);
    }

    #[test]
    fn combined_cdf_is_monotone(ls in 0.1f64..10.0, lt in 0.1f64..10.0, rho in 0.05f64..0.95, x in 0.0f64..20.0, dx in 0.0f64..5.0) {
        let c = SystemConfig::new(ls, lt, ls * lt / rho, Discipline::Fcfs);
        let (u, v) = (combined_cdf(&c, &unit(), x).unwrap(), combined_cdf(&c, &unit(), x + dx).unwrap());
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&u) && v + 1e-12 >= u);
    }
}
