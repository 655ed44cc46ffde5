//! Distribution of the field estimation error.
//!
//! With `D = b·d_min` and `H = a·Δ`, the error at a probe is
//! `ξ = 1 - e^{-K}` for `K = D + H`, so `P{ξ ≤ z} = F_K(-ln(1-z))` and the
//! time/space average error is `ε̄ = E[ξ] = 1 - E[e^{-K}]`. All rates here are
//! dimensionless:
//!
//! | symbol   | value                 |
//! |----------|-----------------------|
//! | `r_D`    | `2·lambda_s / b`      |
//! | `r_λ`    | `lambda_t / a`        |
//! | `r_μ`    | `mu0 / a`             |
//! | `r_q`    | `(1 - rho0)·mu0 / a`  |

use serde::Serialize;

use crate::aoi::{hypo2_cdf, AoiLaw};
use crate::error::{non_negative, Error, Result};
use crate::mixture::{ExpMixtureCdf, CONFLUENCE_TOL};
use crate::model::{CorrelationParams, Discipline, Scheduler, SystemConfig};
use crate::numerics::{integrate_to_infinity, phi2, rates_coincide};
use crate::spatial::DistanceLaw;

/// Agreement required between independent evaluations of ε̄ before a summary
/// is flagged inconsistent.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// `F(x) = x / (x + 1)`.
pub fn f_ratio(x: f64) -> f64 {
    x / (x + 1.0)
}

/// Dimensionless rates of the combined law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub distance: f64,
    pub arrival: f64,
    pub service: f64,
    /// `(1 - rho0)·mu0 / a`; FCFS only.
    pub drain: Option<f64>,
}

/// How an ε̄ value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMethod {
    ProductForm,
    PartialFraction,
    LstAtOne,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub eps_bar: f64,
    pub method: ErrorMethod,
    pub discipline: Discipline,
    pub rates: Rates,
    /// Independent evaluations of the same quantity.
    pub cross_checks: Vec<(ErrorMethod, f64)>,
}

impl ErrorSummary {
    pub fn max_discrepancy(&self) -> f64 {
        self.cross_checks
            .iter()
            .map(|(_, v)| (v - self.eps_bar).abs())
            .fold(0.0, f64::max)
    }

    /// True when every cross-check agrees within [`CROSS_CHECK_TOL`].
    pub fn is_consistent(&self) -> bool {
        self.max_discrepancy() <= CROSS_CHECK_TOL
    }

    pub fn cross_check(&self, method: ErrorMethod) -> Option<f64> {
        self.cross_checks
            .iter()
            .find(|(m, _)| *m == method)
            .map(|&(_, v)| v)
    }
}

/// Coefficients of the error density
/// `f(z) = α(1-z)^{r_D-1} + β(1-z)^{r_λ-1} + γ(1-z)^{r_μ-1}
///        + ω·ln(1-z)(1-z)^{r_μ-1} + κ(1-z)^{r_q-1}` (FCFS).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdfCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega: f64,
    pub kappa: f64,
    pub rates: Rates,
}

impl PdfCoefficients {
    pub fn density(&self, z: f64) -> f64 {
        let r = self.rates;
        let u = 1.0 - z;
        let drain = r.drain.expect("FCFS coefficients");
        let log_u = u.ln();
        self.alpha * u.powf(r.distance - 1.0)
            + self.beta * u.powf(r.arrival - 1.0)
            + self.gamma * u.powf(r.service - 1.0)
            + self.omega * log_u * u.powf(r.service - 1.0)
            + self.kappa * u.powf(drain - 1.0)
    }

    /// Density of `K = -ln(1 - Z)` at `x`, i.e. `f(1 - e^{-x})·e^{-x}`;
    /// free of the endpoint singularities of [`Self::density`].
    pub fn k_density(&self, x: f64) -> f64 {
        let r = self.rates;
        let drain = r.drain.expect("FCFS coefficients");
        self.alpha * (-r.distance * x).exp()
            + self.beta * (-r.arrival * x).exp()
            + (self.gamma - self.omega * x) * (-r.service * x).exp()
            + self.kappa * (-drain * x).exp()
    }

    /// `∫₀¹ z·f(z) dz` term by term (Beta integrals).
    pub fn mean_error(&self) -> f64 {
        let r = self.rates;
        let drain = r.drain.expect("FCFS coefficients");
        let beta_int = |x: f64| 1.0 / (x * (x + 1.0));
        self.alpha * beta_int(r.distance)
            + self.beta * beta_int(r.arrival)
            + self.gamma * beta_int(r.service)
            + self.omega * (1.0 / (r.service + 1.0).powi(2) - 1.0 / r.service.powi(2))
            + self.kappa * beta_int(drain)
    }
}

/// Law of `K = D + a·Δ` for a validated configuration under uniformly random
/// scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedLaw {
    discipline: Discipline,
    rates: Rates,
    a: f64,
    distance: DistanceLaw,
    aoi: AoiLaw,
    rho0: f64,
}

impl CombinedLaw {
    pub fn new(config: &SystemConfig, params: &CorrelationParams) -> Result<Self> {
        if config.scheduler == Scheduler::RoundRobin {
            return Err(Error::Unsupported("error law under round-robin scheduling"));
        }
        let derived = config.validate()?;
        let a = params.a();
        let distance = DistanceLaw::new(config.lambda_s, params.b())?;
        let aoi = match config.discipline {
            Discipline::Fcfs => AoiLaw::fcfs_uniform(config.lambda_t, derived.mu0)?,
            Discipline::Lcfs => AoiLaw::lcfs_uniform(config.lambda_t, derived.mu0)?,
        };
        let rates = Rates {
            distance: distance.rate(),
            arrival: config.lambda_t / a,
            service: derived.mu0 / a,
            drain: match config.discipline {
                Discipline::Fcfs => Some((derived.mu0 - config.lambda_t) / a),
                Discipline::Lcfs => None,
            },
        };
        Ok(Self {
            discipline: config.discipline,
            rates,
            a,
            distance,
            aoi,
            rho0: derived.rho0,
        })
    }

    pub fn discipline(&self) -> Discipline {
        self.discipline
    }

    pub fn rates(&self) -> Rates {
        self.rates
    }

    pub fn aoi(&self) -> &AoiLaw {
        &self.aoi
    }

    /// `E[e^{-sK}] = L_D(s)·L_Δ(a·s)`.
    pub fn lst(&self, s: f64) -> f64 {
        self.distance.lst(s) * self.aoi.scaled_lst(self.a, s)
    }

    /// `F_K(x)`. FCFS uses the closed form built from two-stage
    /// hypoexponential CDFs; LCFS the three-stage hypoexponential law.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let x = non_negative("x", x)?;
        match self.discipline {
            Discipline::Fcfs => Ok(self.fcfs_cdf(x)),
            Discipline::Lcfs => Ok(self.mixture().cdf(x)),
        }
    }

    fn fcfs_cdf(&self, x: f64) -> f64 {
        let Rates {
            distance: rd,
            arrival: rl,
            service: rm,
            drain,
        } = self.rates;
        let rq = drain.expect("FCFS");
        let c = 1.0 / (1.0 - self.rho0);
        let h = |r1: f64, r2: f64| hypo2_cdf(r1, r2, x).expect("positive rates");
        // rλ·rD·∫₀ˣ e^{-rD(x-u)} u e^{-rμ u} du
        let delta = rd - rm;
        let tail = if rates_coincide(rd, rm, CONFLUENCE_TOL) {
            0.5 * x * x * (-rd * x).exp()
        } else if (delta * x).abs() <= 1.0 {
            x * x * (-rm * x).exp() * phi2(delta * x)
        } else {
            let e_d = -(-rd * x).exp_m1();
            let e_m = -(-rm * x).exp_m1();
            (-e_d + e_m) / (delta * delta) + x * (-rm * x).exp() / delta
        };
        h(rd, rq) + c * h(rd, rl) - c * h(rd, rm) + rl * rd * tail
    }

    /// The same law assembled as an exponential mixture from the AoI
    /// components (independent of the closed form used by [`Self::cdf`]).
    pub fn mixture(&self) -> ExpMixtureCdf {
        let rd = self.rates.distance;
        match self.discipline {
            Discipline::Lcfs => ExpMixtureCdf::hypoexponential(&[rd, self.rates.arrival, self.rates.service])
                .expect("positive rates"),
            Discipline::Fcfs => {
                let rho = self.rho0;
                let c = 1.0 / (1.0 - rho);
                let rq = self.rates.drain.expect("FCFS");
                let rl = self.rates.arrival;
                let rm = self.rates.service;
                let hypo = |rs: &[f64]| ExpMixtureCdf::hypoexponential(rs).expect("positive rates");
                let parts = [
                    (1.0, hypo(&[rd, rq])),
                    (c, hypo(&[rd, rl])),
                    (-(c - rho), hypo(&[rd, rm])),
                    (-rho, hypo(&[rd, rm, rm])),
                ];
                let refs: Vec<(f64, &ExpMixtureCdf)> = parts.iter().map(|(w, m)| (*w, m)).collect();
                ExpMixtureCdf::combine(&refs)
            }
        }
    }

    /// `P{ξ ≤ z} = F_K(-ln(1-z))`.
    pub fn error_cdf(&self, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Domain {
                name: "z",
                value: z,
                domain: "[0, 1]",
            });
        }
        if z == 1.0 {
            return Ok(1.0);
        }
        self.cdf(-(-z).ln_1p())
    }

    /// Closed-form density coefficients (FCFS, pairwise distinct rates).
    pub fn pdf_coefficients(&self) -> Result<PdfCoefficients> {
        if self.discipline != Discipline::Fcfs {
            return Err(Error::Unsupported("density coefficients for LCFS"));
        }
        let rates = self.rates;
        let (rd, rl, rm) = (rates.distance, rates.arrival, rates.service);
        let rq = rates.drain.expect("FCFS");
        let all = [rd, rl, rm, rq];
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if rates_coincide(all[i], all[j], CONFLUENCE_TOL) {
                    return Err(Error::ConfluentRates { rates: all.to_vec() });
                }
            }
        }
        let c = 1.0 / (1.0 - self.rho0);
        let pair = |r: f64| r * rd / (r - rd);
        let lead = rl * rd * rd / (rm - rd).powi(2);
        Ok(PdfCoefficients {
            alpha: pair(rq) + c * (pair(rl) - pair(rm)) - lead,
            beta: -c * pair(rl),
            gamma: c * pair(rm) + lead,
            omega: -rl * rd * rm / (rm - rd),
            kappa: -pair(rq),
            rates,
        })
    }

    /// `1 - L_K(1)`.
    pub fn eps_lst_at_one(&self) -> f64 {
        1.0 - self.lst(1.0)
    }

    /// `∫₀^∞ e^{-x}(1 - F_K(x)) dx`, by adaptive quadrature of [`Self::cdf`].
    pub fn eps_by_quadrature(&self) -> Result<f64> {
        integrate_to_infinity(
            |x| (-x).exp() * (1.0 - self.cdf(x).expect("x >= 0")),
            0.0,
            1e-13,
            1e-11,
        )
    }

    fn eps_product_form(&self) -> f64 {
        let r = self.rates;
        match self.discipline {
            Discipline::Fcfs => {
                let rq = r.drain.expect("FCFS");
                1.0 - f_ratio(r.distance)
                    * f_ratio(r.arrival)
                    * f_ratio(rq)
                    * (1.0 + r.arrival / (r.service + 1.0).powi(2))
            }
            Discipline::Lcfs => 1.0 - f_ratio(r.distance) * f_ratio(r.arrival) * f_ratio(r.service),
        }
    }

    fn lcfs_partial_fraction(&self) -> Option<f64> {
        let r = self.rates;
        let (rd, rl, rm) = (r.distance, r.arrival, r.service);
        if rates_coincide(rd, rl, CONFLUENCE_TOL)
            || rates_coincide(rd, rm, CONFLUENCE_TOL)
            || rates_coincide(rl, rm, CONFLUENCE_TOL)
        {
            return None;
        }
        let eta = rl * rm / ((rd - rl) * (rd - rm));
        let nu = rd * rm / ((rl - rd) * (rl - rm));
        let upsilon = rd * rl / ((rm - rd) * (rm - rl));
        Some(eta / (rd + 1.0) + nu / (rl + 1.0) + upsilon / (rm + 1.0))
    }

    /// ε̄ with the discipline's primary closed form and its cross-checks.
    pub fn summary(&self) -> ErrorSummary {
        let lst = self.eps_lst_at_one();
        let product = self.eps_product_form();
        let (eps_bar, method, mut cross_checks) = match self.discipline {
            Discipline::Fcfs => {
                let mut checks = vec![(ErrorMethod::LstAtOne, lst)];
                if let Ok(coef) = self.pdf_coefficients() {
                    checks.push((ErrorMethod::PartialFraction, coef.mean_error()));
                }
                (product, ErrorMethod::ProductForm, checks)
            }
            Discipline::Lcfs => match self.lcfs_partial_fraction() {
                Some(pf) => (
                    pf,
                    ErrorMethod::PartialFraction,
                    vec![(ErrorMethod::ProductForm, product), (ErrorMethod::LstAtOne, lst)],
                ),
                None => (lst, ErrorMethod::LstAtOne, vec![(ErrorMethod::ProductForm, product)]),
            },
        };
        cross_checks.retain(|(_, v)| v.is_finite());
        ErrorSummary {
            eps_bar,
            method,
            discipline: self.discipline,
            rates: self.rates,
            cross_checks,
        }
    }
}

pub fn combined_cdf(config: &SystemConfig, params: &CorrelationParams, x: f64) -> Result<f64> {
    CombinedLaw::new(config, params)?.cdf(x)
}

pub fn error_cdf_z(config: &SystemConfig, params: &CorrelationParams, z: f64) -> Result<f64> {
    CombinedLaw::new(config, params)?.error_cdf(z)
}

pub fn pdf_coefficients(config: &SystemConfig, params: &CorrelationParams) -> Result<PdfCoefficients> {
    CombinedLaw::new(&config.with_discipline(Discipline::Fcfs), params)?.pdf_coefficients()
}

/// Average error under FCFS (product form, cross-checked against `1 - L_K(1)`
/// and, for distinct rates, the density-coefficient form).
pub fn eps_fcfs(config: &SystemConfig, params: &CorrelationParams) -> Result<ErrorSummary> {
    Ok(CombinedLaw::new(&config.with_discipline(Discipline::Fcfs), params)?.summary())
}

/// Average error under LCFS (partial fractions when the three rates are
/// distinct, otherwise `1 - L_K(1)`), cross-checked against the product form.
pub fn eps_lcfs(config: &SystemConfig, params: &CorrelationParams) -> Result<ErrorSummary> {
    Ok(CombinedLaw::new(&config.with_discipline(Discipline::Lcfs), params)?.summary())
}

/// `ε̄ = 1 - L_D(1)·L_Δ(a)` for the configured discipline.
pub fn eps_via_lst_at_one(config: &SystemConfig, params: &CorrelationParams) -> Result<ErrorSummary> {
    let law = CombinedLaw::new(config, params)?;
    let mut summary = law.summary();
    let primary = (summary.method, summary.eps_bar);
    summary.cross_checks.retain(|(m, _)| *m != ErrorMethod::LstAtOne);
    summary.cross_checks.insert(0, primary);
    summary.eps_bar = law.eps_lst_at_one();
    summary.method = ErrorMethod::LstAtOne;
    Ok(summary)
}

/// Average error for the configured discipline.
pub fn eps(config: &SystemConfig, params: &CorrelationParams) -> Result<ErrorSummary> {
    Ok(CombinedLaw::new(config, params)?.summary())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> CorrelationParams {
        CorrelationParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn fcfs_reference_values() {
        let s = eps_fcfs(&SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), &unit()).unwrap();
        assert!((s.eps_bar - 17.0 / 25.0).abs() < 1e-15);
        assert_eq!(s.method, ErrorMethod::ProductForm);
        assert!((s.cross_check(ErrorMethod::LstAtOne).unwrap() - 0.68).abs() < 1e-12);
        // rates 2, 2, 4, 2 repeat: no coefficient form
        assert!(s.cross_check(ErrorMethod::PartialFraction).is_none());

        let s = eps_fcfs(&SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs), &unit()).unwrap();
        assert!((s.eps_bar - 3111.0 / 5103.0).abs() < 1e-15);
        assert!(s.is_consistent());
    }

    #[test]
    fn lcfs_reference_values() {
        let s = eps_lcfs(&SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs), &unit()).unwrap();
        assert!((s.eps_bar - 11.0 / 14.0).abs() < 1e-14);
        assert_eq!(s.method, ErrorMethod::PartialFraction);
        assert!(s.is_consistent());
        let v = eps_via_lst_at_one(&SystemConfig::new(1.5, 1.0, 2.0, Discipline::Lcfs), &unit()).unwrap();
        assert!((v.eps_bar - 11.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn lcfs_limits() {
        let big = eps_lcfs(&SystemConfig::new(1.0, 1e9, 2.0, Discipline::Lcfs), &unit()).unwrap();
        assert!((big.eps_bar - 5.0 / 9.0).abs() < 1e-8);
        let small = eps_lcfs(&SystemConfig::new(1.0, 1e-12, 2.0, Discipline::Lcfs), &unit()).unwrap();
        assert!((small.eps_bar - 1.0).abs() < 1e-11);
    }

    #[test]
    fn lcfs_confluent_falls_back_to_transform() {
        // rD = 2, rλ = 2, rμ = 2
        let s = eps_lcfs(&SystemConfig::new(1.0, 2.0, 2.0, Discipline::Lcfs), &unit()).unwrap();
        assert_eq!(s.method, ErrorMethod::LstAtOne);
        assert!((s.eps_bar - (1.0 - (2.0f64 / 3.0).powi(3))).abs() < 1e-15);
    }

    #[test]
    fn fcfs_small_arrival_rate_gives_unit_error() {
        let s = eps_fcfs(&SystemConfig::new(1.0, 1e-12, 4.0, Discipline::Fcfs), &unit()).unwrap();
        assert!(s.eps_bar > 1.0 - 1e-11);
    }

    #[test]
    fn degenerate_perfect_correlation() {
        let p = CorrelationParams::new(1e-12, 1e-12).unwrap();
        let s = eps_via_lst_at_one(&SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), &p).unwrap();
        assert!(s.eps_bar < 1e-9);
    }

    #[test]
    fn confluent_coefficients_are_rejected() {
        let err = pdf_coefficients(&SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs), &unit()).unwrap_err();
        assert!(matches!(err, Error::ConfluentRates { .. }));
    }

    #[test]
    fn round_robin_is_unsupported() {
        let c = SystemConfig::new(1.0, 2.0, 4.0, Discipline::Fcfs).with_scheduler(Scheduler::RoundRobin);
        assert!(matches!(eps(&c, &unit()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unstable_fcfs_is_rejected() {
        let c = SystemConfig::new(1.0, 2.0, 1.0, Discipline::Fcfs);
        assert!(matches!(eps_fcfs(&c, &unit()), Err(Error::Unstable { .. })));
        assert!(eps_lcfs(&c, &unit()).is_ok());
    }

    #[test]
    fn error_cdf_endpoints() {
        let c = SystemConfig::new(1.0, 2.0, 8.0, Discipline::Fcfs);
        assert_eq!(error_cdf_z(&c, &unit(), 0.0).unwrap(), 0.0);
        assert_eq!(error_cdf_z(&c, &unit(), 1.0).unwrap(), 1.0);
        assert!(error_cdf_z(&c, &unit(), 1.0 - 1e-15).unwrap() > 1.0 - 1e-9);
        let half = error_cdf_z(&c, &unit(), 0.5).unwrap();
        let direct = combined_cdf(&c, &unit(), 2f64.ln()).unwrap();
        assert!((half - direct).abs() < 1e-15);
        assert!(error_cdf_z(&c, &unit(), 1.5).is_err());
    }
}
