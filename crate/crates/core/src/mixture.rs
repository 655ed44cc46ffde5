//! Distribution functions of the form `F(x) = 1 + Σ c·x^k·e^{-r·x}`.
//!
//! Sums of independent exponential stages (hypoexponential laws, possibly
//! with repeated rates) and signed mixtures of such laws all have this form.
//! Partial fractions are taken on the product of stage transforms; stage
//! rates whose relative gap is at most [`CONFLUENCE_TOL`] are merged into a
//! single repeated pole.

use crate::error::{positive, Error, Result};
use crate::numerics::rates_coincide;

/// Two rates are treated as equal when `|r1 - r2| <= CONFLUENCE_TOL·max(r1, r2)`.
pub const CONFLUENCE_TOL: f64 = 1e-9;

/// One term `coefficient · x^degree · e^{-rate·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coefficient: f64,
    pub degree: u32,
    pub rate: f64,
}

/// A CDF `1 + Σ terms` on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpMixtureCdf {
    terms: Vec<ExpTerm>,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl ExpMixtureCdf {
    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// Exponential law with the given rate.
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::hypoexponential(&[rate])
    }

    /// Erlang law with `stages` stages of the given rate.
    pub fn erlang(stages: u32, rate: f64) -> Result<Self> {
        let rate = positive("rate", rate)?;
        let terms = (0..stages)
            .map(|m| ExpTerm {
                coefficient: -rate.powi(m as i32) / factorial(m),
                degree: m,
                rate,
            })
            .collect();
        Ok(Self { terms })
    }

    /// Law of a sum of independent exponential stages with the given rates.
    pub fn hypoexponential(rates: &[f64]) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidParameter {
                name: "rates",
                value: 0.0,
                reason: "need at least one stage",
            });
        }
        for &r in rates {
            positive("rate", r)?;
        }
        let poles = group_rates(rates);
        Ok(Self::from_poles(&poles))
    }

    /// `Σ weight_i · F_i` for weights summing to one (weights may be negative).
    pub fn combine(parts: &[(f64, &ExpMixtureCdf)]) -> Self {
        let mut terms: Vec<ExpTerm> = Vec::new();
        for (w, part) in parts {
            for t in &part.terms {
                terms.push(ExpTerm {
                    coefficient: w * t.coefficient,
                    ..*t
                });
            }
        }
        Self::normalized(terms)
    }

    fn normalized(mut terms: Vec<ExpTerm>) -> Self {
        terms.sort_by(|x, y| x.rate.total_cmp(&y.rate).then(x.degree.cmp(&y.degree)));
        let mut merged: Vec<ExpTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.degree == t.degree && last.rate == t.rate => {
                    last.coefficient += t.coefficient;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        Self { terms: merged }
    }

    /// Partial-fraction inversion of `Π (r/(s+r))^k` over grouped poles.
    fn from_poles(poles: &[(f64, u32)]) -> Self {
        let scale: f64 = poles.iter().map(|&(r, k)| r.powi(k as i32)).product();
        let mut terms = Vec::new();
        for (i, &(ri, ki)) in poles.iter().enumerate() {
            // Taylor coefficients of Π_{l≠i} (d_l + u)^{-k_l}, u = s + r_i.
            let order = ki as usize;
            let mut series = vec![0.0; order];
            series[0] = 1.0;
            for (l, &(rl, kl)) in poles.iter().enumerate() {
                if l == i {
                    continue;
                }
                let d = rl - ri;
                let factor: Vec<f64> = (0..order as u32)
                    .map(|n| {
                        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(kl + n - 1, n) * d.powi(-((kl + n) as i32))
                    })
                    .collect();
                let mut next = vec![0.0; order];
                for (p, &a) in series.iter().enumerate() {
                    for (q, &b) in factor.iter().enumerate().take(order - p) {
                        next[p + q] += a * b;
                    }
                }
                series = next;
            }
            // Density: Σ_j A_ij t^{j-1} e^{-r_i t} / (j-1)!, A_ij = scale·series[k_i - j].
            // CDF of each piece: (A_ij / r_i^j)·Erlang_j(t).
            for j in 1..=ki {
                let weight = scale * series[(ki - j) as usize] / ri.powi(j as i32);
                for m in 0..j {
                    terms.push(ExpTerm {
                        coefficient: -weight * ri.powi(m as i32) / factorial(m),
                        degree: m,
                        rate: ri,
                    });
                }
            }
        }
        Self::normalized(terms)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        1.0 + self
            .terms
            .iter()
            .map(|t| t.coefficient * x.powi(t.degree as i32) * (-t.rate * x).exp())
            .sum::<f64>()
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        -self
            .terms
            .iter()
            .map(|t| t.coefficient * x.powi(t.degree as i32) * (-t.rate * x).exp())
            .sum::<f64>()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|t| {
                let e = (-t.rate * x).exp();
                let k = t.degree as i32;
                let lead = if k == 0 { 0.0 } else { f64::from(t.degree) * x.powi(k - 1) };
                t.coefficient * (lead - t.rate * x.powi(k)) * e
            })
            .sum()
    }

    /// `∫ e^{-s x} dF(x) = 1 + s·Σ c·k!/(s+r)^{k+1}`.
    pub fn lst(&self, s: f64) -> f64 {
        1.0 + s
            * self
                .terms
                .iter()
                .map(|t| t.coefficient * factorial(t.degree) / (s + t.rate).powi(t.degree as i32 + 1))
                .sum::<f64>()
    }

    /// `∫ (1 - F)`.
    pub fn mean(&self) -> f64 {
        -self
            .terms
            .iter()
            .map(|t| t.coefficient * factorial(t.degree) / t.rate.powi(t.degree as i32 + 1))
            .sum::<f64>()
    }

    /// Smallest decay rate among the terms.
    pub fn slowest_rate(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.rate).reduce(f64::min)
    }
}

/// Groups rates into `(rate, multiplicity)` poles; rates within the
/// confluence tolerance of a group's first member join that group, which is
/// represented by the group mean.
pub fn group_rates(rates: &[f64]) -> Vec<(f64, u32)> {
    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups: Vec<(f64, f64, u32)> = Vec::new(); // (anchor, sum, count)
    for r in sorted {
        match groups.last_mut() {
            Some(g) if rates_coincide(g.0, r, CONFLUENCE_TOL) => {
                g.1 += r;
                g.2 += 1;
            }
            _ => groups.push((r, r, 1)),
        }
    }
    groups.into_iter().map(|(_, sum, n)| (sum / n as f64, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_erlang_match_textbook() {
        let e = ExpMixtureCdf::exponential(2.0).unwrap();
        assert!((e.cdf(0.7) - (1.0 - (-1.4f64).exp())).abs() < 1e-15);
        assert!((e.mean() - 0.5).abs() < 1e-15);
        let g = ExpMixtureCdf::erlang(2, 1.0).unwrap();
        assert!((g.cdf(1.0) - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-15);
        let repeated = ExpMixtureCdf::hypoexponential(&[1.0, 1.0]).unwrap();
        assert!((repeated.cdf(1.0) - g.cdf(1.0)).abs() < 1e-15);
    }

    #[test]
    fn three_distinct_stages_mean_and_lst() {
        let h = ExpMixtureCdf::hypoexponential(&[3.0, 1.0, 4.0 / 3.0]).unwrap();
        assert!((h.mean() - (1.0 / 3.0 + 1.0 + 0.75)).abs() < 1e-13);
        let expect = (3.0 / 4.0) * (1.0 / 2.0) * ((4.0 / 3.0) / (7.0 / 3.0));
        assert!((h.lst(1.0) - expect).abs() < 1e-14);
        assert_eq!(h.cdf(0.0), 0.0);
        assert!((h.cdf(1e6) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triple_pole_is_erlang_three() {
        let h = ExpMixtureCdf::hypoexponential(&[2.0, 2.0 * (1.0 + 1e-12), 2.0]).unwrap();
        let e3 = ExpMixtureCdf::erlang(3, 2.0).unwrap();
        for x in [0.1, 1.0, 3.0] {
            assert!((h.cdf(x) - e3.cdf(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn mixed_multiplicities_lst() {
        // D ~ exp(2) plus Erlang(2, 2) plus exp(5): pole of order 3 at 2.
        let h = ExpMixtureCdf::hypoexponential(&[2.0, 2.0, 2.0, 5.0]).unwrap();
        for s in [0.25, 1.0, 4.0] {
            let expect = (2.0f64 / (s + 2.0)).powi(3) * 5.0 / (s + 5.0);
            assert!((h.lst(s) - expect).abs() < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn group_rates_merges_within_tolerance() {
        let g = group_rates(&[1.0, 3.0, 1.0 + 1e-12, 2.0]);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].1, 2);
        let h = group_rates(&[1.0, 1.0 + 1e-6]);
        assert_eq!(h.len(), 2);
    }
}
