//! Adaptive Gauss–Kronrod quadrature and small numeric helpers shared by the
//! analytic checks.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// Kronrod 15-point nodes (positive half) and weights, with the embedded
// 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` by globally adaptive G7/K15 bisection until
/// the error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    const MAX_INTERVALS: usize = 20_000;
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Numerical(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {total}, error {err}"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, v0, e0) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        if !total.is_finite() {
            return Err(Error::Numerical("non-finite integrand".into()));
        }
    }
    // Re-sum to shed the drift of the running updates.
    Ok(pieces.iter().map(|p| p.2).sum())
}

/// Integrates over `[a, ∞)` via `t = a + u/(1-u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate(
        |u| {
            let w = 1.0 - u;
            let v = f(a + u / w) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// `(1 - e^{-y}) / y`, continuous at 0.
pub(crate) fn phi1(y: f64) -> f64 {
    if y.abs() < 1e-5 {
        1.0 - y / 2.0 + y * y / 6.0
    } else {
        -(-y).exp_m1() / y
    }
}

/// `(e^{-y} - 1 + y) / y²`, continuous at 0.
pub(crate) fn phi2(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        0.5 - y / 6.0 + y * y / 24.0 - y * y * y / 120.0
    } else {
        ((-y).exp_m1() + y) / (y * y)
    }
}

/// Relative gap test used for rate confluence: `|r1 - r2| <= tol·max(r1, r2)`.
pub fn rates_coincide(r1: f64, r2: f64, tol: f64) -> bool {
    (r1 - r2).abs() <= tol * r1.abs().max(r2.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_exponentials() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-13, 1e-13).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let w = integrate_to_infinity(|x| (-2.0 * x).exp(), 0.0, 1e-12, 1e-12).unwrap();
        assert!((w - 0.5).abs() < 1e-11);
    }

    #[test]
    fn handles_integrable_endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let v = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn phi_helpers_are_continuous() {
        for y in [-1e-3f64, -1e-5, 1e-9, 1e-5, 1e-3, 0.5] {
            let direct1 = -(-y).exp_m1() / y;
            assert!((phi1(y) - direct1).abs() < 1e-9, "phi1({y})");
        }
        for y in [-2e-3f64, 1e-3 * 0.999, 1e-3 * 1.001, 0.3] {
            let exact = ((-y).exp() - 1.0 + y) / (y * y);
            assert!((phi2(y) - exact).abs() < 1e-7, "phi2({y})");
        }
        assert_eq!(phi2(0.0), 0.5);
    }
}
