//! Adaptive Gauss–Kronrod quadrature and the two improper integrals
//! ∫₀^∞ s^{−α} e^{−ωs} ds and ∫₀^∞ s^{−α} (1+s)^{−1} ds behind the
//! fractional-power gain constants.
//!
//! Half-line integrals of the form ∫₀^∞ s^{−α} g(s) ds are split at s = 1.
//! On [0, 1] the substitution s = r^{1/(1−α)} absorbs the endpoint
//! singularity; on [1, ∞) the substitution s = r^{−1/α} maps the tail onto
//! [0, 1] with the bounded integrand s·g(s)/α, so slowly decaying tails
//! (small α) need no truncation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Hard cap on integrand evaluations for a single improper integral.
pub const EVALUATION_BUDGET: usize = 1_000_000;

const DEFAULT_REL_TOL: f64 = 1e-12;

// Cap on the abscissa so that s·g(s) is evaluated at its limit, not inf·0.
const LARGE_ABSCISSA: f64 = 1e300;

/// Outcome of a quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive G7–K15 integration of `f` over `[lo, hi]`.
///
/// Panels with the largest error estimate are bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol·|value|)` or `budget`
/// evaluations have been spent.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<QuadratureResult> {
    let first = kronrod15(&f, lo, hi);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::from([first]);

    loop {
        if !value.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if evaluations + 30 > budget {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be split further in floating point.
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                evaluations,
            });
        }
        let left = kronrod15(&f, worst.lo, mid);
        let right = kronrod15(&f, mid, worst.hi);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally to stop drift from the incremental updates.
        if evaluations % 3000 == 15 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// ∫₀^∞ s^{−α} g(s) ds for a bounded `g` that decays at least like 1/s.
pub fn integrate_power_weighted<G: Fn(f64) -> f64>(
    g: G,
    alpha: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    check_alpha(alpha)?;
    let budget = EVALUATION_BUDGET;

    // s = r^{1/(1−α)} on [0, 1]: s^{−α} ds = dr / (1−α).
    let exponent = 1.0 / (1.0 - alpha);
    let head = integrate_adaptive(
        |r: f64| g(r.powf(exponent)) / (1.0 - alpha),
        0.0,
        1.0,
        0.0,
        rel_tol,
        budget,
    )?;

    // s = r^{−1/α} on [1, ∞): s^{−α} ds = s dr / α, bounded when s·g(s) is.
    let inv = 1.0 / alpha;
    let tail = integrate_adaptive(
        |r: f64| {
            let s = r.powf(-inv).min(LARGE_ABSCISSA);
            s * g(s) / alpha
        },
        0.0,
        1.0,
        0.0,
        rel_tol,
        budget.saturating_sub(head.evaluations),
    )
    .map_err(|err| match err {
        Error::QuadratureFailure {
            estimate,
            error,
            evaluations,
        } => Error::QuadratureFailure {
            estimate: head.value + estimate,
            error: head.abs_error_estimate + error,
            evaluations: head.evaluations + evaluations,
        },
        other => other,
    })?;

    Ok(QuadratureResult {
        value: head.value + tail.value,
        abs_error_estimate: head.abs_error_estimate + tail.abs_error_estimate,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// ∫₀^∞ s^{−α} e^{−ωs} ds, which equals Γ(1−α)·ω^{α−1}.
pub fn quad_exp_tail(alpha: f64, omega: f64) -> Result<QuadratureResult> {
    check_alpha(alpha)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    integrate_power_weighted(|s| (-omega * s).exp(), alpha, DEFAULT_REL_TOL)
}

/// ∫₀^∞ s^{−α} (1+s)^{−1} ds, which equals π / sin(πα).
pub fn quad_cauchy_tail(alpha: f64) -> Result<QuadratureResult> {
    check_alpha(alpha)?;
    integrate_power_weighted(|s| 1.0 / (1.0 + s), alpha, DEFAULT_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma_fn;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kronrod_weights_sum_to_interval_length() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-14);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_polynomials_and_smooth_functions() {
        let r = integrate_adaptive(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 0.0, 1e-14, 10_000).unwrap();
        assert!(rel(r.value, 128.0 / 7.0 - 6.0) < 1e-14);
        assert_eq!(r.evaluations, 15);
        let r = integrate_adaptive(f64::sin, 0.0, PI, 0.0, 1e-13, 10_000).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let err = integrate_adaptive(|x: f64| x.powf(-0.999), 0.0, 1.0, 0.0, 1e-14, 200)
            .unwrap_err();
        match err {
            Error::QuadratureFailure { estimate, evaluations, .. } => {
                assert!(estimate > 0.0);
                assert!(evaluations <= 200);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exp_tail_examples() {
        let r = quad_exp_tail(0.5, 1.0).unwrap();
        assert!(rel(r.value, 1.772_453_850_9) < 1e-10);
        assert!(r.abs_error_estimate >= 0.0 && r.evaluations >= 1);

        let r = quad_exp_tail(0.5, 9.8647).unwrap();
        assert!(rel(r.value, PI.sqrt() / 9.8647_f64.sqrt()) < 1e-10);
        assert!((r.value - 0.564_331).abs() < 2e-6);

        let r = quad_exp_tail(0.25, 2.0).unwrap();
        let closed = gamma_fn(0.75).unwrap() * 2.0_f64.powf(-0.75);
        assert!(rel(r.value, closed) < 1e-10);
        assert!((r.value - 0.728_637_130_7).abs() < 1e-9);
    }

    #[test]
    fn cauchy_tail_examples() {
        assert!(rel(quad_cauchy_tail(0.5).unwrap().value, PI) < 1e-10);
        assert!(rel(quad_cauchy_tail(0.25).unwrap().value, 4.442_882_938_2) < 1e-10);
        assert!(rel(quad_cauchy_tail(0.75).unwrap().value, 4.442_882_938_2) < 1e-10);
    }

    #[test]
    fn extreme_exponents() {
        for &alpha in &[0.005, 0.05, 0.95, 0.995] {
            let c = quad_cauchy_tail(alpha).unwrap().value;
            assert!(rel(c, PI / (PI * alpha).sin()) < 1e-9, "alpha {alpha}: {c}");
            for &omega in &[0.1, 100.0] {
                let e = quad_exp_tail(alpha, omega).unwrap().value;
                let closed = gamma_fn(1.0 - alpha).unwrap() * omega.powf(alpha - 1.0);
                assert!(rel(e, closed) < 1e-9, "alpha {alpha} omega {omega}: {e} vs {closed}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(quad_exp_tail(0.0, 1.0).is_err());
        assert!(quad_exp_tail(1.0, 1.0).is_err());
        assert!(quad_exp_tail(0.5, 0.0).is_err());
        assert!(quad_cauchy_tail(1.2).is_err());
    }
}
