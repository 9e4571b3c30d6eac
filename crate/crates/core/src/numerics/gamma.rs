//! Gamma function via a Lanczos rational approximation (g = 7, nine
//! coefficients) with reflection below one half.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument accepted before Γ overflows `f64`.
pub const GAMMA_MAX_ARG: f64 = 170.0;

/// Γ(x) for 0 < x ≤ 170.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Domain(format!(
            "gamma overflows for x = {x} (limit {GAMMA_MAX_ARG})"
        )));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx)
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    lanczos(x)
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // t^(z+1/2) is split in two halves so that arguments near 170 do not overflow.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * series
}
