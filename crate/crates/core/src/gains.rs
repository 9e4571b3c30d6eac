//! Spectral constants of the approximating systems and the ISS gain
//! functions assembled from them.
//!
//! For a Hurwitz system with semigroup type (M, ω), resolvent constant D,
//! fractional exponent α and sector angle θ:
//!
//! ```text
//! K₁ = ωM/Γ(1−α) ∫₀^∞ s^{−α} e^{−ωs} ds            (= M ω^α)
//! K₂ = D/(Γ(1−α) π |cos θ|) ∫₀^∞ s^{−α}/(1+s) ds   (= D/(Γ(1−α)|cos θ| sin πα))
//! κ  = K₁/ω + K₂ ω^{−α} Γ(α)
//! β(s, t) = μ_p μ_e M e^{−ωt} s
//! γ(s)    = μ_e κ ‖(−A)^{−1+α} B‖ s
//! ```

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fattorini::{DiagnosticReport, PathSpec, Verdict};
use crate::numerics::{
    expm_taylor, gamma_fn, modal_coefficients_sparse, quad_cauchy_tail, quad_exp_tail,
    weighted_op_norm, InputNorm,
};
use crate::systems::ClosedControlSystem;

/// Relative agreement required between quadrature and closed forms.
const CLOSED_FORM_TOLERANCE: f64 = 1e-8;

/// Default sector angle: just below π, where |cos θ| is effectively one.
pub const DEFAULT_THETA: f64 = PI * (1.0 - 1e-9);

/// ‖S(t)‖ ≤ m·e^{−omega·t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub m: f64,
    pub omega: f64,
}

/// ‖R(λ, A)‖ ≤ d/(λ+1) on the sampled ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBound {
    pub d: f64,
    pub sector_angle: f64,
    pub lambda_max_used: f64,
}

/// The constants K₁, K₂ and κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KConstants {
    pub k1: f64,
    pub k2: f64,
    pub kappa: f64,
}

/// Linear ISS gains β(s,t) = m e^{−ωt} s and γ(s) = slope·s.
pub trait IssGains {
    fn beta(&self, s: f64, t: f64) -> f64;
    fn gamma(&self, s: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGains {
    pub beta_m: f64,
    pub beta_omega: f64,
    pub gamma_slope: f64,
}

impl IssGains for LinearGains {
    fn beta(&self, s: f64, t: f64) -> f64 {
        self.beta_m * (-self.beta_omega * t).exp() * s
    }

    fn gamma(&self, s: f64) -> f64 {
        self.gamma_slope * s
    }
}

/// Everything needed to state and re-derive the gain functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainBundle {
    pub alpha: f64,
    pub theta: f64,
    pub growth: GrowthBound,
    pub sector: SectorBound,
    pub k1: f64,
    pub k2: f64,
    pub kappa: f64,
    pub frac_norm_limit: f64,
    pub mu_p: f64,
    pub mu_e: f64,
    pub beta_m: f64,
    pub beta_omega: f64,
    pub gamma_slope: f64,
}

impl GainBundle {
    pub fn linear(&self) -> LinearGains {
        LinearGains {
            beta_m: self.beta_m,
            beta_omega: self.beta_omega,
            gamma_slope: self.gamma_slope,
        }
    }

    /// Largest relative deviation between the stored constants and a fresh
    /// evaluation of their defining formulas.
    pub fn recompute_deviation(&self) -> Result<f64> {
        let k = k_constants(self.alpha, self.theta, &self.growth, &self.sector)?;
        let gamma_slope = self.mu_e * self.kappa * self.frac_norm_limit;
        let beta_m = self.mu_p * self.mu_e * self.growth.m;
        let pairs = [
            (k.k1, self.k1),
            (k.k2, self.k2),
            (k.kappa, self.kappa),
            (gamma_slope, self.gamma_slope),
            (beta_m, self.beta_m),
            (self.growth.omega, self.beta_omega),
        ];
        Ok(pairs
            .iter()
            .map(|&(fresh, stored)| relative_gap(fresh, stored))
            .fold(0.0, f64::max))
    }
}

impl IssGains for GainBundle {
    fn beta(&self, s: f64, t: f64) -> f64 {
        self.linear().beta(s, t)
    }

    fn gamma(&self, s: f64) -> f64 {
        self.linear().gamma(s)
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn largest_eigenvalue(sys: &ClosedControlSystem) -> Result<f64> {
    let top = *sys
        .a_matrix
        .eigenvalues()?
        .last()
        .expect("systems have at least one state");
    if top >= 0.0 {
        return Err(Error::NotHurwitz { max_eigenvalue: top });
    }
    Ok(top)
}

/// Type (1, ω) of the semigroup of a symmetric Hurwitz system, ω being the
/// smallest eigenvalue of −A.
pub fn growth_bound(sys: &ClosedControlSystem) -> Result<GrowthBound> {
    let top = largest_eigenvalue(sys)?;
    Ok(GrowthBound { m: 1.0, omega: -top })
}

/// Growth bound of a general dense generator.
///
/// Symmetric input takes the spectral route. Otherwise ω is estimated from
/// the decay of ‖e^{At}‖₂ under repeated doubling of t, and m is the
/// supremum of ‖e^{At}‖₂ e^{ωt} over 200 log-spaced t in [10⁻⁴, 10/ω].
pub fn growth_bound_dense(a: &DMatrix<f64>) -> Result<GrowthBound> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let asym = (a - a.transpose()).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if asym <= 1e-14 * scale {
        let top = *nalgebra::SymmetricEigen::new(a.clone())
            .eigenvalues
            .iter()
            .max_by(|x, y| x.total_cmp(y))
            .expect("nonempty");
        if top >= 0.0 {
            return Err(Error::NotHurwitz { max_eigenvalue: top });
        }
        return Ok(GrowthBound { m: 1.0, omega: -top });
    }

    let spectral_norm = |m: &DMatrix<f64>| m.singular_values().max();
    let t0 = 1.0 / scale.max(f64::MIN_POSITIVE);
    let mut unit = expm_taylor(&(a * t0))?;
    // ln ‖e^{A t0 2^k}‖ tracked through normalized squares.
    let mut log_norm = spectral_norm(&unit).ln();
    unit /= spectral_norm(&unit);
    let mut t = t0;
    let mut omega = f64::NAN;
    for _ in 0..80 {
        let squared = &unit * &unit;
        let next_log = spectral_norm(&squared).ln() + 2.0 * log_norm;
        let estimate = -(next_log - log_norm) / t;
        let settled = (estimate - omega).abs() <= 1e-9 * estimate.abs();
        omega = estimate;
        log_norm = next_log;
        unit = &squared / spectral_norm(&squared);
        t *= 2.0;
        if settled {
            break;
        }
    }
    if !(omega > 0.0) {
        return Err(Error::NotHurwitz { max_eigenvalue: -omega });
    }
    let t_grid = PathSpec::log_spaced(1e-4, 10.0 / omega, 200)?;
    let mut m: f64 = 1.0;
    for &t in t_grid.lambdas() {
        let e = expm_taylor(&(a * t))?;
        m = m.max(spectral_norm(&e) * (omega * t).exp());
    }
    Ok(GrowthBound { m, omega })
}

/// max over the grid of (λ+1)/(λ+μ_min) = (λ+1)‖R(λ, A)‖ for symmetric
/// negative-definite A.
pub fn sector_constant(mu_min: f64, path: &PathSpec) -> Result<SectorBound> {
    let lambdas = path.lambdas();
    if lambdas.is_empty() {
        return Err(Error::InsufficientData("empty lambda path".into()));
    }
    let d = lambdas
        .iter()
        .map(|&l| (l + 1.0) / (l + mu_min))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SectorBound {
        d,
        sector_angle: 0.0,
        lambda_max_used: path.lambda_max,
    })
}

pub fn sector_bound(sys: &ClosedControlSystem, path: &PathSpec) -> Result<SectorBound> {
    if path.lambdas().is_empty() {
        return Err(Error::InsufficientData("empty lambda path".into()));
    }
    let top = largest_eigenvalue(sys)?;
    sector_constant(-top, path)
}

/// ‖(−A)^{−1+α} B‖ from U into the weighted state space.
///
/// Only the eigenvector rows where B is nonzero are needed, because the
/// Euclidean norm is invariant under the orthogonal change to eigenvector
/// coordinates.
pub fn frac_control_norm(sys: &ClosedControlSystem, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let support = sys.input_support();
    if support.is_empty() {
        return Ok(0.0);
    }
    let eig = sys.a_matrix.eigen_rows(&support)?;
    let top = *eig.eigenvalues.last().expect("nonempty spectrum");
    if top >= 0.0 {
        return Err(Error::NotHurwitz { max_eigenvalue: top });
    }
    let b_rows = DMatrix::from_fn(support.len(), sys.input_dim(), |r, c| {
        sys.b_matrix[(support[r], c)]
    });
    let exponent = alpha - 1.0;
    let modal = modal_coefficients_sparse(&eig, |lam| (-lam).powf(exponent), &b_rows)?;
    weighted_op_norm(&modal, sys.space.row_weight(), sys.space.input_norm)
}

/// ‖(−A)^{−1/2} B‖ through the Gram form
/// ‖(−A)^{−1/2} B u‖² = w²·⟨Bu, (−A)^{−1} B u⟩, using tridiagonal solves
/// instead of any eigendecomposition.
pub fn frac_control_norm_gram(sys: &ClosedControlSystem) -> Result<f64> {
    let cols = sys.input_dim();
    let mut solved = Vec::with_capacity(cols);
    for j in 0..cols {
        let bj: Vec<f64> = sys.b_matrix.column(j).iter().copied().collect();
        // A y = B_j, so (−A)^{−1} B_j = −y.
        let y = sys.a_matrix.solve(&bj)?;
        solved.push(y.into_iter().map(|v| -v).collect::<Vec<f64>>());
    }
    let gram = DMatrix::from_fn(cols, cols, |i, j| {
        sys.b_matrix
            .column(i)
            .iter()
            .zip(&solved[j])
            .map(|(b, y)| b * y)
            .sum::<f64>()
    });
    let gram = (&gram + gram.transpose()) * 0.5;
    let quad_max = match sys.space.input_norm {
        InputNorm::Euclidean => nalgebra::SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
        InputNorm::Max => {
            let mut best = f64::NEG_INFINITY;
            for mask in 0u32..(1 << cols) {
                let u: Vec<f64> = (0..cols)
                    .map(|j| if mask & (1 << j) == 0 { 1.0 } else { -1.0 })
                    .collect();
                let q: f64 = (0..cols)
                    .flat_map(|i| (0..cols).map(move |j| (i, j)))
                    .map(|(i, j)| u[i] * gram[(i, j)] * u[j])
                    .sum();
                best = best.max(q);
            }
            best
        }
    };
    Ok(sys.space.row_weight() * quad_max.max(0.0).sqrt())
}

pub fn k_constants(
    alpha: f64,
    theta: f64,
    gb: &GrowthBound,
    sb: &SectorBound,
) -> Result<KConstants> {
    check_alpha(alpha)?;
    if !(theta > PI / 2.0 && theta < PI) {
        return Err(Error::Domain(format!(
            "theta must lie in (pi/2, pi), got {theta}"
        )));
    }
    let cos_theta = theta.cos().abs();
    if cos_theta < 1e-12 {
        return Err(Error::Domain(format!(
            "|cos theta| = {cos_theta:e} would divide by zero"
        )));
    }
    if !(gb.omega > 0.0) {
        return Err(Error::Domain(format!(
            "decay rate must be positive, got {}",
            gb.omega
        )));
    }
    let gamma_1ma = gamma_fn(1.0 - alpha)?;
    let omega = gb.omega;

    let exp_tail = quad_exp_tail(alpha, omega)?.value;
    let k1 = omega * gb.m / gamma_1ma * exp_tail;
    let k1_closed = gb.m * omega.powf(alpha);
    if relative_gap(k1, k1_closed) > CLOSED_FORM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "K1 quadrature {k1} disagrees with closed form {k1_closed}"
        )));
    }

    let cauchy_tail = quad_cauchy_tail(alpha)?.value;
    let k2 = sb.d / (gamma_1ma * PI * cos_theta) * cauchy_tail;
    let k2_closed = sb.d / (gamma_1ma * cos_theta * (PI * alpha).sin());
    if relative_gap(k2, k2_closed) > CLOSED_FORM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "K2 quadrature {k2} disagrees with closed form {k2_closed}"
        )));
    }

    let kappa = k1 / omega + k2 * omega.powf(-alpha) * gamma_fn(alpha)?;
    Ok(KConstants { k1, k2, kappa })
}

pub fn assemble_gains(
    alpha: f64,
    theta: f64,
    gb: &GrowthBound,
    sb: &SectorBound,
    frac_norm_limit: f64,
    mu_p: f64,
    mu_e: f64,
) -> Result<GainBundle> {
    for (name, v) in [("frac_norm_limit", frac_norm_limit), ("mu_p", mu_p), ("mu_e", mu_e)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(gb.m >= 1.0) {
        return Err(Error::Domain(format!("growth constant must be >= 1, got {}", gb.m)));
    }
    let k = k_constants(alpha, theta, gb, sb)?;
    Ok(GainBundle {
        alpha,
        theta,
        growth: *gb,
        sector: *sb,
        k1: k.k1,
        k2: k.k2,
        kappa: k.kappa,
        frac_norm_limit,
        mu_p,
        mu_e,
        beta_m: mu_p * mu_e * gb.m,
        beta_omega: gb.omega,
        gamma_slope: mu_e * k.kappa * frac_norm_limit,
    })
}

/// Checks ‖(−A)^α S(t)‖ ≤ K₁e^{−ωt} + K₂e^{−ωt}t^{−α} on a time grid, the
/// left side evaluated spectrally as max over μ ∈ σ(−A) of μ^α e^{−μt}.
pub fn lemma_frac_semigroup_check(
    sys: &ClosedControlSystem,
    bundle: &GainBundle,
    t_grid: &[f64],
) -> Result<DiagnosticReport> {
    if let Some(&bad) = t_grid.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::Domain(format!(
            "time grid must be positive, found {bad}"
        )));
    }
    let eigenvalues = sys.a_matrix.eigenvalues()?;
    let top = *eigenvalues.last().expect("nonempty spectrum");
    if top >= 0.0 {
        return Err(Error::NotHurwitz { max_eigenvalue: top });
    }
    let alpha = bundle.alpha;
    let omega = bundle.growth.omega;
    let n = sys.n();

    let mut worst_ratio: f64 = 0.0;
    let mut worst_t = f64::NAN;
    let mut violations = 0usize;
    for &t in t_grid {
        let lhs = eigenvalues
            .iter()
            .map(|&lam| {
                let mu = -lam;
                mu.powf(alpha) * (-mu * t).exp()
            })
            .fold(0.0, f64::max);
        let decay = (-omega * t).exp();
        let rhs = bundle.k1 * decay + bundle.k2 * decay * t.powf(-alpha);
        let ratio = lhs / rhs;
        if ratio > worst_ratio || worst_t.is_nan() {
            worst_ratio = ratio;
            worst_t = t;
        }
        if lhs > rhs * (1.0 + 1e-9) {
            violations += 1;
        }
    }
    let verdict = if violations == 0 { Verdict::Pass } else { Verdict::Fail };
    let mut report = DiagnosticReport::new(
        "lemma_frac_semigroup",
        verdict,
        format!(
            "{violations} of {} time points violate the fractional semigroup bound (alpha = {alpha})",
            t_grid.len()
        ),
    );
    report.push("max_lhs_over_rhs", Some(n), worst_ratio);
    report.push("argmax_t", Some(n), worst_t);
    report.push("violations", Some(n), violations as f64);
    Ok(report)
}
