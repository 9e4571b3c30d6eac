//! Discrete Fattorini closure of the pre-closure heat system and the
//! computable checks of the approximation assumptions.
//!
//! The closure keeps the kernel of the boundary trace (zero boundary values),
//! identified with interior coordinates through the projection R, and turns
//! the boundary input into B = 𝔄𝔇₀ − A R 𝔇₀.
//!
//! Strong-operator-topology conditions are probed on finite families of
//! functions (sine modes, polynomials, random grid vectors); the verdicts
//! are empirical.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gains::sector_bound;
use crate::numerics::SymTridiagonal;
use crate::sweep::format_significant;
use crate::systems::{
    build_heat_dirichlet, extend, l2_norm_piecewise, restrict, ApproximationPair,
    ClosedControlSystem, GridSpec, HatInterpolant, PreClosureSystem, SpaceConfig,
    WeightedSpace,
};

/// Cells used for reference L² norms of continuous probe functions.
const REFERENCE_CELLS: usize = 2048;

/// Sample points of the spectral parameter λ on the positive real ray.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    lambda_grid: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
}

impl PathSpec {
    /// `count` log-spaced points with both endpoints included exactly.
    pub fn log_spaced(lambda_min: f64, lambda_max: f64, count: usize) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_max.is_finite()) {
            return Err(Error::Domain(format!(
                "lambda range must be positive and finite, got [{lambda_min}, {lambda_max}]"
            )));
        }
        if count == 0 {
            return Err(Error::Domain("lambda count must be positive".into()));
        }
        if count == 1 {
            if lambda_min != lambda_max {
                return Err(Error::Domain(
                    "a single lambda point needs lambda_min == lambda_max".into(),
                ));
            }
            return Self::from_values(vec![lambda_min]);
        }
        if lambda_max <= lambda_min {
            return Err(Error::Domain(format!(
                "lambda_max {lambda_max} must exceed lambda_min {lambda_min}"
            )));
        }
        let (lo, hi) = (lambda_min.ln(), lambda_max.ln());
        let step = (hi - lo) / (count - 1) as f64;
        let mut grid: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
        grid[0] = lambda_min;
        grid[count - 1] = lambda_max;
        Self::from_values(grid)
    }

    /// 400 points in [10⁻⁴, 10⁴].
    pub fn default_ray() -> Self {
        Self::log_spaced(1e-4, 1e4, 400).expect("valid default path")
    }

    /// Explicit grid; must be strictly increasing and positive. An empty
    /// grid is allowed so that callers can report it.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain("lambda values must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("lambda grid must be strictly increasing".into()));
        }
        Ok(Self {
            lambda_min: values.first().copied().unwrap_or(f64::NAN),
            lambda_max: values.last().copied().unwrap_or(f64::NAN),
            count: values.len(),
            lambda_grid: values,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda_grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Warn => "warn",
            Verdict::Fail => "fail",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticValue {
    pub label: String,
    pub n: Option<usize>,
    pub value: f64,
}

/// Outcome of one diagnostic: labelled values plus a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub name: String,
    pub values: Vec<DiagnosticValue>,
    verdict: Verdict,
    pub detail: String,
}

impl DiagnosticReport {
    pub fn new(name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            values: Vec::new(),
            verdict,
            detail: detail.into(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, n: Option<usize>, value: f64) {
        self.values.push(DiagnosticValue {
            label: label.into(),
            n,
            value,
        });
    }

    /// A report without values never passes.
    pub fn verdict(&self) -> Verdict {
        if self.verdict == Verdict::Pass && self.values.is_empty() {
            Verdict::Fail
        } else {
            self.verdict
        }
    }

    pub fn set_verdict(&mut self, verdict: Verdict) {
        self.verdict = verdict;
    }

    fn key(v: &DiagnosticValue) -> String {
        match v.n {
            Some(n) => format!("{}.n{}", v.label, n),
            None => v.label.clone(),
        }
    }

    /// Human-readable block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "[{}] {}: {}",
            self.verdict().as_str().to_uppercase(),
            self.name,
            self.detail
        );
        for v in &self.values {
            let _ = writeln!(out, "    {:<36} {}", Self::key(v), format_significant(v.value, 10));
        }
        out
    }

    /// `name.key=value` lines, values with 10 significant digits.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}.verdict={}", self.name, self.verdict());
        for v in &self.values {
            let _ = writeln!(
                out,
                "{}.{}={}",
                self.name,
                Self::key(v),
                format_significant(v.value, 10)
            );
        }
        out
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Maps the pre-closure system to ẋ = A x + B u.
///
/// A is 𝔄 restricted to the kernel of 𝔇 in interior coordinates (A = 𝔄Rᵀ).
/// B = 𝔄𝔇₀ − A R 𝔇₀ is evaluated in the algebraically identical form
/// 𝔄(𝔇₀ − RᵀR𝔇₀), whose interior rows cancel exactly.
pub fn close_system(pre: &PreClosureSystem, space_cfg: SpaceConfig) -> Result<ClosedControlSystem> {
    let grid = pre.grid;
    let nodes = grid.n + 1;
    let dim = grid.interior_nodes;
    let shape_ok = pre.ainit.shape() == (dim, nodes)
        && pre.bop.shape() == (2, nodes)
        && pre.restrict.shape() == (dim, nodes)
        && pre.bop_rinv.shape() == (nodes, 2);
    if !shape_ok {
        return Err(Error::Construction(
            "pre-closure matrices have inconsistent shapes".into(),
        ));
    }

    let deviation = max_abs(&(&pre.bop * &pre.bop_rinv - DMatrix::identity(2, 2)));
    if deviation > 1e-12 {
        return Err(Error::InvalidRightInverse { deviation });
    }
    let leak = max_abs(&(&pre.bop * pre.restrict.transpose()));
    if leak != 0.0 {
        return Err(Error::Construction(format!(
            "interior embedding is not in the kernel of the boundary trace (|D R^T| = {leak:e})"
        )));
    }

    let a_dense = &pre.ainit * pre.restrict.transpose();
    let scale = max_abs(&a_dense);
    let mut diag = Vec::with_capacity(dim);
    let mut off = Vec::with_capacity(dim.saturating_sub(1));
    for i in 0..dim {
        for j in 0..dim {
            let outside = i.abs_diff(j) > 1;
            if outside && a_dense[(i, j)] != 0.0 {
                return Err(Error::Construction(format!(
                    "closed generator is not tridiagonal at ({i}, {j})"
                )));
            }
        }
        diag.push(a_dense[(i, i)]);
        if i + 1 < dim {
            let (up, down) = (a_dense[(i, i + 1)], a_dense[(i + 1, i)]);
            if (up - down).abs() > 1e-14 * scale {
                return Err(Error::Construction(format!(
                    "closed generator is not symmetric at ({i}, {})",
                    i + 1
                )));
            }
            off.push(up);
        }
    }
    let a_matrix = SymTridiagonal::new(diag, off)?;

    let interior_part = pre.restrict.transpose() * (&pre.restrict * &pre.bop_rinv);
    let boundary_part = &pre.bop_rinv - interior_part;
    let b_matrix = &pre.ainit * boundary_part;

    Ok(ClosedControlSystem {
        space: WeightedSpace::new(grid, space_cfg)?,
        a_matrix,
        b_matrix,
        diffusion: pre.diffusion,
    })
}

/// Largest entrywise difference between two closed systems of equal size.
pub fn closure_mismatch(lhs: &ClosedControlSystem, rhs: &ClosedControlSystem) -> Result<f64> {
    if lhs.state_dim() != rhs.state_dim() || lhs.input_dim() != rhs.input_dim() {
        return Err(Error::Dimension {
            expected: lhs.state_dim(),
            got: rhs.state_dim(),
        });
    }
    let da = max_abs(&(lhs.a_matrix.to_dense() - rhs.a_matrix.to_dense()));
    let db = max_abs(&(&lhs.b_matrix - &rhs.b_matrix));
    Ok(da.max(db))
}

/// Per-resolution resolvent constants D_n on the real ray.
///
/// The resolvent is that of A_n at positive λ (equivalently of −A_n to the
/// left of its spectrum); at positive λ the resolvent of −A_n itself would
/// meet the spectrum.
pub fn sector_diagnostic(systems: &[ClosedControlSystem], path: &PathSpec) -> Result<DiagnosticReport> {
    if systems.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "sector diagnostic needs at least 2 systems, got {}",
            systems.len()
        )));
    }
    let mut sorted: Vec<&ClosedControlSystem> = systems.iter().collect();
    sorted.sort_by_key(|s| s.n());

    let mut report = DiagnosticReport::new("sector", Verdict::Pass, "");
    let mut values = Vec::new();
    for sys in &sorted {
        match sector_bound(sys, path) {
            Ok(sb) => {
                report.push("D", Some(sys.n()), sb.d);
                values.push(sb.d);
            }
            Err(Error::NotHurwitz { max_eigenvalue }) => {
                report.push("max_eigenvalue", Some(sys.n()), max_eigenvalue);
                report.set_verdict(Verdict::Fail);
                report.detail = format!(
                    "system at n = {} is not Hurwitz (largest eigenvalue {max_eigenvalue:e})",
                    sys.n()
                );
                return Ok(report);
            }
            Err(other) => return Err(other),
        }
    }
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top_half = &values[values.len() / 2..];
    let (lo, hi) = top_half
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let variation = (hi - lo) / hi.abs();
    report.push("sup_D", None, sup);
    report.push("top_half_variation", None, variation);
    let verdict = if sup.is_finite() && variation < 0.01 {
        Verdict::Pass
    } else {
        Verdict::Warn
    };
    report.set_verdict(verdict);
    report.detail = format!(
        "D_n = sup (lambda+1)|R(lambda, A_n)| over {} points in [{:e}, {:e}] (positive ray, resolvent of A_n); sup = {}",
        path.count,
        path.lambda_min,
        path.lambda_max,
        format_significant(sup, 6)
    );
    Ok(report)
}

/// sup over λ of ‖E_n R(λ, A_n) P_n f − R(λ, A) f‖_{L²} for sine-mode
/// probes f, compared between two resolutions.
pub fn resolvent_gap(
    pair: &ApproximationPair,
    a: f64,
    n_coarse: usize,
    n_fine: usize,
    path: &PathSpec,
    probe: &[(usize, f64)],
) -> Result<DiagnosticReport> {
    if n_fine < 2 * n_coarse {
        return Err(Error::Domain(format!(
            "fine resolution {n_fine} must be at least twice the coarse {n_coarse}"
        )));
    }
    if path.lambdas().is_empty() {
        return Err(Error::InsufficientData("empty lambda path".into()));
    }
    let f = crate::systems::analytic_heat_state(probe, a, 0.0);
    let mut report = DiagnosticReport::new("resolvent_gap", Verdict::Pass, "");
    let mut gaps = Vec::with_capacity(2);
    for n in [n_coarse, n_fine] {
        let sys = build_heat_dirichlet(n, a, SpaceConfig::L2)?;
        let grid = sys.space.grid;
        let sampled = restrict(|x| f.eval(x), &grid);
        let neg: Vec<f64> = sampled.iter().map(|v| -v).collect();
        let mut worst: f64 = 0.0;
        for &lambda in path.lambdas() {
            // (λ − A_n) x = P_n f  ⇔  (A_n − λ) x = −P_n f
            let x = sys.a_matrix.solve_shifted(lambda, &neg)?;
            let exact = f.resolvent(lambda);
            let gap = extend(&x, &grid)?.l2_distance(|xi| exact.eval(xi));
            worst = worst.max(gap);
        }
        report.push("gap", Some(n), worst);
        gaps.push(worst);
    }
    let ratio = gaps[0] / gaps[1];
    report.push("ratio", None, ratio);
    let verdict = if ratio >= 2.0 { Verdict::Pass } else { Verdict::Warn };
    report.set_verdict(verdict);
    report.detail = format!(
        "resolvent gap {} -> {} from n = {n_coarse} to n = {n_fine} (ratio {}, mu_e = {}, mu_p = {})",
        format_significant(gaps[0], 4),
        format_significant(gaps[1], 4),
        format_significant(ratio, 4),
        pair.mu_e,
        pair.mu_p
    );
    Ok(report)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Twice differentiable test function vanishing at both ends, with its
/// second derivative.
#[derive(Clone)]
pub struct Probe {
    pub name: String,
    f: ScalarFn,
    f2: ScalarFn,
}

impl std::fmt::Debug for Probe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Probe").field("name", &self.name).finish()
    }
}

impl Probe {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            f2: Arc::new(f2),
        }
    }

    /// sin(kπξ).
    pub fn sine(k: usize) -> Self {
        let w = k as f64 * std::f64::consts::PI;
        Self::new(format!("sin{k}"), move |x| (w * x).sin(), move |x| -w * w * (w * x).sin())
    }

    /// ξ(1 − ξ).
    pub fn parabola() -> Self {
        Self::new("parabola", |x| x * (1.0 - x), |_| -2.0)
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        (self.f2)(x)
    }
}

/// Uniform boundedness of E_n A_n P_n from D(A) to X and of the discrete
/// extrapolation-norm surrogate ‖A_n⁻¹ A_n P_n f‖ relative to ‖f‖.
pub fn consistency_diagnostic(
    systems: &[ClosedControlSystem],
    probes: &[Probe],
) -> Result<DiagnosticReport> {
    if systems.is_empty() || probes.is_empty() {
        return Err(Error::InsufficientData(
            "consistency diagnostic needs systems and probes".into(),
        ));
    }
    for p in probes {
        let (left, right) = (p.eval(0.0), p.eval(1.0));
        if left.abs() > 1e-12 || right.abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "probe '{}' does not vanish at the boundary (f(0) = {left:e}, f(1) = {right:e})",
                p.name
            )));
        }
    }
    let mut sorted: Vec<&ClosedControlSystem> = systems.iter().collect();
    sorted.sort_by_key(|s| s.n());

    let mut report = DiagnosticReport::new("consistency", Verdict::Pass, "");
    let mut unbounded = Vec::new();
    for p in probes {
        let f_norm = l2_norm_piecewise(|x| p.eval(x), REFERENCE_CELLS);
        let f2_norm = l2_norm_piecewise(|x| p.second_derivative(x), REFERENCE_CELLS);
        let mut dax = Vec::new();
        let mut xm1 = Vec::new();
        for sys in &sorted {
            let grid = sys.space.grid;
            let space = WeightedSpace::new(grid, SpaceConfig::L2)?;
            let sampled = restrict(|x| p.eval(x), &grid);
            let applied = sys.a_matrix.mul_vec(&sampled)?;
            let lifted = extend(&applied, &grid)?.l2_norm();
            let r1 = ratio_or_zero(lifted, f_norm + f2_norm);
            let back = sys.a_matrix.solve(&applied)?;
            let r2 = ratio_or_zero(space.norm(&back)?, f_norm);
            report.push(format!("{}.dax_ratio", p.name), Some(sys.n()), r1);
            report.push(format!("{}.xm1_ratio", p.name), Some(sys.n()), r2);
            dax.push(r1);
            xm1.push(r2);
        }
        if !bounded(&dax) || !bounded(&xm1) {
            unbounded.push(p.name.clone());
        }
    }
    if unbounded.is_empty() {
        report.detail = "ratio sequences bounded (max/min <= 10) for every probe".into();
    } else {
        report.set_verdict(Verdict::Warn);
        report.detail = format!("ratios vary by more than 10x for: {}", unbounded.join(", "));
    }
    Ok(report)
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn bounded(values: &[f64]) -> bool {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi.is_finite() && (hi == 0.0 || hi <= 10.0 * lo)
}

/// Gaps of the boundary lifting: interpolated 𝔇_{n,0} against the linear
/// profiles 1 − ξ and ξ, the size of 𝔄_n𝔇_{n,0}, and the L² size of
/// E_n A_n⁻¹ 𝔄_n𝔇_{n,0} (whose continuous counterpart vanishes).
pub fn right_inverse_gap(pre_systems: &[PreClosureSystem]) -> Result<DiagnosticReport> {
    if pre_systems.is_empty() {
        return Err(Error::InsufficientData("no pre-closure systems".into()));
    }
    let mut sorted: Vec<&PreClosureSystem> = pre_systems.iter().collect();
    sorted.sort_by_key(|p| p.grid.n);
    let mut report = DiagnosticReport::new("right_inverse", Verdict::Pass, "");
    let mut clean = true;
    for pre in sorted {
        let grid = pre.grid;
        let n = grid.n;
        let profiles: [fn(f64) -> f64; 2] = [|x| 1.0 - x, |x| x];

        let mut lift_gap: f64 = 0.0;
        for (j, profile) in profiles.iter().enumerate() {
            let column: Vec<f64> = pre.bop_rinv.column(j).iter().copied().collect();
            let hat = HatInterpolant::from_nodes(grid, column)?;
            lift_gap = lift_gap.max(sup_distance(&hat, *profile, &grid));
        }

        let stencil_on_lift = &pre.ainit * &pre.bop_rinv;
        let stencil_gap = max_abs(&stencil_on_lift);

        let a_matrix = close_system(pre, SpaceConfig::L2)?.a_matrix;
        let mut inverse_gap: f64 = 0.0;
        for j in 0..2 {
            let col: Vec<f64> = stencil_on_lift.column(j).iter().copied().collect();
            let solved = a_matrix.solve(&col)?;
            inverse_gap = inverse_gap.max(extend(&solved, &grid)?.l2_norm());
        }

        report.push("lift_sup_gap", Some(n), lift_gap);
        report.push("stencil_on_lift", Some(n), stencil_gap);
        report.push("inverse_stencil_gap", Some(n), inverse_gap);

        let scale = pre.diffusion * (n * n) as f64;
        let tol = 64.0 * f64::EPSILON;
        if lift_gap > tol || stencil_gap > tol * scale || inverse_gap > tol {
            clean = false;
        }
    }
    if clean {
        report.detail = "boundary lifting reproduces linear profiles and is annihilated by the stencil".into();
    } else {
        report.set_verdict(Verdict::Warn);
        report.detail = "boundary lifting deviates from the linear profiles".into();
    }
    Ok(report)
}

fn sup_distance(hat: &HatInterpolant, f: fn(f64) -> f64, grid: &GridSpec) -> f64 {
    const PER_CELL: usize = 8;
    let samples = grid.n * PER_CELL;
    (0..=samples)
        .map(|i| {
            let x = i as f64 / samples as f64;
            (hat.eval(x) - f(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// ‖P_n f‖_{Xⁿ, p=1} / ‖f‖_{L²}.
pub fn restriction_ratio<F: Fn(f64) -> f64>(f: F, grid: &GridSpec) -> Result<f64> {
    let space = WeightedSpace::new(*grid, SpaceConfig::L2)?;
    let denom = l2_norm_piecewise(&f, REFERENCE_CELLS.max(grid.n));
    if denom == 0.0 {
        return Err(Error::Domain("sample function has zero L2 norm".into()));
    }
    Ok(space.norm(&restrict(&f, grid))? / denom)
}

/// ‖E_n x‖_{L²} / ‖x‖_{Xⁿ, p=1}.
pub fn extension_ratio(x: &[f64], grid: &GridSpec) -> Result<f64> {
    let space = WeightedSpace::new(*grid, SpaceConfig::L2)?;
    let denom = space.norm(x)?;
    if denom == 0.0 {
        return Err(Error::Domain("zero grid vector".into()));
    }
    Ok(extend(x, grid)?.l2_norm() / denom)
}

/// Empirical norm bounds (μ_p, μ_e) over sample functions and seeded random
/// grid vectors.
pub fn estimate_mu(
    samples: &[Probe],
    n_list: &[usize],
    random_vectors: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples.is_empty() || n_list.is_empty() {
        return Err(Error::InsufficientData("estimate_mu needs samples and resolutions".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mu_p: f64 = 0.0;
    let mut mu_e: f64 = 0.0;
    for &n in n_list {
        let grid = GridSpec::new(n)?;
        for s in samples {
            mu_p = mu_p.max(restriction_ratio(|x| s.eval(x), &grid)?);
        }
        for _ in 0..random_vectors {
            let x: Vec<f64> = (0..grid.interior_nodes).map(|_| rng.random_range(-1.0..1.0)).collect();
            if x.iter().any(|v| *v != 0.0) {
                mu_e = mu_e.max(extension_ratio(&x, &grid)?);
            }
        }
    }
    Ok((mu_p, mu_e))
}
