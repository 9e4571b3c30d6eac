//! Discretized state spaces and the finite-difference heat equation with
//! Dirichlet boundary control on the unit interval.
//!
//! The interval [0, 1] is split into `n` cells with nodes ξ_k = k/n. States
//! live on the `n − 1` interior nodes; the two boundary values are the
//! inputs. Input column 0 drives ξ = 0 and column 1 drives ξ = 1.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::{InputNorm, SymTridiagonal};

/// Uniform grid on [0, 1] with `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
    pub dx: f64,
    pub interior_nodes: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Construction(format!(
                "need at least 2 intervals, got {n}"
            )));
        }
        Ok(Self {
            n,
            length: 1.0,
            dx: 1.0 / n as f64,
            interior_nodes: n - 1,
        })
    }

    /// ξ_k = k/n for 0 ≤ k ≤ n.
    pub fn node(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn interior(&self) -> impl Iterator<Item = f64> + '_ {
        (1..self.n).map(|k| self.node(k))
    }
}

/// Weight exponent and input norm, independent of the resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceConfig {
    /// `p` in ‖x‖² = (Δξ)^p Σ x_k². `p = 1` is the L²-consistent Riemann
    /// weight, `p = 2` the squared-spacing weight of the published tables.
    pub weight_exponent: f64,
    pub input_norm: InputNorm,
}

impl SpaceConfig {
    pub const L2: SpaceConfig = SpaceConfig {
        weight_exponent: 1.0,
        input_norm: InputNorm::Max,
    };
    pub const SQUARED_SPACING: SpaceConfig = SpaceConfig {
        weight_exponent: 2.0,
        input_norm: InputNorm::Max,
    };

    pub fn new(weight_exponent: f64, input_norm: InputNorm) -> Result<Self> {
        if weight_exponent != 1.0 && weight_exponent != 2.0 {
            return Err(Error::Domain(format!(
                "weight exponent must be 1 or 2, got {weight_exponent}"
            )));
        }
        Ok(Self {
            weight_exponent,
            input_norm,
        })
    }
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self::L2
    }
}

/// State space ℝ^{n−1} with norm √((Δξ)^p Σ x_k²) and input space ℝ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSpace {
    pub grid: GridSpec,
    pub weight_exponent: f64,
    pub input_norm: InputNorm,
}

impl WeightedSpace {
    pub fn new(grid: GridSpec, cfg: SpaceConfig) -> Result<Self> {
        let cfg = SpaceConfig::new(cfg.weight_exponent, cfg.input_norm)?;
        Ok(Self {
            grid,
            weight_exponent: cfg.weight_exponent,
            input_norm: cfg.input_norm,
        })
    }

    pub fn config(&self) -> SpaceConfig {
        SpaceConfig {
            weight_exponent: self.weight_exponent,
            input_norm: self.input_norm,
        }
    }

    /// Factor multiplying the Euclidean norm: (Δξ)^{p/2}.
    pub fn row_weight(&self) -> f64 {
        self.grid.dx.powf(0.5 * self.weight_exponent)
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        weighted_state_norm(x, self)
    }
}

pub fn weighted_state_norm(x: &[f64], space: &WeightedSpace) -> Result<f64> {
    let expected = space.grid.interior_nodes;
    if x.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: x.len(),
        });
    }
    let sq: f64 = x.iter().map(|v| v * v).sum();
    Ok((space.grid.dx.powf(space.weight_exponent) * sq).sqrt())
}

/// ẋ = A x + B u on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedControlSystem {
    pub space: WeightedSpace,
    pub a_matrix: SymTridiagonal,
    /// (n−1) × 2.
    pub b_matrix: DMatrix<f64>,
    pub diffusion: f64,
}

impl ClosedControlSystem {
    pub fn n(&self) -> usize {
        self.space.grid.n
    }

    pub fn state_dim(&self) -> usize {
        self.space.grid.interior_nodes
    }

    pub fn input_dim(&self) -> usize {
        self.b_matrix.ncols()
    }

    /// Same matrices, different state weighting or input norm.
    pub fn with_space(&self, cfg: SpaceConfig) -> Result<Self> {
        Ok(Self {
            space: WeightedSpace::new(self.space.grid, cfg)?,
            ..self.clone()
        })
    }

    /// Indices of rows of B that carry nonzero entries.
    pub fn input_support(&self) -> Vec<usize> {
        (0..self.b_matrix.nrows())
            .filter(|&r| self.b_matrix.row(r).iter().any(|&v| v != 0.0))
            .collect()
    }
}

/// Boundary control system before the boundary values are eliminated:
/// 𝔄 acts on all n+1 nodes, 𝔇 reads the two boundary values, Q and R
/// extract the interior nodes and 𝔇₀ is a right inverse of 𝔇.
#[derive(Debug, Clone, PartialEq)]
pub struct PreClosureSystem {
    pub grid: GridSpec,
    pub diffusion: f64,
    /// (n−1) × (n+1) second-difference stencil.
    pub ainit: DMatrix<f64>,
    /// 2 × (n+1) boundary trace.
    pub bop: DMatrix<f64>,
    /// (n−1) × (n+1) descriptor matrix.
    pub q: DMatrix<f64>,
    /// (n−1) × (n+1) interior projection.
    pub restrict: DMatrix<f64>,
    /// (n+1) × 2 right inverse of `bop`.
    pub bop_rinv: DMatrix<f64>,
}

/// a·n², the scale of the second-difference stencil.
fn stencil_scale(n: usize, a: f64) -> f64 {
    a * (n as f64 * n as f64)
}

fn check_diffusion(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Construction(format!(
            "diffusion must be positive, got {a}"
        )));
    }
    Ok(())
}

pub fn build_heat_dirichlet(n: usize, a: f64, space_cfg: SpaceConfig) -> Result<ClosedControlSystem> {
    let grid = GridSpec::new(n)?;
    check_diffusion(a)?;
    let space = WeightedSpace::new(grid, space_cfg)?;
    let c = stencil_scale(n, a);
    let dim = n - 1;
    let a_matrix = SymTridiagonal::new(vec![c * -2.0; dim], vec![c * 1.0; dim - 1])?;
    let mut b_matrix = DMatrix::zeros(dim, 2);
    b_matrix[(0, 0)] = c * 1.0;
    b_matrix[(dim - 1, 1)] = c * 1.0;
    Ok(ClosedControlSystem {
        space,
        a_matrix,
        b_matrix,
        diffusion: a,
    })
}

pub fn build_preclosure_heat(n: usize, a: f64) -> Result<PreClosureSystem> {
    let grid = GridSpec::new(n)?;
    check_diffusion(a)?;
    let c = stencil_scale(n, a);
    let dim = n - 1;
    let mut ainit = DMatrix::zeros(dim, n + 1);
    let mut q = DMatrix::zeros(dim, n + 1);
    for k in 0..dim {
        ainit[(k, k)] = c * 1.0;
        ainit[(k, k + 1)] = c * -2.0;
        ainit[(k, k + 2)] = c * 1.0;
        q[(k, k + 1)] = 1.0;
    }
    let mut bop = DMatrix::zeros(2, n + 1);
    bop[(0, 0)] = 1.0;
    bop[(1, n)] = 1.0;
    // Column j is the nodal profile of the linear function equal to one at
    // boundary j and zero at the other: 1 − ξ and ξ.
    let nf = n as f64;
    let bop_rinv = DMatrix::from_fn(n + 1, 2, |k, j| {
        if j == 0 {
            (n - k) as f64 / nf
        } else {
            k as f64 / nf
        }
    });
    Ok(PreClosureSystem {
        grid,
        diffusion: a,
        ainit,
        bop,
        restrict: q.clone(),
        q,
        bop_rinv,
    })
}

/// Nodal sampling P_n and hat-function interpolation E_n, with the uniform
/// operator-norm bounds μ_p ≥ ‖P_n‖ and μ_e ≥ ‖E_n‖.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximationPair {
    pub grid: GridSpec,
    pub mu_p: f64,
    pub mu_e: f64,
}

impl ApproximationPair {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_bounds(n, 1.0, 1.0)
    }

    pub fn with_bounds(n: usize, mu_p: f64, mu_e: f64) -> Result<Self> {
        if !(mu_p > 0.0 && mu_e > 0.0) {
            return Err(Error::Domain(format!(
                "norm bounds must be positive, got mu_p = {mu_p}, mu_e = {mu_e}"
            )));
        }
        Ok(Self {
            grid: GridSpec::new(n)?,
            mu_p,
            mu_e,
        })
    }

    pub fn restrict<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        restrict(f, &self.grid)
    }

    pub fn extend(&self, x: &[f64]) -> Result<HatInterpolant> {
        extend(x, &self.grid)
    }
}

/// (P_n f)_k = f(ξ_k) on interior nodes.
pub fn restrict<F: Fn(f64) -> f64>(f: F, grid: &GridSpec) -> Vec<f64> {
    grid.interior().map(f).collect()
}

/// Hat interpolant of interior values, vanishing at both endpoints.
pub fn extend(x: &[f64], grid: &GridSpec) -> Result<HatInterpolant> {
    if x.len() != grid.interior_nodes {
        return Err(Error::Dimension {
            expected: grid.interior_nodes,
            got: x.len(),
        });
    }
    let mut nodal = Vec::with_capacity(grid.n + 1);
    nodal.push(0.0);
    nodal.extend_from_slice(x);
    nodal.push(0.0);
    HatInterpolant::from_nodes(*grid, nodal)
}

/// Continuous piecewise-linear function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HatInterpolant {
    grid: GridSpec,
    nodal: Vec<f64>,
}

impl HatInterpolant {
    /// From values at all n+1 nodes, boundary nodes included.
    pub fn from_nodes(grid: GridSpec, nodal: Vec<f64>) -> Result<Self> {
        if nodal.len() != grid.n + 1 {
            return Err(Error::Dimension {
                expected: grid.n + 1,
                got: nodal.len(),
            });
        }
        Ok(Self { grid, nodal })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nodal_values(&self) -> &[f64] {
        &self.nodal
    }

    /// Value at ξ; zero outside [0, 1].
    pub fn eval(&self, xi: f64) -> f64 {
        if !(0.0..=1.0).contains(&xi) {
            return 0.0;
        }
        let n = self.grid.n;
        let pos = xi * n as f64;
        let cell = (pos.floor() as usize).min(n - 1);
        let frac = pos - cell as f64;
        self.nodal[cell] * (1.0 - frac) + self.nodal[cell + 1] * frac
    }

    /// Exact L²(0,1) norm from the P1 mass matrix.
    pub fn l2_norm(&self) -> f64 {
        let sq: f64 = self
            .nodal
            .windows(2)
            .map(|w| (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0)
            .sum();
        (self.grid.dx * sq).sqrt()
    }

    /// L²(0,1) distance to a function that is smooth on every cell.
    pub fn l2_distance<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        l2_norm_piecewise(|xi| self.eval(xi) - f(xi), self.grid.n)
    }
}

const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664_0,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664_0,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// ‖f‖_{L²(0,1)} by 5-point Gauss–Legendre on `cells` equal cells.
pub fn l2_norm_piecewise<F: Fn(f64) -> f64>(f: F, cells: usize) -> f64 {
    let h = 1.0 / cells as f64;
    let mut sum = 0.0;
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * h;
        for (x, w) in GAUSS5_NODES.iter().zip(&GAUSS5_WEIGHTS) {
            let v = f(mid + 0.5 * h * x);
            sum += w * v * v;
        }
    }
    (0.5 * h * sum).sqrt()
}

/// Exact homogeneous solution Σ c_k e^{−a k²π² t} sin(kπξ).
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub modes: Vec<(usize, f64)>,
    pub diffusion: f64,
    pub time: f64,
}

pub fn analytic_heat_state(modes: &[(usize, f64)], a: f64, t: f64) -> ModalState {
    ModalState {
        modes: modes.to_vec(),
        diffusion: a,
        time: t,
    }
}

impl ModalState {
    fn amplitude(&self, k: usize, c: f64) -> f64 {
        let kf = k as f64;
        c * (-self.diffusion * kf * kf * PI * PI * self.time).exp()
    }

    pub fn eval(&self, xi: f64) -> f64 {
        self.modes
            .iter()
            .map(|&(k, c)| self.amplitude(k, c) * (k as f64 * PI * xi).sin())
            .sum()
    }

    /// Exact L² norm using orthogonality of the sine modes.
    pub fn l2_norm(&self) -> f64 {
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for &(k, c) in &self.modes {
            match merged.iter_mut().find(|(kk, _)| *kk == k) {
                Some(entry) => entry.1 += c,
                None => merged.push((k, c)),
            }
        }
        merged
            .iter()
            .filter(|(k, _)| *k > 0)
            .map(|&(k, c)| 0.5 * self.amplitude(k, c).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Same modes evaluated at time zero.
    pub fn initial(&self) -> ModalState {
        ModalState {
            time: 0.0,
            ..self.clone()
        }
    }

    /// Applies the exact resolvent (λ − A)^{-1}, which scales mode k by
    /// 1/(λ + a k²π²).
    pub fn resolvent(&self, lambda: f64) -> ModalState {
        ModalState {
            modes: self
                .modes
                .iter()
                .map(|&(k, c)| {
                    let kf = k as f64;
                    (k, self.amplitude(k, c) / (lambda + self.diffusion * kf * kf * PI * PI))
                })
                .collect(),
            diffusion: self.diffusion,
            time: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn grid_basics() {
        let g = GridSpec::new(7).unwrap();
        assert!((g.dx * 7.0 - g.length).abs() <= f64::EPSILON);
        assert_eq!(g.interior_nodes, 6);
        assert_eq!(g.node(7), 1.0);
        assert!(GridSpec::new(1).is_err());
    }

    #[test]
    fn heat_two_intervals() {
        let sys = build_heat_dirichlet(2, 1.0, SpaceConfig::L2).unwrap();
        assert_eq!(sys.a_matrix.to_dense(), DMatrix::from_element(1, 1, -8.0));
        assert_eq!(sys.b_matrix, DMatrix::from_row_slice(1, 2, &[4.0, 4.0]));
    }

    #[test]
    fn heat_three_intervals_and_scaling() {
        let sys = build_heat_dirichlet(3, 1.0, SpaceConfig::L2).unwrap();
        assert_eq!(
            sys.a_matrix.to_dense(),
            DMatrix::from_row_slice(2, 2, &[-18.0, 9.0, 9.0, -18.0])
        );
        assert_eq!(sys.b_matrix, DMatrix::from_row_slice(2, 2, &[9.0, 0.0, 0.0, 9.0]));
        let doubled = build_heat_dirichlet(3, 2.0, SpaceConfig::L2).unwrap();
        assert_eq!(doubled.a_matrix.to_dense(), sys.a_matrix.to_dense() * 2.0);
        assert_eq!(doubled.b_matrix, &sys.b_matrix * 2.0);
        assert_eq!(sys.input_support(), vec![0, 1]);
    }

    #[test]
    fn heat_builder_rejects_bad_input() {
        assert!(matches!(
            build_heat_dirichlet(1, 1.0, SpaceConfig::L2),
            Err(Error::Construction(_))
        ));
        assert!(build_heat_dirichlet(4, 0.0, SpaceConfig::L2).is_err());
        assert!(SpaceConfig::new(3.0, InputNorm::Max).is_err());
    }

    #[test]
    fn heat_is_hurwitz_with_analytic_top_eigenvalue() {
        for &n in &[2usize, 5, 33, 200] {
            let sys = build_heat_dirichlet(n, 1.3, SpaceConfig::L2).unwrap();
            let top = *sys.a_matrix.eigenvalues().unwrap().last().unwrap();
            let nf = n as f64;
            let exact = -4.0 * 1.3 * nf * nf * (PI / (2.0 * nf)).sin().powi(2);
            assert!(top < 0.0);
            assert!(((top - exact) / exact).abs() < 1e-10);
        }
    }

    #[test]
    fn preclosure_two_intervals() {
        let pre = build_preclosure_heat(2, 1.0).unwrap();
        let expected = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.5, 0.5, 0.0, 1.0]);
        assert_eq!(pre.bop_rinv, expected);
        assert_eq!(&pre.bop * &pre.bop_rinv, DMatrix::identity(2, 2));
    }

    #[test]
    fn preclosure_right_inverse_is_exact() {
        for n in 2..=64 {
            let pre = build_preclosure_heat(n, 1.0).unwrap();
            assert_eq!(&pre.bop * &pre.bop_rinv, DMatrix::identity(2, 2), "n = {n}");
        }
    }

    #[test]
    fn stencil_annihilates_linear_profiles() {
        for &n in &[2usize, 3, 10, 64] {
            for &a in &[0.5, 1.0, 2.0] {
                let pre = build_preclosure_heat(n, a).unwrap();
                let prod = &pre.ainit * &pre.bop_rinv;
                let scale = a * (n * n) as f64;
                assert!(max_abs(&prod) <= 8.0 * f64::EPSILON * scale, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn descriptor_extracts_interior() {
        let pre = build_preclosure_heat(3, 1.0).unwrap();
        let v = nalgebra::DVector::from_vec(vec![0.0, 2.5, -1.5, 0.0]);
        assert_eq!((&pre.q * v).as_slice(), &[2.5, -1.5]);
    }

    #[test]
    fn state_norm_examples() {
        let grid = GridSpec::new(100).unwrap();
        let space = WeightedSpace::new(grid, SpaceConfig::L2).unwrap();
        assert_eq!(weighted_state_norm(&vec![0.0; 99], &space).unwrap(), 0.0);
        let ones = weighted_state_norm(&vec![1.0; 99], &space).unwrap();
        assert!((ones - (0.01f64 * 99.0).sqrt()).abs() < 1e-14);
        assert!((ones - 0.99499).abs() < 1e-5);
        assert!(matches!(
            weighted_state_norm(&[1.0; 3], &space),
            Err(Error::Dimension { expected: 99, got: 3 })
        ));

        let grid = GridSpec::new(1000).unwrap();
        let space = WeightedSpace::new(grid, SpaceConfig::L2).unwrap();
        let s = restrict(|x| (PI * x).sin(), &grid);
        let v = weighted_state_norm(&s, &space).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 2e-3);

        let sq = WeightedSpace::new(grid, SpaceConfig::SQUARED_SPACING).unwrap();
        assert!((sq.norm(&s).unwrap() - v * grid.dx.sqrt()).abs() < 1e-15);
        assert!((sq.row_weight() - grid.dx).abs() < 1e-18);
    }

    #[test]
    fn restrict_and_extend() {
        let grid = GridSpec::new(4).unwrap();
        let s = restrict(|x| (PI * x).sin(), &grid);
        let h = 0.5f64.sqrt();
        assert!((s[0] - h).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15 && (s[2] - h).abs() < 1e-15);

        let e1 = extend(&[1.0, 0.0, 0.0], &grid).unwrap();
        assert_eq!(e1.eval(0.25), 1.0);
        assert_eq!(e1.eval(0.5), 0.0);
        assert_eq!(e1.eval(0.125), 0.5);
        assert_eq!(e1.eval(0.0), 0.0);
        assert_eq!(e1.eval(1.0), 0.0);
        assert!(extend(&[1.0], &grid).is_err());
    }

    #[test]
    fn hat_l2_norm_matches_quadrature() {
        let grid = GridSpec::new(9).unwrap();
        let x: Vec<f64> = (0..8).map(|i| (i as f64 * 1.7).sin()).collect();
        let hat = extend(&x, &grid).unwrap();
        let quad = l2_norm_piecewise(|xi| hat.eval(xi), 9);
        assert!((hat.l2_norm() - quad).abs() < 1e-13);
        // ‖E e₁‖² = Δξ·2/3
        let e1 = extend(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], &grid).unwrap();
        assert!((e1.l2_norm() - (grid.dx * 2.0 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn norm_consistency_under_refinement() {
        let exact = l2_norm_piecewise(|x| x * x.exp() * (1.0 - x), 512);
        let mut last = f64::INFINITY;
        let mut n = 16;
        while n <= 1024 {
            let grid = GridSpec::new(n).unwrap();
            let space = WeightedSpace::new(grid, SpaceConfig::L2).unwrap();
            let v = space.norm(&restrict(|x| x * x.exp() * (1.0 - x), &grid)).unwrap();
            let err = (v - exact).abs();
            assert!(err < last, "n = {n}");
            last = err;
            n *= 2;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn interpolation_error_is_second_order() {
        let f = |x: f64| (PI * x).sin();
        let mut prev: Option<f64> = None;
        for &n in &[16usize, 32, 64, 128, 256] {
            let grid = GridSpec::new(n).unwrap();
            let err = extend(&restrict(f, &grid), &grid).unwrap().l2_distance(f);
            if let Some(p) = prev {
                let ratio = p / err;
                assert!((3.5..=4.5).contains(&ratio), "n = {n}: ratio {ratio}");
            }
            prev = Some(err);
        }
    }

    #[test]
    fn analytic_state_examples() {
        let s0 = analytic_heat_state(&[(1, 1.0)], 1.0, 0.0);
        assert!((s0.eval(0.3) - (0.3 * PI).sin()).abs() < 1e-15);
        let s = analytic_heat_state(&[(1, 1.0)], 1.0, 0.1);
        assert!((s.eval(0.5) - (-PI * PI * 0.1).exp()).abs() < 1e-15);
        assert!((s.eval(0.5) - 0.372_708).abs() < 1e-6);
        let t = 0.07;
        let s2 = analytic_heat_state(&[(2, 1.0)], 1.0, t);
        let expected = (-4.0 * PI * PI * t).exp() / 2f64.sqrt();
        assert!((s2.l2_norm() - expected).abs() < 1e-15);
        assert!((l2_norm_piecewise(|x| s2.eval(x), 64) - expected).abs() < 1e-12);
    }

    #[test]
    fn exact_resolvent_of_first_mode() {
        let f = analytic_heat_state(&[(1, 1.0)], 1.0, 0.0);
        let r = f.resolvent(1.0);
        assert!((r.eval(0.5) - 1.0 / (1.0 + PI * PI)).abs() < 1e-15);
    }
}
