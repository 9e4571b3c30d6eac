//! Exact-per-step simulation of ẋ = A x + B u under piecewise-constant
//! inputs, and empirical checks of the ISS estimate.
//!
//! Each step of length h maps x to e^{Ah}x + A⁻¹(e^{Ah} − I)Bu. Both terms
//! are applied in eigenvector coordinates z = Vᵀx, where they are diagonal:
//! z ← e^{λh} z + φ_h(λ)·VᵀBu with φ_h(λ) = (e^{λh} − 1)/λ.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fattorini::{DiagnosticReport, Verdict};
use crate::gains::IssGains;
use crate::numerics::InputNorm;
use crate::sweep::format_significant;
use crate::systems::{
    analytic_heat_state, build_heat_dirichlet, extend, restrict, ApproximationPair,
    ClosedControlSystem, SpaceConfig,
};

/// Largest number of steps a single simulation may take.
pub const STEP_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    Constant,
    PiecewiseConstant,
    SeededBangBang,
}

/// Which boundary carries the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

impl Boundary {
    fn index(self) -> usize {
        match self {
            Boundary::Left => 0,
            Boundary::Right => 1,
        }
    }
}

/// Per-step input samples in U = ℝ². Step k uses `values[k]`; once the
/// samples run out the last one is held.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSignal {
    pub kind: SignalKind,
    pub values: Vec<[f64; 2]>,
    pub norm: InputNorm,
    pub sup_norm: f64,
    pub seed: Option<u64>,
}

impl InputSignal {
    fn build(kind: SignalKind, values: Vec<[f64; 2]>, norm: InputNorm, seed: Option<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("input signal without samples".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("input samples must be finite".into()));
        }
        let sup_norm = values.iter().map(|u| norm.of(u)).fold(0.0, f64::max);
        Ok(Self {
            kind,
            values,
            norm,
            sup_norm,
            seed,
        })
    }

    pub fn constant(u: [f64; 2], norm: InputNorm) -> Result<Self> {
        Self::build(SignalKind::Constant, vec![u], norm, None)
    }

    pub fn zero() -> Self {
        Self::constant([0.0, 0.0], InputNorm::Max).expect("zero input")
    }

    pub fn piecewise_constant(values: Vec<[f64; 2]>, norm: InputNorm) -> Result<Self> {
        Self::build(SignalKind::PiecewiseConstant, values, norm, None)
    }

    /// `steps` samples on one boundary, each drawn from {−1, 0, 1} and held
    /// for `hold` consecutive steps; the other component stays zero.
    pub fn bang_bang(seed: u64, steps: usize, hold: usize, active: Boundary, norm: InputNorm) -> Result<Self> {
        if steps == 0 || hold == 0 {
            return Err(Error::Domain("bang-bang input needs positive steps and hold".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(steps);
        let mut level = 0.0;
        for k in 0..steps {
            if k % hold == 0 {
                level = f64::from(rng.random_range(-1i32..=1));
            }
            let mut u = [0.0; 2];
            u[active.index()] = level;
            values.push(u);
        }
        Self::build(SignalKind::SeededBangBang, values, norm, Some(seed))
    }

    pub fn sample(&self, step: usize) -> [f64; 2] {
        self.values[step.min(self.values.len() - 1)]
    }
}

/// Spectral data of a closed system for exact stepping.
#[derive(Debug, Clone)]
pub struct ExactStepper {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    /// VᵀB in eigenvector coordinates.
    modal_input: DMatrix<f64>,
    row_weight: f64,
}

/// Diagonal propagator for one step length.
struct StepFactors {
    decay: DVector<f64>,
    gain: DVector<f64>,
}

impl ExactStepper {
    pub fn new(sys: &ClosedControlSystem) -> Result<Self> {
        if sys.input_dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: sys.input_dim(),
            });
        }
        let eig = sys.a_matrix.eigen()?;
        let top = *eig.eigenvalues.last().expect("nonempty spectrum");
        if top >= 0.0 {
            return Err(Error::NotHurwitz { max_eigenvalue: top });
        }
        let modal_input = eig.eigenvectors.transpose() * &sys.b_matrix;
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            vectors: eig.eigenvectors,
            modal_input,
            row_weight: sys.space.row_weight(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn factors(&self, h: f64) -> Result<StepFactors> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("step must be positive, got {h}")));
        }
        let decay = DVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&l| (l * h).exp()));
        // (e^{λh} − 1)/λ without cancellation for small |λh|
        let gain = DVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&l| (l * h).exp_m1() / l));
        Ok(StepFactors { decay, gain })
    }

    fn advance(&self, z: &mut DVector<f64>, f: &StepFactors, u: [f64; 2]) {
        let forcing = self.modal_input.column(0) * u[0] + self.modal_input.column(1) * u[1];
        for i in 0..z.len() {
            z[i] = f.decay[i] * z[i] + f.gain[i] * forcing[i];
        }
    }

    fn to_modal(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.vectors.tr_mul(&DVector::from_column_slice(x)))
    }

    fn to_state(&self, z: &DVector<f64>) -> Vec<f64> {
        (&self.vectors * z).iter().copied().collect()
    }

    /// e^{Ah}x + A⁻¹(e^{Ah} − I)Bu.
    pub fn step(&self, x: &[f64], u: [f64; 2], h: f64) -> Result<Vec<f64>> {
        let f = self.factors(h)?;
        let mut z = self.to_modal(x)?;
        self.advance(&mut z, &f, u);
        Ok(self.to_state(&z))
    }

    /// Steady state −A⁻¹Bu.
    pub fn steady_state(&self, u: [f64; 2]) -> Vec<f64> {
        let forcing = self.modal_input.column(0) * u[0] + self.modal_input.column(1) * u[1];
        let z = DVector::from_iterator(
            self.dim(),
            forcing.iter().zip(&self.eigenvalues).map(|(f, l)| -f / l),
        );
        self.to_state(&z)
    }

    pub fn state_norm(&self, x: &[f64]) -> f64 {
        self.row_weight * x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn step_exact(sys: &ClosedControlSystem, x: &[f64], u: [f64; 2], h: f64) -> Result<Vec<f64>> {
    ExactStepper::new(sys)?.step(x, u, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Empty when states were not retained.
    pub states: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub seed: Option<u64>,
}

impl Trajectory {
    pub fn csv_string(&self) -> String {
        let mut out = String::from("t,norm\n");
        for (t, v) in self.times.iter().zip(&self.norms) {
            let _ = writeln!(out, "{},{}", format_significant(*t, 10), format_significant(*v, 10));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<usize> {
        let text = self.csv_string();
        std::fs::write(path, text.as_bytes())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(text.len())
    }

    pub fn terminal_norm(&self) -> f64 {
        *self.norms.last().expect("trajectories start with the initial state")
    }
}

fn step_count(t_end: f64, h: f64) -> Result<u64> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("t_end must be positive, got {t_end}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let ratio = t_end / h;
    if ratio > STEP_BUDGET as f64 {
        return Err(Error::Budget {
            steps: ratio.ceil().min(u64::MAX as f64) as u64,
            limit: STEP_BUDGET,
        });
    }
    // a ratio within rounding of an integer is not padded with a sliver step
    let rounded = ratio.round();
    let steps = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded
    } else {
        ratio.ceil()
    };
    Ok((steps as u64).max(1))
}

/// Runs the stepper to `t_end` with step `h`; the final step is shortened
/// if h does not divide t_end.
pub fn simulate_with(
    stepper: &ExactStepper,
    x0: &[f64],
    input: &InputSignal,
    t_end: f64,
    h: f64,
    keep_states: bool,
) -> Result<Trajectory> {
    let steps = step_count(t_end, h)?;
    let full = stepper.factors(h)?;
    let last_h = t_end - h * (steps - 1) as f64;
    let last = if (last_h - h).abs() <= 1e-12 * h {
        None
    } else {
        Some(stepper.factors(last_h)?)
    };

    let mut z = stepper.to_modal(x0)?;
    let cap = steps as usize + 1;
    let mut times = Vec::with_capacity(cap);
    let mut norms = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(if keep_states { cap } else { 0 });
    let modal_norm = |z: &DVector<f64>| stepper.row_weight * z.norm();

    times.push(0.0);
    norms.push(stepper.state_norm(x0));
    if keep_states {
        states.push(x0.to_vec());
    }
    for k in 0..steps {
        let factors = match (&last, k + 1 == steps) {
            (Some(f), true) => f,
            _ => &full,
        };
        stepper.advance(&mut z, factors, input.sample(k as usize));
        let t = if k + 1 == steps { t_end } else { h * (k + 1) as f64 };
        times.push(t);
        if keep_states {
            let x = stepper.to_state(&z);
            norms.push(stepper.state_norm(&x));
            states.push(x);
        } else {
            norms.push(modal_norm(&z));
        }
    }
    Ok(Trajectory {
        times,
        states,
        norms,
        seed: input.seed,
    })
}

pub fn simulate(
    sys: &ClosedControlSystem,
    x0: &[f64],
    input: &InputSignal,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    simulate_with(&ExactStepper::new(sys)?, x0, input, t_end, h, true)
}

/// Interior samples of a continuous initial profile.
pub fn initial_from_fn<F: Fn(f64) -> f64>(sys: &ClosedControlSystem, f: F) -> Vec<f64> {
    restrict(f, &sys.space.grid)
}

/// min over samples of β(‖x₀‖, t) + γ(‖u‖_∞) − ‖x(t)‖ and where it occurs.
pub fn iss_margin<G: IssGains + ?Sized>(
    traj: &Trajectory,
    gains: &G,
    x0_norm: f64,
    input: &InputSignal,
) -> (f64, f64) {
    let bias = gains.gamma(input.sup_norm);
    traj.times
        .iter()
        .zip(&traj.norms)
        .map(|(&t, &v)| (gains.beta(x0_norm, t) + bias - v, t))
        .fold((f64::INFINITY, f64::NAN), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// Margin at the last sample.
pub fn terminal_margin<G: IssGains + ?Sized>(traj: &Trajectory, gains: &G, x0_norm: f64, input: &InputSignal) -> f64 {
    let t = *traj.times.last().expect("nonempty trajectory");
    gains.beta(x0_norm, t) + gains.gamma(input.sup_norm) - traj.terminal_norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssSuiteSettings {
    pub count: usize,
    pub base_seed: u64,
    pub t_end: f64,
    pub h: f64,
    /// Steps each bang-bang level is held.
    pub hold: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssCase {
    pub seed: u64,
    pub active: Boundary,
    pub sup_norm: f64,
    pub min_margin: f64,
    pub argmin_t: f64,
}

/// Seeded one-boundary bang-bang inputs from x₀ = 0, alternating the active
/// boundary, run in parallel; results in seed order.
pub fn iss_suite<G: IssGains + Sync + ?Sized>(
    stepper: &ExactStepper,
    gains: &G,
    settings: &IssSuiteSettings,
    norm: InputNorm,
) -> Result<Vec<IssCase>> {
    let steps = step_count(settings.t_end, settings.h)? as usize;
    let x0 = vec![0.0; stepper.dim()];
    (0..settings.count)
        .into_par_iter()
        .map(|i| {
            let seed = settings.base_seed.wrapping_add(i as u64);
            let active = if i % 2 == 0 { Boundary::Left } else { Boundary::Right };
            let input = InputSignal::bang_bang(seed, steps, settings.hold, active, norm)?;
            let traj = simulate_with(stepper, &x0, &input, settings.t_end, settings.h, false)?;
            let (min_margin, argmin_t) = iss_margin(&traj, gains, 0.0, &input);
            Ok(IssCase {
                seed,
                active,
                sup_norm: input.sup_norm,
                min_margin,
                argmin_t,
            })
        })
        .collect()
}

/// L² gap between E_n S_n(t) P_n x₀ and the exact heat solution, for each
/// resolution; passes when every doubling shrinks the gap by at least 2.
pub fn trotter_kato_check(
    pair: &ApproximationPair,
    a: f64,
    x0_modes: &[(usize, f64)],
    t: f64,
    n_list: &[usize],
) -> Result<DiagnosticReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InsufficientData(
            "need at least two increasing resolutions".into(),
        ));
    }
    let initial = analytic_heat_state(x0_modes, a, 0.0);
    let exact = analytic_heat_state(x0_modes, a, t);
    let mut report = DiagnosticReport::new("trotter_kato", Verdict::Pass, "");
    let mut gaps = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let sys = build_heat_dirichlet(n, a, SpaceConfig::L2)?;
        let grid = sys.space.grid;
        let x0 = restrict(|x| initial.eval(x), &grid);
        let xt = if t == 0.0 {
            x0
        } else {
            step_exact(&sys, &x0, [0.0, 0.0], t)?
        };
        let gap = extend(&xt, &grid)?.l2_distance(|x| exact.eval(x));
        report.push("gap", Some(n), gap);
        gaps.push(gap);
    }
    let mut worst_ratio = f64::INFINITY;
    for (w, ns) in gaps.windows(2).zip(n_list.windows(2)) {
        let ratio = w[0] / w[1];
        report.push("ratio", Some(ns[1]), ratio);
        worst_ratio = worst_ratio.min(ratio);
    }
    let verdict = if worst_ratio >= 2.0 { Verdict::Pass } else { Verdict::Warn };
    report.set_verdict(verdict);
    report.detail = format!(
        "t = {t}, smallest gap ratio {} (mu_p = {}, mu_e = {})",
        format_significant(worst_ratio, 4),
        pair.mu_p,
        pair.mu_e
    );
    Ok(report)
}

/// Constant unit input on both boundaries. The steady state is the constant
/// one, whose size depends on the state weight; the report lists the
/// estimate under the max and Euclidean input norms without asserting
/// either.
pub fn two_sided_diagnostic<G: IssGains + ?Sized>(
    sys: &ClosedControlSystem,
    gains: &G,
    t_end: f64,
    h: f64,
) -> Result<DiagnosticReport> {
    let stepper = ExactStepper::new(sys)?;
    let x0 = vec![0.0; stepper.dim()];
    let mut report = DiagnosticReport::new("two_sided", Verdict::Warn, "");
    let mut lines = Vec::new();
    for norm in [InputNorm::Max, InputNorm::Euclidean] {
        let input = InputSignal::constant([1.0, 1.0], norm)?;
        let traj = simulate_with(&stepper, &x0, &input, t_end, h, false)?;
        let (min_margin, _) = iss_margin(&traj, gains, 0.0, &input);
        let terminal = terminal_margin(&traj, gains, 0.0, &input);
        report.push(format!("{}.gamma_of_u", norm.name()), None, gains.gamma(input.sup_norm));
        report.push(format!("{}.terminal_norm", norm.name()), None, traj.terminal_norm());
        report.push(format!("{}.terminal_margin", norm.name()), None, terminal);
        report.push(format!("{}.min_margin", norm.name()), None, min_margin);
        lines.push(format!("{} u-norm margin {}", norm.name(), format_significant(terminal, 4)));
    }
    report.detail = format!(
        "u = (1, 1), state weight p = {}: {}; reported only",
        sys.space.weight_exponent,
        lines.join(", ")
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gains::LinearGains;
    use std::f64::consts::PI;

    fn heat(n: usize) -> ClosedControlSystem {
        build_heat_dirichlet(n, 1.0, SpaceConfig::L2).unwrap()
    }

    #[test]
    fn scalar_step() {
        let sys = heat(2);
        let x = step_exact(&sys, &[1.0], [0.0, 0.0], 0.1).unwrap();
        assert!((x[0] - (-0.8f64).exp()).abs() < 1e-15);
        let x = step_exact(&sys, &[0.0], [1.0, 1.0], 50.0).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        let stepper = ExactStepper::new(&sys).unwrap();
        assert!((stepper.steady_state([1.0, 1.0])[0] - 1.0).abs() < 1e-15);
        assert_eq!(step_exact(&sys, &[0.0], [0.0, 0.0], 0.3).unwrap(), vec![0.0]);
        assert!(step_exact(&sys, &[0.0], [0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn step_matches_dense_exponential() {
        let sys = heat(6);
        let h = 0.013;
        let a = sys.a_matrix.to_dense();
        let e = crate::numerics::expm_taylor(&(&a * h)).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.0, 0.2, 0.5, 0.9]);
        let u = DVector::from_vec(vec![0.7, -0.4]);
        let forced = a.clone().lu().solve(&((&e - DMatrix::identity(5, 5)) * (&sys.b_matrix * &u))).unwrap();
        let expect = &e * &x + forced;
        let got = step_exact(&sys, x.as_slice(), [0.7, -0.4], h).unwrap();
        for i in 0..5 {
            assert!((got[i] - expect[i]).abs() < 1e-12 * expect.amax(), "{i}");
        }
    }

    #[test]
    fn eigenvector_decays_exactly() {
        let sys = heat(1000);
        let x0 = initial_from_fn(&sys, |x| (PI * x).sin());
        let omega = -*sys.a_matrix.eigenvalues().unwrap().last().unwrap();
        let traj = simulate(&sys, &x0, &InputSignal::zero(), 0.5, 0.01).unwrap();
        for (t, v) in traj.times.iter().zip(&traj.norms) {
            let expect = (-omega * t).exp() * traj.norms[0];
            assert!((v - expect).abs() <= 1e-9 * expect, "t={t}");
        }
    }

    #[test]
    fn zero_stays_zero() {
        let sys = heat(20);
        let traj = simulate(&sys, &[0.0; 19], &InputSignal::zero(), 1.0, 0.1).unwrap();
        assert!(traj.norms.iter().all(|v| *v == 0.0));
        assert_eq!(traj.times.len(), 11);
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    #[test]
    fn one_sided_steady_state() {
        let n = 100;
        let sys = heat(n);
        let input = InputSignal::constant([1.0, 0.0], InputNorm::Max).unwrap();
        let traj = simulate(&sys, &vec![0.0; n - 1], &input, 5.0, 0.05).unwrap();
        let last = traj.states.last().unwrap();
        for (k, v) in last.iter().enumerate() {
            let expect = 1.0 - (k + 1) as f64 / n as f64;
            assert!((v - expect).abs() < 1e-10, "{k} {v} {expect}");
        }
        let nf = n as f64;
        let discrete = ((nf - 1.0) * (2.0 * nf - 1.0) / (6.0 * nf * nf)).sqrt();
        assert!((traj.terminal_norm() - discrete).abs() < 1e-10);
    }

    #[test]
    fn norms_recomputable_from_states() {
        let sys = heat(30);
        let input = InputSignal::bang_bang(5, 40, 3, Boundary::Right, InputNorm::Max).unwrap();
        let stepper = ExactStepper::new(&sys).unwrap();
        let x0 = initial_from_fn(&sys, |x| x * (1.0 - x));
        let kept = simulate_with(&stepper, &x0, &input, 0.4, 0.01, true).unwrap();
        let lean = simulate_with(&stepper, &x0, &input, 0.4, 0.01, false).unwrap();
        assert_eq!(kept.times.len(), kept.states.len());
        for ((x, v), w) in kept.states.iter().zip(&kept.norms).zip(&lean.norms) {
            let space = sys.space;
            assert!((space.norm(x).unwrap() - v).abs() < 1e-12);
            assert!((v - w).abs() < 1e-12);
        }
        assert!(lean.states.is_empty());
        assert_eq!(lean.seed, Some(5));
    }

    #[test]
    fn uneven_final_step() {
        let sys = heat(10);
        let x0 = initial_from_fn(&sys, |x| (PI * x).sin());
        let a = simulate(&sys, &x0, &InputSignal::zero(), 0.25, 0.1).unwrap();
        assert_eq!(a.times, vec![0.0, 0.1, 0.2, 0.25]);
        let b = simulate(&sys, &x0, &InputSignal::zero(), 0.25, 0.05).unwrap();
        assert!((a.terminal_norm() - b.terminal_norm()).abs() < 1e-14);
    }

    #[test]
    fn budget_enforced() {
        let sys = heat(4);
        let err = simulate(&sys, &[0.0; 3], &InputSignal::zero(), 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::Budget { limit: STEP_BUDGET, .. }));
        assert!(simulate(&sys, &[0.0; 3], &InputSignal::zero(), 0.0, 0.1).is_err());
    }

    #[test]
    fn bang_bang_reproducible() {
        let a = InputSignal::bang_bang(42, 100, 4, Boundary::Left, InputNorm::Max).unwrap();
        let b = InputSignal::bang_bang(42, 100, 4, Boundary::Left, InputNorm::Max).unwrap();
        let c = InputSignal::bang_bang(43, 100, 4, Boundary::Left, InputNorm::Max).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
        assert!(a.values.iter().all(|u| u[1] == 0.0 && [-1.0, 0.0, 1.0].contains(&u[0])));
        assert!(a.values.chunks(4).all(|c| c.iter().all(|u| *u == c[0])));
        let expected = a.values.iter().map(|u| u[0].abs()).fold(0.0, f64::max);
        assert_eq!(a.sup_norm, expected);
        let e = InputSignal::constant([1.0, 1.0], InputNorm::Euclidean).unwrap();
        assert!((e.sup_norm - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn margins() {
        let sys = heat(50);
        let gains = LinearGains {
            beta_m: 1.0,
            beta_omega: 9.8647,
            gamma_slope: 0.8989,
        };
        let x0 = initial_from_fn(&sys, |x| (PI * x).sin());
        let x0_norm = sys.space.norm(&x0).unwrap();
        let traj = simulate(&sys, &x0, &InputSignal::zero(), 1.0, 0.01).unwrap();
        let (m, t) = iss_margin(&traj, &gains, x0_norm, &InputSignal::zero());
        assert!(m >= 0.0, "{m} at {t}");
    }

    #[test]
    fn trotter_kato_examples() {
        let pair = ApproximationPair::new(16).unwrap();
        for (modes, t) in [(vec![(1usize, 1.0)], 0.1), (vec![(3, 1.0)], 0.05)] {
            let r = trotter_kato_check(&pair, 1.0, &modes, t, &[16, 32, 64]).unwrap();
            for v in r.values.iter().filter(|v| v.label == "ratio") {
                assert!((3.0..=5.0).contains(&v.value), "{}", r.to_text());
            }
            assert_eq!(r.verdict(), Verdict::Pass);
        }
        let r0 = trotter_kato_check(&pair, 1.0, &[(1, 1.0)], 0.0, &[16, 32]).unwrap();
        let grid = crate::systems::GridSpec::new(16).unwrap();
        let interp = extend(&restrict(|x| (PI * x).sin(), &grid), &grid)
            .unwrap()
            .l2_distance(|x| (PI * x).sin());
        assert!((r0.values[0].value - interp).abs() < 1e-15);
    }

    #[test]
    fn two_sided_reports_both_readings() {
        let sys = heat(100);
        let gains = LinearGains {
            beta_m: 1.0,
            beta_omega: 9.8647,
            gamma_slope: 0.8989,
        };
        let r = two_sided_diagnostic(&sys, &gains, 4.0, 0.05).unwrap();
        assert_eq!(r.verdict(), Verdict::Warn);
        let get = |k: &str| r.values.iter().find(|v| v.label == k).unwrap().value;
        let steady = (99.0f64 / 100.0).sqrt();
        assert!((get("max.terminal_norm") - steady).abs() < 1e-9);
        assert!((get("max.terminal_margin") - (0.8989 - steady)).abs() < 1e-9);
        assert!((get("euclidean.gamma_of_u") - 0.8989 * 2f64.sqrt()).abs() < 1e-12);
    }
}
