use std::f64::consts::PI;

use issgain::fattorini::PathSpec;
use issgain::gains::{assemble_gains, GrowthBound, IssGains, SectorBound, DEFAULT_THETA};
use issgain::simulate::{initial_from_fn, simulate, InputSignal};
use issgain::sweep::{aggregate, limit_gains, run_sweep};
use issgain::systems::{build_heat_dirichlet, SpaceConfig};

fn omega_closed(n: usize, a: f64) -> f64 {
    4.0 * a * (n * n) as f64 * (PI / (2.0 * n as f64)).sin().powi(2)
}

#[test]
fn sweep_matches_closed_forms() {
    let path = PathSpec::default_ray();
    let records = run_sweep(&[12, 48, 192], 2.0, 0.5, &path, SpaceConfig::SQUARED_SPACING).unwrap();
    for r in &records {
        let w = omega_closed(r.n, 2.0);
        assert!((r.omega_n - w).abs() < 1e-10 * w);
        let d = path
            .lambdas()
            .iter()
            .map(|l| (l + 1.0) / (l + w))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((r.d_n - d).abs() < 1e-12);
    }
}

#[test]
fn limit_gains_from_sweep() {
    let path = PathSpec::default_ray();
    let records = run_sweep(&[250, 500], 1.0, 0.5, &path, SpaceConfig::SQUARED_SPACING).unwrap();
    let agg = aggregate(&records, 1e-3, 1e-6, 1.0, 1.0).unwrap();
    assert!(agg.omega_hat.converged && agg.frac_limit.converged);
    let bundle = limit_gains(&agg, 0.5, DEFAULT_THETA, 1.0, 1.0).unwrap();
    assert!(bundle.recompute_deviation().unwrap() < 1e-12);
    assert!((0.896..=0.903).contains(&bundle.gamma_slope), "{}", bundle.gamma_slope);
}

#[test]
fn headline_constants_chain() {
    let gb = GrowthBound { m: 1.0, omega: 9.8647 };
    let sb = SectorBound { d: 0.9991, sector_angle: 0.0, lambda_max_used: 1e4 };
    let b = assemble_gains(0.5, DEFAULT_THETA, &gb, &sb, 1.4136, 1.0, 1.0).unwrap();
    assert!((b.k1 - 9.8647f64.sqrt()).abs() < 1e-9);
    assert!((b.k2 - 0.9991 / PI.sqrt()).abs() < 1e-8);
    let kappa = 1.0 / 9.8647f64.sqrt() + b.k2 * PI.sqrt() / 9.8647f64.sqrt();
    assert!((b.kappa - kappa).abs() < 1e-9);
    assert!((b.gamma(1.0) - kappa * 1.4136).abs() < 1e-9);
    assert!((b.beta(2.0, 0.5) - 2.0 * (-9.8647f64 * 0.5).exp()).abs() < 1e-14);
}

#[test]
fn every_discrete_mode_decays_exactly() {
    let n = 100;
    let sys = build_heat_dirichlet(n, 1.0, SpaceConfig::L2).unwrap();
    for k in [1usize, 7, 50, 99] {
        let x0 = initial_from_fn(&sys, |x| (k as f64 * PI * x).sin());
        let lambda = -omega_closed(n, 1.0) * ((k as f64 * PI / (2.0 * n as f64)).sin()
            / (PI / (2.0 * n as f64)).sin())
        .powi(2);
        let traj = simulate(&sys, &x0, &InputSignal::zero(), 0.05, 0.005).unwrap();
        for (t, x) in traj.times.iter().zip(&traj.states) {
            let f = (lambda * t).exp();
            for (xi, x0i) in x.iter().zip(&x0) {
                assert!((xi - f * x0i).abs() <= 1e-10 * x0.iter().fold(0.0f64, |m, v| m.max(v.abs())), "k={k} t={t}");
            }
        }
    }
}
