//! The `sweep`, `gains`, `simulate`, `check` and `plot` commands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use issgain::fattorini::{
    close_system, closure_mismatch, consistency_diagnostic, estimate_mu, resolvent_gap,
    right_inverse_gap, sector_diagnostic, DiagnosticReport, PathSpec, Probe, Verdict,
};
use issgain::gains::{
    assemble_gains, frac_control_norm, growth_bound, lemma_frac_semigroup_check, sector_bound,
    GainBundle,
};
use issgain::simulate::{
    iss_margin, iss_suite, simulate_with, terminal_margin, trotter_kato_check,
    two_sided_diagnostic, ExactStepper, InputSignal, IssSuiteSettings, Trajectory,
};
use issgain::sweep::{
    aggregate, format_significant, limit_gains, parse_csv, richardson, run_sweep_with,
    write_csv, Aggregate, SweepConfig, SweepRecord,
};
use issgain::systems::{
    build_heat_dirichlet, build_preclosure_heat, restrict, ApproximationPair, SpaceConfig,
};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::plot::{Chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Sweep,
    Gains,
    Simulate,
    Check,
    Plot,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error(transparent)]
    Core(#[from] issgain::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::MissingInput(_) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Relative slack for margins that vanish identically, such as a pure
/// eigenvector decaying exactly at the rate used in β.
const MARGIN_ROUNDING: f64 = 1e-9;

/// Runs `command`, writing human-readable output to `out`. Returns the exit
/// status: 0 on success, 1 when a verdict or margin fails.
pub fn dispatch(command: Command, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    cfg.validate()?;
    match command {
        Command::Sweep => run_sweep_command(cfg, out),
        Command::Gains => run_gains_command(cfg, out),
        Command::Simulate => run_simulate_command(cfg, out),
        Command::Check => run_check_command(cfg, out),
        Command::Plot => run_plot_command(cfg, out),
    }
}

fn fmt10(x: f64) -> String {
    format_significant(x, 10)
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn lambda_path(cfg: &RunConfig) -> CliResult<PathSpec> {
    Ok(PathSpec::log_spaced(cfg.lambda_min, cfg.lambda_max, cfg.lambda_count)?)
}

fn sweep_records(cfg: &RunConfig) -> CliResult<Vec<SweepRecord>> {
    let sc = SweepConfig {
        n_schedule: cfg.n_schedule.clone(),
        diffusion: cfg.a,
        alpha: cfg.alpha,
        path: lambda_path(cfg)?,
        space: SpaceConfig::new(cfg.sweep_weight(), cfg.u_norm)?,
        threads: cfg.threads,
    };
    Ok(run_sweep_with(&sc)?)
}

fn limits(cfg: &RunConfig, records: &[SweepRecord]) -> CliResult<Aggregate> {
    let mut agg = aggregate(records, cfg.tol_omega, cfg.tol_frac, cfg.mu_p, cfg.mu_e)?;
    if cfg.richardson {
        agg.omega_hat.value = richardson(records, |r| r.omega_n)?;
        agg.frac_limit.value = richardson(records, |r| r.frac_norm_n)?;
    }
    Ok(agg)
}

fn compute_bundle(cfg: &RunConfig) -> CliResult<(Vec<SweepRecord>, Aggregate, GainBundle)> {
    let records = sweep_records(cfg)?;
    let agg = limits(cfg, &records)?;
    let bundle = limit_gains(&agg, cfg.alpha, cfg.theta, cfg.mu_p, cfg.mu_e)?;
    Ok((records, agg, bundle))
}

fn run_sweep_command(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let records = sweep_records(cfg)?;
    ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join("sweep.csv");
    let bytes = write_csv(&records, &path)?;
    writeln!(out, "{:>8}  {:>16}  {:>16}  {:>16}", "n", "omega_n", "D_n", "frac_norm_n")?;
    for r in &records {
        writeln!(
            out,
            "{:>8}  {:>16}  {:>16}  {:>16}",
            r.n,
            fmt10(r.omega_n),
            fmt10(r.d_n),
            fmt10(r.frac_norm_n)
        )?;
    }
    if records.len() >= 2 {
        let agg = limits(cfg, &records)?;
        writeln!(
            out,
            "omega limit {} (last change {:.3e}, {}), D sup {}, frac limit {} (last change {:.3e}, {})",
            fmt10(agg.omega_hat.value),
            agg.omega_hat.last_delta,
            converged_word(agg.omega_hat.converged),
            fmt10(agg.d_hat.value),
            fmt10(agg.frac_limit.value),
            agg.frac_limit.last_delta,
            converged_word(agg.frac_limit.converged),
        )?;
    }
    writeln!(out, "wrote {} ({bytes} bytes)", path.display())?;
    Ok(0)
}

fn converged_word(flag: bool) -> &'static str {
    if flag {
        "converged"
    } else {
        "not converged"
    }
}

/// Key-value lines and aligned text describing a gain bundle.
pub fn gains_report(bundle: &GainBundle, agg: &Aggregate, last_n: usize) -> (String, String) {
    let rows: Vec<(&str, String)> = vec![
        ("alpha", fmt10(bundle.alpha)),
        ("theta", fmt10(bundle.theta)),
        ("omega_hat", fmt10(bundle.growth.omega)),
        ("omega_converged", agg.omega_hat.converged.to_string()),
        ("omega_last_delta", fmt10(agg.omega_hat.last_delta)),
        ("m_hat", fmt10(bundle.growth.m)),
        ("d_hat", fmt10(bundle.sector.d)),
        ("frac_norm", fmt10(bundle.frac_norm_limit)),
        ("frac_converged", agg.frac_limit.converged.to_string()),
        ("frac_last_delta", fmt10(agg.frac_limit.last_delta)),
        ("finest_n", last_n.to_string()),
        ("mu_p", fmt10(bundle.mu_p)),
        ("mu_e", fmt10(bundle.mu_e)),
        ("k1", fmt10(bundle.k1)),
        ("k2", fmt10(bundle.k2)),
        ("kappa", fmt10(bundle.kappa)),
        ("beta_m", fmt10(bundle.beta_m)),
        ("beta_omega", fmt10(bundle.beta_omega)),
        ("gamma_slope", fmt10(bundle.gamma_slope)),
    ];
    let mut kv = String::new();
    let mut text = String::new();
    for (k, v) in &rows {
        let _ = writeln!(kv, "{k}={v}");
        let _ = writeln!(text, "{k:<18} {v}");
    }
    let _ = writeln!(
        text,
        "beta(s, t) = {} * exp(-{} t) * s",
        format_significant(bundle.beta_m, 6),
        format_significant(bundle.beta_omega, 6)
    );
    let _ = writeln!(text, "gamma(s)   = {} * s", format_significant(bundle.gamma_slope, 6));
    (text, kv)
}

fn run_gains_command(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let (records, agg, bundle) = compute_bundle(cfg)?;
    let last_n = records.iter().map(|r| r.n).max().unwrap_or(0);
    let (text, kv) = gains_report(&bundle, &agg, last_n);
    ensure_dir(&cfg.output_dir)?;
    write_file(&cfg.output_dir.join("gains.txt"), &text)?;
    write_file(&cfg.output_dir.join("gains.kv"), &kv)?;
    out.write_all(text.as_bytes())?;
    Ok(0)
}

struct CaseSummary {
    label: String,
    x0_norm: f64,
    u_sup: f64,
    min_margin: f64,
    argmin_t: f64,
    terminal_margin: f64,
}

fn run_simulate_command(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let (_, _, bundle) = compute_bundle(cfg)?;
    let space = SpaceConfig::new(cfg.simulate_weight(), cfg.u_norm)?;
    let sys = build_heat_dirichlet(cfg.sim_n, cfg.a, space)?;
    // the simulated system may decay slower than the limit; β uses the smaller rate
    let mut gains = bundle.linear();
    gains.beta_omega = gains.beta_omega.min(growth_bound(&sys)?.omega);
    let stepper = ExactStepper::new(&sys)?;
    let dim = stepper.dim();
    ensure_dir(&cfg.output_dir)?;

    let zero_state = vec![0.0; dim];
    let sine = restrict(|x| (std::f64::consts::PI * x).sin(), &sys.space.grid);
    let cases: Vec<(&str, Vec<f64>, InputSignal)> = vec![
        ("sine", sine, InputSignal::zero()),
        ("one_sided", zero_state.clone(), InputSignal::constant([1.0, 0.0], cfg.u_norm)?),
    ];
    let mut summaries = Vec::new();
    for (label, x0, input) in &cases {
        let traj = simulate_with(&stepper, x0, input, cfg.t_end, cfg.h, false)?;
        let x0_norm = sys.space.norm(x0)?;
        let (min_margin, argmin_t) = iss_margin(&traj, &gains, x0_norm, input);
        summaries.push(CaseSummary {
            label: label.to_string(),
            x0_norm,
            u_sup: input.sup_norm,
            min_margin,
            argmin_t,
            terminal_margin: terminal_margin(&traj, &gains, x0_norm, input),
        });
        traj.write_csv(&cfg.output_dir.join(format!("traj_{label}.csv")))?;
    }

    let two_input = InputSignal::constant([1.0, 1.0], cfg.u_norm)?;
    let two_traj = simulate_with(&stepper, &zero_state, &two_input, cfg.t_end, cfg.h, false)?;
    two_traj.write_csv(&cfg.output_dir.join("traj_two_sided.csv"))?;
    let two_sided = two_sided_diagnostic(&sys, &gains, cfg.t_end, cfg.h)?;

    let settings = IssSuiteSettings {
        count: cfg.inputs,
        base_seed: cfg.seed,
        t_end: cfg.t_end,
        h: cfg.h,
        hold: cfg.hold,
    };
    let suite = iss_suite(&stepper, &gains, &settings, cfg.u_norm)?;
    if let Some(first) = suite.first() {
        let steps = (cfg.t_end / cfg.h).ceil() as usize;
        let input = InputSignal::bang_bang(first.seed, steps.max(1), cfg.hold, first.active, cfg.u_norm)?;
        let traj: Trajectory = simulate_with(&stepper, &zero_state, &input, cfg.t_end, cfg.h, false)?;
        traj.write_csv(&cfg.output_dir.join("traj_bangbang.csv"))?;
        summaries.push(CaseSummary {
            label: "bangbang".into(),
            x0_norm: 0.0,
            u_sup: input.sup_norm,
            min_margin: first.min_margin,
            argmin_t: first.argmin_t,
            terminal_margin: terminal_margin(&traj, &gains, 0.0, &input),
        });
    }

    let mut margins_csv = String::from("seed,boundary,sup_norm,min_margin,argmin_t\n");
    for c in &suite {
        let _ = writeln!(
            margins_csv,
            "{},{},{},{},{}",
            c.seed,
            match c.active {
                issgain::simulate::Boundary::Left => "left",
                issgain::simulate::Boundary::Right => "right",
            },
            fmt10(c.sup_norm),
            fmt10(c.min_margin),
            fmt10(c.argmin_t)
        );
    }
    write_file(&cfg.output_dir.join("margins.csv"), &margins_csv)?;

    let suite_min = suite.iter().map(|c| c.min_margin).fold(f64::INFINITY, f64::min);
    let mut kv = String::new();
    let mut text = String::new();
    let _ = writeln!(kv, "n={}", cfg.sim_n);
    let _ = writeln!(kv, "weight_exponent={}", cfg.simulate_weight());
    let _ = writeln!(kv, "u_norm={}", cfg.u_norm.name());
    let _ = writeln!(kv, "beta_m={}", fmt10(gains.beta_m));
    let _ = writeln!(kv, "beta_omega={}", fmt10(gains.beta_omega));
    let _ = writeln!(kv, "gamma_slope={}", fmt10(gains.gamma_slope));
    let _ = writeln!(
        text,
        "n = {}, p = {}, u-norm = {}, gamma slope {}",
        cfg.sim_n,
        cfg.simulate_weight(),
        cfg.u_norm.name(),
        fmt10(gains.gamma_slope)
    );
    for s in &summaries {
        let _ = writeln!(kv, "{}.x0_norm={}", s.label, fmt10(s.x0_norm));
        let _ = writeln!(kv, "{}.u_sup={}", s.label, fmt10(s.u_sup));
        let _ = writeln!(kv, "{}.min_margin={}", s.label, fmt10(s.min_margin));
        let _ = writeln!(kv, "{}.argmin_t={}", s.label, fmt10(s.argmin_t));
        let _ = writeln!(kv, "{}.terminal_margin={}", s.label, fmt10(s.terminal_margin));
        let _ = writeln!(
            text,
            "{:<10} min margin {:>14} at t = {:<10} terminal margin {}",
            s.label,
            fmt10(s.min_margin),
            format_significant(s.argmin_t, 4),
            fmt10(s.terminal_margin)
        );
    }
    let _ = writeln!(kv, "two_sided.x0_norm={}", fmt10(0.0));
    let _ = writeln!(kv, "two_sided.u_sup={}", fmt10(two_input.sup_norm));
    let _ = writeln!(kv, "suite.count={}", suite.len());
    let _ = writeln!(kv, "suite.min_margin={}", fmt10(suite_min));
    kv.push_str(&two_sided.to_kv());
    let _ = writeln!(
        text,
        "{} seeded bang-bang inputs: smallest margin {}",
        suite.len(),
        fmt10(suite_min)
    );
    text.push_str(&two_sided.to_text());
    write_file(&cfg.output_dir.join("simulate.kv"), &kv)?;
    write_file(&cfg.output_dir.join("simulate.txt"), &text)?;
    out.write_all(text.as_bytes())?;

    let failed = summaries.iter().any(|s| s.min_margin < -MARGIN_ROUNDING * (gains.beta_m * s.x0_norm + gains.gamma_slope * s.u_sup).max(1.0))
        || suite.iter().any(|c| !(c.min_margin > 0.0));
    Ok(if failed { 1 } else { 0 })
}

fn closure_report(a: f64) -> CliResult<DiagnosticReport> {
    let mut worst: f64 = 0.0;
    for n in 2..=64 {
        let closed = close_system(&build_preclosure_heat(n, a)?, SpaceConfig::L2)?;
        let direct = build_heat_dirichlet(n, a, SpaceConfig::L2)?;
        worst = worst.max(closure_mismatch(&closed, &direct)?);
    }
    let verdict = if worst == 0.0 { Verdict::Pass } else { Verdict::Fail };
    let mut report = DiagnosticReport::new(
        "closure",
        verdict,
        "closed pre-closure systems against the direct Dirichlet builder, n = 2..64",
    );
    report.push("max_abs_difference", None, worst);
    Ok(report)
}

fn lemma_reports(cfg: &RunConfig) -> CliResult<Vec<DiagnosticReport>> {
    let path = lambda_path(cfg)?;
    let t_path = PathSpec::log_spaced(1e-4, 10.0, 200)?;
    let mut reports = Vec::new();
    for n in [100usize, 1000] {
        let sys = build_heat_dirichlet(n, cfg.a, SpaceConfig::new(cfg.sweep_weight(), cfg.u_norm)?)?;
        let gb = growth_bound(&sys)?;
        let sb = sector_bound(&sys, &path)?;
        let frac = frac_control_norm(&sys, cfg.alpha)?;
        let bundle = assemble_gains(cfg.alpha, cfg.theta, &gb, &sb, frac, cfg.mu_p, cfg.mu_e)?;
        reports.push(lemma_frac_semigroup_check(&sys, &bundle, t_path.lambdas())?);
    }
    Ok(reports)
}

fn mu_report(cfg: &RunConfig) -> CliResult<DiagnosticReport> {
    let probes = [Probe::sine(1), Probe::sine(2), Probe::parabola()];
    let (mu_p, mu_e) = estimate_mu(&probes, &[16, 64, 256], 20, cfg.seed)?;
    let ok = mu_p <= cfg.mu_p * (1.0 + 1e-9) && mu_e <= cfg.mu_e * (1.0 + 1e-9);
    let mut report = DiagnosticReport::new(
        "norm_bounds",
        if ok { Verdict::Pass } else { Verdict::Warn },
        format!(
            "sampled restriction/extension ratios against configured mu_p = {}, mu_e = {}",
            cfg.mu_p, cfg.mu_e
        ),
    );
    report.push("mu_p_estimate", None, mu_p);
    report.push("mu_e_estimate", None, mu_e);
    Ok(report)
}

/// All diagnostics in a fixed order.
pub fn run_diagnostics(cfg: &RunConfig) -> CliResult<Vec<DiagnosticReport>> {
    let path = lambda_path(cfg)?;
    let space = SpaceConfig::new(cfg.sweep_weight(), cfg.u_norm)?;
    let pair = ApproximationPair::with_bounds(16, cfg.mu_p, cfg.mu_e)?;
    let mut reports = vec![closure_report(cfg.a)?];

    let systems = cfg
        .n_schedule
        .iter()
        .map(|&n| build_heat_dirichlet(n, cfg.a, space))
        .collect::<Result<Vec<_>, _>>()?;
    if systems.len() >= 2 {
        reports.push(sector_diagnostic(&systems, &path)?);
    }
    reports.push(resolvent_gap(&pair, cfg.a, 16, 32, &path, &[(1, 1.0)])?);
    let consistency_systems = [16usize, 64, 256]
        .iter()
        .map(|&n| build_heat_dirichlet(n, cfg.a, SpaceConfig::L2))
        .collect::<Result<Vec<_>, _>>()?;
    reports.push(consistency_diagnostic(
        &consistency_systems,
        &[Probe::sine(1), Probe::sine(3), Probe::parabola()],
    )?);
    let pres = [4usize, 16, 64]
        .iter()
        .map(|&n| build_preclosure_heat(n, cfg.a))
        .collect::<Result<Vec<_>, _>>()?;
    reports.push(right_inverse_gap(&pres)?);
    reports.push(trotter_kato_check(&pair, cfg.a, &[(1, 1.0)], 0.1, &[16, 32, 64])?);
    reports.extend(lemma_reports(cfg)?);
    reports.push(mu_report(cfg)?);
    Ok(reports)
}

fn run_check_command(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let reports = run_diagnostics(cfg)?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.to_text());
    }
    let fails = reports.iter().filter(|r| r.verdict() == Verdict::Fail).count();
    let warns = reports.iter().filter(|r| r.verdict() == Verdict::Warn).count();
    let _ = writeln!(
        text,
        "{} diagnostics: {} pass, {warns} warn, {fails} fail",
        reports.len(),
        reports.len() - warns - fails
    );
    ensure_dir(&cfg.output_dir)?;
    write_file(&cfg.output_dir.join("check.txt"), &text)?;
    out.write_all(text.as_bytes())?;
    Ok(if fails > 0 { 1 } else { 0 })
}

fn read_required(path: PathBuf) -> CliResult<String> {
    fs::read_to_string(&path).map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))
}

fn parse_kv(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn parse_trajectory(text: &str, origin: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("t,norm") {
        return Err(CliError::MissingInput(format!("{}: expected header 't,norm'", origin.display())));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (t, v) = l
                .split_once(',')
                .ok_or_else(|| CliError::MissingInput(format!("{}: malformed row '{l}'", origin.display())))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::MissingInput(format!("{}: '{s}': {e}", origin.display())))
            };
            Ok((parse(t)?, parse(v)?))
        })
        .collect()
}

fn sweep_chart(records: &[SweepRecord], title: &str, y_label: &str, field: fn(&SweepRecord) -> f64, reference: Option<(String, f64)>) -> Chart {
    Chart {
        title: title.into(),
        x_label: "n".into(),
        y_label: y_label.into(),
        log_x: true,
        series: vec![Series {
            name: y_label.into(),
            points: records.iter().map(|r| (r.n as f64, field(r))).collect(),
            dashed: false,
        }],
        references: reference.into_iter().collect(),
    }
}

fn run_plot_command(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<i32> {
    let dir = &cfg.output_dir;
    let sweep_path = dir.join("sweep.csv");
    let records = parse_csv(&read_required(sweep_path.clone())?)
        .map_err(|e| CliError::MissingInput(format!("{}: {e}", sweep_path.display())))?;
    if records.is_empty() {
        return Err(CliError::MissingInput(format!("{}: no rows", sweep_path.display())));
    }
    let limit = std::f64::consts::PI.powi(2) * cfg.a;
    let charts = [
        (
            "fig_omegan.svg",
            sweep_chart(&records, "decay rate of the semigroup", "omega_n", |r| r.omega_n, Some(("a pi^2".into(), limit))),
        ),
        (
            "fig_dn.svg",
            sweep_chart(&records, "resolvent constant on the real ray", "D_n", |r| r.d_n, None),
        ),
        (
            "fig_fracnorm.svg",
            sweep_chart(&records, "fractional control norm", "|(-A_n)^(alpha-1) B_n|", |r| r.frac_norm_n, None),
        ),
    ];
    let mut written = Vec::new();
    for (name, chart) in &charts {
        write_file(&dir.join(name), &chart.render())?;
        written.push(name.to_string());
    }

    let sim_kv = fs::read_to_string(dir.join("simulate.kv")).ok().map(|t| parse_kv(&t));
    for label in ["sine", "one_sided", "two_sided", "bangbang"] {
        let traj_path = dir.join(format!("traj_{label}.csv"));
        let Ok(text) = fs::read_to_string(&traj_path) else {
            continue;
        };
        let points = parse_trajectory(&text, &traj_path)?;
        let mut series = vec![Series {
            name: "|x(t)|".into(),
            points: points.clone(),
            dashed: false,
        }];
        if let Some(kv) = &sim_kv {
            let get = |k: &str| kv.get(k).and_then(|v| v.parse::<f64>().ok());
            if let (Some(m), Some(w), Some(g), Some(x0), Some(u)) = (
                get("beta_m"),
                get("beta_omega"),
                get("gamma_slope"),
                get(&format!("{label}.x0_norm")),
                get(&format!("{label}.u_sup")),
            ) {
                series.push(Series {
                    name: "beta + gamma".into(),
                    points: points.iter().map(|&(t, _)| (t, m * (-w * t).exp() * x0 + g * u)).collect(),
                    dashed: true,
                });
            }
        }
        let chart = Chart {
            title: format!("trajectory '{label}' against the ISS bound"),
            x_label: "t".into(),
            y_label: "norm".into(),
            log_x: false,
            series,
            references: Vec::new(),
        };
        let name = format!("fig_traj_{label}.svg");
        write_file(&dir.join(&name), &chart.render())?;
        written.push(name);
    }
    for name in &written {
        writeln!(out, "wrote {}", dir.join(name).display())?;
    }
    Ok(0)
}
