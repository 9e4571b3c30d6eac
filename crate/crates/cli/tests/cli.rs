use std::path::Path;
use std::process::{Command, Output};

use issgain_cli::{dispatch, parse_config, Command as Cmd, RunConfig};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_issgain"))
        .args(args)
        .arg("--output_dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn small(dir: &Path) -> RunConfig {
    let mut cfg = parse_config("n_schedule = 50,100,200\nsim_n = 60\ninputs = 6\nt_end = 1.0\nh = 0.02").unwrap();
    cfg.output_dir = dir.to_path_buf();
    cfg
}

#[test]
fn gains_with_defaults_lands_near_published_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gains"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let kv = std::fs::read_to_string(dir.path().join("gains.kv")).unwrap();
    let slope: f64 = kv
        .lines()
        .find_map(|l| l.strip_prefix("gamma_slope="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.896..=0.903).contains(&slope), "{slope}");
    assert!(dir.path().join("gains.txt").exists());
}

#[test]
fn check_on_heat_family_has_no_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut buf = Vec::new();
    let code = dispatch(Cmd::Check, &small(dir.path()), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(code, 0, "{text}");
    assert!(!text.contains("[FAIL]"));
    assert_eq!(std::fs::read_to_string(dir.path().join("check.txt")).unwrap(), text);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["gains", "--alpha", "1.5"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["plot"], &dir.path().join("empty")).status.code(), Some(2));
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "alpha = 0.5\nspeed = 3\n").unwrap();
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n_schedule = 8,16\n# comment\na = 2\n").unwrap();
    let out = run(&["sweep", "--config", cfg.to_str().unwrap(), "--n_schedule", "4,8,16"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let ns: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, vec!["4", "8", "16"]);
    // a = 2 doubles the decay rate at n = 4: 2·16·4 sin²(π/8)
    let omega: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let expect = 2.0 * 64.0 * (std::f64::consts::PI / 8.0).sin().powi(2);
    assert!((omega - expect).abs() < 1e-8);
}

#[test]
fn simulate_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let mut sink = Vec::new();
    assert_eq!(dispatch(Cmd::Sweep, &cfg, &mut sink).unwrap(), 0);
    assert_eq!(dispatch(Cmd::Simulate, &cfg, &mut sink).unwrap(), 0);
    for label in ["sine", "one_sided", "two_sided", "bangbang"] {
        let text = std::fs::read_to_string(dir.path().join(format!("traj_{label}.csv"))).unwrap();
        assert!(text.starts_with("t,norm\n"));
        assert_eq!(text.lines().count(), 52);
    }
    let margins = std::fs::read_to_string(dir.path().join("margins.csv")).unwrap();
    assert_eq!(margins.lines().count(), 7);

    let first = std::fs::read(dir.path().join("simulate.kv")).unwrap();
    dispatch(Cmd::Simulate, &cfg, &mut sink).unwrap();
    assert_eq!(first, std::fs::read(dir.path().join("simulate.kv")).unwrap());

    assert_eq!(dispatch(Cmd::Plot, &cfg, &mut sink).unwrap(), 0);
    for fig in ["fig_omegan.svg", "fig_dn.svg", "fig_fracnorm.svg", "fig_traj_one_sided.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(fig)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"), "{fig}");
    }
}
