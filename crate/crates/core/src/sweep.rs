//! Per-resolution constants over a schedule of grid sizes, limit
//! aggregation and the CSV table.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fattorini::PathSpec;
use crate::gains::{
    assemble_gains, frac_control_norm, growth_bound, sector_bound, GainBundle, GrowthBound,
    SectorBound,
};
use crate::systems::{build_heat_dirichlet, SpaceConfig};

pub const CSV_HEADER: &str = "n,omegan,Dn,AnalphaBnnorm";

pub const DEFAULT_SCHEDULE: [usize; 5] = [250, 500, 1000, 2000, 4000];

/// Formats `x` with `digits` significant digits. Magnitudes between 1e−5
/// and 1e15 use positional notation, everything else scientific.
pub fn format_significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "at least one significant digit");
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exponent: i32 = sci[sci.find('e').expect("exponent marker") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-5..15).contains(&exponent) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One row of the resolution table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub omega_n: f64,
    pub d_n: f64,
    pub frac_norm_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_schedule: Vec<usize>,
    pub diffusion: f64,
    pub alpha: f64,
    pub path: PathSpec,
    pub space: SpaceConfig,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_schedule: DEFAULT_SCHEDULE.to_vec(),
            diffusion: 1.0,
            alpha: 0.5,
            path: PathSpec::default_ray(),
            space: SpaceConfig::SQUARED_SPACING,
            threads: None,
        }
    }
}

/// Constants of the heat system at a single resolution.
pub fn sweep_one(n: usize, a: f64, alpha: f64, path: &PathSpec, space_cfg: SpaceConfig) -> Result<SweepRecord> {
    let wrap = |source: Error| Error::AtResolution {
        n,
        source: Box::new(source),
    };
    let sys = build_heat_dirichlet(n, a, space_cfg).map_err(wrap)?;
    let growth = growth_bound(&sys).map_err(wrap)?;
    let sector = sector_bound(&sys, path).map_err(wrap)?;
    let frac = frac_control_norm(&sys, alpha).map_err(wrap)?;
    let record = SweepRecord {
        n,
        omega_n: growth.omega,
        d_n: sector.d,
        frac_norm_n: frac,
    };
    if ![record.omega_n, record.d_n, record.frac_norm_n].iter().all(|v| v.is_finite()) {
        return Err(wrap(Error::Numerical(format!("non-finite constants {record:?}"))));
    }
    Ok(record)
}

pub fn run_sweep(
    n_schedule: &[usize],
    a: f64,
    alpha: f64,
    path: &PathSpec,
    space_cfg: SpaceConfig,
) -> Result<Vec<SweepRecord>> {
    validate_schedule(n_schedule)?;
    n_schedule
        .par_iter()
        .map(|&n| sweep_one(n, a, alpha, path, space_cfg))
        .collect()
}

/// [`run_sweep`] on a dedicated pool when a thread count is configured.
pub fn run_sweep_with(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let run = || run_sweep(&cfg.n_schedule, cfg.diffusion, cfg.alpha, &cfg.path, cfg.space);
    match cfg.threads {
        None => run(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Construction(format!("thread pool: {e}")))?
            .install(run),
    }
}

fn validate_schedule(n_schedule: &[usize]) -> Result<()> {
    if n_schedule.is_empty() {
        return Err(Error::InsufficientData("empty resolution schedule".into()));
    }
    if let Some(&n) = n_schedule.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("resolution must be >= 2, got {n}")));
    }
    if n_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("resolution schedule must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitRule {
    LastValue,
    Supremum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    pub last_delta: f64,
    pub converged: bool,
    pub rule: LimitRule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub omega_hat: LimitEstimate,
    pub d_hat: LimitEstimate,
    pub frac_limit: LimitEstimate,
}

fn last_value(samples: &[f64], tol: f64) -> LimitEstimate {
    let k = samples.len();
    let last_delta = (samples[k - 1] - samples[k - 2]).abs();
    LimitEstimate {
        value: samples[k - 1],
        last_delta,
        converged: last_delta <= tol,
        rule: LimitRule::LastValue,
    }
}

/// Limits of ω_n and of the fractional norm (terminal value plus Cauchy
/// check) and D̂ = μ_e μ_p sup_n D_n.
pub fn aggregate(
    records: &[SweepRecord],
    tol_omega: f64,
    tol_frac: f64,
    mu_p: f64,
    mu_e: f64,
) -> Result<Aggregate> {
    if records.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "aggregation needs at least 2 records, got {}",
            records.len()
        )));
    }
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| r.n);
    let omegas: Vec<f64> = sorted.iter().map(|r| r.omega_n).collect();
    let fracs: Vec<f64> = sorted.iter().map(|r| r.frac_norm_n).collect();
    let ds: Vec<f64> = sorted.iter().map(|r| r.d_n).collect();

    let sup = ds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = mu_e * mu_p;
    let d_tail = ds[ds.len() - 1] - ds[ds.len() - 2];
    let d_hat = LimitEstimate {
        value: if scale >= 1.0 { sup * scale } else { sup },
        last_delta: d_tail.abs(),
        converged: true,
        rule: LimitRule::Supremum,
    };
    Ok(Aggregate {
        omega_hat: last_value(&omegas, tol_omega),
        d_hat,
        frac_limit: last_value(&fracs, tol_frac),
    })
}

/// Second-order Richardson extrapolation from the two finest records.
pub fn richardson(records: &[SweepRecord], field: impl Fn(&SweepRecord) -> f64) -> Result<f64> {
    if records.len() < 2 {
        return Err(Error::InsufficientData("richardson needs 2 records".into()));
    }
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| r.n);
    let (coarse, fine) = (&sorted[sorted.len() - 2], &sorted[sorted.len() - 1]);
    let r2 = (fine.n as f64 / coarse.n as f64).powi(2);
    Ok((r2 * field(fine) - field(coarse)) / (r2 - 1.0))
}

/// Gains of the limit system from aggregated sweep constants.
pub fn limit_gains(agg: &Aggregate, alpha: f64, theta: f64, mu_p: f64, mu_e: f64) -> Result<GainBundle> {
    let growth = GrowthBound {
        m: 1.0,
        omega: agg.omega_hat.value,
    };
    let sector = SectorBound {
        d: agg.d_hat.value,
        sector_angle: 0.0,
        lambda_max_used: f64::NAN,
    };
    assemble_gains(alpha, theta, &growth, &sector, agg.frac_limit.value, mu_p, mu_e)
}

/// CSV text of the records in the order given.
pub fn csv_string(records: &[SweepRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to write".into()));
    }
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n,
            format_significant(r.omega_n, 10),
            format_significant(r.d_n, 10),
            format_significant(r.frac_norm_n, 10)
        );
    }
    Ok(out)
}

pub fn emit_csv<W: Write>(records: &[SweepRecord], mut dest: W) -> Result<usize> {
    let text = csv_string(records)?;
    dest.write_all(text.as_bytes())?;
    Ok(text.len())
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<usize> {
    let text = csv_string(records)?;
    std::fs::write(path, text.as_bytes())
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(text.len())
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header '{CSV_HEADER}', found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 2;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected 4 fields, found {}",
                fields.len()
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {lineno}: '{s}': {e}")))
        };
        records.push(SweepRecord {
            n: fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {lineno}: '{}': {e}", fields[0])))?,
            omega_n: num(fields[1])?,
            d_n: num(fields[2])?,
            frac_norm_n: num(fields[3])?,
        });
    }
    Ok(records)
}
