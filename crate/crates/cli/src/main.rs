use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use issgain_cli::{dispatch, parse_config, CliError, Command, RunConfig};

macro_rules! overrides {
    ($($field:ident),* $(,)?) => {
        #[derive(Debug, Parser)]
        #[command(name = "issgain", version, about = "Certified ISS gains for the boundary-controlled heat equation")]
        struct Cli {
            /// Command to run.
            #[arg(value_enum)]
            command: Command,
            /// Configuration file with `key = value` lines.
            #[arg(long, short)]
            config: Option<PathBuf>,
            $(
                #[arg(long = stringify!($field), value_name = "VALUE")]
                $field: Option<String>,
            )*
        }

        impl Cli {
            fn overrides(&self) -> Vec<(&'static str, &str)> {
                let mut list = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        list.push((stringify!($field), v.as_str()));
                    }
                )*
                list
            }
        }
    };
}

overrides!(
    n_schedule, a, alpha, theta, lambda_min, lambda_max, lambda_count, weight_exponent, u_norm,
    mu_p, mu_e, t_end, h, seed, output_dir, sim_n, inputs, hold, tol_omega, tol_frac, richardson,
    threads,
);

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    for (key, value) in cli.overrides() {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        let code = dispatch(cli.command, &cfg, &mut lock);
        let _ = lock.flush();
        code
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("issgain: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
