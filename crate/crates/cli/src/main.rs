use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use ghcyl_cli::config::{default_config, Format};
use ghcyl_cli::output::{to_json, write_atomic, RunMeta};
use ghcyl_cli::{parse_config, refusal_body, run_command, CliError, Command, Overrides, EXIT_USAGE};

/// Global hypoellipticity analysis of operators on the cylinder T¹×R.
///
/// Exit status: 0 success, 1 mathematical refusal (JSON error on stdout),
/// 2 usage or configuration error.
#[derive(Parser, Debug)]
#[command(name = "ghcyl", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<String>>,
    /// Largest |k| the classifier and zero search examine.
    #[arg(long = "k-budget", global = true)]
    k_budget: Option<i64>,
    /// Grid size as MxN, e.g. 64x512.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(i64, i64)>,
    /// Half-width X of the truncated x-window [-X, X).
    #[arg(long = "x-halfwidth", global = true)]
    x_halfwidth: Option<f64>,
    /// Seed for the randomized oracle suite.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Decide global hypoellipticity and print the certificate.
    Classify,
    /// Locate zeros of the symbol on Z×R.
    Zeros,
    /// Solve Pu = f for the configured forcing.
    Solve,
    /// Mixed Fourier spectrum of the forcing.
    Spectrum,
    /// Decay fits of the forcing's spectrum against the claimed orders.
    FitDecay,
    /// Build an explicit counterexample for a NotGH operator.
    Counterexample,
    /// Reduce a b = 0 tube operator to constant coefficients.
    Reduce,
    /// Run the oracle suite.
    VerifyLemmas,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Classify => Command::Classify,
            Cmd::Zeros => Command::Zeros,
            Cmd::Solve => Command::Solve,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::FitDecay => Command::FitDecay,
            Cmd::Counterexample => Command::Counterexample,
            Cmd::Reduce => Command::Reduce,
            Cmd::VerifyLemmas => Command::VerifyLemmas,
        }
    }
}

fn parse_grid(s: &str) -> Result<(i64, i64), String> {
    let (m, n) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected MxN, got `{s}`"))?;
    let p = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((p(m)?, p(n)?))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let cli = Cli::parse();
    let cmd = Command::from(cli.command);
    let overrides = Overrides {
        out: cli.out.clone(),
        formats: cli.format.clone(),
        k_budget: cli.k_budget,
        grid: cli.grid,
        x_half: cli.x_halfwidth,
        seed: cli.seed,
    };
    let cfg = match &cli.config {
        Some(path) => parse_config(path, &overrides),
        None if cmd.needs_operator() => {
            Err(CliError::Usage(format!("`{}` needs --config with an [operator] section", cmd.name())))
        }
        None => default_config(&overrides),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ghcyl: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };

    let (body, code, mut artifacts) = match run_command(cmd, &cfg) {
        Ok(o) => (o.body, o.exit_code, o.artifacts.into_iter().map(|a| (a.name, a.contents)).collect::<Vec<_>>()),
        Err(e) => match refusal_body(cmd, &e) {
            Some(body) => {
                eprintln!("ghcyl: {e}");
                (body, e.exit_code(), Vec::new())
            }
            None => {
                eprintln!("ghcyl: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        },
    };
    // A closed pipe downstream is not an error of ours.
    let _ = std::io::stdout().write_all(body.as_bytes());
    if cfg.output.wants(Format::Json) {
        artifacts.push((format!("{}.json", cmd.stem()), body));
    }

    let dir = &cfg.output.dir;
    let mut written = Vec::new();
    for (name, contents) in &artifacts {
        if let Err(e) = write_atomic(dir, name, contents.as_bytes()) {
            eprintln!("ghcyl: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        written.push(name.clone());
    }
    let meta = RunMeta {
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name().into(),
        args: std::env::args().collect(),
        config: cli.config.as_ref().map(|p| p.display().to_string()),
        seed: cfg.seed,
        started_unix,
        duration_s: started.elapsed().as_secs_f64(),
        exit_code: code,
        artifacts: written,
    };
    if let Err(e) = write_atomic(dir, &format!("{}.meta.json", cmd.stem()), to_json(&meta).as_bytes()) {
        eprintln!("ghcyl: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    eprintln!("ghcyl: {} artifact(s) written to {}", artifacts.len() + 1, dir.display());
    ExitCode::from(code as u8)
}
