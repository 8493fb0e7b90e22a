use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use szegolab::experiments::{self, Experiment, ExperimentConfig};
use szegolab::report::Format;
use szegolab::spec;

/// Relative Szegő asymptotics: sweep n and compare Ψ_n with its predicted limit.
#[derive(Parser, Debug)]
#[command(name = "szegolab", version)]
struct Cli {
    experiment: Experiment,

    /// Measure or coefficient sequence, e.g. `lebesgue+atom:0,0.5`, `geronimus:0.6`, `const:0.5,0`.
    #[arg(long)]
    measure: String,

    /// Second source for `compare`.
    #[arg(long)]
    other: Option<String>,

    /// Symbol: JSON coefficients, a JSON file, or `c:<c0>;cos:<a1,...>;sin:<b1,...>`.
    #[arg(long)]
    h: String,

    /// Strictly increasing list of n (M for `right_limit`).
    #[arg(long, default_value = "8,16,32,64,128")]
    n: String,

    #[arg(long)]
    pad: Option<usize>,

    /// Bound on the final row's abs_error.
    #[arg(long)]
    tol: Option<f64>,

    /// Scale for `clt` and `cumulants`.
    #[arg(long, default_value_t = 0.1)]
    t: f64,

    /// Cumulant order.
    #[arg(long)]
    order: Option<usize>,

    /// Subsequence indices for `right_limit`.
    #[arg(long)]
    subseq: Option<String>,

    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn config(cli: &Cli) -> szegolab::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(cli.experiment, &cli.measure, &cli.h, spec::parse_n_list(&cli.n)?);
    cfg.other = cli.other.clone();
    cfg.pad = cli.pad;
    cfg.tol = cli.tol;
    cfg.t = cli.t;
    if let Some(m) = cli.order {
        cfg.order = m;
    }
    if let Some(s) = &cli.subseq {
        cfg.subseq = spec::parse_n_list(s)?;
    }
    if let Ok(v) = std::env::var("SZEGOLAB_QUAD_POINTS") {
        let m = v
            .trim()
            .parse()
            .map_err(|_| szegolab::Error::Parse(format!("SZEGOLAB_QUAD_POINTS = {v:?}")))?;
        cfg.quad_points = Some(m);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match config(&cli).and_then(|cfg| experiments::run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => report.save(path, cli.format),
        None => match cli.format {
            Format::Csv => report.to_csv_string().map(|s| print!("{s}")),
            Format::Json => report.to_json_string().map(|s| println!("{s}")),
        },
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for a in &report.assertions {
        eprintln!("[{}] {}: {}", if a.passed { "pass" } else { "FAIL" }, a.name, a.detail);
    }
    match report.first_failure() {
        Some(a) => {
            eprintln!("first failing assertion: {}: {}", a.name, a.detail);
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
