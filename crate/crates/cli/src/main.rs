use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use duality_lab::Tolerances;
use duality_lab_cli::{run, Command, Family, JobSpec};

#[derive(Parser, Debug)]
#[command(
    name = "duality-lab",
    version,
    about = "Numerical checks for unbounded operators, dual pairs and resistor networks"
)]
struct Args {
    #[arg(long, value_enum)]
    cmd: Command,
    /// Input file: operator, pair or network depending on the command.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output directory for report.csv and data files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override a named tolerance, e.g. `--tol schur=1e-8`. Repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// path_n, lattice2d_n or binary_tree:<depth>:<ratio>.
    #[arg(long)]
    family: Option<Family>,
    /// Comma-separated level sizes, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let value: f64 = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
    let mut probe = Tolerances::default();
    probe.set(name, value).map_err(|e| e.to_string())?;
    Ok((name.to_string(), value))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut job = JobSpec::new(args.cmd, args.out);
    job.input = args.input;
    job.seed = args.seed;
    job.family = args.family;
    job.levels = args.levels;
    for (name, value) in &args.tol {
        job.tolerances.set(name, *value).expect("validated while parsing");
    }
    match run(&job) {
        Ok(outcome) => {
            for r in &outcome.reports {
                println!("{r}");
            }
            let failed = outcome.reports.iter().filter(|r| !r.pass).count();
            println!("{} checks, {failed} failed", outcome.reports.len());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
