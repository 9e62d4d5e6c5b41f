use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fts_cli::check::check_family;
use fts_cli::scenario::Family;
use fts_cli::{builtin, resolve, run_scenario, simulate, sweep};

#[derive(Parser)]
#[command(name = "fts", version, about = "Finite-time control scenarios")]
struct Cli {
    /// Directory for traces and reports.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Echoed into reports; the dynamics themselves are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or built-in and write its trace and report.
    Simulate { scenario: String },
    /// Run a scenario and print its settling report only.
    Settle { scenario: String },
    /// Necessary and sufficient checks on a scalar field family.
    Check {
        /// power-law, linear or counter-example
        family: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        edge: f64,
    },
    /// Run a scenario once per value of one numeric parameter.
    Sweep {
        scenario: String,
        /// Dotted path into the scenario, e.g. `system.alpha` or `x0.0`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// List the built-in scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(arg: &str, seed: Option<u64>) -> fts_cli::Result<fts_cli::Scenario> {
    let mut s = resolve(arg)?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    Ok(s)
}

fn execute(cli: Cli) -> fts_cli::Result<bool> {
    match cli.command {
        Command::Simulate { scenario } => {
            let s = load(&scenario, cli.seed)?;
            let r = run_scenario(&s, &cli.out_dir)?;
            print!("{}", fts_cli::report::render(&r));
            if let Some(p) = &r.report_path {
                eprintln!("report written to {}", p.display());
            }
            Ok(r.passed())
        }
        Command::Settle { scenario } => {
            let s = load(&scenario, cli.seed)?;
            let out = simulate(&s)?;
            let st = out.result.settling;
            println!("scenario = \"{}\"", s.name);
            println!("seed = {}", s.seed);
            println!("settled = {}", st.settled);
            if let Some(t) = st.time {
                println!("time = {t:e}");
            }
            println!("eps = {:e}", st.eps);
            println!("dwell = {:e}", st.dwell);
            Ok(st.settled)
        }
        Command::Check { family, k, alpha, edge } => {
            let fam = Family::parse(&family).ok_or_else(|| fts_cli::Error::UnknownParameter(family.clone()))?;
            let c = check_family(fam, k, alpha, edge).map_err(|source| fts_cli::Error::Run {
                scenario: format!("check {family}"),
                source,
            })?;
            if let Some(seed) = cli.seed {
                println!("seed = {seed}");
            }
            print!("{}", c.render());
            Ok(c.consistent())
        }
        Command::Sweep { scenario, param, values } => {
            let s = load(&scenario, cli.seed)?;
            let results = sweep(&s, &param, &values, &cli.out_dir)?;
            println!("seed = {}", s.seed);
            print!("{}", fts_cli::sweep::summary(&param, &values, &results));
            Ok(results.iter().all(|r| r.passed()))
        }
        Command::List => {
            for name in builtin::names() {
                println!("{name}");
            }
            Ok(true)
        }
    }
}
