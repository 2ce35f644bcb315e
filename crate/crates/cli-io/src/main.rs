use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cli_io::{acceptance, run_to_dir, CliError, Command, RunConfig};

/// Drivers for the geometric-phase, open-system, fuzzy-geometry and Koopman models.
#[derive(Debug, Parser)]
#[command(name = "adiabat", version)]
struct Args {
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON run configuration; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out/<command>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run the acceptance suite instead of a command.
    #[arg(long, global = true)]
    check: bool,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.validate()?;
    if let Some(k) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(cfg)
}

fn run(args: Args) -> Result<(), CliError> {
    let cfg = load(&args)?;
    if args.check {
        let outcomes = acceptance::run_all(|o| println!("{}", o.line()));
        let failed = outcomes.iter().filter(|o| !o.pass).count();
        println!("{} of {} criteria pass", outcomes.len() - failed, outcomes.len());
        return if failed == 0 { Ok(()) } else { Err(CliError::Numeric(format!("{failed} acceptance criteria fail"))) };
    }
    let cmd = args.command.ok_or_else(|| CliError::Config("no command given; see --help".into()))?;
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(cmd.name()));
    let manifest = run_to_dir(cmd, &cfg, &out)?;
    println!("{}: wrote {} files to {}", cmd.name(), manifest.outputs.len() + 1, out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adiabat: {e}");
            e.exit_code()
        }
    }
}
