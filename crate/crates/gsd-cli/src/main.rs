use clap::{Parser, Subcommand};
use gsd_cli::commands::{self, CliError, Format, Overrides};
use gsd_cli::config::{self, parse_list, parse_pair};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "gsd", version, about = "Dirac operators with δ / δ′ point interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; `.csv` selects CSV, anything else JSON. Default: stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spectral window `a,b`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
    /// Root-scan grid spacing.
    #[arg(long)]
    resolution: Option<f64>,
    /// Jacobi truncation size.
    #[arg(long)]
    truncation: Option<usize>,
    /// Velocities of light for `limit`, `c1,c2,...`.
    #[arg(long, value_parser = parse_list)]
    c_list: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Self-adjointness, deficiency, discreteness and spectral-type report.
    Classify(Common),
    /// Eigenvalues of a finite configuration: secular solver and transfer oracle.
    Spectrum(Common),
    /// Truncated spectrum of the Jacobi boundary operator.
    Jacobi(Common),
    /// Weyl functions of the leading blocks at sample points.
    Weyl(Common),
    /// Non-relativistic convergence table.
    Limit(Common),
    /// Run the built-in invariant suite.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn format_for(out: Option<&Path>, default: Format) -> Format {
    match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        Some(_) => Format::Json,
        None => default,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_common(cmd: &Command, common: &Common) -> Result<(), CliError> {
    let cfg = config::load(&common.config)?;
    let o = Overrides {
        window: common.window,
        resolution: common.resolution,
        truncation: common.truncation,
        c_list: common.c_list.clone(),
    };
    let out = common.out.as_deref();
    let text = match cmd {
        Command::Classify(_) => commands::classify(&cfg)?,
        Command::Spectrum(_) => {
            let r = commands::spectrum_report(&cfg, &o)?;
            let text = commands::spectrum_text(&r, format_for(out, Format::Json))?;
            let dev = r.max_deviation.map_or("n/a (counts differ)".to_string(), gsd_cli::output::g17);
            let line = format!(
                "secular {} roots, oracle {} roots, max deviation {dev}",
                r.secular.roots.len(),
                r.oracle.roots.len()
            );
            // keep stdout parseable when it carries the payload
            if out.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
            text
        }
        Command::Jacobi(_) => commands::jacobi(&cfg, &o, format_for(out, Format::Csv))?,
        Command::Weyl(_) => commands::weyl(&cfg)?,
        Command::Limit(_) => commands::limit(&cfg, &o)?,
        Command::Selftest { .. } => unreachable!(),
    };
    emit(&text, out)
}

fn selftest(out: Option<&Path>) -> Result<(), CliError> {
    let results = gsd_cli::selftest::run();
    for r in &results {
        println!(
            "{} {:<22} worst/tol = {:<12} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            gsd_cli::output::g17(r.worst),
            r.detail
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} suites, {} passed, {failed} failed", results.len(), results.len() - failed);
    if let Some(p) = out {
        let text = gsd_cli::output::to_json(&results).map_err(|e| CliError::Runtime(e.to_string()))?;
        emit(&text, Some(p))?;
    }
    if failed > 0 {
        return Err(CliError::Contradiction(format!("{failed} self-test suite(s) failed")));
    }
    Ok(())
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("GSD_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("GSD_THREADS={v}: not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Selftest { out } => selftest(out.as_deref()),
        cmd @ (Command::Classify(c)
        | Command::Spectrum(c)
        | Command::Jacobi(c)
        | Command::Weyl(c)
        | Command::Limit(c)) => run_common(cmd, c),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.status() as u8)
        }
    }
}
