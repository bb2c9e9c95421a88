use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use colombeau::parse::{parse_rational, parse_scalar_expr};
use colombeau::scenario::{parse_grid, parse_scenario, run_scenario, ConfigOverrides};

#[derive(Parser)]
#[command(name = "colombeau", version, about = "Batch checks on generalized numbers and functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file; exit 0 if every check passes, 1 otherwise, 2 on parse errors.
    Run {
        file: PathBuf,
        /// Knowledge cap of parsed scalars, e.g. 24 or 47/2.
        #[arg(long, value_parser = |s: &str| parse_rational(s).map_err(|e| e.to_string()))]
        cap: Option<colombeau::scalar::Rational>,
        /// Grid exponents jmin:jmax for eps = 2^-j.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(i32, i32)>,
        /// Quadrature nodes.
        #[arg(long)]
        nodes: Option<usize>,
        /// Accepted and echoed; sampling always uses the fixed seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Record wall time per check (makes reports run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Parse a scalar expression and print its canonical form.
    Eval { expr: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval { expr } => match parse_scalar_expr(&expr) {
            Ok(x) => {
                println!("{x}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Run {
            file,
            cap,
            grid,
            nodes,
            seed,
            report,
            format,
            timing,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let flags = ConfigOverrides { cap, grid, nodes, seed };
            let rep = match parse_scenario(&text).and_then(|doc| run_scenario(&doc, &flags, timing)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            match format {
                Format::Human => print!("{}", rep.to_human()),
                Format::Json => print!("{}", rep.to_json()),
            }
            if let Some(path) = report {
                if let Err(e) = std::fs::write(&path, rep.to_json()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(rep.exit_code() as u8)
        }
    }
}
