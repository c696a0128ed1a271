use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ctpair_cli::{parse_list, render, render_verify, run, verify, CurveSpec, Fault, Format, RunConfig, Status};

#[derive(Parser, Debug)]
#[command(name = "ctpair", version, about = "2-descent and the Cassels-Tate pairing on curves with full rational 2-torsion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the 2-Selmer group, the pairing matrix and the refined bounds.
    Run(Opts),
    /// Run the invariant suite on the curve.
    Verify(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    /// Roots of y^2 = (x - e1)(x - e2)(x - e3).
    #[arg(long, value_name = "E1,E2,E3", value_parser = parse_list::<3>, allow_hyphen_values = true, conflicts_with = "ab", required_unless_present = "ab")]
    roots: Option<[i64; 3]>,
    /// The curve y^2 = x(x - a)(x + b).
    #[arg(long, value_name = "A,B", value_parser = parse_list::<2>, allow_hyphen_values = true)]
    ab: Option<[i64; 2]>,
    /// Naive height bound for the point search.
    #[arg(long, default_value_t = ctpair_cli::DEFAULT_HEIGHT_BOUND)]
    height_bound: u64,
    /// Starting p-adic precision for local points (real places use four times as many bits).
    #[arg(long)]
    precision: Option<u32>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant a fault in the local symbol (property suite self-test).
    #[arg(long, hide = true)]
    inject_symbol_fault: bool,
}

impl Opts {
    fn config(&self) -> RunConfig {
        let curve = match (self.roots, self.ab) {
            (Some(r), _) => CurveSpec::Roots(r),
            (None, Some([a, b])) => CurveSpec::Ab(a, b),
            (None, None) => unreachable!("clap requires a curve"),
        };
        RunConfig {
            curve,
            height_bound: self.height_bound,
            precision: self.precision,
            format: if self.json { Format::Json } else { Format::Text },
            seed: self.seed,
            fault: self.inject_symbol_fault.then_some(Fault::Symbol),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(Status::InvalidInput.code() as u8) } else { ExitCode::SUCCESS };
        }
    };
    let (status, out) = match &cli.command {
        Command::Run(o) => {
            let config = o.config();
            match run(&config) {
                Ok(report) => (Status::Ok, render(&report, config.format)),
                Err(err) => {
                    eprintln!("error: {err}");
                    (Status::of_error(&err), String::new())
                }
            }
        }
        Command::Verify(o) => {
            let config = o.config();
            match verify(&config) {
                Ok(report) => {
                    let status = if report.passed { Status::Ok } else { Status::InvariantFailed };
                    (status, render_verify(&report, config.format))
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    (Status::of_error(&err), String::new())
                }
            }
        }
    };
    print!("{out}");
    ExitCode::from(status.code() as u8)
}
