use clap::{Args, Parser, Subcommand};
use dynhopf::run::{cmd_dump, cmd_verify, Command, DumpTarget, RunSpec, EXIT_INVALID};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dynhopf", version, about = "Build and verify dynamical quantum groups at roots of unity")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and write a JSON report.
    Verify(Common),
    /// Write a JSON dump of J, curlyJ, R_lambda, H_structure or ranks.
    Dump {
        what: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long = "type", default_value = "A1")]
    cartan: String,
    #[arg(long, default_value_t = 3)]
    ell: u32,
    /// Comma-separated rationals, one per simple root or one for all.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<String>,
    /// "id", "swap", "empty" or a map such as "0>1,1>0".
    #[arg(long)]
    triple: Option<String>,
    /// axioms, twist, abrr, duality, rank, bd or all; comma-separated.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dimension up to which checks run on the full basis.
    #[arg(long, default_value_t = 512)]
    threshold: usize,
}

impl Common {
    fn spec(self, command: Command) -> RunSpec {
        RunSpec {
            command,
            cartan: self.cartan,
            ell: self.ell,
            lambda: self.lambda,
            triple: self.triple,
            suites: vec![self.suite],
            seed: self.seed,
            out: self.out,
            threshold: self.threshold,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { 0 });
        }
    };
    let (spec, outcome) = match cli.command {
        Cmd::Verify(c) => {
            let spec = c.spec(Command::Verify);
            let out = cmd_verify(&spec);
            (spec, out)
        }
        Cmd::Dump { what, common } => match what.parse::<DumpTarget>() {
            Ok(w) => {
                let spec = common.spec(Command::Dump(w));
                let out = cmd_dump(&spec, w);
                (spec, out)
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INVALID as u8);
            }
        },
    };
    if let Some(err) = outcome.document.get("error").and_then(|e| e.as_str()) {
        eprintln!("error: {err}");
    }
    if let Err(e) = outcome.emit(spec.out.as_ref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
