use std::path::PathBuf;
use std::process::ExitCode;

use blur_core::{Error, Result};
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod demos;

use commands::{Overrides, Report};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "blur-ergopt", version, about = "Blur-shift compactifications and exact ergodic optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here as well.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    truncation: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the shift, resolution and potential of a config.
    Validate(ConfigArg),
    /// Certified ergodic maximizing constant.
    Beta(ConfigArg),
    /// Maximizing periodic measure (exit 3 if the certificate is not exact).
    Maximize(ConfigArg),
    /// Maximizing-set classification on the blur shift.
    Classify(ConfigArg),
    /// Finite cyclic predecessor sets.
    Fcpa(ConfigArg),
    /// Connecting word on Λ.
    Connect(ConfigArg),
    /// Limit of a point family or a measure family.
    Limit(ConfigArg),
    /// Convex decomposition of an invariant atomic measure.
    Decompose(ConfigArg),
    /// Run a named scenario; `list` prints the names.
    Demo { name: String },
}

#[derive(clap::Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

fn execute(cli: &Cli) -> Result<(Report, Option<PathBuf>)> {
    let o = Overrides {
        depth: cli.depth,
        truncation: cli.truncation,
    };
    let with_config = |arg: &ConfigArg, f: &dyn Fn(&RunConfig) -> Result<Report>| -> Result<(Report, Option<PathBuf>)> {
        let c = RunConfig::load(&arg.config)?;
        let out = cli.out.clone().or_else(|| c.out.clone());
        Ok((f(&c)?, out))
    };
    match &cli.command {
        Command::Validate(a) => with_config(a, &commands::validate),
        Command::Beta(a) => with_config(a, &|c| commands::beta(c, o)),
        Command::Maximize(a) => with_config(a, &|c| commands::maximize(c, o)),
        Command::Classify(a) => with_config(a, &|c| commands::classify(c, o)),
        Command::Fcpa(a) => with_config(a, &commands::fcpa),
        Command::Connect(a) => with_config(a, &|c| commands::connect_cmd(c, o)),
        Command::Limit(a) => with_config(a, &|c| commands::limit(c, o)),
        Command::Decompose(a) => with_config(a, &|c| commands::decompose(c, o)),
        Command::Demo { name } if name == "list" => Ok((
            Report {
                lines: demos::DEMOS.iter().map(|s| s.to_string()).collect(),
                json: serde_json::json!(demos::DEMOS),
            },
            cli.out.clone(),
        )),
        Command::Demo { name } => Ok((demos::run(name)?, cli.out.clone())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((report, out)) => {
            print!("{}", report.render());
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n";
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            if report.json.get("passed") == Some(&serde_json::json!(false)) {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let doc = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            eprintln!("error: {e}");
            println!("{}", serde_json::to_string_pretty(&doc).expect("errors serialize"));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
