use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mmp_cli::commands;
use mmp_cli::instance::{parse_instance, Instance};
use mmp_cli::report::Envelope;
use mmp_core::{parse_rat, Error, Rat, Result};

#[derive(Parser, Debug)]
#[command(name = "mmp", version, about = "Exact toric MMP with scaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Instance file (JSON).
    file: PathBuf,
    /// Scale, as an integer or `p/q`.
    #[arg(long)]
    r: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the MMP with scaling.
    Run(Common),
    /// Nef threshold and its denominator bound.
    Threshold(Common),
    /// Chamber decomposition of the support cone.
    Chambers(Common),
    /// Singularity class of the pair.
    Sing(Common),
    /// Local runs over a cover of the base, glued.
    Glue(Common),
    /// The model at scale `r`.
    OutputAtScale(Common),
}

fn load(c: &Common) -> Result<Instance> {
    let text = std::fs::read_to_string(&c.file).map_err(|e| Error::Parse(format!("{}: {e}", c.file.display())))?;
    parse_instance(&text)
}

fn scale(c: &Common) -> Result<Option<Rat>> {
    c.r.as_deref().map(parse_rat).transpose()
}

fn execute(cmd: &Command) -> Result<(Envelope, Option<PathBuf>)> {
    let (c, report) = match cmd {
        Command::Run(c) => (c, commands::run(&load(c)?)?),
        Command::Threshold(c) => (c, commands::threshold(&load(c)?)?),
        Command::Chambers(c) => {
            let inst = load(c)?;
            let seed = inst.file.params.seed.unwrap_or(c.seed);
            (c, commands::chambers(&inst, seed)?)
        }
        Command::Sing(c) => (c, commands::sing(&load(c)?)?),
        Command::Glue(c) => (c, commands::glue(&load(c)?, scale(c)?)?),
        Command::OutputAtScale(c) => (c, commands::output(&load(c)?, scale(c)?)?),
    };
    Ok((Envelope::new(report), c.json.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((env, json)) => {
            println!("{}", env.report.summary());
            if let Some(path) = json {
                if let Err(e) = std::fs::write(&path, env.to_json() + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(mmp_cli::exit_code(&e))
        }
    }
}
