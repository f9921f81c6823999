use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use pervglue_cli::{run, Command, REPORT_DIR_ENV};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pervglue", version, about = "Perverse sheaves on two-strata poset models")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let report = run(&cli.command);
    let ms = start.elapsed().as_millis();
    match cli.format {
        Format::Text => print!("{}", report.text(ms)),
        Format::Json => println!("{}", report.json(ms)),
    }
    if let Some(dir) = std::env::var_os(REPORT_DIR_ENV) {
        if let Err(e) = report.write_to(&PathBuf::from(dir), ms) {
            eprintln!("cannot write report: {e}");
            std::process::exit(2);
        }
    }
    std::process::exit(report.verdict.exit_code());
}
