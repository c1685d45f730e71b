use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kite_core::cli::{self, ConfigError, Format, Instance, RunConfig, Suite};
use kite_core::RdpClass;

/// Bounded verification of kite pseudo effect algebras.
#[derive(Parser)]
#[command(name = "kite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites named in the config.
    Check(Common),
    /// Decide subdirect irreducibility and split phi into orbit factors.
    Classify(Common),
    /// Refine one instance a1 + a2 = b1 + b2 and print the table.
    Refine {
        #[command(flatten)]
        common: Common,
        /// Class to verify the table against.
        #[arg(long, default_value = "RDP1")]
        class: RdpClass,
        a1: String,
        a2: String,
        b1: String,
        b2: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    json: bool,
    /// Override the window bound.
    #[arg(long)]
    bound: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(&self.config).map_err(|e| ConfigError {
            path: String::new(),
            message: format!("cannot read {}: {e}", self.config.display()),
        })?;
        let mut cfg = cli::parse_config(&text)?;
        if let Some(b) = self.bound {
            cfg.bound = b;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        cli::validate(&cfg)?;
        Ok(cfg)
    }

    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            Format::Text
        }
    }
}

fn run(command: Command) -> Result<bool, ConfigError> {
    match command {
        Command::Check(common) => {
            let cfg = common.load()?;
            let reports = cli::run_suites(&cfg)?;
            print!("{}", cli::emit_report(&cli::config_digest(&cfg), &reports, common.format()));
            Ok(cli::failures(&reports) == 0)
        }
        Command::Classify(common) => {
            let cfg = common.load()?;
            let inst = Instance::build(&cfg)?;
            let reports = cli::run_with(&inst, &[Suite::Irreducibility, Suite::Decompose], cfg.timing);
            let digest = cli::config_digest(&cfg);
            if !common.json {
                print!("{}", cli::classify_text(&inst));
            }
            print!("{}", cli::emit_report(&digest, &reports, common.format()));
            Ok(cli::failures(&reports) == 0)
        }
        Command::Refine { common, class, a1, a2, b1, b2 } => {
            let cfg = common.load()?;
            let inst = Instance::build(&cfg)?;
            let (text, valid) = cli::refine_text(&inst, [&a1, &a2, &b1, &b2], class)?;
            if common.json {
                let doc = serde_json::json!({
                    "config_digest": cli::config_digest(&cfg),
                    "class": class.to_string(),
                    "valid": valid,
                    "output": text,
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json value"));
            } else {
                print!("{text}");
            }
            Ok(valid)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
