use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mclink_core::harness::{self, CsvRow, ExperimentConfig};
use mclink_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mclink",
    version,
    about = "Signed two-species molecular link simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sampled channel taps.
    Taps(Common),
    /// BER versus power for the configured scheme.
    Ber(Common),
    /// BER versus D_B / D_A with the reaction-diffusion solver in the loop.
    Mismatch(Common),
    /// Distortion and BER for Lloyd and uniform quantizers.
    Quantizer(Common),
    /// Limiting-reactant decay versus reaction strength.
    Reaction {
        #[command(flatten)]
        common: Common,
        /// Write the probe trace of one A release followed by one B release instead.
        #[arg(long)]
        trace: bool,
        /// Molecules per release for --trace.
        #[arg(long, default_value_t = 3e6)]
        trace_amount: f64,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set trials=2000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply_overrides(self.overrides.iter().map(String::as_str))?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        log::info!("configuration: {cfg:?}");
        Ok(cfg)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn emit<R: CsvRow>(&self, rows: &[R]) -> Result<()> {
        harness::emit_csv(rows, self.sink()?)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Taps(c) => c.emit(&harness::run_taps(&c.load()?)?),
        Command::Ber(c) => c.emit(&harness::run_ber(&c.load()?)?),
        Command::Mismatch(c) => c.emit(&harness::run_mismatch(&c.load()?)?),
        Command::Quantizer(c) => c.emit(&harness::run_quantizer(&c.load()?)?),
        Command::Reaction {
            common,
            trace,
            trace_amount,
        } => {
            let cfg = common.load()?;
            if trace {
                if !(trace_amount.is_finite() && trace_amount > 0.0) {
                    return Err(Error::Config("--trace-amount must be > 0".into()));
                }
                harness::reaction_trace(&cfg, trace_amount)?.write_csv(common.sink()?)
            } else {
                common.emit(&harness::run_reaction(&cfg)?)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
