use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ftnsim::harness::{self, Runner};
use ftnsim::{Error, ExperimentConfig, ExperimentResult};

#[derive(Parser)]
#[command(name = "ftnsim", version, about = "FTN PDM-mQAM link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER and failure rate over the OSNR grid.
    BerSweep(Common),
    /// Required OSNR at the target BER for each DGD/linewidth pair.
    RequiredOsnr(Common),
    /// Convergence-failure rate per DGD.
    DgdSweep {
        #[command(flatten)]
        common: Common,
        /// Also search the required OSNR at each DGD.
        #[arg(long)]
        with_required_osnr: bool,
    },
    /// Required-OSNR penalty per laser linewidth.
    LinewidthSweep(Common),
    /// Design the precoder filters and write them as JSON.
    DeriveThp(Common),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; a .json sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "FTNSIM_JOBS")]
    jobs: Option<usize>,
}

impl Common {
    fn load(&self) -> ftnsim::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(n) = self.trials {
            cfg.n_trials = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn runner(&self) -> ftnsim::Result<Runner> {
        let jobs = self
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        Runner::new(&self.load()?, jobs)
    }

    fn emit(&self, result: &ExperimentResult) -> ftnsim::Result<()> {
        match &self.out {
            Some(path) => result.write(path),
            None => {
                stdout(&result.to_csv())
            }
        }
    }
}

/// A closed pipe (`ftnsim ... | head`) is not an error.
fn stdout(text: &str) -> ftnsim::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> ftnsim::Result<()> {
    match cli.command {
        Command::BerSweep(c) => c.emit(&harness::ber_vs_osnr(&c.runner()?)?),
        Command::RequiredOsnr(c) => c.emit(&harness::required_osnr_sweep(&c.runner()?)?),
        Command::DgdSweep {
            common,
            with_required_osnr,
        } => common.emit(&harness::dgd_sweep(&common.runner()?, with_required_osnr)?),
        Command::LinewidthSweep(c) => c.emit(&harness::linewidth_sweep(&c.runner()?)?),
        Command::DeriveThp(c) => {
            let cfg = c.load()?;
            let setup = harness::LinkSetup::new(&cfg)?;
            let Some(filters) = setup.thp else {
                return Err(Error::Config("derive-thp needs mode \"ftn\"".into()));
            };
            let json = filters.to_json();
            match &c.out {
                Some(path) => std::fs::write(path, json)?,
                None => stdout(&format!("{json}\n"))?,
            }
            Ok(())
        }
        Command::Selftest => {
            let checks = ftnsim::selftest::run();
            let mut failed = 0;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Error::InvalidParameter(format!("{failed} self checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("ftnsim: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ftnsim: {e}");
            ExitCode::from(2)
        }
    }
}
