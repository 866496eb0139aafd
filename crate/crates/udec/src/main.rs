use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use udec::experiment::{self, DecoderName, EstimateSection, ExperimentConfig, Mode};
use udec::format::{load_model, save_codebook};
use udec::output::write_rows;
use udec::{Error, Result};
use udec_core::capacity::capacity_memoryless;
use udec_core::decoding::Codebook;

#[derive(Parser)]
#[command(name = "udec", version = udec::VERSION, about = "Universal decoding experiments with noisy codebooks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo error probabilities.
    Simulate(RunArgs),
    /// Exact error probabilities by enumeration.
    ExactEval(RunArgs),
    /// Check every bound at each block length; exits with 3 on a violation.
    BoundsCheck(RunArgs),
    /// Floored Baum-Welch estimate of the codeword prior.
    Estimate(EstimateArgs),
    /// Joint LZ parse of two digit strings.
    Parse { y: String, z: String },
    /// Mutual information I(Y;Z) of a memoryless model, in nats.
    Capacity {
        #[arg(long)]
        model: PathBuf,
    },
    /// Draw a random codebook and write it to a file.
    Codebook {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    model: PathBuf,
    /// Block lengths; repeat or separate with commas.
    #[arg(long, required = true, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    #[arg(long, value_enum, value_delimiter = ',')]
    decoder: Vec<DecoderName>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Threshold factor alpha (> 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Estimated prior for the plug-in decoder.
    #[arg(long)]
    prior: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Codebook file with the training sequences.
    #[arg(long)]
    training: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    sequences: usize,
    #[arg(long, default_value_t = 200)]
    length: usize,
    #[arg(long, default_value_t = 2)]
    hidden: usize,
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the estimated prior.
    #[arg(long)]
    prior_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, mode: Mode) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(mode);
        c.model = Some(self.model);
        c.n = self.n;
        c.rate = self.rate;
        c.decoders = self.decoder;
        c.trials = self.trials;
        c.seed = self.seed;
        c.alpha = self.alpha;
        c.prior = self.prior;
        c.out = self.out;
        c
    }
}

impl EstimateArgs {
    fn into_config(self) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(Mode::Estimate);
        c.model = Some(self.model);
        c.seed = self.seed;
        c.out = self.out;
        c.estimate = EstimateSection {
            hidden: self.hidden,
            floor: self.floor,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            training: self.training,
            sequences: self.sequences,
            length: self.length,
            prior_out: self.prior_out,
        };
        c
    }
}

fn run_config(config: &ExperimentConfig) -> Result<()> {
    let outcome = experiment::run(config)?;
    match &config.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Io(path.display().to_string(), e))?;
            write_rows(BufWriter::new(file), &outcome.rows)?;
        }
        None => write_rows(io::stdout().lock(), &outcome.rows)?,
    }
    if outcome.violations > 0 {
        return Err(Error::BoundViolation(outcome.violations));
    }
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => run_config(&a.into_config(Mode::MonteCarlo)),
        Command::ExactEval(a) => run_config(&a.into_config(Mode::Exact)),
        Command::BoundsCheck(a) => run_config(&a.into_config(Mode::BoundsCheck)),
        Command::Estimate(a) => run_config(&a.into_config()),
        Command::Run { config } => run_config(&ExperimentConfig::load(config)?),
        Command::Parse { y, z } => {
            let s = experiment::parse_pair(&y, &z)?;
            let mut out = io::stdout().lock();
            let text = format!(
                "boundaries={}\nc(y,z)={}\nc(z)={}\nc_l={}\nv={}\ncbar={}\n",
                join(&s.boundaries),
                s.c_yz,
                s.c_z,
                join(&s.c_ell),
                s.v,
                s.cbar
            );
            out.write_all(text.as_bytes()).map_err(|e| Error::Io("stdout".into(), e))
        }
        Command::Capacity { model } => {
            let i = capacity_memoryless(&load_model(model)?)?;
            println!("I(Y;Z) = {i} nats = {} bits", i / std::f64::consts::LN_2);
            Ok(())
        }
        Command::Codebook {
            model,
            n,
            rate,
            seed,
            out,
        } => {
            let codebook = Codebook::generate(&load_model(model)?, n, rate, seed)?;
            save_codebook(&codebook, &out)?;
            let mut words = codebook.words.clone();
            words.sort();
            words.dedup();
            eprintln!("wrote {} codewords ({} distinct)", codebook.len(), words.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
