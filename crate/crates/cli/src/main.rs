//! `qsamp` — command-line experiment runner for the quantum sampling toolkit.
//!
//! Subcommands bind the library modules into reproducible experiments:
//! permanent evaluation, boson instance generation / exact distributions /
//! sampling / validation / parameter sweeps, and the IQP equivalents. Every
//! primary output carries a header with the tool version, the master seed,
//! and FNV-1a hashes of the input files, and identical invocations produce
//! byte-identical output. Files given via `--out` are written atomically
//! (temp file + rename).

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qsamp", version, about = "Quantum sampling simulators and validation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix permanent kernels.
    #[command(subcommand)]
    Perm(PermCommand),
    /// BosonSampling instances, distributions, samplers, and validation.
    #[command(subcommand)]
    Boson(BosonCommand),
    /// IQP circuit sampling and diagnostics.
    #[command(subcommand)]
    Iqp(IqpCommand),
}

#[derive(Subcommand)]
enum PermCommand {
    /// Compute the permanent of a matrix JSON file.
    Compute(PermComputeArgs),
}

#[derive(Args)]
struct PermComputeArgs {
    /// Matrix JSON file: {"rows":…,"cols":…,"re":[…],"im":[…]}.
    #[arg(long)]
    matrix: String,
    /// Use the O(n!) definitional kernel instead of the fast one.
    #[arg(long)]
    naive: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum BosonCommand {
    /// Generate an instance JSON (fiducial or scattershot input).
    Instance(BosonInstanceArgs),
    /// Exact output distribution as CSV.
    Dist(BosonDistArgs),
    /// Draw samples as JSON-lines (optionally through a lossy channel).
    Sample(BosonSampleArgs),
    /// Run a validation discriminator over recorded samples.
    Validate(BosonValidateArgs),
    /// Collision-fraction table over a list of mode counts.
    Birthday(BosonBirthdayArgs),
    /// TVD between exact distributions of a network and its perturbations.
    PerturbSweep(BosonPerturbArgs),
}

#[derive(Args)]
struct BosonInstanceArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Build the network from this Haar seed.
    #[arg(long, conflicts_with = "network")]
    haar_seed: Option<u64>,
    /// Load the network from a matrix JSON file.
    #[arg(long)]
    network: Option<String>,
    /// Scattershot input: a random n-subset of modes (needs --haar-seed).
    #[arg(long)]
    scattershot: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BosonDistArgs {
    #[arg(long)]
    instance: String,
    /// Distinguishable-particle (classical) model instead of the quantum one.
    #[arg(long)]
    distinguishable: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BosonSampleArgs {
    #[arg(long)]
    instance: String,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Per-photon transmission probability; trials losing photons are
    /// discarded and the acceptance rate is reported in the header.
    #[arg(long)]
    loss: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BosonValidateArgs {
    #[arg(long)]
    instance: String,
    /// Samples JSON-lines file produced by `boson sample`.
    #[arg(long)]
    samples: String,
    /// Which null model to test against.
    #[arg(long, value_parser = ["uniform", "distinguishable"])]
    test: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BosonBirthdayArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated mode counts, e.g. 9,25,49,100.
    #[arg(long, value_delimiter = ',')]
    modes: Vec<usize>,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BosonPerturbArgs {
    #[arg(long)]
    instance: String,
    /// Comma-separated noise levels, e.g. 1e-4,1e-3,1e-2,1e-1.
    #[arg(long, value_delimiter = ',')]
    sigmas: Vec<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum IqpCommand {
    /// Generate a random circuit JSON.
    Random(IqpRandomArgs),
    /// Full output distribution as CSV.
    Dist(IqpDistArgs),
    /// Probability of one output bitstring.
    Prob(IqpProbArgs),
    /// Draw measurement samples as JSON-lines.
    Sample(IqpSampleArgs),
    /// Anti-concentration fraction and Porter-Thomas fit over random circuits.
    Anticonc(IqpAnticoncArgs),
    /// Verify the postselected hadamard gadget against direct evolution.
    GadgetCheck(IqpGadgetArgs),
}

#[derive(Args)]
struct IqpRandomArgs {
    /// Circuit family: 1 (√CZ+T), 2 (Z/CZ/CCZ), or sparse.
    #[arg(long, value_parser = ["1", "2", "sparse"])]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Pair-gate budget for the sparse family (default ⌈n·log₂n⌉).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct IqpDistArgs {
    #[arg(long)]
    circuit: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct IqpProbArgs {
    #[arg(long)]
    circuit: String,
    /// Output bitstring, e.g. 0110.
    #[arg(long)]
    x: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct IqpSampleArgs {
    #[arg(long)]
    circuit: String,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Per-qubit depolarizing rate applied to the samples.
    #[arg(long)]
    depolarize: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct IqpAnticoncArgs {
    #[arg(long, value_parser = ["1", "2", "sparse"])]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct IqpGadgetArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Number of mid-circuit Hadamards to gadgetize.
    #[arg(long, default_value_t = 3)]
    gadgets: usize,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("QSAMP_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon_pool(threads);
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Perm(PermCommand::Compute(args)) => {
            commands::perm_compute(&args.matrix, args.naive, args.out.as_deref())
        }
        Command::Boson(cmd) => match cmd {
            BosonCommand::Instance(args) => commands::boson_instance(
                args.m,
                args.n,
                args.haar_seed,
                args.network.as_deref(),
                args.scattershot,
                args.out.as_deref(),
            ),
            BosonCommand::Dist(args) => {
                commands::boson_dist(&args.instance, args.distinguishable, args.out.as_deref())
            }
            BosonCommand::Sample(args) => commands::boson_sample(
                &args.instance,
                args.count,
                args.seed,
                args.loss,
                args.out.as_deref(),
            ),
            BosonCommand::Validate(args) => commands::boson_validate(
                &args.instance,
                &args.samples,
                &args.test,
                args.out.as_deref(),
            ),
            BosonCommand::Birthday(args) => commands::boson_birthday(
                args.n,
                &args.modes,
                args.count,
                args.seed,
                args.out.as_deref(),
            ),
            BosonCommand::PerturbSweep(args) => commands::boson_perturb_sweep(
                &args.instance,
                &args.sigmas,
                args.seed,
                args.out.as_deref(),
            ),
        },
        Command::Iqp(cmd) => match cmd {
            IqpCommand::Random(args) => commands::iqp_random(
                &args.family,
                args.n,
                args.seed,
                args.budget,
                args.out.as_deref(),
            ),
            IqpCommand::Dist(args) => commands::iqp_dist(&args.circuit, args.out.as_deref()),
            IqpCommand::Prob(args) => {
                commands::iqp_prob(&args.circuit, &args.x, args.out.as_deref())
            }
            IqpCommand::Sample(args) => commands::iqp_sample(
                &args.circuit,
                args.count,
                args.seed,
                args.depolarize,
                args.out.as_deref(),
            ),
            IqpCommand::Anticonc(args) => commands::iqp_anticonc(
                &args.family,
                args.n,
                args.trials,
                args.alpha,
                args.seed,
                args.budget,
                args.out.as_deref(),
            ),
            IqpCommand::GadgetCheck(args) => {
                commands::iqp_gadget_check(args.n, args.gadgets, args.seed, args.out.as_deref())
            }
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("{}", error.to_json());
            ExitCode::FAILURE
        }
    }
}

fn rayon_pool(threads: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
}
