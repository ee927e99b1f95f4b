use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Finite differences and cube attacks over GF(p) and GF(p^m).
#[derive(Parser, Debug)]
#[command(name = "gfcube", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply the finite differences of a plan to a polynomial.
    Diff(DiffArgs),
    /// Degree bound after k differences of x^d.
    DegreeBound(DegreeBoundArgs),
    /// Write a target description file.
    MakeTarget(MakeTargetArgs),
    /// Search a target for maxterms and write them to a record file.
    AttackPre(AttackPreArgs),
    /// Recover the key of a target from a record file.
    AttackOnline(AttackOnlineArgs),
    /// Run the seeded property checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct DiffArgs {
    /// Polynomial text, or `@path` to read it from a file.
    poly: String,
    /// Field: `p`, `p^m` or `p^m/c_m,...,c_0`.
    #[arg(long)]
    field: String,
    /// Term naming the variables and multiplicities, e.g. `x1^2*x3`.
    #[arg(long)]
    plan: String,
    /// Steps per plan variable: groups separated by `;`, elements by `,`.
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct DegreeBoundArgs {
    /// Exponent d.
    d: u64,
    /// Number of differences k.
    k: u64,
    #[arg(long)]
    field: String,
}

#[derive(Args, Debug)]
struct MakeTargetArgs {
    /// `planted` or `toy`.
    #[arg(long, default_value = "planted")]
    kind: String,
    #[arg(long)]
    field: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    n_pub: usize,
    #[arg(long, default_value_t = 3)]
    n_sec: usize,
    #[arg(long, default_value_t = 4)]
    degree: u64,
    #[arg(long, default_value_t = 8)]
    noise_terms: usize,
    /// Public term of multiplicity degree - 1 to plant first.
    #[arg(long)]
    cube: Option<String>,
    /// Toy cipher state width.
    #[arg(long, default_value_t = 4)]
    width: usize,
    /// Toy cipher rounds.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Explicit key, comma separated; drawn from the seed otherwise.
    #[arg(long)]
    key: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct AttackPreArgs {
    /// Target description file.
    target: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Linearity trials per candidate term.
    #[arg(long)]
    trials: Option<usize>,
    /// Largest total multiplicity of candidate terms.
    #[arg(long)]
    max_mult: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record file to write; stdout if absent.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct AttackOnlineArgs {
    /// Target description file (its key is the one to recover).
    target: String,
    /// Record file from `attack-pre`.
    records: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    seed: u64,
    /// Multiplies the number of random cases.
    #[arg(long, default_value_t = 1)]
    scale: usize,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Diff(a) => commands::diff(a),
        Command::DegreeBound(a) => commands::degree_bound(a),
        Command::MakeTarget(a) => commands::make_target(a),
        Command::AttackPre(a) => commands::attack_pre(a),
        Command::AttackOnline(a) => commands::attack_online(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
