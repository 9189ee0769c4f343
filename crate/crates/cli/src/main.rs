use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use okmod::{run, Command, Job};

/// Hermite and Smith normal forms of modules over rings of integers.
#[derive(Parser, Debug)]
#[command(name = "okmod", version)]
struct Args {
    /// What to compute.
    #[arg(value_enum)]
    command: Command,
    /// Field description file.
    #[arg(long)]
    field: PathBuf,
    /// Pseudo-matrix or bi-pseudo matrix file.
    #[arg(long)]
    matrix: PathBuf,
    /// Ideal file with a known multiple of the determinantal ideal.
    #[arg(long)]
    detideal: Option<PathBuf>,
    /// Reduce the result to its canonical form.
    #[arg(long)]
    canonical: bool,
    /// Run the brute-force oracles on the result.
    #[arg(long)]
    check: bool,
    /// With `check`: verify this claimed result instead of recomputing it.
    #[arg(long)]
    result: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Seed for the randomized parts of `check`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    #[cfg(feature = "parallel")]
    if args.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build_global() {
            eprintln!("okmod: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if args.jobs > 1 {
        eprintln!("okmod: built without the `parallel` feature, running on one thread");
    }
    let job = Job {
        command: args.command,
        field: args.field,
        matrix: args.matrix,
        detideal: args.detideal,
        result: args.result,
        canonical: args.canonical,
        check: args.check,
        seed: args.seed,
    };
    match run(&job) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("okmod: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
