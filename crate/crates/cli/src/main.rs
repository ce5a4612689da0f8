mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cache::Cache;
use commands::{Failure, Options};

#[derive(Parser, Debug)]
#[command(name = "maninforge", version, about = "Hecke algebras, modular degrees and congruence numbers for J0(n)")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Artifact cache directory.
    #[arg(long, global = true, env = "MANINFORGE_CACHE", default_value = "./.maninforge")]
    cache_dir: PathBuf,
    /// Bypass the artifact cache entirely.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Allow levels whose cuspidal rank exceeds the cost threshold.
    #[arg(long, global = true)]
    long_running: bool,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of the modular symbol space.
    Space { n: u64 },
    /// Newform classes with dimensions and eigenvalue previews.
    Decompose { n: u64 },
    /// Modular degrees, congruence numbers and local diagnostics.
    Invariants {
        n: u64,
        /// Restrict the output to this class index (1-based).
        #[arg(long = "class")]
        class: Option<usize>,
        /// Extra primes to diagnose, comma separated.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// Check ord_p(deg_f) = ord_p(cong_f) for elliptic classes.
    Certify { n: u64 },
    /// Look for classes with ord_2(deg_f) ≠ ord_2(cong_f) in a range.
    Scan { n_min: u64, n_max: u64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("warning: could not configure {k} threads: {e}");
        }
    }
    let cache = if cli.no_cache {
        Cache::disabled()
    } else {
        Cache::new(&cli.cache_dir)
    };
    let opts = Options {
        json: cli.json,
        long_running: cli.long_running,
        cache,
    };
    let result = match cli.command {
        Command::Space { n } => commands::space(&opts, n),
        Command::Decompose { n } => commands::decompose(&opts, n),
        Command::Invariants { n, class, primes } => commands::invariants(&opts, n, class, &primes),
        Command::Certify { n } => commands::certify(&opts, n),
        Command::Scan { n_min, n_max } => commands::scan(&opts, n_min, n_max),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code())
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

impl Failure {
    fn message(&self) -> String {
        match self {
            Failure::Refused(m) | Failure::Violation(m) | Failure::Other(m) => m.clone(),
        }
    }
}
