//! `quadfib`: batch driver for the verification suite.
//!
//! Exit status: 0 when every requested check passes, 1 on a failed check,
//! 2 on bad input, 3 when an enumeration budget is exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "quadfib", version, about = "Exact finite-field checks for a quadric fibration over P^2")]
struct Cli {
    /// Worker threads for parallel enumeration.
    #[arg(long, env = "QFIB_WORKERS", global = true)]
    workers: Option<usize>,
    /// Cap on the size of any single enumeration.
    #[arg(long, default_value_t = 1 << 26, global = true)]
    budget: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdmissibilityArg {
    Strict,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    #[value(name = "Y")]
    Y,
    #[value(name = "Y1")]
    Y1,
    #[value(name = "Y0")]
    Y0,
    #[value(name = "X")]
    X,
    Fibre,
}

/// Extension degrees, written `m` or `lo..hi` (inclusive).
#[derive(Debug, Clone)]
struct Ext(Vec<u32>);

fn parse_ext(s: &str) -> Result<Ext, String> {
    let bad = || format!("expected m or lo..hi, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let m: u32 = s.trim().parse().map_err(|_| bad())?;
            (m, m)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok(Ext((lo..=hi).collect()))
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search the coefficient box for an admissible (l1, l2).
    SearchConfig {
        #[arg(long)]
        field: String,
        #[arg(long, value_enum, default_value = "exhaustive")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "strict")]
        admissibility: AdmissibilityArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        tries: u64,
        /// Count every admissible pair instead of stopping at the first.
        #[arg(long)]
        count_all: bool,
        /// Write the witness file here when one is found.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Zero-count bound for random and monomial hypersurfaces.
    VerifyBound {
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
    /// Point counts of Y, the blow-ups, or one fibre.
    Count {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, value_parser = parse_ext, default_value = "1")]
        ext: Ext,
        /// Base point `x,y,z` (element codes) for `--space fibre`.
        #[arg(long)]
        point: Option<String>,
    },
    /// Closed-form count of a diagonal quadric, optionally against enumeration.
    QuadCount {
        #[arg(long)]
        field: String,
        /// Diagonal entries as element codes, comma-separated.
        #[arg(long)]
        diag: String,
        #[arg(long, value_parser = parse_ext, default_value = "1")]
        ext: Ext,
        #[arg(long)]
        brute: bool,
    },
    /// Jacobian census of Sing(Y) against the expected centers.
    SingularCensus {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, value_parser = parse_ext, default_value = "1")]
        ext: Ext,
    },
    /// Center and exceptional-fibre certificates of the resolution.
    QmapCertify {
        #[arg(long)]
        witness: PathBuf,
    },
    /// Congruences and trace fits for Y, Y1, X, or the model quadrics C1..C5.
    BettiCheck {
        /// Y, Y1, X, C1, C2, C~2, C3, C~3, C4 or C5.
        #[arg(long)]
        space: String,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, value_parser = parse_ext, default_value = "1..3")]
        ext: Ext,
    },
    /// Residues of {a, f, g1} along every line of P^2(F_q).
    Residues {
        #[arg(long)]
        witness: PathBuf,
    },
    /// Every acceptance check, as a verdict table.
    VerifyAll {
        /// Use this witness instead of the built-in ones.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Comma-separated check ids, e.g. `A6,A9`.
        #[arg(long)]
        only: Option<String>,
        /// CSV mirror of the verdict table.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(ok) => ExitCode::from(if ok { 0 } else { 1 }),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(e)) => {
            eprintln!("budget exceeded: {e:#}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_ranges() {
        assert_eq!(parse_ext("2").unwrap().0, vec![2]);
        assert_eq!(parse_ext("1..3").unwrap().0, vec![1, 2, 3]);
        assert!(parse_ext("3..1").is_err());
        assert!(parse_ext("0").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
