//! `shtuka`: batch reports for Carlitz–Tate towers, openness sweeps and motives.
//!
//! Exit status: 0 when every internal check passed, 1 when a check failed,
//! 2 on invalid input or a computation error (partial output is still written).

mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use report::Outcome;

#[derive(Parser, Debug)]
#[command(name = "shtuka", version, about = "Local shtukas, Carlitz–Tate towers and v-adic Galois images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; `table` is human-readable.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build K_n and report its degree, generator valuations and the Carlitz relation.
    Tower {
        /// Residue field size q_v (odd prime power).
        #[arg(long)]
        q: u64,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 32)]
        zeta_prec: i64,
        /// Defaults to level + 1.
        #[arg(long)]
        z_prec: Option<i64>,
    },
    /// Index of the d-th power image in the unit groups, swept over d and n.
    Openness {
        #[arg(long)]
        q: u64,
        /// A value, an inclusive range `a..b`, or a comma list.
        #[arg(long)]
        d: String,
        /// A value, an inclusive range `a..b`, or a comma list.
        #[arg(long)]
        level: String,
        /// Largest unit group to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
    },
    /// Associate the local shtuka of a motive file (JSON or TOML) and decide openness.
    Motive {
        input: PathBuf,
        #[arg(long, default_value_t = 32)]
        zeta_prec: i64,
        /// Residue extension degree for the rank-one normal form.
        #[arg(long, default_value_t = 1)]
        residue_ext: u32,
        /// Largest residue extension searched when the normal form needs one.
        #[arg(long, default_value_t = 4)]
        max_ext: u32,
    },
    /// Run the exhaustive invariant suites and print a pass/fail matrix.
    Selftest {
        /// Restrict to these suites.
        #[arg(long)]
        suite: Vec<String>,
    },
}

/// Parses `5`, `1..9` (inclusive), `1..=9` or `2,3,6`.
fn parse_list(s: &str) -> anyhow::Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty range {s}");
        }
        return Ok((a..=b).collect());
    }
    let values = s
        .split(',')
        .map(|x| x.trim().parse::<u64>().with_context(|| format!("invalid value {x:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if values.is_empty() {
        bail!("empty list");
    }
    Ok(values)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Tower { q, level, zeta_prec, z_prec } => {
            let z_prec = z_prec.unwrap_or(*level as i64 + 1);
            if *zeta_prec < 1 || z_prec < 1 {
                bail!("precisions must be at least 1");
            }
            report::tower(*q, *level, *zeta_prec, z_prec)
        }
        Command::Openness { q, d, level, cap } => {
            let ds = parse_list(d).context("--d")?;
            if ds.contains(&0) {
                bail!("--d: dimensions must be at least 1");
            }
            let levels = parse_list(level).context("--level")?;
            let levels = levels.into_iter().map(u32::try_from).collect::<Result<Vec<_>, _>>()?;
            report::openness(*q, &ds, &levels, *cap)
        }
        Command::Motive { input, zeta_prec, residue_ext, max_ext } => {
            if *zeta_prec < 1 {
                bail!("precisions must be at least 1");
            }
            report::motive(input, *zeta_prec, *residue_ext, *max_ext)
        }
        Command::Selftest { suite } => {
            let known = shtuka_core::selftest::suite_names();
            if let Some(bad) = suite.iter().find(|s| !known.contains(&s.as_str())) {
                bail!("unknown suite {bad:?}; known suites: {}", known.join(", "));
            }
            Ok(report::selftest(suite))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.unwrap_or(match cli.command {
        Command::Selftest { .. } => Format::Table,
        _ => Format::Json,
    });
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let rendered = match outcome.render(format) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(rendered.as_bytes())),
        None => io::stdout().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    if let Some(summary) = &outcome.summary {
        eprint!("{summary}");
    }
    for msg in &outcome.diagnostics {
        eprintln!("{msg}");
    }
    ExitCode::from(outcome.exit_code())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1..9").unwrap().len(), 9);
        assert_eq!(parse_list("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_list("2, 3,6").unwrap(), vec![2, 3, 6]);
        assert_eq!(parse_list("4").unwrap(), vec![4]);
        assert!(parse_list("5..2").is_err());
        assert!(parse_list("x").is_err());
    }
}
