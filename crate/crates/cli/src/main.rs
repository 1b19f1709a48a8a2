//! Command-line front end for the chiral de Rham section calculator.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chiral_core::assembly::global_table;
use chiral_core::sl2::{character, invariants};
use chiral_core::verify::{run_suite, Suite};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "chiral", version, about = "Global sections of the chiral de Rham complex on curves of genus g ≥ 2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of the sl₂-invariant spaces W^T(V)[k, l] for k ≤ K.
    Character {
        /// Highest conformal weight.
        #[arg(long, value_name = "K")]
        max_weight: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Dimension and optional basis of one invariant space.
    Invariants {
        /// Conformal weight.
        #[arg(long, value_name = "k")]
        weight: u32,
        /// Fermion number.
        #[arg(long, value_name = "l", allow_negative_numbers = true)]
        charge: i64,
        /// Print each basis state as a signed monomial expansion.
        #[arg(long)]
        basis: bool,
    },
    /// Run a property suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Stop the engine commutator sweep after this many seconds.
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<u64>,
    },
    /// Extension: dimensions of global sections on a genus-g curve, with
    /// line-bundle section counts supplied by classical Riemann–Roch.
    Hzero {
        /// Genus of the curve, at least 2.
        #[arg(long, value_name = "g", value_parser = clap::value_parser!(i64).range(2..))]
        genus: i64,
        /// Highest conformal weight.
        #[arg(long, value_name = "K")]
        max_weight: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Engine,
    Sl2,
    Geometry,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Engine => Suite::Engine,
            SuiteArg::Sl2 => Suite::Sl2,
            SuiteArg::Geometry => Suite::Geometry,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Serialize)]
struct Entry {
    k: i64,
    l: i64,
    dim: usize,
}

#[derive(Serialize)]
struct Table {
    max_weight: i64,
    entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<i64>,
}

impl Table {
    fn new(max_weight: i64, dims: &BTreeMap<(i64, i64), usize>, genus: Option<i64>) -> Self {
        Table {
            max_weight,
            entries: dims.iter().map(|(&(k, l), &dim)| Entry { k, l, dim }).collect(),
            genus,
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("table serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::from("k,l,dim\n");
                for e in &self.entries {
                    s.push_str(&format!("{},{},{}\n", e.k, e.l, e.dim));
                }
                s
            }
        }
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Character { max_weight, format } => match character(max_weight.into()) {
            Ok(table) => {
                print!("{}", Table::new(table.max_weight, &table.entries, None).render(format));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Invariants { weight, charge, basis } => match invariants(weight.into(), charge) {
            Ok(space) => {
                println!("dim {}", space.dimension());
                if basis {
                    for v in &space.basis {
                        println!("{v}");
                    }
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { suite, time_limit } => {
            let deadline = time_limit.map(|s| Instant::now() + Duration::from_secs(s));
            let reports = run_suite(suite.into(), deadline);
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Hzero { genus, max_weight, format } => match global_table(max_weight.into(), genus) {
            Ok(dims) => {
                print!("{}", Table::new(max_weight.into(), &dims, Some(genus)).render(format));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
