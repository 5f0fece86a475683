use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fano_core::equivalence::Relation;
use fano_core::fixtures;
use fano_core::polytope::{parse_polytopes, parse_records, RawRecord, SmoothFanoPolytope};
use serde_json::Value;

mod commands;
mod table;

#[derive(Parser)]
#[command(
    name = "fano",
    version,
    about = "Cohomology rings and equivalence tests for toric Fano manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check every record is a smooth Fano polytope.
    Validate,
    /// Presentation, Gröbner basis, k-th power vanishing elements, maximal basis number, degree.
    Invariants,
    /// Partition by sign equivalence, unimodular equivalence and fingerprint.
    Classify,
    /// Anticanonical degrees by two routes, grouped by fingerprint.
    Degrees,
    /// Degree gate and bounded ring isomorphism search on fingerprint-equal pairs.
    Iso,
}

#[derive(Args)]
struct Opts {
    /// Polytope files in the `id <n> dim <d> vertices <m>` format. Bundled tables when absent.
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Select one polytope by ID.
    #[arg(long, global = true)]
    id: Option<u32>,
    /// Select polytopes by ID, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    ids: Vec<u32>,
    /// Restrict the bundled tables to one dimension.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(3..=4))]
    dim: Option<u8>,
    /// Coefficient box for integral searches (default 5, or 2 for `iso`).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    bound: Option<u32>,
    /// Primes for the mod-p columns.
    #[arg(
        long = "mod",
        global = true,
        value_delimiter = ',',
        default_value = "2,3"
    )]
    primes: Vec<u32>,
    #[arg(long, global = true, value_enum, default_value_t = RelationArg::All)]
    relation: RelationArg,
    /// Compare the JSON report with this file; exit 1 on mismatch.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum RelationArg {
    Sign,
    Unimodular,
    Fingerprint,
    All,
}

impl RelationArg {
    fn relations(self) -> Vec<Relation> {
        match self {
            RelationArg::Sign => vec![Relation::SignEquiv],
            RelationArg::Unimodular => vec![Relation::UnimodularEquiv],
            RelationArg::Fingerprint => vec![Relation::FingerprintEqual],
            RelationArg::All => vec![
                Relation::UnimodularEquiv,
                Relation::SignEquiv,
                Relation::FingerprintEqual,
            ],
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

/// A finished report. `failed` maps to exit status 1.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub failed: bool,
}

pub struct Config {
    pub bound: u32,
    pub primes: Vec<u32>,
    pub relations: Vec<Relation>,
    /// Dimension-4 IDs absent from the input, for the bundled table only.
    pub missing: Vec<u32>,
}

fn read_inputs(paths: &[PathBuf]) -> Result<Vec<(PathBuf, String)>> {
    paths
        .iter()
        .map(|p| {
            Ok((
                p.clone(),
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            ))
        })
        .collect()
}

fn select<T>(items: Vec<T>, ids: &[u32], id_of: impl Fn(&T) -> u32) -> Result<Vec<T>> {
    if ids.is_empty() {
        return Ok(items);
    }
    let available: Vec<u32> = items.iter().map(&id_of).collect();
    if let Some(bad) = ids.iter().find(|i| !available.contains(i)) {
        let mut list = available.clone();
        list.sort_unstable();
        let list: Vec<String> = list.iter().map(ToString::to_string).collect();
        bail!("unknown id {bad}; available: {}", list.join(", "));
    }
    let mut picked: Vec<T> = items
        .into_iter()
        .filter(|x| ids.contains(&id_of(x)))
        .collect();
    picked.sort_by_key(|x| ids.iter().position(|i| *i == id_of(x)));
    Ok(picked)
}

fn bundled(dim: Option<u8>) -> Vec<SmoothFanoPolytope> {
    match dim {
        Some(3) => fixtures::dim3().to_vec(),
        Some(4) => fixtures::dim4().to_vec(),
        _ => fixtures::all().cloned().collect(),
    }
}

fn load(opts: &Opts, ids: &[u32]) -> Result<Vec<SmoothFanoPolytope>> {
    let polys = if opts.input.is_empty() {
        bundled(opts.dim)
    } else {
        let mut out = Vec::new();
        for (path, text) in read_inputs(&opts.input)? {
            out.extend(parse_polytopes(&text).with_context(|| path.display().to_string())?);
        }
        out
    };
    select(polys, ids, |p| p.id().unwrap_or(0))
}

fn load_records(opts: &Opts, ids: &[u32]) -> Result<Vec<(String, RawRecord)>> {
    let recs = if opts.input.is_empty() {
        bundled(opts.dim)
            .into_iter()
            .map(|p| {
                let rec = RawRecord {
                    id: p.id().unwrap_or(0),
                    dim: p.dim(),
                    vertices: p.vertices().to_vec(),
                    line: 0,
                };
                ("bundled".to_string(), rec)
            })
            .collect()
    } else {
        let mut out = Vec::new();
        for (path, text) in read_inputs(&opts.input)? {
            let name = path.display().to_string();
            let recs = parse_records(&text).with_context(|| name.clone())?;
            out.extend(recs.into_iter().map(|r| (name.clone(), r)));
        }
        out
    };
    select(recs, ids, |(_, r)| r.id)
}

/// First path at which two JSON values differ.
fn first_difference(path: &str, a: &Value, b: &Value) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            keys.into_iter().find_map(|k| match (x.get(k), y.get(k)) {
                (Some(u), Some(v)) => first_difference(&format!("{path}.{k}"), u, v),
                _ => Some(format!("{path}.{k}")),
            })
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => x
            .iter()
            .zip(y)
            .enumerate()
            .find_map(|(i, (u, v))| first_difference(&format!("{path}[{i}]"), u, v)),
        _ => (a != b).then(|| path.to_string()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let opts = &cli.opts;
    if let Some(bad) = opts.primes.iter().find(|p| ![2, 3, 5, 7].contains(*p)) {
        bail!("--mod accepts 2, 3, 5 and 7, not {bad}");
    }
    if let Some(j) = opts.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    let mut ids: Vec<u32> = opts
        .id
        .into_iter()
        .chain(opts.ids.iter().copied())
        .collect();
    ids.dedup();
    let default_bound = if cli.command == Command::Iso {
        2
    } else {
        fano_core::invariants::DEFAULT_BOUND
    };
    let bundled_d4 = opts.input.is_empty() && opts.dim != Some(3) && ids.is_empty();
    let config = Config {
        bound: opts.bound.unwrap_or(default_bound),
        primes: opts.primes.clone(),
        relations: opts.relation.relations(),
        missing: if bundled_d4 {
            fixtures::DIM4_MISSING.to_vec()
        } else {
            Vec::new()
        },
    };

    let mut report = match cli.command {
        Command::Validate => commands::validate(&load_records(opts, &ids)?),
        Command::Invariants => commands::invariants(&load(opts, &ids)?, &config)?,
        Command::Classify => commands::classify(&load(opts, &ids)?, &config),
        Command::Degrees => commands::degrees(&load(opts, &ids)?)?,
        Command::Iso => commands::iso(&load(opts, &ids)?, &config)?,
    };

    if let Some(path) = &opts.golden {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let golden: Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(at) = first_difference("$", &golden, &report.json) {
            report
                .text
                .push_str(&format!("\ngolden mismatch at {at}\n"));
            report.failed = true;
        } else {
            report.text.push_str("\ngolden: match\n");
        }
    }

    let body = match opts.format {
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
        Format::Text => report.text.clone(),
    };
    match &opts.output {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{body}"),
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
