use std::fs;
use std::path::{Path, PathBuf};

use biclique_core::engine::{decompose_greedy, decompose_multi_null_table, DecomposeConfig, Decomposition, DecompositionKind};
use biclique_core::exposure::parse_label_list;
use biclique_core::graph::{load_snapshot, ExposureFamily, Snapshot};
use biclique_core::rng;
use clap::Args;
use serde::Serialize;

use crate::error::{at_path, CliError, CliResult};
use crate::report::{emit, stamp};

#[derive(Args, Debug, Serialize)]
pub struct DecomposeArgs {
    /// Graph snapshot written by `graph`.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub min_units: usize,
    #[arg(long, default_value_t = 1)]
    pub min_assignments: usize,
    /// Recursion nodes per biclique search.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Decompose for an intersection hypothesis instead: `exclusion`, or
    /// label sets separated by `/`, e.g. `0/1,2`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decomposition JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct DecomposeBody<'a> {
    decomposition: &'a Path,
    n_bicliques: usize,
    covered_assignments: usize,
    relaxed_from: Option<usize>,
    truncated_searches: usize,
    max_units: usize,
    max_assignments: usize,
    locator_checksum: String,
}

pub fn parse_family(s: &str) -> CliResult<ExposureFamily> {
    if s == "exclusion" {
        return Ok(ExposureFamily::exclusion());
    }
    let sets = s.split('/').map(parse_label_list).collect::<Result<Vec<_>, _>>()?;
    Ok(ExposureFamily::new(sets)?)
}

pub fn decompose(args: &DecomposeArgs, snap: &Snapshot) -> CliResult<Decomposition> {
    let mut config = DecomposeConfig::with_floors(args.min_units, args.min_assignments);
    if let Some(b) = args.budget {
        config.node_budget = b;
    }
    if args.min_units == 0 || args.min_assignments == 0 {
        return Err(CliError::validation("size floors must be at least 1"));
    }
    let d = match &args.family {
        None => decompose_greedy(&snap.graph, &config)?,
        Some(f) => {
            let family = parse_family(f)?;
            let seed = args.seed.ok_or_else(|| CliError::validation("--family draws random anchors and needs --seed"))?;
            let table = snap
                .graph
                .exposure_table()
                .ok_or_else(|| CliError::validation("snapshot carries no exposure labels"))?;
            decompose_multi_null_table(table, &family, &config, &mut rng::seeded(seed))?
        }
    };
    Ok(match args.seed {
        Some(s) => d.with_seed(s),
        None => d,
    })
}

/// Loads a decomposition and checks it against its host graph.
pub fn load_checked(path: &Path, snap: &Snapshot) -> CliResult<Decomposition> {
    let text = at_path(path, fs::read_to_string(path))?;
    let d = at_path(path, Decomposition::from_json(&text))?;
    let check = match d.kind() {
        DecompositionKind::SingleGraph => d.validate(&snap.graph),
        DecompositionKind::MultiNull { family } => {
            let table = snap
                .graph
                .exposure_table()
                .ok_or_else(|| CliError::validation("snapshot carries no exposure labels"))?;
            d.validate_multi_null(table, family)
        }
    };
    at_path(path, check)?;
    Ok(d)
}

pub fn run(args: &DecomposeArgs) -> CliResult<()> {
    let snap = at_path(&args.graph, load_snapshot(&args.graph))?;
    let d = decompose(args, &snap)?;
    fs::write(&args.out, d.to_json()? + "\n")?;
    let body = DecomposeBody {
        decomposition: &args.out,
        n_bicliques: d.len(),
        covered_assignments: d.covered().len(),
        relaxed_from: d.relaxed_from(),
        truncated_searches: d.truncated_searches(),
        max_units: d.bicliques().iter().map(|b| b.n_units()).max().unwrap_or(0),
        max_assignments: d.bicliques().iter().map(|b| b.n_assignments()).max().unwrap_or(0),
        locator_checksum: d.locator_checksum(),
    };
    emit(&stamp(args, args.seed, &body)?, None)
}
