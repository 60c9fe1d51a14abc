use std::path::PathBuf;

use biclique_core::exposure::{parse_label_list, subsample_support, EnumeratedDesign};
use biclique_core::graph::{save_snapshot, NullExposureGraph};
use biclique_core::rng;
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::input::{read_assignments, read_units, DesignSpec, ExposureSpec};
use crate::report::{emit, stamp};

/// Supports up to this size are enumerated when no candidate count is given.
const ENUMERATION_LIMIT: usize = 1 << 20;

#[derive(Args, Debug, Serialize)]
pub struct GraphArgs {
    /// Units CSV: unit_id,x,y,cluster,zone,cov_*.
    #[arg(long)]
    pub units: PathBuf,
    /// Design JSON, e.g. {"kind":"two_stage","treated_clusters":10}.
    #[arg(long, required_unless_present = "assignments", conflicts_with = "assignments")]
    pub design: Option<PathBuf>,
    /// Enumerated candidate assignments (0/1 columns, optional trailing mass).
    #[arg(long)]
    pub assignments: Option<PathBuf>,
    /// clustered, spatial:R[:CONTROL] or khop:K.
    #[arg(long, default_value = "clustered")]
    pub exposure: String,
    /// Edge list from,to for khop exposures.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Focal exposure labels, comma separated.
    #[arg(long)]
    pub focal: String,
    /// Sample this many distinct support points instead of enumerating.
    #[arg(long, requires = "design")]
    pub candidates: Option<usize>,
    /// Single-row assignment CSV kept in the candidate set.
    #[arg(long)]
    pub observed: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Binary graph snapshot.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON summary; defaults to the snapshot path with a .json extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Serialize)]
struct GraphBody {
    graph: biclique_core::graph::GraphSummary,
    snapshot: PathBuf,
    observed_index: Option<usize>,
}

/// Candidate set with the index of the observed assignment, if known.
fn candidates(args: &GraphArgs, units: &crate::input::Units) -> CliResult<(EnumeratedDesign, Option<usize>)> {
    let observed = match &args.observed {
        Some(p) => {
            let (mut z, _) = read_assignments(p)?;
            if z.len() != 1 {
                return Err(CliError::validation(format!("{}: expected exactly one assignment", p.display())));
            }
            Some(z.remove(0))
        }
        None => None,
    };
    if let Some(path) = &args.assignments {
        let (rows, masses) = read_assignments(path)?;
        if rows[0].len() != units.len() {
            return Err(CliError::validation(format!(
                "{}: {} unit columns for {} units",
                path.display(),
                rows[0].len(),
                units.len()
            )));
        }
        let set = EnumeratedDesign::new(rows, masses)?;
        let obs = match &observed {
            Some(z) => Some(set.index_of(z).ok_or_else(|| CliError::validation("observed assignment is not a candidate"))?),
            None => None,
        };
        return Ok((set, obs));
    }
    let spec = DesignSpec::read(args.design.as_ref().expect("clap requires design or assignments"))?;
    let design = spec.build(units)?;
    match args.candidates {
        Some(m) => {
            let seed = args.seed.ok_or_else(|| CliError::validation("--candidates samples the support and needs --seed"))?;
            let mut r = rng::seeded(seed);
            let z0 = match observed {
                Some(z) => z,
                None => design.sample_one(&mut r),
            };
            Ok((subsample_support(&design, &z0, m, &mut r)?, Some(0)))
        }
        None => {
            let support = design
                .enumerate_support(ENUMERATION_LIMIT)
                .ok_or_else(|| CliError::validation("design support is too large to enumerate; pass --candidates"))?;
            let masses = support.iter().map(|z| design.mass(z)).collect::<Result<Vec<_>, _>>()?;
            let set = EnumeratedDesign::new(support, masses)?;
            let obs = match &observed {
                Some(z) => Some(set.index_of(z).ok_or_else(|| CliError::validation("observed assignment is outside the design support"))?),
                None => None,
            };
            Ok((set, obs))
        }
    }
}

pub fn build(args: &GraphArgs) -> CliResult<(NullExposureGraph, Vec<f64>, Option<usize>)> {
    let units = read_units(&args.units)?;
    let exposure: ExposureSpec = args.exposure.parse()?;
    let map = exposure.build(&units, args.edges.as_deref())?;
    let focal = parse_label_list(&args.focal)?;
    let (set, obs) = candidates(args, &units)?;
    let graph = NullExposureGraph::build(set.assignments().to_vec(), &map, &focal)?;
    Ok((graph, set.weights().to_vec(), obs))
}

pub fn run(args: &GraphArgs) -> CliResult<()> {
    let (graph, weights, observed_index) = build(args)?;
    save_snapshot(&args.out, &graph, Some(&weights))?;
    let body = GraphBody { graph: graph.summary(), snapshot: args.out.clone(), observed_index };
    let report = stamp(args, args.seed, &body)?;
    let summary = args.summary.clone().unwrap_or_else(|| args.out.with_extension("json"));
    emit(&report, Some(&summary))?;
    emit(&json!({ "snapshot": args.out, "summary": summary, "density": report["graph"]["density"] }), None)
}
