use std::path::PathBuf;

use biclique_core::engine::Decomposition;
use biclique_core::exposure::Label;
use biclique_core::graph::{load_snapshot, Snapshot};
use biclique_core::rng;
use biclique_core::test::{
    invert_additive_ci, randomization_pvalue, residualize_outcomes, shift_outcomes, Mode, RandomizationFrame, Sidedness,
    TestConfig, TestReport, TestStatistic, TiePolicy,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::commands::decompose::load_checked;
use crate::error::{at_path, CliError, CliResult};
use crate::input::{read_outcomes, read_units};
use crate::report::{emit, stamp};

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StatArg {
    DiffMeans,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TieArg {
    Inclusive,
    Strict,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SidedArg {
    Greater,
    TwoSided,
}

/// Inputs shared by `test` and `ci`.
#[derive(Args, Debug, Serialize)]
pub struct TestInputs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub decomp: PathBuf,
    /// CSV with a `y` column, one row per unit.
    #[arg(long)]
    pub outcomes: PathBuf,
    /// Index of the observed assignment in the graph.
    #[arg(long)]
    pub obs_index: usize,
    /// Control-side exposure label.
    #[arg(long)]
    pub a: String,
    /// Treatment-side exposure label.
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub seed: u64,
    /// Monte Carlo draws when the biclique is too large for exact evaluation.
    #[arg(long, default_value_t = 5_000)]
    pub draws: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = TieArg::Inclusive)]
    pub tie: TieArg,
    /// Units CSV whose cov_* columns adjust the outcomes (with --adjust).
    #[arg(long)]
    pub units: Option<PathBuf>,
    /// Replace outcomes by residuals on the unit covariates.
    #[arg(long, requires = "units")]
    pub adjust: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub inputs: TestInputs,
    #[arg(long, value_enum, default_value_t = StatArg::DiffMeans)]
    pub stat: StatArg,
    #[arg(long, value_enum, default_value_t = SidedArg::Greater)]
    pub sided: SidedArg,
    /// Report JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dump evaluated randomization draws as CSV assignment_index,stat,mass.
    #[arg(long)]
    pub draws_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CiArgs {
    #[command(flatten)]
    pub inputs: TestInputs,
    /// Effect grid, `lo:hi:step` or a comma list.
    #[arg(long)]
    pub grid: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Loaded {
    snap: Snapshot,
    decomp: Decomposition,
    weights: Vec<f64>,
    y: Vec<f64>,
    covariates: Option<Vec<Vec<f64>>>,
    a: Label,
    b: Label,
    config: TestConfig,
}

impl Loaded {
    fn new(inp: &TestInputs) -> CliResult<Self> {
        let snap = at_path(&inp.graph, load_snapshot(&inp.graph))?;
        if snap.graph.exposure_table().is_none() || snap.graph.assignments().is_empty() {
            return Err(CliError::validation(format!("{}: snapshot carries no assignments or labels", inp.graph.display())));
        }
        let decomp = load_checked(&inp.decomp, &snap)?;
        let h = snap.graph.n_assignments();
        if inp.obs_index >= h {
            return Err(CliError::validation(format!("--obs-index {} out of range for {h} assignments", inp.obs_index)));
        }
        let weights = snap.weights.clone().unwrap_or_else(|| vec![1.0; h]);
        let n = snap.graph.n_units();
        let y = read_outcomes(&inp.outcomes, n)?;
        let covariates = match (&inp.units, inp.adjust) {
            (Some(p), true) => {
                let u = read_units(p)?;
                if u.len() != n {
                    return Err(CliError::validation(format!("{}: {} units, graph has {n}", p.display(), u.len())));
                }
                if u.covariate_names.is_empty() {
                    return Err(CliError::validation(format!("{}: no cov_* columns to adjust for", p.display())));
                }
                Some(u.covariates)
            }
            _ => None,
        };
        let config = TestConfig {
            tie_policy: match inp.tie {
                TieArg::Inclusive => TiePolicy::Inclusive,
                TieArg::Strict => TiePolicy::Strict,
            },
            mode: match inp.mode {
                ModeArg::Auto => Mode::Auto,
                ModeArg::Exact => Mode::Exact,
                ModeArg::MonteCarlo => Mode::MonteCarlo,
            },
            draws: inp.draws,
            seed: Some(inp.seed),
            ..TestConfig::default()
        };
        if config.draws == 0 {
            return Err(CliError::validation("--draws must be positive"));
        }
        Ok(Loaded { snap, decomp, weights, y, covariates, a: inp.a.parse()?, b: inp.b.parse()?, config })
    }

    fn frame(&self) -> RandomizationFrame<'_> {
        RandomizationFrame {
            assignments: self.snap.graph.assignments(),
            weights: &self.weights,
            table: self.snap.graph.exposure_table().expect("checked on load"),
        }
    }

    fn adjusted(&self, y: &[f64]) -> biclique_core::Result<Vec<f64>> {
        match &self.covariates {
            Some(x) => residualize_outcomes(y, x),
            None => Ok(y.to_vec()),
        }
    }

    fn test(&self, obs: usize, y: &[f64], stat: &TestStatistic, config: &TestConfig, r: &mut rng::Rng) -> biclique_core::Result<TestReport> {
        let b = self.decomp.locate_biclique(obs)?;
        let mut report = randomization_pvalue(self.frame(), b, obs, y, stat, config, r)?;
        report.biclique_index = self.decomp.locate(obs);
        report.obs_index = Some(obs);
        report.decomposition_checksum = Some(self.decomp.locator_checksum());
        Ok(report)
    }
}

#[derive(Serialize)]
struct TestBody<'a> {
    #[serde(flatten)]
    report: &'a TestReport,
    graph: &'a PathBuf,
    decomposition: &'a PathBuf,
    adjusted: bool,
}

pub fn run_test(args: &TestArgs) -> CliResult<()> {
    let inp = &args.inputs;
    let l = Loaded::new(inp)?;
    let stat = match args.stat {
        StatArg::DiffMeans => TestStatistic::diff_in_means(l.a.clone(), l.b.clone())?,
    };
    let config = TestConfig {
        sidedness: match args.sided {
            SidedArg::Greater => Sidedness::Greater,
            SidedArg::TwoSided => Sidedness::TwoSided,
        },
        keep_draws: args.draws_csv.is_some(),
        ..l.config.clone()
    };
    let y = l.adjusted(&l.y)?;
    let mut report = l.test(inp.obs_index, &y, &stat, &config, &mut rng::seeded(inp.seed))?;
    if let Some(path) = &args.draws_csv {
        let mut w = at_path(path, csv::Writer::from_path(path))?;
        for d in &report.draws {
            w.serialize(d)?;
        }
        w.flush()?;
        report.draws.clear();
    }
    let body = TestBody { report: &report, graph: &inp.graph, decomposition: &inp.decomp, adjusted: l.covariates.is_some() };
    emit(&stamp(args, Some(inp.seed), &body)?, args.out.as_deref())
}

/// `lo:hi:step` or a comma list, ascending.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::validation(format!("bad grid {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let grid: Vec<f64> = match s.split(':').collect::<Vec<_>>().as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if !(step > 0.0) || hi < lo {
                return Err(bad());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            (0..=n).map(|k| lo + k as f64 * step).collect()
        }
        [_] => s.split(',').map(num).collect::<CliResult<_>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::validation(format!("grid {s:?} must be non-empty and strictly increasing")));
    }
    Ok(grid)
}

#[derive(Serialize)]
struct CiBody<'a> {
    interval: &'a biclique_core::test::ConfidenceInterval,
    obs_index: usize,
    biclique_index: Option<usize>,
    n_units: usize,
    graph: &'a PathBuf,
    decomposition: &'a PathBuf,
    adjusted: bool,
}

pub fn run_ci(args: &CiArgs) -> CliResult<()> {
    let inp = &args.inputs;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::validation("--alpha must lie in (0, 1)"));
    }
    let grid = parse_grid(&args.grid)?;
    let l = Loaded::new(inp)?;
    let stat = TestStatistic::diff_in_means(l.a.clone(), l.b.clone())?;
    let config = TestConfig { sidedness: Sidedness::TwoSided, ..l.config.clone() };
    let table = l.snap.graph.exposure_table().expect("checked on load");
    let labels: Vec<Label> = (0..table.n_units()).map(|i| table.label(inp.obs_index, i).clone()).collect();
    let mut r = rng::seeded(inp.seed);
    let ci = invert_additive_ci(&grid, args.alpha, |tau| {
        let y = l.adjusted(&shift_outcomes(&l.y, &labels, &l.b, tau))?;
        Ok(l.test(inp.obs_index, &y, &stat, &config, &mut r)?.pval)
    })?;
    let body = CiBody {
        interval: &ci,
        obs_index: inp.obs_index,
        biclique_index: l.decomp.locate(inp.obs_index),
        n_units: l.decomp.locate_biclique(inp.obs_index)?.n_units(),
        graph: &inp.graph,
        decomposition: &inp.decomp,
        adjusted: l.covariates.is_some(),
    };
    emit(&stamp(args, Some(inp.seed), &body)?, args.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.5").unwrap(), [0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-1,0,2").unwrap(), [-1.0, 0.0, 2.0]);
        assert_eq!(parse_grid("-1:2:0.05").unwrap().len(), 61);
        assert!(parse_grid("1,0").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a").is_err());
    }
}
