//! CSV and JSON ingestion.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use biclique_core::exposure::{
    Assignment, ClusterStructure, CompleteRandomization, Design, ExposureMap, HopNetwork, SpatialNetwork, DEFAULT_CONTROL_RADIUS,
};
use serde::{Deserialize, Serialize};

use crate::error::{at_path, CliError, CliResult};

/// Rows of a units file: `unit_id,x,y,cluster,zone,cov_1..cov_p`, where every
/// column but `unit_id` is optional.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Units {
    pub ids: Vec<String>,
    pub coords: Option<Vec<[f64; 2]>>,
    /// Dense cluster index per unit, numbered by first appearance.
    pub clusters: Option<Vec<usize>>,
    pub zones: Option<Vec<u8>>,
    pub covariate_names: Vec<String>,
    /// One row per unit.
    pub covariates: Vec<Vec<f64>>,
}

impl Units {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, id: &str) -> CliResult<usize> {
        self.ids
            .iter()
            .position(|u| u == id)
            .ok_or_else(|| CliError::validation(format!("unknown unit id {id:?}")))
    }

    pub fn cluster_structure(&self) -> CliResult<ClusterStructure> {
        let c = self.clusters.as_ref().ok_or_else(|| CliError::validation("units file has no cluster column"))?;
        Ok(ClusterStructure::new(c)?)
    }

    pub fn spatial_network(&self) -> CliResult<SpatialNetwork> {
        let c = self.coords.as_ref().ok_or_else(|| CliError::validation("units file has no x,y columns"))?;
        Ok(SpatialNetwork::new(c.clone())?)
    }
}

fn reader(path: &Path) -> CliResult<csv::Reader<fs::File>> {
    at_path(path, csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path))
}

fn parse_f64(path: &Path, line: usize, col: &str, s: &str) -> CliResult<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::validation(format!("{}: line {line}: column {col}: not a finite number: {s:?}", path.display()))),
    }
}

pub fn read_units(path: &Path) -> CliResult<Units> {
    let mut rdr = reader(path)?;
    let headers = at_path(path, rdr.headers())?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let id_col = col("unit_id").ok_or_else(|| CliError::validation(format!("{}: missing unit_id column", path.display())))?;
    let (x_col, y_col) = (col("x"), col("y"));
    if x_col.is_some() != y_col.is_some() {
        return Err(CliError::validation(format!("{}: x and y must appear together", path.display())));
    }
    let (cluster_col, zone_col) = (col("cluster"), col("zone"));
    let cov_cols: Vec<(usize, String)> =
        headers.iter().enumerate().filter(|(_, h)| h.starts_with("cov_")).map(|(k, h)| (k, h.to_string())).collect();

    let mut units = Units { covariate_names: cov_cols.iter().map(|(_, h)| h.clone()).collect(), ..Units::default() };
    let mut coords = Vec::new();
    let mut clusters = Vec::new();
    let mut cluster_ids: HashMap<String, usize> = HashMap::new();
    let mut zones = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = at_path(path, rec)?;
        let line = k + 2;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let id = field(id_col).to_string();
        if id.is_empty() {
            return Err(CliError::validation(format!("{}: line {line}: empty unit_id", path.display())));
        }
        if let Some(first) = seen.insert(id.clone(), line) {
            return Err(CliError::validation(format!("{}: unit_id {id:?} on lines {first} and {line}", path.display())));
        }
        if let (Some(xc), Some(yc)) = (x_col, y_col) {
            coords.push([parse_f64(path, line, "x", field(xc))?, parse_f64(path, line, "y", field(yc))?]);
        }
        if let Some(c) = cluster_col {
            let raw = field(c);
            if raw.is_empty() {
                return Err(CliError::validation(format!("{}: line {line}: empty cluster", path.display())));
            }
            let next = cluster_ids.len();
            clusters.push(*cluster_ids.entry(raw.to_string()).or_insert(next));
        }
        if let Some(c) = zone_col {
            match field(c) {
                "0" => zones.push(0),
                "1" => zones.push(1),
                z => return Err(CliError::validation(format!("{}: line {line}: zone must be 0 or 1, got {z:?}", path.display()))),
            }
        }
        let row = cov_cols.iter().map(|(c, name)| parse_f64(path, line, name, field(*c))).collect::<CliResult<Vec<_>>>()?;
        units.covariates.push(row);
        units.ids.push(id);
    }
    if units.ids.is_empty() {
        return Err(CliError::validation(format!("{}: no units", path.display())));
    }
    units.coords = x_col.map(|_| coords);
    units.clusters = cluster_col.map(|_| clusters);
    units.zones = zone_col.map(|_| zones);
    Ok(units)
}

/// Assignment rows of 0/1 cells with an optional trailing `mass` column.
/// Masses default to 1 when the column is absent.
pub fn read_assignments(path: &Path) -> CliResult<(Vec<Assignment>, Vec<f64>)> {
    let mut rdr = reader(path)?;
    let headers = at_path(path, rdr.headers())?.clone();
    let has_mass = headers.iter().last() == Some("mass");
    let n = headers.len() - usize::from(has_mass);
    if n == 0 {
        return Err(CliError::validation(format!("{}: no unit columns", path.display())));
    }
    let mut rows = Vec::new();
    let mut masses = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = at_path(path, rec)?;
        let line = k + 2;
        let mut cells = Vec::with_capacity(n);
        for (c, s) in rec.iter().take(n).enumerate() {
            cells.push(match s {
                "0" => 0u8,
                "1" => 1u8,
                _ => {
                    return Err(CliError::validation(format!(
                        "{}: line {line}: column {}: expected 0 or 1, got {s:?}",
                        path.display(),
                        &headers[c]
                    )))
                }
            });
        }
        rows.push(Assignment::from_bits(&cells)?);
        masses.push(if has_mass {
            let m = parse_f64(path, line, "mass", &rec[n])?;
            if m <= 0.0 {
                return Err(CliError::validation(format!("{}: line {line}: mass must be positive", path.display())));
            }
            m
        } else {
            1.0
        });
    }
    if rows.is_empty() {
        return Err(CliError::validation(format!("{}: no assignments", path.display())));
    }
    let mut first: HashMap<&Assignment, usize> = HashMap::new();
    for (k, z) in rows.iter().enumerate() {
        if let Some(j) = first.insert(z, k) {
            return Err(CliError::validation(format!(
                "{}: rows {} and {} hold the same assignment",
                path.display(),
                j + 1,
                k + 1
            )));
        }
    }
    Ok((rows, masses))
}

/// Outcome column `y`, one row per unit.
pub fn read_outcomes(path: &Path, n_units: usize) -> CliResult<Vec<f64>> {
    let mut rdr = reader(path)?;
    let headers = at_path(path, rdr.headers())?.clone();
    let c = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| CliError::validation(format!("{}: missing y column", path.display())))?;
    let mut y = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = at_path(path, rec)?;
        y.push(parse_f64(path, k + 2, "y", rec.get(c).unwrap_or(""))?);
    }
    if y.len() != n_units {
        return Err(CliError::validation(format!("{}: {} outcomes for {n_units} units", path.display(), y.len())));
    }
    Ok(y)
}

/// Edges `from,to` between unit ids.
pub fn read_edges(path: &Path, units: &Units) -> CliResult<Vec<(usize, usize)>> {
    let mut rdr = reader(path)?;
    let headers = at_path(path, rdr.headers())?.clone();
    let (Some(f), Some(t)) = (headers.iter().position(|h| h == "from"), headers.iter().position(|h| h == "to")) else {
        return Err(CliError::validation(format!("{}: need from,to columns", path.display())));
    };
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = at_path(path, rec)?;
        edges.push((units.index_of(&rec[f])?, units.index_of(&rec[t])?));
    }
    Ok(edges)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSpec {
    /// `n_treated` units drawn uniformly, optionally from a list of eligible
    /// unit ids.
    Complete {
        n_treated: usize,
        #[serde(default)]
        eligible: Option<Vec<String>>,
    },
    /// Treat `treated_clusters` clusters, one unit in each.
    TwoStage { treated_clusters: usize },
    /// Independent treatment with probability `p0` in zone 0 and `p1` in
    /// zone 1.
    BernoulliTwoZone { p0: f64, p1: f64 },
}

impl DesignSpec {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = at_path(path, fs::read_to_string(path))?;
        at_path(path, serde_json::from_str(&text))
    }

    pub fn build(&self, units: &Units) -> CliResult<Design> {
        let n = units.len();
        Ok(match self {
            DesignSpec::Complete { n_treated, eligible: None } => Design::complete(n, *n_treated)?,
            DesignSpec::Complete { n_treated, eligible: Some(ids) } => {
                let idx = ids.iter().map(|id| units.index_of(id)).collect::<CliResult<Vec<_>>>()?;
                Design::CompleteRandomization(CompleteRandomization::with_eligible(n, *n_treated, idx)?)
            }
            DesignSpec::TwoStage { treated_clusters } => Design::two_stage(units.cluster_structure()?, *treated_clusters)?,
            DesignSpec::BernoulliTwoZone { p0, p1 } => {
                let z = units.zones.clone().ok_or_else(|| CliError::validation("units file has no zone column"))?;
                Design::bernoulli_two_zone(z, *p0, *p1)?
            }
        })
    }
}

/// Exposure mapping named on the command line: `clustered`, `spatial:R`,
/// `spatial:R:CONTROL` or `khop:K`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExposureSpec {
    Clustered,
    Spatial { radius: f64, control_radius: f64 },
    KHop { k: usize },
}

impl std::str::FromStr for ExposureSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| CliError::validation(format!("bad number {t:?} in exposure {s:?}")));
        match parts.as_slice() {
            ["clustered"] => Ok(ExposureSpec::Clustered),
            ["spatial", r] => Ok(ExposureSpec::Spatial { radius: num(r)?, control_radius: DEFAULT_CONTROL_RADIUS }),
            ["spatial", r, c] => Ok(ExposureSpec::Spatial { radius: num(r)?, control_radius: num(c)? }),
            ["khop", k] => Ok(ExposureSpec::KHop {
                k: k.parse().map_err(|_| CliError::validation(format!("bad hop count in exposure {s:?}")))?,
            }),
            _ => Err(CliError::validation(format!(
                "unknown exposure {s:?}; expected clustered, spatial:R[:CONTROL] or khop:K"
            ))),
        }
    }
}

impl ExposureSpec {
    pub fn build(&self, units: &Units, edges: Option<&Path>) -> CliResult<ExposureMap> {
        Ok(match self {
            ExposureSpec::Clustered => ExposureMap::clustered(units.cluster_structure()?),
            ExposureSpec::Spatial { radius, control_radius } => {
                ExposureMap::spatial(units.spatial_network()?, *radius, *control_radius)?
            }
            ExposureSpec::KHop { k } => {
                let path = edges.ok_or_else(|| CliError::validation("khop exposure needs --edges"))?;
                let net = HopNetwork::from_edges(units.len(), &read_edges(path, units)?)?;
                ExposureMap::k_hop(&net, *k)
            }
        })
    }
}
