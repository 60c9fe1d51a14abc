//! CSV emission for curves and surfaces.

use std::io::Write;

use biclique_core::{Error, Result};
use serde::Serialize;

use crate::design_grid::GridCell;
use crate::power::PowerEstimate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub x: f64,
    pub power: f64,
    pub se: f64,
    pub untestable_frac: f64,
}

impl CurveRow {
    pub fn new(x: f64, e: &PowerEstimate) -> Self {
        CurveRow { x, power: e.power, se: e.se, untestable_frac: e.untestable_frac() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub p0: f64,
    pub p1: f64,
    pub power: f64,
    pub se: f64,
    pub mean_focals: f64,
}

impl From<&GridCell> for SurfaceRow {
    fn from(c: &GridCell) -> Self {
        SurfaceRow { p0: c.p0, p1: c.p1, power: c.estimate.power, se: c.estimate.se, mean_focals: c.mean_focals }
    }
}

fn write_rows<W: Write, R: Serialize>(out: W, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Header `x,power,se,untestable_frac`.
pub fn write_curve<W: Write>(out: W, rows: &[CurveRow]) -> Result<()> {
    write_rows(out, rows)
}

/// Header `p0,p1,power,se,mean_focals`.
pub fn write_surface<W: Write>(out: W, cells: &[GridCell]) -> Result<()> {
    write_rows(out, cells.iter().map(SurfaceRow::from))
}
