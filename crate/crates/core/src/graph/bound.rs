use serde::Serialize;

use crate::error::{Error, Result};

/// Edge-count threshold above which a graph must contain an `n`×`h` biclique.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExistenceBound {
    pub edges: f64,
    pub density: f64,
}

impl ExistenceBound {
    /// Whether a graph with `n_edges` edges is certain to hold the biclique.
    /// The guarantee needs the edge count to exceed the bound; at equality
    /// there are counterexamples.
    pub fn guarantees(&self, n_edges: usize) -> bool {
        n_edges as f64 > self.edges
    }
}

/// `(n-1) H + (h-1)^(1/n) H^(1-1/n) (N-n+1)` for `N` units and `H` assignments.
pub fn biclique_existence_bound(n_units: usize, n_assignments: usize, n: usize, h: usize) -> Result<ExistenceBound> {
    if n == 0 || n >= n_units {
        return Err(Error::InvalidParameter(format!("need 0 < n < N, got n={n}, N={n_units}")));
    }
    if h == 0 || h >= n_assignments {
        return Err(Error::InvalidParameter(format!("need 0 < h < H, got h={h}, H={n_assignments}")));
    }
    let (nf, big_n, big_h) = (n as f64, n_units as f64, n_assignments as f64);
    let tail = if h == 1 {
        0.0
    } else {
        ((h - 1) as f64).ln() / nf + big_h.ln() * (1.0 - 1.0 / nf)
    };
    let second = if h == 1 { 0.0 } else { tail.exp() * (big_n - nf + 1.0) };
    let edges = (nf - 1.0) * big_h + second;
    Ok(ExistenceBound { edges, density: edges / (big_n * big_h) })
}
