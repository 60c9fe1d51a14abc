//! Summaries of decompositions and surfaces.

use biclique_core::engine::Decomposition;
use biclique_core::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, OrderStatistics, RankTieBreaker, Statistics};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionStats {
    pub n_bicliques: usize,
    pub mean_units: f64,
    pub mean_assignments: f64,
    /// Focal units of the biclique holding a uniformly drawn covered
    /// assignment, on average.
    pub assignment_weighted_units: f64,
    pub total_assignments: usize,
    pub max_units: usize,
    pub max_assignments: usize,
    pub relaxed_from: Option<usize>,
}

impl DecompositionStats {
    /// Focal units per cluster seen from a random covered assignment.
    pub fn focal_units_per_cluster(&self, n_clusters: usize) -> f64 {
        self.assignment_weighted_units / n_clusters as f64
    }
}

pub fn decomposition_stats(decomp: &Decomposition) -> Result<DecompositionStats> {
    let bs = decomp.bicliques();
    if bs.is_empty() {
        return Err(Error::InvalidParameter("decomposition is empty".into()));
    }
    let k = bs.len() as f64;
    let total: usize = bs.iter().map(|b| b.n_assignments()).sum();
    Ok(DecompositionStats {
        n_bicliques: bs.len(),
        mean_units: bs.iter().map(|b| b.n_units() as f64).sum::<f64>() / k,
        mean_assignments: total as f64 / k,
        assignment_weighted_units: bs.iter().map(|b| (b.n_units() * b.n_assignments()) as f64).sum::<f64>()
            / total as f64,
        total_assignments: total,
        max_units: bs.iter().map(|b| b.n_units()).max().unwrap_or(0),
        max_assignments: bs.iter().map(|b| b.n_assignments()).max().unwrap_or(0),
        relaxed_from: decomp.relaxed_from(),
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("need two equally long samples of at least two values".into()));
    }
    let rx = Data::new(x.to_vec()).ranks(RankTieBreaker::Average);
    let ry = Data::new(y.to_vec()).ranks(RankTieBreaker::Average);
    let cov = rx.iter().covariance(ry.iter());
    let s = rx.iter().std_dev() * ry.iter().std_dev();
    if s == 0.0 {
        return Err(Error::InvalidParameter("a sample is constant".into()));
    }
    Ok(cov / s)
}

#[cfg(test)]
mod tests {
    use biclique_core::engine::{decompose_greedy, DecomposeConfig};
    use biclique_core::exposure::{Assignment, ClusterStructure, ExposureMap, Label};
    use biclique_core::graph::NullExposureGraph;

    use super::*;

    #[test]
    fn figure1_averages() {
        let z: Vec<Assignment> = (0..4).map(|i| Assignment::from_treated(4, &[i]).unwrap()).collect();
        let map = ExposureMap::clustered(ClusterStructure::new(&[0, 0, 1, 1]).unwrap());
        let g = NullExposureGraph::build(z, &map, &[Label::Level(0), Label::Level(1)]).unwrap();
        let d = decompose_greedy(&g, &DecomposeConfig::default()).unwrap();
        let s = decomposition_stats(&d).unwrap();
        assert_eq!((s.n_bicliques, s.mean_units, s.mean_assignments), (2, 2.0, 2.0));
        assert_eq!(s.total_assignments, 4);
        assert_eq!(s.focal_units_per_cluster(2), 1.0);
    }

    #[test]
    fn single_biclique() {
        let g = NullExposureGraph::from_adjacency(3, &[vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        let d = decompose_greedy(&g, &DecomposeConfig::default()).unwrap();
        let s = decomposition_stats(&d).unwrap();
        assert_eq!((s.n_bicliques, s.max_units, s.max_assignments), (1, 3, 2));
        assert_eq!(s.assignment_weighted_units, 3.0);
    }

    #[test]
    fn rank_correlation() {
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 25.0, 100.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        let r = spearman(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(r > 0.9 && r < 1.0);
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }
}
