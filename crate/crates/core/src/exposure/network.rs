use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Partition of units into clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterStructure {
    cluster_of: Vec<usize>,
    clusters: Vec<Vec<usize>>,
}

impl ClusterStructure {
    /// From a per-unit cluster id. Ids may be sparse; they are renumbered in
    /// ascending order.
    pub fn new(cluster_ids: &[usize]) -> Result<Self> {
        if cluster_ids.is_empty() {
            return Err(Error::InvalidExposure("cluster structure has no units".into()));
        }
        let mut dense = BTreeMap::new();
        for &c in cluster_ids {
            let next = dense.len();
            dense.entry(c).or_insert(next);
        }
        // BTreeMap iteration is sorted; renumber by sorted id.
        let remap: BTreeMap<usize, usize> = dense.keys().enumerate().map(|(k, &c)| (c, k)).collect();
        let cluster_of: Vec<usize> = cluster_ids.iter().map(|c| remap[c]).collect();
        let mut clusters = vec![Vec::new(); remap.len()];
        for (i, &k) in cluster_of.iter().enumerate() {
            clusters[k].push(i);
        }
        Ok(ClusterStructure { cluster_of, clusters })
    }

    /// `n_units` split into `n_clusters` contiguous clusters of size
    /// `n_units / n_clusters`; the remainder goes one extra unit each to the
    /// leading clusters.
    pub fn equal(n_units: usize, n_clusters: usize) -> Result<Self> {
        if n_clusters == 0 || n_clusters > n_units {
            return Err(Error::InvalidParameter(format!(
                "cannot split {n_units} units into {n_clusters} non-empty clusters"
            )));
        }
        let base = n_units / n_clusters;
        let extra = n_units % n_clusters;
        let mut ids = Vec::with_capacity(n_units);
        for k in 0..n_clusters {
            let size = base + usize::from(k < extra);
            ids.extend(std::iter::repeat_n(k, size));
        }
        Self::new(&ids)
    }

    pub fn n_units(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, unit: usize) -> usize {
        self.cluster_of[unit]
    }

    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.clusters[cluster]
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }
}

/// Units embedded in the plane, coordinates in meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialNetwork {
    coords: Vec<[f64; 2]>,
}

impl SpatialNetwork {
    pub fn new(coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidExposure("non-finite coordinate".into()));
        }
        Ok(SpatialNetwork { coords })
    }

    pub fn n_units(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// For every unit, the other units within `radius` (inclusive) with their
    /// distances, sorted by unit id.
    pub fn neighbors_within(&self, radius: f64) -> Vec<Vec<(u32, f64)>> {
        let n = self.coords.len();
        // Bucket into a square grid of side `radius` so only adjacent cells are scanned.
        let cell = if radius > 0.0 { radius } else { 1.0 };
        let key = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
        for (i, &p) in self.coords.iter().enumerate() {
            grid.entry(key(p)).or_default().push(i);
        }
        let mut out = vec![Vec::new(); n];
        for (i, &p) in self.coords.iter().enumerate() {
            let (cx, cy) = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                        for &j in bucket {
                            if j == i {
                                continue;
                            }
                            let d = self.distance(i, j);
                            if d <= radius {
                                out[i].push((j as u32, d));
                            }
                        }
                    }
                }
            }
            out[i].sort_by_key(|&(j, _)| j);
        }
        out
    }
}

/// Undirected graph over units for hop-distance interference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopNetwork {
    adjacency: Vec<Vec<usize>>,
}

impl HopNetwork {
    pub fn from_edges(n_units: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n_units];
        for &(a, b) in edges {
            if a >= n_units || b >= n_units {
                return Err(Error::UnitOutOfRange { index: a.max(b), n_units });
            }
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        Ok(HopNetwork { adjacency })
    }

    /// Cycle 0 - 1 - ... - (n-1) - 0.
    pub fn ring(n_units: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n_units).map(|i| (i, (i + 1) % n_units)).collect();
        Self::from_edges(n_units, &edges)
    }

    pub fn n_units(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Hop distances from `source`; `None` for unreachable units.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adjacency.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Units within `k` hops of `source`, including `source`, ascending.
    pub fn within_hops(&self, source: usize, k: usize) -> Vec<usize> {
        self.distances_from(source)
            .iter()
            .enumerate()
            .filter_map(|(j, d)| d.filter(|&d| d <= k).map(|_| j))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_clusters_spread_remainder() {
        let c = ClusterStructure::equal(10, 3).unwrap();
        let sizes: Vec<_> = c.clusters().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(c.cluster_of(4), 1);
    }

    #[test]
    fn sparse_cluster_ids_renumbered() {
        let c = ClusterStructure::new(&[7, 3, 7, 3]).unwrap();
        assert_eq!(c.members(0), &[1, 3]);
        assert_eq!(c.members(1), &[0, 2]);
    }

    #[test]
    fn grid_neighbors_match_brute_force() {
        let pts: Vec<[f64; 2]> = (0..60).map(|i| [((i * 37) % 101) as f64 * 7.0, ((i * 53) % 89) as f64 * 9.0]).collect();
        let net = SpatialNetwork::new(pts).unwrap();
        let near = net.neighbors_within(120.0);
        for i in 0..net.n_units() {
            let brute: Vec<u32> = (0..net.n_units())
                .filter(|&j| j != i && net.distance(i, j) <= 120.0)
                .map(|j| j as u32)
                .collect();
            assert_eq!(near[i].iter().map(|&(j, _)| j).collect::<Vec<_>>(), brute);
        }
    }

    #[test]
    fn hop_distances() {
        let net = HopNetwork::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(net.distances_from(0), vec![Some(0), Some(1), Some(2), None]);
        assert_eq!(net.within_hops(3, 5), vec![3]);
    }
}
