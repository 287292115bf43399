//! Exact network statistics used by the small-world tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{largest_component, Graph};

/// Exact triad census.
///
/// `connected` counts paths of length two (a center node with two distinct
/// neighbors), so every triangle contributes three and every open triple one:
/// `connected = 3 * triangles + open`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadCounts {
    pub triangles: u64,
    pub open: u64,
    pub connected: u64,
    pub edges: u64,
}

/// Counts triangles by intersecting forward neighbor lists: each edge is
/// oriented from lower to higher (degree, id) rank, and every triangle is found
/// exactly once at its lowest-ranked vertex.
pub fn triad_census(g: &Graph) -> TriadCounts {
    let n = g.node_count();
    let rank_less = |a: usize, b: usize| (g.degree(a), a) < (g.degree(b), b);

    let forward: Vec<Vec<u32>> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank_less(u, v as usize))
                .collect()
        })
        .collect();

    let mut triangles = 0u64;
    for u in 0..n {
        let fu = &forward[u];
        for &v in fu {
            triangles += sorted_intersection_len(fu, &forward[v as usize]);
        }
    }

    let connected: u64 = (0..n)
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();

    TriadCounts {
        triangles,
        open: connected - 3 * triangles,
        connected,
        edges: g.edge_count() as u64,
    }
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Global clustering coefficient (transitivity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub value: f64,
    /// Set when the graph has no connected triples; `value` is then 0.
    pub degenerate: bool,
}

pub fn clustering_coefficient(tc: &TriadCounts) -> Clustering {
    if tc.connected == 0 {
        Clustering {
            value: 0.0,
            degenerate: true,
        }
    } else {
        Clustering {
            value: 3.0 * tc.triangles as f64 / tc.connected as f64,
            degenerate: false,
        }
    }
}

/// Average shortest-path length over the largest connected component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLength {
    /// Sum of `d(u, v)` over unordered pairs in the largest component.
    pub distance_sum: u64,
    /// Number of unordered pairs in the largest component.
    pub pair_count: u64,
    pub lcc_size: usize,
    pub lcc_fraction: f64,
}

impl PathLength {
    /// `None` when the largest component has a single node.
    pub fn mean(&self) -> Option<f64> {
        (self.pair_count > 0).then(|| self.distance_sum as f64 / self.pair_count as f64)
    }
}

/// Average path length on the largest component.
///
/// All-pairs distances come from a bit-parallel multi-source BFS that pushes
/// 64 sources through the graph at once, one bit per source.
pub fn average_path_length(g: &Graph) -> PathLength {
    let n = g.node_count();
    if n == 0 {
        return PathLength {
            distance_sum: 0,
            pair_count: 0,
            lcc_size: 0,
            lcc_fraction: 0.0,
        };
    }
    let (lcc, _) = largest_component(g);
    let size = lcc.node_count();
    let ordered_sum = all_pairs_distance_sum(&lcc);
    PathLength {
        distance_sum: ordered_sum / 2,
        pair_count: (size as u64) * (size as u64 - 1) / 2,
        lcc_size: size,
        lcc_fraction: size as f64 / n as f64,
    }
}

/// Sum of distances over ordered reachable pairs.
fn all_pairs_distance_sum(g: &Graph) -> u64 {
    let n = g.node_count();
    let mut seen = vec![0u64; n];
    let mut frontier = vec![0u64; n];
    let mut next = vec![0u64; n];
    let mut total = 0u64;

    for start in (0..n).step_by(64) {
        let end = (start + 64).min(n);
        seen.iter_mut().for_each(|w| *w = 0);
        frontier.iter_mut().for_each(|w| *w = 0);
        for s in start..end {
            let bit = 1u64 << (s - start);
            seen[s] = bit;
            frontier[s] = bit;
        }
        let mut level = 0u64;
        loop {
            level += 1;
            let mut reached = 0u64;
            for v in 0..n {
                let mut acc = 0u64;
                for &u in g.neighbors(v) {
                    acc |= frontier[u as usize];
                }
                acc &= !seen[v];
                next[v] = acc;
                reached += acc.count_ones() as u64;
            }
            if reached == 0 {
                break;
            }
            total += level * reached;
            for v in 0..n {
                seen[v] |= next[v];
            }
            std::mem::swap(&mut frontier, &mut next);
        }
    }
    total
}

/// Edge density `2m / (n (n - 1))`.
pub fn density(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::invalid(format!("density needs at least 2 nodes, got {n}")));
    }
    Ok(2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Classical small-world coefficient `(C / C_R) / (L / L_R)`.
pub fn small_world_coefficient(c_obs: f64, l_obs: f64, c_ref: f64, l_ref: f64) -> Result<f64> {
    if !(c_ref > 0.0 && l_ref > 0.0 && l_obs > 0.0) {
        return Err(Error::invalid(format!(
            "small-world coefficient needs positive references and path length (C_R={c_ref}, L_R={l_ref}, L={l_obs})"
        )));
    }
    Ok((c_obs / c_ref) / (l_obs / l_ref))
}

/// Clustering, path length and density of one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwStats {
    pub clustering: f64,
    pub clustering_degenerate: bool,
    /// `None` when the largest component is a single node.
    pub path_length: Option<f64>,
    pub density: f64,
    pub lcc_fraction: f64,
    pub triads: TriadCounts,
}

pub fn sw_stats(g: &Graph) -> Result<SwStats> {
    let triads = triad_census(g);
    let c = clustering_coefficient(&triads);
    let pl = average_path_length(g);
    Ok(SwStats {
        clustering: c.value,
        clustering_degenerate: c.degenerate,
        path_length: pl.mean(),
        density: density(g)?,
        lcc_fraction: pl.lcc_fraction,
        triads,
    })
}
