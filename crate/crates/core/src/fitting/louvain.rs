//! Louvain modularity maximization (resolution 1).
//!
//! Each level runs local moving until no node move improves modularity by
//! more than [`MIN_GAIN`], then collapses communities into super-nodes and
//! repeats on the aggregated graph. The node visiting order of every level is
//! a seeded shuffle.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::CommunityAssignment;

const MIN_GAIN: f64 = 1e-10;

/// Weighted graph used at every level. `loops[i]` is the total weight of
/// edges collapsed inside super-node `i` (counted once).
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        Level {
            adj: (0..g.node_count())
                .map(|v| g.neighbors(v).iter().map(|&u| (u as usize, 1.0)).collect())
                .collect(),
            loops: vec![0.0; g.node_count()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn strength(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.loops[v]
    }
}

/// Newman–Girvan modularity of a labelling of `g`.
pub fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = labels.iter().max().map_or(0, |&x| x + 1);
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for v in 0..g.node_count() {
        tot[labels[v]] += g.degree(v) as f64;
    }
    for (u, v) in g.edges() {
        if labels[u] == labels[v] {
            inside[labels[u]] += 1.0;
        }
    }
    (0..k).map(|c| inside[c] / m - (tot[c] / (2.0 * m)).powi(2)).sum()
}

/// Runs Louvain and returns the final partition.
pub fn louvain<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<CommunityAssignment> {
    if g.edge_count() == 0 {
        return Err(Error::degenerate("Louvain needs at least one edge"));
    }
    let two_m = 2.0 * g.edge_count() as f64;
    // membership of each original node in the current level's super-nodes
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    let mut level = Level::from_graph(g);

    loop {
        let (community, moved) = local_moving(&level, two_m, rng);
        if !moved {
            break;
        }
        let (compact, count) = compact_labels(&community);
        for m in membership.iter_mut() {
            *m = compact[*m];
        }
        if count == level.len() {
            break;
        }
        level = aggregate(&level, &compact, count);
    }
    Ok(CommunityAssignment::from_labels(&membership))
}

/// Number of communities Louvain settles on.
pub fn louvain_k<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<usize> {
    Ok(louvain(g, rng)?.k())
}

fn local_moving<R: Rng + ?Sized>(level: &Level, two_m: f64, rng: &mut R) -> (Vec<usize>, bool) {
    let n = level.len();
    let mut community: Vec<usize> = (0..n).collect();
    let strength: Vec<f64> = (0..n).map(|v| level.strength(v)).collect();
    let mut tot = strength.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut link = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;

    loop {
        let mut moved = false;
        for &v in &order {
            let own = community[v];
            let kv = strength[v];
            for &(u, w) in &level.adj[v] {
                let c = community[u];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            tot[own] -= kv;
            // gain of joining c relative to staying isolated, up to the
            // common factor 1/m: k_{v,c} - tot_c * k_v / 2m
            let gain = |c: usize, link_c: f64| link_c - tot[c] * kv / two_m;
            let mut best = own;
            let mut best_gain = gain(own, link[own]);
            for &c in &touched {
                let g = gain(c, link[c]);
                if g > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += kv;
            if best != own {
                community[v] = best;
                moved = true;
                any_move = true;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            link[own] = 0.0;
            touched.clear();
        }
        if !moved {
            break;
        }
    }
    (community, any_move)
}

fn compact_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        if map[l] == usize::MAX {
            map[l] = next;
            next += 1;
        }
        out.push(map[l]);
    }
    (out, next)
}

fn aggregate(level: &Level, community: &[usize], count: usize) -> Level {
    let mut loops = vec![0.0; count];
    let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
    for v in 0..level.len() {
        let cv = community[v];
        loops[cv] += level.loops[v];
        for &(u, w) in &level.adj[v] {
            let cu = community[u];
            if cu == cv {
                // each internal edge is seen from both ends
                loops[cv] += w / 2.0;
            } else {
                *weights[cv].entry(cu).or_insert(0.0) += w;
            }
        }
    }
    Level {
        adj: weights.into_iter().map(|m| m.into_iter().collect()).collect(),
        loops,
    }
}
