//! Null-model fitting from an observed graph.
//!
//! ER and Chung–Lu are fitted from density and degrees. The block models
//! first pick `k` with Louvain, assign communities by adjacency spectral
//! clustering, and then match block edge counts (and, for the DCSBM, node
//! degrees) by the method of moments.

mod kmeans;
mod louvain;
mod spectral;

pub use kmeans::{kmeans, KMeans};
pub use louvain::{louvain, louvain_k, modularity};
pub use spectral::{
    spectral_clustering, spectral_clustering_with, spectral_embedding, EigenMethod, SpectralEmbedding,
    DENSE_LIMIT, RESIDUAL_TOL,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::{BlockMatrix, NullFamily, NullModel};
use crate::netstats::density;

/// A partition of the nodes into `k` non-empty communities labelled `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    k: usize,
    labels: Vec<usize>,
}

impl CommunityAssignment {
    /// Relabels arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        CommunityAssignment { k: map.len(), labels }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Adjusted Rand index between two labellings of the same nodes.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labellings differ in length");
    let a = CommunityAssignment::from_labels(a);
    let b = CommunityAssignment::from_labels(b);
    let mut table = vec![vec![0u64; b.k()]; a.k()];
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        table[x][y] += 1;
    }
    let c2 = |x: u64| (x * x.saturating_sub(1) / 2) as f64;
    let index: f64 = table.iter().flatten().map(|&x| c2(x)).sum();
    let rows: f64 = a.sizes().iter().map(|&x| c2(x as u64)).sum();
    let cols: f64 = b.sizes().iter().map(|&x| c2(x as u64)).sum();
    let total = c2(a.labels().len() as u64);
    let expected = rows * cols / total;
    let max = (rows + cols) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// ER fit: `p` is the observed density.
pub fn fit_er(g: &Graph) -> Result<NullModel> {
    NullModel::er(g.node_count(), density(g)?)
}

/// Chung–Lu fit: weights `d_i / sqrt(2m)`, so `p_ij = min(1, d_i d_j / 2m)`.
pub fn fit_cl(g: &Graph) -> Result<NullModel> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::degenerate("Chung-Lu fit needs at least one edge"));
    }
    let root = (2.0 * m as f64).sqrt();
    NullModel::chung_lu(g.degrees().into_iter().map(|d| d as f64 / root).collect())
}

fn check_assignment(g: &Graph, z: &CommunityAssignment) -> Result<()> {
    if z.labels().len() != g.node_count() {
        return Err(Error::invalid("community assignment does not cover the graph"));
    }
    Ok(())
}

/// Edge counts between blocks; the diagonal counts edges inside a block.
fn block_edge_counts(g: &Graph, z: &CommunityAssignment) -> Vec<Vec<u64>> {
    let k = z.k();
    let mut counts = vec![vec![0u64; k]; k];
    for (u, v) in g.edges() {
        let (a, b) = (z.labels()[u], z.labels()[v]);
        counts[a][b] += 1;
        if a != b {
            counts[b][a] += 1;
        }
    }
    counts
}

/// SBM fit: `P[q][l]` is the observed edge fraction among the pairs between
/// blocks `q` and `l`. A singleton block has no internal pairs; its diagonal
/// is 0 and [`degenerate_blocks`] reports it.
pub fn fit_sbm(g: &Graph, z: &CommunityAssignment) -> Result<NullModel> {
    check_assignment(g, z)?;
    let k = z.k();
    let sizes = z.sizes();
    let counts = block_edge_counts(g, z);
    let mut probs = BlockMatrix::filled(k, 0.0);
    for q in 0..k {
        for l in q..k {
            let pairs = if q == l {
                (sizes[q] * sizes[q].saturating_sub(1) / 2) as f64
            } else {
                (sizes[q] * sizes[l]) as f64
            };
            let p = if pairs > 0.0 { counts[q][l] as f64 / pairs } else { 0.0 };
            probs.set(q, l, p);
        }
    }
    NullModel::sbm(z.labels().to_vec(), probs)
}

/// Blocks with a single member (their internal rate is undefined).
pub fn degenerate_blocks(z: &CommunityAssignment) -> Vec<usize> {
    z.sizes()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 2)
        .map(|(q, _)| q)
        .collect()
}

/// DCSBM fit.
///
/// `θ_i = d_i / D_q` where `D_q` is the degree total of the node's block, so
/// θ sums to one in every block. Between blocks `Ω[q][l] = m_ql`; inside a
/// block `Ω[q][q] = m_qq / Σ_{i<j ∈ q} θ_i θ_j`. Without capping, the
/// expected edge count between every pair of blocks equals the observed one.
#[allow(clippy::needless_range_loop)]
pub fn fit_dcsbm(g: &Graph, z: &CommunityAssignment) -> Result<NullModel> {
    check_assignment(g, z)?;
    let k = z.k();
    let degrees = g.degrees();
    let mut block_degree = vec![0.0; k];
    for (v, &d) in degrees.iter().enumerate() {
        block_degree[z.labels()[v]] += d as f64;
    }
    if let Some(q) = block_degree.iter().position(|&d| d == 0.0) {
        return Err(Error::degenerate(format!("block {q} has zero total degree")));
    }
    let theta: Vec<f64> = degrees
        .iter()
        .enumerate()
        .map(|(v, &d)| d as f64 / block_degree[z.labels()[v]])
        .collect();
    let mut sum_sq = vec![0.0; k];
    for (v, &t) in theta.iter().enumerate() {
        sum_sq[z.labels()[v]] += t * t;
    }
    let counts = block_edge_counts(g, z);
    let mut omega = BlockMatrix::filled(k, 0.0);
    for q in 0..k {
        let inner_pairs = (1.0 - sum_sq[q]) / 2.0;
        let diag = if inner_pairs > 0.0 { counts[q][q] as f64 / inner_pairs } else { 0.0 };
        omega.set(q, q, diag);
        for l in q + 1..k {
            omega.set(q, l, counts[q][l] as f64);
        }
    }
    NullModel::dcsbm(z.labels().to_vec(), theta, omega, 1.0)
}

/// A fitted null with the diagnostics that go into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedNull {
    pub model: NullModel,
    pub communities: Option<CommunityAssignment>,
    pub capped_pairs: u64,
    pub degenerate_blocks: Vec<usize>,
}

/// Fits `family` to `g`. Block families draw Louvain and k-means randomness
/// from `rng`.
pub fn fit_null<R: Rng + ?Sized>(g: &Graph, family: NullFamily, rng: &mut R) -> Result<FittedNull> {
    if g.edge_count() == 0 {
        return Err(Error::degenerate(format!("cannot fit the {family} null to a graph without edges")));
    }
    let (model, communities) = match family {
        NullFamily::Er => (fit_er(g)?, None),
        NullFamily::Cl => (fit_cl(g)?, None),
        NullFamily::Sbm | NullFamily::Dcsbm => {
            let k = louvain_k(g, rng)?;
            let z = spectral_clustering(g, k, rng)?;
            let model = if family == NullFamily::Sbm { fit_sbm(g, &z)? } else { fit_dcsbm(g, &z)? };
            (model, Some(z))
        }
    };
    let degenerate = match (&communities, family) {
        (Some(z), NullFamily::Sbm) => degenerate_blocks(z),
        _ => Vec::new(),
    };
    Ok(FittedNull {
        capped_pairs: model.capped_pairs(),
        model,
        communities,
        degenerate_blocks: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::generate_ring_lattice;
    use crate::rng::substream;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    fn two_k3() -> (Graph, CommunityAssignment) {
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        (g, CommunityAssignment::from_labels(&[0, 0, 0, 1, 1, 1]))
    }

    #[test]
    fn er_fit_examples() {
        assert_eq!(fit_er(&complete(4)).unwrap(), NullModel::Er { n: 4, p: 1.0 });
        assert_eq!(fit_er(&Graph::empty(10)).unwrap(), NullModel::Er { n: 10, p: 0.0 });
        let c5 = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(fit_er(&c5).unwrap(), NullModel::Er { n: 5, p: 0.5 });
        assert!(fit_er(&Graph::empty(1)).is_err());
    }

    #[test]
    fn cl_fit_examples() {
        let m = fit_cl(&complete(4)).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((m.pair_probability(i, j) - 0.75).abs() < 1e-12);
            }
        }
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let m = fit_cl(&star).unwrap();
        assert!((m.pair_probability(0, 1) - 0.5).abs() < 1e-12);
        assert!((m.pair_probability(1, 2) - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(m.capped_pairs(), 0);
        assert!(fit_cl(&Graph::empty(3)).is_err());
    }

    #[test]
    fn cl_fit_caps_hub_pairs() {
        // two hubs joined to each other and to 4 leaves each: d = 5, m = 9
        let mut edges = vec![(0, 1)];
        for leaf in 2..6 {
            edges.push((0, leaf));
        }
        for leaf in 6..10 {
            edges.push((1, leaf));
        }
        let g = Graph::from_edges(10, edges).unwrap();
        let m = fit_cl(&g).unwrap();
        assert_eq!(m.capped_pairs(), 1);
        assert_eq!(m.pair_probability(0, 1), 1.0);
        assert!((m.raw_pair_probability(0, 1) - 25.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn sbm_fit_examples() {
        let (g, z) = two_k3();
        let m = fit_sbm(&g, &z).unwrap();
        match &m {
            NullModel::Sbm { probs, .. } => assert_eq!(probs.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            _ => unreachable!(),
        }
        // single block reduces to ER
        let g = generate_ring_lattice(12, 2).unwrap();
        let one = CommunityAssignment::from_labels(&[0; 12]);
        let m = fit_sbm(&g, &one).unwrap();
        let p = density(&g).unwrap();
        assert!((m.pair_probability(0, 7) - p).abs() < 1e-15);
    }

    #[test]
    fn sbm_singleton_block_is_degenerate() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let z = CommunityAssignment::from_labels(&[0, 0, 0, 1]);
        let m = fit_sbm(&g, &z).unwrap();
        assert_eq!(degenerate_blocks(&z), vec![1]);
        match &m {
            NullModel::Sbm { probs, .. } => {
                assert_eq!(probs.get(1, 1), 0.0);
                assert!((probs.get(0, 1) - 1.0 / 3.0).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn dcsbm_fit_examples() {
        let (g, z) = two_k3();
        let m = fit_dcsbm(&g, &z).unwrap();
        assert!((m.expected_edge_count() - 6.0).abs() < 1e-12);
        assert_eq!(m.capped_pairs(), 0);

        // regular graph in one block: all pair rates equal the SBM fit
        let g = generate_ring_lattice(15, 3).unwrap();
        let one = CommunityAssignment::from_labels(&[0; 15]);
        let dc = fit_dcsbm(&g, &one).unwrap();
        let sbm = fit_sbm(&g, &one).unwrap();
        for i in 0..15 {
            for j in i + 1..15 {
                assert!((dc.pair_probability(i, j) - sbm.pair_probability(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dcsbm_zero_degree_block_fails() {
        let g = Graph::from_edges(4, [(0, 1)]).unwrap();
        let z = CommunityAssignment::from_labels(&[0, 0, 1, 1]);
        assert!(matches!(fit_dcsbm(&g, &z), Err(Error::Degenerate(_))));
    }

    #[test]
    fn fit_null_rejects_empty_graph() {
        for family in NullFamily::ALL {
            assert!(fit_null(&Graph::empty(5), family, &mut substream(0, &[])).is_err());
        }
    }

    #[test]
    fn ari_basics() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[5, 5, 2, 2]), 1.0);
        assert!(adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]) < 0.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0], &[1, 1, 1]), 1.0);
    }

    #[test]
    fn assignment_relabels_by_first_appearance() {
        let z = CommunityAssignment::from_labels(&[7, 3, 7, 9]);
        assert_eq!(z.labels(), &[0, 1, 0, 2]);
        assert_eq!(z.k(), 3);
        assert_eq!(z.sizes(), vec![2, 1, 1]);
    }
}
