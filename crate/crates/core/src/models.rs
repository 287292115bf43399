//! Random graph generators: the four null families, ring lattices, and the
//! Newman–Watts style superposition of a lattice with a null-model graph.
//!
//! All generators walk node pairs in a fixed order and draw from the supplied
//! generator only, so a `(model, seed)` pair always yields the same graph.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Absolute slack used when rounding `δβ` up, so that products such as
/// `40 * 0.15000000000000002` still give 6 hops.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullFamily {
    Er,
    Cl,
    Sbm,
    Dcsbm,
}

impl NullFamily {
    pub const ALL: [NullFamily; 4] = [NullFamily::Er, NullFamily::Cl, NullFamily::Sbm, NullFamily::Dcsbm];

    pub fn as_str(self) -> &'static str {
        match self {
            NullFamily::Er => "er",
            NullFamily::Cl => "cl",
            NullFamily::Sbm => "sbm",
            NullFamily::Dcsbm => "dcsbm",
        }
    }
}

impl fmt::Display for NullFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NullFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(NullFamily::Er),
            "cl" | "chunglu" | "chung-lu" => Ok(NullFamily::Cl),
            "sbm" => Ok(NullFamily::Sbm),
            "dcsbm" => Ok(NullFamily::Dcsbm),
            other => Err(Error::invalid(format!("unknown null family `{other}`"))),
        }
    }
}

/// Symmetric `k × k` matrix indexed by block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix {
    k: usize,
    values: Vec<f64>,
}

impl BlockMatrix {
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("block matrix must be square and non-empty"));
        }
        for q in 0..k {
            for l in 0..q {
                if rows[q][l] != rows[l][q] {
                    return Err(Error::invalid(format!("block matrix not symmetric at ({q},{l})")));
                }
            }
        }
        Ok(BlockMatrix {
            k,
            values: rows.iter().flatten().copied().collect(),
        })
    }

    pub(crate) fn filled(k: usize, value: f64) -> Self {
        BlockMatrix {
            k,
            values: vec![value; k * k],
        }
    }

    pub(crate) fn set(&mut self, q: usize, l: usize, value: f64) {
        self.values[q * self.k + l] = value;
        self.values[l * self.k + q] = value;
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, q: usize, l: usize) -> f64 {
        self.values[q * self.k + l]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.k).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        BlockMatrix {
            k: self.k,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// A parameterized null model. Every pair `i < j` is an independent
/// Bernoulli trial with probability `min(1, raw_ij)`:
///
/// * ER: `raw = p`
/// * Chung–Lu: `raw = w_i w_j`
/// * SBM: `raw = P[z_i][z_j]`
/// * DCSBM: `raw = scale θ_i θ_j Ω[z_i][z_j]`, with θ summing to one in each
///   block.
///
/// Block labels are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NullModel {
    Er {
        n: usize,
        p: f64,
    },
    Cl {
        weights: Vec<f64>,
    },
    Sbm {
        labels: Vec<usize>,
        probs: BlockMatrix,
    },
    Dcsbm {
        labels: Vec<usize>,
        theta: Vec<f64>,
        block: BlockMatrix,
        scale: f64,
    },
}

impl NullModel {
    pub fn er(n: usize, p: f64) -> Result<Self> {
        let m = NullModel::Er { n, p };
        m.validate()?;
        Ok(m)
    }

    pub fn chung_lu(weights: Vec<f64>) -> Result<Self> {
        let m = NullModel::Cl { weights };
        m.validate()?;
        Ok(m)
    }

    pub fn sbm(labels: Vec<usize>, probs: BlockMatrix) -> Result<Self> {
        let m = NullModel::Sbm { labels, probs };
        m.validate()?;
        Ok(m)
    }

    pub fn dcsbm(labels: Vec<usize>, theta: Vec<f64>, block: BlockMatrix, scale: f64) -> Result<Self> {
        let m = NullModel::Dcsbm {
            labels,
            theta,
            block,
            scale,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn family(&self) -> NullFamily {
        match self {
            NullModel::Er { .. } => NullFamily::Er,
            NullModel::Cl { .. } => NullFamily::Cl,
            NullModel::Sbm { .. } => NullFamily::Sbm,
            NullModel::Dcsbm { .. } => NullFamily::Dcsbm,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            NullModel::Er { n, .. } => *n,
            NullModel::Cl { weights } => weights.len(),
            NullModel::Sbm { labels, .. } | NullModel::Dcsbm { labels, .. } => labels.len(),
        }
    }

    /// Number of blocks for the block models.
    pub fn block_count(&self) -> Option<usize> {
        match self {
            NullModel::Sbm { probs, .. } => Some(probs.k()),
            NullModel::Dcsbm { block, .. } => Some(block.k()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match self {
            NullModel::Er { p, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::invalid(format!("ER probability {p} outside [0, 1]")));
                }
            }
            NullModel::Cl { weights } => {
                if let Some(w) = weights.iter().find(|&&w| !finite_nonneg(w)) {
                    return Err(Error::invalid(format!("Chung-Lu weight {w} must be finite and >= 0")));
                }
            }
            NullModel::Sbm { labels, probs } => {
                check_labels(labels, probs.k())?;
                if probs.values.iter().any(|&v| !finite_nonneg(v)) {
                    return Err(Error::invalid("SBM probabilities must be finite and >= 0"));
                }
            }
            NullModel::Dcsbm {
                labels,
                theta,
                block,
                scale,
            } => {
                check_labels(labels, block.k())?;
                if theta.len() != labels.len() {
                    return Err(Error::invalid("theta and labels differ in length"));
                }
                if theta.iter().any(|&t| !finite_nonneg(t)) {
                    return Err(Error::invalid("theta must be finite and >= 0"));
                }
                if block.values.iter().any(|&v| !finite_nonneg(v)) || !finite_nonneg(*scale) {
                    return Err(Error::invalid("DCSBM block rates and scale must be finite and >= 0"));
                }
                let mut sums = vec![0.0; block.k()];
                for (&z, &t) in labels.iter().zip(theta) {
                    sums[z] += t;
                }
                if let Some((q, s)) = sums.iter().enumerate().find(|(_, s)| (**s - 1.0).abs() > 1e-9) {
                    return Err(Error::invalid(format!("theta sums to {s} in block {q}, expected 1")));
                }
            }
        }
        Ok(())
    }

    /// Pair rate before capping at one.
    #[inline]
    pub fn raw_pair_probability(&self, i: usize, j: usize) -> f64 {
        match self {
            NullModel::Er { p, .. } => *p,
            NullModel::Cl { weights } => weights[i] * weights[j],
            NullModel::Sbm { labels, probs } => probs.get(labels[i], labels[j]),
            NullModel::Dcsbm {
                labels,
                theta,
                block,
                scale,
            } => scale * theta[i] * theta[j] * block.get(labels[i], labels[j]),
        }
    }

    #[inline]
    pub fn pair_probability(&self, i: usize, j: usize) -> f64 {
        self.raw_pair_probability(i, j).min(1.0)
    }

    fn for_each_pair(&self, mut f: impl FnMut(f64)) {
        let n = self.node_count();
        for i in 0..n {
            for j in i + 1..n {
                f(self.raw_pair_probability(i, j));
            }
        }
    }

    /// Expected number of edges, `Σ_{i<j} min(1, raw_ij)`.
    pub fn expected_edge_count(&self) -> f64 {
        if let NullModel::Er { n, p } = self {
            return pairs(*n) * p;
        }
        let mut total = 0.0;
        self.for_each_pair(|r| total += r.min(1.0));
        total
    }

    /// `Σ_{i<j} raw_ij` (no capping), in closed form per family.
    pub fn raw_expected_edge_count(&self) -> f64 {
        match self {
            NullModel::Er { n, p } => pairs(*n) * p,
            NullModel::Cl { weights } => {
                let s: f64 = weights.iter().sum();
                let s2: f64 = weights.iter().map(|w| w * w).sum();
                (s * s - s2) / 2.0
            }
            NullModel::Sbm { labels, probs } => {
                let sizes = block_sizes(labels, probs.k());
                let mut total = 0.0;
                for q in 0..probs.k() {
                    total += pairs(sizes[q]) * probs.get(q, q);
                    for l in q + 1..probs.k() {
                        total += sizes[q] as f64 * sizes[l] as f64 * probs.get(q, l);
                    }
                }
                total
            }
            NullModel::Dcsbm {
                labels,
                theta,
                block,
                scale,
            } => {
                let k = block.k();
                let mut sum = vec![0.0; k];
                let mut sum_sq = vec![0.0; k];
                for (&z, &t) in labels.iter().zip(theta) {
                    sum[z] += t;
                    sum_sq[z] += t * t;
                }
                let mut total = 0.0;
                for q in 0..k {
                    total += (sum[q] * sum[q] - sum_sq[q]) / 2.0 * block.get(q, q);
                    for l in q + 1..k {
                        total += sum[q] * sum[l] * block.get(q, l);
                    }
                }
                scale * total
            }
        }
    }

    /// Number of pairs whose raw rate exceeds one and is capped.
    pub fn capped_pairs(&self) -> u64 {
        if let NullModel::Er { .. } = self {
            return 0;
        }
        let mut count = 0;
        self.for_each_pair(|r| {
            if r > 1.0 {
                count += 1
            }
        });
        count
    }

    /// Expected degree of every node (with capping).
    pub fn expected_degrees(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut deg = vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                let p = self.pair_probability(i, j);
                deg[i] += p;
                deg[j] += p;
            }
        }
        deg
    }

    /// Same shape with every raw pair rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::invalid(format!("scale factor {factor} must be finite and >= 0")));
        }
        let m = match self {
            NullModel::Er { n, p } => NullModel::Er {
                n: *n,
                p: (p * factor).min(1.0),
            },
            NullModel::Cl { weights } => NullModel::Cl {
                weights: weights.iter().map(|w| w * factor.sqrt()).collect(),
            },
            NullModel::Sbm { labels, probs } => NullModel::Sbm {
                labels: labels.clone(),
                probs: probs.scaled(factor),
            },
            NullModel::Dcsbm {
                labels,
                theta,
                block,
                scale,
            } => NullModel::Dcsbm {
                labels: labels.clone(),
                theta: theta.clone(),
                block: block.clone(),
                scale: scale * factor,
            },
        };
        Ok(m)
    }

    /// Rescales so that the uncapped mean degree equals `mean_degree`.
    /// For ER this is `p = mean_degree / (n - 1)`, clipped to `[0, 1]`.
    pub fn with_mean_degree(&self, mean_degree: f64) -> Result<Self> {
        let n = self.node_count();
        if n < 2 {
            return Err(Error::invalid("null model needs at least 2 nodes"));
        }
        if mean_degree == 0.0 {
            return self.scaled(0.0);
        }
        if let NullModel::Er { n, .. } = self {
            return NullModel::er(*n, (mean_degree / (*n as f64 - 1.0)).clamp(0.0, 1.0));
        }
        let current = self.raw_expected_edge_count();
        if current <= 0.0 {
            return Err(Error::degenerate("null model has zero expected edges and cannot be rescaled"));
        }
        self.scaled(mean_degree * n as f64 / 2.0 / current)
    }
}

fn pairs(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

fn block_sizes(labels: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &z in labels {
        sizes[z] += 1;
    }
    sizes
}

fn check_labels(labels: &[usize], k: usize) -> Result<()> {
    let sizes = labels.iter().try_fold(vec![0usize; k], |mut sizes, &z| {
        if z >= k {
            return Err(Error::invalid(format!("block label {z} out of range for {k} blocks")));
        }
        sizes[z] += 1;
        Ok(sizes)
    })?;
    if let Some(q) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::invalid(format!("block {q} has no members")));
    }
    Ok(())
}

/// Ring lattice: node `i` joined to `i ± 1, …, i ± hops` (mod n).
pub fn generate_ring_lattice(n: usize, hops: usize) -> Result<Graph> {
    if hops == 0 || 2 * hops >= n {
        return Err(Error::invalid(format!("ring lattice needs 1 <= hops < n/2 (n={n}, hops={hops})")));
    }
    Graph::from_edges(n, lattice_edges(n, hops))
}

fn lattice_edges(n: usize, hops: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (1..=hops).map(move |h| (i, (i + h) % n)))
}

/// Erdős–Rényi `G(n, p)`.
///
/// Uses geometric skipping over the pair sequence (pairs ordered by larger
/// endpoint, then smaller), so the cost is proportional to the number of edges.
pub fn generate_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("ER probability {p} outside [0, 1]")));
    }
    Graph::from_edges(n, er_edges(n, p, rng))
}

fn er_edges<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p <= 0.0 || n < 2 {
        return edges;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
        return edges;
    }
    edges.reserve((pairs(n) * p * 1.1) as usize + 16);
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        // 1 - r is in (0, 1], so the log is finite
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + skip as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

/// Samples a graph from a null model.
pub fn generate_null<R: Rng + ?Sized>(model: &NullModel, rng: &mut R) -> Result<Graph> {
    model.validate()?;
    Graph::from_edges(model.node_count(), null_edges(model, rng))
}

fn null_edges<R: Rng + ?Sized>(model: &NullModel, rng: &mut R) -> Vec<(usize, usize)> {
    if let NullModel::Er { n, p } = model {
        return er_edges(*n, *p, rng);
    }
    let n = model.node_count();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = model.raw_pair_probability(i, j);
            if p <= 0.0 {
                continue;
            }
            if p >= 1.0 || rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Parameters of the lattice + null superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NwParams {
    pub n: usize,
    /// Half the expected degree.
    pub delta: f64,
    /// Mixing proportion: 0 is the pure null, 1 the pure lattice.
    pub beta: f64,
    /// Shape of the random component; rescaled to the degree budget left
    /// over by the lattice.
    pub null: NullModel,
}

impl NwParams {
    pub fn new(n: usize, delta: f64, beta: f64, null: NullModel) -> Result<Self> {
        let p = NwParams { n, delta, beta, null };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("beta {} outside [0, 1]", self.beta)));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::invalid(format!("delta {} must be >= 0", self.delta)));
        }
        if self.n < 2 || 2.0 * self.delta > self.n as f64 - 1.0 {
            return Err(Error::invalid(format!(
                "expected degree 2*delta = {} exceeds n - 1 = {}",
                2.0 * self.delta,
                self.n as isize - 1
            )));
        }
        if self.null.node_count() != self.n {
            return Err(Error::invalid("null model node count differs from n"));
        }
        let h = self.lattice_hops();
        if h > 0 && 2 * h >= self.n {
            return Err(Error::invalid(format!("lattice with {h} hops does not fit {} nodes", self.n)));
        }
        self.null.validate()
    }

    /// Hops per side of the lattice component, `⌈δβ⌉`.
    pub fn lattice_hops(&self) -> usize {
        ((self.delta * self.beta) - CEIL_SLACK).ceil().max(0.0) as usize
    }

    /// Mean degree assigned to the random component, `max(0, 2δ − 2⌈δβ⌉)`.
    pub fn random_mean_degree(&self) -> f64 {
        (2.0 * self.delta - 2.0 * self.lattice_hops() as f64).max(0.0)
    }

    /// The random component after rescaling.
    pub fn random_component(&self) -> Result<NullModel> {
        self.null.with_mean_degree(self.random_mean_degree())
    }
}

/// Edge-wise union of a `⌈δβ⌉`-hop ring lattice and a graph drawn from the
/// rescaled null component.
pub fn generate_nw<R: Rng + ?Sized>(params: &NwParams, rng: &mut R) -> Result<Graph> {
    params.validate()?;
    let n = params.n;
    let hops = params.lattice_hops();
    let mut edges: Vec<(usize, usize)> = if hops > 0 { lattice_edges(n, hops).collect() } else { Vec::new() };
    let random_degree = params.random_mean_degree();
    if random_degree > 0.0 {
        let component = params.random_component()?;
        edges.extend(null_edges(&component, rng));
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn lattice_examples() {
        let g = generate_ring_lattice(6, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.degrees().iter().all(|&d| d == 2));
        let g = generate_ring_lattice(6, 2).unwrap();
        assert_eq!(g.edge_count(), 12);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(generate_ring_lattice(6, 3).is_err());
        assert!(generate_ring_lattice(6, 0).is_err());
    }

    #[test]
    fn er_extremes() {
        let mut rng = substream(1, &[]);
        assert_eq!(generate_er(5, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(generate_er(5, 1.0, &mut rng).unwrap().edge_count(), 10);
        assert!(generate_er(5, 1.5, &mut rng).is_err());
        assert!(generate_er(5, -0.1, &mut rng).is_err());
    }

    #[test]
    fn er_is_seed_deterministic() {
        let a = generate_er(300, 0.05, &mut substream(9, &[3])).unwrap();
        let b = generate_er(300, 0.05, &mut substream(9, &[3])).unwrap();
        let c = generate_er(300, 0.05, &mut substream(9, &[4])).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sbm_identity_blocks_give_two_triangles() {
        let probs = BlockMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let model = NullModel::sbm(vec![0, 0, 0, 1, 1, 1], probs).unwrap();
        let g = generate_null(&model, &mut substream(3, &[])).unwrap();
        let expected = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn dcsbm_with_flat_theta_matches_sbm_rates() {
        let labels = vec![0, 0, 0, 1, 1];
        let theta = vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5, 0.5];
        let omega = BlockMatrix::from_rows(&[vec![4.5, 1.2], vec![1.2, 2.0]]).unwrap();
        let dc = NullModel::dcsbm(labels.clone(), theta, omega, 1.0).unwrap();
        let sbm_probs = BlockMatrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.5]]).unwrap();
        let sbm = NullModel::sbm(labels, sbm_probs).unwrap();
        for i in 0..5 {
            for j in i + 1..5 {
                assert!((dc.pair_probability(i, j) - sbm.pair_probability(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chung_lu_from_k4_degrees() {
        let w = (9.0f64 / 12.0).sqrt();
        let model = NullModel::chung_lu(vec![w; 4]).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((model.pair_probability(i, j) - 0.75).abs() < 1e-12);
            }
        }
        assert_eq!(model.capped_pairs(), 0);
    }

    #[test]
    fn capping_is_counted() {
        let model = NullModel::chung_lu(vec![2.0, 1.0, 0.1, 0.1]).unwrap();
        assert_eq!(model.capped_pairs(), 1);
        assert_eq!(model.pair_probability(0, 1), 1.0);
        let raw = model.raw_expected_edge_count();
        assert!((raw - (2.0 + 0.2 + 0.2 + 0.1 + 0.1 + 0.01)).abs() < 1e-12);
        assert!((model.expected_edge_count() - (raw - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(NullModel::er(4, 1.2).is_err());
        assert!(NullModel::chung_lu(vec![1.0, f64::NAN]).is_err());
        let probs = BlockMatrix::from_rows(&[vec![0.5, 0.1], vec![0.1, 0.5]]).unwrap();
        assert!(NullModel::sbm(vec![0, 0, 0], probs.clone()).is_err());
        assert!(NullModel::sbm(vec![0, 2, 1], probs.clone()).is_err());
        assert!(NullModel::dcsbm(vec![0, 0, 1, 1], vec![0.5, 0.4, 0.5, 0.5], probs, 1.0).is_err());
        assert!(BlockMatrix::from_rows(&[vec![0.5, 0.1], vec![0.2, 0.5]]).is_err());
    }

    #[test]
    fn raw_expected_edges_closed_forms_match_pair_sums() {
        let labels = vec![0, 1, 0, 2, 1, 1, 2];
        let probs = BlockMatrix::from_rows(&[
            vec![0.3, 0.1, 0.05],
            vec![0.1, 0.4, 0.2],
            vec![0.05, 0.2, 0.6],
        ])
        .unwrap();
        let theta = vec![0.25, 0.2, 0.75, 0.5, 0.3, 0.5, 0.5];
        let models = [
            NullModel::er(7, 0.3).unwrap(),
            NullModel::chung_lu(vec![0.1, 0.5, 0.3, 0.9, 0.2, 0.4, 0.6]).unwrap(),
            NullModel::sbm(labels.clone(), probs.clone()).unwrap(),
            NullModel::dcsbm(labels, theta, probs, 1.7).unwrap(),
        ];
        for m in &models {
            let mut brute = 0.0;
            m.for_each_pair(|r| brute += r);
            assert!((brute - m.raw_expected_edge_count()).abs() < 1e-12, "{:?}", m.family());
        }
    }

    #[test]
    fn nw_extremes() {
        let null = NullModel::er(100, 0.5).unwrap();
        // beta = 1: pure lattice, independent of seed
        let params = NwParams::new(100, 5.0, 1.0, null.clone()).unwrap();
        assert_eq!(params.lattice_hops(), 5);
        let a = generate_nw(&params, &mut substream(1, &[])).unwrap();
        let b = generate_nw(&params, &mut substream(2, &[])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, generate_ring_lattice(100, 5).unwrap());

        // beta = 0: no lattice, ER with p = 2δ/(n-1)
        let params = NwParams::new(100, 5.0, 0.0, null).unwrap();
        assert_eq!(params.lattice_hops(), 0);
        let comp = params.random_component().unwrap();
        assert_eq!(comp, NullModel::Er { n: 100, p: 10.0 / 99.0 });
    }

    #[test]
    fn nw_hops_tolerate_float_noise() {
        let null = NullModel::er(1000, 0.1).unwrap();
        let beta = 3.0 * 0.05; // 0.15000000000000002
        let params = NwParams::new(1000, 40.0, beta, null).unwrap();
        assert_eq!(params.lattice_hops(), 6);
        assert_eq!(params.random_mean_degree(), 68.0);
    }

    #[test]
    fn nw_rejects_bad_params() {
        let null = NullModel::er(10, 0.1).unwrap();
        assert!(NwParams::new(10, 2.0, 1.5, null.clone()).is_err());
        assert!(NwParams::new(10, 5.0, 0.5, null.clone()).is_err());
        assert!(NwParams::new(11, 2.0, 0.5, null).is_err());
    }

    #[test]
    fn family_parsing() {
        for f in NullFamily::ALL {
            assert_eq!(f.as_str().parse::<NullFamily>().unwrap(), f);
        }
        assert!("ws".parse::<NullFamily>().is_err());
    }
}
