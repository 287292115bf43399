//! The intersection test: a network is called small-world when its
//! clustering coefficient is above a high null quantile *and* its average
//! path length stays below a high null quantile.
//!
//! Three variants are provided:
//!
//! * [`bootstrap_intersection_test`]: cutoffs from `B` graphs sampled from a
//!   fitted null (any family).
//! * [`asymptotic_test`]: closed-form cutoffs under the ER null, no sampling.
//! * [`weak_test`]: the relaxed criterion where the path-length cutoff is
//!   about twice the null's typical path length.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::fitting::{fit_null, FittedNull};
use crate::graph::Graph;
use crate::models::{generate_null, NullFamily, NullModel};
use crate::netstats::{average_path_length, clustering_coefficient, density, small_world_coefficient, triad_census};
use crate::rng::substream;

/// Default number of bootstrap replicates.
pub const DEFAULT_REPLICATES: usize = 500;
/// Default `ε` in the path-length cutoff `(2 + ε) log n / log(n p̂)`.
pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Quantile of the null path-length distribution used as the bootstrap
/// L-cutoff.
pub const L_QUANTILE: f64 = 0.99;

// stream ids under the base seed
const FIT_STREAM: u64 = 0;
const REPLICATE_STREAM: u64 = 1;
const REFIT_STREAM: u64 = 2;

/// `Σ = 3(n−2) C(n,3) p(1−p) [[..]]`, the asymptotic covariance of the
/// connected-triple count `S` (index 1) and the triangle count `T` (index 2)
/// in `G(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMatrix {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
}

impl SigmaMatrix {
    pub fn s21(&self) -> f64 {
        self.s12
    }
}

fn choose3(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0) / 6.0
}

fn check_open_unit(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {p} must lie in (0, 1)")))
    }
}

pub fn sigma_matrix(n: usize, p: f64) -> Result<SigmaMatrix> {
    if n < 3 {
        return Err(Error::invalid(format!("sigma matrix needs n >= 3, got {n}")));
    }
    check_open_unit("p", p)?;
    let nm2 = n as f64 - 2.0;
    let q = 1.0 - p;
    let factor = 3.0 * nm2 * choose3(n) * p * q;
    Ok(SigmaMatrix {
        s11: factor * (4.0 * p * p + p * q / nm2),
        s12: factor * (2.0 * p.powi(3) + p * p * q / nm2),
        s22: factor * (p.powi(4) + p * p * (1.0 + p - 2.0 * p * p) / (3.0 * nm2)),
    })
}

/// Parameters of the lognormal law of the clustering coefficient under the
/// ER null: `log C ~ N(mu, s2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    pub mu: f64,
    pub s2: f64,
}

impl LogNormalParams {
    fn sd(&self) -> f64 {
        self.s2.sqrt()
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let z = Normal::standard().inverse_cdf(q);
        (self.mu + z * self.sd()).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        Normal::standard().cdf((x.ln() - self.mu) / self.sd())
    }

    /// `P(C >= x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        Normal::standard().sf((x.ln() - self.mu) / self.sd())
    }

    pub fn mean(&self) -> f64 {
        (self.mu + self.s2 / 2.0).exp()
    }

    pub fn variance(&self) -> f64 {
        (self.s2.exp() - 1.0) * (2.0 * self.mu + self.s2).exp()
    }
}

/// `mu = log p̂`, `s2 = (Σ22/p̂⁶ + Σ11/(9p̂⁴) − 2Σ12/(3p̂⁵)) / C(n,3)²`.
pub fn lognormal_c_params(n: usize, p_hat: f64) -> Result<LogNormalParams> {
    let sigma = sigma_matrix(n, p_hat)?;
    let c3 = choose3(n);
    let p = p_hat;
    let s2 = (sigma.s22 / p.powi(6) + sigma.s11 / (9.0 * p.powi(4)) - 2.0 * sigma.s12 / (3.0 * p.powi(5))) / (c3 * c3);
    Ok(LogNormalParams { mu: p.ln(), s2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCutoffs {
    /// `100(1 − α)`th percentile of the lognormal law of `C`.
    pub k_alpha: f64,
    /// `(2 + ε) log n / log(n p̂)`.
    pub k2: f64,
    pub lognormal: LogNormalParams,
}

pub fn asymptotic_cutoffs(n: usize, p_hat: f64, alpha: f64, epsilon: f64) -> Result<AsymptoticCutoffs> {
    check_open_unit("alpha", alpha)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon = {epsilon} must be > 0")));
    }
    let lognormal = lognormal_c_params(n, p_hat)?;
    let np = n as f64 * p_hat;
    if np <= 1.0 {
        return Err(Error::CutoffUndefined(format!(
            "n * p_hat = {np} <= 1, so log(n p_hat) <= 0 and the path-length cutoff is undefined"
        )));
    }
    Ok(AsymptoticCutoffs {
        k_alpha: lognormal.quantile(1.0 - alpha),
        k2: (2.0 + epsilon) * (n as f64).ln() / np.ln(),
        lognormal,
    })
}

/// Nearest-rank quantile: the `⌈qB⌉`-th smallest sample (1-based), with
/// `q = 0` giving the minimum.
pub fn empirical_quantile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quantile level {q} outside [0, 1]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[nearest_rank_index(sorted.len(), q)])
}

fn nearest_rank_index(len: usize, q: f64) -> usize {
    // q * len is computed in floating point; 0.95 * 100 = 95.00000000000001
    let rank = (q * len as f64 - 1e-9).ceil().max(1.0) as usize;
    rank.min(len) - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMode {
    Bootstrap,
    Asymptotic,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    #[serde(rename = "reject")]
    Reject,
    #[serde(rename = "fail-to-reject")]
    FailToReject,
}

impl Decision {
    pub fn from_reject(reject: bool) -> Self {
        if reject {
            Decision::Reject
        } else {
            Decision::FailToReject
        }
    }

    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail to reject",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observed {
    #[serde(rename = "C")]
    pub c: f64,
    /// Average path length on the largest component, if it has two nodes.
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub p_hat: f64,
    pub n: usize,
    pub m: usize,
    pub lcc_fraction: f64,
    /// Small-world coefficient against the null means (bootstrap modes).
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSummary {
    pub family: NullFamily,
    /// SHA-256 of the fitted model's JSON form.
    pub params_digest: String,
    /// Fitted ER density, when the family is ER.
    pub p: Option<f64>,
    /// Number of blocks for SBM/DCSBM.
    pub k: Option<usize>,
    pub capped_pairs: u64,
    pub degenerate_blocks: Vec<usize>,
}

impl NullSummary {
    fn from_fit(fit: &FittedNull) -> Result<Self> {
        Ok(NullSummary {
            family: fit.model.family(),
            params_digest: params_digest(&fit.model)?,
            p: match fit.model {
                NullModel::Er { p, .. } => Some(p),
                _ => None,
            },
            k: fit.model.block_count(),
            capped_pairs: fit.capped_pairs,
            degenerate_blocks: fit.degenerate_blocks.clone(),
        })
    }
}

/// Hex SHA-256 of the model's canonical JSON serialization.
pub fn params_digest(model: &NullModel) -> Result<String> {
    let json = serde_json::to_vec(model)?;
    let digest = Sha256::digest(&json);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    #[serde(rename = "K1")]
    pub k1: f64,
    /// `None` when no null replicate had a defined path length.
    #[serde(rename = "K2")]
    pub k2: Option<f64>,
    /// How each cutoff was obtained.
    pub k1_source: String,
    pub k2_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValues {
    /// Share of null draws with clustering at least the observed value
    /// (analytic for the ER asymptotic and weak tests).
    #[serde(rename = "p_C")]
    pub p_c: Option<f64>,
    /// Share of null draws with path length at most the observed value.
    #[serde(rename = "p_L")]
    pub p_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// `C > K1`.
    #[serde(rename = "C_rule")]
    pub c_rule: bool,
    /// `L < K2`.
    #[serde(rename = "L_rule")]
    pub l_rule: bool,
    pub decision: Decision,
    /// The same decision read off the p-values: `p_C <= α` and `p_L < 0.99`
    /// (bootstrap mode only).
    pub p_value_decision: Option<Decision>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateStats {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub sigma: Option<f64>,
    pub lcc_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Replicates whose graph was disconnected (L taken on the largest component).
    pub disconnected_replicates: usize,
    /// Replicates with no connected triple (C reported as 0).
    pub degenerate_c_replicates: usize,
    /// Replicates whose largest component is a single node (no L).
    pub undefined_l_replicates: usize,
    pub refit_per_replicate: bool,
    /// Means of the null C and L used as references for the small-world
    /// coefficient.
    pub c_reference: Option<f64>,
    pub l_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub mode: TestMode,
    pub observed: Observed,
    pub null: NullSummary,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub seed: Option<u64>,
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub cutoffs: Cutoffs,
    pub p_values: PValues,
    pub verdicts: Verdicts,
    pub diagnostics: Diagnostics,
    pub samples_path: Option<String>,
    #[serde(default)]
    pub samples: Vec<ReplicateStats>,
}

impl TestReport {
    pub fn decision(&self) -> Decision {
        self.verdicts.decision
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Re-run the (randomized) fit for every replicate instead of once.
    pub refit_per_replicate: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            replicates: DEFAULT_REPLICATES,
            seed: crate::rng::DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
            epsilon: DEFAULT_EPSILON,
            refit_per_replicate: false,
        }
    }
}

struct ObservedStats {
    c: f64,
    l: Option<f64>,
    p_hat: f64,
    lcc_fraction: f64,
}

fn observe(g: &Graph) -> Result<ObservedStats> {
    let c = clustering_coefficient(&triad_census(g)).value;
    let pl = average_path_length(g);
    Ok(ObservedStats {
        c,
        l: pl.mean(),
        p_hat: density(g)?,
        lcc_fraction: pl.lcc_fraction,
    })
}

fn check_test_input(g: &Graph) -> Result<()> {
    if g.node_count() < 3 {
        return Err(Error::invalid(format!("the test needs at least 3 nodes, got {}", g.node_count())));
    }
    if g.edge_count() == 0 {
        return Err(Error::degenerate("the test needs at least one edge"));
    }
    Ok(())
}

/// Null draws of `(C, L)` with their diagnostics.
struct NullSample {
    stats: Vec<ReplicateStats>,
    diagnostics: Diagnostics,
}

fn draw_null_sample(g: &Graph, fit: &FittedNull, family: NullFamily, config: &TestConfig) -> Result<NullSample> {
    if config.replicates == 0 {
        return Err(Error::invalid("at least one bootstrap replicate is required"));
    }
    let raw: Vec<Result<(ReplicateStats, bool, bool)>> = (0..config.replicates)
        .into_par_iter()
        .map(|b| {
            let refit;
            let model = if config.refit_per_replicate {
                refit = fit_null(g, family, &mut substream(config.seed, &[REFIT_STREAM, b as u64]))?;
                &refit.model
            } else {
                &fit.model
            };
            let sample = generate_null(model, &mut substream(config.seed, &[REPLICATE_STREAM, b as u64]))?;
            let triads = clustering_coefficient(&triad_census(&sample));
            let pl = average_path_length(&sample);
            Ok((
                ReplicateStats {
                    c: triads.value,
                    l: pl.mean(),
                    sigma: None,
                    lcc_fraction: pl.lcc_fraction,
                },
                triads.degenerate,
                pl.lcc_size < sample.node_count(),
            ))
        })
        .collect();

    let mut stats = Vec::with_capacity(raw.len());
    let mut diagnostics = Diagnostics {
        refit_per_replicate: config.refit_per_replicate,
        ..Default::default()
    };
    for r in raw {
        let (s, degenerate, disconnected) = r?;
        diagnostics.degenerate_c_replicates += degenerate as usize;
        diagnostics.disconnected_replicates += disconnected as usize;
        diagnostics.undefined_l_replicates += s.l.is_none() as usize;
        stats.push(s);
    }

    let c_ref = stats.iter().map(|s| s.c).sum::<f64>() / stats.len() as f64;
    let ls: Vec<f64> = stats.iter().filter_map(|s| s.l).collect();
    let l_ref = (!ls.is_empty()).then(|| ls.iter().sum::<f64>() / ls.len() as f64);
    diagnostics.c_reference = Some(c_ref);
    diagnostics.l_reference = l_ref;
    if let Some(l_ref) = l_ref {
        for s in &mut stats {
            s.sigma = s.l.and_then(|l| small_world_coefficient(s.c, l, c_ref, l_ref).ok());
        }
    }
    Ok(NullSample { stats, diagnostics })
}

/// Parametric bootstrap intersection test against a fitted `family` null.
///
/// `K1` is the nearest-rank `1 − α` quantile of the null clustering
/// coefficients and `K2` the 0.99 quantile of the null path lengths; the null
/// is rejected iff `C > K1` and `L < K2`.
pub fn bootstrap_intersection_test(g: &Graph, family: NullFamily, config: &TestConfig) -> Result<TestReport> {
    check_test_input(g)?;
    check_open_unit("alpha", config.alpha)?;
    let obs = observe(g)?;
    let fit = fit_null(g, family, &mut substream(config.seed, &[FIT_STREAM]))?;
    let sample = draw_null_sample(g, &fit, family, config)?;

    let cs: Vec<f64> = sample.stats.iter().map(|s| s.c).collect();
    let ls: Vec<f64> = sample.stats.iter().filter_map(|s| s.l).collect();
    let k1 = empirical_quantile(&cs, 1.0 - config.alpha)?;
    let k2 = if ls.is_empty() { None } else { Some(empirical_quantile(&ls, L_QUANTILE)?) };

    let p_c = cs.iter().filter(|&&c| c >= obs.c).count() as f64 / cs.len() as f64;
    let p_l = match obs.l {
        Some(l) if !ls.is_empty() => Some(ls.iter().filter(|&&x| x <= l).count() as f64 / ls.len() as f64),
        _ => None,
    };

    let c_rule = obs.c > k1;
    let l_rule = matches!((obs.l, k2), (Some(l), Some(k2)) if l < k2);
    let p_value_reject = p_c <= config.alpha && p_l.is_some_and(|p| p < L_QUANTILE);

    let sigma = match (obs.l, sample.diagnostics.c_reference, sample.diagnostics.l_reference) {
        (Some(l), Some(cr), Some(lr)) => small_world_coefficient(obs.c, l, cr, lr).ok(),
        _ => None,
    };

    Ok(TestReport {
        mode: TestMode::Bootstrap,
        observed: Observed {
            c: obs.c,
            l: obs.l,
            p_hat: obs.p_hat,
            n: g.node_count(),
            m: g.edge_count(),
            lcc_fraction: obs.lcc_fraction,
            sigma,
        },
        null: NullSummary::from_fit(&fit)?,
        replicates: config.replicates,
        seed: Some(config.seed),
        alpha: config.alpha,
        epsilon: None,
        cutoffs: Cutoffs {
            k1,
            k2,
            k1_source: format!("bootstrap nearest-rank {} quantile of C", 1.0 - config.alpha),
            k2_source: format!("bootstrap nearest-rank {L_QUANTILE} quantile of L"),
        },
        p_values: PValues {
            p_c: Some(p_c),
            p_l,
        },
        verdicts: Verdicts {
            c_rule,
            l_rule,
            decision: Decision::from_reject(c_rule && l_rule),
            p_value_decision: Some(Decision::from_reject(p_value_reject)),
        },
        diagnostics: sample.diagnostics,
        samples_path: None,
        samples: sample.stats,
    })
}

fn er_null_summary(g: &Graph, p_hat: f64) -> Result<NullSummary> {
    let model = NullModel::er(g.node_count(), p_hat)?;
    Ok(NullSummary {
        family: NullFamily::Er,
        params_digest: params_digest(&model)?,
        p: Some(p_hat),
        k: None,
        capped_pairs: 0,
        degenerate_blocks: Vec::new(),
    })
}

/// Asymptotic intersection test under the ER null. Nothing is simulated:
/// `K1` is the lognormal `1 − α` quantile and `K2 = (2 + ε) log n / log(n p̂)`.
pub fn asymptotic_test(g: &Graph, alpha: f64, epsilon: f64) -> Result<TestReport> {
    check_test_input(g)?;
    let obs = observe(g)?;
    let cut = asymptotic_cutoffs(g.node_count(), obs.p_hat, alpha, epsilon)?;
    let c_rule = obs.c > cut.k_alpha;
    let l_rule = obs.l.is_some_and(|l| l < cut.k2);
    Ok(TestReport {
        mode: TestMode::Asymptotic,
        observed: Observed {
            c: obs.c,
            l: obs.l,
            p_hat: obs.p_hat,
            n: g.node_count(),
            m: g.edge_count(),
            lcc_fraction: obs.lcc_fraction,
            sigma: None,
        },
        null: er_null_summary(g, obs.p_hat)?,
        replicates: 0,
        seed: None,
        alpha,
        epsilon: Some(epsilon),
        cutoffs: Cutoffs {
            k1: cut.k_alpha,
            k2: Some(cut.k2),
            k1_source: format!("lognormal {} quantile of C", 1.0 - alpha),
            k2_source: "(2 + epsilon) log n / log(n p_hat)".into(),
        },
        p_values: PValues {
            p_c: Some(cut.lognormal.sf(obs.c)),
            p_l: None,
        },
        verdicts: Verdicts {
            c_rule,
            l_rule,
            decision: Decision::from_reject(c_rule && l_rule),
            p_value_decision: None,
        },
        diagnostics: Diagnostics::default(),
        samples_path: None,
        samples: Vec::new(),
    })
}

/// Weak small-world test.
///
/// ER null: `K_C` is the lognormal `1 − α` quantile and `K_L` the asymptotic
/// `K2`; nothing is simulated. Other nulls: `K_C` is the bootstrap `1 − α`
/// quantile of `C` and `K_L` twice the bootstrap mean of `L`. Only the
/// clustering half carries a p-value.
pub fn weak_test(g: &Graph, family: NullFamily, config: &TestConfig) -> Result<TestReport> {
    check_test_input(g)?;
    if family == NullFamily::Er {
        let mut report = asymptotic_test(g, config.alpha, config.epsilon)?;
        report.mode = TestMode::Weak;
        return Ok(report);
    }
    check_open_unit("alpha", config.alpha)?;
    let obs = observe(g)?;
    let fit = fit_null(g, family, &mut substream(config.seed, &[FIT_STREAM]))?;
    let sample = draw_null_sample(g, &fit, family, config)?;
    let cs: Vec<f64> = sample.stats.iter().map(|s| s.c).collect();
    let k_c = empirical_quantile(&cs, 1.0 - config.alpha)?;
    let k_l = sample.diagnostics.l_reference.map(|mean| 2.0 * mean);
    let p_c = cs.iter().filter(|&&c| c >= obs.c).count() as f64 / cs.len() as f64;
    let c_rule = obs.c > k_c;
    let l_rule = matches!((obs.l, k_l), (Some(l), Some(k)) if l < k);
    let sigma = match (obs.l, sample.diagnostics.c_reference, sample.diagnostics.l_reference) {
        (Some(l), Some(cr), Some(lr)) => small_world_coefficient(obs.c, l, cr, lr).ok(),
        _ => None,
    };
    Ok(TestReport {
        mode: TestMode::Weak,
        observed: Observed {
            c: obs.c,
            l: obs.l,
            p_hat: obs.p_hat,
            n: g.node_count(),
            m: g.edge_count(),
            lcc_fraction: obs.lcc_fraction,
            sigma,
        },
        null: NullSummary::from_fit(&fit)?,
        replicates: config.replicates,
        seed: Some(config.seed),
        alpha: config.alpha,
        epsilon: None,
        cutoffs: Cutoffs {
            k1: k_c,
            k2: k_l,
            k1_source: format!("bootstrap nearest-rank {} quantile of C", 1.0 - config.alpha),
            k2_source: "twice the bootstrap mean of L".into(),
        },
        p_values: PValues {
            p_c: Some(p_c),
            p_l: None,
        },
        verdicts: Verdicts {
            c_rule,
            l_rule,
            decision: Decision::from_reject(c_rule && l_rule),
            p_value_decision: None,
        },
        diagnostics: sample.diagnostics,
        samples_path: None,
        samples: sample.stats,
    })
}

/// Intersection decision for given samples and observations, using the
/// bootstrap cutoffs. Exposed for checking decision logic on synthetic
/// sample sets.
pub fn intersection_decision(c_samples: &[f64], l_samples: &[f64], c_obs: f64, l_obs: f64, alpha: f64) -> Result<(bool, bool)> {
    let k1 = empirical_quantile(c_samples, 1.0 - alpha)?;
    let k2 = empirical_quantile(l_samples, L_QUANTILE)?;
    Ok((c_obs > k1, l_obs < k2))
}
