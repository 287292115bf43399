//! Monte Carlo studies: the lognormal approximation of `C` under ER, power
//! curves of the asymptotic test along the lattice/random mixing parameter,
//! and quantile bands of `C` and `L` for superimposed graphs.
//!
//! Replicate `r` of cell `c` draws from `substream(seed, &[c, r])`, so results
//! do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{opt, sig};
use crate::models::{generate_er, generate_nw, BlockMatrix, NullFamily, NullModel, NwParams};
use crate::netstats::{average_path_length, clustering_coefficient, triad_census};
use crate::rng::substream;
use crate::swtest::{asymptotic_test, empirical_quantile, lognormal_c_params, LogNormalParams};

/// Replicate counts below this are computed but flagged.
pub const MIN_RELIABLE_REPS: usize = 100;

/// `0, 0.05, …, 1`.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Monte Carlo standard error of a rate.
pub fn rate_se(rate: f64, reps: usize) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCheck {
    pub n: usize,
    pub p: f64,
    pub reps: usize,
    pub seed: u64,
    pub lognormal: LogNormalParams,
    pub ks: f64,
    pub mean_empirical: f64,
    pub mean_theory: f64,
    pub var_empirical: f64,
    pub var_theory: f64,
    /// Set when `reps` is below [`MIN_RELIABLE_REPS`].
    pub low_reps: bool,
}

impl DistributionCheck {
    pub fn mean_delta(&self) -> f64 {
        self.mean_empirical - self.mean_theory
    }

    pub fn var_delta(&self) -> f64 {
        self.var_empirical - self.var_theory
    }
}

/// Draws `reps` ER graphs and compares their clustering coefficients with
/// the lognormal approximation.
pub fn validate_c_distribution(n: usize, p: f64, reps: usize, seed: u64) -> Result<DistributionCheck> {
    if reps == 0 {
        return Err(Error::invalid("at least one replicate is required"));
    }
    let lognormal = lognormal_c_params(n, p)?;
    let cs = (0..reps)
        .into_par_iter()
        .map(|r| {
            let g = generate_er(n, p, &mut substream(seed, &[0, r as u64]))?;
            Ok(clustering_coefficient(&triad_census(&g)).value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = cs.iter().sum::<f64>() / reps as f64;
    let var = if reps > 1 {
        cs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64
    } else {
        0.0
    };
    Ok(DistributionCheck {
        n,
        p,
        reps,
        seed,
        ks: ks_distance(&cs, |x| lognormal.cdf(x)),
        mean_empirical: mean,
        mean_theory: lognormal.mean(),
        var_empirical: var,
        var_theory: lognormal.variance(),
        lognormal,
        low_reps: reps < MIN_RELIABLE_REPS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCell {
    pub beta: f64,
    pub c_rate: f64,
    pub l_rate: f64,
    pub both_rate: f64,
    pub c_se: f64,
    pub l_se: f64,
    pub both_se: f64,
    /// Replicates where `n p̂ <= 1` left the path-length cutoff undefined;
    /// they count as non-rejections.
    pub undefined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub n: usize,
    pub delta: f64,
    pub reps: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub cells: Vec<PowerCell>,
}

fn check_grid(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::invalid("beta grid is empty"));
    }
    if let Some(b) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(Error::invalid(format!("beta {b} outside [0, 1]")));
    }
    Ok(())
}

/// Rejection rates of the asymptotic test on lattice + ER superpositions,
/// one cell per `β`.
pub fn power_curve(
    n: usize,
    delta: f64,
    betas: &[f64],
    reps: usize,
    alpha: f64,
    epsilon: f64,
    seed: u64,
) -> Result<PowerCurve> {
    check_grid(betas)?;
    if reps == 0 {
        return Err(Error::invalid("at least one replicate is required"));
    }
    let shape = default_null_shape(NullFamily::Er, n)?;
    let mut cells = Vec::with_capacity(betas.len());
    for (cell, &beta) in betas.iter().enumerate() {
        let params = NwParams::new(n, delta, beta, shape.clone())?;
        let outcomes = (0..reps)
            .into_par_iter()
            .map(|r| {
                let g = generate_nw(&params, &mut substream(seed, &[cell as u64, r as u64]))?;
                match asymptotic_test(&g, alpha, epsilon) {
                    Ok(rep) => Ok(Some((rep.verdicts.c_rule, rep.verdicts.l_rule))),
                    Err(Error::CutoffUndefined(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let count = |f: fn(&(bool, bool)) -> bool| outcomes.iter().flatten().filter(|o| f(o)).count() as f64 / reps as f64;
        let c_rate = count(|o| o.0);
        let l_rate = count(|o| o.1);
        let both_rate = count(|o| o.0 && o.1);
        cells.push(PowerCell {
            beta,
            c_rate,
            l_rate,
            both_rate,
            c_se: rate_se(c_rate, reps),
            l_se: rate_se(l_rate, reps),
            both_se: rate_se(both_rate, reps),
            undefined: outcomes.iter().filter(|o| o.is_none()).count(),
        });
    }
    Ok(PowerCurve {
        n,
        delta,
        reps,
        alpha,
        epsilon,
        seed,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub q01: f64,
    pub q50: f64,
    pub q99: f64,
}

impl Band {
    fn of(samples: &[f64]) -> Result<Self> {
        Ok(Band {
            q01: empirical_quantile(samples, 0.01)?,
            q50: empirical_quantile(samples, 0.5)?,
            q99: empirical_quantile(samples, 0.99)?,
        })
    }

    pub fn width(&self) -> f64 {
        self.q99 - self.q01
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCell {
    pub beta: f64,
    #[serde(rename = "C")]
    pub c: Band,
    /// `None` when no replicate had a defined path length.
    #[serde(rename = "L")]
    pub l: Option<Band>,
    pub l_undefined: usize,
    pub disconnected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileBands {
    pub null: NullFamily,
    pub n: usize,
    pub delta: f64,
    pub reps: usize,
    pub seed: u64,
    pub cells: Vec<BandCell>,
}

/// 1%, 50% and 99% quantiles of `C` and `L` for lattice + `family`
/// superpositions, one cell per `β`.
pub fn quantile_bands(family: NullFamily, n: usize, delta: f64, betas: &[f64], reps: usize, seed: u64) -> Result<QuantileBands> {
    check_grid(betas)?;
    if reps == 0 {
        return Err(Error::invalid("at least one replicate is required"));
    }
    let shape = default_null_shape(family, n)?;
    let mut cells = Vec::with_capacity(betas.len());
    for (cell, &beta) in betas.iter().enumerate() {
        let params = NwParams::new(n, delta, beta, shape.clone())?;
        let stats = (0..reps)
            .into_par_iter()
            .map(|r| {
                let g = generate_nw(&params, &mut substream(seed, &[cell as u64, r as u64]))?;
                let pl = average_path_length(&g);
                Ok((clustering_coefficient(&triad_census(&g)).value, pl.mean(), pl.lcc_size < n))
            })
            .collect::<Result<Vec<_>>>()?;
        let cs: Vec<f64> = stats.iter().map(|s| s.0).collect();
        let ls: Vec<f64> = stats.iter().filter_map(|s| s.1).collect();
        cells.push(BandCell {
            beta,
            c: Band::of(&cs)?,
            l: if ls.is_empty() { None } else { Some(Band::of(&ls)?) },
            l_undefined: reps - ls.len(),
            disconnected: stats.iter().filter(|s| s.2).count(),
        });
    }
    Ok(QuantileBands {
        null: family,
        n,
        delta,
        reps,
        seed,
        cells,
    })
}

const SHAPE_BLOCKS: usize = 4;
const SHAPE_IN_OUT_RATIO: f64 = 5.0;

/// Shape of the random component used by the simulation studies. Only the
/// relative pair probabilities matter: the component is rescaled to the
/// degree budget left over by the lattice.
///
/// * ER: uniform.
/// * CL: weights `(i + 1)^(-1/2)`.
/// * SBM: 4 near-equal contiguous blocks, within/between ratio 5.
/// * DCSBM: the SBM blocks with CL weights normalized within each block.
pub fn default_null_shape(family: NullFamily, n: usize) -> Result<NullModel> {
    if n < SHAPE_BLOCKS {
        return Err(Error::invalid(format!("simulation designs need n >= {SHAPE_BLOCKS}")));
    }
    let weights: Vec<f64> = (0..n).map(|i| 1.0 / ((i + 1) as f64).sqrt()).collect();
    let labels: Vec<usize> = (0..n).map(|i| i * SHAPE_BLOCKS / n).collect();
    let mut block = BlockMatrix::filled(SHAPE_BLOCKS, 0.01);
    for q in 0..SHAPE_BLOCKS {
        block.set(q, q, 0.01 * SHAPE_IN_OUT_RATIO);
    }
    match family {
        NullFamily::Er => NullModel::er(n, 0.5),
        NullFamily::Cl => NullModel::chung_lu(weights),
        NullFamily::Sbm => NullModel::sbm(labels, block),
        NullFamily::Dcsbm => {
            let mut totals = [0.0; SHAPE_BLOCKS];
            for (w, &z) in weights.iter().zip(&labels) {
                totals[z] += w;
            }
            let theta = weights.iter().zip(&labels).map(|(w, &z)| w / totals[z]).collect();
            // θ sums to 1 per block, so ω_ql is an expected edge count
            let size = (n / SHAPE_BLOCKS) as f64;
            NullModel::dcsbm(labels, theta, block.scaled(size * size), 1.0)
        }
    }
}

/// Output of one simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SimResult {
    Dist(DistributionCheck),
    Power(PowerCurve),
    Bands(QuantileBands),
}

impl SimResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with a header row; one row per cell.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            SimResult::Dist(d) => {
                w.write_record([
                    "n", "p", "reps", "seed", "mu", "s2", "ks", "mean_empirical", "mean_theory", "var_empirical",
                    "var_theory", "low_reps",
                ])?;
                w.write_record([
                    d.n.to_string(),
                    sig(d.p),
                    d.reps.to_string(),
                    d.seed.to_string(),
                    sig(d.lognormal.mu),
                    sig(d.lognormal.s2),
                    sig(d.ks),
                    sig(d.mean_empirical),
                    sig(d.mean_theory),
                    sig(d.var_empirical),
                    sig(d.var_theory),
                    d.low_reps.to_string(),
                ])?;
            }
            SimResult::Power(p) => {
                w.write_record([
                    "n", "delta", "beta", "reps", "alpha", "epsilon", "seed", "c_rate", "c_se", "l_rate", "l_se",
                    "both_rate", "both_se", "undefined",
                ])?;
                for c in &p.cells {
                    w.write_record([
                        p.n.to_string(),
                        sig(p.delta),
                        sig(c.beta),
                        p.reps.to_string(),
                        sig(p.alpha),
                        sig(p.epsilon),
                        p.seed.to_string(),
                        sig(c.c_rate),
                        sig(c.c_se),
                        sig(c.l_rate),
                        sig(c.l_se),
                        sig(c.both_rate),
                        sig(c.both_se),
                        c.undefined.to_string(),
                    ])?;
                }
            }
            SimResult::Bands(b) => {
                w.write_record([
                    "null", "n", "delta", "beta", "reps", "seed", "c_q01", "c_q50", "c_q99", "l_q01", "l_q50", "l_q99",
                    "l_undefined", "disconnected",
                ])?;
                for c in &b.cells {
                    w.write_record([
                        b.null.to_string(),
                        b.n.to_string(),
                        sig(b.delta),
                        sig(c.beta),
                        b.reps.to_string(),
                        b.seed.to_string(),
                        sig(c.c.q01),
                        sig(c.c.q50),
                        sig(c.c.q99),
                        opt(c.l.map(|l| l.q01)),
                        opt(c.l.map(|l| l.q50)),
                        opt(c.l.map(|l| l.q99)),
                        c.l_undefined.to_string(),
                        c.disconnected.to_string(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
