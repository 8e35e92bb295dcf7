//! Seeded Monte Carlo runs of the tests against the generative models:
//! size and power estimates, moments of the statistic, and the
//! Kolmogorov-Smirnov distance to the null law.
//!
//! Replicate `i` is seeded by `child_seed(seed, i)`, and aggregation walks
//! the replicate-indexed results in order, so reports are bit-identical
//! across runs and thread counts.

use crate::error::{Error, Result};
use crate::gaussian::{ez_test_gaussian_with, theoretical_delta_gaussian, GaussianOptions};
use crate::generators::{
    child_seed, sample_dcbm, sample_er, sample_gaussian_dcbm, sample_neighborhood_model,
    DcbmParams, NeighborhoodParams, Seed,
};
use crate::graph::NodeId;
use crate::hypothesis::{
    er_chi2_test, ez_test_dcbm, ez_test_neighborhood, ez_test_sbm, normal_sf,
    theoretical_delta_dcbm, theoretical_delta_neighborhood, TestId, TestResult,
};
use rayon::prelude::*;

/// Generative model a simulation draws from.
#[derive(Debug, Clone)]
pub enum Model {
    Er { n: usize, p: f64 },
    Sbm(DcbmParams),
    Dcbm(DcbmParams),
    Config(DcbmParams),
    Neighborhood(NeighborhoodParams),
    /// `params.n` is the variable count; `samples` the rows per draw.
    Gaussian { samples: usize, params: DcbmParams },
}

impl Model {
    pub fn describe(&self) -> String {
        match self {
            Model::Er { n, p } => format!("er(n={n}, p={p})"),
            Model::Sbm(d) => format!("sbm(n={}, k={}, a={}, b={})", d.n, d.k, d.a, d.b),
            Model::Dcbm(d) => format!(
                "dcbm(n={}, k={}, a={}, b={}, w={:?})",
                d.n, d.k, d.a, d.b, d.w_dist
            ),
            Model::Config(d) => format!("config(n={}, a={}, w={:?})", d.n, d.a, d.w_dist),
            Model::Neighborhood(p) => format!(
                "neighborhood(n={}, k={}, r={}, a={}, b={}, p={})",
                p.n, p.k, p.r, p.a, p.b, p.p
            ),
            Model::Gaussian { samples, params } => format!(
                "gaussian(samples={samples}, vars={}, k={}, a={}, b={})",
                params.n, params.k, params.a, params.b
            ),
        }
    }
}

/// Which test a simulation applies to each draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimTest {
    EzDcbm,
    EzSbm,
    ErChi2,
    EzNeighborhood,
    EzGaussian,
}

impl SimTest {
    pub fn test_id(&self) -> TestId {
        match self {
            SimTest::EzDcbm => TestId::EzDcbm,
            SimTest::EzSbm => TestId::EzSbm,
            SimTest::ErChi2 => TestId::ErChi2,
            SimTest::EzNeighborhood => TestId::EzNeighborhood,
            SimTest::EzGaussian => TestId::EzGaussian,
        }
    }
}

/// Summary of one simulation run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SimulationReport {
    pub model: String,
    pub test_id: TestId,
    pub replicates: usize,
    /// Replicates whose test completed (the rest hit domain errors,
    /// e.g. an empty draw).
    pub completed: usize,
    pub skipped: usize,
    pub alpha: f64,
    pub rejection_rate: f64,
    pub statistic_mean: f64,
    pub statistic_var: f64,
    /// Plug-in non-centrality, when the model has a closed form for it.
    pub theoretical_delta: Option<f64>,
    /// KS distance of the completed statistics to the test's null law.
    pub ks_statistic: f64,
    /// Pair probabilities clipped at 1 across all draws; nonzero values
    /// flag parameters outside the model's intent.
    pub clipped_pairs: u64,
}

fn one_replicate(model: &Model, test: SimTest, seed: Seed) -> Result<(TestResult, u64)> {
    match model {
        Model::Er { n, p } => {
            let g = sample_er(*n, *p, seed)?;
            Ok((graph_test(&g, test)?, 0))
        }
        Model::Sbm(params) | Model::Dcbm(params) | Model::Config(params) => {
            let s = sample_dcbm(params, seed)?;
            Ok((graph_test(&s.graph, test)?, s.clipped))
        }
        Model::Neighborhood(params) => {
            let s = sample_neighborhood_model(params, seed)?;
            Ok((ez_test_neighborhood(&s.graph, NodeId(0))?, s.clipped))
        }
        Model::Gaussian { samples, params } => {
            let s = sample_gaussian_dcbm(*samples, params, seed)?;
            // model columns have unit variance by construction; empirical
            // re-standardization would distort the null calibration
            let r = ez_test_gaussian_with(&s.data, GaussianOptions { standardize: false })?;
            Ok((r, 0))
        }
    }
}

fn graph_test(g: &crate::graph::Graph, test: SimTest) -> Result<TestResult> {
    match test {
        SimTest::EzDcbm => ez_test_dcbm(g),
        SimTest::EzSbm => ez_test_sbm(g),
        SimTest::ErChi2 => er_chi2_test(g),
        _ => Err(Error::domain("test does not apply to a plain graph draw")),
    }
}

fn validate(model: &Model, test: SimTest) -> Result<()> {
    match (model, test) {
        (Model::Gaussian { .. }, SimTest::EzGaussian) => Ok(()),
        (Model::Gaussian { .. }, _) => Err(Error::domain(
            "the gaussian model requires the ez-gaussian test",
        )),
        (_, SimTest::EzGaussian) => Err(Error::domain(
            "the ez-gaussian test requires the gaussian model",
        )),
        (Model::Neighborhood(_), SimTest::EzNeighborhood) => Ok(()),
        (Model::Neighborhood(_), _) => Err(Error::domain(
            "the neighborhood model requires the ez-neighborhood test",
        )),
        (_, SimTest::EzNeighborhood) => Err(Error::domain(
            "the ez-neighborhood test requires the neighborhood model",
        )),
        _ => Ok(()),
    }
}

fn closed_form_delta(model: &Model) -> Option<f64> {
    match model {
        Model::Er { .. } => None,
        Model::Sbm(p) | Model::Dcbm(p) | Model::Config(p) => theoretical_delta_dcbm(p).ok(),
        Model::Neighborhood(p) => theoretical_delta_neighborhood(p).ok(),
        Model::Gaussian { samples, params } => {
            theoretical_delta_gaussian(params.k, params.a, params.b, *samples).ok()
        }
    }
}

/// Run `replicates` seeded draws of `model`, apply `test` to each, and
/// summarize. Draw or test domain errors skip the replicate (counted);
/// parameter errors fail before any sampling.
pub fn run_simulation(
    model: &Model,
    test: SimTest,
    replicates: usize,
    alpha: f64,
    seed: Seed,
) -> Result<SimulationReport> {
    if replicates < 1 {
        return Err(Error::domain("need at least one replicate"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    validate(model, test)?;
    // surface parameter problems before sampling anything
    let _ = closed_form_delta(model);

    let runs: Vec<Result<(TestResult, u64)>> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| one_replicate(model, test, child_seed(seed, i)))
        .collect();

    let mut stats = Vec::with_capacity(replicates);
    let mut rejected = 0usize;
    let mut skipped = 0usize;
    let mut clipped_pairs = 0u64;
    for run in runs {
        match run {
            Ok((r, clipped)) => {
                if r.p_value < alpha {
                    rejected += 1;
                }
                stats.push(r.statistic);
                clipped_pairs += clipped;
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let completed = stats.len();
    if completed == 0 {
        return Err(Error::domain("every replicate failed its preconditions"));
    }
    let nf = completed as f64;
    let mean = stats.iter().sum::<f64>() / nf;
    let var = if completed > 1 {
        stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        f64::NAN
    };
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ks_statistic = match test {
        SimTest::ErChi2 => ks_distance(&stats, |x| 1.0 - (-x / 2.0).exp()),
        _ => ks_distance(&stats, |x| 1.0 - normal_sf(x)),
    };
    Ok(SimulationReport {
        model: model.describe(),
        test_id: test.test_id(),
        replicates,
        completed,
        skipped,
        alpha,
        rejection_rate: rejected as f64 / nf,
        statistic_mean: mean,
        statistic_var: var,
        theoretical_delta: closed_form_delta(model),
        ks_statistic,
        clipped_pairs,
    })
}

/// Kolmogorov-Smirnov distance of a sorted sample to the CDF `f`.
pub fn ks_distance(sorted: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = f(x);
        d = d.max(cdf - i as f64 / n).max((i + 1) as f64 / n - cdf);
    }
    d
}

/// Critical KS distance at significance `alpha` for `n` observations
/// (asymptotic Kolmogorov quantile).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
