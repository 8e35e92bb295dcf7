//! Seeded samplers for every null and alternative model the tests target:
//! Erdos-Renyi, SBM, degree-corrected SBM, the configuration model, the
//! ego-neighborhood model, and Gaussian data with DCBM correlation
//! structure.
//!
//! Randomness comes from ChaCha8 keyed by a 64-bit seed. Each ingredient
//! draws from its own stream (labels, weights, edges, ego attachment,
//! Gaussian noise), so adding diagnostics to one ingredient never perturbs
//! the draws of another. Identical seeds give bitwise-identical samples
//! regardless of thread count.

use crate::error::{Error, Result};
use crate::graph::{DataMatrix, Graph};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// 64-bit seed for the samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Seed(pub u64);

// Stream ids; one per independent ingredient of a sample.
const STREAM_LABELS: u64 = 1;
const STREAM_WEIGHTS: u64 = 2;
const STREAM_EDGES: u64 = 3;
const STREAM_EGO: u64 = 4;
const STREAM_GAUSS: u64 = 5;

fn stream_rng(seed: Seed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    rng
}

/// Seed for replicate `index` of a batch keyed by `seed` (splitmix64 of
/// the pair). Replicates can then run in any order or thread.
pub fn child_seed(seed: Seed, index: u64) -> Seed {
    let mut z = seed
        .0
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    Seed(z ^ (z >> 31))
}

/// Distribution of the node sociability weights W, constrained to
/// E W^2 = 1 so that (a, b) stay identified.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightDistribution {
    /// W = 1 (reduces the DCBM to the SBM).
    ConstantOne,
    /// W = w_hi with probability prob_hi, else w_lo.
    TwoPoint { w_lo: f64, w_hi: f64, prob_hi: f64 },
    /// Lognormal(0, sigma) divided by its analytic root-mean-square
    /// exp(sigma^2), so E W^2 = 1 holds exactly.
    ScaledLognormal { sigma: f64 },
}

impl WeightDistribution {
    /// Two-point distribution; all three parameters must satisfy
    /// E W^2 = prob_hi w_hi^2 + (1 - prob_hi) w_lo^2 = 1 to 1e-12.
    pub fn two_point(w_lo: f64, w_hi: f64, prob_hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prob_hi) {
            return Err(Error::domain("prob_hi must lie in [0, 1]"));
        }
        if w_lo < 0.0 || w_hi < 0.0 {
            return Err(Error::domain("weights must be non-negative"));
        }
        let second = prob_hi * w_hi * w_hi + (1.0 - prob_hi) * w_lo * w_lo;
        if (second - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "two-point weights violate E W^2 = 1 (got {second})"
            )));
        }
        Ok(WeightDistribution::TwoPoint {
            w_lo,
            w_hi,
            prob_hi,
        })
    }

    /// Two-point distribution with w_hi solved from w_lo and prob_hi.
    pub fn two_point_solve(w_lo: f64, prob_hi: f64) -> Result<Self> {
        if !(prob_hi > 0.0 && prob_hi <= 1.0) {
            return Err(Error::domain("prob_hi must lie in (0, 1]"));
        }
        if w_lo < 0.0 {
            return Err(Error::domain("w_lo must be non-negative"));
        }
        let rest = 1.0 - (1.0 - prob_hi) * w_lo * w_lo;
        if rest < 0.0 {
            return Err(Error::domain(format!(
                "no solution: (1 - prob_hi) w_lo^2 = {} exceeds 1",
                (1.0 - prob_hi) * w_lo * w_lo
            )));
        }
        Ok(WeightDistribution::TwoPoint {
            w_lo,
            w_hi: (rest / prob_hi).sqrt(),
            prob_hi,
        })
    }

    pub fn scaled_lognormal(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::domain("sigma must be finite and non-negative"));
        }
        Ok(WeightDistribution::ScaledLognormal { sigma })
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            WeightDistribution::ConstantOne => 1.0,
            WeightDistribution::TwoPoint {
                w_lo,
                w_hi,
                prob_hi,
            } => {
                if rng.gen::<f64>() < *prob_hi {
                    *w_hi
                } else {
                    *w_lo
                }
            }
            WeightDistribution::ScaledLognormal { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (sigma * z).exp() / (sigma * sigma).exp()
            }
        }
    }

    /// Analytic E W.
    pub fn mean_w(&self) -> f64 {
        match self {
            WeightDistribution::ConstantOne => 1.0,
            WeightDistribution::TwoPoint {
                w_lo,
                w_hi,
                prob_hi,
            } => prob_hi * w_hi + (1.0 - prob_hi) * w_lo,
            // E exp(sigma Z) = exp(sigma^2 / 2), then the exp(sigma^2) scaling
            WeightDistribution::ScaledLognormal { sigma } => (-sigma * sigma / 2.0).exp(),
        }
    }

    /// Analytic Var W = 1 - (E W)^2 under the E W^2 = 1 constraint.
    pub fn var_w(&self) -> f64 {
        1.0 - self.mean_w().powi(2)
    }
}

/// Parameters of the degree-corrected stochastic block model.
#[derive(Debug, Clone, PartialEq)]
pub struct DcbmParams {
    pub n: usize,
    pub k: u32,
    pub a: f64,
    pub b: f64,
    pub w_dist: WeightDistribution,
}

impl DcbmParams {
    pub fn new(n: usize, k: u32, a: f64, b: f64, w_dist: WeightDistribution) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("DCBM needs n >= 3"));
        }
        if k < 1 {
            return Err(Error::domain("DCBM needs k >= 1"));
        }
        for (name, v) in [("a", a), ("b", b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!(
                    "connectivity {name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(DcbmParams { n, k, a, b, w_dist })
    }
}

/// Parameters of the ego-neighborhood model: an ambient DCBM plus an ego
/// attached with probability `p` to nodes whose community lies in a subset
/// of size `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodParams {
    pub n: usize,
    pub k: u32,
    pub r: u32,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub w_dist: WeightDistribution,
}

impl NeighborhoodParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        k: u32,
        r: u32,
        a: f64,
        b: f64,
        p: f64,
        w_dist: WeightDistribution,
    ) -> Result<Self> {
        if r < 1 || r > k {
            return Err(Error::domain(format!("need 1 <= r <= k, got r = {r}, k = {k}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!("ego attachment p = {p} outside (0, 1]")));
        }
        let _ = DcbmParams::new(n, k, a, b, w_dist.clone())?;
        Ok(NeighborhoodParams {
            n,
            k,
            r,
            a,
            b,
            p,
            w_dist,
        })
    }

    pub fn dcbm(&self) -> DcbmParams {
        DcbmParams {
            n: self.n,
            k: self.k,
            a: self.a,
            b: self.b,
            w_dist: self.w_dist.clone(),
        }
    }
}

/// A DCBM draw with its latent variables and the count of pair
/// probabilities clipped at 1.
#[derive(Debug, Clone)]
pub struct DcbmSample {
    pub graph: Graph,
    pub labels: Vec<u32>,
    pub weights: Vec<f64>,
    pub clipped: u64,
}

impl DcbmSample {
    /// Fraction of node pairs whose probability was clipped at 1. Above
    /// about 0.1% the parameters sit outside the model's intent.
    pub fn clip_fraction(&self) -> f64 {
        let pairs = crate::stats::choose2(self.graph.node_count());
        if pairs == 0 {
            0.0
        } else {
            self.clipped as f64 / pairs as f64
        }
    }
}

/// A neighborhood-model draw; `graph` has the ego as node 0 and the
/// ambient nodes shifted to 1..=n.
#[derive(Debug, Clone)]
pub struct NeighborhoodSample {
    pub graph: Graph,
    pub ambient: Graph,
    pub labels: Vec<u32>,
    pub weights: Vec<f64>,
    pub clipped: u64,
}

/// A Gaussian draw together with the latent (Z, W) that shaped its
/// covariance.
#[derive(Debug, Clone)]
pub struct GaussianSample {
    pub data: DataMatrix,
    pub labels: Vec<u32>,
    pub weights: Vec<f64>,
}

/// Erdos-Renyi graph: each of the C(n,2) pairs appears independently with
/// probability `p`.
pub fn sample_er(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = stream_rng(seed, STREAM_EDGES);
    let mut pairs = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.gen::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    Graph::from_edges(n, pairs)
}

fn draw_labels(n: usize, k: u32, seed: Seed) -> Vec<u32> {
    let mut rng = stream_rng(seed, STREAM_LABELS);
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

fn draw_weights(n: usize, dist: &WeightDistribution, seed: Seed) -> Vec<f64> {
    let mut rng = stream_rng(seed, STREAM_WEIGHTS);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// Degree-corrected SBM draw. Pair probabilities W_i W_j a (same label) or
/// W_i W_j b (different) are clipped at 1 with the clip count reported.
pub fn sample_dcbm(params: &DcbmParams, seed: Seed) -> Result<DcbmSample> {
    let n = params.n;
    let labels = draw_labels(n, params.k, seed);
    let weights = draw_weights(n, &params.w_dist, seed);
    let mut rng = stream_rng(seed, STREAM_EDGES);
    let mut pairs = Vec::new();
    let mut clipped = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let base = if labels[i] == labels[j] {
                params.a
            } else {
                params.b
            };
            let mut theta = weights[i] * weights[j] * base;
            if theta > 1.0 {
                theta = 1.0;
                clipped += 1;
            }
            // one uniform per pair even when theta is 0 or 1, so the edge
            // stream is insensitive to the parameter values
            if rng.gen::<f64>() < theta {
                pairs.push((i as u32, j as u32));
            }
        }
    }
    Ok(DcbmSample {
        graph: Graph::from_edges(n, pairs)?,
        labels,
        weights,
        clipped,
    })
}

/// SBM: the DCBM with W = 1.
pub fn sample_sbm(n: usize, k: u32, a: f64, b: f64, seed: Seed) -> Result<DcbmSample> {
    sample_dcbm(
        &DcbmParams::new(n, k, a, b, WeightDistribution::ConstantOne)?,
        seed,
    )
}

/// Configuration model: the DCBM with a single community.
pub fn sample_config(n: usize, a: f64, w_dist: WeightDistribution, seed: Seed) -> Result<DcbmSample> {
    sample_dcbm(&DcbmParams::new(n, 1, a, a, w_dist)?, seed)
}

/// Neighborhood model: ambient DCBM on n nodes plus an ego (node 0)
/// attached with probability `p` to nodes with labels in {0, .., r-1}.
pub fn sample_neighborhood_model(
    params: &NeighborhoodParams,
    seed: Seed,
) -> Result<NeighborhoodSample> {
    let ambient = sample_dcbm(&params.dcbm(), seed)?;
    let mut rng = stream_rng(seed, STREAM_EGO);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for i in 0..params.n {
        let attach = ambient.labels[i] < params.r && rng.gen::<f64>() < params.p;
        if attach {
            pairs.push((0, i as u32 + 1));
        }
    }
    pairs.extend(ambient.graph.edges().map(|(u, v)| (u + 1, v + 1)));
    let graph = Graph::from_edges(params.n + 1, pairs)?;
    Ok(NeighborhoodSample {
        graph,
        ambient: ambient.graph,
        labels: ambient.labels,
        weights: ambient.weights,
        clipped: ambient.clipped,
    })
}

/// Gaussian data with DCBM correlation structure: draw (Z, W) once over the
/// p variables, set Sigma to 1 on the diagonal and theta_jl off it, then
/// emit `n_samples` i.i.d. rows of N(0, Sigma) via Cholesky.
pub fn sample_gaussian_dcbm(
    n_samples: usize,
    params: &DcbmParams,
    seed: Seed,
) -> Result<GaussianSample> {
    if n_samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let p = params.n;
    let labels = draw_labels(p, params.k, seed);
    let weights = draw_weights(p, &params.w_dist, seed);
    let mut sigma = DMatrix::<f64>::identity(p, p);
    for j in 0..p {
        for l in (j + 1)..p {
            let base = if labels[j] == labels[l] {
                params.a
            } else {
                params.b
            };
            let theta = weights[j] * weights[l] * base;
            sigma[(j, l)] = theta;
            sigma[(l, j)] = theta;
        }
    }
    let chol = sigma.cholesky().ok_or_else(|| {
        Error::domain(
            "covariance is not positive definite; reduce |a|, |b| (the model assumes a, b = o(1))",
        )
    })?;
    let l = chol.l();
    let mut rng = stream_rng(seed, STREAM_GAUSS);
    let mut data = Vec::with_capacity(n_samples * p);
    let mut z = vec![0.0f64; p];
    for _ in 0..n_samples {
        for zj in z.iter_mut() {
            *zj = StandardNormal.sample(&mut rng);
        }
        // row = L z, lower-triangular product
        for j in 0..p {
            let mut acc = 0.0;
            for (m, zm) in z.iter().enumerate().take(j + 1) {
                acc += l[(j, m)] * zm;
            }
            data.push(acc);
        }
    }
    Ok(GaussianSample {
        data: DataMatrix::new(n_samples, p, data)?,
        labels,
        weights,
    })
}
