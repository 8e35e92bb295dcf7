//! EZ test for community structure in the correlations of multivariate
//! Gaussian data.
//!
//! Wick's formula turns products of Gaussian coordinates into unbiased
//! per-sample estimates of the population edge, vee, and triangle moments
//! (E, V, T) of the latent correlation model. The studentized statistic
//! sqrt(n) (T - (V/E)^3) / sigma is asymptotically N(delta, 1).
//!
//! Per-sample symmetric sums are reduced to power sums of the row, an
//! O(p) evaluation per sample; the reduction is checked against literal
//! triple sums in the tests.

use crate::error::{Error, Result};
use crate::graph::DataMatrix;
use crate::hypothesis::{normal_sf, NullDist, TestId, TestResult};
use crate::stats::SubgraphDensities;
use rayon::prelude::*;

/// Wick-formula estimates (E_i, V_i, T_i) for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub e: f64,
    pub v: f64,
    pub t: f64,
}

/// Per-sample moment estimates and their means.
#[derive(Debug, Clone)]
pub struct GaussianMoments {
    pub e_hat: f64,
    pub v_hat: f64,
    pub t_hat: f64,
    pub per_sample: Vec<SampleMoments>,
    /// Sample count.
    pub n: usize,
    /// Variable count.
    pub p: usize,
}

/// The linearization-based variance estimate behind the studentized
/// statistic.
#[derive(Debug, Clone)]
pub struct GaussianVariance {
    pub sigma2_hat: f64,
    pub q_values: Vec<f64>,
}

/// Options for [`ez_test_gaussian_with`].
#[derive(Debug, Clone, Copy)]
pub struct GaussianOptions {
    /// Center each column and scale it to unit sample variance first. The
    /// model assumes unit-variance coordinates, which raw data rarely
    /// satisfies; disable for data that is already standardized.
    pub standardize: bool,
}

impl Default for GaussianOptions {
    fn default() -> Self {
        GaussianOptions { standardize: true }
    }
}

fn sample_moments_from_row(row: &[f64], cp2: f64, cp3: f64) -> SampleMoments {
    let (mut s1, mut s2, mut s3, mut s4, mut s6) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    for &x in row {
        let x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        s6 += x2 * x2 * x2;
    }
    let e = (s1 * s1 - s2) / (2.0 * cp2);
    // sum over j<l<m of the three X^2 X X arrangements
    let vee_sym = ((s1 * s1 - s2) * s2 - 2.0 * s1 * s3 + 2.0 * s4) / 2.0;
    let v = vee_sym / (6.0 * cp3) - e / 2.0;
    // elementary symmetric sums of the squared row
    let sq_triples = (s2 * s2 * s2 - 3.0 * s2 * s4 + 2.0 * s6) / 6.0;
    let sq_pairs = (s2 * s2 - s4) / 2.0;
    let t = sq_triples / (8.0 * cp3) - 3.0 * sq_pairs / (8.0 * cp2) + 0.25;
    SampleMoments { e, v, t }
}

/// Per-sample Wick moment estimates for every row of `d`, plus their means.
pub fn gaussian_moments(d: &DataMatrix) -> Result<GaussianMoments> {
    let p = d.cols();
    let n = d.rows();
    if p < 3 {
        return Err(Error::domain("Gaussian moments need at least 3 variables"));
    }
    if n < 2 {
        return Err(Error::domain("Gaussian moments need at least 2 samples"));
    }
    let cp2 = crate::stats::choose2(p) as f64;
    let cp3 = crate::stats::choose3(p) as f64;
    let per_sample: Vec<SampleMoments> = if n >= 4096 {
        (0..n)
            .into_par_iter()
            .map(|i| sample_moments_from_row(d.row(i), cp2, cp3))
            .collect()
    } else {
        (0..n)
            .map(|i| sample_moments_from_row(d.row(i), cp2, cp3))
            .collect()
    };
    // fixed summation order regardless of how the rows were computed
    let (mut se, mut sv, mut st) = (0.0f64, 0.0, 0.0);
    for m in &per_sample {
        se += m.e;
        sv += m.v;
        st += m.t;
    }
    let nf = n as f64;
    Ok(GaussianMoments {
        e_hat: se / nf,
        v_hat: sv / nf,
        t_hat: st / nf,
        per_sample,
        n,
        p,
    })
}

/// Variance estimate sigma^2 = Var(Q_i) with
/// Q_i = T_i - 3 (V^2/E^3) V_i + 3 (V^3/E^4) E_i.
pub fn gaussian_variance(m: &GaussianMoments) -> Result<GaussianVariance> {
    if m.e_hat == 0.0 {
        return Err(Error::domain(
            "variance estimator undefined when the edge moment is 0",
        ));
    }
    if m.n < 2 {
        return Err(Error::domain("variance estimator needs n >= 2 samples"));
    }
    let cv = 3.0 * m.v_hat.powi(2) / m.e_hat.powi(3);
    let ce = 3.0 * m.v_hat.powi(3) / m.e_hat.powi(4);
    let q_values: Vec<f64> = m
        .per_sample
        .iter()
        .map(|s| s.t - cv * s.v + ce * s.e)
        .collect();
    let mean = q_values.iter().sum::<f64>() / m.n as f64;
    let sigma2_hat =
        q_values.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (m.n as f64 - 1.0);
    Ok(GaussianVariance {
        sigma2_hat,
        q_values,
    })
}

/// Copy of `d` with each column centered and scaled to unit sample
/// variance. Constant columns are an error.
pub fn standardize_columns(d: &DataMatrix) -> Result<DataMatrix> {
    let (n, p) = (d.rows(), d.cols());
    if n < 2 {
        return Err(Error::domain("standardization needs at least 2 rows"));
    }
    let mut out = vec![0.0f64; n * p];
    for j in 0..p {
        let mean = d.column(j).sum::<f64>() / n as f64;
        let var = d.column(j).map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        if var <= 0.0 {
            return Err(Error::domain(format!(
                "column {j} is constant; cannot standardize"
            )));
        }
        let sd = var.sqrt();
        for i in 0..n {
            out[i * p + j] = (d.get(i, j) - mean) / sd;
        }
    }
    DataMatrix::new(n, p, out)
}

/// Gaussian EZ test with default options (columns standardized first).
pub fn ez_test_gaussian(d: &DataMatrix) -> Result<TestResult> {
    ez_test_gaussian_with(d, GaussianOptions::default())
}

/// Gaussian EZ test: statistic sqrt(n) (T - (V/E)^3) / sigma against a
/// standard normal null.
pub fn ez_test_gaussian_with(d: &DataMatrix, options: GaussianOptions) -> Result<TestResult> {
    let standardized;
    let input = if options.standardize {
        standardized = standardize_columns(d)?;
        &standardized
    } else {
        d
    };
    let m = gaussian_moments(input)?;
    if m.e_hat == 0.0 {
        return Err(Error::domain("EZ statistic undefined when E = 0"));
    }
    let var = gaussian_variance(&m)?;
    if var.sigma2_hat <= 0.0 {
        return Err(Error::domain("degenerate variance (all Q_i equal)"));
    }
    let chi = m.t_hat - (m.v_hat / m.e_hat).powi(3);
    let statistic = (m.n as f64).sqrt() * chi / var.sigma2_hat.sqrt();
    let p_value = (2.0 * normal_sf(statistic.abs())).min(1.0);
    let notes = vec![
        if options.standardize {
            "columns standardized to zero mean, unit variance".to_string()
        } else {
            "columns used as provided (no standardization)".to_string()
        },
        format!("sigma2_hat = {:.6e}", var.sigma2_hat),
    ];
    Ok(TestResult {
        test_id: TestId::EzGaussian,
        statistic,
        p_value,
        null: NullDist::StandardNormal,
        densities: SubgraphDensities {
            e_hat: m.e_hat,
            v_hat: m.v_hat,
            t_hat: m.t_hat,
            n: m.n,
        },
        notes,
    })
}

/// Finite-n plug-in for the non-centrality of the Gaussian EZ statistic:
/// sqrt(n) (k-1)(a-b)^3 / (k^3 sqrt((9/32)(a^2/k + (k-1) b^2 / k))).
pub fn theoretical_delta_gaussian(k: u32, a: f64, b: f64, n: usize) -> Result<f64> {
    let kf = k as f64;
    let scale = 9.0 / 32.0 * (a * a / kf + (kf - 1.0) * b * b / kf);
    if scale <= 0.0 {
        return Err(Error::domain(
            "non-centrality undefined when a = b = 0 (zero denominator)",
        ));
    }
    Ok((n as f64).sqrt() * (kf - 1.0) * (a - b).powi(3) / (kf.powi(3) * scale.sqrt()))
}
