//! Hypothesis tests for global community structure, built on the
//! two- and three-node subgraph densities.
//!
//! The primary test rejects the configuration-model null (no communities,
//! arbitrary degree heterogeneity) using the variance-stabilized statistic
//! 2 sqrt(C(n,3)) (sqrt(T) - (V/E)^(3/2)), asymptotically N(delta, 1). The
//! companion tests target the SBM null (T vs E^3) and the Erdos-Renyi null
//! (chi-squared on the three-node frequency residuals).

use crate::error::{Error, Result};
use crate::generators::{DcbmParams, NeighborhoodParams};
use crate::graph::{neighborhood_subgraph, Graph, NodeId};
use crate::stats::{choose3, densities, ez_characteristic, three_node_frequencies, SubgraphDensities};

/// Which test produced a [`TestResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestId {
    EzDcbm,
    EzSbm,
    ErChi2,
    EzNeighborhood,
    EzGaussian,
}

impl TestId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestId::EzDcbm => "ez_dcbm",
            TestId::EzSbm => "ez_sbm",
            TestId::ErChi2 => "er_chi2",
            TestId::EzNeighborhood => "ez_neighborhood",
            TestId::EzGaussian => "ez_gaussian",
        }
    }
}

/// Null distribution the statistic is referred to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NullDist {
    StandardNormal,
    ChiSquared2,
}

/// Outcome of one hypothesis test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TestResult {
    pub test_id: TestId,
    pub statistic: f64,
    /// Two-sided for normal nulls, upper tail for the chi-squared null.
    pub p_value: f64,
    pub null: NullDist,
    /// The density triple the statistic was computed from. For the Gaussian
    /// test these are the Wick moment estimates and may leave [0, 1].
    pub densities: SubgraphDensities,
    pub notes: Vec<String>,
}

impl TestResult {
    /// Upper-tail one-sided p-value (normal nulls only; the chi-squared
    /// statistic is one-sided already).
    pub fn p_one_sided_upper(&self) -> f64 {
        match self.null {
            NullDist::StandardNormal => normal_sf(self.statistic),
            NullDist::ChiSquared2 => self.p_value,
        }
    }
}

/// Normalization of the EZ statistic from the central limit theorem. All
/// three are asymptotically N(delta, 1); the variance-stabilized form stays
/// defined when the triangle or vee count is zero and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EzNormalization {
    #[default]
    VarianceStabilized,
    /// chi / sqrt(T); undefined when T = 0.
    ByTriangle,
    /// chi / sqrt((V/E)^3); undefined when V = 0.
    ByVeeRatio,
}

/// Survival function of the standard normal, 1 - Phi(x).
pub fn normal_sf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Survival function of the chi-squared distribution with 2 degrees of
/// freedom, exp(-x/2).
pub fn chi2_2_sf(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::domain(format!(
            "chi-squared survival undefined for negative x = {x}"
        )));
    }
    Ok((-x / 2.0).exp())
}

fn two_sided_normal_p(stat: f64) -> f64 {
    (2.0 * normal_sf(stat.abs())).min(1.0)
}

fn density_regime_note(d: &SubgraphDensities) -> Option<String> {
    let bound = (d.n as f64).powf(-2.0 / 3.0);
    if d.e_hat > bound {
        Some(format!(
            "edge density {:.4} exceeds n^(-2/3) = {:.4}; asymptotic calibration is not guaranteed in this regime",
            d.e_hat, bound
        ))
    } else {
        None
    }
}

fn sign_note(stat: f64) -> Option<String> {
    if stat > 0.0 {
        Some("sign: assortative (triangle excess)".to_string())
    } else if stat < 0.0 {
        Some("sign: disassortative (triangle deficit)".to_string())
    } else {
        None
    }
}

/// EZ test of the configuration-model null on a graph, with the default
/// variance-stabilized normalization.
pub fn ez_test_dcbm(g: &Graph) -> Result<TestResult> {
    ez_test_dcbm_with(g, EzNormalization::VarianceStabilized)
}

/// EZ test with an explicit normalization choice.
pub fn ez_test_dcbm_with(g: &Graph, norm: EzNormalization) -> Result<TestResult> {
    let d = densities(g)?;
    if d.e_hat <= 0.0 {
        return Err(Error::domain(
            "EZ test undefined on empty graph (E = 0)",
        ));
    }
    let scale = (choose3(d.n) as f64).sqrt();
    let statistic = match norm {
        EzNormalization::VarianceStabilized => {
            // sqrt(0) = 0 keeps the statistic total on sparse graphs
            2.0 * scale * (d.t_hat.sqrt() - (d.v_hat / d.e_hat).powf(1.5))
        }
        EzNormalization::ByTriangle => {
            if d.t_hat <= 0.0 {
                return Err(Error::domain(
                    "triangle-normalized statistic undefined when T = 0",
                ));
            }
            scale * ez_characteristic(&d)? / d.t_hat.sqrt()
        }
        EzNormalization::ByVeeRatio => {
            if d.v_hat <= 0.0 {
                return Err(Error::domain(
                    "vee-normalized statistic undefined when V = 0",
                ));
            }
            scale * ez_characteristic(&d)? / (d.v_hat / d.e_hat).powf(1.5)
        }
    };
    let mut notes = Vec::new();
    notes.extend(sign_note(statistic));
    notes.extend(density_regime_note(&d));
    Ok(TestResult {
        test_id: TestId::EzDcbm,
        statistic,
        p_value: two_sided_normal_p(statistic),
        null: NullDist::StandardNormal,
        densities: d,
        notes,
    })
}

/// EZ test of the Erdos-Renyi/SBM null: 2 sqrt(C(n,3)) (sqrt(T) - E^(3/2)).
pub fn ez_test_sbm(g: &Graph) -> Result<TestResult> {
    let d = densities(g)?;
    let scale = (choose3(d.n) as f64).sqrt();
    let statistic = 2.0 * scale * (d.t_hat.sqrt() - d.e_hat.powf(1.5));
    let mut notes = Vec::new();
    notes.extend(sign_note(statistic));
    notes.extend(density_regime_note(&d));
    Ok(TestResult {
        test_id: TestId::EzSbm,
        statistic,
        p_value: two_sided_normal_p(statistic),
        null: NullDist::StandardNormal,
        densities: d,
        notes,
    })
}

/// Chi-squared test of the Erdos-Renyi null from the vee and triangle
/// frequency residuals against their p-hat plug-ins.
pub fn er_chi2_test(g: &Graph) -> Result<TestResult> {
    let d = densities(g)?;
    let f = three_node_frequencies(g)?;
    let p = f.p_hat;
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::domain(format!(
            "chi-squared ER test undefined for edge frequency p = {p}"
        )));
    }
    let q = 1.0 - p;
    let t2 = 3.0 * p * p * q - f.f2;
    let t3 = p.powi(3) - f.f3;
    let var2 = 3.0 * p.powi(2) * q.powi(2) * (1.0 - 3.0 * p).powi(2) + 9.0 * p.powi(3) * q.powi(3);
    let var3 = p.powi(3) * q.powi(3) + 3.0 * p.powi(4) * q.powi(2);
    if var2 <= 0.0 || var3 <= 0.0 {
        return Err(Error::domain(
            "chi-squared variance denominator underflowed to zero",
        ));
    }
    let statistic = choose3(d.n) as f64 * (t2 * t2 / var2 + t3 * t3 / var3);
    let mut notes = Vec::new();
    if p > 0.25 {
        notes.push(format!(
            "edge frequency p = {p:.4} > 0.25; the chi-squared asymptotics assume p = o(1)"
        ));
    }
    if (1.0 - 3.0 * p).powi(2) < 1e-4 {
        notes.push(format!(
            "p = {p:.4} is near 1/3 where the (1-3p)^2 variance factor vanishes; only the cubic term carries the vee variance"
        ));
    }
    Ok(TestResult {
        test_id: TestId::ErChi2,
        statistic,
        p_value: chi2_2_sf(statistic)?,
        null: NullDist::ChiSquared2,
        densities: d,
        notes,
    })
}

/// EZ test on the induced neighborhood of `ego`. The neighborhood-graph
/// estimators with C(m,2) and C(m,3) denominators are exactly the subgraph
/// densities of the induced subgraph, so this delegates to [`ez_test_dcbm`].
pub fn ez_test_neighborhood(g: &Graph, ego: NodeId) -> Result<TestResult> {
    let sub = neighborhood_subgraph(g, ego)?;
    let m = sub.node_count();
    if m < 3 {
        return Err(Error::domain(format!(
            "neighborhood too small (m = {m} < 3)"
        )));
    }
    let inner = ez_test_dcbm(&sub).map_err(|e| match e {
        Error::Domain(msg) if msg.contains("empty graph") => {
            Error::domain("neighborhood has no edges (E = 0)")
        }
        other => other,
    })?;
    let mut notes = vec![format!("ego {} neighborhood size m = {m}", ego.0)];
    notes.extend(inner.notes);
    Ok(TestResult {
        test_id: TestId::EzNeighborhood,
        notes,
        ..inner
    })
}

/// Finite-n plug-in for the non-centrality of the EZ statistic under a
/// DCBM alternative: ((k-1)(a-b)^3 / sqrt 6) (n / (k(a + (k-1)b)))^(3/2).
pub fn theoretical_delta_dcbm(params: &DcbmParams) -> Result<f64> {
    let k = params.k as f64;
    let denom = params.a + (k - 1.0) * params.b;
    if denom <= 0.0 {
        return Err(Error::domain(
            "non-centrality undefined: a + (k-1) b must be positive",
        ));
    }
    Ok((k - 1.0) * (params.a - params.b).powi(3) / 6f64.sqrt()
        * (params.n as f64 / (k * denom)).powf(1.5))
}

/// Neighborhood-model analogue with E m = n r p / k in place of n and r in
/// place of k. Recovers [`theoretical_delta_dcbm`] at r = k, p = 1.
pub fn theoretical_delta_neighborhood(params: &NeighborhoodParams) -> Result<f64> {
    let r = params.r as f64;
    let denom = params.a + (r - 1.0) * params.b;
    if denom <= 0.0 {
        return Err(Error::domain(
            "non-centrality undefined: a + (r-1) b must be positive",
        ));
    }
    let expected_m = params.n as f64 * r * params.p / params.k as f64;
    Ok((r - 1.0) * (params.a - params.b).powi(3) / 6f64.sqrt()
        * (expected_m / (r * denom)).powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::WeightDistribution;
    use crate::graph::Graph;

    fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                pairs.push((i, j));
            }
        }
        Graph::from_edges(n, pairs).unwrap()
    }

    #[test]
    fn normal_sf_values() {
        assert_eq!(normal_sf(0.0), 0.5);
        assert!((normal_sf(1.959964) - 0.025).abs() < 1e-6);
        assert!((normal_sf(-1.959964) - 0.975).abs() < 1e-6);
        // erfc route keeps absolute accuracy deep in the tail
        assert!((normal_sf(6.0) - 9.865876450377012e-10).abs() < 1e-12);
    }

    #[test]
    fn chi2_sf_values() {
        assert_eq!(chi2_2_sf(0.0).unwrap(), 1.0);
        assert!((chi2_2_sf(5.991465).unwrap() - 0.05).abs() < 1e-4);
        assert!(chi2_2_sf(-1.0).is_err());
    }

    #[test]
    fn k4_is_on_the_surface() {
        let r = ez_test_dcbm(&complete(4)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = ez_test_sbm(&complete(4)).unwrap();
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn ez_test_requires_edges() {
        assert!(ez_test_dcbm(&Graph::empty(5)).is_err());
        assert!(ez_test_dcbm(&Graph::empty(2)).is_err());
    }

    #[test]
    fn sbm_test_total_on_empty_graph() {
        // E = 0 and T = 0: the variance-stabilized form stays defined
        let r = ez_test_sbm(&Graph::empty(5)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn alternative_normalizations() {
        let g = complete(4);
        let a = ez_test_dcbm_with(&g, EzNormalization::ByTriangle).unwrap();
        let b = ez_test_dcbm_with(&g, EzNormalization::ByVeeRatio).unwrap();
        assert_eq!(a.statistic, 0.0);
        assert_eq!(b.statistic, 0.0);
        // T = 0 on a path: triangle normalization is undefined
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(ez_test_dcbm_with(&path, EzNormalization::ByTriangle).is_err());
        assert!(ez_test_dcbm_with(&path, EzNormalization::VarianceStabilized).is_ok());
    }

    #[test]
    fn chi2_rejects_degenerate_p() {
        assert!(er_chi2_test(&Graph::empty(4)).is_err());
        assert!(er_chi2_test(&complete(4)).is_err());
    }

    #[test]
    fn chi2_p_value_is_exp_half() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)])
            .unwrap();
        let r = er_chi2_test(&g).unwrap();
        assert!(r.statistic.is_finite() && r.statistic >= 0.0);
        assert_eq!(r.p_value, (-r.statistic / 2.0).exp());
    }

    #[test]
    fn neighborhood_of_k4_center() {
        // each ego of K4 sees a K3: statistic 0
        let r = ez_test_neighborhood(&complete(4), NodeId(0)).unwrap();
        assert_eq!(r.test_id, TestId::EzNeighborhood);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(r.notes[0].contains("m = 3"));
    }

    #[test]
    fn neighborhood_too_small() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let err = ez_test_neighborhood(&path, NodeId(0)).unwrap_err();
        assert!(err.to_string().contains("neighborhood too small"));
    }

    #[test]
    fn delta_dcbm_zero_cases() {
        let w = WeightDistribution::ConstantOne;
        let p = DcbmParams::new(500, 1, 0.05, 0.05, w.clone()).unwrap();
        assert_eq!(theoretical_delta_dcbm(&p).unwrap(), 0.0);
        let p = DcbmParams::new(1000, 3, 0.05, 0.05, w).unwrap();
        assert_eq!(theoretical_delta_dcbm(&p).unwrap(), 0.0);
    }

    #[test]
    fn delta_dcbm_plugin_value() {
        // ((0.03)^3 / sqrt 6) (1000 / (2 * 0.07))^(3/2), recomputed independently
        let p = DcbmParams::new(1000, 2, 0.05, 0.02, WeightDistribution::ConstantOne).unwrap();
        let d = theoretical_delta_dcbm(&p).unwrap();
        assert!((d - 6.654203607944131).abs() < 1e-12);
    }

    #[test]
    fn delta_dcbm_zero_denominator() {
        let p = DcbmParams::new(100, 2, 0.0, 0.0, WeightDistribution::ConstantOne).unwrap();
        assert!(theoretical_delta_dcbm(&p).is_err());
    }

    #[test]
    fn delta_neighborhood_cases() {
        let w = WeightDistribution::ConstantOne;
        let single = NeighborhoodParams::new(1000, 4, 1, 0.1, 0.05, 0.5, w.clone()).unwrap();
        assert_eq!(theoretical_delta_neighborhood(&single).unwrap(), 0.0);
        let flat = NeighborhoodParams::new(1000, 4, 3, 0.1, 0.1, 0.5, w.clone()).unwrap();
        assert_eq!(theoretical_delta_neighborhood(&flat).unwrap(), 0.0);
        // r = k, p = 1 recovers the DCBM non-centrality
        let ng = NeighborhoodParams::new(1000, 2, 2, 0.05, 0.02, 1.0, w.clone()).unwrap();
        let dcbm = DcbmParams::new(1000, 2, 0.05, 0.02, w).unwrap();
        let a = theoretical_delta_neighborhood(&ng).unwrap();
        let b = theoretical_delta_dcbm(&dcbm).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
