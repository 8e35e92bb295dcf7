//! Tests for global community structure in networks and multivariate
//! Gaussian data, using only two- and three-node subgraph statistics.
//!
//! The crate provides:
//!
//! - [`graph`]: undirected simple graphs, edge-list and CSV ingestion, ego
//!   neighborhoods, and correlation graphs from tabular data;
//! - [`stats`]: exact edge/vee/triangle densities with a sparse fast path
//!   and a brute-force oracle, three-node subgraph frequencies, and the EZ
//!   characteristic T - (V/E)^3;
//! - [`hypothesis`]: the EZ tests against configuration-model and SBM
//!   nulls, the chi-squared test against the Erdos-Renyi null, the
//!   ego-neighborhood test, and closed-form non-centrality calculators;
//! - [`gaussian`]: the Wick-formula EZ test for correlation structure in
//!   multivariate Gaussian samples;
//! - [`generators`]: seeded, stream-split samplers for every model used as
//!   a null or alternative;
//! - [`simulate`]: reproducible Monte Carlo size/power studies.

pub mod error;
pub mod gaussian;
pub mod generators;
pub mod graph;
pub mod hypothesis;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use gaussian::{
    ez_test_gaussian, ez_test_gaussian_with, gaussian_moments, gaussian_variance,
    standardize_columns, theoretical_delta_gaussian, GaussianMoments, GaussianOptions,
    GaussianVariance, SampleMoments,
};
pub use generators::{
    child_seed, sample_config, sample_dcbm, sample_er, sample_gaussian_dcbm,
    sample_neighborhood_model, sample_sbm, DcbmParams, DcbmSample, GaussianSample,
    NeighborhoodParams, NeighborhoodSample, Seed, WeightDistribution,
};
pub use graph::{
    correlation_graph, neighborhood_subgraph, parse_edge_list, CorrelationMethod, DataMatrix,
    EdgeListOptions, Graph, IndexBase, NodeId, ParsedEdgeList,
};
pub use hypothesis::{
    chi2_2_sf, er_chi2_test, ez_test_dcbm, ez_test_dcbm_with, ez_test_neighborhood, ez_test_sbm,
    normal_sf, theoretical_delta_dcbm, theoretical_delta_neighborhood, EzNormalization, NullDist,
    TestId, TestResult,
};
pub use simulate::{ks_critical, ks_distance, run_simulation, Model, SimTest, SimulationReport};
pub use stats::{
    densities, densities_oracle, ez_characteristic, subgraph_counts, three_node_frequencies,
    SubgraphCounts, SubgraphDensities, ThreeNodeFrequencies,
};
