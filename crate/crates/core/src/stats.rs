//! Empirical two- and three-node subgraph statistics.
//!
//! Counts are accumulated exactly in 64-bit integers and divided at the
//! end, so the fast path and the brute-force oracle agree bit for bit.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use rayon::prelude::*;

/// Edge, vee, and triangle densities of a graph on `n >= 3` nodes.
///
/// `e_hat` is the fraction of the C(n,2) node pairs joined by an edge;
/// `v_hat` and `t_hat` are the two-path and triangle frequencies over the
/// C(n,3) node triples (a triple supporting three two-paths contributes
/// 3/3, so `t_hat <= v_hat` always).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SubgraphDensities {
    pub e_hat: f64,
    pub v_hat: f64,
    pub t_hat: f64,
    pub n: usize,
}

/// Relative frequencies of the four three-node subgraphs, by edge count,
/// plus the empirical edge frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeNodeFrequencies {
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub p_hat: f64,
}

/// Raw counts behind the densities: edges, two-paths (cherries), triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgraphCounts {
    pub edges: u64,
    pub cherries: u64,
    pub triangles: u64,
}

pub(crate) fn choose2(n: usize) -> u64 {
    if n < 2 {
        return 0;
    }
    let n = n as u64;
    n * (n - 1) / 2
}

pub(crate) fn choose3(n: usize) -> u64 {
    if n < 3 {
        return 0;
    }
    let n = n as u128;
    (n * (n - 1) * (n - 2) / 6) as u64
}

// Above this many edges the per-edge intersections run on the rayon pool;
// integer accumulation keeps the result independent of thread count.
const PAR_EDGE_THRESHOLD: u64 = 200_000;

/// Exact subgraph counts via degree sums and per-edge sorted-neighbor
/// intersections; never materializes a dense matrix power.
pub fn subgraph_counts(g: &Graph) -> SubgraphCounts {
    let cherries: u64 = g
        .nodes()
        .map(|u| {
            let d = g.degree(u) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();

    let tri_for_node = |u: NodeId| -> u64 {
        let mut local = 0u64;
        let nbrs = g.neighbors(u);
        for &v in nbrs {
            if v <= u.0 {
                continue;
            }
            // common neighbors w with w > v close a triangle u < v < w
            local += intersect_above(nbrs, g.neighbors(NodeId(v)), v);
        }
        local
    };

    let triangles: u64 = if g.edge_count() > PAR_EDGE_THRESHOLD {
        (0..g.node_count() as u32)
            .into_par_iter()
            .map(|u| tri_for_node(NodeId(u)))
            .sum()
    } else {
        g.nodes().map(tri_for_node).sum()
    };

    SubgraphCounts {
        edges: g.edge_count(),
        cherries,
        triangles,
    }
}

/// Number of values > `above` present in both sorted slices.
fn intersect_above(a: &[u32], b: &[u32], above: u32) -> u64 {
    let mut i = a.partition_point(|&x| x <= above);
    let mut j = b.partition_point(|&x| x <= above);
    let mut count = 0u64;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Empirical (edge, vee, triangle) densities of `g`.
pub fn densities(g: &Graph) -> Result<SubgraphDensities> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::domain("three-node statistics undefined for n < 3"));
    }
    let c = subgraph_counts(g);
    Ok(SubgraphDensities {
        e_hat: c.edges as f64 / choose2(n) as f64,
        v_hat: c.cherries as f64 / (3 * choose3(n)) as f64,
        t_hat: c.triangles as f64 / choose3(n) as f64,
        n,
    })
}

/// O(n^3) reference implementation by literal sums over node triples.
/// Intended for tests and small graphs only.
pub fn densities_oracle(g: &Graph) -> Result<SubgraphDensities> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::domain("three-node statistics undefined for n < 3"));
    }
    let mut edges = 0u64;
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            edges += g.has_edge(i, j) as u64;
        }
    }
    let mut cherries = 0u64;
    let mut triangles = 0u64;
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            for l in (j + 1)..n as u32 {
                let ij = g.has_edge(i, j) as u64;
                let il = g.has_edge(i, l) as u64;
                let jl = g.has_edge(j, l) as u64;
                cherries += ij * il + ij * jl + il * jl;
                triangles += ij * il * jl;
            }
        }
    }
    Ok(SubgraphDensities {
        e_hat: edges as f64 / choose2(n) as f64,
        v_hat: cherries as f64 / (3 * choose3(n)) as f64,
        t_hat: triangles as f64 / choose3(n) as f64,
        n,
    })
}

/// All four three-node frequencies plus the edge frequency.
///
/// Computed from integer counts via the identities
/// f3 = T, f2 = 3(V - T), f1 = 3p - 2 f2 - 3 f3, f0 = 1 - f1 - f2 - f3
/// (the triple count form keeps each frequency an exact rational).
pub fn three_node_frequencies(g: &Graph) -> Result<ThreeNodeFrequencies> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::domain("three-node statistics undefined for n < 3"));
    }
    let c = subgraph_counts(g);
    let triples = choose3(n);
    // Each edge lies in n-2 triples; subtract doubled cherries and restore
    // the triangles counted three times with the wrong sign. Additions come
    // first so the u64 arithmetic never dips below zero.
    let f1_count = (n as u64 - 2) * c.edges + 3 * c.triangles - 2 * c.cherries;
    let f2_count = c.cherries - 3 * c.triangles;
    let f3_count = c.triangles;
    let f0_count = triples - f1_count - f2_count - f3_count;
    Ok(ThreeNodeFrequencies {
        f0: f0_count as f64 / triples as f64,
        f1: f1_count as f64 / triples as f64,
        f2: f2_count as f64 / triples as f64,
        f3: f3_count as f64 / triples as f64,
        p_hat: c.edges as f64 / choose2(n) as f64,
    })
}

/// The EZ characteristic T - (V/E)^3, zero for every configuration model.
pub fn ez_characteristic(d: &SubgraphDensities) -> Result<f64> {
    if d.e_hat <= 0.0 {
        return Err(Error::domain(
            "EZ characteristic undefined on empty graph (E = 0)",
        ));
    }
    let ratio = d.v_hat / d.e_hat;
    Ok(d.t_hat - ratio.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n as u32 - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut pairs: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        pairs.push((0, n as u32 - 1));
        Graph::from_edges(n, pairs).unwrap()
    }

    #[test]
    fn triangle_densities() {
        let d = densities(&complete(3)).unwrap();
        assert_eq!((d.e_hat, d.v_hat, d.t_hat), (1.0, 1.0, 1.0));
    }

    #[test]
    fn path_densities() {
        let d = densities(&path(3)).unwrap();
        assert_eq!(d.e_hat, 2.0 / 3.0);
        assert_eq!(d.v_hat, 1.0 / 3.0);
        assert_eq!(d.t_hat, 0.0);
    }

    #[test]
    fn five_cycle_densities() {
        // brute-force enumeration of the C(5,3) = 10 triples gives
        // 5 cherries, 0 triangles
        let d = densities(&cycle(5)).unwrap();
        assert_eq!(d.e_hat, 0.5);
        assert_eq!(d.v_hat, 1.0 / 6.0);
        assert_eq!(d.t_hat, 0.0);
        let o = densities_oracle(&cycle(5)).unwrap();
        assert_eq!(d, o);
    }

    #[test]
    fn empty_graph_densities() {
        let d = densities(&Graph::empty(4)).unwrap();
        assert_eq!((d.e_hat, d.v_hat, d.t_hat), (0.0, 0.0, 0.0));
    }

    #[test]
    fn oracle_complete_k4() {
        let d = densities_oracle(&complete(4)).unwrap();
        assert_eq!((d.e_hat, d.v_hat, d.t_hat), (1.0, 1.0, 1.0));
    }

    #[test]
    fn oracle_single_edge() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let d = densities_oracle(&g).unwrap();
        assert_eq!((d.e_hat, d.v_hat, d.t_hat), (1.0 / 3.0, 0.0, 0.0));
    }

    #[test]
    fn small_n_rejected() {
        assert!(densities(&Graph::empty(2)).is_err());
        assert!(densities_oracle(&Graph::empty(0)).is_err());
        assert!(three_node_frequencies(&Graph::empty(2)).is_err());
    }

    #[test]
    fn frequencies_triangle() {
        let f = three_node_frequencies(&complete(3)).unwrap();
        assert_eq!((f.f0, f.f1, f.f2, f.f3, f.p_hat), (0.0, 0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn frequencies_empty() {
        let f = three_node_frequencies(&Graph::empty(5)).unwrap();
        assert_eq!((f.f0, f.f1, f.f2, f.f3, f.p_hat), (1.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn frequencies_path() {
        let f = three_node_frequencies(&path(3)).unwrap();
        assert_eq!((f.f0, f.f1, f.f2, f.f3), (0.0, 0.0, 1.0, 0.0));
        assert_eq!(f.p_hat, 2.0 / 3.0);
    }

    #[test]
    fn ez_characteristic_examples() {
        let d = densities(&complete(4)).unwrap();
        assert_eq!(ez_characteristic(&d).unwrap(), 0.0);
        let d = densities(&path(3)).unwrap();
        assert_eq!(ez_characteristic(&d).unwrap(), -0.125);
        // ER population values (p, p^2, p^3) sit on the EZ surface
        let p = 0.37;
        let pop = SubgraphDensities {
            e_hat: p,
            v_hat: p * p,
            t_hat: p * p * p,
            n: 100,
        };
        assert!(ez_characteristic(&pop).unwrap().abs() < 1e-16);
    }

    #[test]
    fn ez_characteristic_empty_graph_errors() {
        let d = densities(&Graph::empty(4)).unwrap();
        assert!(ez_characteristic(&d).is_err());
    }

    #[test]
    fn isolated_node_shrinks_densities() {
        // same counts, larger denominators
        let g = complete(4);
        let mut with_isolated_pairs: Vec<(u32, u32)> = g.edges().collect();
        with_isolated_pairs.sort_unstable();
        let g5 = Graph::from_edges(5, with_isolated_pairs).unwrap();
        let d4 = densities(&g).unwrap();
        let d5 = densities(&g5).unwrap();
        assert!(d5.e_hat < d4.e_hat);
        assert!(d5.v_hat < d4.v_hat);
        assert!(d5.t_hat < d4.t_hat);
    }
}
