//! Undirected simple graphs, edge-list ingestion, ego neighborhoods, and
//! correlation graphs built from tabular data.

use crate::error::{Error, Result};

/// Index of a node, valid relative to one graph's node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Undirected simple graph on `n` labeled nodes.
///
/// No self-loops, no duplicate edges. Neighbor lists are kept sorted so
/// triangle counting can intersect them directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    m: u64,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Build from unordered node pairs. Duplicate pairs (in either order)
    /// collapse to one edge; self-loops and out-of-range ids are errors.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut norm: Vec<(u32, u32)> = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::domain(format!("self-loop at node {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::domain(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        for &(a, b) in &norm {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            adj,
            m: norm.len() as u64,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        self.m
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u.0 as usize].len()
    }

    /// Sorted neighbor ids of `u`.
    pub fn neighbors(&self, u: NodeId) -> &[u32] {
        &self.adj[u.0 as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as pairs (u, v) with u < v, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = u as u32;
            nbrs.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n as u32).map(NodeId)
    }

    /// Plain-text edge list, one "u v" line per edge, ascending order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Node numbering convention of an input edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexBase {
    #[default]
    Zero,
    One,
}

/// Options controlling [`parse_edge_list`].
#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub index_base: IndexBase,
    /// Treat `#`-prefixed lines as comments (otherwise they are malformed).
    pub allow_comments: bool,
    /// Override the max-id node count, e.g. to keep trailing isolated nodes.
    pub explicit_n: Option<usize>,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            index_base: IndexBase::Zero,
            allow_comments: true,
            explicit_n: None,
        }
    }
}

/// Result of parsing an edge list: the graph plus ingestion diagnostics.
#[derive(Debug, Clone)]
pub struct ParsedEdgeList {
    pub graph: Graph,
    /// Self-loop lines dropped during ingestion.
    pub self_loops_dropped: usize,
}

/// Parse a whitespace-separated two-column edge list.
///
/// The node count is `1 + max id` seen after re-basing to 0 unless
/// `explicit_n` overrides it. Duplicate lines and reversed pairs collapse
/// to one edge; self-loops are dropped and counted.
pub fn parse_edge_list(text: &str, options: &EdgeListOptions) -> Result<ParsedEdgeList> {
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut self_loops = 0usize;
    let mut max_id: Option<u32> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if options.allow_comments {
                continue;
            }
            return Err(Error::parse(line_no, "comment line not allowed"));
        }
        let mut tokens = line.split_whitespace();
        let a = parse_id(tokens.next(), line_no, options.index_base)?;
        let b = parse_id(tokens.next(), line_no, options.index_base)?;
        if tokens.next().is_some() {
            return Err(Error::parse(line_no, "expected exactly two integer tokens"));
        }
        max_id = Some(max_id.map_or(a.max(b), |m| m.max(a).max(b)));
        if a == b {
            self_loops += 1;
            continue;
        }
        pairs.push((a, b));
    }
    let seen_n = max_id.map_or(0, |m| m as usize + 1);
    let n = match options.explicit_n {
        Some(n) => {
            if n < seen_n {
                return Err(Error::domain(format!(
                    "explicit node count {n} is below max id + 1 = {seen_n}"
                )));
            }
            n
        }
        None => seen_n,
    };
    let graph = Graph::from_edges(n, pairs)?;
    Ok(ParsedEdgeList {
        graph,
        self_loops_dropped: self_loops,
    })
}

fn parse_id(token: Option<&str>, line_no: usize, base: IndexBase) -> Result<u32> {
    let tok = token.ok_or_else(|| Error::parse(line_no, "expected two integer tokens"))?;
    let id: i64 = tok
        .parse()
        .map_err(|_| Error::parse(line_no, format!("malformed integer token {tok:?}")))?;
    let rebased = match base {
        IndexBase::Zero => id,
        IndexBase::One => id - 1,
    };
    if rebased < 0 {
        return Err(Error::parse(
            line_no,
            format!("node id {id} is negative after re-basing"),
        ));
    }
    u32::try_from(rebased).map_err(|_| Error::parse(line_no, format!("node id {id} too large")))
}

/// Induced subgraph on the neighbors of `ego` (the ego itself excluded),
/// with nodes relabeled 0..m-1 in ascending original-id order.
pub fn neighborhood_subgraph(g: &Graph, ego: NodeId) -> Result<Graph> {
    if ego.0 as usize >= g.node_count() {
        return Err(Error::domain(format!(
            "ego {} out of range for n = {}",
            ego.0,
            g.node_count()
        )));
    }
    let members = g.neighbors(ego); // sorted
    let m = members.len();
    let mut pairs = Vec::new();
    for (new_u, &u) in members.iter().enumerate() {
        for &w in g.neighbors(NodeId(u)) {
            if w <= u || w == ego.0 {
                continue;
            }
            if let Ok(new_w) = members.binary_search(&w) {
                pairs.push((new_u as u32, new_w as u32));
            }
        }
    }
    Graph::from_edges(m, pairs)
}

/// n x p matrix of real observations, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("data matrix must be non-empty"));
        }
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "data length {} does not match {rows} x {cols}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite entry at row {}, column {}",
                bad / cols,
                bad % cols
            )));
        }
        Ok(DataMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    /// Parse a comma-separated matrix. A non-numeric first cell marks the
    /// first row as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut width: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if rows.is_empty() && width.is_none() && cells[0].parse::<f64>().is_err() {
                width = Some(cells.len()); // header row
                continue;
            }
            let mut row = Vec::with_capacity(cells.len());
            for cell in &cells {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::parse(line_no, format!("malformed numeric cell {cell:?}"))
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(line_no, format!("non-finite cell {cell:?}")));
                }
                row.push(v);
            }
            match width {
                Some(w) if w != row.len() => {
                    return Err(Error::parse(
                        line_no,
                        format!("expected {w} columns, found {}", row.len()),
                    ));
                }
                None => width = Some(row.len()),
                _ => {}
            }
            rows.push(row);
        }
        let cols = width.ok_or_else(|| Error::domain("empty data matrix"))?;
        let nrows = rows.len();
        DataMatrix::new(nrows, cols, rows.into_iter().flatten().collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.cols {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("x{j}"));
        }
        out.push('\n');
        for i in 0..self.rows {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Correlation method for [`correlation_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    /// Rank correlation; ties receive average ranks.
    Spearman,
}

/// Graph on the p columns of `d`, with an edge wherever the pairwise
/// correlation strictly exceeds `threshold`.
pub fn correlation_graph(
    d: &DataMatrix,
    threshold: f64,
    method: CorrelationMethod,
) -> Result<Graph> {
    if !(threshold > -1.0 && threshold < 1.0) {
        return Err(Error::domain(format!(
            "correlation threshold {threshold} outside (-1, 1)"
        )));
    }
    if d.rows() < 3 {
        return Err(Error::domain("correlation graph needs at least 3 rows"));
    }
    let p = d.cols();
    let n = d.rows();
    // Pre-extract columns (ranked for Spearman), centered and normalized.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for j in 0..p {
        let raw: Vec<f64> = d.column(j).collect();
        let values = match method {
            CorrelationMethod::Pearson => raw,
            CorrelationMethod::Spearman => average_ranks(&raw),
        };
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::domain(format!(
                "column {j} is constant; correlation undefined"
            )));
        }
        for v in &mut centered {
            *v /= norm;
        }
        cols.push(centered);
    }
    let mut pairs = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let corr: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            if corr > threshold {
                pairs.push((i as u32, j as u32));
            }
        }
    }
    Graph::from_edges(p, pairs)
}

/// Ranks 1..n with ties replaced by the average rank of the tied group.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic() {
        let parsed = parse_edge_list("0 1\n1 2\n", &EdgeListOptions::default()).unwrap();
        assert_eq!(parsed.graph.node_count(), 3);
        assert_eq!(parsed.graph.edge_count(), 2);
        assert!(parsed.graph.has_edge(0, 1));
        assert!(parsed.graph.has_edge(1, 2));
        assert!(!parsed.graph.has_edge(0, 2));
        assert_eq!(parsed.self_loops_dropped, 0);
    }

    #[test]
    fn parse_one_based_dedupe_self_loop() {
        let opts = EdgeListOptions {
            index_base: IndexBase::One,
            ..Default::default()
        };
        let parsed = parse_edge_list("1 2\n2 1\n1 1\n", &opts).unwrap();
        assert_eq!(parsed.graph.node_count(), 2);
        assert_eq!(parsed.graph.edge_count(), 1);
        assert_eq!(parsed.self_loops_dropped, 1);
    }

    #[test]
    fn parse_malformed_token() {
        let err = parse_edge_list("0 x\n", &EdgeListOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_negative_after_rebase() {
        let opts = EdgeListOptions {
            index_base: IndexBase::One,
            ..Default::default()
        };
        let err = parse_edge_list("0 1\n", &opts).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn parse_comments_and_explicit_n() {
        let opts = EdgeListOptions {
            explicit_n: Some(6),
            ..Default::default()
        };
        let parsed = parse_edge_list("# header\n0 1\n", &opts).unwrap();
        assert_eq!(parsed.graph.node_count(), 6);
        assert_eq!(parsed.graph.edge_count(), 1);
    }

    #[test]
    fn roundtrip_serialization() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 4)]).unwrap();
        let opts = EdgeListOptions {
            explicit_n: Some(5),
            ..Default::default()
        };
        let back = parse_edge_list(&g.to_edge_list(), &opts).unwrap();
        assert_eq!(back.graph, g);
    }

    #[test]
    fn neighborhood_triangle() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let sub = neighborhood_subgraph(&g, NodeId(0)).unwrap();
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert!(sub.has_edge(0, 1));
    }

    #[test]
    fn neighborhood_star_center() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let sub = neighborhood_subgraph(&g, NodeId(0)).unwrap();
        assert_eq!(sub.node_count(), 4);
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn neighborhood_path_end() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let sub = neighborhood_subgraph(&g, NodeId(2)).unwrap();
        assert_eq!(sub.node_count(), 1);
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn neighborhood_ego_out_of_range() {
        let g = Graph::empty(3);
        assert!(neighborhood_subgraph(&g, NodeId(3)).is_err());
    }

    #[test]
    fn csv_header_detection() {
        let d = DataMatrix::from_csv("a,b\n1.0,2.0\n3.0,4.0\n").unwrap();
        assert_eq!((d.rows(), d.cols()), (2, 2));
        assert_eq!(d.get(1, 0), 3.0);
        let d2 = DataMatrix::from_csv("1,2\n3,4\n").unwrap();
        assert_eq!(d2.rows(), 2);
        assert!(DataMatrix::from_csv("1,2\n3,oops\n").is_err());
        assert!(DataMatrix::from_csv("1,2\n3\n").is_err());
    }

    #[test]
    fn correlation_identical_columns() {
        // two identical columns, threshold 0.45 -> edge
        let d = DataMatrix::new(4, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 5.0, 5.0]).unwrap();
        let g = correlation_graph(&d, 0.45, CorrelationMethod::Pearson).unwrap();
        assert!(g.has_edge(0, 1));
        let gs = correlation_graph(&d, 0.45, CorrelationMethod::Spearman).unwrap();
        assert!(gs.has_edge(0, 1));
    }

    #[test]
    fn correlation_orthogonal_columns() {
        // second column orthogonal to first by construction: corr = 0
        let d = DataMatrix::new(4, 2, vec![1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]).unwrap();
        let g = correlation_graph(&d, 0.45, CorrelationMethod::Pearson).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn correlation_negated_column() {
        // cols 0 and 1 identical, col 2 their negation; threshold 0.9
        let mut data = Vec::new();
        for v in [1.0, 2.0, 4.0, 8.0] {
            data.extend([v, v, -v]);
        }
        let d = DataMatrix::new(4, 3, data).unwrap();
        let g = correlation_graph(&d, 0.9, CorrelationMethod::Pearson).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn correlation_constant_column_named() {
        let d = DataMatrix::new(3, 2, vec![1.0, 7.0, 2.0, 7.0, 3.0, 7.0]).unwrap();
        let err = correlation_graph(&d, 0.5, CorrelationMethod::Spearman).unwrap_err();
        assert!(err.to_string().contains("column 1"));
    }

    #[test]
    fn spearman_average_ranks_for_ties() {
        let r = average_ranks(&[2.0, 1.0, 2.0, 3.0]);
        assert_eq!(r, vec![2.5, 1.0, 2.5, 4.0]);
    }
}
