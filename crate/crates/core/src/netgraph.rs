//! Undirected simple graphs, the regular / small-world / random generator
//! families, and the two small-world metrics: clustering coefficient `C` and
//! characteristic path length `L`.
//!
//! ```
//! use museum_swn::netgraph::{ring_lattice, ws_rewire, clustering_coefficient};
//!
//! let lattice = ring_lattice(20, 4).unwrap();
//! assert_eq!(clustering_coefficient(&lattice), 0.5);
//!
//! let sw = ws_rewire(&lattice, 0.1, 7).unwrap();
//! assert_eq!(sw.edge_count(), lattice.edge_count());
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("path length needs at least two nodes")]
    TooFewNodes,
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Undirected simple graph over nodes `0..node_count`.
///
/// Adjacency lists are kept sorted, so neighbor iteration and edge iteration
/// are in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Edgeless graph with `node_count` nodes.
    pub fn new(node_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(node_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_node(&self, node: usize) -> Result<(), GraphError> {
        if node >= self.adj.len() {
            return Err(GraphError::NodeOutOfRange {
                node,
                node_count: self.adj.len(),
            });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => self.adj[u].insert(pos, v),
        }
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.edge_count += 1;
        Ok(())
    }

    /// Removes `{u, v}`; returns whether the edge was present.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.adj.len() || v >= self.adj.len() {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("adjacency is symmetric");
                self.adj[v].remove(pos);
                self.edge_count -= 1;
                true
            }
            Err(_) => false,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Sorted neighbors of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for start in 0..self.adj.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        match self.adj.len() {
            0 => true,
            _ => self.bfs_distances(0).iter().all(Option::is_some),
        }
    }

    /// Edge-list text: a `n m` header line, then one `u v` line per edge with
    /// `u < v`, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.node_count(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing `n m` header".into(),
        })?;
        let (n, m) = parse_pair(line, header)?;
        let mut g = Graph::new(n);
        for (line, l) in lines.by_ref() {
            let (u, v) = parse_pair(line, l)?;
            g.add_edge(u, v).map_err(|e| GraphError::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        if g.edge_count() != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", g.edge_count()),
            });
        }
        Ok(g)
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), GraphError> {
    let bad = || GraphError::Parse {
        line,
        msg: format!("expected two non-negative integers, got {text:?}"),
    };
    let mut it = text.split_whitespace();
    let a = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let b = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((a, b))
}

/// Regular ring: node `i` joined to `i ± 1 … i ± k/2 (mod n)`.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter(format!("ring lattice needs n >= 3, got {n}")));
    }
    if k < 2 || k % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "ring lattice needs an even k >= 2, got {k}"
        )));
    }
    if k >= n {
        return Err(GraphError::InvalidParameter(format!("ring lattice needs k < n, got k={k}, n={n}")));
    }
    let mut g = Graph::new(n);
    for i in 0..n {
        for offset in 1..=k / 2 {
            g.add_edge(i, (i + offset) % n)?;
        }
    }
    Ok(g)
}

/// Recovers `k` if `g` is exactly `ring_lattice(n, k)`.
fn lattice_degree(g: &Graph) -> Option<usize> {
    let n = g.node_count();
    let k = g.adj.first()?.len();
    if n < 3 || k < 2 || k % 2 != 0 || k >= n || g.edge_count() != n * k / 2 {
        return None;
    }
    let regular = (0..n).all(|i| (1..=k / 2).all(|off| g.has_edge(i, (i + off) % n)));
    regular.then_some(k)
}

/// Watts–Strogatz rewiring of a ring lattice.
///
/// Lattice edges are visited once, ascending by near endpoint and then by
/// offset. Each is rewired with probability `p` by moving its far endpoint to a
/// uniformly random node; draws that would create a self-loop or a duplicate
/// edge are rejected and redrawn. An edge whose near endpoint is already joined
/// to every other node is left alone.
pub fn ws_rewire(g: &Graph, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!("rewiring probability must be in [0, 1], got {p}")));
    }
    let k = lattice_degree(g)
        .ok_or_else(|| GraphError::InvalidParameter("ws_rewire expects a ring lattice".into()))?;
    let n = g.node_count();
    let mut out = g.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for near in 0..n {
        for offset in 1..=k / 2 {
            if !rng.random_bool(p) {
                continue;
            }
            let far = (near + offset) % n;
            if out.degree(near) >= n - 1 || !out.has_edge(near, far) {
                continue;
            }
            let target = loop {
                let w = rng.random_range(0..n);
                if w != near && !out.has_edge(near, w) {
                    break w;
                }
            };
            out.remove_edge(near, far);
            out.add_edge(near, target)?;
        }
    }
    Ok(out)
}

/// `m` distinct edges drawn uniformly without replacement from all unordered
/// node pairs.
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(GraphError::InvalidParameter(format!(
            "{m} edges requested but {n} nodes allow at most {max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = index::sample(&mut rng, max, m).into_vec();
    ranks.sort_unstable();
    let mut g = Graph::new(n);
    // Pairs ranked row-major: (0,1), (0,2), …, (0,n-1), (1,2), …
    let mut u = 0;
    let mut row_start = 0;
    for r in ranks {
        while r >= row_start + (n - 1 - u) {
            row_start += n - 1 - u;
            u += 1;
        }
        g.add_edge(u, u + 1 + (r - row_start))?;
    }
    Ok(g)
}

/// Local clustering of `u`: joined neighbor pairs over all neighbor pairs;
/// zero below degree two.
pub fn local_clustering(g: &Graph, u: usize) -> f64 {
    let nbrs = g.neighbors(u);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        links += nbrs[i + 1..].iter().filter(|&&b| g.has_edge(a, b)).count();
    }
    links as f64 / (d * (d - 1) / 2) as f64
}

/// Mean local clustering over every node (low-degree nodes count as zero).
pub fn clustering_coefficient(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let sum: f64 = (0..n).map(|u| local_clustering(g, u)).sum();
    sum / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathLengthMode {
    /// Disconnected graphs are an error.
    #[default]
    Strict,
    /// Average over pairs inside the largest component only.
    LargestComponent,
}

/// Mean BFS hop count over all unordered node pairs.
pub fn characteristic_path_length(g: &Graph, mode: PathLengthMode) -> Result<f64, GraphError> {
    let n = g.node_count();
    if n < 2 {
        return Err(GraphError::TooFewNodes);
    }
    let nodes: Vec<usize> = if g.is_connected() {
        (0..n).collect()
    } else {
        match mode {
            PathLengthMode::Strict => return Err(GraphError::Disconnected),
            PathLengthMode::LargestComponent => {
                // Ties go to the component holding the smallest node id.
                let comps = g.components();
                let best = comps.iter().map(Vec::len).max().unwrap();
                comps.into_iter().find(|c| c.len() == best).unwrap()
            }
        }
    };
    if nodes.len() < 2 {
        return Err(GraphError::TooFewNodes);
    }
    // Integer sums, so the reduction is exact whatever the thread schedule.
    let total: u64 = nodes
        .par_iter()
        .map(|&s| {
            g.bfs_distances(s)
                .iter()
                .map(|d| d.map_or(0, u64::from))
                .sum::<u64>()
        })
        .sum();
    let pairs = (nodes.len() * (nodes.len() - 1)) as f64;
    Ok(total as f64 / pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphMetrics {
    pub clustering: f64,
    /// Absent when the graph is disconnected or has fewer than two nodes.
    pub path_length: Option<f64>,
    pub degree_min: usize,
    pub degree_max: usize,
    pub degree_mean: f64,
    pub connected: bool,
}

pub fn graph_metrics(g: &Graph) -> GraphMetrics {
    let n = g.node_count();
    let degrees = (0..n).map(|u| g.degree(u));
    let connected = g.is_connected();
    GraphMetrics {
        clustering: clustering_coefficient(g),
        path_length: if connected {
            characteristic_path_length(g, PathLengthMode::Strict).ok()
        } else {
            None
        },
        degree_min: degrees.clone().min().unwrap_or(0),
        degree_max: degrees.max().unwrap_or(0),
        degree_mean: if n == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / n as f64 },
        connected,
    }
}
