//! The two-tier gallery: paintings on a [`Graph`] (tier 1) and information
//! points hung off individual paintings (tier 2).
//!
//! Tier-2 links never enter the painting graph, so attaching information
//! points leaves every painting-graph metric untouched.

use std::fmt::Write as _;

use thiserror::Error;

use crate::netgraph::Graph;

/// Node id in the combined two-tier network. Paintings take `0..P`, info
/// nodes take `P..P+I`.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalleryError {
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("painting {0} has zero capacity")]
    ZeroCapacity(NodeId),
    #[error("painting {0} has an empty style vector or no positive style weight")]
    EmptyStyle(NodeId),
    #[error("painting {painting} style weight {value} outside [0, 1]")]
    StyleRange { painting: NodeId, value: f64 },
    #[error("painting {painting} has {got} style dimensions, expected {expected}")]
    StyleDimension {
        painting: NodeId,
        expected: usize,
        got: usize,
    },
    #[error("info nodes of painting {0} need a positive service time")]
    ZeroServiceTime(NodeId),
    #[error("hop time must be at least one minute")]
    ZeroHopTime,
    #[error("unknown painting {0}")]
    UnknownPainting(NodeId),
    #[error("unknown info node {0}")]
    UnknownInfoNode(NodeId),
    #[error("painting {1} is unreachable from painting {0}")]
    Unreachable(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Painting {
    pub id: NodeId,
    /// Weights over the style categories, each in `[0, 1]`.
    pub style: Vec<f64>,
    /// Viewers that fit comfortably in front of the painting.
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoNode {
    pub id: NodeId,
    pub parent: NodeId,
    /// Minutes a reader spends at the point.
    pub service_time: u32,
    /// Capacity the point adds to its parent, and its own number of reading
    /// slots.
    pub relief: u32,
}

/// Per-painting information-point allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfoSpec {
    pub count: u32,
    pub service_time: u32,
    pub relief: u32,
}

impl Default for InfoSpec {
    fn default() -> Self {
        InfoSpec {
            count: 1,
            service_time: 5,
            relief: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Gallery {
    paintings: Vec<Painting>,
    info_nodes: Vec<InfoNode>,
    painting_graph: Graph,
    hop_time: u32,
    info_of: Vec<Vec<NodeId>>,
    hops: Vec<Vec<Option<u32>>>,
}

/// Builds and validates a gallery. Info nodes receive fresh ids after the
/// paintings, in painting order.
pub fn build_gallery(
    painting_graph: Graph,
    styles: Vec<Vec<f64>>,
    capacities: &[u32],
    info_spec: &[InfoSpec],
    hop_time: u32,
) -> Result<Gallery, GalleryError> {
    let n = painting_graph.node_count();
    let check_len = |what, got| {
        if got != n {
            Err(GalleryError::LengthMismatch { what, expected: n, got })
        } else {
            Ok(())
        }
    };
    check_len("styles", styles.len())?;
    check_len("capacities", capacities.len())?;
    check_len("info_spec", info_spec.len())?;
    if hop_time == 0 {
        return Err(GalleryError::ZeroHopTime);
    }

    let dims = styles.first().map_or(0, Vec::len);
    let mut paintings = Vec::with_capacity(n);
    for (id, (style, &capacity)) in styles.into_iter().zip(capacities).enumerate() {
        if capacity == 0 {
            return Err(GalleryError::ZeroCapacity(id));
        }
        if style.len() != dims {
            return Err(GalleryError::StyleDimension {
                painting: id,
                expected: dims,
                got: style.len(),
            });
        }
        if let Some(&value) = style.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(GalleryError::StyleRange { painting: id, value });
        }
        if !style.iter().any(|&w| w > 0.0) {
            return Err(GalleryError::EmptyStyle(id));
        }
        paintings.push(Painting { id, style, capacity });
    }

    let mut info_nodes = Vec::new();
    let mut info_of = vec![Vec::new(); n];
    for (parent, spec) in info_spec.iter().enumerate() {
        if spec.count > 0 && spec.service_time == 0 {
            return Err(GalleryError::ZeroServiceTime(parent));
        }
        for _ in 0..spec.count {
            let id = n + info_nodes.len();
            info_of[parent].push(id);
            info_nodes.push(InfoNode {
                id,
                parent,
                service_time: spec.service_time,
                relief: spec.relief,
            });
        }
    }

    let hops = (0..n).map(|s| painting_graph.bfs_distances(s)).collect();
    Ok(Gallery {
        paintings,
        info_nodes,
        painting_graph,
        hop_time,
        info_of,
        hops,
    })
}

impl Gallery {
    pub fn paintings(&self) -> &[Painting] {
        &self.paintings
    }

    pub fn painting_count(&self) -> usize {
        self.paintings.len()
    }

    pub fn info_nodes(&self) -> &[InfoNode] {
        &self.info_nodes
    }

    pub fn painting_graph(&self) -> &Graph {
        &self.painting_graph
    }

    pub fn hop_time(&self) -> u32 {
        self.hop_time
    }

    pub fn painting(&self, id: NodeId) -> Result<&Painting, GalleryError> {
        self.paintings.get(id).ok_or(GalleryError::UnknownPainting(id))
    }

    pub fn info_node(&self, id: NodeId) -> Result<&InfoNode, GalleryError> {
        id.checked_sub(self.paintings.len())
            .and_then(|i| self.info_nodes.get(i))
            .ok_or(GalleryError::UnknownInfoNode(id))
    }

    /// Ids of the info nodes attached to painting `id`.
    pub fn info_nodes_of(&self, id: NodeId) -> Result<&[NodeId], GalleryError> {
        self.info_of
            .get(id)
            .map(Vec::as_slice)
            .ok_or(GalleryError::UnknownPainting(id))
    }

    /// Base capacity plus the relief of every attached info node.
    pub fn effective_capacity(&self, id: NodeId) -> Result<u32, GalleryError> {
        let base = self.painting(id)?.capacity;
        let relief: u32 = self.info_of[id]
            .iter()
            .map(|&i| self.info_nodes[i - self.paintings.len()].relief)
            .sum();
        Ok(base + relief)
    }

    /// Painting-graph hops between two paintings, `None` if unreachable.
    pub fn hops(&self, a: NodeId, b: NodeId) -> Option<u32> {
        self.hops.get(a)?.get(b).copied().flatten()
    }

    /// Walking minutes between two paintings.
    pub fn travel_time(&self, a: NodeId, b: NodeId) -> Result<u32, GalleryError> {
        self.painting(a)?;
        self.painting(b)?;
        self.hops(a, b)
            .map(|h| h * self.hop_time)
            .ok_or(GalleryError::Unreachable(a, b))
    }

    /// Two-section text export: the painting-graph edge list, then an
    /// `info <count>` line followed by one `infonode parent` line per info node.
    pub fn to_text(&self) -> String {
        let mut out = self.painting_graph.to_edge_list();
        writeln!(out, "info {}", self.info_nodes.len()).unwrap();
        for node in &self.info_nodes {
            writeln!(out, "{} {}", node.id, node.parent).unwrap();
        }
        out
    }
}
