//! Routing policies and the congestion test.
//!
//! Three policies span the range between the two extremes of unguided
//! movement:
//!
//! * [`Policy::UnguidedRandom`]: no shared interests and no guidance, visitors
//!   wander to any unseen painting.
//! * [`Policy::Hotspot`]: everyone heads for their favourite remaining painting
//!   regardless of the crowd in front of it.
//! * [`Policy::SwnGuided`]: interest-matched guidance that steers around
//!   congested paintings, with an occasional random long-range jump.

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};

use crate::gallery::{Gallery, GalleryError, NodeId};
use crate::visitors::{interest_score, Visitor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scope {
    /// Painting-graph neighbors of the current painting, widening to every
    /// painting when no neighbor is left unseen.
    #[default]
    Neighbors,
    AllPaintings,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    UnguidedRandom,
    Hotspot,
    SwnGuided { epsilon: f64, scope: Scope },
}

impl Default for Policy {
    fn default() -> Self {
        Policy::SwnGuided {
            epsilon: 0.1,
            scope: Scope::Neighbors,
        }
    }
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::UnguidedRandom => "unguided_random",
            Policy::Hotspot => "hotspot",
            Policy::SwnGuided { .. } => "swn_guided",
        }
    }

    /// Position in the canonical row order of sweep output.
    pub fn rank(&self) -> u8 {
        match self {
            Policy::UnguidedRandom => 0,
            Policy::Hotspot => 1,
            Policy::SwnGuided { .. } => 2,
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Policy::SwnGuided { epsilon, .. } => (0.0..=1.0).contains(epsilon),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    Painting(NodeId),
    InfoNode(NodeId),
    Exit,
}

/// Per-node head counts: viewers per painting and readers per info node
/// (indexed by position in [`Gallery::info_nodes`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    pub paintings: Vec<u32>,
    pub info: Vec<u32>,
}

impl Occupancy {
    pub fn empty(g: &Gallery) -> Self {
        Occupancy {
            paintings: vec![0; g.painting_count()],
            info: vec![0; g.info_nodes().len()],
        }
    }
}

/// Where a deciding visitor stands and how long they have been inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Situation {
    /// Current painting, `None` at the entrance.
    pub at: Option<NodeId>,
    /// Minutes since entering.
    pub elapsed: f64,
}

impl Situation {
    pub fn entrance() -> Self {
        Situation { at: None, elapsed: 0.0 }
    }
}

/// A new viewer would push `p` past its comfortable limit.
pub fn is_congested(p: NodeId, occupancy: u32, g: &Gallery) -> Result<bool, GalleryError> {
    Ok(occupancy >= g.effective_capacity(p)?)
}

fn congested(p: NodeId, occ: &Occupancy, g: &Gallery) -> bool {
    occ.paintings[p] >= g.effective_capacity(p).expect("painting ids come from the gallery")
}

fn score(v: &Visitor, g: &Gallery, p: NodeId) -> f64 {
    // Dimension mismatches are rejected when a simulation is set up.
    interest_score(v, &g.paintings()[p]).unwrap_or(0.0)
}

/// Highest-scoring candidate, lowest id on ties. Candidates must be ascending.
fn best(v: &Visitor, g: &Gallery, candidates: impl IntoIterator<Item = NodeId>) -> Option<NodeId> {
    let mut top: Option<(NodeId, f64)> = None;
    for p in candidates {
        let s = score(v, g, p);
        if top.is_none_or(|(_, t)| s > t) {
            top = Some((p, s));
        }
    }
    top.map(|(p, _)| p)
}

/// Unseen paintings reachable from where the visitor stands, ascending.
fn unseen_reachable(v: &Visitor, at: Option<NodeId>, g: &Gallery) -> Vec<NodeId> {
    (0..g.painting_count())
        .filter(|p| !v.seen.contains(p))
        .filter(|&p| at.is_none_or(|a| g.hops(a, p).is_some()))
        .collect()
}

/// Picks the next move for `v`.
///
/// Every policy exits once the time budget is spent or nothing unseen is
/// reachable. Unreachable paintings (a disconnected painting graph) are never
/// offered.
pub fn choose_next<R: RngCore + ?Sized>(
    v: &Visitor,
    at: Situation,
    g: &Gallery,
    occupancy: &Occupancy,
    policy: &Policy,
    rng: &mut R,
) -> Destination {
    if at.elapsed >= v.time_budget {
        return Destination::Exit;
    }
    let unseen = unseen_reachable(v, at.at, g);
    if unseen.is_empty() {
        return Destination::Exit;
    }
    match *policy {
        Policy::UnguidedRandom => Destination::Painting(*unseen.choose(rng).unwrap()),
        Policy::Hotspot => Destination::Painting(best(v, g, unseen.iter().copied()).unwrap()),
        Policy::SwnGuided { epsilon, scope } => {
            if epsilon > 0.0 && rng.random_bool(epsilon) {
                let free: Vec<NodeId> = unseen
                    .iter()
                    .copied()
                    .filter(|&p| !congested(p, occupancy, g))
                    .collect();
                if let Some(&p) = free.choose(rng) {
                    return Destination::Painting(p);
                }
            }
            let local: Vec<NodeId> = match (scope, at.at) {
                (Scope::Neighbors, Some(here)) => g
                    .painting_graph()
                    .neighbors(here)
                    .iter()
                    .copied()
                    .filter(|p| !v.seen.contains(p))
                    .collect(),
                _ => Vec::new(),
            };
            let pool = if local.is_empty() { &unseen } else { &local };
            let top = best(v, g, pool.iter().copied()).unwrap();
            if congested(top, occupancy, g) {
                redirect_on_congestion(v, top, at.at, g, occupancy)
            } else {
                Destination::Painting(top)
            }
        }
    }
}

/// Alternative for a visitor whose preferred painting `blocked` is full.
///
/// Tries, in order: the best-matching unseen painting that is not congested;
/// an info node of `blocked` with a free reading slot; and finally
/// `blocked` itself, where the visitor will wait in the queue.
pub fn redirect_on_congestion(
    v: &Visitor,
    blocked: NodeId,
    at: Option<NodeId>,
    g: &Gallery,
    occupancy: &Occupancy,
) -> Destination {
    let alternatives = unseen_reachable(v, at, g)
        .into_iter()
        .filter(|&p| p != blocked && !congested(p, occupancy, g));
    if let Some(p) = best(v, g, alternatives) {
        return Destination::Painting(p);
    }
    let base = g.painting_count();
    let info = g.info_nodes_of(blocked).expect("blocked painting exists");
    if let Some(&i) = info
        .iter()
        .find(|&&i| occupancy.info[i - base] < g.info_nodes()[i - base].relief)
    {
        return Destination::InfoNode(i);
    }
    Destination::Painting(blocked)
}
