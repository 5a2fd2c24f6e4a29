//! Small-world gallery networks and congestion-aware visitor routing.
//!
//! A museum is modelled as two tiers: paintings joined by a painting graph
//! (regular, small-world or random), and information points attached to
//! single paintings. Visitors carry an interest profile and a context tuple
//! (location, identity, activity, time) and move between paintings under one
//! of three routing policies. The simulator measures how much each policy
//! makes visitors bunch up in front of popular paintings.
//!
//! * [`netgraph`]: graphs, generators, clustering and path-length metrics.
//! * [`gallery`]: the two-tier gallery network.
//! * [`visitors`]: visitor agents, context, dwell-time model.
//! * [`routing`]: policies, congestion test, redirection.
//! * [`simcore`]: the time-stepped simulator and its metrics.
//! * [`config`] and [`experiment`]: scenario files, sweeps, CSV output.
//!
//! The guide in `book/` walks through each piece with runnable examples.

pub mod config;
pub mod experiment;
pub mod gallery;
pub mod netgraph;
pub mod routing;
pub mod simcore;
pub mod visitors;

pub use config::{parse_config, SimConfig};
pub use gallery::{build_gallery, Gallery};
pub use netgraph::{Graph, GraphMetrics};
pub use routing::{Destination, Policy};
pub use simcore::{run, SimResult, SimState};
pub use visitors::{Context, Visitor};

// Compiles and runs every snippet of the guide as a doc-test.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/small-worlds.md")]
    pub struct SmallWorlds;
    #[doc = include_str!("../../../book/src/gallery.md")]
    pub struct TwoTierGallery;
    #[doc = include_str!("../../../book/src/visitors.md")]
    pub struct Visitors;
    #[doc = include_str!("../../../book/src/routing.md")]
    pub struct Routing;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub struct Experiments;
}
