//! Time-stepped visitor simulation.
//!
//! One tick is one minute. Each tick runs, in order:
//!
//! 1. visitors whose arrival time has come enter the gallery;
//! 2. dwell and reading timers count down, queued visitors whose budget has
//!    run out leave, and every visitor needing a new destination (new entrants
//!    and those who just finished) decides against the occupancy snapshot taken
//!    at the start of the tick, in ascending visitor id;
//! 3. walkers advance, and those arriving at a full painting (or one with a
//!    queue already waiting) join its FIFO queue;
//! 4. slots freed this tick are handed to queue heads;
//! 5. the clock advances.
//!
//! A visitor deciding at the entrance walks one hop to reach any painting.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, SimConfig};
use crate::gallery::{Gallery, NodeId};
use crate::routing::{choose_next, Destination, Occupancy, Policy, Situation};
use crate::visitors::{
    interest_score, sample_dwell_time, Activity, Context, DwellModel, Location, Visitor, VisitorId,
    VisitorType,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown visitor {0}")]
    UnknownVisitor(VisitorId),
    #[error("visitor {id}: {reason}")]
    InvalidVisitor { id: VisitorId, reason: String },
    #[error("satisfaction is undefined for zero visitors")]
    NoVisitors,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("writing {path}: {source}")]
    Io { path: String, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Enter,
    Move,
    View,
    Queue,
    Read,
    Exit,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Enter => "enter",
            EventKind::Move => "move",
            EventKind::View => "view",
            EventKind::Queue => "queue",
            EventKind::Read => "read",
            EventKind::Exit => "exit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub tick: u32,
    pub visitor: VisitorId,
    pub kind: EventKind,
    /// Destination or location node; `None` for entering and leaving.
    pub node: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Pending,
    Transit { dest: Destination, remaining: u32 },
    Viewing { painting: NodeId, remaining: u32 },
    Reading { info: NodeId, remaining: u32 },
    Queued { painting: NodeId, since: u32 },
    Exited,
}

#[derive(Debug, Clone)]
struct Agent {
    phase: Phase,
    /// Last painting stood at; `None` until the first arrival.
    at: Option<NodeId>,
    admitted_at: Option<u32>,
    exited_at: Option<u32>,
    wait: u32,
    score_sum: f64,
}

/// Visitors per location category at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Census {
    pub pending: usize,
    pub in_transit: usize,
    pub viewing: usize,
    pub reading: usize,
    pub queued: usize,
    pub exited: usize,
}

impl Census {
    pub fn total(&self) -> usize {
        self.pending + self.in_transit + self.viewing + self.reading + self.queued + self.exited
    }
}

/// Mutable world state of one run.
#[derive(Debug, Clone)]
pub struct SimState {
    clock: u32,
    visitors: Vec<Visitor>,
    agents: Vec<Agent>,
    occupancy: Occupancy,
    capacity: Vec<u32>,
    queues: Vec<VecDeque<VisitorId>>,
    dwell: DwellModel,
    rng: ChaCha8Rng,
    events: Vec<Event>,
    occupancy_trace: Vec<Vec<u32>>,
    queue_trace: Vec<Vec<u32>>,
}

impl SimState {
    /// Visitors must carry ids `0..len` in order and match the gallery's style
    /// dimension.
    pub fn new(gallery: &Gallery, visitors: Vec<Visitor>, dwell: DwellModel, seed: u64) -> Result<Self, SimError> {
        let dims = gallery.paintings().first().map(|p| p.style.len());
        for (i, v) in visitors.iter().enumerate() {
            let bad = |reason: String| Err(SimError::InvalidVisitor { id: v.id, reason });
            if v.id != i {
                return bad(format!("expected id {i}"));
            }
            if dims.is_some_and(|d| d != v.interests.len()) {
                return bad(format!("{} interest dimensions, gallery has {}", v.interests.len(), dims.unwrap()));
            }
            if !v.interests.iter().any(|&x| x > 0.0) {
                return bad("no positive interest".into());
            }
            if !(v.time_budget > 0.0) {
                return bad("time budget must be positive".into());
            }
        }
        let capacity = (0..gallery.painting_count())
            .map(|p| gallery.effective_capacity(p).unwrap())
            .collect();
        let agents = visitors
            .iter()
            .map(|_| Agent {
                phase: Phase::Pending,
                at: None,
                admitted_at: None,
                exited_at: None,
                wait: 0,
                score_sum: 0.0,
            })
            .collect();
        Ok(SimState {
            clock: 0,
            agents,
            visitors,
            occupancy: Occupancy::empty(gallery),
            capacity,
            queues: vec![VecDeque::new(); gallery.painting_count()],
            dwell,
            rng: ChaCha8Rng::seed_from_u64(seed),
            events: Vec::new(),
            occupancy_trace: Vec::new(),
            queue_trace: Vec::new(),
        })
    }

    pub fn clock(&self) -> u32 {
        self.clock
    }

    pub fn visitors(&self) -> &[Visitor] {
        &self.visitors
    }

    pub fn occupancy(&self) -> &Occupancy {
        &self.occupancy
    }

    pub fn queue_lengths(&self) -> Vec<u32> {
        self.queues.iter().map(|q| q.len() as u32).collect()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn all_exited(&self) -> bool {
        self.agents.iter().all(|a| a.phase == Phase::Exited)
    }

    pub fn census(&self) -> Census {
        let mut c = Census::default();
        for a in &self.agents {
            match a.phase {
                Phase::Pending => c.pending += 1,
                Phase::Transit { .. } => c.in_transit += 1,
                Phase::Viewing { .. } => c.viewing += 1,
                Phase::Reading { .. } => c.reading += 1,
                Phase::Queued { .. } => c.queued += 1,
                Phase::Exited => c.exited += 1,
            }
        }
        c
    }

    /// Context tuple of a visitor at the current clock. Visitors who have not
    /// arrived yet count as walking towards the entrance.
    pub fn context_of(&self, id: VisitorId) -> Result<Context, SimError> {
        let agent = self.agents.get(id).ok_or(SimError::UnknownVisitor(id))?;
        let (location, activity) = match agent.phase {
            Phase::Pending | Phase::Transit { .. } => (Location::InTransit, Activity::Moving),
            Phase::Viewing { painting, .. } => (Location::Node(painting), Activity::Viewing),
            Phase::Reading { info, .. } => (Location::Node(info), Activity::ReadingInfo),
            Phase::Queued { painting, .. } => (Location::Node(painting), Activity::Queued),
            Phase::Exited => (Location::Exited, Activity::Done),
        };
        Ok(Context {
            location,
            identity: id,
            activity,
            time: self.clock,
        })
    }

    fn log(&mut self, visitor: VisitorId, kind: EventKind, node: Option<NodeId>) {
        self.events.push(Event {
            tick: self.clock,
            visitor,
            kind,
            node,
        });
    }

    fn exit(&mut self, id: VisitorId) {
        self.agents[id].phase = Phase::Exited;
        self.agents[id].exited_at = Some(self.clock);
        self.log(id, EventKind::Exit, None);
    }

    fn start_viewing(&mut self, id: VisitorId, painting: NodeId, g: &Gallery) {
        let p = &g.paintings()[painting];
        let minutes = sample_dwell_time(&self.visitors[id], p, &self.dwell, &mut self.rng)
            .expect("dimensions checked at construction");
        let score = interest_score(&self.visitors[id], p).expect("dimensions checked at construction");
        self.occupancy.paintings[painting] += 1;
        self.visitors[id].seen.insert(painting);
        let agent = &mut self.agents[id];
        agent.score_sum += score;
        agent.at = Some(painting);
        agent.phase = Phase::Viewing {
            painting,
            remaining: (minutes.ceil() as u32).max(1),
        };
        self.log(id, EventKind::View, Some(painting));
    }

    fn arrive_at_painting(&mut self, id: VisitorId, painting: NodeId, g: &Gallery) {
        self.agents[id].at = Some(painting);
        if !self.queues[painting].is_empty() || self.occupancy.paintings[painting] >= self.capacity[painting] {
            self.queues[painting].push_back(id);
            self.agents[id].phase = Phase::Queued {
                painting,
                since: self.clock,
            };
            self.log(id, EventKind::Queue, Some(painting));
        } else {
            self.start_viewing(id, painting, g);
        }
    }

    fn decide(&mut self, id: VisitorId, snapshot: &Occupancy, g: &Gallery, policy: &Policy) {
        let agent = &self.agents[id];
        let situation = Situation {
            at: agent.at,
            elapsed: f64::from(self.clock - agent.admitted_at.expect("deciding visitors are admitted")),
        };
        let dest = choose_next(&self.visitors[id], situation, g, snapshot, policy, &mut self.rng);
        let target = match dest {
            Destination::Exit => return self.exit(id),
            Destination::Painting(p) => p,
            Destination::InfoNode(i) => g.info_node(i).expect("router returns gallery nodes").parent,
        };
        let walk = match agent.at {
            None => g.hop_time(),
            Some(a) => g.travel_time(a, target).expect("router only offers reachable paintings"),
        };
        let node = match dest {
            Destination::Painting(p) | Destination::InfoNode(p) => p,
            Destination::Exit => unreachable!(),
        };
        self.agents[id].phase = Phase::Transit { dest, remaining: walk };
        self.log(id, EventKind::Move, Some(node));
    }

    /// Advances the world by one tick.
    pub fn step(&mut self, g: &Gallery, policy: &Policy) {
        let now = self.clock;
        let snapshot = self.occupancy.clone();
        let base = g.painting_count();

        for id in 0..self.agents.len() {
            if self.agents[id].phase == Phase::Pending && self.visitors[id].arrival_time <= f64::from(now) {
                self.agents[id].admitted_at = Some(now);
                self.log(id, EventKind::Enter, None);
            }
        }

        for id in 0..self.agents.len() {
            match self.agents[id].phase {
                Phase::Pending if self.agents[id].admitted_at.is_some() => {
                    self.decide(id, &snapshot, g, policy);
                }
                Phase::Viewing { painting, remaining } => {
                    if remaining > 1 {
                        self.agents[id].phase = Phase::Viewing {
                            painting,
                            remaining: remaining - 1,
                        };
                    } else {
                        self.occupancy.paintings[painting] -= 1;
                        self.decide(id, &snapshot, g, policy);
                    }
                }
                Phase::Reading { info, remaining } => {
                    if remaining > 1 {
                        self.agents[id].phase = Phase::Reading {
                            info,
                            remaining: remaining - 1,
                        };
                    } else {
                        self.occupancy.info[info - base] -= 1;
                        self.decide(id, &snapshot, g, policy);
                    }
                }
                Phase::Queued { painting, since } => {
                    let elapsed = now - self.agents[id].admitted_at.unwrap();
                    if f64::from(elapsed) >= self.visitors[id].time_budget {
                        self.queues[painting].retain(|&q| q != id);
                        self.agents[id].wait += now - since;
                        self.exit(id);
                    }
                }
                _ => {}
            }
        }

        for id in 0..self.agents.len() {
            let Phase::Transit { dest, remaining } = self.agents[id].phase else {
                continue;
            };
            if remaining > 1 {
                self.agents[id].phase = Phase::Transit {
                    dest,
                    remaining: remaining - 1,
                };
                continue;
            }
            match dest {
                Destination::Painting(p) => self.arrive_at_painting(id, p, g),
                Destination::InfoNode(i) => {
                    let node = g.info_node(i).unwrap();
                    if self.occupancy.info[i - base] < node.relief {
                        self.occupancy.info[i - base] += 1;
                        self.agents[id].at = Some(node.parent);
                        self.agents[id].phase = Phase::Reading {
                            info: i,
                            remaining: node.service_time,
                        };
                        self.log(id, EventKind::Read, Some(i));
                    } else {
                        self.arrive_at_painting(id, node.parent, g);
                    }
                }
                Destination::Exit => unreachable!("exits never enter transit"),
            }
        }

        for p in 0..self.queues.len() {
            while self.occupancy.paintings[p] < self.capacity[p] {
                let Some(id) = self.queues[p].pop_front() else { break };
                if let Phase::Queued { since, .. } = self.agents[id].phase {
                    self.agents[id].wait += now - since;
                }
                self.start_viewing(id, p, g);
            }
        }

        self.occupancy_trace.push(self.occupancy.paintings.clone());
        self.queue_trace.push(self.queue_lengths());
        self.clock += 1;
    }

    /// Closes the run at `horizon`, padding the traces with the (empty) tail
    /// when every visitor left early.
    pub fn into_result(mut self, horizon: u32, seed: u64, config: String) -> SimResult {
        let width = self.queues.len();
        while (self.occupancy_trace.len() as u32) < horizon {
            self.occupancy_trace.push(self.occupancy.paintings.clone());
            self.queue_trace.push(vec![0; width]);
        }
        let end = self.clock;
        let visitors = self
            .agents
            .iter()
            .zip(&self.visitors)
            .map(|(a, v)| {
                let mut wait = a.wait;
                if let Phase::Queued { since, .. } = a.phase {
                    wait += end - since;
                }
                let seen = v.seen.len();
                VisitorSummary {
                    id: v.id,
                    vtype: v.vtype,
                    total_time: a.admitted_at.map_or(0, |t| a.exited_at.unwrap_or(end) - t),
                    wait_time: wait,
                    paintings_seen: seen,
                    mean_interest: if seen == 0 { 0.0 } else { a.score_sum / seen as f64 },
                    exited: a.phase == Phase::Exited,
                }
            })
            .collect();
        SimResult {
            seed,
            config,
            horizon,
            events: self.events,
            occupancy_trace: self.occupancy_trace,
            queue_trace: self.queue_trace,
            visitors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisitorSummary {
    pub id: VisitorId,
    #[serde(serialize_with = "vtype_name")]
    pub vtype: VisitorType,
    /// Minutes from entering to leaving (or to the end of the run).
    pub total_time: u32,
    pub wait_time: u32,
    pub paintings_seen: usize,
    pub mean_interest: f64,
    pub exited: bool,
}

fn vtype_name<S: serde::Serializer>(v: &VisitorType, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match v {
        VisitorType::Quick => "quick",
        VisitorType::Slow => "slow",
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub seed: u64,
    /// Normalized text of the configuration that produced the run.
    pub config: String,
    pub horizon: u32,
    pub events: Vec<Event>,
    /// Viewers per painting at the end of every tick.
    pub occupancy_trace: Vec<Vec<u32>>,
    /// Queue length per painting at the end of every tick.
    pub queue_trace: Vec<Vec<u32>>,
    pub visitors: Vec<VisitorSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bunching {
    /// Painting-minutes with a non-empty queue.
    pub overflow_minutes: u64,
    pub peak_queue: u32,
    /// Largest fraction of ticks any one painting spent with a queue.
    pub mona_lisa: f64,
}

pub fn bunching_index(r: &SimResult) -> Bunching {
    let ticks = r.queue_trace.len();
    let width = r.queue_trace.first().map_or(0, Vec::len);
    let mut queued_ticks = vec![0u64; width];
    let mut peak = 0;
    for row in &r.queue_trace {
        for (p, &q) in row.iter().enumerate() {
            if q > 0 {
                queued_ticks[p] += 1;
            }
            peak = peak.max(q);
        }
    }
    Bunching {
        overflow_minutes: queued_ticks.iter().sum(),
        peak_queue: peak,
        mona_lisa: if ticks == 0 {
            0.0
        } else {
            queued_ticks.iter().copied().max().unwrap_or(0) as f64 / ticks as f64
        },
    }
}

/// Mean over visitors of `mean interest of what they saw × share of time not
/// spent queueing`.
pub fn satisfaction(r: &SimResult) -> Result<f64, SimError> {
    if r.visitors.is_empty() {
        return Err(SimError::NoVisitors);
    }
    let sum: f64 = r
        .visitors
        .iter()
        .map(|v| {
            if v.paintings_seen == 0 {
                return 0.0;
            }
            let free = if v.total_time == 0 {
                1.0
            } else {
                1.0 - f64::from(v.wait_time) / f64::from(v.total_time)
            };
            v.mean_interest * free
        })
        .sum();
    Ok(sum / r.visitors.len() as f64)
}

/// Runs `visitors` through `gallery` for at most `horizon` ticks.
pub fn simulate(
    gallery: &Gallery,
    visitors: Vec<Visitor>,
    dwell: DwellModel,
    policy: &Policy,
    horizon: u32,
    seed: u64,
) -> Result<SimResult, SimError> {
    let mut state = SimState::new(gallery, visitors, dwell, seed)?;
    while state.clock() < horizon && !state.all_exited() {
        state.step(gallery, policy);
    }
    Ok(state.into_result(horizon, seed, String::new()))
}

/// Builds the scenario described by `config` for `seed` and simulates it.
pub fn run(config: &SimConfig, seed: u64) -> Result<SimResult, SimError> {
    let scenario = config.instantiate(seed)?;
    let mut result = simulate(
        &scenario.gallery,
        scenario.visitors,
        config.population.dwell,
        &config.policy.policy(),
        config.horizon,
        scenario.sim_seed,
    )?;
    result.seed = seed;
    result.config = config.emit();
    Ok(result)
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    horizon: u32,
    visitors: usize,
    exited: usize,
    events: usize,
    bunching: Bunching,
    satisfaction: Option<f64>,
    mean_wait: f64,
    mean_seen: f64,
    per_visitor: &'a [VisitorSummary],
    config: &'a str,
}

impl SimResult {
    /// Event log as CSV: `tick,visitor,event,node`, with `-` for no node.
    pub fn events_csv(&self) -> String {
        let mut out = String::from("tick,visitor,event,node\n");
        for e in &self.events {
            let node = e.node.map_or_else(|| "-".to_string(), |n| n.to_string());
            writeln!(out, "{},{},{},{}", e.tick, e.visitor, e.kind.as_str(), node).unwrap();
        }
        out
    }

    fn trace_csv(trace: &[Vec<u32>], width: usize) -> String {
        let mut out = String::from("tick");
        for p in 0..width {
            write!(out, ",painting_{p}").unwrap();
        }
        out.push('\n');
        for (t, row) in trace.iter().enumerate() {
            write!(out, "{t}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn painting_count(&self) -> usize {
        self.occupancy_trace.first().map_or(0, Vec::len)
    }

    /// Viewers per painting per tick: `tick,painting_0,…,painting_{P-1}`.
    pub fn occupancy_csv(&self, painting_count: usize) -> String {
        Self::trace_csv(&self.occupancy_trace, painting_count)
    }

    /// Queue lengths per painting per tick, same layout as the occupancy trace.
    pub fn queue_csv(&self, painting_count: usize) -> String {
        Self::trace_csv(&self.queue_trace, painting_count)
    }

    /// Metrics summary as pretty-printed JSON.
    pub fn summary_json(&self) -> String {
        let n = self.visitors.len();
        let mean = |f: fn(&VisitorSummary) -> f64| {
            if n == 0 {
                0.0
            } else {
                self.visitors.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let summary = Summary {
            seed: self.seed,
            horizon: self.horizon,
            visitors: n,
            exited: self.visitors.iter().filter(|v| v.exited).count(),
            events: self.events.len(),
            bunching: bunching_index(self),
            satisfaction: satisfaction(self).ok(),
            mean_wait: mean(|v| f64::from(v.wait_time)),
            mean_seen: mean(|v| v.paintings_seen as f64),
            per_visitor: &self.visitors,
            config: &self.config,
        };
        serde_json::to_string_pretty(&summary).unwrap() + "\n"
    }
}
