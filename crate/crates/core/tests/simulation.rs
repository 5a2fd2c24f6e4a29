use museum_swn::config::{PolicyKind, SimConfig, Topology};
use museum_swn::netgraph::graph_metrics;
use museum_swn::simcore::{bunching_index, run, simulate, EventKind, SimState};
use museum_swn::visitors::{Activity, Location};
use museum_swn::{build_gallery, Graph};
use museum_swn::gallery::InfoSpec;
use proptest::prelude::*;

/// Steps a run to completion, checking the bookkeeping against the visitors'
/// own contexts after every tick.
fn check_every_tick(cfg: &SimConfig, seed: u64) -> Result<(), TestCaseError> {
    let sc = cfg.instantiate(seed).unwrap();
    let g = &sc.gallery;
    let n = sc.visitors.len();
    let mut state = SimState::new(g, sc.visitors, cfg.population.dwell, sc.sim_seed).unwrap();
    let policy = cfg.policy.policy();
    while state.clock() < cfg.horizon && !state.all_exited() {
        state.step(g, &policy);
        prop_assert_eq!(state.census().total(), n);
        let mut viewing = vec![0u32; g.painting_count()];
        let mut queued = vec![0u32; g.painting_count()];
        let mut reading = vec![0u32; g.info_nodes().len()];
        for id in 0..n {
            let ctx = state.context_of(id).unwrap();
            prop_assert_eq!(ctx.identity, id);
            match (ctx.location, ctx.activity) {
                (Location::Node(p), Activity::Viewing) => viewing[p] += 1,
                (Location::Node(p), Activity::Queued) => queued[p] += 1,
                (Location::Node(i), Activity::ReadingInfo) => reading[i - g.painting_count()] += 1,
                (Location::InTransit, Activity::Moving) | (Location::Exited, Activity::Done) => {}
                other => return Err(TestCaseError::fail(format!("inconsistent context {other:?}"))),
            }
        }
        let occ = state.occupancy();
        prop_assert_eq!(&occ.paintings, &viewing);
        prop_assert_eq!(&occ.info, &reading);
        prop_assert_eq!(state.queue_lengths(), queued);
        for p in 0..g.painting_count() {
            prop_assert!(occ.paintings[p] <= g.effective_capacity(p).unwrap());
        }
        for (i, node) in g.info_nodes().iter().enumerate() {
            prop_assert!(occ.info[i] <= node.relief);
        }
    }
    Ok(())
}

fn config(n: usize, k: usize, p: f64, visitors: usize, capacity: u32, policy: PolicyKind, horizon: u32) -> SimConfig {
    let mut cfg = SimConfig {
        topology: Topology::Lattice { n, k, p },
        horizon,
        ..Default::default()
    };
    cfg.gallery.capacity = capacity;
    cfg.population.visitor_count = visitors;
    cfg.policy.kind = policy;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conservation_and_capacity_hold_every_tick(
        n in 5usize..=30,
        p in 0.0f64..=1.0,
        visitors in 1usize..=100,
        capacity in 1u32..=4,
        policy in prop::sample::select(PolicyKind::ALL.to_vec()),
        horizon in 50u32..=400,
        seed: u64,
    ) {
        check_every_tick(&config(n, 2, p, visitors, capacity, policy, horizon), seed)?;
    }
}

#[test]
fn runs_are_reproducible() {
    let cfg = SimConfig::default();
    for seed in [0, 7, 99] {
        let a = run(&cfg, seed).unwrap();
        let b = run(&cfg, seed).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.events_csv(), b.events_csv());
        assert_ne!(a.events, run(&cfg, seed + 1).unwrap().events);
    }
}

#[test]
fn default_scenario_empties_before_the_horizon() {
    for kind in PolicyKind::ALL {
        let mut cfg = SimConfig::default();
        cfg.policy.kind = kind;
        let r = run(&cfg, 7).unwrap();
        assert_eq!(r.visitors.len(), 50);
        assert!(r.visitors.iter().all(|v| v.exited), "{kind:?}");
        let exits = r.events.iter().filter(|e| e.kind == EventKind::Exit).count();
        assert_eq!(exits, 50);
        assert_eq!(r.occupancy_trace.len(), 600);
    }
}

#[test]
fn ample_capacity_never_queues() {
    for kind in PolicyKind::ALL {
        for seed in 0..5 {
            let cfg = config(20, 4, 0.1, 50, 50, kind, 600);
            let b = bunching_index(&run(&cfg, seed).unwrap());
            assert_eq!(b.overflow_minutes, 0);
            assert_eq!(b.peak_queue, 0);
            assert_eq!(b.mona_lisa, 0.0);
        }
    }
}

#[test]
fn guided_visitors_use_information_points() {
    let mut cfg = config(10, 2, 0.0, 100, 1, PolicyKind::SwnGuided, 600);
    cfg.population.arrival_rate = 5.0;
    let reads: usize = (0..5)
        .map(|seed| run(&cfg, seed).unwrap().events.iter().filter(|e| e.kind == EventKind::Read).count())
        .sum();
    assert!(reads > 0);

    cfg.policy.kind = PolicyKind::Hotspot;
    let reads: usize = (0..5)
        .map(|seed| run(&cfg, seed).unwrap().events.iter().filter(|e| e.kind == EventKind::Read).count())
        .sum();
    assert_eq!(reads, 0);
}

#[test]
fn information_points_leave_graph_metrics_alone() {
    let cfg = SimConfig::default();
    let graph = cfg.painting_graph(7).unwrap();
    let before = graph_metrics(&graph);
    let mut with_info = cfg.clone();
    with_info.gallery.info = InfoSpec {
        count: 3,
        service_time: 2,
        relief: 2,
    };
    let g = with_info.build_gallery(graph.clone(), 7).unwrap();
    assert_eq!(g.info_nodes().len(), 60);
    assert_eq!(graph_metrics(g.painting_graph()), before);
    assert_eq!(g.effective_capacity(0).unwrap(), 3 + 6);
}

#[test]
fn lone_visitor_walks_views_and_leaves() {
    // Two paintings, one strongly preferred; dwell fixed at the median.
    let graph = Graph::from_edges(2, [(0, 1)]).unwrap();
    let gallery = build_gallery(
        graph,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        &[1, 1],
        &[InfoSpec::default(); 2],
        2,
    )
    .unwrap();
    let mut cfg = SimConfig::default();
    cfg.population.visitor_count = 1;
    cfg.gallery.style_dims = 2;
    cfg.population.dwell.quick.dispersion = 0.0;
    cfg.population.dwell.slow.dispersion = 0.0;
    let mut visitors = cfg.sample_visitors(1).unwrap();
    visitors[0].interests = vec![1.0, 0.0];
    visitors[0].time_budget = 1000.0;
    let median = cfg.population.dwell.params(visitors[0].vtype).median;
    let r = simulate(&gallery, visitors, cfg.population.dwell, &cfg.policy.policy(), 600, 3).unwrap();
    let kinds: Vec<_> = r.events.iter().map(|e| (e.tick, e.kind, e.node)).collect();
    // Score 1 at painting 0 stretches the dwell by 1.5, score 0 at painting 1 halves it.
    let first = (median * 1.5).ceil() as u32;
    let second = (median * 0.5).ceil() as u32;
    // The tick a visitor sets off counts as the first minute of the walk.
    let view0 = 2;
    let view1 = view0 + first + 1;
    assert_eq!(
        kinds,
        vec![
            (0, EventKind::Enter, None),
            (0, EventKind::Move, Some(0)),
            (view0 - 1, EventKind::View, Some(0)),
            (view0 + first - 1, EventKind::Move, Some(1)),
            (view1 - 1, EventKind::View, Some(1)),
            (view1 + second - 1, EventKind::Exit, None),
        ]
    );
}
