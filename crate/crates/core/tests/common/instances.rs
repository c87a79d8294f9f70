//! Small random search instances: a handful of warehouse nodes, a few via
//! points and up to two robots already moving through the area.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use warehouse_mapf::collision::{ReservationTable, SweepCache, SweepParams};
use warehouse_mapf::geometry::ConvexPolygon;
use warehouse_mapf::kinematics::KinematicLimits;
use warehouse_mapf::model::{ArcRecord, Layout, LayoutFile, NodeKind, NodeRecord};
use warehouse_mapf::routing::{ArcKind, RNodeId, RoutingConfig, RoutingGraph};
use warehouse_mapf::trajectory::{reserve_steps, Step, StepKind};
use warehouse_mapf::vpstar::ViaPoint;
use warehouse_mapf::Time;

pub struct Instance {
    pub layout: Layout,
    pub graph: Arc<RoutingGraph>,
    pub sweeps: SweepCache,
    pub table: ReservationTable,
    pub start: Vec<(RNodeId, bool)>,
    pub start_time: Time,
    pub vias: Vec<ViaPoint>,
    pub obstacles: Vec<Vec<Step>>,
}

impl Instance {
    pub fn horizon(&self, slack: Time) -> Time {
        self.static_from() + slack
    }

    /// When the last finite reservation (plus margin) has passed.
    pub fn static_from(&self) -> Time {
        self.start_time.max(self.table.max_finite_end() + self.table.margin())
    }

    /// Slack that puts the search horizon at `horizon` from time zero.
    pub fn slack_for(&self, horizon: Time) -> Time {
        (horizon - self.static_from()).max(Time::ZERO)
    }
}

pub const MAX_ROUTING_NODES: usize = 30;

pub fn random_layout(rng: &mut ChaCha8Rng) -> LayoutFile {
    loop {
        let n = rng.random_range(3..=5);
        let spacing = if rng.random_bool(0.5) { 1.0 } else { 1.5 };
        let mut cells: Vec<(i32, i32)> = Vec::new();
        while cells.len() < n {
            let c = (rng.random_range(0..3), rng.random_range(0..3));
            if !cells.contains(&c) {
                cells.push(c);
            }
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for i in 1..n {
            edges.push((rng.random_range(0..i), i));
        }
        for _ in 0..rng.random_range(0..=2) {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            if a != b && !edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
                edges.push((a, b));
            }
        }
        let mut degree = vec![0; n];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        if degree.iter().map(|d| 2 + 2 * d).sum::<usize>() > MAX_ROUTING_NODES {
            continue;
        }
        let nodes = cells
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| NodeRecord {
                id: format!("v{i}"),
                x: x as f64 * spacing,
                y: y as f64 * spacing,
                kind: NodeKind::Junction,
                turnable: rng.random_bool(0.7),
                pass_through: rng.random_bool(0.8),
                yaw: None,
            })
            .collect();
        let mut arcs = Vec::new();
        for &(a, b) in &edges {
            let speed_limit = if rng.random_bool(0.8) { 0.2 } else { 0.1 };
            arcs.push(ArcRecord { from: format!("v{a}"), to: format!("v{b}"), speed_limit, length: None });
            arcs.push(ArcRecord { from: format!("v{b}"), to: format!("v{a}"), speed_limit, length: None });
        }
        return LayoutFile { nodes, arcs, agents: Vec::new(), workstations: Vec::new() };
    }
}

/// Random walk over the routing graph lasting until at least `until`.
pub fn random_walk(graph: &RoutingGraph, rng: &mut ChaCha8Rng, start_time: Time, until: Time) -> Vec<Step> {
    let dirs: Vec<RNodeId> = (0..graph.nodes.len()).filter(|&r| graph.nodes[r].heading.is_some()).collect();
    let mut r = dirs[rng.random_range(0..dirs.len())];
    let mut rev = rng.random_bool(0.5);
    let mut t = start_time;
    let mut steps = Vec::new();
    while t < until {
        if rng.random_bool(0.3) {
            let d = Time::from_whole_secs(rng.random_range(1..=5));
            steps.push(Step { kind: StepKind::Wait, start: t, end: t + d, from: r, to: r, reversed: rev, loaded: false });
            t = t + d;
            continue;
        }
        let moves: Vec<usize> = graph.out[r]
            .iter()
            .copied()
            .filter(|&a| !matches!(graph.arcs[a].kind, ArcKind::Wait | ArcKind::Enter | ArcKind::Exit))
            .collect();
        if moves.is_empty() {
            break;
        }
        let a = moves[rng.random_range(0..moves.len())];
        let d = graph.arcs[a].duration(false);
        steps.push(Step { kind: StepKind::Move { arc: a }, start: t, end: t + d, from: r, to: graph.arcs[a].to, reversed: rev, loaded: false });
        rev ^= graph.arcs[a].flips;
        r = graph.arcs[a].to;
        t = t + d;
    }
    steps
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let file = random_layout(&mut rng);
    let layout = Layout::from_file(&file).expect("generated layout is valid");
    let graph = Arc::new(RoutingGraph::build(&layout.graph, &KinematicLimits::default(), &RoutingConfig::default()).unwrap());
    let footprint = ConvexPolygon::rectangle(0.8, 0.6).padded(0.05);
    let sweeps = SweepCache::new(graph.clone(), footprint, SweepParams::default());
    let margin = if rng.random_bool(0.7) { Time::ZERO } else { Time::from_whole_secs(1) };
    let mut table = ReservationTable::new(margin);

    let n = layout.graph.nodes.len();
    let pick_state = |rng: &mut ChaCha8Rng, node: usize| {
        let dirs: Vec<RNodeId> = graph.per_node[node].direction_nodes().collect();
        (dirs[rng.random_range(0..dirs.len())], rng.random_bool(0.5))
    };
    let start_node = rng.random_range(0..n);
    let (r0, rev0) = pick_state(&mut rng, start_node);
    let start_yaw = graph.yaw(r0, rev0);
    let start = graph.initial_states(layout.graph.node_ids().nth(start_node).unwrap(), Some(start_yaw)).unwrap();

    let k = rng.random_range(2..=3);
    let mut vias = vec![ViaPoint::at(warehouse_mapf::model::NodeId(start_node)).with_yaw(Some(start_yaw))];
    for i in 1..k {
        let node = rng.random_range(0..n);
        let yaw = if rng.random_bool(0.5) {
            let (r, rev) = pick_state(&mut rng, node);
            Some(graph.yaw(r, rev))
        } else {
            None
        };
        let action = Time::from_secs(rng.random_range(0..=10) as f64 * 0.5);
        let loads = if i == 1 && k == 3 { (Some(false), Some(true)) } else { (None, None) };
        vias.push(ViaPoint::at(warehouse_mapf::model::NodeId(node)).with_yaw(yaw).with_action(action).with_loads(loads.0, loads.1));
    }
    if rng.random_bool(0.3) {
        let last = vias.pop().unwrap();
        vias.push(last.holding());
    }

    let mut obstacles = Vec::new();
    for robot in 1..=rng.random_range(0..=2) {
        let begin = Time::from_secs(rng.random_range(0..20) as f64);
        let until = Time::from_secs(rng.random_range(20..150) as f64);
        let steps = random_walk(&graph, &mut rng, begin, until);
        reserve_steps(&mut table, robot, &steps, &sweeps, robot as u64);
        obstacles.push(steps);
    }
    Instance { layout, graph, sweeps, table, start, start_time: Time::ZERO, vias, obstacles }
}
