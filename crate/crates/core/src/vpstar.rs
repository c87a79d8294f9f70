//! Earliest-arrival search through an ordered list of via points, avoiding
//! the reservations of other robots.
//!
//! States are (routing node, reversed bit, load, via index, time). The queue
//! is ordered by `time + remaining lower bound + penalty`, where the penalty
//! pushes states with many via points still to reach behind the others.
//! Pruning only ever uses `time + lower bound`, so the penalty changes the
//! exploration order but not which solutions are reachable.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::{ReservationTable, SweepCache};
use crate::geometry::{angle_diff, normalize_angle};
use crate::model::{NodeId, RobotId};
use crate::routing::{ArcKind, DistanceTable, RArcId, RNodeId, RoutingGraph, YAW_TOLERANCE};
use crate::time::Time;
use crate::trajectory::{RestState, Step, StepKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViaPoint {
    pub node: NodeId,
    pub in_yaw: Option<f64>,
    pub in_load: Option<bool>,
    pub out_yaw: Option<f64>,
    pub out_load: Option<bool>,
    /// Time spent acting at the via point.
    pub action: Time,
    /// Stay at the via point forever once reached (last via point only).
    pub hold: bool,
}

impl ViaPoint {
    pub fn at(node: NodeId) -> Self {
        ViaPoint { node, in_yaw: None, in_load: None, out_yaw: None, out_load: None, action: Time::ZERO, hold: false }
    }

    pub fn with_yaw(mut self, yaw: Option<f64>) -> Self {
        self.in_yaw = yaw.map(normalize_angle);
        self
    }

    pub fn with_action(mut self, action: Time) -> Self {
        self.action = action;
        self
    }

    pub fn with_loads(mut self, in_load: Option<bool>, out_load: Option<bool>) -> Self {
        self.in_load = in_load;
        self.out_load = out_load;
        self
    }

    pub fn holding(mut self) -> Self {
        self.hold = true;
        self
    }

    /// The yaw the robot must have while acting. The robot does not rotate
    /// during an action, so in and out yaws must agree when both are given.
    pub fn required_yaw(&self) -> Result<Option<f64>, SearchError> {
        match (self.in_yaw, self.out_yaw) {
            (Some(a), Some(b)) if angle_diff(a, b) > YAW_TOLERANCE => {
                Err(SearchError::InvalidVia(format!("in yaw {a:.3} and out yaw {b:.3} differ at node {}", self.node)))
            }
            (a, b) => Ok(a.or(b).map(normalize_angle)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub penalty: bool,
    pub penalty_per_via: Time,
    /// Stop at the first solution instead of exhausting the queue.
    pub first_solution: bool,
    /// Secondary criterion: least move time among arrivals in the same bucket.
    pub two_criteria: bool,
    pub arrival_bucket: Time,
    /// Arrival times in the same `dedupe_quantum`-long slot at the same state
    /// count as duplicates. One second matches the wait step.
    pub dedupe_quantum: Time,
    /// How far past the last finite reservation the search may go.
    pub horizon_slack: Time,
    pub max_expansions: Option<usize>,
    /// Lower bounds that account for the yaw required at each via point.
    pub orientation_heuristic: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            penalty: true,
            penalty_per_via: Time::from_whole_secs(1000),
            first_solution: true,
            two_criteria: false,
            arrival_bucket: Time::from_whole_secs(2),
            dedupe_quantum: Time::from_whole_secs(1),
            horizon_slack: Time::from_whole_secs(3600),
            max_expansions: Some(2_000_000),
            orientation_heuristic: false,
        }
    }
}

impl SearchOptions {
    /// Run to queue exhaustion with exact-time duplicate detection.
    pub fn exhaustive() -> Self {
        SearchOptions { first_solution: false, dedupe_quantum: Time(1), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub visited: usize,
    pub pushed: usize,
    pub wall: Duration,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("no trajectory through the via points ({} states visited)", .0.visited)]
    Infeasible(SearchStats),
    #[error("search stopped after {} expansions", .0.visited)]
    LimitReached(SearchStats),
    #[error("invalid via point: {0}")]
    InvalidVia(String),
}

impl SearchError {
    pub fn stats(&self) -> SearchStats {
        match self {
            SearchError::Infeasible(s) | SearchError::LimitReached(s) => *s,
            SearchError::InvalidVia(_) => SearchStats::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViaVisit {
    pub via: usize,
    pub arrival: Time,
    pub departure: Time,
    /// Index of the action step in the result's steps.
    pub step: usize,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub steps: Vec<Step>,
    /// Time the last via point is reached (before its action).
    pub arrival: Time,
    pub visits: Vec<ViaVisit>,
    pub end: RestState,
    pub move_time: Time,
    pub stats: SearchStats,
}

/// What a search sees: the robot's graph and sweeps, and everyone else's reservations.
#[derive(Clone, Copy)]
pub struct SearchContext<'a> {
    pub graph: &'a RoutingGraph,
    pub sweeps: &'a SweepCache,
    pub table: &'a ReservationTable,
    pub robot: RobotId,
}

/// Penalty added to the heap score with `remaining` via points still to reach.
pub fn penalty(remaining: usize, per_via: Time) -> Time {
    Time(per_via.0 * remaining.saturating_sub(1) as i64)
}

#[derive(Clone, Copy, Debug)]
enum How {
    Start,
    Arc(RArcId),
    Wait,
    Via(usize),
}

#[derive(Clone, Copy, Debug)]
struct Node {
    r: RNodeId,
    rev: bool,
    load: bool,
    vp: usize,
    t: Time,
    mv: Time,
    parent: usize,
    how: How,
}

const NO_PARENT: usize = usize::MAX;

/// Remaining-duration lower bounds through the via points.
struct Bounds {
    to_via: Vec<Option<DistanceTable>>,
    by_pose: Vec<bool>,
    suffix: Vec<Time>,
    action_suffix: Vec<Time>,
}

impl Bounds {
    fn new(graph: &RoutingGraph, vias: &[ViaPoint], yaws: &[Option<f64>], load_after: &[bool], refined: bool) -> Bounds {
        let k = vias.len();
        let mut to_via = vec![None; k];
        let mut by_pose = vec![false; k];
        for i in 1..k {
            let load = load_after[i - 1];
            match (refined, yaws[i]) {
                (true, Some(y)) => {
                    to_via[i] = Some(graph.distances_to_pose(vias[i].node, y, load));
                    by_pose[i] = true;
                }
                _ => to_via[i] = Some(graph.distances_to(vias[i].node, load)),
            }
        }
        let mut suffix = vec![Time::ZERO; k];
        let mut action_suffix = vec![Time::ZERO; k];
        // suffix[vp] covers via vp+1 .. k-1: actions at vp+1..=k-2 and the legs between them.
        for vp in (0..k.saturating_sub(2)).rev() {
            let i = vp + 1;
            let (from_yaw, to_yaw) = if refined { (yaws[i], yaws[i + 1]) } else { (None, None) };
            let leg = graph.pose_distance(vias[i].node, from_yaw, vias[i + 1].node, to_yaw, load_after[i]);
            suffix[vp] = suffix[vp + 1] + vias[i].action + leg;
            action_suffix[vp] = action_suffix[vp + 1] + vias[i].action;
        }
        Bounds { to_via, by_pose, suffix, action_suffix }
    }

    fn remaining(&self, r: RNodeId, rev: bool, vp: usize) -> Time {
        let table = self.to_via[vp + 1].as_ref().expect("bound table");
        let first = if self.by_pose[vp + 1] { table[2 * r + rev as usize] } else { table[r] };
        first + self.suffix[vp]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct HeapKey {
    score: Time,
    seq: u64,
    idx: usize,
}

#[derive(Clone, Copy)]
struct Solution {
    idx: usize,
    arrival: Time,
    mv: Time,
}

/// Earliest-arrival search from one of `start` (all at `start_time`) through `vias`.
///
/// `vias[0]` is where the robot is now; its action, if any, runs first.
pub fn vp_star(
    ctx: &SearchContext<'_>,
    start: &[(RNodeId, bool)],
    start_load: bool,
    start_time: Time,
    vias: &[ViaPoint],
    opts: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    let clock = Instant::now();
    let graph = ctx.graph;
    let k = vias.len();
    if k == 0 {
        return Err(SearchError::InvalidVia("empty via point list".into()));
    }
    if start.is_empty() {
        return Err(SearchError::InvalidVia("no start state".into()));
    }
    for &(r, _) in start {
        if graph.nodes[r].base != vias[0].node || graph.nodes[r].heading.is_none() {
            return Err(SearchError::InvalidVia("start state is not a direction node at the first via point".into()));
        }
    }
    if vias[..k - 1].iter().any(|v| v.hold) {
        return Err(SearchError::InvalidVia("only the last via point may hold".into()));
    }
    let yaws = vias.iter().map(|v| v.required_yaw()).collect::<Result<Vec<_>, _>>()?;
    let mut load_before = vec![start_load; k];
    let mut load_after = vec![start_load; k];
    for i in 0..k {
        if i > 0 {
            load_before[i] = load_after[i - 1];
        }
        if let Some(l) = vias[i].in_load {
            if l != load_before[i] {
                return Err(SearchError::InvalidVia(format!("via point {i} expects load {l} but the robot carries {}", load_before[i])));
            }
        }
        load_after[i] = vias[i].out_load.unwrap_or(load_before[i]);
    }

    let mut stats = SearchStats::default();
    let stationary_ok = |r: RNodeId, rev: bool, t: Time, d: Time, forever: bool| {
        let region = ctx.sweeps.resting(r, rev);
        if forever {
            ctx.table.can_stay(ctx.robot, region, t)
        } else if d > Time::ZERO {
            !ctx.table.conflicts(ctx.robot, t, t + d, region)
        } else {
            true
        }
    };
    let yaw_ok = |r: RNodeId, rev: bool, i: usize| yaws[i].is_none_or(|y| angle_diff(graph.yaw(r, rev), y) < YAW_TOLERANCE);

    let mut arena: Vec<Node> = Vec::new();

    // Robot is already at its only via point.
    if k == 1 {
        let ok_start: Vec<_> = start.iter().copied().filter(|&(r, rev)| yaw_ok(r, rev, 0)).collect();
        for (r, rev) in ok_start {
            if stationary_ok(r, rev, start_time, vias[0].action, vias[0].hold) {
                arena.push(Node { r, rev, load: start_load, vp: 0, t: start_time, mv: Time::ZERO, parent: NO_PARENT, how: How::Start });
                stats.wall = clock.elapsed();
                let sol = Solution { idx: 0, arrival: start_time, mv: Time::ZERO };
                return Ok(reconstruct(graph, &arena, sol, vias, &load_after, stats));
            }
        }
        stats.wall = clock.elapsed();
        return Err(SearchError::Infeasible(stats));
    }

    let bounds = Bounds::new(graph, vias, &yaws, &load_after, opts.orientation_heuristic);
    let static_from = start_time.max(ctx.table.max_finite_end() + ctx.table.margin());
    let horizon = static_from + opts.horizon_slack;
    let quantum = opts.dedupe_quantum.max(Time(1));
    let bucket = opts.arrival_bucket.max(Time(1));
    // Two-criteria first-solution search treats arrivals in one bucket as the same state.
    let key_quantum = if opts.two_criteria && opts.first_solution { bucket.max(quantum) } else { quantum };

    let mut heap: BinaryHeap<Reverse<HeapKey>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut seen: FxHashMap<(RNodeId, bool, usize, i64), Time> = FxHashMap::default();
    let mut static_best: FxHashMap<(RNodeId, bool, usize), Vec<(Time, Time)>> = FxHashMap::default();
    let mut best: Option<Solution> = None;

    let better = |best: &Option<Solution>, arrival: Time, mv: Time| match best {
        None => true,
        Some(b) if opts.two_criteria => {
            let (nb, bb) = (arrival.bucket(bucket), b.arrival.bucket(bucket));
            nb < bb || (nb == bb && mv < b.mv)
        }
        Some(b) => arrival < b.arrival,
    };
    // Can a state with this time, move time and remaining bound still improve?
    let promising = |best: &Option<Solution>, n: &Node, rem: Time| match best {
        None => true,
        Some(b) if opts.two_criteria => {
            let (nb, bb) = ((n.t + rem).bucket(bucket), b.arrival.bucket(bucket));
            let rem_move = Time(rem.0 - bounds.action_suffix[n.vp].0);
            nb < bb || (nb == bb && n.mv + rem_move < b.mv)
        }
        Some(b) => n.t + rem <= b.arrival,
    };

    macro_rules! try_push {
        ($node:expr) => {{
            let node: Node = $node;
            let rem = bounds.remaining(node.r, node.rev, node.vp);
            let mut accept = node.t <= horizon && !rem.is_infinite() && promising(&best, &node, rem);
            if accept {
                if node.t >= static_from {
                    let entries = static_best.entry((node.r, node.rev, node.vp)).or_default();
                    if entries.iter().any(|&(t, mv)| t <= node.t && (!opts.two_criteria || mv <= node.mv)) {
                        accept = false;
                    } else {
                        entries.retain(|&(t, mv)| !(node.t <= t && (!opts.two_criteria || node.mv <= mv)));
                        entries.push((node.t, node.mv));
                    }
                } else {
                    let key = (node.r, node.rev, node.vp, node.t.bucket(key_quantum));
                    match seen.get_mut(&key) {
                        Some(mv) if !opts.two_criteria || *mv <= node.mv => accept = false,
                        Some(mv) => *mv = node.mv,
                        None => {
                            seen.insert(key, node.mv);
                        }
                    }
                }
            }
            if accept {
                let remaining = k - 1 - node.vp;
                let p = if opts.penalty { penalty(remaining, opts.penalty_per_via) } else { Time::ZERO };
                arena.push(node);
                seq += 1;
                stats.pushed += 1;
                heap.push(Reverse(HeapKey { score: node.t + rem + p, seq, idx: arena.len() - 1 }));
            }
        }};
    }

    for &(r, rev) in start {
        let root = Node { r, rev, load: start_load, vp: 0, t: start_time, mv: Time::ZERO, parent: NO_PARENT, how: How::Start };
        let d0 = vias[0].action;
        if d0 > Time::ZERO || vias[0].out_load.is_some() {
            if !yaw_ok(r, rev, 0) || !stationary_ok(r, rev, start_time, d0, false) {
                continue;
            }
            arena.push(root);
            let parent = arena.len() - 1;
            try_push!(Node { t: start_time + d0, load: load_after[0], parent, how: How::Via(0), ..root });
        } else {
            try_push!(root);
        }
    }

    while let Some(Reverse(key)) = heap.pop() {
        let cur = arena[key.idx];
        let rem = bounds.remaining(cur.r, cur.rev, cur.vp);
        if !promising(&best, &cur, rem) {
            continue;
        }
        stats.visited += 1;
        if opts.max_expansions.is_some_and(|m| stats.visited > m) {
            stats.wall = clock.elapsed();
            return Err(SearchError::LimitReached(stats));
        }

        // Reaching the next via point.
        let next = cur.vp + 1;
        let mut expand_current = true;
        if graph.nodes[cur.r].base == vias[next].node && yaw_ok(cur.r, cur.rev, next) {
            let terminal = next == k - 1;
            if stationary_ok(cur.r, cur.rev, cur.t, vias[next].action, terminal && vias[next].hold) {
                if terminal {
                    if better(&best, cur.t, cur.mv) {
                        best = Some(Solution { idx: key.idx, arrival: cur.t, mv: cur.mv });
                    }
                    if opts.first_solution {
                        break;
                    }
                } else {
                    try_push!(Node {
                        t: cur.t + vias[next].action,
                        load: load_after[next],
                        vp: next,
                        parent: key.idx,
                        how: How::Via(next),
                        ..cur
                    });
                    expand_current = !opts.first_solution;
                }
                if opts.first_solution {
                    expand_current = false;
                }
            }
        }
        if !expand_current {
            continue;
        }

        for &ai in &graph.out[cur.r] {
            let arc = &graph.arcs[ai];
            match arc.kind {
                ArcKind::Enter | ArcKind::Exit => continue,
                ArcKind::Wait => {
                    if cur.t >= static_from {
                        continue;
                    }
                    // Wait on into the next key, or the waited state would be a duplicate of this one.
                    let d = arc.duration(cur.load);
                    let mut end = cur.t + d;
                    while d > Time::ZERO && end.bucket(key_quantum) == cur.t.bucket(key_quantum) {
                        end += d;
                    }
                    if ctx.table.conflicts(ctx.robot, cur.t, end, ctx.sweeps.resting(cur.r, cur.rev)) {
                        continue;
                    }
                    try_push!(Node { t: end, parent: key.idx, how: How::Wait, ..cur });
                }
                _ => {
                    let d = arc.duration(cur.load);
                    if d > Time::ZERO && !ctx.table.motion_is_free(ctx.robot, cur.t, &ctx.sweeps.arc(ai, cur.load, cur.rev)) {
                        continue;
                    }
                    try_push!(Node {
                        r: arc.to,
                        rev: cur.rev ^ arc.flips,
                        t: cur.t + d,
                        mv: cur.mv + d,
                        parent: key.idx,
                        how: How::Arc(ai),
                        ..cur
                    });
                }
            }
        }
    }

    stats.wall = clock.elapsed();
    match best {
        Some(sol) => Ok(reconstruct(graph, &arena, sol, vias, &load_after, stats)),
        None => Err(SearchError::Infeasible(stats)),
    }
}

fn reconstruct(graph: &RoutingGraph, arena: &[Node], sol: Solution, vias: &[ViaPoint], load_after: &[bool], stats: SearchStats) -> SearchResult {
    let mut chain = Vec::new();
    let mut i = sol.idx;
    while i != NO_PARENT {
        chain.push(i);
        i = arena[i].parent;
    }
    chain.reverse();
    let mut steps: Vec<Step> = Vec::new();
    for w in chain.windows(2) {
        let (p, n) = (arena[w[0]], arena[w[1]]);
        let base = Step { kind: StepKind::Wait, start: p.t, end: n.t, from: p.r, to: n.r, reversed: p.rev, loaded: p.load };
        match n.how {
            How::Arc(arc) => steps.push(Step { kind: StepKind::Move { arc }, ..base }),
            How::Wait => match steps.last_mut() {
                Some(last) if last.kind == StepKind::Wait && last.to == p.r && last.end == p.t => last.end = n.t,
                _ => steps.push(base),
            },
            How::Via(via) => steps.push(Step { kind: StepKind::Action { via, load_after: n.load }, ..base }),
            How::Start => {}
        }
    }
    let last = arena[sol.idx];
    let k = vias.len();
    let fin = &vias[k - 1];
    steps.push(Step {
        kind: StepKind::Action { via: k - 1, load_after: load_after[k - 1] },
        start: last.t,
        end: last.t + fin.action,
        from: last.r,
        to: last.r,
        reversed: last.rev,
        loaded: last.load,
    });
    let visits = steps
        .iter()
        .enumerate()
        .filter_map(|(idx, s)| match s.kind {
            StepKind::Action { via, .. } => Some(ViaVisit { via, arrival: s.start, departure: s.end, step: idx }),
            _ => None,
        })
        .collect();
    let end = RestState { node: last.r, reversed: last.rev, loaded: load_after[k - 1] };
    let move_time = crate::trajectory::move_time(&steps, graph);
    SearchResult { steps, arrival: sol.arrival, visits, end, move_time, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::SweepParams;
    use crate::geometry::ConvexPolygon;
    use crate::kinematics::KinematicLimits;
    use crate::model::Layout;
    use crate::routing::RoutingConfig;
    use std::sync::Arc;

    fn line3() -> (Layout, Arc<RoutingGraph>, SweepCache) {
        let l = Layout::from_json(
            r#"{"nodes": [
                {"id": "a", "x": 0, "y": 0, "kind": "junction", "turnable": true},
                {"id": "b", "x": 1, "y": 0, "kind": "shelf", "turnable": true, "pass_through": false},
                {"id": "c", "x": 2, "y": 0, "kind": "junction", "turnable": true}],
              "arcs": [{"from": "a", "to": "b", "speed_limit": 0.2}, {"from": "b", "to": "a", "speed_limit": 0.2},
                       {"from": "b", "to": "c", "speed_limit": 0.2}, {"from": "c", "to": "b", "speed_limit": 0.2}]}"#,
        )
        .unwrap();
        let g = Arc::new(RoutingGraph::build(&l.graph, &KinematicLimits::default(), &RoutingConfig::default()).unwrap());
        let sweeps = SweepCache::new(g.clone(), ConvexPolygon::rectangle(0.8, 0.6).padded(0.05), SweepParams::default());
        (l, g, sweeps)
    }

    #[test]
    fn penalty_values() {
        let p = Time::from_whole_secs(1000);
        assert_eq!(penalty(1, p), Time::ZERO);
        assert_eq!(penalty(0, p), Time::ZERO);
        assert_eq!(penalty(3, p), Time::from_whole_secs(2000));
    }

    #[test]
    fn start_is_only_via_point() {
        let (l, g, sweeps) = line3();
        let table = ReservationTable::new(Time::ZERO);
        let ctx = SearchContext { graph: &g, sweeps: &sweeps, table: &table, robot: 0 };
        let a = l.graph.lookup("a").unwrap();
        let start = g.initial_states(a, Some(0.0)).unwrap();
        let t0 = Time::from_whole_secs(7);
        let res = vp_star(&ctx, &start, false, t0, &[ViaPoint::at(a)], &SearchOptions::default()).unwrap();
        assert_eq!(res.arrival, t0);
        assert_eq!(res.move_time, Time::ZERO);
    }

    #[test]
    fn line_with_two_via_points() {
        let (l, g, sweeps) = line3();
        let table = ReservationTable::new(Time::ZERO);
        let ctx = SearchContext { graph: &g, sweeps: &sweeps, table: &table, robot: 0 };
        let (a, b, c) = (l.graph.lookup("a").unwrap(), l.graph.lookup("b").unwrap(), l.graph.lookup("c").unwrap());
        let start = g.initial_states(a, Some(0.0)).unwrap();
        let vias = [
            ViaPoint::at(a),
            ViaPoint::at(b).with_action(Time::from_whole_secs(10)).with_loads(Some(false), Some(true)),
            ViaPoint::at(c),
        ];
        for opts in [SearchOptions::default(), SearchOptions::exhaustive()] {
            let res = vp_star(&ctx, &start, false, Time::ZERO, &vias, &opts).unwrap();
            // 1 m empty, 10 s action, 1 m loaded; b does not allow driving through.
            assert_eq!(res.arrival, Time::from_secs(5.4 + 10.0 + 5.8));
            assert_eq!(res.visits.len(), 2);
            assert!(res.end.loaded);
        }
    }

    #[test]
    fn required_yaw_forces_turn() {
        let (l, g, sweeps) = line3();
        let table = ReservationTable::new(Time::ZERO);
        let ctx = SearchContext { graph: &g, sweeps: &sweeps, table: &table, robot: 0 };
        let (a, b) = (l.graph.lookup("a").unwrap(), l.graph.lookup("b").unwrap());
        let start = g.initial_states(a, Some(0.0)).unwrap();
        let vias = [ViaPoint::at(a), ViaPoint::at(b).with_yaw(Some(std::f64::consts::PI))];
        let res = vp_star(&ctx, &start, false, Time::ZERO, &vias, &SearchOptions::exhaustive()).unwrap();
        let half = g.arcs.iter().find(|a| a.kind == ArcKind::UTurn).unwrap().duration(false);
        assert_eq!(res.arrival, Time::from_secs(5.4) + half);
        // Yaws not aligned with any arc at b can never be reached.
        let vias = [ViaPoint::at(a), ViaPoint::at(b).with_yaw(Some(std::f64::consts::FRAC_PI_2))];
        let opts = SearchOptions { horizon_slack: Time::from_whole_secs(10), ..SearchOptions::exhaustive() };
        assert!(vp_star(&ctx, &start, false, Time::ZERO, &vias, &opts).is_err());
    }

    #[test]
    fn mismatched_in_out_yaw_is_rejected() {
        let mut v = ViaPoint::at(NodeId(0)).with_yaw(Some(0.0));
        v.out_yaw = Some(1.0);
        assert!(matches!(v.required_yaw(), Err(SearchError::InvalidVia(_))));
    }

    #[test]
    fn blocked_goal_is_infeasible() {
        let (l, g, sweeps) = line3();
        let mut table = ReservationTable::new(Time::ZERO);
        let c = l.graph.lookup("c").unwrap();
        let (r, rev) = g.default_state(c).unwrap();
        table.reserve(1, Time::ZERO, Time::INFINITY, sweeps.resting(r, rev).clone(), 0);
        let ctx = SearchContext { graph: &g, sweeps: &sweeps, table: &table, robot: 0 };
        let a = l.graph.lookup("a").unwrap();
        let start = g.initial_states(a, Some(0.0)).unwrap();
        let opts = SearchOptions { horizon_slack: Time::from_whole_secs(100), ..Default::default() };
        let err = vp_star(&ctx, &start, false, Time::ZERO, &[ViaPoint::at(a), ViaPoint::at(c)], &opts).unwrap_err();
        assert!(matches!(err, SearchError::Infeasible(_)), "{err}");
    }
}
