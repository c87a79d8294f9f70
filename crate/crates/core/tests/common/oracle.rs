//! Earliest arrival over a time-expanded graph.
//!
//! States are (routing node, reversed bit, via index, exact time). From every
//! state the robot may traverse any collision-free arc, wait one wait quantum,
//! or (when allowed) perform the next via point's action. Only two prunings
//! are applied, both exact: states are ordered by time plus an obstacle-free
//! travel bound computed here by plain Dijkstra, and once every finite
//! reservation has passed the world is static, so a later arrival at the same
//! state cannot beat an earlier one.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use warehouse_mapf::collision::{ReservationTable, SweepCache};
use warehouse_mapf::geometry::angle_diff;
use warehouse_mapf::model::RobotId;
use warehouse_mapf::routing::{ArcKind, RNodeId, RoutingGraph};
use warehouse_mapf::vpstar::ViaPoint;
use warehouse_mapf::Time;

pub struct OracleResult {
    pub arrival: Time,
    /// Least move time over trajectories whose arrival falls in the same
    /// `bucket`-long interval as `arrival`.
    pub bucket_move: Time,
    pub expanded: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn earliest_arrival(
    graph: &RoutingGraph,
    sweeps: &SweepCache,
    table: &ReservationTable,
    robot: RobotId,
    start: &[(RNodeId, bool)],
    start_load: bool,
    start_time: Time,
    vias: &[ViaPoint],
    horizon: Time,
    bucket: Time,
) -> Option<OracleResult> {
    let k = vias.len();
    let yaw = |i: usize| vias[i].in_yaw.or(vias[i].out_yaw);
    let mut loads = vec![start_load; k];
    loads[0] = vias[0].out_load.unwrap_or(start_load);
    for i in 1..k {
        loads[i] = vias[i].out_load.unwrap_or(loads[i - 1]);
    }
    let rest_free = |r: RNodeId, rev: bool, from: Time, to: Option<Time>| {
        let region = sweeps.resting(r, rev);
        match to {
            None => table.can_stay(robot, region, from),
            Some(to) if to > from => !table.conflicts(robot, from, to, region),
            Some(_) => true,
        }
    };
    let bound = lower_bounds(graph, vias, &loads);
    let h = |r: RNodeId, vp: usize| bound[vp][r];
    // From here on nothing in the table changes any more.
    let static_from = table
        .records()
        .map(|(_, rec)| if rec.end.is_infinite() { rec.start } else { rec.end })
        .fold(start_time, Time::max)
        + table.margin();
    let mut settled: HashMap<(RNodeId, bool, usize), Vec<(Time, Time)>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    for &(r, rev) in start {
        let d0 = vias[0].action;
        if let Some(y) = yaw(0) {
            if angle_diff(graph.yaw(r, rev), y) > 1e-3 {
                continue;
            }
        }
        if rest_free(r, rev, start_time, Some(start_time + d0)) && k > 1 && !h(r, 0).is_infinite() {
            heap.push(Reverse((start_time + d0 + h(r, 0), start_time + d0, Time::ZERO, r, rev, 0usize)));
        } else if k == 1 && rest_free(r, rev, start_time, Some(start_time + d0)) {
            heap.push(Reverse((start_time, start_time, Time::ZERO, r, rev, 0usize)));
        }
    }
    if k == 1 {
        return heap
            .into_iter()
            .find(|Reverse((_, _, _, r, rev, _))| !vias[0].hold || rest_free(*r, *rev, start_time, None))
            .map(|_| OracleResult { arrival: start_time, bucket_move: Time::ZERO, expanded: 0 });
    }
    let mut expanded = 0;
    let mut found: Option<OracleResult> = None;
    while let Some(Reverse((f_score, t, mv, r, rev, vp))) = heap.pop() {
        if let Some(f) = &found {
            // Anything still queued arrives no earlier than its score.
            if f_score.bucket(bucket) > f.arrival.bucket(bucket) {
                break;
            }
        }
        if !seen.insert((t, r, rev, vp)) {
            continue;
        }
        if t >= static_from {
            let front = settled.entry((r, rev, vp)).or_default();
            if front.iter().any(|&(t0, m0)| t0 <= t && m0 <= mv) {
                continue;
            }
            front.push((t, mv));
        }
        expanded += 1;
        let load = loads[vp];
        let next = vp + 1;
        let at_next = graph.nodes[r].base == vias[next].node
            && yaw(next).is_none_or(|y| angle_diff(graph.yaw(r, rev), y) < 1e-3);
        if at_next {
            let terminal = next == k - 1;
            let until = if terminal && vias[next].hold { None } else { Some(t + vias[next].action) };
            if rest_free(r, rev, t, until) {
                if terminal {
                    match &mut found {
                        None => found = Some(OracleResult { arrival: t, bucket_move: mv, expanded }),
                        Some(f) => {
                            f.bucket_move = f.bucket_move.min(mv);
                            f.expanded = expanded;
                        }
                    }
                } else if !h(r, next).is_infinite() {
                    let nt = t + vias[next].action;
                    heap.push(Reverse((nt + h(r, next), nt, mv, r, rev, next)));
                }
            }
        }
        for &ai in &graph.out[r] {
            let arc = &graph.arcs[ai];
            if matches!(arc.kind, ArcKind::Enter | ArcKind::Exit) {
                continue;
            }
            let d = arc.duration(load);
            let nt = t + d;
            if nt > horizon {
                continue;
            }
            let free = if arc.kind == ArcKind::Wait {
                rest_free(r, rev, t, Some(nt))
            } else {
                d == Time::ZERO || table.motion_is_free(robot, t, &sweeps.arc(ai, load, rev))
            };
            if free && !h(arc.to, vp).is_infinite() {
                let nmv = if arc.kind == ArcKind::Wait { mv } else { mv + d };
                heap.push(Reverse((nt + h(arc.to, vp), nt, nmv, arc.to, rev ^ arc.flips, vp)));
            }
        }
    }
    found
}

/// `bound[vp][r]`: least obstacle-free time from routing node `r`, having
/// completed via point `vp`, to reach the last via point. Yaw requirements are
/// ignored, which only makes the bound smaller.
fn lower_bounds(graph: &RoutingGraph, vias: &[ViaPoint], loads: &[bool]) -> Vec<Vec<Time>> {
    let k = vias.len();
    let n = graph.nodes.len();
    let mut bound = vec![vec![Time::INFINITY; n]; k];
    bound[k - 1] = vec![Time::ZERO; n];
    for vp in (0..k - 1).rev() {
        // Seeds: being at the next via point, then acting there and going on.
        let next = vp + 1;
        let mut dist = vec![Time::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for r in 0..n {
            if graph.nodes[r].base == vias[next].node {
                let rest = if next == k - 1 { Time::ZERO } else { vias[next].action + bound[next][r] };
                if !rest.is_infinite() && rest < dist[r] {
                    dist[r] = rest;
                    heap.push(Reverse((rest, r)));
                }
            }
        }
        while let Some(Reverse((d, r))) = heap.pop() {
            if d > dist[r] {
                continue;
            }
            for &ai in &graph.inc[r] {
                let arc = &graph.arcs[ai];
                if matches!(arc.kind, ArcKind::Wait | ArcKind::Enter | ArcKind::Exit) {
                    continue;
                }
                let nd = d + arc.duration(loads[vp]);
                if nd < dist[arc.from] {
                    dist[arc.from] = nd;
                    heap.push(Reverse((nd, arc.from)));
                }
            }
        }
        bound[vp] = dist;
    }
    bound
}
