//! Timed robot trajectories over the routing graph.

use serde::{Deserialize, Serialize};

use crate::collision::{RecordId, ReservationTable, SweepCache};
use crate::geometry::{normalize_angle, ConvexPolygon, Point};
use crate::model::RobotId;
use crate::routing::{RArcId, RNodeId, RoutingGraph};
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Move { arc: RArcId },
    Wait,
    /// Acting at a via point; `load_after` is the load once the action ends.
    Action { via: usize, load_after: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(flatten)]
    pub kind: StepKind,
    pub start: Time,
    pub end: Time,
    pub from: RNodeId,
    pub to: RNodeId,
    /// Travel orientation bit when the step starts.
    pub reversed: bool,
    pub loaded: bool,
}

impl Step {
    pub fn duration(&self) -> Time {
        self.end - self.start
    }

    pub fn reversed_after(&self, graph: &RoutingGraph) -> bool {
        match self.kind {
            StepKind::Move { arc } => self.reversed ^ graph.arcs[arc].flips,
            _ => self.reversed,
        }
    }

    pub fn loaded_after(&self) -> bool {
        match self.kind {
            StepKind::Action { load_after, .. } => load_after,
            _ => self.loaded,
        }
    }

    pub fn is_move(&self, graph: &RoutingGraph) -> bool {
        matches!(self.kind, StepKind::Move { arc } if graph.arcs[arc].is_move())
    }
}

/// Where a robot rests: routing node, travel orientation and load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RestState {
    pub node: RNodeId,
    pub reversed: bool,
    pub loaded: bool,
}

/// The spec-level robot state at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub time: Time,
    pub position: Point,
    pub yaw: f64,
    pub speed: f64,
    pub angular_speed: f64,
    pub loaded: bool,
}

pub fn rest_state_after(steps: &[Step], graph: &RoutingGraph) -> Option<RestState> {
    steps.last().map(|s| RestState { node: s.to, reversed: s.reversed_after(graph), loaded: s.loaded_after() })
}

/// Pose of a robot following `steps` at time `t`; before the first step it is
/// at the first step's origin, after the last at its end.
pub fn pose_at(steps: &[Step], graph: &RoutingGraph, t: Time) -> Option<(Point, f64)> {
    let first = steps.first()?;
    let rest = |r: RNodeId, rev: bool| (graph.positions[graph.nodes[r].base.0], graph.yaw(r, rev));
    if t < first.start {
        return Some(rest(first.from, first.reversed));
    }
    let idx = steps.partition_point(|s| s.end <= t);
    if idx >= steps.len() {
        let last = steps.last()?;
        return Some(rest(last.to, last.reversed_after(graph)));
    }
    let s = &steps[idx];
    if t < s.start {
        // Gap between steps: resting where the previous one ended.
        let prev = &steps[idx - 1];
        return Some(rest(prev.to, prev.reversed_after(graph)));
    }
    match s.kind {
        StepKind::Move { arc } => {
            let a = &graph.arcs[arc];
            let (p, yaw) = a.pose(s.reversed, s.loaded, (t - s.start).secs());
            Some((p, normalize_angle(yaw)))
        }
        _ => Some(rest(s.from, s.reversed)),
    }
}

/// Occupied regions of a trajectory, merging consecutive stationary steps.
pub fn occupancy(steps: &[Step], sweeps: &SweepCache) -> Vec<(Time, Time, ConvexPolygon)> {
    let graph = &sweeps.graph;
    let mut out: Vec<(Time, Time, ConvexPolygon)> = Vec::new();
    let mut rest: Option<(Time, Time, RNodeId, bool)> = None;
    let flush = |rest: &mut Option<(Time, Time, RNodeId, bool)>, out: &mut Vec<(Time, Time, ConvexPolygon)>| {
        if let Some((s, e, r, rev)) = rest.take() {
            if e > s {
                out.push((s, e, sweeps.resting(r, rev).clone()));
            }
        }
    };
    let mut cursor: Option<Time> = None;
    let mut filled = Vec::with_capacity(steps.len());
    for step in steps {
        if let Some(c) = cursor {
            if step.start > c {
                filled.push(Step { kind: StepKind::Wait, start: c, end: step.start, to: step.from, ..*step });
            }
        }
        filled.push(*step);
        cursor = Some(step.end);
    }
    for step in &filled {
        match step.kind {
            StepKind::Move { arc } if graph.arcs[arc].duration(step.loaded) > Time::ZERO => {
                flush(&mut rest, &mut out);
                for piece in sweeps.arc(arc, step.loaded, step.reversed).iter() {
                    out.push((step.start + piece.start, step.start + piece.end, piece.region.clone()));
                }
            }
            StepKind::Move { .. } => {}
            StepKind::Wait | StepKind::Action { .. } => {
                let same_pose = |r: RNodeId, rev: bool| {
                    graph.nodes[r].base == graph.nodes[step.from].base
                        && crate::geometry::angle_diff(graph.yaw(r, rev), graph.yaw(step.from, step.reversed)) < 1e-9
                };
                match &mut rest {
                    Some((_, e, r, rev)) if *e == step.start && same_pose(*r, *rev) => *e = step.end,
                    _ => {
                        flush(&mut rest, &mut out);
                        rest = Some((step.start, step.end, step.from, step.reversed));
                    }
                }
            }
        }
    }
    flush(&mut rest, &mut out);
    out
}

/// Reserves a trajectory's occupancy; returns the record ids.
pub fn reserve_steps(table: &mut ReservationTable, robot: RobotId, steps: &[Step], sweeps: &SweepCache, tag: u64) -> Vec<RecordId> {
    occupancy(steps, sweeps)
        .into_iter()
        .map(|(s, e, region)| table.reserve(robot, s, e, region, tag))
        .collect()
}

/// Sum of the durations of move steps with nonzero length.
pub fn move_time(steps: &[Step], graph: &RoutingGraph) -> Time {
    steps.iter().filter(|s| s.is_move(graph)).fold(Time::ZERO, |acc, s| acc + s.duration())
}
