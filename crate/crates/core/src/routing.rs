//! Routing multigraph: warehouse nodes split by direction of travel, with
//! straight, turn, reverse, shortcut and wait arcs whose durations come from
//! the robot's kinematics.
//!
//! Every warehouse node `n` gets a start node, a stop node, and for every
//! neighbor `m` an "arrive from m" node (heading = bearing m→n) and a
//! "depart to m" node (heading = bearing n→m). A robot sitting on a direction
//! node also carries a `reversed` bit: its yaw is the node heading, plus π when
//! reversed (driving backward). Arcs that swap which end of the robot faces
//! the direction of travel flip that bit.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{angle_diff, normalize_angle, Point};
use crate::kinematics::{segment_time, turn_time, KinematicLimits, KinematicsError, MotionProfile};
use crate::model::{NodeId, WarehouseGraph};
use crate::time::Time;

pub type RNodeId = usize;
pub type RArcId = usize;

/// Yaws closer than this are the same orientation.
pub const YAW_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum RoutingError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("node {0} has no arc to align with")]
    IsolatedNode(String),
    #[error("yaw {yaw:.4} at node {node} is not aligned with any incident arc")]
    UnalignedYaw { node: String, yaw: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DurationModel {
    /// Trapezoidal profiles from rest to rest under the acceleration limits.
    Kinematic,
    /// Instant acceleration: every motion runs at the speed limit throughout.
    NoInertia,
    /// Every move arc takes `seconds` per warehouse arc (and per turn).
    ConstantTime { seconds: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingConfig {
    pub duration_model: DurationModel,
    pub wait_quantum: Time,
    pub shortcuts: bool,
    /// Maximum deviation, radians, for consecutive arcs to count as collinear.
    pub collinear_tolerance: f64,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        RoutingConfig {
            duration_model: DurationModel::Kinematic,
            wait_quantum: Time::from_whole_secs(1),
            shortcuts: true,
            collinear_tolerance: 0.5f64.to_radians(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoutingNodeKind {
    Start,
    Stop,
    Arrive { from: NodeId },
    Depart { to: NodeId },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutingNode {
    pub base: NodeId,
    pub kind: RoutingNodeKind,
    pub heading: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    Straight,
    Shortcut,
    Turn,
    UTurn,
    /// Zero-duration swap between arriving and departing along the same line.
    Reverse,
    /// Zero-duration pass from an arrival to the opposite departure.
    Continue,
    Wait,
    Enter,
    Exit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Motion {
    /// Straight drive; `heading` is the direction of travel.
    Translate { from: Point, to: Point, heading: f64 },
    /// In-place rotation by signed `angle`, starting from node heading `from_heading`.
    Rotate { at: Point, from_heading: f64, angle: f64 },
    Stay { at: Point, heading: f64 },
}

#[derive(Clone, Debug)]
pub struct RoutingArc {
    pub from: RNodeId,
    pub to: RNodeId,
    pub kind: ArcKind,
    pub motion: Motion,
    /// Whether traversing the arc toggles the `reversed` bit.
    pub flips: bool,
    /// Planning duration for [unloaded, loaded].
    pub duration: [Time; 2],
    /// Planning motion profile for [unloaded, loaded].
    pub profile: [MotionProfile; 2],
    /// Time-optimal kinematic profile, regardless of the planning duration model.
    pub kinematic: [MotionProfile; 2],
    pub warehouse_arcs: usize,
}

impl RoutingArc {
    pub fn is_move(&self) -> bool {
        !matches!(self.kind, ArcKind::Wait | ArcKind::Enter | ArcKind::Exit)
            && self.duration.iter().any(|d| *d > Time::ZERO)
    }

    pub fn duration(&self, loaded: bool) -> Time {
        self.duration[loaded as usize]
    }

    /// Pose `t` seconds into the arc following `profile`, for a robot whose
    /// `reversed` bit is `reversed` when the arc starts.
    pub fn pose_with(&self, profile: &MotionProfile, reversed: bool, t: f64) -> (Point, f64) {
        let flip = if reversed { PI } else { 0.0 };
        match self.motion {
            Motion::Translate { from, to, heading } => {
                let (s, _) = profile.sample(t);
                let frac = if profile.distance > 0.0 { s / profile.distance } else { 1.0 };
                (from.lerp(to, frac.clamp(0.0, 1.0)), normalize_angle(heading + flip))
            }
            Motion::Rotate { at, from_heading, angle } => {
                let (s, _) = profile.sample(t);
                let frac = if profile.distance > 0.0 { s / profile.distance } else { 1.0 };
                (at, normalize_angle(from_heading + flip + angle * frac.clamp(0.0, 1.0)))
            }
            Motion::Stay { at, heading } => (at, normalize_angle(heading + flip)),
        }
    }

    pub fn pose(&self, reversed: bool, loaded: bool, t: f64) -> (Point, f64) {
        self.pose_with(&self.profile[loaded as usize], reversed, t)
    }
}

#[derive(Clone, Debug, Default)]
pub struct NodeRouting {
    pub start: RNodeId,
    pub stop: RNodeId,
    pub arrive: Vec<(NodeId, RNodeId)>,
    pub depart: Vec<(NodeId, RNodeId)>,
}

impl NodeRouting {
    pub fn direction_nodes(&self) -> impl Iterator<Item = RNodeId> + '_ {
        self.arrive.iter().chain(self.depart.iter()).map(|&(_, r)| r)
    }
}

/// Shortest obstacle-free times to a goal, indexed by routing node.
pub type DistanceTable = Arc<Vec<Time>>;

pub struct RoutingGraph {
    pub nodes: Vec<RoutingNode>,
    pub arcs: Vec<RoutingArc>,
    pub out: Vec<Vec<RArcId>>,
    pub inc: Vec<Vec<RArcId>>,
    pub per_node: Vec<NodeRouting>,
    pub positions: Vec<Point>,
    pub names: Vec<String>,
    pub limits: KinematicLimits,
    pub config: RoutingConfig,
    wait_arc: Vec<RArcId>,
    to_goal: RwLock<HashMap<(NodeId, bool), DistanceTable>>,
    to_pose: RwLock<HashMap<(NodeId, i64, bool), DistanceTable>>,
}

impl std::fmt::Debug for RoutingGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RoutingGraph").field("nodes", &self.nodes.len()).field("arcs", &self.arcs.len()).finish()
    }
}

struct Builder<'a> {
    graph: &'a WarehouseGraph,
    limits: &'a KinematicLimits,
    config: &'a RoutingConfig,
    nodes: Vec<RoutingNode>,
    arcs: Vec<RoutingArc>,
}

impl Builder<'_> {
    fn node(&mut self, base: NodeId, kind: RoutingNodeKind, heading: Option<f64>) -> RNodeId {
        self.nodes.push(RoutingNode { base, kind, heading });
        self.nodes.len() - 1
    }

    fn zero(&mut self, from: RNodeId, to: RNodeId, kind: ArcKind, flips: bool) {
        let at = self.graph.position(self.nodes[from].base);
        let heading = self.nodes[from].heading.or(self.nodes[to].heading).unwrap_or(0.0);
        let still = MotionProfile::fixed_duration(0.0, 0.0).expect("zero profile");
        self.arcs.push(RoutingArc {
            from,
            to,
            kind,
            motion: Motion::Stay { at, heading },
            flips,
            duration: [Time::ZERO; 2],
            profile: [still.clone(), still.clone()],
            kinematic: [still.clone(), still],
            warehouse_arcs: 0,
        });
    }

    fn wait(&mut self, at_node: RNodeId) -> RArcId {
        let at = self.graph.position(self.nodes[at_node].base);
        let heading = self.nodes[at_node].heading.unwrap_or(0.0);
        let q = self.config.wait_quantum;
        let still = MotionProfile::fixed_duration(0.0, q.secs()).expect("wait profile");
        self.arcs.push(RoutingArc {
            from: at_node,
            to: at_node,
            kind: ArcKind::Wait,
            motion: Motion::Stay { at, heading },
            flips: false,
            duration: [q; 2],
            profile: [still.clone(), still.clone()],
            kinematic: [still.clone(), still],
            warehouse_arcs: 0,
        });
        self.arcs.len() - 1
    }

    fn planning_profile(&self, kinematic: &MotionProfile, linear: bool, cap: f64, count: usize) -> Result<MotionProfile, KinematicsError> {
        match self.config.duration_model {
            DurationModel::Kinematic => Ok(kinematic.clone()),
            DurationModel::NoInertia => {
                let v = if linear { cap.min(self.limits.v_max) } else { self.limits.v_theta_max };
                MotionProfile::constant_speed(kinematic.distance, v)
            }
            DurationModel::ConstantTime { seconds } => {
                MotionProfile::fixed_duration(kinematic.distance, seconds * count.max(1) as f64)
            }
        }
    }

    fn translate(&mut self, from: RNodeId, to: RNodeId, kind: ArcKind, length: f64, cap: f64, count: usize) -> Result<(), KinematicsError> {
        let a = self.graph.position(self.nodes[from].base);
        let b = self.graph.position(self.nodes[to].base);
        let mut kinematic = Vec::new();
        let mut profile = Vec::new();
        for loaded in [false, true] {
            let k = segment_time(length, 0.0, cap, 0.0, self.limits, loaded)?;
            profile.push(self.planning_profile(&k, true, cap, count)?);
            kinematic.push(k);
        }
        self.push_motion(from, to, kind, Motion::Translate { from: a, to: b, heading: a.bearing(b) }, false, profile, kinematic, count);
        Ok(())
    }

    fn rotate(&mut self, from: RNodeId, to: RNodeId, kind: ArcKind, angle: f64, flips: bool) -> Result<(), KinematicsError> {
        let at = self.graph.position(self.nodes[from].base);
        let from_heading = self.nodes[from].heading.expect("direction node");
        let mut kinematic = Vec::new();
        let mut profile = Vec::new();
        for loaded in [false, true] {
            let k = turn_time(angle.abs(), self.limits, loaded)?;
            profile.push(self.planning_profile(&k, false, 0.0, 1)?);
            kinematic.push(k);
        }
        self.push_motion(from, to, kind, Motion::Rotate { at, from_heading, angle }, flips, profile, kinematic, 0);
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn push_motion(
        &mut self,
        from: RNodeId,
        to: RNodeId,
        kind: ArcKind,
        motion: Motion,
        flips: bool,
        profile: Vec<MotionProfile>,
        kinematic: Vec<MotionProfile>,
        count: usize,
    ) {
        let [p0, p1]: [MotionProfile; 2] = profile.try_into().expect("two loads");
        let [k0, k1]: [MotionProfile; 2] = kinematic.try_into().expect("two loads");
        self.arcs.push(RoutingArc {
            from,
            to,
            kind,
            motion,
            flips,
            duration: [Time::from_secs_ceil(p0.duration), Time::from_secs_ceil(p1.duration)],
            profile: [p0, p1],
            kinematic: [k0, k1],
            warehouse_arcs: count,
        });
    }
}

fn dir_lookup(list: &[(NodeId, RNodeId)], n: NodeId) -> Option<RNodeId> {
    list.iter().find(|(m, _)| *m == n).map(|&(_, r)| r)
}

impl RoutingGraph {
    pub fn build(graph: &WarehouseGraph, limits: &KinematicLimits, config: &RoutingConfig) -> Result<RoutingGraph, RoutingError> {
        limits.validate()?;
        let mut b = Builder { graph, limits, config, nodes: Vec::new(), arcs: Vec::new() };
        let mut per_node = Vec::with_capacity(graph.nodes.len());
        for n in graph.node_ids() {
            let p = graph.position(n);
            let start = b.node(n, RoutingNodeKind::Start, None);
            let stop = b.node(n, RoutingNodeKind::Stop, None);
            let mut nr = NodeRouting { start, stop, ..Default::default() };
            for m in graph.neighbors(n) {
                let q = graph.position(m);
                nr.arrive.push((m, b.node(n, RoutingNodeKind::Arrive { from: m }, Some(q.bearing(p)))));
                nr.depart.push((m, b.node(n, RoutingNodeKind::Depart { to: m }, Some(p.bearing(q)))));
            }
            per_node.push(nr);
        }

        // Straight arcs along warehouse arcs.
        for arc in &graph.arcs {
            let from = dir_lookup(&per_node[arc.from.0].depart, arc.to).expect("neighbor");
            let to = dir_lookup(&per_node[arc.to.0].arrive, arc.from).expect("neighbor");
            b.translate(from, to, ArcKind::Straight, arc.length, arc.speed_limit, 1)?;
        }

        // Shortcuts along collinear chains of pass-through nodes.
        if config.shortcuts {
            let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes.len()];
            for (i, a) in graph.arcs.iter().enumerate() {
                out_arcs[a.from.0].push(i);
            }
            for first in &graph.arcs {
                let origin = first.from;
                let heading = graph.position(first.from).bearing(graph.position(first.to));
                let (mut length, mut cap, mut count) = (first.length, first.speed_limit, 1usize);
                let mut at = first.to;
                let mut visited = vec![origin];
                loop {
                    if !graph.node(at).pass_through || visited.contains(&at) {
                        break;
                    }
                    visited.push(at);
                    let next = out_arcs[at.0].iter().map(|&i| &graph.arcs[i]).find(|a| {
                        angle_diff(graph.position(a.from).bearing(graph.position(a.to)), heading) <= config.collinear_tolerance
                    });
                    let Some(next) = next else { break };
                    length += next.length;
                    cap = cap.min(next.speed_limit);
                    count += 1;
                    let prev = at;
                    at = next.to;
                    if visited.contains(&at) {
                        break;
                    }
                    let from = dir_lookup(&per_node[origin.0].depart, first.to).expect("neighbor");
                    let to = dir_lookup(&per_node[at.0].arrive, prev).expect("neighbor");
                    b.translate(from, to, ArcKind::Shortcut, length, cap, count)?;
                }
            }
        }

        // Turning, reversing and pass-through arcs inside each node.
        for n in graph.node_ids() {
            let nr = per_node[n.0].clone();
            let turnable = graph.node(n).turnable;
            for &(a, arr) in &nr.arrive {
                for &(c, dep) in &nr.depart {
                    if a == c {
                        b.zero(arr, dep, ArcKind::Reverse, true);
                        b.zero(dep, arr, ArcKind::Reverse, true);
                        if turnable {
                            b.rotate(arr, dep, ArcKind::UTurn, PI, false)?;
                        }
                        continue;
                    }
                    let phi = normalize_angle(b.nodes[dep].heading.unwrap() - b.nodes[arr].heading.unwrap());
                    if phi.abs() <= config.collinear_tolerance {
                        b.zero(arr, dep, ArcKind::Continue, false);
                        if turnable {
                            b.rotate(arr, dep, ArcKind::Turn, PI, true)?;
                        }
                    } else if turnable {
                        b.rotate(arr, dep, ArcKind::Turn, phi, false)?;
                        b.rotate(arr, dep, ArcKind::Turn, phi - PI * phi.signum(), true)?;
                    }
                }
            }
            for &(_, dep) in &nr.depart {
                b.zero(nr.start, dep, ArcKind::Enter, false);
            }
            for &(_, arr) in &nr.arrive {
                b.zero(arr, nr.stop, ArcKind::Exit, false);
            }
        }

        let mut wait_arc = vec![usize::MAX; b.nodes.len()];
        for r in 0..b.nodes.len() {
            if b.nodes[r].heading.is_some() {
                wait_arc[r] = b.wait(r);
            }
        }

        let mut out = vec![Vec::new(); b.nodes.len()];
        let mut inc = vec![Vec::new(); b.nodes.len()];
        for (i, a) in b.arcs.iter().enumerate() {
            out[a.from].push(i);
            inc[a.to].push(i);
        }
        Ok(RoutingGraph {
            nodes: b.nodes,
            arcs: b.arcs,
            out,
            inc,
            per_node,
            positions: graph.nodes.iter().map(|n| n.position).collect(),
            names: graph.nodes.iter().map(|n| n.name.clone()).collect(),
            limits: *limits,
            config: config.clone(),
            wait_arc,
            to_goal: RwLock::new(HashMap::new()),
            to_pose: RwLock::new(HashMap::new()),
        })
    }

    pub fn warehouse_node_count(&self) -> usize {
        self.per_node.len()
    }

    pub fn wait_arc(&self, r: RNodeId) -> RArcId {
        self.wait_arc[r]
    }

    /// Yaw of a robot resting on direction node `r`.
    pub fn yaw(&self, r: RNodeId, reversed: bool) -> f64 {
        let h = self.nodes[r].heading.expect("direction node");
        normalize_angle(if reversed { h + PI } else { h })
    }

    /// Direction-node states at warehouse node `n` whose yaw matches `yaw`.
    pub fn states_with_yaw(&self, n: NodeId, yaw: f64) -> Vec<(RNodeId, bool)> {
        let mut out = Vec::new();
        for r in self.per_node[n.0].direction_nodes() {
            for rev in [false, true] {
                if angle_diff(self.yaw(r, rev), yaw) < YAW_TOLERANCE {
                    out.push((r, rev));
                }
            }
        }
        out
    }

    /// Default resting state at `n`: arrived driving forward from the first neighbor.
    pub fn default_state(&self, n: NodeId) -> Result<(RNodeId, bool), RoutingError> {
        self.per_node[n.0]
            .arrive
            .first()
            .map(|&(_, r)| (r, false))
            .ok_or_else(|| RoutingError::IsolatedNode(self.names[n.0].clone()))
    }

    /// Initial states for a robot resting at `n` with an optional yaw.
    pub fn initial_states(&self, n: NodeId, yaw: Option<f64>) -> Result<Vec<(RNodeId, bool)>, RoutingError> {
        match yaw {
            None => Ok(vec![self.default_state(n)?]),
            Some(y) => {
                let states = self.states_with_yaw(n, y);
                if states.is_empty() {
                    Err(RoutingError::UnalignedYaw { node: self.names[n.0].clone(), yaw: y })
                } else {
                    Ok(states)
                }
            }
        }
    }

    /// Backward Dijkstra from the given seeds over (node, reversed) states
    /// when `track_orientation`, else over nodes only (states share the slot).
    fn backward(&self, seeds: &[(RNodeId, bool)], loaded: bool, track_orientation: bool) -> Vec<Time> {
        let width = if track_orientation { 2 } else { 1 };
        let slot = |r: RNodeId, rev: bool| if track_orientation { 2 * r + rev as usize } else { r };
        let mut dist = vec![Time::INFINITY; self.nodes.len() * width];
        let mut heap = BinaryHeap::new();
        for &(r, rev) in seeds {
            dist[slot(r, rev)] = Time::ZERO;
            heap.push(Reverse((Time::ZERO, r, rev)));
        }
        while let Some(Reverse((d, r, rev))) = heap.pop() {
            if d > dist[slot(r, rev)] {
                continue;
            }
            for &ai in &self.inc[r] {
                let arc = &self.arcs[ai];
                if arc.kind == ArcKind::Wait {
                    continue;
                }
                let prev_rev = rev ^ (track_orientation && arc.flips);
                let nd = d + arc.duration(loaded);
                let s = slot(arc.from, prev_rev);
                if nd < dist[s] {
                    dist[s] = nd;
                    heap.push(Reverse((nd, arc.from, prev_rev)));
                }
            }
        }
        dist
    }

    /// Obstacle-free time to reach warehouse node `goal` (any orientation),
    /// indexed by routing node. Computed once per (goal, load) and cached.
    pub fn distances_to(&self, goal: NodeId, loaded: bool) -> DistanceTable {
        if let Some(t) = self.to_goal.read().expect("heuristic cache").get(&(goal, loaded)) {
            return t.clone();
        }
        let table = Arc::new(self.backward(&[(self.per_node[goal.0].stop, false)], loaded, false));
        self.to_goal.write().expect("heuristic cache").entry((goal, loaded)).or_insert(table).clone()
    }

    /// Obstacle-free time to rest at `goal` with yaw `yaw`, indexed by
    /// `2 * routing node + reversed`.
    pub fn distances_to_pose(&self, goal: NodeId, yaw: f64, loaded: bool) -> DistanceTable {
        let key = (goal, (normalize_angle(yaw) * 1000.0).round() as i64, loaded);
        if let Some(t) = self.to_pose.read().expect("heuristic cache").get(&key) {
            return t.clone();
        }
        let seeds = self.states_with_yaw(goal, yaw);
        let table = Arc::new(self.backward(&seeds, loaded, true));
        self.to_pose.write().expect("heuristic cache").entry(key).or_insert(table).clone()
    }

    /// Obstacle-free time between two warehouse nodes, ignoring orientation.
    pub fn node_distance(&self, from: NodeId, to: NodeId, loaded: bool) -> Time {
        self.distances_to(to, loaded)[self.per_node[from.0].start]
    }

    /// Obstacle-free time between resting poses. `from_yaw`/`to_yaw` of `None`
    /// mean any orientation.
    pub fn pose_distance(&self, from: NodeId, from_yaw: Option<f64>, to: NodeId, to_yaw: Option<f64>, loaded: bool) -> Time {
        match to_yaw {
            None => match from_yaw {
                None => self.node_distance(from, to, loaded),
                Some(y) => {
                    let table = self.distances_to(to, loaded);
                    self.states_with_yaw(from, y).iter().map(|&(r, _)| table[r]).min().unwrap_or(Time::INFINITY)
                }
            },
            Some(ty) => {
                let table = self.distances_to_pose(to, ty, loaded);
                let states = match from_yaw {
                    Some(y) => self.states_with_yaw(from, y),
                    None => self.per_node[from.0].direction_nodes().flat_map(|r| [(r, false), (r, true)]).collect(),
                };
                states.iter().map(|&(r, rev)| table[2 * r + rev as usize]).min().unwrap_or(Time::INFINITY)
            }
        }
    }

    pub fn arc_count_by_kind(&self, kind: ArcKind) -> usize {
        self.arcs.iter().filter(|a| a.kind == kind).count()
    }
}
