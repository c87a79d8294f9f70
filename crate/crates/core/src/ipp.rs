//! Interleaved prioritized planning.
//!
//! Orders are planned one after the other. Within an order, the task whose
//! robot frees up first is planned next, with one via-point search from the
//! robot's current pose through pickup and delivery and on to its waiting
//! place. The leg back to the waiting place stays reserved until the robot's
//! next task is planned: if that task can start right away the leg is dropped,
//! otherwise the robot drives it and waits there.
//!
//! Keeping that leg and an open-ended hold at the waiting place in the table
//! is what makes the scheme complete: every robot can always get out of the
//! way, so the next search always has at least one solution.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{assign, earliest_start, AgentState, Assignment, AssignmentError, IdealTask};
use crate::collision::{RecordId, ReservationTable};
use crate::model::{Direction, NodeId, Order, RobotId, Task};
use crate::routing::{RoutingConfig, RoutingError};
use crate::time::Time;
use crate::trajectory::{reserve_steps, rest_state_after, RestState, Step, StepKind};
use crate::vpstar::{vp_star, SearchContext, SearchError, SearchOptions, SearchStats, ViaPoint};
use crate::world::World;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    /// Safety margin added on both sides of every reservation.
    pub margin: Time,
    /// Plan each leg separately instead of one search through all via points.
    pub sequential: bool,
    /// Keep each robot's way back to its waiting place reserved.
    pub reserve_waiting: bool,
    pub search: SearchOptions,
    pub agent_cap: Option<usize>,
    /// Waits at the waiting place are rounded up to this.
    pub wait_quantum: Time,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            margin: Time::ZERO,
            sequential: false,
            reserve_waiting: true,
            search: SearchOptions::default(),
            agent_cap: None,
            wait_quantum: Time::from_whole_secs(1),
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("no way for robot {robot} to reach its waiting place: {source}")]
    InitialWaitingPath { robot: RobotId, source: SearchError },
    #[error("task {task} (order {order}) infeasible for robot {robot}: {source}")]
    Infeasible { task: usize, order: usize, robot: RobotId, source: SearchError },
    #[error("robot {robot} cannot get out of the way after its last task: {source}")]
    ReturnToWaiting { robot: RobotId, source: SearchError },
}

impl PlanError {
    /// True when the planner ran but found no plan, as opposed to bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, PlanError::InitialWaitingPath { .. } | PlanError::Infeasible { .. } | PlanError::ReturnToWaiting { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    /// Committed way to the waiting place before a wait.
    ToWaiting,
    Wait,
    Task,
    /// Way back to the waiting place after the robot's last task.
    Return,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedStep {
    #[serde(flatten)]
    pub step: Step,
    pub leg: Leg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotPlan {
    pub name: String,
    pub start: RestState,
    pub steps: Vec<PlannedStep>,
    /// Ways to the waiting place that were reserved and later dropped.
    pub discarded_waiting_paths: usize,
}

impl RobotPlan {
    pub fn raw_steps(&self) -> Vec<Step> {
        self.steps.iter().map(|s| s.step).collect()
    }

    pub fn end(&self) -> Time {
        self.steps.last().map_or(Time::ZERO, |s| s.step.end)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    /// Index into the assignment's task list.
    pub index: usize,
    pub task: Task,
    pub robot: RobotId,
    pub workstation: NodeId,
    pub direction: Direction,
    pub departure: Time,
    pub pickup_arrival: Time,
    pub pickup_end: Time,
    pub delivery_arrival: Time,
    pub delivery_end: Time,
    /// Obstacle-free duration of the task from the pose it departed from.
    pub ideal: Time,
    /// Time spent at the waiting place before departing.
    pub waited: Time,
    pub visited: usize,
}

impl TaskOutcome {
    pub fn actual(&self) -> Time {
        self.delivery_end - self.departure
    }

    /// Interval of this task's action at its workstation.
    pub fn workstation_interval(&self) -> (Time, Time) {
        match self.direction {
            Direction::Pickup => (self.delivery_arrival, self.delivery_end),
            Direction::Delivery => (self.pickup_arrival, self.pickup_end),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub searches: usize,
    pub visited: usize,
    pub pushed: usize,
    /// Wall time of the whole run, seconds.
    pub wall: f64,
}

impl PlanStats {
    fn add(&mut self, s: &SearchStats) {
        self.searches += 1;
        self.visited += s.visited;
        self.pushed += s.pushed;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub routing: RoutingConfig,
    pub options: PlanOptions,
    pub robots: Vec<RobotPlan>,
    /// In planning order.
    pub tasks: Vec<TaskOutcome>,
    pub makespan: Time,
    pub ideal_makespan: Time,
    pub stats: PlanStats,
}

impl Plan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Plan> {
        serde_json::from_str(text)
    }

    /// Latest completion time over all tasks.
    pub fn makespan_from_tasks(&self) -> Time {
        self.tasks.iter().map(|t| t.delivery_end).max().unwrap_or(Time::ZERO)
    }
}

struct RobotState {
    pos: RestState,
    avail: Time,
    steps: Vec<PlannedStep>,
    /// Open-ended hold where the robot rests once its committed steps end.
    park: Option<RecordId>,
    w_steps: Vec<Step>,
    w_ids: Vec<RecordId>,
    w_hold: Option<RecordId>,
    discarded: usize,
}

struct Planner<'a> {
    world: &'a World,
    opts: &'a PlanOptions,
    table: ReservationTable,
    robots: Vec<RobotState>,
    starts: Vec<RestState>,
    stats: PlanStats,
}

/// Assigns `orders` with the rule-based heuristic, then plans them.
pub fn plan_orders(world: &World, orders: &[Order], opts: &PlanOptions) -> Result<(Assignment, Plan), PlanError> {
    let agents: Vec<AgentState> = world
        .layout
        .agents
        .iter()
        .map(|a| AgentState { available: Time::ZERO, position: a.start, yaw: a.start_yaw })
        .collect();
    let assignment = assign(orders, &agents, &world.layout.workstations, &world.graph, &world.layout.graph, opts.agent_cap)?;
    let plan = plan(world, orders, &assignment, opts)?;
    Ok((assignment, plan))
}

pub fn plan(world: &World, orders: &[Order], assignment: &Assignment, opts: &PlanOptions) -> Result<Plan, PlanError> {
    let clock = Instant::now();
    let mut p = Planner::new(world, opts)?;
    p.initial_waiting_paths()?;

    let n_ws = world.layout.workstations.len();
    let mut ws_free = vec![Time::ZERO; n_ws];
    let mut outcomes = Vec::with_capacity(assignment.tasks.len());
    for &oi in &assignment.sequence {
        let wi = assignment.order_workstation[oi];
        let ws = world.layout.workstations[wi];
        let mut pending: Vec<usize> = assignment.tasks_of_order(oi).map(|(i, _)| i).collect();
        let mut ws_end = ws_free[wi];
        while !pending.is_empty() {
            // The robot that frees up first goes next.
            pending.sort_by_key(|&ti| (p.robots[assignment.tasks[ti].robot].avail, ti));
            let ti = pending.remove(0);
            let at = &assignment.tasks[ti];
            let out = p.plan_task(ti, &at.task, at.robot, orders[oi].direction, ws, ws_free[wi])?;
            ws_end = ws_end.max(out.workstation_interval().1);
            outcomes.push(out);
        }
        ws_free[wi] = ws_end;
    }
    p.finish()?;

    let makespan = outcomes.iter().map(|t| t.delivery_end).max().unwrap_or(Time::ZERO);
    let mut stats = p.stats;
    stats.wall = clock.elapsed().as_secs_f64();
    let robots = p
        .robots
        .into_iter()
        .zip(&world.layout.agents)
        .zip(p.starts)
        .map(|((r, a), start)| RobotPlan { name: a.name.clone(), start, steps: r.steps, discarded_waiting_paths: r.discarded })
        .collect();
    Ok(Plan {
        routing: world.graph.config.clone(),
        options: opts.clone(),
        robots,
        tasks: outcomes,
        makespan,
        ideal_makespan: assignment.ideal_makespan,
        stats,
    })
}

impl<'a> Planner<'a> {
    fn new(world: &'a World, opts: &'a PlanOptions) -> Result<Planner<'a>, PlanError> {
        let graph = &world.graph;
        let mut table = ReservationTable::new(opts.margin);
        let mut robots = Vec::new();
        let mut starts = Vec::new();
        // Everyone occupies their start pose until told otherwise.
        for (i, agent) in world.layout.agents.iter().enumerate() {
            let (node, reversed) = graph.initial_states(agent.start, agent.start_yaw)?[0];
            let pos = RestState { node, reversed, loaded: false };
            let park = table.reserve(i, Time::ZERO, Time::INFINITY, world.sweeps(i).resting(node, reversed).clone(), i as u64);
            starts.push(pos);
            robots.push(RobotState {
                pos,
                avail: Time::ZERO,
                steps: Vec::new(),
                park: Some(park),
                w_steps: Vec::new(),
                w_ids: Vec::new(),
                w_hold: None,
                discarded: 0,
            });
        }
        Ok(Planner { world, opts, table, robots, starts, stats: PlanStats::default() })
    }

    fn base(&self, r: RobotId) -> NodeId {
        self.world.graph.nodes[self.robots[r].pos.node].base
    }

    fn yaw(&self, r: RobotId) -> f64 {
        let pos = self.robots[r].pos;
        self.world.graph.yaw(pos.node, pos.reversed)
    }

    /// Robots away from their waiting place get a reserved way there, in id order.
    fn initial_waiting_paths(&mut self) -> Result<(), PlanError> {
        if !self.opts.reserve_waiting {
            return Ok(());
        }
        for r in 0..self.robots.len() {
            let waiting = self.world.layout.agents[r].waiting;
            if self.base(r) == waiting {
                continue;
            }
            if let Some(p) = self.robots[r].park.take() {
                self.table.remove(p);
            }
            let vias = [ViaPoint::at(self.base(r)), ViaPoint::at(waiting).holding()];
            let steps = self
                .search(r, Time::ZERO, &vias)
                .map_err(|source| PlanError::InitialWaitingPath { robot: r, source })?;
            self.reserve_waiting_leg(r, steps);
        }
        Ok(())
    }

    /// Reserves `steps` as the robot's provisional way to its waiting place,
    /// with an open-ended hold once there.
    fn reserve_waiting_leg(&mut self, r: RobotId, steps: Vec<Step>) {
        let sweeps = self.world.sweeps(r);
        let ids = reserve_steps(&mut self.table, r, &steps, sweeps, r as u64);
        let end = rest_state_after(&steps, &self.world.graph).expect("nonempty");
        let t = steps.last().expect("nonempty").end;
        let hold = self.table.reserve(r, t, Time::INFINITY, sweeps.resting(end.node, end.reversed).clone(), r as u64);
        let st = &mut self.robots[r];
        st.w_steps = steps;
        st.w_ids = ids;
        st.w_hold = Some(hold);
    }

    /// Turns the provisional way to the waiting place into committed steps.
    fn commit_waiting_leg(&mut self, r: RobotId, leg: Leg) {
        let graph = &self.world.graph;
        let st = &mut self.robots[r];
        if st.w_steps.is_empty() {
            return;
        }
        let steps = std::mem::take(&mut st.w_steps);
        st.w_ids.clear();
        st.park = st.w_hold.take();
        st.pos = rest_state_after(&steps, graph).expect("nonempty");
        st.avail = steps.last().expect("nonempty").end;
        append(&mut st.steps, &steps, leg, None);
    }

    /// Search from the robot's current pose at `t`; `vias[0]` is where it is.
    fn search(&mut self, r: RobotId, t: Time, vias: &[ViaPoint]) -> Result<Vec<Step>, SearchError> {
        let graph = &self.world.graph;
        let ctx = SearchContext { graph, sweeps: self.world.sweeps(r), table: &self.table, robot: r };
        let pos = self.robots[r].pos;
        let start = graph.states_with_yaw(graph.nodes[pos.node].base, graph.yaw(pos.node, pos.reversed));
        if !self.opts.sequential {
            let res = vp_star(&ctx, &start, pos.loaded, t, vias, &self.opts.search);
            self.stats.add(&res.as_ref().map_or_else(|e| e.stats(), |r| r.stats));
            return res.map(|r| r.steps);
        }
        // One leg at a time, each blind to what comes after it.
        let mut steps: Vec<Step> = Vec::new();
        let (mut start, mut load, mut t) = (start, pos.loaded, t);
        for i in 1..vias.len() {
            let from = ViaPoint::at(vias[i - 1].node);
            let res = vp_star(&ctx, &start, load, t, &[from, vias[i].clone()], &self.opts.search);
            self.stats.add(&res.as_ref().map_or_else(|e| e.stats(), |r| r.stats));
            let res = res?;
            let end = res.end;
            t = res.steps.last().map_or(t, |s| s.end);
            for mut s in res.steps {
                if let StepKind::Action { via, load_after } = s.kind {
                    s.kind = StepKind::Action { via: via + i - 1, load_after };
                }
                steps.push(s);
            }
            start = graph.states_with_yaw(graph.nodes[end.node].base, graph.yaw(end.node, end.reversed));
            load = end.loaded;
        }
        Ok(steps)
    }

    /// Sends the robot to its waiting place if it is elsewhere, then waits
    /// there until the task can start. Returns the time waited.
    fn wait_at_waiting_place(&mut self, ti: usize, task: &Task, r: RobotId, ws: NodeId, ws_free: Time) -> Result<Time, PlanError> {
        let world = self.world;
        let waiting = world.layout.agents[r].waiting;
        if !self.robots[r].w_steps.is_empty() {
            self.commit_waiting_leg(r, Leg::ToWaiting);
        } else if self.base(r) != waiting {
            let t = self.robots[r].avail;
            if let Some(p) = self.robots[r].park.take() {
                self.table.truncate(p, t);
            }
            let vias = [ViaPoint::at(self.base(r)), ViaPoint::at(waiting).holding()];
            let steps = self
                .search(r, t, &vias)
                .map_err(|source| PlanError::Infeasible { task: ti, order: task.order, robot: r, source })?;
            self.reserve_waiting_leg(r, steps);
            self.commit_waiting_leg(r, Leg::ToWaiting);
        }
        let ideal = IdealTask::compute(&world.graph, &world.layout.graph, self.base(r), Some(self.yaw(r)), task);
        let avail = self.robots[r].avail;
        let es = earliest_start(avail, task, &ideal, ws, ws_free);
        let waited = (es - avail).max(Time::ZERO).ceil_to(self.opts.wait_quantum);
        if waited > Time::ZERO {
            let st = &mut self.robots[r];
            let at = st.pos.node;
            let wait = Step { kind: StepKind::Wait, start: avail, end: avail + waited, from: at, to: at, reversed: st.pos.reversed, loaded: st.pos.loaded };
            append(&mut st.steps, &[wait], Leg::Wait, None);
            st.avail = avail + waited;
        }
        Ok(waited)
    }

    /// Searches the task's trajectory from the robot's pose at its
    /// availability, returning the departure time and the ideal duration.
    fn depart(&mut self, r: RobotId, task: &Task, waiting: NodeId) -> Result<(Time, Time, Vec<Step>), SearchError> {
        let graph = &self.world.graph;
        let wh = &self.world.layout.graph;
        let departure = self.robots[r].avail;
        let ideal = IdealTask::compute(graph, wh, self.base(r), Some(self.yaw(r)), task);
        let pickup = ViaPoint::at(task.pickup)
            .with_yaw(wh.node(task.pickup).action_yaw)
            .with_action(Time::from_secs(task.pickup_duration))
            .with_loads(Some(false), Some(true));
        let delivery = ViaPoint::at(task.delivery)
            .with_yaw(wh.node(task.delivery).action_yaw)
            .with_action(Time::from_secs(task.delivery_duration))
            .with_loads(Some(true), Some(false));
        let mut vias = vec![ViaPoint::at(self.base(r)), pickup];
        if self.opts.reserve_waiting {
            vias.extend([delivery, ViaPoint::at(waiting).holding()]);
        } else {
            vias.push(delivery);
        }
        // The parked pose is released from the departure on; restored on failure.
        let park = self.robots[r].park.take();
        let saved = park.and_then(|p| self.table.get(p).cloned());
        if let Some(p) = park {
            self.table.truncate(p, departure);
        }
        match self.search(r, departure, &vias) {
            Ok(steps) => Ok((departure, ideal.total(), steps)),
            Err(e) => {
                if let (Some(p), Some(rec)) = (park, saved) {
                    self.table.remove(p);
                    self.robots[r].park = Some(self.table.reserve(rec.robot, rec.start, rec.end, rec.region, rec.tag));
                }
                Err(e)
            }
        }
    }

    fn plan_task(
        &mut self,
        ti: usize,
        task: &Task,
        r: RobotId,
        direction: Direction,
        ws: NodeId,
        ws_free: Time,
    ) -> Result<TaskOutcome, PlanError> {
        let world = self.world;
        let graph = &world.graph;
        let wh = &world.layout.graph;
        let waiting = world.layout.agents[r].waiting;
        let before = self.stats.visited;

        let es = earliest_start(self.robots[r].avail, task, &IdealTask::compute(graph, wh, self.base(r), Some(self.yaw(r)), task), ws, ws_free);
        let mut waited = Time::ZERO;
        if es > self.robots[r].avail {
            waited = self.wait_at_waiting_place(ti, task, r, ws, ws_free)?;
        }
        // Try leaving from where the robot is; the reserved way home stays
        // available as a fallback.
        let fallback = std::mem::take(&mut self.robots[r].w_steps);
        for id in self.robots[r].w_ids.drain(..) {
            self.table.remove(id);
        }
        if let Some(h) = self.robots[r].w_hold.take() {
            self.table.remove(h);
        }
        let mut result = self.depart(r, task, waiting);
        if result.is_ok() {
            if !fallback.is_empty() {
                self.robots[r].discarded += 1;
            }
        } else if !fallback.is_empty() {
            self.reserve_waiting_leg(r, fallback);
            self.commit_waiting_leg(r, Leg::ToWaiting);
            waited = self.wait_at_waiting_place(ti, task, r, ws, ws_free)?;
            result = self.depart(r, task, waiting);
        }
        let (departure, ideal, mut steps) =
            result.map_err(|source| PlanError::Infeasible { task: ti, order: task.order, robot: r, source })?;

        let action = |steps: &[Step], via: usize| {
            steps
                .iter()
                .find(|s| matches!(s.kind, StepKind::Action { via: v, .. } if v == via))
                .copied()
                .expect("search visits every via point")
        };
        let (pick, drop) = (action(&steps, 1), action(&steps, 2));
        let split = steps.iter().position(|s| *s == drop).expect("present") + 1;
        let rest = steps.split_off(split);

        let sweeps = world.sweeps(r);
        reserve_steps(&mut self.table, r, &steps, sweeps, r as u64);
        let st = &mut self.robots[r];
        append(&mut st.steps, &steps, Leg::Task, Some(ti));
        st.pos = rest_state_after(&steps, graph).expect("nonempty");
        st.avail = drop.end;
        // Without reservation the robot claims nothing past its delivery.
        if self.opts.reserve_waiting {
            self.reserve_waiting_leg(r, rest);
        }

        Ok(TaskOutcome {
            index: ti,
            task: task.clone(),
            robot: r,
            workstation: ws,
            direction,
            departure,
            pickup_arrival: pick.start,
            pickup_end: pick.end,
            delivery_arrival: drop.start,
            delivery_end: drop.end,
            ideal,
            waited,
            visited: self.stats.visited - before,
        })
    }

    /// Robots still holding a provisional way home drive it. Robots that
    /// reserved nothing stay where they are if nobody passes there later, and
    /// otherwise look for a way home, earliest available first.
    fn finish(&mut self) -> Result<(), PlanError> {
        for r in 0..self.robots.len() {
            self.commit_waiting_leg(r, Leg::Return);
        }
        let mut loose: Vec<RobotId> = (0..self.robots.len()).filter(|&r| self.robots[r].park.is_none()).collect();
        loose.sort_by_key(|&r| (self.robots[r].avail, r));
        for r in loose {
            let (pos, avail) = (self.robots[r].pos, self.robots[r].avail);
            let region = self.world.sweeps(r).resting(pos.node, pos.reversed).clone();
            if self.table.can_stay(r, &region, avail) {
                self.robots[r].park = Some(self.table.reserve(r, avail, Time::INFINITY, region, r as u64));
                continue;
            }
            let waiting = self.world.layout.agents[r].waiting;
            let vias = [ViaPoint::at(self.base(r)), ViaPoint::at(waiting).holding()];
            let steps = self.search(r, avail, &vias).map_err(|source| PlanError::ReturnToWaiting { robot: r, source })?;
            self.reserve_waiting_leg(r, steps);
            self.commit_waiting_leg(r, Leg::Return);
        }
        Ok(())
    }
}

/// Appends steps, filling any gap since the last step with a wait.
fn append(out: &mut Vec<PlannedStep>, steps: &[Step], leg: Leg, task: Option<usize>) {
    if let (Some(last), Some(first)) = (out.last(), steps.first()) {
        if first.start > last.step.end {
            let s = last.step;
            let wait = Step { kind: StepKind::Wait, start: s.end, end: first.start, from: s.to, to: s.to, reversed: first.reversed, loaded: first.loaded };
            out.push(PlannedStep { step: wait, leg: Leg::Wait, task: None });
        }
    }
    out.extend(steps.iter().map(|&step| PlannedStep { step, leg, task }));
}

/// Per workstation, the span of each order's actions there, in planning order.
pub fn workstation_spans(plan: &Plan) -> Vec<(NodeId, usize, Time, Time)> {
    let mut spans: Vec<(NodeId, usize, Time, Time)> = Vec::new();
    for t in &plan.tasks {
        let (s, e) = t.workstation_interval();
        match spans.iter_mut().find(|x| x.0 == t.workstation && x.1 == t.task.order) {
            Some(x) => {
                x.2 = x.2.min(s);
                x.3 = x.3.max(e);
            }
            None => spans.push((t.workstation, t.task.order, s, e)),
        }
    }
    spans
}

/// Pairs of orders whose action spans overlap at a shared workstation, or
/// where a later-planned order acts before an earlier one finished.
pub fn workstation_violations(plan: &Plan) -> Vec<(usize, usize)> {
    let spans = workstation_spans(plan);
    let mut out = Vec::new();
    for (i, a) in spans.iter().enumerate() {
        for b in &spans[i + 1..] {
            if a.0 == b.0 && b.2 < a.3 {
                out.push((a.1, b.1));
            }
        }
    }
    out
}

/// Rebuilds a reservation table from a plan's trajectories, each robot
/// staying at its final pose forever, and returns the conflicting record pairs.
pub fn replay_conflicts(world: &World, plan: &Plan, margin: Time) -> Vec<(RecordId, RecordId)> {
    let graph = &world.graph;
    let mut table = ReservationTable::new(margin);
    for (r, rp) in plan.robots.iter().enumerate() {
        let sweeps = world.sweeps(r);
        let steps = rp.raw_steps();
        reserve_steps(&mut table, r, &steps, sweeps, 0);
        let (end, t) = match rest_state_after(&steps, graph) {
            Some(e) => (e, rp.end()),
            None => (rp.start, Time::ZERO),
        };
        table.reserve(r, t, Time::INFINITY, sweeps.resting(end.node, end.reversed).clone(), 0);
        if let Some(first) = steps.first() {
            if first.start > Time::ZERO {
                table.reserve(r, Time::ZERO, first.start, sweeps.resting(rp.start.node, rp.start.reversed).clone(), 0);
            }
        }
    }
    table.violations()
}
