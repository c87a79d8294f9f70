//! Rule-based assignment of orders to workstations and tasks to robots over
//! an obstacle-free schedule.
//!
//! Orders are taken first come first served. Each goes to the workstation
//! that frees up first, and each of its tasks to the robot that could reach
//! the task's first location soonest. Robot and workstation clocks then move
//! forward by the obstacle-free task durations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Direction, NodeId, Order, RobotId, Task, WarehouseGraph};
use crate::routing::RoutingGraph;
use crate::time::Time;

#[derive(Debug, Error, PartialEq)]
pub enum AssignmentError {
    #[error("no workstation defined")]
    NoWorkstations,
    #[error("no robots")]
    NoAgents,
    #[error("per-order robot cap must be at least 1")]
    ZeroCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub available: Time,
    pub position: NodeId,
    pub yaw: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkstationState {
    pub available: Time,
}

/// Obstacle-free durations of a task started from a given pose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealTask {
    pub to_pickup: Time,
    pub pickup: Time,
    pub to_delivery: Time,
    pub delivery: Time,
}

impl IdealTask {
    pub fn compute(graph: &RoutingGraph, wh: &WarehouseGraph, from: NodeId, from_yaw: Option<f64>, task: &Task) -> IdealTask {
        let pick_yaw = wh.node(task.pickup).action_yaw;
        let drop_yaw = wh.node(task.delivery).action_yaw;
        IdealTask {
            to_pickup: graph.pose_distance(from, from_yaw, task.pickup, pick_yaw, false),
            pickup: Time::from_secs(task.pickup_duration),
            to_delivery: graph.pose_distance(task.pickup, pick_yaw, task.delivery, drop_yaw, true),
            delivery: Time::from_secs(task.delivery_duration),
        }
    }

    pub fn total(&self) -> Time {
        self.to_pickup + self.pickup + self.to_delivery + self.delivery
    }

    /// Time from departure until the robot reaches the workstation.
    pub fn to_workstation(&self, task: &Task, workstation: NodeId) -> Time {
        if task.pickup == workstation {
            self.to_pickup
        } else {
            self.to_pickup + self.pickup + self.to_delivery
        }
    }
}

/// Earliest departure such that the robot, driving unobstructed, reaches the
/// workstation no sooner than it becomes available.
pub fn earliest_start(available: Time, task: &Task, ideal: &IdealTask, workstation: NodeId, ws_available: Time) -> Time {
    let release = Time::from_secs(task.release);
    let by_ws = ws_available - ideal.to_workstation(task, workstation);
    available.max(release).max(by_ws)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignedTask {
    pub task: Task,
    pub robot: RobotId,
    pub workstation: usize,
    pub ideal_start: Time,
    pub ideal_end: Time,
    /// Obstacle-free processing time from the robot's scheduled position.
    pub ideal_duration: Time,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Order indices in processing order.
    pub sequence: Vec<usize>,
    /// Workstation index per order.
    pub order_workstation: Vec<usize>,
    /// Tasks grouped by order, following `sequence`.
    pub tasks: Vec<AssignedTask>,
    /// Indices into `tasks`, per robot, in scheduled order.
    pub per_agent: Vec<Vec<usize>>,
    /// End of the obstacle-free schedule.
    pub ideal_makespan: Time,
}

impl Assignment {
    pub fn tasks_of_order(&self, order: usize) -> impl Iterator<Item = (usize, &AssignedTask)> {
        self.tasks.iter().enumerate().filter(move |(_, t)| t.task.order == order)
    }
}

/// FIFO order sequence: by release date, then input position.
pub fn fifo_sequence(orders: &[Order]) -> Vec<usize> {
    let mut seq: Vec<usize> = (0..orders.len()).collect();
    seq.sort_by(|&a, &b| orders[a].release.total_cmp(&orders[b].release).then(a.cmp(&b)));
    seq
}

pub fn assign(
    orders: &[Order],
    agents: &[AgentState],
    workstations: &[NodeId],
    graph: &RoutingGraph,
    wh: &WarehouseGraph,
    cap: Option<usize>,
) -> Result<Assignment, AssignmentError> {
    if workstations.is_empty() {
        return Err(AssignmentError::NoWorkstations);
    }
    if agents.is_empty() {
        return Err(AssignmentError::NoAgents);
    }
    if cap == Some(0) {
        return Err(AssignmentError::ZeroCap);
    }
    let mut agents = agents.to_vec();
    let mut ws_state = vec![WorkstationState { available: Time::ZERO }; workstations.len()];
    let sequence = fifo_sequence(orders);
    let mut order_workstation = vec![0; orders.len()];
    let mut tasks = Vec::new();
    let mut per_agent = vec![Vec::new(); agents.len()];
    let mut ideal_makespan = Time::ZERO;

    for &oi in &sequence {
        let order = &orders[oi];
        let wi = (0..workstations.len()).min_by_key(|&w| (ws_state[w].available, w)).expect("nonempty");
        order_workstation[oi] = wi;
        let ws = workstations[wi];
        let ws_free = ws_state[wi].available;
        let mut ws_end = ws_free;
        let mut used: Vec<RobotId> = Vec::new();
        for task in order.tasks(oi, ws) {
            let capped = cap.is_some_and(|c| used.len() >= c);
            let candidates: Vec<RobotId> = if capped { used.clone() } else { (0..agents.len()).collect() };
            let robot = candidates
                .into_iter()
                .min_by_key(|&a| {
                    let s = &agents[a];
                    let wh_yaw = wh.node(task.pickup).action_yaw;
                    (s.available + graph.pose_distance(s.position, s.yaw, task.pickup, wh_yaw, false), a)
                })
                .expect("at least one agent");
            if !used.contains(&robot) {
                used.push(robot);
            }
            let s = agents[robot];
            let ideal = IdealTask::compute(graph, wh, s.position, s.yaw, &task);
            let start = earliest_start(s.available, &task, &ideal, ws, ws_free);
            let end = start + ideal.total();
            let ws_action_end = match order.direction {
                Direction::Pickup => end,
                Direction::Delivery => start + ideal.to_pickup + ideal.pickup,
            };
            ws_end = ws_end.max(ws_action_end);
            ideal_makespan = ideal_makespan.max(end);
            agents[robot] = AgentState { available: end, position: task.delivery, yaw: wh.node(task.delivery).action_yaw };
            per_agent[robot].push(tasks.len());
            tasks.push(AssignedTask { task, robot, workstation: wi, ideal_start: start, ideal_end: end, ideal_duration: ideal.total() });
        }
        ws_state[wi].available = ws_end;
    }
    Ok(Assignment { sequence, order_workstation, tasks, per_agent, ideal_makespan })
}
