//! Plan execution under real dynamics, with optional random slow-downs.
//!
//! Robots run their steps back to back: a move takes the real kinematic
//! duration of its arc, stretched by a random factor per traversal, while waits
//! and actions keep their planned length. Delays therefore accumulate, and the
//! first instant two padded footprints overlap is the time to failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolygon, Point};
use crate::ipp::{Plan, PlannedStep};
use crate::model::{NodeId, RobotId};
use crate::trajectory::StepKind;
use crate::world::World;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid PERT parameters min={min} mode={mode} max={max}")]
    InvalidPert { min: f64, mode: f64, max: f64 },
    #[error("plan has {plan} robots but the layout has {layout}")]
    RobotCount { plan: usize, layout: usize },
    #[error("robot {robot} step {step}: {reason}")]
    Malformed { robot: usize, step: usize, reason: String },
    #[error("collision check step must be positive")]
    BadStep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// Every traversal is stretched by a PERT-distributed factor.
    Pert { min: f64, mode: f64, max: f64, seed: u64 },
}

impl NoiseModel {
    /// Support [1.0, 1.1] with mode 1.01.
    pub fn pert(seed: u64) -> NoiseModel {
        NoiseModel::Pert { min: 1.0, mode: 1.01, max: 1.1, seed }
    }
}

/// Draws from the PERT distribution on `[min, max]` with the given mode.
pub fn pert_sample(min: f64, max: f64, mode: f64, rng: &mut impl Rng) -> Result<f64, SimError> {
    if !(min.is_finite() && max.is_finite() && mode.is_finite() && min <= mode && mode <= max) {
        return Err(SimError::InvalidPert { min, mode, max });
    }
    if max == min {
        return Ok(min);
    }
    let alpha = 1.0 + 4.0 * (mode - min) / (max - min);
    let beta = 1.0 + 4.0 * (max - mode) / (max - min);
    let dist = Beta::new(alpha, beta).map_err(|_| SimError::InvalidPert { min, mode, max })?;
    Ok(min + dist.sample(rng) * (max - min))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub noise: NoiseModel,
    /// Seconds between collision checks.
    pub dt: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { noise: NoiseModel::None, dt: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizedStep {
    #[serde(flatten)]
    pub planned: PlannedStep,
    pub start: f64,
    pub end: f64,
    /// Realized duration over the real kinematic duration, for moves.
    pub stretch: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub time: f64,
    pub robots: (RobotId, RobotId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub robots: Vec<Vec<RealizedStep>>,
    pub collision: Option<CollisionEvent>,
    /// Realized end of each task's delivery, by assignment task index.
    pub task_completions: Vec<(usize, f64)>,
    /// Latest realized step end over all robots.
    pub end: f64,
}

impl ExecutionTrace {
    /// Seconds until the first collision, infinite if none.
    pub fn time_to_failure(&self) -> f64 {
        self.collision.map_or(f64::INFINITY, |c| c.time)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub robot: RobotId,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub loaded: bool,
}

/// Realizes the step timings of every robot.
fn realize(world: &World, plan: &Plan, noise: &NoiseModel) -> Result<Vec<Vec<RealizedStep>>, SimError> {
    let graph = &world.graph;
    let mut out = Vec::with_capacity(plan.robots.len());
    for (r, rp) in plan.robots.iter().enumerate() {
        let mut rng = match noise {
            NoiseModel::Pert { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ r as u64)),
            NoiseModel::None => None,
        };
        let mut cursor = rp.steps.first().map_or(0.0, |s| s.step.start.secs());
        let mut steps = Vec::with_capacity(rp.steps.len());
        for (i, ps) in rp.steps.iter().enumerate() {
            let s = ps.step;
            if s.end < s.start {
                return Err(SimError::Malformed { robot: r, step: i, reason: "ends before it starts".into() });
            }
            let (duration, stretch) = match s.kind {
                StepKind::Move { arc } => {
                    let a = graph.arcs.get(arc).ok_or_else(|| SimError::Malformed { robot: r, step: i, reason: format!("unknown arc {arc}") })?;
                    let real = a.kinematic[s.loaded as usize].duration;
                    let planned = a.profile[s.loaded as usize].duration;
                    if real <= 0.0 {
                        (0.0, 1.0)
                    } else {
                        let scale = match (noise, rng.as_mut()) {
                            (NoiseModel::Pert { min, mode, max, .. }, Some(rng)) => pert_sample(*min, *max, *mode, rng)?,
                            _ => 1.0,
                        };
                        // Same-model plans keep their planned duration exactly.
                        let base = if planned > 0.0 { s.duration().secs() * real / planned } else { real };
                        let d = base * scale;
                        (d, d / real)
                    }
                }
                StepKind::Wait | StepKind::Action { .. } => (s.duration().secs(), 1.0),
            };
            steps.push(RealizedStep { planned: *ps, start: cursor, end: cursor + duration, stretch });
            cursor += duration;
        }
        out.push(steps);
    }
    Ok(out)
}

/// Pose and load of one robot at `t`, advancing `idx` monotonically.
fn pose_at(world: &World, plan: &Plan, r: RobotId, steps: &[RealizedStep], idx: &mut usize, t: f64) -> (Point, f64, bool) {
    let graph = &world.graph;
    let rest = |node: usize, rev: bool, loaded: bool| (graph.positions[graph.nodes[node].base.0], graph.yaw(node, rev), loaded);
    while *idx < steps.len() && steps[*idx].end <= t {
        *idx += 1;
    }
    if *idx >= steps.len() {
        return match steps.last() {
            Some(s) => {
                let st = s.planned.step;
                rest(st.to, st.reversed_after(graph), st.loaded_after())
            }
            None => {
                let s = plan.robots[r].start;
                rest(s.node, s.reversed, s.loaded)
            }
        };
    }
    let s = &steps[*idx];
    let st = s.planned.step;
    if t < s.start {
        return rest(st.from, st.reversed, st.loaded);
    }
    match st.kind {
        StepKind::Move { arc } => {
            let a = &graph.arcs[arc];
            let prof = &a.kinematic[st.loaded as usize];
            let tau = ((t - s.start) / s.stretch).min(prof.duration);
            let (p, yaw) = a.pose_with(prof, st.reversed, tau);
            (p, yaw, st.loaded)
        }
        _ => rest(st.from, st.reversed, st.loaded),
    }
}

pub fn execute(world: &World, plan: &Plan, opts: &SimOptions) -> Result<ExecutionTrace, SimError> {
    if plan.robots.len() != world.robots() {
        return Err(SimError::RobotCount { plan: plan.robots.len(), layout: world.robots() });
    }
    if !(opts.dt > 0.0) {
        return Err(SimError::BadStep);
    }
    let robots = realize(world, plan, &opts.noise)?;
    let end = robots.iter().filter_map(|s| s.last()).map(|s| s.end).fold(0.0, f64::max);
    let footprints: Vec<ConvexPolygon> = world.layout.agents.iter().map(|a| a.footprint()).collect();
    let n = robots.len();
    let mut idx = vec![0; n];
    let mut collision = None;
    let steps = (end / opts.dt).ceil() as usize;
    let mut bodies = Vec::with_capacity(n);
    'outer: for k in 0..=steps {
        let t = (k as f64 * opts.dt).min(end);
        bodies.clear();
        for r in 0..n {
            let (p, yaw, _) = pose_at(world, plan, r, &robots[r], &mut idx[r], t);
            bodies.push(footprints[r].transformed(yaw, p));
        }
        for a in 0..n {
            for b in a + 1..n {
                if bodies[a].intersects(&bodies[b]) {
                    collision = Some(CollisionEvent { time: t, robots: (a, b) });
                    break 'outer;
                }
            }
        }
    }

    let mut task_completions: Vec<(usize, f64)> = robots
        .iter()
        .flatten()
        .filter_map(|s| match (s.planned.step.kind, s.planned.task) {
            (StepKind::Action { via: 2, .. }, Some(task)) => Some((task, s.end)),
            _ => None,
        })
        .collect();
    task_completions.sort_by_key(|c| c.0);
    Ok(ExecutionTrace { robots, collision, task_completions, end })
}

/// Dense samples of a trace for plotting or export.
pub fn samples(world: &World, plan: &Plan, trace: &ExecutionTrace, dt: f64) -> Vec<Sample> {
    let n = trace.robots.len();
    let mut idx = vec![0; n];
    let stop = trace.collision.map_or(trace.end, |c| c.time);
    let count = if dt > 0.0 { (stop / dt).ceil() as usize } else { 0 };
    let mut out = Vec::with_capacity((count + 1) * n);
    for k in 0..=count {
        let t = (k as f64 * dt).min(stop);
        for r in 0..n {
            let (p, yaw, loaded) = pose_at(world, plan, r, &trace.robots[r], &mut idx[r], t);
            out.push(Sample { t, robot: r, x: p.x, y: p.y, yaw, loaded });
        }
    }
    out
}

/// Realized action spans per (workstation, order), for exclusivity checks.
pub fn realized_workstation_spans(plan: &Plan, trace: &ExecutionTrace) -> Vec<(NodeId, usize, f64, f64)> {
    let mut spans: Vec<(NodeId, usize, f64, f64)> = Vec::new();
    for steps in &trace.robots {
        for s in steps {
            let (StepKind::Action { via, .. }, Some(ti)) = (s.planned.step.kind, s.planned.task) else { continue };
            let Some(outcome) = plan.tasks.iter().find(|t| t.index == ti) else { continue };
            let at_ws = match outcome.direction {
                crate::model::Direction::Pickup => via == 2,
                crate::model::Direction::Delivery => via == 1,
            };
            if !at_ws {
                continue;
            }
            let key = (outcome.workstation, outcome.task.order);
            match spans.iter_mut().find(|x| (x.0, x.1) == key) {
                Some(x) => {
                    x.2 = x.2.min(s.start);
                    x.3 = x.3.max(s.end);
                }
                None => spans.push((key.0, key.1, s.start, s.end)),
            }
        }
    }
    spans
}

/// Pairs of orders whose realized action spans overlap at a workstation.
pub fn realized_workstation_violations(plan: &Plan, trace: &ExecutionTrace) -> Vec<(usize, usize)> {
    let spans = realized_workstation_spans(plan, trace);
    let mut out = Vec::new();
    for (i, a) in spans.iter().enumerate() {
        for b in &spans[i + 1..] {
            if a.0 == b.0 && a.2 < b.3 && b.2 < a.3 {
                out.push((a.1, b.1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_pert_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(pert_sample(1.0, 1.0, 1.0, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn pert_mean_and_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| pert_sample(1.0, 1.1, 1.01, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let expected = (1.0 + 4.0 * 1.01 + 1.1) / 6.0;
        assert!((mean - expected).abs() < 1e-3, "{mean} vs {expected}");
        assert!(xs.iter().all(|&x| (1.0..=1.1).contains(&x)));
    }

    #[test]
    fn bad_pert_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(pert_sample(1.0, 1.1, 1.2, &mut rng).is_err());
        assert!(pert_sample(1.1, 1.0, 1.05, &mut rng).is_err());
    }
}
