//! Warehouse graph, agents, workstations and orders, with their JSON formats.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolygon, Point};
use crate::kinematics::KinematicLimits;

/// Arc lengths given in a layout file must match the endpoint distance this closely.
pub const LENGTH_TOLERANCE: f64 = 0.01;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("node {node}: {reason}")]
    InvalidNode { node: String, reason: String },
    #[error("arc {from}->{to}: {reason}")]
    InvalidArc { from: String, to: String, reason: String },
    #[error("unknown node id {0:?}")]
    UnknownNode(String),
    #[error("graph is not strongly connected: {from} cannot reach {to}")]
    Disconnected { from: String, to: String },
    #[error("agent {agent}: {reason}")]
    InvalidAgent { agent: String, reason: String },
    #[error("order {order}: {reason}")]
    InvalidOrder { order: String, reason: String },
    #[error("layout has no shelf nodes")]
    NoShelves,
    #[error("layout has no workstations")]
    NoWorkstations,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Index of an agent in [`Layout::agents`].
pub type RobotId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Shelf,
    Workstation,
    Waiting,
    Charging,
    Junction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WarehouseNode {
    pub name: String,
    pub position: Point,
    pub kind: NodeKind,
    /// Whether a robot may rotate in place here.
    pub turnable: bool,
    /// Whether a robot may drive straight through without stopping.
    pub pass_through: bool,
    /// Yaw a robot must have to act at this node, if any.
    pub action_yaw: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WarehouseArc {
    pub from: NodeId,
    pub to: NodeId,
    pub length: f64,
    pub speed_limit: f64,
}

#[derive(Clone, Debug, Default)]
pub struct WarehouseGraph {
    pub nodes: Vec<WarehouseNode>,
    pub arcs: Vec<WarehouseArc>,
    index: HashMap<String, NodeId>,
}

impl WarehouseGraph {
    pub fn node(&self, id: NodeId) -> &WarehouseNode {
        &self.nodes[id.0]
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.nodes[id.0].position
    }

    pub fn lookup(&self, name: &str) -> Result<NodeId, ModelError> {
        self.index.get(name).copied().ok_or_else(|| ModelError::UnknownNode(name.to_string()))
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.0].name
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Nodes joined to `id` by an arc in either direction, sorted and unique.
    pub fn neighbors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .arcs
            .iter()
            .filter_map(|a| {
                if a.from == id {
                    Some(a.to)
                } else if a.to == id {
                    Some(a.from)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> Vec<NodeId> {
        self.node_ids().filter(|&n| self.node(n).kind == kind).collect()
    }

    fn check_strongly_connected(&self) -> Result<(), ModelError> {
        if self.nodes.is_empty() {
            return Ok(());
        }
        let n = self.nodes.len();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for a in &self.arcs {
            fwd[a.from.0].push(a.to.0);
            bwd[a.to.0].push(a.from.0);
        }
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen
        };
        if let Some(missing) = reach(&fwd).iter().position(|s| !s) {
            return Err(ModelError::Disconnected { from: self.nodes[0].name.clone(), to: self.nodes[missing].name.clone() });
        }
        if let Some(missing) = reach(&bwd).iter().position(|s| !s) {
            return Err(ModelError::Disconnected { from: self.nodes[missing].name.clone(), to: self.nodes[0].name.clone() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct AgentSpec {
    pub name: String,
    pub start: NodeId,
    /// Initial yaw; `None` lets the planner pick an orientation aligned with an arc.
    pub start_yaw: Option<f64>,
    pub waiting: NodeId,
    /// Body polygon in the robot frame, before padding. +x is the forward axis.
    pub body: ConvexPolygon,
    pub padding: f64,
    pub limits: KinematicLimits,
}

impl AgentSpec {
    /// Padded body in the robot frame.
    pub fn footprint(&self) -> ConvexPolygon {
        self.body.padded(self.padding)
    }
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub graph: WarehouseGraph,
    pub agents: Vec<AgentSpec>,
    pub workstations: Vec<NodeId>,
}

impl Layout {
    pub fn load(path: impl AsRef<Path>) -> Result<Layout, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
        Layout::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Layout, ModelError> {
        let file: LayoutFile = serde_json::from_str(text)?;
        Layout::from_file(&file)
    }

    pub fn from_file(file: &LayoutFile) -> Result<Layout, ModelError> {
        let mut graph = WarehouseGraph::default();
        for rec in &file.nodes {
            if !(rec.x.is_finite() && rec.y.is_finite()) {
                return Err(ModelError::InvalidNode { node: rec.id.clone(), reason: "non-finite position".into() });
            }
            if let Some(y) = rec.yaw {
                if !y.is_finite() {
                    return Err(ModelError::InvalidNode { node: rec.id.clone(), reason: "non-finite action yaw".into() });
                }
            }
            let id = NodeId(graph.nodes.len());
            if graph.index.insert(rec.id.clone(), id).is_some() {
                return Err(ModelError::InvalidNode { node: rec.id.clone(), reason: "duplicate id".into() });
            }
            graph.nodes.push(WarehouseNode {
                name: rec.id.clone(),
                position: Point::new(rec.x, rec.y),
                kind: rec.kind,
                turnable: rec.turnable,
                pass_through: rec.pass_through,
                action_yaw: rec.yaw.map(crate::geometry::normalize_angle),
            });
        }
        let mut seen_arcs = HashSet::new();
        for rec in &file.arcs {
            let bad = |reason: &str| ModelError::InvalidArc { from: rec.from.clone(), to: rec.to.clone(), reason: reason.into() };
            let from = graph.lookup(&rec.from)?;
            let to = graph.lookup(&rec.to)?;
            if from == to {
                return Err(bad("self loop"));
            }
            if !seen_arcs.insert((from, to)) {
                return Err(bad("duplicate arc"));
            }
            let dist = graph.position(from).dist(graph.position(to));
            if dist <= 0.0 {
                return Err(bad("endpoints coincide"));
            }
            if let Some(len) = rec.length {
                if (len - dist).abs() > LENGTH_TOLERANCE {
                    return Err(bad(&format!("declared length {len:.3} differs from endpoint distance {dist:.3}")));
                }
            }
            if !(rec.speed_limit > 0.0 && rec.speed_limit.is_finite()) {
                return Err(bad("speed limit must be positive"));
            }
            graph.arcs.push(WarehouseArc { from, to, length: dist, speed_limit: rec.speed_limit });
        }
        graph.check_strongly_connected()?;

        let mut workstations = Vec::new();
        for name in &file.workstations {
            let id = graph.lookup(name)?;
            if graph.node(id).kind != NodeKind::Workstation {
                return Err(ModelError::InvalidNode { node: name.clone(), reason: "listed as workstation but kind differs".into() });
            }
            workstations.push(id);
        }

        let mut agents = Vec::new();
        let mut waiting_seen = HashSet::new();
        for rec in &file.agents {
            let bad = |reason: String| ModelError::InvalidAgent { agent: rec.id.clone(), reason };
            let start = graph.lookup(&rec.start)?;
            let waiting = graph.lookup(&rec.waiting)?;
            if !waiting_seen.insert(waiting) {
                return Err(bad(format!("waiting place {} shared with another agent", rec.waiting)));
            }
            let body = rec.footprint.polygon();
            if body.vertices().len() < 3 || body.area() <= 1e-9 {
                return Err(bad("degenerate footprint".into()));
            }
            if !(rec.padding >= 0.0 && rec.padding.is_finite()) {
                return Err(bad("padding must be non-negative".into()));
            }
            rec.limits.validate().map_err(|e| bad(e.to_string()))?;
            agents.push(AgentSpec {
                name: rec.id.clone(),
                start,
                start_yaw: rec.start_yaw,
                waiting,
                body,
                padding: rec.padding,
                limits: rec.limits,
            });
        }
        Ok(Layout { graph, agents, workstations })
    }

    /// The same layout restricted to its first `n` agents.
    pub fn with_robots(&self, n: usize) -> Layout {
        let mut out = self.clone();
        out.agents.truncate(n);
        out
    }
}

// ---------------------------------------------------------------------------
// File formats

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LayoutFile {
    pub nodes: Vec<NodeRecord>,
    pub arcs: Vec<ArcRecord>,
    #[serde(default)]
    pub agents: Vec<AgentRecord>,
    #[serde(default)]
    pub workstations: Vec<String>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NodeRecord {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub kind: NodeKind,
    #[serde(default)]
    pub turnable: bool,
    #[serde(default = "yes")]
    pub pass_through: bool,
    /// Required action yaw, radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yaw: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArcRecord {
    pub from: String,
    pub to: String,
    pub speed_limit: f64,
    /// Optional; checked against the endpoint distance when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FootprintRecord {
    Rect { length: f64, width: f64 },
    Polygon { polygon: Vec<[f64; 2]> },
}

impl FootprintRecord {
    pub fn polygon(&self) -> ConvexPolygon {
        match self {
            FootprintRecord::Rect { length, width } => ConvexPolygon::rectangle(*length, *width),
            FootprintRecord::Polygon { polygon } => {
                ConvexPolygon::hull(&polygon.iter().map(|p| Point::new(p[0], p[1])).collect::<Vec<_>>())
            }
        }
    }
}

impl Default for FootprintRecord {
    fn default() -> Self {
        FootprintRecord::Rect { length: 0.8, width: 0.6 }
    }
}

fn default_padding() -> f64 {
    0.05
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AgentRecord {
    pub id: String,
    pub start: String,
    pub waiting: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_yaw: Option<f64>,
    #[serde(default)]
    pub footprint: FootprintRecord,
    #[serde(default = "default_padding")]
    pub padding: f64,
    #[serde(default)]
    pub limits: KinematicLimits,
}

// ---------------------------------------------------------------------------
// Orders

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Items are picked at shelves and brought to the workstation.
    Pickup,
    /// Items are taken from the workstation to shelves.
    Delivery,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderItem {
    pub location: NodeId,
    /// Seconds to act at the shelf.
    pub duration: f64,
    /// Seconds to act at the workstation.
    pub workstation_duration: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Order {
    pub id: String,
    pub release: f64,
    pub direction: Direction,
    pub items: Vec<OrderItem>,
}

/// One item of an order, once its workstation is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub order: usize,
    pub item: usize,
    pub pickup: NodeId,
    pub delivery: NodeId,
    pub pickup_duration: f64,
    pub delivery_duration: f64,
    pub release: f64,
}

impl Order {
    pub fn tasks(&self, order_index: usize, workstation: NodeId) -> Vec<Task> {
        self.items
            .iter()
            .enumerate()
            .map(|(j, item)| match self.direction {
                Direction::Pickup => Task {
                    order: order_index,
                    item: j,
                    pickup: item.location,
                    delivery: workstation,
                    pickup_duration: item.duration,
                    delivery_duration: item.workstation_duration,
                    release: self.release,
                },
                Direction::Delivery => Task {
                    order: order_index,
                    item: j,
                    pickup: workstation,
                    delivery: item.location,
                    pickup_duration: item.workstation_duration,
                    delivery_duration: item.duration,
                    release: self.release,
                },
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScenarioFile {
    /// Generator seed, when the scenario was generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub orders: Vec<OrderRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrderRecord {
    pub id: String,
    pub release: f64,
    pub direction: Direction,
    pub items: Vec<ItemRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ItemRecord {
    pub node: String,
    pub duration: f64,
    #[serde(default)]
    pub ws_duration: f64,
}

pub fn orders_from_file(file: &ScenarioFile, graph: &WarehouseGraph) -> Result<Vec<Order>, ModelError> {
    file.orders
        .iter()
        .map(|rec| {
            let bad = |reason: String| ModelError::InvalidOrder { order: rec.id.clone(), reason };
            if rec.items.is_empty() {
                return Err(bad("no items".into()));
            }
            if !(rec.release >= 0.0 && rec.release.is_finite()) {
                return Err(bad("release date must be non-negative".into()));
            }
            let items = rec
                .items
                .iter()
                .map(|it| {
                    let location = graph.lookup(&it.node)?;
                    if graph.node(location).kind != NodeKind::Shelf {
                        return Err(bad(format!("item location {} is not a shelf", it.node)));
                    }
                    if !(it.duration >= 0.0 && it.ws_duration >= 0.0 && it.duration.is_finite() && it.ws_duration.is_finite()) {
                        return Err(bad("durations must be non-negative".into()));
                    }
                    Ok(OrderItem { location, duration: it.duration, workstation_duration: it.ws_duration })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Order { id: rec.id.clone(), release: rec.release, direction: rec.direction, items })
        })
        .collect()
}

pub fn orders_to_file(orders: &[Order], graph: &WarehouseGraph) -> ScenarioFile {
    ScenarioFile {
        seed: None,
        orders: orders
            .iter()
            .map(|o| OrderRecord {
                id: o.id.clone(),
                release: o.release,
                direction: o.direction,
                items: o
                    .items
                    .iter()
                    .map(|it| ItemRecord {
                        node: graph.name(it.location).to_string(),
                        duration: it.duration,
                        ws_duration: it.workstation_duration,
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn load_orders(path: impl AsRef<Path>, graph: &WarehouseGraph) -> Result<Vec<Order>, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    let file: ScenarioFile = serde_json::from_str(&text)?;
    orders_from_file(&file, graph)
}
