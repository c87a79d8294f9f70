//! A layout prepared for planning: routing graph and per-robot sweep caches.

use std::sync::Arc;

use thiserror::Error;

use crate::collision::{SweepCache, SweepParams};
use crate::model::{Layout, RobotId};
use crate::routing::{RoutingConfig, RoutingError, RoutingGraph};

#[derive(Debug, Error)]
pub enum WorldError {
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("layout has no robots")]
    NoRobots,
    #[error("robots {0} and {1} have different kinematic limits")]
    MixedLimits(String, String),
}

#[derive(Debug)]
pub struct World {
    pub layout: Layout,
    pub graph: Arc<RoutingGraph>,
    /// Sweep cache for each robot; robots with equal footprints share one.
    pub sweeps: Vec<Arc<SweepCache>>,
}

impl World {
    pub fn new(layout: Layout, config: &RoutingConfig) -> Result<World, WorldError> {
        Self::with_sweeps(layout, config, SweepParams::default())
    }

    pub fn with_sweeps(layout: Layout, config: &RoutingConfig, params: SweepParams) -> Result<World, WorldError> {
        let first = layout.agents.first().ok_or(WorldError::NoRobots)?;
        if let Some(other) = layout.agents.iter().find(|a| a.limits != first.limits) {
            return Err(WorldError::MixedLimits(first.name.clone(), other.name.clone()));
        }
        let graph = Arc::new(RoutingGraph::build(&layout.graph, &first.limits, config)?);
        let mut sweeps: Vec<Arc<SweepCache>> = Vec::new();
        for agent in &layout.agents {
            let fp = agent.footprint();
            let cache = match sweeps.iter().find(|c| c.footprint == fp) {
                Some(c) => c.clone(),
                None => Arc::new(SweepCache::new(graph.clone(), fp, params)),
            };
            sweeps.push(cache);
        }
        Ok(World { layout, graph, sweeps })
    }

    /// The same world restricted to its first `n` robots, sharing caches.
    pub fn with_robots(&self, n: usize) -> World {
        World { layout: self.layout.with_robots(n), graph: self.graph.clone(), sweeps: self.sweeps[..n.min(self.sweeps.len())].to_vec() }
    }

    pub fn robots(&self) -> usize {
        self.layout.agents.len()
    }

    pub fn sweeps(&self, robot: RobotId) -> &SweepCache {
        &self.sweeps[robot]
    }
}
