//! Parameterized warehouse layout templates.
//!
//! Every template is a set of vertical aisles joined by horizontal corridors.
//! Aisles are `aisle_spacing` apart (x = 0, 2, 4, ... by default) and hold
//! `slots_per_aisle` shelf nodes spaced `slot_spacing` apart, split evenly into
//! `rows` blocks. The bottom corridor sits at y = 0, the first shelf of a block
//! is `corridor_gap` above the corridor below it, and the last shelf is
//! `corridor_gap` below the next corridor. Workstations hang `spur_length`
//! below the bottom corridor and waiting places `spur_length` above the top
//! one. Robots act at shelves facing +y and at workstations facing -y.
//!
//! Shelf nodes are listed aisle by aisle, bottom to top, so that layouts with
//! the same aisle and slot counts but a different number of rows enumerate
//! their shelves in the same order.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{AgentRecord, ArcRecord, FootprintRecord, LayoutFile, NodeKind, NodeRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Template {
    OneRow,
    TwoRow,
    ThreeRow,
    /// Three rows with twice the racks, five workstations and ten waiting places.
    Large,
}

impl FromStr for Template {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1row" => Ok(Template::OneRow),
            "2row" => Ok(Template::TwoRow),
            "3row" => Ok(Template::ThreeRow),
            "large" => Ok(Template::Large),
            other => Err(format!("unknown template {other:?} (expected 1row, 2row, 3row or large)")),
        }
    }
}

impl Template {
    pub fn rows(self) -> usize {
        match self {
            Template::OneRow => 1,
            Template::TwoRow => 2,
            Template::ThreeRow | Template::Large => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub template: Template,
    /// Number of shelf racks; there is one aisle on each side of every rack.
    pub shelves: usize,
    pub workstations: usize,
    pub waiting_places: usize,
    pub slots_per_aisle: usize,
    pub aisle_spacing: f64,
    pub slot_spacing: f64,
    pub corridor_gap: f64,
    pub spur_length: f64,
    pub speed_limit: f64,
}

impl LayoutParams {
    pub fn new(template: Template) -> Self {
        let (shelves, workstations, waiting_places) = match template {
            Template::Large => (10, 5, 10),
            _ => (5, 2, 4),
        };
        LayoutParams {
            template,
            shelves,
            workstations,
            waiting_places,
            slots_per_aisle: 12,
            aisle_spacing: 2.0,
            slot_spacing: 1.0,
            corridor_gap: 1.5,
            spur_length: 2.0,
            speed_limit: 0.2,
        }
    }

    pub fn aisles(&self) -> usize {
        self.shelves + 1
    }

    pub fn validate(&self) -> Result<(), String> {
        let rows = self.template.rows();
        if self.shelves == 0 {
            return Err("need at least one shelf rack".into());
        }
        if self.workstations == 0 || self.workstations > self.aisles() {
            return Err(format!("workstations must be between 1 and {} for {} racks", self.aisles(), self.shelves));
        }
        if self.waiting_places == 0 || self.waiting_places > self.aisles() {
            return Err(format!("waiting places must be between 1 and {} for {} racks", self.aisles(), self.shelves));
        }
        if self.slots_per_aisle == 0 || self.slots_per_aisle % rows != 0 {
            return Err(format!("slots per aisle must be a positive multiple of {rows}"));
        }
        let dims = [self.aisle_spacing, self.slot_spacing, self.corridor_gap, self.spur_length, self.speed_limit];
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err("spacings and speed limit must be positive".into());
        }
        Ok(())
    }

    /// Node count implied by the parameters.
    pub fn declared_nodes(&self) -> usize {
        let rows = self.template.rows();
        self.aisles() * self.slots_per_aisle + (rows + 1) * self.aisles() + self.workstations + self.waiting_places
    }

    /// Directed arc count implied by the parameters (every link is two-way).
    pub fn declared_arcs(&self) -> usize {
        let rows = self.template.rows();
        let corridor_links = (rows + 1) * (self.aisles() - 1);
        let aisle_links = self.aisles() * (self.slots_per_aisle + rows);
        2 * (corridor_links + aisle_links + self.workstations + self.waiting_places)
    }
}

/// Evenly spread `k` picks among `n` slots.
fn spread(k: usize, n: usize) -> Vec<usize> {
    (0..k).map(|j| (2 * j + 1) * n / (2 * k)).collect()
}

pub fn generate_layout(params: &LayoutParams) -> Result<LayoutFile, String> {
    params.validate()?;
    let rows = params.template.rows();
    let per_block = params.slots_per_aisle / rows;
    let block_height = 2.0 * params.corridor_gap + (per_block as f64 - 1.0) * params.slot_spacing;
    let corridor_y = |c: usize| c as f64 * block_height;
    let x = |a: usize| a as f64 * params.aisle_spacing;

    let mut nodes = Vec::new();
    let mut arcs = Vec::new();
    let mut link = |a: &str, b: &str| {
        for (from, to) in [(a, b), (b, a)] {
            arcs.push(ArcRecord { from: from.into(), to: to.into(), speed_limit: params.speed_limit, length: None });
        }
    };

    for a in 0..params.aisles() {
        for block in 0..rows {
            for k in 0..per_block {
                nodes.push(NodeRecord {
                    id: format!("s{a}_{}", block * per_block + k),
                    x: x(a),
                    y: corridor_y(block) + params.corridor_gap + k as f64 * params.slot_spacing,
                    kind: NodeKind::Shelf,
                    turnable: false,
                    pass_through: true,
                    yaw: Some(FRAC_PI_2),
                });
            }
        }
    }
    for c in 0..=rows {
        for a in 0..params.aisles() {
            nodes.push(NodeRecord {
                id: format!("c{c}_{a}"),
                x: x(a),
                y: corridor_y(c),
                kind: NodeKind::Junction,
                turnable: true,
                pass_through: true,
                yaw: None,
            });
        }
    }
    let ws_aisles = spread(params.workstations, params.aisles());
    for (j, &a) in ws_aisles.iter().enumerate() {
        nodes.push(NodeRecord {
            id: format!("ws{j}"),
            x: x(a),
            y: -params.spur_length,
            kind: NodeKind::Workstation,
            turnable: false,
            pass_through: true,
            yaw: Some(-FRAC_PI_2),
        });
    }
    let wl_aisles = spread(params.waiting_places, params.aisles());
    for (j, &a) in wl_aisles.iter().enumerate() {
        nodes.push(NodeRecord {
            id: format!("wl{j}"),
            x: x(a),
            y: corridor_y(rows) + params.spur_length,
            kind: NodeKind::Waiting,
            turnable: false,
            pass_through: true,
            yaw: None,
        });
    }

    for c in 0..=rows {
        for a in 1..params.aisles() {
            link(&format!("c{c}_{}", a - 1), &format!("c{c}_{a}"));
        }
    }
    for a in 0..params.aisles() {
        for block in 0..rows {
            let first = block * per_block;
            let last = first + per_block - 1;
            link(&format!("c{block}_{a}"), &format!("s{a}_{first}"));
            for k in first..last {
                link(&format!("s{a}_{k}"), &format!("s{a}_{}", k + 1));
            }
            link(&format!("s{a}_{last}"), &format!("c{}_{a}", block + 1));
        }
    }
    for (j, &a) in ws_aisles.iter().enumerate() {
        link(&format!("c0_{a}"), &format!("ws{j}"));
    }
    for (j, &a) in wl_aisles.iter().enumerate() {
        link(&format!("c{rows}_{a}"), &format!("wl{j}"));
    }

    let agents = (0..params.waiting_places)
        .map(|j| AgentRecord {
            id: format!("r{j}"),
            start: format!("wl{j}"),
            waiting: format!("wl{j}"),
            start_yaw: Some(FRAC_PI_2),
            footprint: FootprintRecord::default(),
            padding: 0.05,
            limits: Default::default(),
        })
        .collect();
    let workstations = (0..params.workstations).map(|j| format!("ws{j}")).collect();
    Ok(LayoutFile { nodes, arcs, agents, workstations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Layout;

    #[test]
    fn templates_load_with_declared_counts() {
        for t in [Template::OneRow, Template::TwoRow, Template::ThreeRow, Template::Large] {
            let params = LayoutParams::new(t);
            let file = generate_layout(&params).unwrap();
            let layout = Layout::from_file(&file).unwrap();
            assert_eq!(layout.graph.nodes.len(), params.declared_nodes(), "{t:?}");
            assert_eq!(layout.graph.arcs.len(), params.declared_arcs(), "{t:?}");
            assert_eq!(layout.agents.len(), params.waiting_places);
            assert_eq!(layout.workstations.len(), params.workstations);
        }
    }

    #[test]
    fn shelf_order_matches_across_row_counts() {
        let names = |t| {
            let file = generate_layout(&LayoutParams::new(t)).unwrap();
            file.nodes.into_iter().filter(|n| n.kind == NodeKind::Shelf).map(|n| n.id).collect::<Vec<_>>()
        };
        assert_eq!(names(Template::OneRow), names(Template::ThreeRow));
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = LayoutParams::new(Template::TwoRow);
        p.slots_per_aisle = 7;
        assert!(generate_layout(&p).is_err());
        let mut p = LayoutParams::new(Template::OneRow);
        p.workstations = 0;
        assert!(generate_layout(&p).is_err());
        assert!("4row".parse::<Template>().is_err());
    }
}
