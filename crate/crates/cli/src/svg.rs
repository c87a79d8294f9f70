//! Static SVG plot of a layout with planned and realized robot paths.

use std::fmt::Write as _;

use warehouse_mapf::ipp::Plan;
use warehouse_mapf::model::NodeKind;
use warehouse_mapf::simulator::{CollisionEvent, Sample};
use warehouse_mapf::trajectory::pose_at;
use warehouse_mapf::world::World;
use warehouse_mapf::Time;

const SCALE: f64 = 40.0;
const MARGIN: f64 = 1.0;
const COLORS: [&str; 10] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"];

/// One planned `<polyline>` per robot; realized traces are dashed `<path>`s.
pub fn render(world: &World, plan: &Plan, realized: &[Sample], collision: Option<&CollisionEvent>) -> String {
    let g = &world.layout.graph;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for n in &g.nodes {
        x0 = x0.min(n.position.x);
        y0 = y0.min(n.position.y);
        x1 = x1.max(n.position.x);
        y1 = y1.max(n.position.y);
    }
    if g.nodes.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let (w, h) = ((x1 - x0 + 2.0 * MARGIN) * SCALE, (y1 - y0 + 2.0 * MARGIN) * SCALE);
    // Flip y so that north is up.
    let px = |x: f64| (x - x0 + MARGIN) * SCALE;
    let py = |y: f64| (y1 - y + MARGIN) * SCALE;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<g class="arcs" stroke="#cccccc" stroke-width="2">"##);
    for a in &g.arcs {
        let (p, q) = (g.position(a.from), g.position(a.to));
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#, px(p.x), py(p.y), px(q.x), py(q.y));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="nodes">"#);
    for n in &g.nodes {
        let (fill, r) = match n.kind {
            NodeKind::Shelf => ("#8d6e63", 4.0),
            NodeKind::Workstation => ("#000000", 7.0),
            NodeKind::Waiting => ("#4caf50", 6.0),
            NodeKind::Charging => ("#ffc107", 6.0),
            NodeKind::Junction => ("#9e9e9e", 2.5),
        };
        let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="{r}" fill="{fill}"><title>{}</title></circle>"#, px(n.position.x), py(n.position.y), n.name);
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="planned" fill="none" stroke-width="2" stroke-opacity="0.7">"#);
    for (r, rp) in plan.robots.iter().enumerate() {
        let steps = rp.raw_steps();
        let mut pts = String::new();
        if let (Some(first), Some(last)) = (steps.first(), steps.last()) {
            let mut t = first.start;
            let dt = Time::from_secs(0.5);
            loop {
                if let Some((p, _)) = pose_at(&steps, &world.graph, t) {
                    let _ = write!(pts, "{:.1},{:.1} ", px(p.x), py(p.y));
                }
                if t >= last.end {
                    break;
                }
                t = (t + dt).min(last.end);
            }
        }
        let _ = writeln!(s, r#"<polyline class="robot-{r}" stroke="{}" points="{}"><title>{}</title></polyline>"#, COLORS[r % COLORS.len()], pts.trim_end(), rp.name);
    }
    let _ = writeln!(s, "</g>");

    if !realized.is_empty() {
        let _ = writeln!(s, r#"<g class="realized" fill="none" stroke-width="1.5" stroke-dasharray="4 3">"#);
        for r in 0..plan.robots.len() {
            let mut d = String::new();
            for (i, smp) in realized.iter().filter(|x| x.robot == r).enumerate() {
                let _ = write!(d, "{}{:.1},{:.1} ", if i == 0 { "M" } else { "L" }, px(smp.x), py(smp.y));
            }
            if !d.is_empty() {
                let _ = writeln!(s, r#"<path stroke="{}" d="{}"/>"#, COLORS[r % COLORS.len()], d.trim_end());
            }
        }
        let _ = writeln!(s, "</g>");
    }
    if let Some(c) = collision {
        // Mark where the first of the two robots was.
        if let Some(smp) = realized.iter().rev().find(|x| x.robot == c.robots.0 && x.t <= c.time) {
            let _ = writeln!(
                s,
                r##"<circle class="collision" cx="{:.1}" cy="{:.1}" r="12" fill="none" stroke="#ff0000" stroke-width="3"><title>collision at {:.1} s between robots {} and {}</title></circle>"##,
                px(smp.x),
                py(smp.y),
                c.time,
                c.robots.0,
                c.robots.1
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
