use proptest::prelude::*;
use warehouse_mapf::ipp::{plan_orders, Plan, PlanOptions};
use warehouse_mapf::layouts::{generate_layout, LayoutParams, Template};
use warehouse_mapf::metrics::{makespan_minutes, quartiles, regret, InstanceReport};
use warehouse_mapf::model::Layout;
use warehouse_mapf::routing::RoutingConfig;
use warehouse_mapf::scenario::generate_scenario;
use warehouse_mapf::world::World;

proptest! {
    #[test]
    fn quartiles_are_ordered_and_permutation_free(mut xs in prop::collection::vec(-1e6f64..1e6, 1..40), seed in any::<u64>()) {
        let (q1, q2, q3) = quartiles(&xs);
        prop_assert!(q1 <= q2 && q2 <= q3);
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(min <= q1 && q3 <= max);
        let k = (seed as usize) % xs.len();
        xs.rotate_left(k);
        xs.reverse();
        prop_assert_eq!(quartiles(&xs), (q1, q2, q3));
    }
}

#[test]
fn makespan_survives_serialization() {
    let layout = Layout::from_file(&generate_layout(&LayoutParams::new(Template::OneRow)).unwrap()).unwrap();
    let w = World::new(layout.with_robots(2), &RoutingConfig::default()).unwrap();
    let orders = generate_scenario(&w.layout, 4, 5).unwrap();
    let (_, plan) = plan_orders(&w, &orders, &PlanOptions::default()).unwrap();
    let back = Plan::from_json(&plan.to_json()).unwrap();
    assert_eq!(back.makespan_from_tasks(), plan.makespan);
    assert!((makespan_minutes(&back) - plan.makespan.secs() / 60.0).abs() < 1e-12);
    assert!(plan.makespan >= plan.ideal_makespan);
    let r = InstanceReport::from_plan("x", 2, 5, &back);
    assert_eq!(r.regret_pct, regret(&plan));
}

#[test]
fn lone_robot_has_no_regret() {
    let layout = Layout::from_file(&generate_layout(&LayoutParams::new(Template::OneRow)).unwrap()).unwrap();
    let w = World::new(layout.with_robots(1), &RoutingConfig::default()).unwrap();
    let orders = generate_scenario(&w.layout, 3, 2).unwrap();
    let (_, plan) = plan_orders(&w, &orders, &PlanOptions::default()).unwrap();
    let r = regret(&plan);
    assert!(r.abs() < 1.0, "regret {r}");
    let empty = plan_orders(&w, &[], &PlanOptions::default()).unwrap().1;
    assert_eq!(makespan_minutes(&empty), 0.0);
}
