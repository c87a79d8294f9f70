use warehouse_mapf::ipp::{plan_orders, PlanOptions};
use warehouse_mapf::layouts::{generate_layout, LayoutParams, Template};
use warehouse_mapf::model::Layout;
use warehouse_mapf::routing::{DurationModel, RoutingConfig};
use warehouse_mapf::scenario::generate_scenario;
use warehouse_mapf::simulator::{execute, realized_workstation_violations, NoiseModel, SimOptions};
use warehouse_mapf::world::World;

fn world(model: DurationModel, robots: usize) -> World {
    let layout = Layout::from_file(&generate_layout(&LayoutParams::new(Template::OneRow)).unwrap()).unwrap();
    let config = RoutingConfig { duration_model: model, ..RoutingConfig::default() };
    World::new(layout.with_robots(robots), &config).unwrap()
}

#[test]
fn noiseless_execution_matches_plan() {
    let w = world(DurationModel::Kinematic, 3);
    for seed in 0..3 {
        let orders = generate_scenario(&w.layout, 5, seed).unwrap();
        let (_, plan) = plan_orders(&w, &orders, &PlanOptions::default()).unwrap();
        let trace = execute(&w, &plan, &SimOptions::default()).unwrap();
        assert_eq!(trace.collision, None, "seed {seed}");
        assert!(realized_workstation_violations(&plan, &trace).is_empty());
        assert_eq!(trace.task_completions.len(), plan.tasks.len());
        for &(idx, end) in &trace.task_completions {
            let outcome = plan.tasks.iter().find(|t| t.index == idx).unwrap();
            assert!((outcome.delivery_end.secs() - end).abs() < 1e-3);
        }
    }
}

#[test]
fn execution_is_deterministic_per_seed() {
    let w = world(DurationModel::Kinematic, 2);
    let orders = generate_scenario(&w.layout, 4, 7).unwrap();
    let (_, plan) = plan_orders(&w, &orders, &PlanOptions::default()).unwrap();
    let opts = SimOptions { noise: NoiseModel::pert(11), ..SimOptions::default() };
    let a = execute(&w, &plan, &opts).unwrap();
    let b = execute(&w, &plan, &opts).unwrap();
    assert_eq!(a, b);
    let c = execute(&w, &plan, &SimOptions { noise: NoiseModel::pert(12), ..opts }).unwrap();
    assert_ne!(a.end, c.end);
    assert!(a.end >= plan.makespan.secs() - 1e-6);
}

#[test]
fn single_robot_never_collides() {
    let w = world(DurationModel::NoInertia, 1);
    let orders = generate_scenario(&w.layout, 3, 1).unwrap();
    let (_, plan) = plan_orders(&w, &orders, &PlanOptions::default()).unwrap();
    let trace = execute(&w, &plan, &SimOptions::default()).unwrap();
    assert_eq!(trace.collision, None);
    assert!(trace.end > plan.makespan.secs());
}
