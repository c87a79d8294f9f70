//! Random order streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Direction, Layout, ModelError, NodeKind, Order, OrderItem};

pub const MAX_ITEMS: usize = 4;
pub const MEAN_ITEMS: f64 = 2.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub item_duration: f64,
    pub workstation_duration: f64,
    /// Release date of order `i` is `i * release_interval`.
    pub release_interval: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams { item_duration: 10.0, workstation_duration: 0.0, release_interval: 0.0 }
    }
}

/// Continuation probability `q` of the item count: P(count > k) = q^k for k < 4,
/// with everything beyond 4 folded into 4. The mean is 1 + q + q² + q³, solved
/// for 2.5 by bisection.
pub fn item_count_continuation() -> f64 {
    let mean = |q: f64| 1.0 + q + q * q + q * q * q;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < MEAN_ITEMS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn sample_item_count(rng: &mut impl Rng, q: f64) -> usize {
    let mut count = 1;
    while count < MAX_ITEMS && rng.random::<f64>() < q {
        count += 1;
    }
    count
}

pub fn generate_scenario(layout: &Layout, n_orders: usize, seed: u64) -> Result<Vec<Order>, ModelError> {
    generate_scenario_with(layout, n_orders, seed, &ScenarioParams::default())
}

pub fn generate_scenario_with(
    layout: &Layout,
    n_orders: usize,
    seed: u64,
    params: &ScenarioParams,
) -> Result<Vec<Order>, ModelError> {
    let shelves = layout.graph.nodes_of_kind(NodeKind::Shelf);
    if shelves.is_empty() {
        return Err(ModelError::NoShelves);
    }
    if layout.workstations.is_empty() {
        return Err(ModelError::NoWorkstations);
    }
    let q = item_count_continuation();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders = (0..n_orders)
        .map(|i| {
            let direction = if rng.random::<bool>() { Direction::Pickup } else { Direction::Delivery };
            let count = sample_item_count(&mut rng, q);
            let items = (0..count)
                .map(|_| OrderItem {
                    location: shelves[rng.random_range(0..shelves.len())],
                    duration: params.item_duration,
                    workstation_duration: params.workstation_duration,
                })
                .collect();
            Order { id: format!("o{i}"), release: i as f64 * params.release_interval, direction, items }
        })
        .collect();
    Ok(orders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layouts::{generate_layout, LayoutParams, Template};

    fn layout() -> Layout {
        Layout::from_file(&generate_layout(&LayoutParams::new(Template::OneRow)).unwrap()).unwrap()
    }

    #[test]
    fn continuation_gives_target_mean() {
        let q = item_count_continuation();
        assert!((q - 0.6916).abs() < 1e-3, "{q}");
    }

    #[test]
    fn item_counts_have_target_mean_and_max() {
        let orders = generate_scenario(&layout(), 10_000, 7).unwrap();
        let counts: Vec<usize> = orders.iter().map(|o| o.items.len()).collect();
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        assert!((2.4..=2.6).contains(&mean), "{mean}");
        assert_eq!(counts.iter().max(), Some(&4));
        assert_eq!(counts.iter().min(), Some(&1));
    }

    #[test]
    fn directions_pass_chi_square() {
        let orders = generate_scenario(&layout(), 10_000, 11).unwrap();
        let pickups = orders.iter().filter(|o| o.direction == Direction::Pickup).count() as f64;
        let expected = 5000.0;
        let chi2 = 2.0 * (pickups - expected).powi(2) / expected;
        // 1% critical value with one degree of freedom.
        assert!(chi2 < 6.635, "{chi2}");
    }

    #[test]
    fn deterministic_and_empty() {
        let l = layout();
        assert_eq!(generate_scenario(&l, 20, 3).unwrap(), generate_scenario(&l, 20, 3).unwrap());
        assert_ne!(generate_scenario(&l, 20, 3).unwrap(), generate_scenario(&l, 20, 4).unwrap());
        assert!(generate_scenario(&l, 0, 3).unwrap().is_empty());
        for o in generate_scenario(&l, 200, 5).unwrap() {
            for it in o.items {
                assert_eq!(l.graph.node(it.location).kind, NodeKind::Shelf);
            }
        }
    }
}
