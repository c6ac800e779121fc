use serde::{Deserialize, Serialize};

use super::ids::{ActorId, Item};
use crate::error::ReservationError;

/// (s, S) order-up-to policy: reorder when on hand drops strictly below
/// `reorder_point`, ordering up to `order_up_to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReorderPolicy {
    pub reorder_point: u32,
    pub order_up_to: u32,
}

impl ReorderPolicy {
    /// Quantity to order for the given stock level, if any.
    pub fn order_quantity(&self, on_hand: u32) -> Option<u32> {
        (on_hand < self.reorder_point).then(|| self.order_up_to.saturating_sub(on_hand))
            .filter(|&q| q > 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InventoryRecord {
    pub owner: ActorId,
    pub item: Item,
    on_hand: u32,
    pub policy: Option<ReorderPolicy>,
    /// Currency per unit per hour.
    pub unit_holding_cost: f64,
    /// Step function of stock level: `(time, level)` from t=0.
    samples: Vec<(f64, u32)>,
}

impl InventoryRecord {
    pub fn new(
        owner: ActorId,
        item: Item,
        initial: u32,
        policy: Option<ReorderPolicy>,
        unit_holding_cost: f64,
    ) -> Self {
        Self {
            owner,
            item,
            on_hand: initial,
            policy,
            unit_holding_cost,
            samples: vec![(0.0, initial)],
        }
    }

    pub fn on_hand(&self) -> u32 {
        self.on_hand
    }

    pub fn initial(&self) -> u32 {
        self.samples[0].1
    }

    pub fn samples(&self) -> &[(f64, u32)] {
        &self.samples
    }

    /// Applies `delta` at time `at`, recording a stock sample.
    pub fn adjust(&mut self, delta: i64, at: f64) -> Result<u32, ReservationError> {
        let next = self.on_hand as i64 + delta;
        if next < 0 {
            return Err(ReservationError {
                owner: self.owner,
                item: self.item,
                on_hand: self.on_hand,
                requested: delta.unsigned_abs() as u32,
            });
        }
        self.on_hand = next as u32;
        if delta != 0 {
            self.samples.push((at, self.on_hand));
        }
        Ok(self.on_hand)
    }

    /// ∫₀ᴴ level(t) dt for the recorded step function.
    pub fn stock_integral(&self, horizon: f64) -> f64 {
        step_integral(&self.samples, horizon)
    }

    /// Time-weighted mean stock over `[0, horizon]`; `None` for an empty window.
    pub fn time_weighted_mean(&self, horizon: f64) -> Option<f64> {
        (horizon > 0.0).then(|| self.stock_integral(horizon) / horizon)
    }

    pub fn holding_cost(&self, horizon: f64) -> f64 {
        self.unit_holding_cost * self.stock_integral(horizon)
    }
}

/// Integral of a right-continuous step function given by `(time, level)`
/// breakpoints sorted by time, over `[0, horizon]`.
pub fn step_integral(samples: &[(f64, u32)], horizon: f64) -> f64 {
    let mut total = 0.0;
    for (i, &(t, level)) in samples.iter().enumerate() {
        if t >= horizon {
            break;
        }
        let end = samples.get(i + 1).map_or(horizon, |n| n.0.min(horizon));
        total += level as f64 * (end - t);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(initial: u32) -> InventoryRecord {
        InventoryRecord::new(ActorId::Firm, Item::Product(1), initial, None, 0.01)
    }

    #[test]
    fn adjust_down() {
        let mut r = rec(500);
        assert_eq!(r.adjust(-200, 1.0).unwrap(), 300);
    }

    #[test]
    fn adjust_below_zero_is_reservation_error() {
        let mut r = rec(100);
        let err = r.adjust(-150, 1.0).unwrap_err();
        assert_eq!(err.requested, 150);
        assert_eq!(r.on_hand(), 100);
    }

    #[test]
    fn time_weighted_mean_of_two_steps() {
        let mut r = rec(500);
        r.adjust(-200, 24.0).unwrap();
        assert_eq!(r.time_weighted_mean(48.0), Some(400.0));
        assert!((r.holding_cost(48.0) - 0.01 * 400.0 * 48.0).abs() < 1e-9);
        assert_eq!(r.time_weighted_mean(0.0), None);
    }

    #[test]
    fn order_up_to_is_strictly_below() {
        let p = ReorderPolicy {
            reorder_point: 100,
            order_up_to: 500,
        };
        assert_eq!(p.order_quantity(0), Some(500));
        assert_eq!(p.order_quantity(100), None);
        assert_eq!(p.order_quantity(99), Some(401));
    }
}
