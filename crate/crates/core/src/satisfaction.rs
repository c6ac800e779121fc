//! Adaptive-learning customer satisfaction.
//!
//! Each (customer, product) pair carries a vote `x` on the 0–10 scale that is
//! updated once per delivered order:
//!
//! ```text
//! x(k+1) = (1 − α)·x(k) + α·u(k)
//! u(k)   = f·I_n + ξ·s + β·Δp + δ·d + φ·q + η·x_other
//! f      = [9 − 1.2·(1 − α)·x(k)] / α
//! ```
//!
//! `f` itself can exceed 10, so the vote (not `f`) is clamped to `[0, 10]`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::model::ProductId;

pub const VOTE_MIN: f64 = 0.0;
pub const VOTE_MAX: f64 = 10.0;

/// Weights of the input function. Signs of `delta` and `phi` are part of the
/// configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SatisfactionParams {
    /// Forgetting factor, in (0, 1).
    pub alpha: f64,
    /// Support-quality weight.
    pub xi: f64,
    /// Price-variation weight, positive.
    pub beta: f64,
    /// Delay weight.
    pub delta: f64,
    /// Quality weight.
    pub phi: f64,
    /// Cross-customer coupling weight.
    pub eta: f64,
}

impl Default for SatisfactionParams {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            xi: 0.5,
            beta: 0.01,
            delta: -0.05,
            phi: 0.02,
            eta: 0.1,
        }
    }
}

impl SatisfactionParams {
    pub fn validate(&self) -> Result<(), ValidationError> {
        check_alpha(self.alpha)?;
        if !(self.beta > 0.0) {
            return Err(ValidationError::PriceWeight(self.beta));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<(), ValidationError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ValidationError::ForgettingFactor(alpha))
    }
}

/// Inputs observed at one delivery.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InputSignals {
    /// Innovation factor `I_n`.
    pub innovation: bool,
    /// `s`: the last support request was satisfied.
    pub support_ok: bool,
    /// Price variation, percent of previous price.
    pub price_variation: f64,
    /// Delay, percent of the mean lead time.
    pub delay: f64,
    /// Quality, percent of the mean quality level.
    pub quality: f64,
    /// Other customers' vote summary.
    pub x_other: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteState {
    pub x: f64,
    pub k: u64,
}

impl VoteState {
    pub fn new(x: f64) -> Self {
        Self {
            x: x.clamp(VOTE_MIN, VOTE_MAX),
            k: 0,
        }
    }
}

/// Generic input `u = f·I_n + ξ·s + β·Δp + δ·d + φ·q + η·x_other`.
pub fn generic_input(f_value: f64, signals: &InputSignals, p: &SatisfactionParams) -> f64 {
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    f_value * flag(signals.innovation)
        + p.xi * flag(signals.support_ok)
        + p.beta * signals.price_variation
        + p.delta * signals.delay
        + p.phi * signals.quality
        + p.eta * signals.x_other
}

/// The firm's innovation response `f = [9 − 1.2·(1 − α)·x] / α`.
pub fn firm_f(x: f64, alpha: f64) -> Result<f64, ValidationError> {
    check_alpha(alpha)?;
    Ok((9.0 - 1.2 * (1.0 - alpha) * x) / alpha)
}

/// Input with the firm's `f`.
pub fn firm_input(
    x: f64,
    signals: &InputSignals,
    p: &SatisfactionParams,
) -> Result<f64, ValidationError> {
    Ok(generic_input(firm_f(x, p.alpha)?, signals, p))
}

/// `(1 − α)·x + α·u` without clamping.
pub fn raw_update(x: f64, u: f64, alpha: f64) -> f64 {
    (1.0 - alpha) * x + alpha * u
}

pub fn update_vote(state: VoteState, u: f64, p: &SatisfactionParams) -> VoteState {
    VoteState {
        x: raw_update(state.x, u, p.alpha).clamp(VOTE_MIN, VOTE_MAX),
        k: state.k + 1,
    }
}

/// Votes under zero input: `[x0, x1, …, xn]`.
pub fn decay_trajectory(x0: f64, alpha: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    out.push(x);
    for _ in 0..n {
        x = raw_update(x, 0.0, alpha).clamp(VOTE_MIN, VOTE_MAX);
        out.push(x);
    }
    out
}

/// Closed form of one innovation step with all other signals zero:
/// `9 − 0.2·(1 − α)·x`.
pub fn innovation_step(x: f64, alpha: f64) -> f64 {
    9.0 - 0.2 * (1.0 - alpha) * x
}

/// One point of the exported satisfaction series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub k: u64,
    pub time: f64,
    pub customer: u32,
    pub product: ProductId,
    pub vote: f64,
    pub innovation: bool,
}

/// Vote state of every customer, with the support latch and innovation flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomerPanel {
    params: SatisfactionParams,
    votes: BTreeMap<(u32, ProductId), VoteState>,
    innovation: BTreeSet<(u32, ProductId)>,
    support_latch: BTreeSet<u32>,
    series: Vec<VoteRecord>,
}

impl CustomerPanel {
    pub fn new(params: SatisfactionParams) -> Self {
        Self {
            params,
            votes: BTreeMap::new(),
            innovation: BTreeSet::new(),
            support_latch: BTreeSet::new(),
            series: Vec::new(),
        }
    }

    pub fn params(&self) -> &SatisfactionParams {
        &self.params
    }

    pub fn register(&mut self, customer: u32, product: ProductId, initial_vote: f64) {
        let state = VoteState::new(initial_vote);
        self.votes.insert((customer, product), state);
        self.series.push(VoteRecord {
            k: 0,
            time: 0.0,
            customer,
            product,
            vote: state.x,
            innovation: false,
        });
    }

    pub fn vote(&self, customer: u32, product: ProductId) -> Option<VoteState> {
        self.votes.get(&(customer, product)).copied()
    }

    pub fn innovation(&self, customer: u32, product: ProductId) -> bool {
        self.innovation.contains(&(customer, product))
    }

    pub fn any_innovation(&self, product: ProductId) -> bool {
        self.innovation.iter().any(|&(_, p)| p == product)
    }

    pub fn support_latched(&self, customer: u32) -> bool {
        self.support_latch.contains(&customer)
    }

    /// Mean of the other customers' current votes for `product`; 0 when no
    /// other customer buys it.
    pub fn others_mean(&self, customer: u32, product: ProductId) -> f64 {
        let (sum, n) = self
            .votes
            .iter()
            .filter(|(&(c, p), _)| p == product && c != customer)
            .fold((0.0, 0u32), |(s, n), (_, v)| (s + v.x, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Mean of all current votes.
    pub fn mean_vote(&self) -> Option<f64> {
        if self.votes.is_empty() {
            return None;
        }
        Some(self.votes.values().map(|v| v.x).sum::<f64>() / self.votes.len() as f64)
    }

    /// Support resolved for `customer`: the next update sees `s = 1`.
    pub fn latch_support(&mut self, customer: u32) {
        self.support_latch.insert(customer);
    }

    /// Sets `I_n = 1` for every customer voting on `product`.
    pub fn launch(&mut self, product: ProductId) {
        let keys: Vec<_> = self
            .votes
            .keys()
            .filter(|&&(_, p)| p == product)
            .copied()
            .collect();
        self.innovation.extend(keys);
    }

    /// Vote update for one delivered order. Consumes the support latch of the
    /// customer and the innovation flag of the pair.
    pub fn on_delivery(
        &mut self,
        customer: u32,
        product: ProductId,
        at: f64,
        price_variation: f64,
        delay: f64,
        quality: f64,
    ) -> Option<f64> {
        let state = *self.votes.get(&(customer, product))?;
        let signals = InputSignals {
            innovation: self.innovation(customer, product),
            support_ok: self.support_latched(customer),
            price_variation,
            delay,
            quality,
            x_other: self.others_mean(customer, product),
        };
        let u = firm_input(state.x, &signals, &self.params).expect("params validated");
        let next = update_vote(state, u, &self.params);
        self.votes.insert((customer, product), next);
        self.support_latch.remove(&customer);
        self.innovation.remove(&(customer, product));
        self.series.push(VoteRecord {
            k: next.k,
            time: at,
            customer,
            product,
            vote: next.x,
            innovation: signals.innovation,
        });
        Some(next.x)
    }

    pub fn series(&self) -> &[VoteRecord] {
        &self.series
    }

    pub fn into_series(self) -> Vec<VoteRecord> {
        self.series
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(alpha: f64) -> SatisfactionParams {
        SatisfactionParams {
            alpha,
            xi: 0.0,
            beta: 0.01,
            delta: 0.0,
            phi: 0.0,
            eta: 0.0,
        }
    }

    #[test]
    fn generic_input_cases() {
        let p = SatisfactionParams {
            alpha: 0.5,
            xi: 0.5,
            beta: 0.01,
            delta: 0.0,
            phi: 0.0,
            eta: 0.1,
        };
        assert_eq!(generic_input(0.0, &InputSignals::default(), &p), 0.0);
        let innov = InputSignals {
            innovation: true,
            ..Default::default()
        };
        assert_eq!(generic_input(18.0, &innov, &p), 18.0);
        let s = InputSignals {
            support_ok: true,
            x_other: 8.0,
            ..Default::default()
        };
        assert!((generic_input(0.0, &s, &p) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn firm_f_cases() {
        assert!((firm_f(0.0, 0.5).unwrap() - 18.0).abs() < 1e-12);
        assert!((firm_f(0.0, 0.9).unwrap() - 10.0).abs() < 1e-12);
        assert!((firm_f(9.0, 0.6).unwrap() - 7.8).abs() < 1e-12);
        assert!(matches!(
            firm_f(1.0, 1.0),
            Err(ValidationError::ForgettingFactor(_))
        ));
        assert!(firm_f(1.0, 0.0).is_err());
    }

    #[test]
    fn update_vote_cases() {
        let s = update_vote(VoteState::new(8.0), 4.0, &params(0.5));
        assert_eq!((s.x, s.k), (6.0, 1));
        let s = update_vote(VoteState::new(10.0), 0.0, &params(0.3));
        assert!((s.x - 7.0).abs() < 1e-12);
    }

    #[test]
    fn update_clamps_to_scale() {
        let s = update_vote(VoteState::new(9.0), 40.0, &params(0.5));
        assert_eq!(s.x, 10.0);
        let s = update_vote(VoteState::new(1.0), -40.0, &params(0.5));
        assert_eq!(s.x, 0.0);
    }

    #[test]
    fn decay_cases() {
        let t = decay_trajectory(10.0, 0.3, 2);
        assert_eq!(t.len(), 3);
        assert!((t[1] - 7.0).abs() < 1e-12 && (t[2] - 4.9).abs() < 1e-12);
        assert!(decay_trajectory(0.0, 0.7, 5).iter().all(|&x| x == 0.0));
        assert_eq!(decay_trajectory(3.0, 0.7, 0), vec![3.0]);
    }

    #[test]
    fn innovation_step_cases() {
        assert_eq!(innovation_step(0.0, 0.4), 9.0);
        assert!((innovation_step(10.0, 0.5) - 8.0).abs() < 1e-12);
        assert!((innovation_step(9.0, 1.0 - 1e-12) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn innovation_through_eq3_lands_on_nine() {
        for alpha in [0.05, 0.3, 0.5, 0.95] {
            let signals = InputSignals {
                innovation: true,
                ..Default::default()
            };
            let u = firm_input(0.0, &signals, &params(alpha)).unwrap();
            let s = update_vote(VoteState::new(0.0), u, &params(alpha));
            assert!((s.x - 9.0).abs() < 1e-12, "alpha={alpha}");
        }
    }

    #[test]
    fn support_latch_is_boolean_and_cleared() {
        let p = SatisfactionParams {
            xi: 2.0,
            ..params(0.5)
        };
        let mut panel = CustomerPanel::new(p);
        panel.register(1, 1, 4.0);
        panel.latch_support(1);
        panel.latch_support(1);
        let x = panel.on_delivery(1, 1, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!((x - 3.0).abs() < 1e-12);
        assert!(!panel.support_latched(1));
        let x = panel.on_delivery(1, 1, 2.0, 0.0, 0.0, 0.0).unwrap();
        assert!((x - 1.5).abs() < 1e-12);
    }

    #[test]
    fn launch_flags_all_customers_and_clears_per_pair() {
        let mut panel = CustomerPanel::new(params(0.3));
        panel.register(1, 1, 5.0);
        panel.register(2, 1, 5.0);
        panel.register(2, 3, 5.0);
        panel.launch(1);
        assert!(panel.innovation(1, 1) && panel.innovation(2, 1));
        assert!(!panel.innovation(2, 3));
        panel.on_delivery(1, 1, 3.0, 0.0, 0.0, 0.0);
        assert!(!panel.innovation(1, 1));
        assert!(panel.innovation(2, 1));
    }

    #[test]
    fn others_mean_excludes_self() {
        let mut panel = CustomerPanel::new(params(0.3));
        panel.register(1, 1, 2.0);
        panel.register(2, 1, 8.0);
        panel.register(3, 1, 6.0);
        assert_eq!(panel.others_mean(1, 1), 7.0);
        assert_eq!(panel.others_mean(1, 2), 0.0);
        assert_eq!(panel.mean_vote(), Some(16.0 / 3.0));
    }

    proptest! {
        #[test]
        fn vote_stays_on_scale(x in 0.0..=10.0f64, u in -100.0..100.0f64, alpha in 0.01..0.99f64) {
            let s = update_vote(VoteState::new(x), u, &params(alpha));
            prop_assert!((0.0..=10.0).contains(&s.x));
        }

        #[test]
        fn constant_input_converges_geometrically(
            x0 in 0.0..=10.0f64, u in 0.0..=10.0f64, alpha in 0.01..0.99f64, n in 1usize..30
        ) {
            let mut x = x0;
            for _ in 0..n {
                let next = raw_update(x, u, alpha);
                prop_assert!(((next - u).abs() - (1.0 - alpha) * (x - u).abs()).abs() < 1e-12);
                x = next;
            }
        }

        #[test]
        fn zero_input_strictly_decreases(x0 in 0.001..=10.0f64, alpha in 0.01..0.99f64) {
            let t = decay_trajectory(x0, alpha, 10);
            prop_assert!(t.windows(2).all(|w| w[1] < w[0]));
        }

        #[test]
        fn identical_customers_stay_equal(
            x0 in 0.0..=10.0f64, deliveries in proptest::collection::vec((-50.0..50.0f64, 0.0..150.0f64), 1..20)
        ) {
            let mut panel = CustomerPanel::new(SatisfactionParams::default());
            panel.register(1, 1, x0);
            panel.register(2, 1, x0);
            for (i, (d, q)) in deliveries.into_iter().enumerate() {
                // Simultaneous votes: both customers see the same x_other.
                let before = panel.clone();
                let mut a = before.clone();
                let mut b = before;
                let xa = a.on_delivery(1, 1, i as f64, 0.0, d, q).unwrap();
                let xb = b.on_delivery(2, 1, i as f64, 0.0, d, q).unwrap();
                prop_assert_eq!(xa, xb);
                panel.votes.insert((1, 1), a.vote(1, 1).unwrap());
                panel.votes.insert((2, 1), b.vote(2, 1).unwrap());
            }
        }
    }
}
