//! Property tests over the engine, ledger, KPI algebra and whole runs.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use vcor_sim::engine::{read_trace, write_trace, Engine, EventData};
use vcor_sim::error::EngineError;
use vcor_sim::kpi::{delivery_series, smi, spi, sri};
use vcor_sim::model::{step_integral, ActorId, Item, Ledger, LedgerRecord, OrderOrigin, OrderStatus, ReorderPolicy};
use vcor_sim::run_scenario;
use vcor_sim::satisfaction::{update_vote, SatisfactionParams, VoteState};

#[derive(Debug, Clone)]
struct Tag(usize);

impl EventData for Tag {
    fn target(&self) -> String {
        self.0.to_string()
    }
    fn kind(&self) -> &'static str {
        "tag"
    }
}

fn run_cases() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #[test]
    fn engine_fires_in_time_then_insertion_order(slots in prop::collection::vec(0u8..8, 1..60)) {
        let mut e = Engine::new();
        for (i, &s) in slots.iter().enumerate() {
            e.schedule(s as f64 * 0.5, Tag(i)).unwrap();
        }
        let trace = e.run_until::<EngineError, _>(10.0, |_, _| Ok(())).unwrap().to_vec();
        prop_assert_eq!(trace.len(), slots.len());
        let mut expected: Vec<(f64, usize)> = slots
            .iter()
            .enumerate()
            .map(|(i, &s)| (s as f64 * 0.5, i))
            .collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let got: Vec<(f64, usize)> = trace
            .iter()
            .map(|r| (r.fire_time, r.target.parse().unwrap()))
            .collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn periodic_activations_fire_at_multiples(interval in 0.25f64..5.0, horizon in 0.0f64..40.0) {
        let mut e = Engine::new();
        e.register_periodic(Tag(0), interval).unwrap();
        let trace = e.run_until::<EngineError, _>(horizon, |_, _| Ok(())).unwrap().to_vec();
        let n = (1u32..).take_while(|&k| k as f64 * interval <= horizon).count();
        prop_assert_eq!(trace.len(), n);
        for (k, r) in trace.iter().enumerate() {
            prop_assert_eq!(r.fire_time, (k + 1) as f64 * interval);
            prop_assert!(r.fire_time <= horizon);
        }
    }

    #[test]
    fn reorder_only_strictly_below_s(s in 1u32..200, gap in 1u32..200, on_hand in 0u32..500) {
        let p = ReorderPolicy { reorder_point: s, order_up_to: s + gap };
        match p.order_quantity(on_hand) {
            Some(q) => {
                prop_assert!(on_hand < s);
                prop_assert_eq!(on_hand + q, s + gap);
            }
            None => prop_assert!(on_hand >= s),
        }
    }

    #[test]
    fn smi_times_sri_is_the_period(period in 1e-3f64..1e4, profit in 1e-3f64..1e6, stock in 1e-3f64..1e6) {
        let r = sri(profit, stock).unwrap();
        let m = smi(period, r).unwrap();
        prop_assert!((m * r - period).abs() <= 1e-9 * period.max(1.0));
    }

    #[test]
    fn spi_is_scale_free(profit in 1e-3f64..1e6, costs in 0.0f64..2e6, k in 1e-3f64..1e3) {
        let a = spi(profit, costs).unwrap();
        let b = spi(k * profit, k * costs).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn absent_kpis_are_not_zero(period in 1.0f64..100.0, profit in 0.0f64..10.0) {
        prop_assert_eq!(sri(profit, 0.0), None);
        prop_assert_eq!(smi(period, 0.0), None);
        prop_assert_eq!(spi(0.0, profit), None);
    }

    #[test]
    fn votes_stay_on_scale(x0 in 0.0f64..=10.0, alpha in 0.01f64..0.99, inputs in prop::collection::vec(-100.0f64..100.0, 0..40)) {
        let p = SatisfactionParams { alpha, ..SatisfactionParams::default() };
        let mut v = VoteState::new(x0);
        for (k, u) in inputs.iter().enumerate() {
            v = update_vote(v, *u, &p);
            prop_assert!((0.0..=10.0).contains(&v.x));
            prop_assert_eq!(v.k, k as u64 + 1);
        }
    }

    #[test]
    fn mean_stock_lies_between_extremes(levels in prop::collection::vec((0.0f64..1.0, 0u32..1000), 1..20), horizon in 0.5f64..50.0) {
        let mut t = 0.0;
        let mut samples = Vec::new();
        for (i, &(dt, level)) in levels.iter().enumerate() {
            if i > 0 {
                t += dt * horizon / levels.len() as f64;
            }
            samples.push((t, level));
        }
        let mean = step_integral(&samples, horizon) / horizon;
        let lo = levels.iter().map(|l| l.1).min().unwrap() as f64;
        let hi = levels.iter().map(|l| l.1).max().unwrap() as f64;
        prop_assert!(mean >= lo - 1e-9 && mean <= hi + 1e-9);
    }
}

proptest! {
    #![proptest_config(run_cases())]

    #[test]
    fn ledger_log_replays_and_round_trips(seed in any::<u64>()) {
        let s = common::random_scenario(seed);
        let run = run_scenario(&s).unwrap();
        let ledger = &run.output.ledger;
        let replayed = Ledger::replay(s.catalog(), ledger.log()).unwrap();
        prop_assert_eq!(&replayed, ledger);

        let mut buf = Vec::new();
        ledger.write_jsonl(&mut buf).unwrap();
        let back = Ledger::read_jsonl(s.catalog(), buf.as_slice()).unwrap();
        prop_assert_eq!(&back, ledger);

        let mut buf = Vec::new();
        write_trace(&mut buf, &run.trace).unwrap();
        prop_assert_eq!(read_trace(buf.as_slice()).unwrap(), run.trace.clone());
    }

    #[test]
    fn census_partitions_the_ledger(seed in any::<u64>()) {
        let run = run_scenario(&common::random_scenario(seed)).unwrap();
        let census = &run.kpi.census;
        prop_assert_eq!(census.len(), OrderStatus::ALL.len());
        prop_assert_eq!(census.values().sum::<usize>(), run.output.ledger.len());
        for status in OrderStatus::ALL {
            let n = run.output.ledger.orders().filter(|o| o.status == status).count();
            prop_assert_eq!(census[status.name()], n);
        }
    }

    #[test]
    fn delivery_series_ignores_order(seed in any::<u64>(), perm in any::<u64>()) {
        let run = run_scenario(&common::random_scenario(seed)).unwrap();
        let mut orders: Vec<_> = run.output.ledger.orders().cloned().collect();
        let n = orders.len().max(1);
        orders.rotate_left(perm as usize % n);
        orders.reverse();
        for provider in [ActorId::Retailer, ActorId::Firm] {
            let a = delivery_series(run.output.ledger.orders(), provider);
            let b = delivery_series(orders.iter(), provider);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn at_most_one_open_replenishment_at_any_time(seed in any::<u64>()) {
        let run = run_scenario(&common::random_scenario(seed)).unwrap();
        let mut open: BTreeMap<(ActorId, Item), u32> = BTreeMap::new();
        let mut key = BTreeMap::new();
        for rec in run.output.ledger.log() {
            match rec {
                LedgerRecord::Order { order_id, client, item, origin: OrderOrigin::Replenishment, .. } => {
                    let n = open.entry((*client, *item)).or_default();
                    prop_assert_eq!(*n, 0, "second open replenishment for {} {}", client, item);
                    *n += 1;
                    key.insert(*order_id, (*client, *item));
                }
                LedgerRecord::Transition { order_id, status: OrderStatus::Delivered | OrderStatus::Rejected, .. } => {
                    if let Some(k) = key.get(order_id) {
                        *open.get_mut(k).unwrap() -= 1;
                    }
                }
                _ => {}
            }
        }
    }

    #[test]
    fn same_seed_same_run(seed in any::<u64>()) {
        let s = common::random_scenario(seed);
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        prop_assert_eq!(a, b);
    }
}
