#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcor_sim::model::{ActorId, Item};
use vcor_sim::scenario::{
    ArrivalMode, BomLine, CatalogConfig, CustomerConfig, DemandConfig, DemandTable, DefectRate,
    FirmConfig, LeadTime, Mode, PriceConfig, ProcessToggles, ProductPrice, ProspectConfig,
    RawPrice, ResearchConfig, RetailerConfig, Scenario, ScenarioConfig, SellConfig, StockConfig,
    StockMode, SupplierConfig, SupportConfig,
};

pub fn mts(item: u32, initial: u32, s: u32, big_s: u32) -> StockConfig {
    StockConfig {
        item,
        initial,
        mode: StockMode::MakeToStock,
        reorder_point: Some(s),
        order_up_to: Some(big_s),
    }
}

pub fn fixed(hours: f64) -> LeadTime {
    LeadTime::Fixed { hours }
}

/// One product, one raw, one supplier, fixed 1.5 h lead times, customer
/// orders of 10 boxes every 4 h, 12 h horizon.
pub fn micro_config() -> ScenarioConfig {
    ScenarioConfig {
        name: "micro".into(),
        mode: Mode::Scor,
        seed: 7,
        horizon_hours: 12.0,
        catalog: CatalogConfig {
            products: vec![1],
            raws: vec![1],
            bom: vec![BomLine {
                product: 1,
                raws: vec![(1, 1)],
            }],
        },
        customers: vec![CustomerConfig {
            id: 1,
            products: vec![1],
        }],
        retailer: RetailerConfig {
            source_interval: 2.5,
            deliver_interval: 2.0,
            lead_time: fixed(1.5),
            holding_cost: 0.002,
            stock: vec![mts(1, 15, 10, 30)],
        },
        firm: FirmConfig {
            source_interval: 3.0,
            make_interval: 3.0,
            deliver_interval: 2.5,
            capacity_per_day: 24.0,
            lead_time: fixed(1.5),
            fgi_holding_cost: 0.001,
            raw_holding_cost: 0.0005,
            products: vec![mts(1, 20, 5, 20)],
            raws: vec![mts(1, 100, 10, 100)],
            sourcing: vec![(1, 1)],
        },
        suppliers: vec![SupplierConfig {
            id: 1,
            source_interval: 4.0,
            deliver_interval: 4.0,
            lead_time: fixed(1.5),
            holding_cost: 0.0005,
            raws: vec![mts(1, 200, 10, 200)],
        }],
        prices: PriceConfig {
            products: vec![ProductPrice {
                product: 1,
                retail: 3.0,
                wholesale: 2.0,
                production_cost: 0.5,
            }],
            raws: vec![RawPrice {
                raw: 1,
                price: 0.3,
                upstream_price: 0.15,
            }],
        },
        support: SupportConfig {
            defect_rates: vec![DefectRate {
                product: 1,
                probability: 0.0,
            }],
            ..SupportConfig::default()
        },
        sell: SellConfig {
            prospects: vec![],
            ..SellConfig::default()
        },
        demand: DemandConfig {
            lot_size: 10,
            ..Default::default()
        },
        ..ScenarioConfig::default()
    }
}

// Hand-traced expectations for `micro()`.

/// `(fire_time, target, kind)` of every event in firing order.
pub const MICRO_SCHEDULE: &[(f64, &str, &str)] = &[
    (2.0, "retailer", "deliver"),
    (2.5, "retailer", "source"),
    (2.5, "firm", "deliver"),
    (3.0, "firm", "source"),
    (3.0, "firm", "make"),
    (4.0, "supplier-1", "source"),
    (4.0, "supplier-1", "deliver"),
    (4.0, "customer-1", "customer-demand"),
    (4.0, "retailer", "deliver"),
    (5.0, "retailer", "source"),
    (5.0, "firm", "deliver"),
    (5.0, "firm", "receive-order"),
    (5.5, "order-1", "arrival"),
    (6.0, "firm", "source"),
    (6.0, "firm", "make"),
    (6.0, "retailer", "deliver"),
    (7.5, "retailer", "source"),
    (7.5, "firm", "deliver"),
    (8.0, "supplier-1", "source"),
    (8.0, "supplier-1", "deliver"),
    (8.0, "customer-1", "customer-demand"),
    (8.0, "retailer", "deliver"),
    (9.0, "firm", "source"),
    (9.0, "firm", "make"),
    (10.0, "retailer", "source"),
    (10.0, "firm", "deliver"),
    (10.0, "retailer", "deliver"),
    (11.5, "order-2", "arrival"),
    (12.0, "supplier-1", "source"),
    (12.0, "supplier-1", "deliver"),
    (12.0, "customer-1", "customer-demand"),
    (12.0, "firm", "source"),
    (12.0, "firm", "make"),
    (12.0, "retailer", "deliver"),
];

/// `(time, boxes, for_order)` of every production lot.
pub const MICRO_LOTS: &[(f64, u32, Option<u64>)] =
    &[(6.0, 3, Some(2)), (9.0, 2, Some(2)), (9.0, 1, None), (12.0, 3, None)];

pub const MICRO_RETAIL_HOURS: &[f64] = &[1.5];
pub const MICRO_FIRM_HOURS: &[f64] = &[6.5];

pub const MICRO_FINAL_STOCK: &[(ActorId, Item, u32)] = &[
    (ActorId::Retailer, Item::Product(1), 10),
    (ActorId::Firm, Item::Product(1), 4),
    (ActorId::Firm, Item::Raw(1), 91),
    (ActorId::Supplier(1), Item::Raw(1), 200),
];

pub fn micro_demand() -> DemandTable {
    let mut t = DemandTable::new();
    t.insert(1, 1, [1800; 12]);
    t
}

pub fn micro() -> Scenario {
    Scenario::new(micro_config(), micro_demand()).expect("micro scenario is valid")
}

fn mto(item: u32, initial: u32) -> StockConfig {
    StockConfig {
        item,
        initial,
        mode: StockMode::MakeToOrder,
        reorder_point: None,
        order_up_to: None,
    }
}

fn random_stock(rng: &mut ChaCha8Rng, item: u32, scale: u32, allow_mto: bool) -> StockConfig {
    let initial = rng.gen_range(0..=scale);
    if allow_mto && rng.gen_bool(0.25) {
        return mto(item, initial);
    }
    let s = rng.gen_range(1..=scale / 4);
    let big_s = s + rng.gen_range(1..=scale);
    mts(item, initial, s, big_s)
}

fn random_lead_time(rng: &mut ChaCha8Rng) -> LeadTime {
    match rng.gen_range(0..4) {
        0 => fixed(rng.gen_range(0.0..4.0)),
        1 => {
            let min = rng.gen_range(0.0..2.0);
            LeadTime::Uniform {
                min,
                max: min + rng.gen_range(0.1..3.0),
            }
        }
        2 => {
            let min = rng.gen_range(0.0..2.0);
            let mode = min + rng.gen_range(0.0..1.5);
            LeadTime::Triangular {
                min,
                mode,
                max: mode + rng.gen_range(0.1..1.5),
            }
        }
        _ => LeadTime::Exponential {
            mean: rng.gen_range(0.2..3.0),
        },
    }
}

fn interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.gen_range(1..=12) as f64) * 0.5
}

fn subset(rng: &mut ChaCha8Rng, ids: &[u32]) -> Vec<u32> {
    let n = rng.gen_range(1..=ids.len());
    let mut v: Vec<u32> = ids.choose_multiple(rng, n).copied().collect();
    v.sort_unstable();
    v
}

/// A valid scenario with at most three products, three raws, two suppliers
/// and a horizon of at most 48 h, drawn from `seed`.
pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    let products: Vec<u32> = (1..=rng.gen_range(1..=3)).collect();
    let raws: Vec<u32> = (1..=rng.gen_range(1..=3)).collect();
    let supplier_ids: Vec<u32> = (1..=rng.gen_range(1..=2)).collect();

    let bom = products
        .iter()
        .map(|&product| BomLine {
            product,
            raws: subset(rng, &raws)
                .into_iter()
                .map(|r| (r, rng.gen_range(1..=3)))
                .collect(),
        })
        .collect();

    let customers: Vec<CustomerConfig> = (1..=rng.gen_range(1..=3))
        .map(|id| CustomerConfig {
            id,
            products: subset(rng, &products),
        })
        .collect();
    let mut demand = DemandTable::new();
    for c in &customers {
        for &p in &c.products {
            let mut months = [0u32; 12];
            for m in &mut months {
                *m = rng.gen_range(0..=3000);
            }
            demand.insert(c.id, p, months);
        }
    }

    let sourcing: Vec<(u32, u32)> = raws
        .iter()
        .map(|&r| (r, *supplier_ids.choose(rng).unwrap()))
        .collect();
    let suppliers = supplier_ids
        .iter()
        .map(|&id| SupplierConfig {
            id,
            source_interval: interval(rng),
            deliver_interval: interval(rng),
            lead_time: random_lead_time(rng),
            holding_cost: 0.0005,
            raws: sourcing
                .iter()
                .filter(|&&(_, s)| s == id)
                .map(|&(r, _)| random_stock(rng, r, 300, false))
                .collect(),
        })
        .collect();

    let mode = if rng.gen_bool(0.5) { Mode::Vcor } else { Mode::Scor };
    let prospects = (1..=rng.gen_range(0..=3))
        .map(|id| ProspectConfig {
            id,
            priority: rng.gen_range(1..=3),
            product: *products.choose(rng).unwrap(),
            boxes_per_day: rng.gen_range(1.0..80.0),
        })
        .collect();
    let renewed_bom = rng
        .gen_bool(0.5)
        .then(|| subset(rng, &raws).into_iter().map(|r| (r, rng.gen_range(1..=3))).collect());

    let config = ScenarioConfig {
        name: format!("random-{seed}"),
        mode,
        seed: rng.gen(),
        horizon_hours: rng.gen_range(1..=48) as f64,
        start_month: rng.gen_range(1..=12),
        processes: ProcessToggles::default(),
        catalog: CatalogConfig {
            products: products.clone(),
            raws: raws.clone(),
            bom,
        },
        demand: DemandConfig {
            table: None,
            lot_size: rng.gen_range(1..=20),
            arrival: if rng.gen_bool(0.5) {
                ArrivalMode::Deterministic
            } else {
                ArrivalMode::Memoryless
            },
        },
        customers,
        retailer: RetailerConfig {
            source_interval: interval(rng),
            deliver_interval: interval(rng),
            lead_time: random_lead_time(rng),
            holding_cost: 0.002,
            stock: products.iter().map(|&p| random_stock(rng, p, 80, true)).collect(),
        },
        firm: FirmConfig {
            source_interval: interval(rng),
            make_interval: interval(rng),
            deliver_interval: interval(rng),
            capacity_per_day: rng.gen_range(5.0..200.0),
            lead_time: random_lead_time(rng),
            fgi_holding_cost: 0.001,
            raw_holding_cost: 0.0005,
            products: products.iter().map(|&p| random_stock(rng, p, 120, true)).collect(),
            raws: raws.iter().map(|&r| random_stock(rng, r, 300, false)).collect(),
            sourcing,
        },
        suppliers,
        prices: PriceConfig {
            products: products
                .iter()
                .map(|&product| ProductPrice {
                    product,
                    retail: 3.0,
                    wholesale: 2.0,
                    production_cost: 0.5,
                })
                .collect(),
            raws: raws
                .iter()
                .map(|&raw| RawPrice {
                    raw,
                    price: 0.3,
                    upstream_price: 0.15,
                })
                .collect(),
        },
        support: SupportConfig {
            defect_rates: products
                .iter()
                .map(|&product| DefectRate {
                    product,
                    probability: rng.gen_range(0.0..=1.0),
                })
                .collect(),
            handling_time: rng.gen_range(0.0..4.0),
            ..SupportConfig::default()
        },
        research: ResearchConfig {
            delay: rng.gen_range(0.0..12.0),
            technology_cost: 100.0,
            renewed_bom,
        },
        sell: SellConfig {
            interval: interval(rng),
            contract_order_interval: interval(rng),
            prospects,
            ..SellConfig::default()
        },
        ..ScenarioConfig::default()
    };
    Scenario::new(config, demand).expect("random scenario is valid")
}
