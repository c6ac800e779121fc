//! Post-run indicators: delivery times, order census, stock rotation and
//! profitability.

mod compare;
mod cost;

pub use compare::{compare_runs, ComparisonReport, ComparisonRow};
pub use cost::{CostCategory, CostEntry, CostLedger};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::actors::WorldOutput;
use crate::model::{ActorId, Item, Ledger, Order, OrderId, OrderStatus, ProductId, RawId};
use crate::satisfaction::VoteRecord;
use crate::scenario::{mode_name, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryTime {
    pub order_id: OrderId,
    pub created_at: f64,
    pub delivered_at: f64,
    pub hours: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryStats {
    pub provider: ActorId,
    pub delivered: usize,
    pub mean_hours: Option<f64>,
    pub max_hours: Option<f64>,
    pub series: Vec<DeliveryTime>,
}

/// Delivery times of `provider`'s delivered orders, keyed by order id so the
/// result does not depend on iteration order.
pub fn delivery_series<'a>(
    orders: impl IntoIterator<Item = &'a Order>,
    provider: ActorId,
) -> DeliveryStats {
    let mut series: Vec<DeliveryTime> = orders
        .into_iter()
        .filter(|o| o.provider == provider)
        .filter_map(|o| {
            let at = o.time_of(OrderStatus::Delivered)?;
            Some(DeliveryTime {
                order_id: o.order_id,
                created_at: o.created_at,
                delivered_at: at,
                hours: at - o.created_at,
            })
        })
        .collect();
    series.sort_by_key(|d| d.order_id);
    let n = series.len();
    let mean_hours = (n > 0).then(|| series.iter().map(|d| d.hours).sum::<f64>() / n as f64);
    let max_hours = series.iter().map(|d| d.hours).reduce(f64::max);
    DeliveryStats {
        provider,
        delivered: n,
        mean_hours,
        max_hours,
        series,
    }
}

pub fn delivery_times(ledger: &Ledger, provider: ActorId) -> DeliveryStats {
    delivery_series(ledger.orders(), provider)
}

/// Stock rotation: sales profit over mean stock value. Absent when the
/// warehouse was empty for the whole window.
pub fn sri(sales_profit: f64, mean_stock_value: f64) -> Option<f64> {
    (mean_stock_value > 0.0).then(|| sales_profit / mean_stock_value)
}

/// Stock mean time in hours: period over rotation.
pub fn smi(period: f64, sri: f64) -> Option<f64> {
    (sri > 0.0).then(|| period / sri)
}

/// Sales profitability: margin over sales profit.
pub fn spi(sales_profit: f64, costs: f64) -> Option<f64> {
    (sales_profit > 0.0).then(|| (sales_profit - costs) / sales_profit)
}

/// Count of orders per current status; every status is present.
pub fn order_census(ledger: &Ledger) -> BTreeMap<String, usize> {
    let mut census: BTreeMap<String, usize> = OrderStatus::ALL
        .iter()
        .map(|s| (s.name().to_string(), 0))
        .collect();
    for o in ledger.orders() {
        *census.entry(o.status.name().to_string()).or_default() += 1;
    }
    census
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StockClass {
    Fgi,
    Raw,
}

impl StockClass {
    pub fn of(item: Item) -> Self {
        match item {
            Item::Product(_) => StockClass::Fgi,
            Item::Raw(_) => StockClass::Raw,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StockClass::Fgi => "fgi",
            StockClass::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockKpi {
    pub actor: ActorId,
    pub class: StockClass,
    pub sales_profit: f64,
    pub mean_stock_value: Option<f64>,
    pub sri: Option<f64>,
    pub smi_hours: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitKpi {
    /// `None` for the whole chain.
    pub actor: Option<ActorId>,
    pub sales_profit: f64,
    pub costs: f64,
    pub spi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub products: Vec<ProductId>,
    pub raws: Vec<RawId>,
    pub actors: Vec<ActorId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub header: String,
    pub scenario_digest: String,
    pub seed: u64,
    pub mode: String,
    pub horizon_hours: f64,
    pub topology: Topology,
    pub orders: usize,
    pub census: BTreeMap<String, usize>,
    pub delivery: Vec<DeliveryStats>,
    pub stock: Vec<StockKpi>,
    pub profitability: Vec<ProfitKpi>,
    pub costs: BTreeMap<String, f64>,
    pub produced: BTreeMap<ProductId, u32>,
    pub tickets: usize,
    pub satisfaction: Vec<VoteRecord>,
}

pub fn header_line(digest: &str, seed: u64) -> String {
    format!("vcor-sim scenario={digest} seed={seed}")
}

/// Unit value used for the mean stock value: wholesale price for finished
/// goods, supplier price for raw materials.
fn unit_value(scenario: &Scenario, item: Item) -> f64 {
    let prices = &scenario.config.prices;
    match item {
        Item::Product(p) => prices.product(p).map_or(0.0, |x| x.wholesale),
        Item::Raw(r) => prices.raw(r).map_or(0.0, |x| x.price),
    }
}

pub fn build_report(scenario: &Scenario, out: &WorldOutput) -> KpiReport {
    let h = scenario.horizon();
    let catalog = scenario.catalog();
    let mut providers = vec![ActorId::Retailer, ActorId::Firm];
    let mut suppliers: Vec<u32> = scenario.config.suppliers.iter().map(|s| s.id).collect();
    suppliers.sort_unstable();
    providers.extend(suppliers.iter().map(|&s| ActorId::Supplier(s)));

    let delivery = providers
        .iter()
        .map(|&p| delivery_times(&out.ledger, p))
        .collect();

    let classes: BTreeSet<(ActorId, StockClass)> = out
        .inventories
        .iter()
        .map(|r| (r.owner, StockClass::of(r.item)))
        .collect();
    let stock = classes
        .into_iter()
        .map(|(actor, class)| {
            let mean_stock_value = (h > 0.0).then(|| {
                out.inventories
                    .iter()
                    .filter(|r| r.owner == actor && StockClass::of(r.item) == class)
                    .filter_map(|r| Some(unit_value(scenario, r.item) * r.time_weighted_mean(h)?))
                    .sum::<f64>()
            });
            let profit = out.costs.revenue(Some(actor));
            let rotation = mean_stock_value.and_then(|m| sri(profit, m));
            StockKpi {
                actor,
                class,
                sales_profit: profit,
                mean_stock_value,
                sri: rotation,
                smi_hours: rotation.and_then(|r| smi(h, r)),
            }
        })
        .collect();

    let profitability = providers
        .iter()
        .map(|&a| Some(a))
        .chain(std::iter::once(None))
        .map(|actor| {
            let profit = out.costs.revenue(actor);
            let costs = out.costs.costs(actor);
            ProfitKpi {
                actor,
                sales_profit: profit,
                costs,
                spi: spi(profit, costs),
            }
        })
        .collect();

    KpiReport {
        header: header_line(scenario.digest(), scenario.seed()),
        scenario_digest: scenario.digest().to_string(),
        seed: scenario.seed(),
        mode: mode_name(scenario.config.mode).to_string(),
        horizon_hours: h,
        topology: Topology {
            products: catalog.products.iter().copied().collect(),
            raws: catalog.raws.iter().copied().collect(),
            actors: catalog.actors.iter().copied().collect(),
        },
        orders: out.ledger.len(),
        census: order_census(&out.ledger),
        delivery,
        stock,
        profitability,
        costs: out.costs.by_category(),
        produced: out.produced.clone(),
        tickets: out.ledger.tickets().count(),
        satisfaction: out.satisfaction.clone(),
    }
}

impl KpiReport {
    pub fn delivery_of(&self, provider: ActorId) -> Option<&DeliveryStats> {
        self.delivery.iter().find(|d| d.provider == provider)
    }

    pub fn stock_of(&self, actor: ActorId, class: StockClass) -> Option<&StockKpi> {
        self.stock.iter().find(|s| s.actor == actor && s.class == class)
    }

    pub fn spi_of(&self, actor: Option<ActorId>) -> Option<&ProfitKpi> {
        self.profitability.iter().find(|p| p.actor == actor)
    }

    /// Flat `(metric, value)` list used by run comparison.
    pub fn metrics(&self) -> Vec<(String, Option<f64>)> {
        let mut m = Vec::new();
        m.push(("orders".to_string(), Some(self.orders as f64)));
        for (status, n) in &self.census {
            m.push((format!("census.{status}"), Some(*n as f64)));
        }
        for d in &self.delivery {
            let a = d.provider;
            m.push((format!("delivery.{a}.delivered"), Some(d.delivered as f64)));
            m.push((format!("delivery.{a}.mean_hours"), d.mean_hours));
            m.push((format!("delivery.{a}.max_hours"), d.max_hours));
        }
        for s in &self.stock {
            let key = format!("{}.{}", s.actor, s.class.name());
            m.push((format!("stock.{key}.mean_value"), s.mean_stock_value));
            m.push((format!("stock.{key}.sri"), s.sri));
            m.push((format!("stock.{key}.smi_hours"), s.smi_hours));
        }
        for p in &self.profitability {
            let key = p.actor.map_or("chain".to_string(), |a| a.to_string());
            m.push((format!("profit.{key}.sales_profit"), Some(p.sales_profit)));
            m.push((format!("profit.{key}.costs"), Some(p.costs)));
            m.push((format!("profit.{key}.spi"), p.spi));
        }
        for (cat, v) in &self.costs {
            m.push((format!("costs.{cat}"), Some(*v)));
        }
        let produced: u32 = self.produced.values().sum();
        m.push(("produced".to_string(), Some(produced as f64)));
        m.push(("tickets".to_string(), Some(self.tickets as f64)));
        m.push(("satisfaction.final_mean".to_string(), self.final_mean_vote()));
        m
    }

    /// Mean of the last recorded vote of every (customer, product) pair.
    pub fn final_mean_vote(&self) -> Option<f64> {
        let mut last: BTreeMap<(u32, ProductId), f64> = BTreeMap::new();
        for r in &self.satisfaction {
            last.insert((r.customer, r.product), r.vote);
        }
        (!last.is_empty()).then(|| last.values().sum::<f64>() / last.len() as f64)
    }
}
