use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::event::{Process, SimEvent};
use crate::engine::{Engine, Event, RandomStreams};
use crate::error::{LedgerError, SimError};
use crate::kpi::{CostCategory, CostLedger};
use crate::model::{
    ActorId, BillOfMaterials, InventoryRecord, Item, Ledger, OrderId, OrderOrigin, OrderStatus,
    ProductId, RawId, ReorderPolicy,
};
use crate::satisfaction::CustomerPanel;
use crate::scenario::{
    ArrivalMode, LeadTime, Processes, ProspectConfig, Scenario, ScenarioConfig, StockConfig,
    StockMode, MONTH_HOURS,
};

pub type Sim = Engine<SimEvent>;

/// One production run of the firm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductionLot {
    pub at: f64,
    pub product: ProductId,
    pub quantity: u32,
    /// Raw material consumed, `(raw, kg)`.
    pub raws: Vec<(RawId, u32)>,
    /// Backlogged order the lot was made for; `None` for stock.
    pub for_order: Option<OrderId>,
}

#[derive(Debug, Clone, PartialEq)]
struct BacklogEntry {
    order: OrderId,
    product: ProductId,
    remaining: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub product: ProductId,
    pub started_at: f64,
    pub ready_at: f64,
    pub applied_at: Option<f64>,
    pub launched_at: Option<f64>,
    #[serde(skip)]
    introducing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub prospect: u32,
    pub product: ProductId,
    pub boxes_per_day: f64,
    pub accepted_at: f64,
    owed: f64,
}

/// Firm-side bookkeeping that is not in the ledger.
#[derive(Debug, Clone, Default, PartialEq)]
struct FirmState {
    /// FGI units held for specific orders; part of on-hand stock.
    reserved: BTreeMap<ProductId, u32>,
    backlog: Vec<BacklogEntry>,
    /// Make-to-stock production still to run, per product.
    mts_queue: BTreeMap<ProductId, u32>,
    carry: f64,
    produced: BTreeMap<ProductId, u32>,
    /// Boxes delivered by the firm, per product.
    sales: BTreeMap<ProductId, u32>,
    /// Index of the active project in `projects`.
    project: Option<usize>,
    projects: Vec<Project>,
    pending_prospects: Vec<ProspectConfig>,
    contracts: BTreeMap<u32, Contract>,
    committed: f64,
}

/// All mutable state of one run: inventories, ledger, costs and the
/// customer panel. Event handlers mutate it; nothing runs concurrently.
pub struct World {
    cfg: ScenarioConfig,
    processes: Processes,
    demand: crate::scenario::DemandTable,
    bom: BillOfMaterials,
    ledger: Ledger,
    stock: BTreeMap<(ActorId, Item), InventoryRecord>,
    retailer_mto: BTreeSet<ProductId>,
    firm_mto: BTreeSet<ProductId>,
    /// Open replenishment per (client, item): at most one at a time.
    open_replenishment: BTreeSet<(ActorId, Item)>,
    /// Replacement orders waiting out the support handling time.
    held: BTreeSet<OrderId>,
    rng: RandomStreams,
    panel: CustomerPanel,
    costs: CostLedger,
    firm: FirmState,
    p_def: BTreeMap<ProductId, f64>,
    lots: Vec<ProductionLot>,
    defective_total: u64,
}

fn policy_of(s: &StockConfig) -> Option<ReorderPolicy> {
    match (s.mode, s.reorder_point, s.order_up_to) {
        (StockMode::MakeToStock, Some(lo), Some(hi)) => Some(ReorderPolicy {
            reorder_point: lo,
            order_up_to: hi,
        }),
        _ => None,
    }
}

fn transport(lead: &LeadTime, rng: &mut RandomStreams, stream: &str) -> f64 {
    lead.sample(rng.stream(stream))
}

impl World {
    pub fn new(scenario: &Scenario) -> Self {
        let cfg = scenario.config.clone();
        let mut stock = BTreeMap::new();
        let mut add = |owner: ActorId, item: Item, s: &StockConfig, cost: f64| {
            stock.insert(
                (owner, item),
                InventoryRecord::new(owner, item, s.initial, policy_of(s), cost),
            );
        };
        for s in &cfg.retailer.stock {
            add(ActorId::Retailer, Item::Product(s.item), s, cfg.retailer.holding_cost);
        }
        for s in &cfg.firm.products {
            add(ActorId::Firm, Item::Product(s.item), s, cfg.firm.fgi_holding_cost);
        }
        for s in &cfg.firm.raws {
            add(ActorId::Firm, Item::Raw(s.item), s, cfg.firm.raw_holding_cost);
        }
        for sup in &cfg.suppliers {
            for s in &sup.raws {
                add(ActorId::Supplier(sup.id), Item::Raw(s.item), s, sup.holding_cost);
            }
        }
        let mto = |list: &[StockConfig]| {
            list.iter()
                .filter(|s| s.mode == StockMode::MakeToOrder)
                .map(|s| s.item)
                .collect()
        };
        let mut panel = CustomerPanel::new(cfg.satisfaction.params);
        let mut customers = cfg.customers.clone();
        customers.sort_by_key(|c| c.id);
        for c in &customers {
            let mut products = c.products.clone();
            products.sort_unstable();
            for p in products {
                panel.register(c.id, p, cfg.satisfaction.initial_vote);
            }
        }
        let p_def = cfg
            .catalog
            .products
            .iter()
            .map(|&p| {
                let rate = cfg.support.defect_rates.iter().find(|d| d.product == p);
                (p, rate.map_or(0.0, |d| d.probability))
            })
            .collect();
        let firm = FirmState {
            pending_prospects: cfg.sell.prospects.clone(),
            ..Default::default()
        };
        Self {
            processes: scenario.processes(),
            demand: scenario.demand.clone(),
            bom: scenario.bom(),
            ledger: Ledger::new(scenario.catalog()),
            retailer_mto: mto(&cfg.retailer.stock),
            firm_mto: mto(&cfg.firm.products),
            stock,
            open_replenishment: BTreeSet::new(),
            held: BTreeSet::new(),
            rng: RandomStreams::new(cfg.seed),
            panel,
            costs: CostLedger::new(),
            firm,
            p_def,
            lots: Vec::new(),
            defective_total: 0,
            cfg,
        }
    }

    /// Registers periodic activations and first demand arrivals. The
    /// registration order fixes sequence numbers, so it never changes.
    pub fn schedule_initial(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        let act = |actor, process| SimEvent::Activate { actor, process };
        let c = &self.cfg;
        eng.register_periodic(act(ActorId::Retailer, Process::Source), c.retailer.source_interval)?;
        eng.register_periodic(act(ActorId::Retailer, Process::Deliver), c.retailer.deliver_interval)?;
        eng.register_periodic(act(ActorId::Firm, Process::Source), c.firm.source_interval)?;
        eng.register_periodic(act(ActorId::Firm, Process::Make), c.firm.make_interval)?;
        eng.register_periodic(act(ActorId::Firm, Process::Deliver), c.firm.deliver_interval)?;
        if self.processes.market {
            eng.register_periodic(act(ActorId::Firm, Process::Market), c.market.interval)?;
        }
        if self.processes.sell {
            eng.register_periodic(act(ActorId::Firm, Process::Sell), c.sell.interval)?;
        }
        let mut suppliers = c.suppliers.clone();
        suppliers.sort_by_key(|s| s.id);
        for s in &suppliers {
            let a = ActorId::Supplier(s.id);
            eng.register_periodic(act(a, Process::Source), s.source_interval)?;
            eng.register_periodic(act(a, Process::Deliver), s.deliver_interval)?;
        }
        let mut pairs: Vec<(u32, ProductId)> = c
            .customers
            .iter()
            .flat_map(|cu| cu.products.iter().map(move |&p| (cu.id, p)))
            .collect();
        pairs.sort_unstable();
        for (cu, p) in pairs {
            self.next_demand(eng, cu, p)?;
        }
        Ok(())
    }

    pub fn handle(&mut self, eng: &mut Sim, ev: Event<SimEvent>) -> Result<(), SimError> {
        let now = ev.fire_time;
        match ev.data {
            SimEvent::Activate { actor, process } => match (actor, process) {
                (ActorId::Retailer, Process::Source) => self.retailer_source(eng),
                (ActorId::Retailer, Process::Deliver) => self.retailer_deliver(eng),
                (ActorId::Firm, Process::Source) => self.firm_source(now),
                (ActorId::Firm, Process::Make) => self.firm_make(eng),
                (ActorId::Firm, Process::Deliver) => self.firm_deliver(eng),
                (ActorId::Firm, Process::Market) => self.analyze_market(eng),
                (ActorId::Firm, Process::Sell) => self.qualify_targets(eng),
                (ActorId::Supplier(id), Process::Source) => self.supplier_source(eng, id),
                (ActorId::Supplier(id), Process::Deliver) => self.supplier_deliver(eng, id),
                (a, p) => Err(SimError::Invariant(format!("no {p:?} process for {a}"))),
            },
            SimEvent::CustomerDemand {
                customer,
                product,
                place,
            } => {
                if place {
                    self.place_customer_order(eng, customer, product, now)?;
                }
                self.next_demand(eng, customer, product)
            }
            SimEvent::ReceiveOrder { order } => self.receive_order(order, now),
            SimEvent::Arrival { order } => self.arrival(eng, order, now),
            SimEvent::SourceCheck { .. } => self.firm_source(now),
            SimEvent::SupportIncident { order, defective } => {
                self.support_incident(eng, order, defective, now)
            }
            SimEvent::SupportRelease { order, .. } => {
                self.held.remove(&order);
                Ok(())
            }
            SimEvent::SupportResolved { ticket } => self.support_resolved(ticket, now),
            SimEvent::ArchitectSolution => {
                self.architect_solution(now);
                Ok(())
            }
            SimEvent::IntroduceTechnology { product } => {
                self.introduce_technology(eng, product, now)
            }
            SimEvent::LaunchProduct { product } => {
                self.panel.launch(product);
                if let Some(p) = self.active_project() {
                    p.launched_at = Some(now);
                }
                Ok(())
            }
            SimEvent::ContractOrder { prospect } => self.contract_order(eng, prospect, now),
        }
    }

    // ---- helpers ----

    fn active_project(&mut self) -> Option<&mut Project> {
        self.firm.project.map(|i| &mut self.firm.projects[i])
    }

    fn record(&mut self, actor: ActorId, item: Item) -> Result<&mut InventoryRecord, SimError> {
        self.stock
            .get_mut(&(actor, item))
            .ok_or_else(|| SimError::Invariant(format!("{actor} does not stock {item}")))
    }

    pub fn on_hand(&self, actor: ActorId, item: Item) -> u32 {
        self.stock.get(&(actor, item)).map_or(0, |r| r.on_hand())
    }

    fn adjust(&mut self, actor: ActorId, item: Item, delta: i64, at: f64) -> Result<u32, SimError> {
        Ok(self.record(actor, item)?.adjust(delta, at)?)
    }

    fn unit_price(&self, provider: ActorId, item: Item) -> f64 {
        let prices = &self.cfg.prices;
        match (provider, item) {
            (ActorId::Retailer, Item::Product(p)) => prices.product(p).map_or(0.0, |x| x.retail),
            (_, Item::Product(p)) => prices.product(p).map_or(0.0, |x| x.wholesale),
            (ActorId::Upstream, Item::Raw(r)) => prices.raw(r).map_or(0.0, |x| x.upstream_price),
            (_, Item::Raw(r)) => prices.raw(r).map_or(0.0, |x| x.price),
        }
    }

    fn transition(&mut self, order: OrderId, status: OrderStatus, at: f64) -> Result<(), SimError> {
        Ok(self.ledger.transition(order, status, at)?)
    }

    /// Moves an order out of the provider's stock and schedules its arrival.
    fn ship(&mut self, eng: &mut Sim, order: OrderId, lead: LeadTime, stream: &str) -> Result<(), SimError> {
        let now = eng.now();
        let (provider, item, qty) = {
            let o = self.ledger.get(order).ok_or(LedgerError::UnknownOrder(order))?;
            (o.provider, o.item, o.quantity)
        };
        self.adjust(provider, item, -(qty as i64), now)?;
        self.transition(order, OrderStatus::InTransit, now)?;
        let dt = transport(&lead, &mut self.rng, stream);
        eng.schedule(now + dt, SimEvent::Arrival { order })?;
        Ok(())
    }

    // ---- customers ----

    fn next_demand(&mut self, eng: &mut Sim, customer: u32, product: ProductId) -> Result<(), SimError> {
        let now = eng.now();
        let month_idx = (now / MONTH_HOURS).floor() as u32;
        let month = (self.cfg.start_month - 1 + month_idx) % 12 + 1;
        let boxes = self.demand.boxes(customer, product, month).unwrap_or(0);
        if boxes == 0 {
            let boundary = (month_idx + 1) as f64 * MONTH_HOURS;
            let ev = SimEvent::CustomerDemand {
                customer,
                product,
                place: false,
            };
            eng.schedule(boundary, ev)?;
            return Ok(());
        }
        let mean = MONTH_HOURS * self.cfg.demand.lot_size as f64 / boxes as f64;
        let dt = match self.cfg.demand.arrival {
            ArrivalMode::Deterministic => mean,
            ArrivalMode::Memoryless => {
                let stream = format!("customer-{customer}/demand-p{product}");
                LeadTime::Exponential { mean }.sample(self.rng.stream(&stream))
            }
        };
        eng.schedule_in(
            dt,
            SimEvent::CustomerDemand {
                customer,
                product,
                place: true,
            },
        )?;
        Ok(())
    }

    fn place_customer_order(
        &mut self,
        eng: &mut Sim,
        customer: u32,
        product: ProductId,
        now: f64,
    ) -> Result<(), SimError> {
        let id = self.ledger.create_order(
            ActorId::Customer(customer),
            ActorId::Retailer,
            Item::Product(product),
            self.cfg.demand.lot_size,
            now,
            OrderOrigin::Demand,
        )?;
        if self.retailer_mto.contains(&product) {
            self.pass_through(eng, id, now)?;
        }
        Ok(())
    }

    /// Forwards a retailer order for a make-to-order product to the firm.
    fn pass_through(&mut self, eng: &mut Sim, for_order: OrderId, now: f64) -> Result<(), SimError> {
        let (item, qty) = {
            let o = self.ledger.get(for_order).ok_or(LedgerError::UnknownOrder(for_order))?;
            (o.item, o.quantity)
        };
        let id = self.ledger.create_order(
            ActorId::Retailer,
            ActorId::Firm,
            item,
            qty,
            now,
            OrderOrigin::PassThrough { for_order },
        )?;
        eng.schedule(now, SimEvent::ReceiveOrder { order: id })?;
        Ok(())
    }

    fn customer_arrival(&mut self, eng: &mut Sim, order: OrderId, now: f64) -> Result<(), SimError> {
        let o = self.ledger.get(order).ok_or(LedgerError::UnknownOrder(order))?.clone();
        let (ActorId::Customer(customer), Item::Product(product)) = (o.client, o.item) else {
            return Ok(());
        };
        let rng = self.rng.stream("retailer/quality");
        let u_defect: f64 = rng.gen();
        let u_share: f64 = rng.gen();
        let p_def = self.p_def.get(&product).copied().unwrap_or(0.0);
        let defective = if u_defect < p_def {
            let share = self.cfg.support.max_defective_fraction * (1.0 - u_share);
            ((share * o.quantity as f64).ceil() as u32).clamp(1, o.quantity)
        } else {
            0
        };
        let sat = &self.cfg.satisfaction;
        let conform = (o.quantity - defective) as f64 / o.quantity as f64;
        let quality = 100.0 * conform / sat.mean_quality;
        let delay = 100.0 * ((now - o.created_at) - sat.reference_lead_time) / sat.reference_lead_time;
        let price = sat.price_variation;
        self.panel.on_delivery(customer, product, now, price, delay, quality);

        if self.processes.support {
            if let OrderOrigin::Replacement { ticket } = o.origin {
                eng.schedule(now, SimEvent::SupportResolved { ticket })?;
            }
        }
        if defective > 0 {
            self.defective_total += defective as u64;
            if self.processes.support {
                eng.schedule(now, SimEvent::SupportIncident { order, defective })?;
            }
        }
        Ok(())
    }

    // ---- retailer ----

    fn retailer_source(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        let now = eng.now();
        let wanted: Vec<(Item, u32)> = self
            .stock
            .iter()
            .filter(|((owner, _), _)| *owner == ActorId::Retailer)
            .filter(|((_, item), _)| !self.open_replenishment.contains(&(ActorId::Retailer, *item)))
            .filter_map(|((_, item), r)| Some((*item, r.policy?.order_quantity(r.on_hand())?)))
            .collect();
        for (item, qty) in wanted {
            let id = self.ledger.create_order(
                ActorId::Retailer,
                ActorId::Firm,
                item,
                qty,
                now,
                OrderOrigin::Replenishment,
            )?;
            self.open_replenishment.insert((ActorId::Retailer, item));
            eng.schedule(now, SimEvent::ReceiveOrder { order: id })?;
        }
        Ok(())
    }

    fn retailer_deliver(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        let open: Vec<(OrderId, Item, u32)> = self
            .ledger
            .open_orders(ActorId::Retailer, None)
            .into_iter()
            .map(|o| (o.order_id, o.item, o.quantity))
            .collect();
        let mut blocked = BTreeSet::new();
        let lead = self.cfg.retailer.lead_time;
        for (id, item, qty) in open {
            if self.held.contains(&id) || blocked.contains(&item) {
                continue;
            }
            if self.on_hand(ActorId::Retailer, item) >= qty {
                self.ship(eng, id, lead, "retailer/deliver")?;
            } else {
                blocked.insert(item);
            }
        }
        Ok(())
    }

    // ---- firm ----

    fn reserved(&self, p: ProductId) -> u32 {
        self.firm.reserved.get(&p).copied().unwrap_or(0)
    }

    fn free(&self, p: ProductId) -> u32 {
        self.on_hand(ActorId::Firm, Item::Product(p)) - self.reserved(p)
    }

    fn receive_order(&mut self, order: OrderId, now: f64) -> Result<(), SimError> {
        let o = self.ledger.get(order).ok_or(LedgerError::UnknownOrder(order))?;
        if o.status != OrderStatus::Open {
            return Ok(());
        }
        let qty = o.quantity;
        let product = match o.item {
            Item::Product(p) if self.stock.contains_key(&(ActorId::Firm, Item::Product(p))) => p,
            _ => return self.transition(order, OrderStatus::Rejected, now),
        };
        if self.firm_mto.contains(&product) {
            self.firm.backlog.push(BacklogEntry {
                order,
                product,
                remaining: qty,
            });
            return Ok(());
        }
        let take = self.free(product).min(qty);
        *self.firm.reserved.entry(product).or_default() += take;
        if take == qty {
            self.transition(order, OrderStatus::Fgi, now)
        } else {
            self.firm.backlog.push(BacklogEntry {
                order,
                product,
                remaining: qty - take,
            });
            Ok(())
        }
    }

    fn producible(&self, product: ProductId) -> u32 {
        self.bom
            .producible(product, |r| self.on_hand(ActorId::Firm, Item::Raw(r)))
    }

    fn produce(
        &mut self,
        product: ProductId,
        qty: u32,
        for_order: Option<OrderId>,
        now: f64,
    ) -> Result<(), SimError> {
        let raws = self.bom.consumption(product, qty);
        for &(raw, kg) in &raws {
            self.adjust(ActorId::Firm, Item::Raw(raw), -(kg as i64), now)?;
        }
        self.adjust(ActorId::Firm, Item::Product(product), qty as i64, now)?;
        let unit = self.cfg.prices.product(product).map_or(0.0, |p| p.production_cost);
        self.costs
            .book(now, ActorId::Firm, CostCategory::Production, unit * qty as f64);
        *self.firm.produced.entry(product).or_default() += qty;
        if !self.firm_mto.contains(&product) {
            let q = self.firm.mts_queue.entry(product).or_default();
            *q = q.saturating_sub(qty);
        }
        self.lots.push(ProductionLot {
            at: now,
            product,
            quantity: qty,
            raws,
            for_order,
        });
        Ok(())
    }

    fn firm_make(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        let now = eng.now();
        if self.processes.research {
            if let Some(p) = self.active_project() {
                if p.applied_at.is_none() && !p.introducing && now >= p.ready_at {
                    p.introducing = true;
                    let product = p.product;
                    eng.schedule(now, SimEvent::IntroduceTechnology { product })?;
                }
            }
        }

        // Make-to-stock plan: keep the stock position at or above s.
        let policies: Vec<(ProductId, ReorderPolicy)> = self
            .stock
            .iter()
            .filter_map(|((owner, item), r)| match (owner, item) {
                (ActorId::Firm, Item::Product(p)) => Some((*p, r.policy?)),
                _ => None,
            })
            .collect();
        for (p, policy) in policies {
            let backlog: i64 = self
                .firm
                .backlog
                .iter()
                .filter(|b| b.product == p)
                .map(|b| b.remaining as i64)
                .sum();
            let queued = self.firm.mts_queue.get(&p).copied().unwrap_or(0) as i64;
            let position = self.free(p) as i64 + queued - backlog;
            if position < policy.reorder_point as i64 {
                *self.firm.mts_queue.entry(p).or_default() +=
                    (policy.order_up_to as i64 - position) as u32;
            }
        }

        let avail = self.firm.carry + self.cfg.firm.capacity_per_day / 24.0 * self.cfg.firm.make_interval;
        let mut budget = avail.floor() as u32;
        self.firm.carry = avail - avail.floor();
        let mut raw_limited = false;

        // Backlogged orders first, oldest first.
        for i in 0..self.firm.backlog.len() {
            if budget == 0 {
                break;
            }
            let BacklogEntry {
                order,
                product,
                remaining,
            } = self.firm.backlog[i];
            let want = remaining.min(budget);
            let q = want.min(self.producible(product));
            raw_limited |= q < want;
            if q == 0 {
                continue;
            }
            self.produce(product, q, Some(order), now)?;
            budget -= q;
            *self.firm.reserved.entry(product).or_default() += q;
            self.firm.backlog[i].remaining -= q;
            if self.ledger.get(order).map(|o| o.status) == Some(OrderStatus::Open) {
                self.transition(order, OrderStatus::InProduction, now)?;
            }
        }

        // Then stock replenishment, by product id.
        let queued: Vec<(ProductId, u32)> = self
            .firm
            .mts_queue
            .iter()
            .map(|(&p, &q)| (p, q))
            .filter(|&(_, q)| q > 0)
            .collect();
        for (p, q) in queued {
            if budget == 0 {
                break;
            }
            let want = q.min(budget);
            let made = want.min(self.producible(p));
            raw_limited |= made < want;
            if made > 0 {
                self.produce(p, made, None, now)?;
                budget -= made;
            }
        }

        // Free stock goes to partially reserved make-to-stock orders.
        for i in 0..self.firm.backlog.len() {
            let b = &self.firm.backlog[i];
            if b.remaining == 0 || self.firm_mto.contains(&b.product) {
                continue;
            }
            let take = self.free(b.product).min(b.remaining);
            let product = b.product;
            *self.firm.reserved.entry(product).or_default() += take;
            self.firm.backlog[i].remaining -= take;
        }

        let done: Vec<OrderId> = self
            .firm
            .backlog
            .iter()
            .filter(|b| b.remaining == 0)
            .map(|b| b.order)
            .collect();
        self.firm.backlog.retain(|b| b.remaining > 0);
        for order in done {
            self.transition(order, OrderStatus::Fgi, now)?;
        }

        if raw_limited {
            eng.schedule(now, SimEvent::SourceCheck { actor: ActorId::Firm })?;
        }
        Ok(())
    }

    fn firm_deliver(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        let mut ready: Vec<(f64, OrderId, Item, u32)> = self
            .ledger
            .demand_view(ActorId::Firm)
            .filter(|o| o.status == OrderStatus::Fgi)
            .map(|o| (o.created_at, o.order_id, o.item, o.quantity))
            .collect();
        ready.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let lead = self.cfg.firm.lead_time;
        for (_, id, item, qty) in ready {
            if let Item::Product(p) = item {
                let r = self.firm.reserved.entry(p).or_default();
                *r = r.checked_sub(qty).ok_or_else(|| {
                    SimError::Invariant(format!("order {id} ships more than reserved"))
                })?;
            }
            self.ship(eng, id, lead, "firm/deliver")?;
        }
        Ok(())
    }

    fn firm_source(&mut self, now: f64) -> Result<(), SimError> {
        let wanted: Vec<(RawId, u32)> = self
            .stock
            .iter()
            .filter_map(|((owner, item), r)| match (owner, item) {
                (ActorId::Firm, Item::Raw(raw)) => Some((*raw, r)),
                _ => None,
            })
            .filter(|(raw, _)| !self.open_replenishment.contains(&(ActorId::Firm, Item::Raw(*raw))))
            .filter_map(|(raw, r)| Some((raw, r.policy?.order_quantity(r.on_hand())?)))
            .collect();
        for (raw, qty) in wanted {
            let supplier = self
                .cfg
                .firm
                .sourcing
                .iter()
                .find(|&&(r, _)| r == raw)
                .map(|&(_, s)| s)
                .ok_or_else(|| SimError::Invariant(format!("raw {raw} has no designated supplier")))?;
            self.ledger.create_order(
                ActorId::Firm,
                ActorId::Supplier(supplier),
                Item::Raw(raw),
                qty,
                now,
                OrderOrigin::Replenishment,
            )?;
            self.open_replenishment.insert((ActorId::Firm, Item::Raw(raw)));
        }
        Ok(())
    }

    // ---- suppliers ----

    fn supplier_source(&mut self, eng: &mut Sim, id: u32) -> Result<(), SimError> {
        let now = eng.now();
        let me = ActorId::Supplier(id);
        let wanted: Vec<(Item, u32)> = self
            .stock
            .iter()
            .filter(|((owner, item), _)| *owner == me && !self.open_replenishment.contains(&(me, *item)))
            .filter_map(|((_, item), r)| Some((*item, r.policy?.order_quantity(r.on_hand())?)))
            .collect();
        let lead = self.cfg.upstream.lead_time;
        for (item, qty) in wanted {
            let order = self.ledger.create_order(
                me,
                ActorId::Upstream,
                item,
                qty,
                now,
                OrderOrigin::Replenishment,
            )?;
            self.open_replenishment.insert((me, item));
            // Upstream capacity is unbounded: the lot leaves immediately.
            self.transition(order, OrderStatus::InTransit, now)?;
            let dt = transport(&lead, &mut self.rng, "upstream/deliver");
            eng.schedule(now + dt, SimEvent::Arrival { order })?;
        }
        Ok(())
    }

    fn supplier_deliver(&mut self, eng: &mut Sim, id: u32) -> Result<(), SimError> {
        let me = ActorId::Supplier(id);
        let open: Vec<(OrderId, Item, u32)> = self
            .ledger
            .open_orders(me, None)
            .into_iter()
            .map(|o| (o.order_id, o.item, o.quantity))
            .collect();
        let lead = self
            .cfg
            .suppliers
            .iter()
            .find(|s| s.id == id)
            .map(|s| s.lead_time)
            .ok_or_else(|| SimError::Invariant(format!("unknown supplier {id}")))?;
        let stream = format!("supplier-{id}/deliver");
        let mut blocked = BTreeSet::new();
        for (order, item, qty) in open {
            if blocked.contains(&item) {
                continue;
            }
            if self.on_hand(me, item) >= qty {
                self.ship(eng, order, lead, &stream)?;
            } else {
                blocked.insert(item);
            }
        }
        Ok(())
    }

    // ---- arrivals ----

    fn arrival(&mut self, eng: &mut Sim, order: OrderId, now: f64) -> Result<(), SimError> {
        self.transition(order, OrderStatus::Delivered, now)?;
        let o = self.ledger.get(order).ok_or(LedgerError::UnknownOrder(order))?.clone();
        match o.client {
            ActorId::Customer(_) => self.customer_arrival(eng, order, now)?,
            ActorId::Prospect(_) => {}
            client => {
                self.adjust(client, o.item, o.quantity as i64, now)?;
                if o.origin == OrderOrigin::Replenishment {
                    self.open_replenishment.remove(&(client, o.item));
                }
            }
        }
        if !matches!(o.origin, OrderOrigin::Replacement { .. }) {
            let amount = self.unit_price(o.provider, o.item) * o.quantity as f64;
            if o.provider != ActorId::Upstream {
                self.costs.book(now, o.provider, CostCategory::SalesRevenue, amount);
            }
            if matches!(o.client, ActorId::Retailer | ActorId::Firm | ActorId::Supplier(_)) {
                self.costs.book(now, o.client, CostCategory::Purchase, amount);
            }
        }
        if let (ActorId::Firm, Item::Product(p)) = (o.provider, o.item) {
            *self.firm.sales.entry(p).or_default() += o.quantity;
        }
        Ok(())
    }

    // ---- support ----

    fn support_incident(
        &mut self,
        eng: &mut Sim,
        order: OrderId,
        defective: u32,
        now: f64,
    ) -> Result<(), SimError> {
        self.transition(order, OrderStatus::ReturnRequested, now)?;
        let ticket = self.ledger.open_ticket(order, defective, now)?;
        self.costs.book(
            now,
            ActorId::Retailer,
            CostCategory::Support,
            self.cfg.support.ticket_cost,
        );
        let (client, item) = {
            let o = self.ledger.get(order).ok_or(LedgerError::UnknownOrder(order))?;
            (o.client, o.item)
        };
        let replacement = self.ledger.create_order(
            client,
            ActorId::Retailer,
            item,
            defective,
            now,
            OrderOrigin::Replacement { ticket },
        )?;
        self.ledger.link_replacement(ticket, replacement)?;
        self.held.insert(replacement);
        if let Item::Product(p) = item {
            if self.retailer_mto.contains(&p) {
                self.pass_through(eng, replacement, now)?;
            }
        }
        eng.schedule(
            now + self.cfg.support.handling_time,
            SimEvent::SupportRelease {
                ticket,
                order: replacement,
            },
        )?;
        Ok(())
    }

    fn support_resolved(&mut self, ticket: u64, now: f64) -> Result<(), SimError> {
        self.ledger.resolve_ticket(ticket, now)?;
        let t = self.ledger.ticket(ticket).ok_or(LedgerError::UnknownTicket(ticket))?;
        let (original, customer) = (t.order_id, t.customer);
        self.transition(original, OrderStatus::Resolved, now)?;
        if let ActorId::Customer(c) = customer {
            self.panel.latch_support(c);
        }
        let item = self.ledger.get(original).map(|o| o.item);
        if let Some(Item::Product(p)) = item {
            let decay = self.cfg.support.education_decay;
            if let Some(rate) = self.p_def.get_mut(&p) {
                *rate = (*rate * decay).max(0.0);
            }
        }
        Ok(())
    }

    // ---- market, research, develop ----

    fn analyze_market(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        if let Some(p) = self.firm.project.map(|i| &self.firm.projects[i]) {
            let finished = p.launched_at.is_some() && !self.panel.any_innovation(p.product);
            if !finished {
                return Ok(());
            }
            self.firm.project = None;
        }
        if let Some(mean) = self.panel.mean_vote() {
            if mean < self.cfg.market.threshold {
                eng.schedule(eng.now(), SimEvent::ArchitectSolution)?;
            }
        }
        Ok(())
    }

    fn architect_solution(&mut self, now: f64) {
        if self.firm.project.is_some() {
            return;
        }
        let target = self
            .cfg
            .catalog
            .products
            .iter()
            .map(|&p| (self.firm.sales.get(&p).copied().unwrap_or(0), p))
            .min();
        if let Some((_, product)) = target {
            let project = Project {
                product,
                started_at: now,
                ready_at: now + self.cfg.research.delay,
                applied_at: None,
                launched_at: None,
                introducing: false,
            };
            self.firm.project = Some(self.firm.projects.len());
            self.firm.projects.push(project);
        }
    }

    fn introduce_technology(&mut self, eng: &mut Sim, product: ProductId, now: f64) -> Result<(), SimError> {
        if let Some(bom) = &self.cfg.research.renewed_bom {
            self.bom.set(product, bom.clone());
        }
        self.costs.book(
            now,
            ActorId::Firm,
            CostCategory::Technology,
            self.cfg.research.technology_cost,
        );
        if let Some(p) = self.active_project() {
            p.applied_at = Some(now);
        }
        if self.processes.develop {
            eng.schedule(now, SimEvent::LaunchProduct { product })?;
        }
        Ok(())
    }

    // ---- sell ----

    fn qualify_targets(&mut self, eng: &mut Sim) -> Result<(), SimError> {
        let now = eng.now();
        let limit = self.cfg.sell.capacity_cap * self.cfg.firm.capacity_per_day;
        let mut pool = std::mem::take(&mut self.firm.pending_prospects);
        pool.sort_by_key(|p| (Reverse(p.priority), p.id));
        for p in pool {
            if self.firm.committed + p.boxes_per_day <= limit {
                self.firm.committed += p.boxes_per_day;
                self.firm.contracts.insert(
                    p.id,
                    Contract {
                        prospect: p.id,
                        product: p.product,
                        boxes_per_day: p.boxes_per_day,
                        accepted_at: now,
                        owed: 0.0,
                    },
                );
                eng.schedule_in(
                    self.cfg.sell.contract_order_interval,
                    SimEvent::ContractOrder { prospect: p.id },
                )?;
            } else {
                self.firm.pending_prospects.push(p);
            }
        }
        Ok(())
    }

    fn contract_order(&mut self, eng: &mut Sim, prospect: u32, now: f64) -> Result<(), SimError> {
        let interval = self.cfg.sell.contract_order_interval;
        let c = self
            .firm
            .contracts
            .get_mut(&prospect)
            .ok_or_else(|| SimError::Invariant(format!("no contract with prospect {prospect}")))?;
        c.owed += c.boxes_per_day * interval / 24.0;
        let qty = c.owed.floor();
        c.owed -= qty;
        let product = c.product;
        if qty >= 1.0 {
            let id = self.ledger.create_order(
                ActorId::Prospect(prospect),
                ActorId::Firm,
                Item::Product(product),
                qty as u32,
                now,
                OrderOrigin::Contract,
            )?;
            eng.schedule(now, SimEvent::ReceiveOrder { order: id })?;
        }
        eng.schedule_in(interval, SimEvent::ContractOrder { prospect })?;
        Ok(())
    }

    // ---- end of run ----

    /// Books holding costs over `[0, horizon]` and hands over the run state.
    pub fn finish(mut self, horizon: f64) -> WorldOutput {
        for r in self.stock.values() {
            let cost = r.holding_cost(horizon);
            self.costs.book(horizon, r.owner, CostCategory::Holding, cost);
        }
        WorldOutput {
            ledger: self.ledger,
            costs: self.costs,
            inventories: self.stock.into_values().collect(),
            lots: self.lots,
            satisfaction: self.panel.into_series(),
            produced: self.firm.produced,
            firm_sales: self.firm.sales,
            projects: self.firm.projects,
            contracts: self.firm.contracts.into_values().collect(),
            committed_per_day: self.firm.committed,
            defect_rates: self.p_def,
            defective_total: self.defective_total,
            mts_queue: self.firm.mts_queue,
            backlog: self
                .firm
                .backlog
                .iter()
                .map(|b| (b.order, b.remaining))
                .collect(),
        }
    }
}

/// State of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldOutput {
    pub ledger: Ledger,
    pub costs: CostLedger,
    pub inventories: Vec<InventoryRecord>,
    pub lots: Vec<ProductionLot>,
    pub satisfaction: Vec<crate::satisfaction::VoteRecord>,
    pub produced: BTreeMap<ProductId, u32>,
    pub firm_sales: BTreeMap<ProductId, u32>,
    pub projects: Vec<Project>,
    pub contracts: Vec<Contract>,
    pub committed_per_day: f64,
    pub defect_rates: BTreeMap<ProductId, f64>,
    pub defective_total: u64,
    pub mts_queue: BTreeMap<ProductId, u32>,
    /// Unfilled firm backlog, `(order, boxes still to reserve)`.
    pub backlog: Vec<(OrderId, u32)>,
}

impl WorldOutput {
    pub fn inventory(&self, owner: ActorId, item: Item) -> Option<&InventoryRecord> {
        self.inventories
            .iter()
            .find(|r| r.owner == owner && r.item == item)
    }
}
