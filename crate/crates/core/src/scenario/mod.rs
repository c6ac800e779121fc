//! Scenario definition, validation and loading.

mod config;
mod demand;

pub use config::*;
pub use demand::{DemandTable, MONTHS, MONTH_HOURS};

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{SimError, ValidationError};
use crate::model::{ActorId, BillOfMaterials, Catalog, ProductId};

/// A fully validated scenario with its demand table resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub demand: DemandTable,
    processes: Processes,
    digest: String,
}

impl Scenario {
    pub fn new(config: ScenarioConfig, demand: DemandTable) -> Result<Self, ValidationError> {
        let processes = validate(&config, &demand)?;
        let digest = digest(&config, &demand);
        Ok(Self {
            config,
            demand,
            processes,
            digest,
        })
    }

    /// Built-in case-study profile.
    pub fn case_study(mode: Mode) -> Self {
        Self::new(ScenarioConfig::case_study(mode), DemandTable::case_study())
            .expect("built-in profile is valid")
    }

    /// Applies `edit` to a copy of the configuration and revalidates.
    pub fn with_config(
        &self,
        edit: impl FnOnce(&mut ScenarioConfig),
    ) -> Result<Self, ValidationError> {
        let mut config = self.config.clone();
        edit(&mut config);
        Self::new(config, self.demand.clone())
    }

    pub fn processes(&self) -> Processes {
        self.processes
    }

    /// Hex digest of the configuration (seed excluded) and demand table.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn horizon(&self) -> f64 {
        self.config.horizon_hours
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.config).expect("scenario serializes")
    }

    pub fn catalog(&self) -> Catalog {
        let c = &self.config;
        let mut actors: BTreeSet<ActorId> = [ActorId::Retailer, ActorId::Firm].into();
        actors.extend(c.customers.iter().map(|x| ActorId::Customer(x.id)));
        actors.extend(c.suppliers.iter().map(|x| ActorId::Supplier(x.id)));
        actors.extend(c.sell.prospects.iter().map(|x| ActorId::Prospect(x.id)));
        Catalog {
            products: c.catalog.products.iter().copied().collect(),
            raws: c.catalog.raws.iter().copied().collect(),
            actors,
        }
    }

    pub fn bom(&self) -> BillOfMaterials {
        let mut bom = BillOfMaterials::new();
        for line in &self.config.catalog.bom {
            bom.set(line.product, line.raws.clone());
        }
        bom
    }
}

/// Reads, parses and validates a scenario file. A relative demand-table
/// path is resolved against the scenario file's directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, SimError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SimError::io(path.display().to_string(), e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario(&text, &path.display().to_string(), base)
}

pub fn parse_scenario(text: &str, source: &str, base_dir: &Path) -> Result<Scenario, SimError> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| SimError::Parse {
        path: source.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let demand = match &config.demand.table {
        None => DemandTable::case_study(),
        Some(rel) => {
            let p = resolve(base_dir, rel);
            if !p.exists() {
                return Err(ValidationError::MissingFile(p).into());
            }
            let f = fs::File::open(&p).map_err(|e| SimError::io(p.display().to_string(), e))?;
            DemandTable::read(f, &p.display().to_string())?
        }
    };
    Ok(Scenario::new(config, demand)?)
}

fn resolve(base: &Path, rel: &Path) -> PathBuf {
    if rel.is_absolute() {
        rel.to_path_buf()
    } else {
        base.join(rel)
    }
}

fn digest(config: &ScenarioConfig, demand: &DemandTable) -> String {
    let mut c = config.clone();
    c.seed = 0;
    let mut h = Sha256::new();
    h.update(toml::to_string(&c).expect("scenario serializes").as_bytes());
    let mut table = Vec::new();
    demand.write(&mut table).expect("in-memory write");
    h.update(&table);
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn positive_interval(v: f64, what: &str) -> Result<(), ValidationError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::Interval(what.into()))
    }
}

fn positive(v: f64, what: &str) -> Result<(), ValidationError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::NonPositive(what.into()))
    }
}

fn non_negative(v: f64, what: &str) -> Result<(), ValidationError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::NonPositive(what.into()))
    }
}

fn probability(v: f64, what: &str) -> Result<(), ValidationError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ValidationError::Probability(what.into()))
    }
}

fn fraction(v: f64, what: &str) -> Result<(), ValidationError> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(ValidationError::Fraction(what.into()))
    }
}

fn unique<I: IntoIterator<Item = u32>>(ids: I, what: &str) -> Result<(), ValidationError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ValidationError::DuplicateId(format!("{what} {id}")));
        }
    }
    Ok(())
}

fn check_stock(
    stock: &[StockConfig],
    owner: &str,
    known: &BTreeSet<u32>,
    unknown: fn(u32) -> ValidationError,
) -> Result<(), ValidationError> {
    unique(stock.iter().map(|s| s.item), &format!("{owner} stock item"))?;
    for s in stock {
        if !known.contains(&s.item) {
            return Err(unknown(s.item));
        }
        match (s.reorder_point, s.order_up_to) {
            (None, None) => {}
            (Some(lo), Some(hi)) if lo < hi => {}
            (lo, hi) => {
                return Err(ValidationError::ReorderLevels {
                    owner: owner.into(),
                    item: s.item.to_string(),
                    s: lo.unwrap_or(0),
                    big_s: hi.unwrap_or(0),
                })
            }
        }
    }
    Ok(())
}

/// Validates everything before any event is scheduled; returns the resolved
/// process switches.
pub fn validate(c: &ScenarioConfig, demand: &DemandTable) -> Result<Processes, ValidationError> {
    if c.schema != SCHEMA_VERSION {
        return Err(ValidationError::Schema(c.schema));
    }
    if !(c.horizon_hours >= 0.0 && c.horizon_hours.is_finite()) {
        return Err(ValidationError::Horizon(c.horizon_hours));
    }
    if !(1..=12).contains(&c.start_month) {
        return Err(ValidationError::Month(c.start_month));
    }
    let processes = c.processes()?;

    let sat = &c.satisfaction;
    sat.params.validate()?;
    if !(0.0..=10.0).contains(&sat.initial_vote) {
        return Err(ValidationError::NonPositive("satisfaction.initial_vote in [0, 10]".into()));
    }
    positive(sat.reference_lead_time, "satisfaction.reference_lead_time")?;
    fraction(sat.mean_quality, "satisfaction.mean_quality")?;

    // Catalog and recipes.
    unique(c.catalog.products.iter().copied(), "product")?;
    unique(c.catalog.raws.iter().copied(), "raw")?;
    let products: BTreeSet<u32> = c.catalog.products.iter().copied().collect();
    let raws: BTreeSet<u32> = c.catalog.raws.iter().copied().collect();
    unique(c.catalog.bom.iter().map(|b| b.product), "bom product")?;
    for line in &c.catalog.bom {
        if !products.contains(&line.product) {
            return Err(ValidationError::UnknownProduct(line.product));
        }
        for &(raw, kg) in &line.raws {
            if !raws.contains(&raw) {
                return Err(ValidationError::UnknownRaw(raw));
            }
            if kg == 0 {
                return Err(ValidationError::NonPositive(format!(
                    "bom product {} raw {raw} kg per box",
                    line.product
                )));
            }
        }
    }
    for &p in &products {
        if !c.catalog.bom.iter().any(|b| b.product == p) {
            return Err(ValidationError::NonPositive(format!("bom for product {p}")));
        }
    }

    // Customers and demand.
    if c.demand.lot_size == 0 {
        return Err(ValidationError::NonPositive("demand.lot_size".into()));
    }
    unique(c.customers.iter().map(|x| x.id), "customer")?;
    for cust in &c.customers {
        for &p in &cust.products {
            if !products.contains(&p) {
                return Err(ValidationError::UnknownProduct(p));
            }
            if !demand.has_row(cust.id, p) {
                return Err(ValidationError::MissingDemand {
                    customer: cust.id,
                    product: p,
                });
            }
            if !c.retailer.stock.iter().any(|s| s.item == p) {
                return Err(ValidationError::UnknownProduct(p));
            }
        }
    }

    // Retailer.
    let r = &c.retailer;
    positive_interval(r.source_interval, "retailer.source_interval")?;
    positive_interval(r.deliver_interval, "retailer.deliver_interval")?;
    r.lead_time.validate("retailer.lead_time")?;
    non_negative(r.holding_cost, "retailer.holding_cost")?;
    check_stock(&r.stock, "retailer", &products, ValidationError::UnknownProduct)?;

    // Firm.
    let f = &c.firm;
    positive_interval(f.source_interval, "firm.source_interval")?;
    positive_interval(f.make_interval, "firm.make_interval")?;
    positive_interval(f.deliver_interval, "firm.deliver_interval")?;
    positive(f.capacity_per_day, "firm.capacity_per_day")?;
    f.lead_time.validate("firm.lead_time")?;
    non_negative(f.fgi_holding_cost, "firm.fgi_holding_cost")?;
    non_negative(f.raw_holding_cost, "firm.raw_holding_cost")?;
    check_stock(&f.products, "firm", &products, ValidationError::UnknownProduct)?;
    check_stock(&f.raws, "firm", &raws, ValidationError::UnknownRaw)?;
    for &p in &products {
        if !f.products.iter().any(|s| s.item == p) {
            return Err(ValidationError::UnknownProduct(p));
        }
    }

    // Suppliers and sourcing.
    unique(c.suppliers.iter().map(|s| s.id), "supplier")?;
    for s in &c.suppliers {
        let owner = format!("supplier-{}", s.id);
        positive_interval(s.source_interval, &format!("{owner}.source_interval"))?;
        positive_interval(s.deliver_interval, &format!("{owner}.deliver_interval"))?;
        s.lead_time.validate(&format!("{owner}.lead_time"))?;
        non_negative(s.holding_cost, &format!("{owner}.holding_cost"))?;
        check_stock(&s.raws, &owner, &raws, ValidationError::UnknownRaw)?;
    }
    unique(f.sourcing.iter().map(|&(raw, _)| raw), "sourcing raw")?;
    for &(raw, sup) in &f.sourcing {
        if !raws.contains(&raw) {
            return Err(ValidationError::UnknownRaw(raw));
        }
        let supplies = c
            .suppliers
            .iter()
            .any(|s| s.id == sup && s.raws.iter().any(|x| x.item == raw));
        if !supplies {
            return Err(ValidationError::RawWithoutSupplier(raw));
        }
    }
    for line in &c.catalog.bom {
        for &(raw, _) in &line.raws {
            if !f.sourcing.iter().any(|&(r, _)| r == raw) {
                return Err(ValidationError::RawWithoutSupplier(raw));
            }
            if !f.raws.iter().any(|s| s.item == raw) {
                return Err(ValidationError::UnknownRaw(raw));
            }
        }
    }
    c.upstream.lead_time.validate("upstream.lead_time")?;

    // Prices.
    for &p in &products {
        let pr = c
            .prices
            .product(p)
            .ok_or_else(|| ValidationError::NonPositive(format!("prices for product {p}")))?;
        non_negative(pr.retail, "prices.retail")?;
        non_negative(pr.wholesale, "prices.wholesale")?;
        non_negative(pr.production_cost, "prices.production_cost")?;
    }
    for &raw in &raws {
        let pr = c
            .prices
            .raw(raw)
            .ok_or_else(|| ValidationError::NonPositive(format!("prices for raw {raw}")))?;
        non_negative(pr.price, "prices.raw price")?;
        non_negative(pr.upstream_price, "prices.upstream_price")?;
    }

    // VCOR process parameters.
    let s = &c.support;
    for d in &s.defect_rates {
        if !products.contains(&d.product) {
            return Err(ValidationError::UnknownProduct(d.product));
        }
        probability(d.probability, &format!("support.defect_rates product {}", d.product))?;
    }
    fraction(s.max_defective_fraction, "support.max_defective_fraction")?;
    fraction(s.education_decay, "support.education_decay")?;
    non_negative(s.handling_time, "support.handling_time")?;
    non_negative(s.ticket_cost, "support.ticket_cost")?;

    positive_interval(c.market.interval, "market.interval")?;
    non_negative(c.research.delay, "research.delay")?;
    non_negative(c.research.technology_cost, "research.technology_cost")?;
    if let Some(bom) = &c.research.renewed_bom {
        for &(raw, kg) in bom {
            if !raws.contains(&raw) || !f.sourcing.iter().any(|&(r, _)| r == raw) {
                return Err(ValidationError::UnknownRaw(raw));
            }
            if kg == 0 {
                return Err(ValidationError::NonPositive("research.renewed_bom kg".into()));
            }
        }
    }

    positive_interval(c.sell.interval, "sell.interval")?;
    positive_interval(c.sell.contract_order_interval, "sell.contract_order_interval")?;
    fraction(c.sell.capacity_cap, "sell.capacity_cap")?;
    unique(c.sell.prospects.iter().map(|p| p.id), "prospect")?;
    for p in &c.sell.prospects {
        if !products.contains(&p.product) {
            return Err(ValidationError::UnknownProduct(p.product));
        }
        positive(p.boxes_per_day, &format!("prospect {} boxes_per_day", p.id))?;
    }

    Ok(processes)
}

/// Products that some customer buys.
pub fn customer_products(c: &ScenarioConfig) -> BTreeSet<ProductId> {
    c.customers
        .iter()
        .flat_map(|x| x.products.iter().copied())
        .collect()
}
