//! Scenario file schema. Every section defaults to the built-in case-study
//! profile, so an empty file describes the reference supply chain.

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::model::{ProductId, RawId};
use crate::satisfaction::SatisfactionParams;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Scor,
    Vcor,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "scor" => Ok(Mode::Scor),
            "vcor" => Ok(Mode::Vcor),
            _ => Err(format!("unknown mode '{s}', expected scor or vcor")),
        }
    }
}

/// Transport lead time in hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LeadTime {
    Fixed { hours: f64 },
    Uniform { min: f64, max: f64 },
    Triangular { min: f64, mode: f64, max: f64 },
    Exponential { mean: f64 },
}

impl LeadTime {
    pub fn validate(&self, what: &str) -> Result<(), ValidationError> {
        let ok = match *self {
            LeadTime::Fixed { hours } => hours >= 0.0 && hours.is_finite(),
            LeadTime::Uniform { min, max } => min >= 0.0 && max >= min && max.is_finite(),
            LeadTime::Triangular { min, mode, max } => {
                min >= 0.0 && min <= mode && mode <= max && max > min && max.is_finite()
            }
            LeadTime::Exponential { mean } => mean > 0.0 && mean.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ValidationError::Distribution(what.to_string()))
        }
    }

    /// Inverse-CDF sampling from a single uniform draw, whatever the
    /// distribution, so streams stay aligned across configurations.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match *self {
            LeadTime::Fixed { hours } => hours,
            LeadTime::Uniform { min, max } => min + (max - min) * u,
            LeadTime::Triangular { min, mode, max } => {
                let split = (mode - min) / (max - min);
                if u < split {
                    min + ((max - min) * (mode - min) * u).sqrt()
                } else {
                    max - ((max - min) * (max - mode) * (1.0 - u)).sqrt()
                }
            }
            LeadTime::Exponential { mean } => -mean * (1.0 - u).ln(),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            LeadTime::Fixed { hours } => hours,
            LeadTime::Uniform { min, max } => 0.5 * (min + max),
            LeadTime::Triangular { min, mode, max } => (min + mode + max) / 3.0,
            LeadTime::Exponential { mean } => mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StockMode {
    #[default]
    MakeToStock,
    MakeToOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalMode {
    /// Equal spacing at the table rate.
    #[default]
    Deterministic,
    /// Exponential inter-arrival times with the same mean.
    Memoryless,
}

/// Per-process VCOR switches. Unset means "on" in vcor mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessToggles {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub market: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub research: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub develop: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sell: Option<bool>,
}

impl ProcessToggles {
    pub fn named(&self) -> [(&'static str, Option<bool>); 5] {
        [
            ("support", self.support),
            ("market", self.market),
            ("research", self.research),
            ("develop", self.develop),
            ("sell", self.sell),
        ]
    }
}

/// Resolved process switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Processes {
    pub support: bool,
    pub market: bool,
    pub research: bool,
    pub develop: bool,
    pub sell: bool,
}

impl Processes {
    pub fn any(&self) -> bool {
        self.support || self.market || self.research || self.develop || self.sell
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BomLine {
    pub product: ProductId,
    /// `(raw id, kg per box)`.
    pub raws: Vec<(RawId, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogConfig {
    pub products: Vec<ProductId>,
    pub raws: Vec<RawId>,
    pub bom: Vec<BomLine>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        let products = vec![1, 2, 3];
        let raws = vec![1, 2, 3];
        let bom = products
            .iter()
            .map(|&p| BomLine {
                product: p,
                raws: raws.iter().map(|&r| (r, 1)).collect(),
            })
            .collect();
        Self {
            products,
            raws,
            bom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandConfig {
    /// Delimited demand table, relative to the scenario file. The built-in
    /// case-study table is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    /// Boxes per customer order.
    pub lot_size: u32,
    pub arrival: ArrivalMode,
}

impl Default for DemandConfig {
    fn default() -> Self {
        Self {
            table: None,
            lot_size: 2,
            arrival: ArrivalMode::Deterministic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerConfig {
    pub id: u32,
    pub products: Vec<ProductId>,
}

pub fn default_customers() -> Vec<CustomerConfig> {
    vec![
        CustomerConfig {
            id: 1,
            products: vec![1, 2],
        },
        CustomerConfig {
            id: 2,
            products: vec![1, 3],
        },
    ]
}

/// A stocked item with an optional (s, S) policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StockConfig {
    pub item: u32,
    pub initial: u32,
    #[serde(default)]
    pub mode: StockMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reorder_point: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_up_to: Option<u32>,
}

impl StockConfig {
    fn mts(item: u32, initial: u32, s: u32, big_s: u32) -> Self {
        Self {
            item,
            initial,
            mode: StockMode::MakeToStock,
            reorder_point: Some(s),
            order_up_to: Some(big_s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetailerConfig {
    pub source_interval: f64,
    pub deliver_interval: f64,
    pub lead_time: LeadTime,
    pub holding_cost: f64,
    pub stock: Vec<StockConfig>,
}

impl Default for RetailerConfig {
    fn default() -> Self {
        Self {
            source_interval: 2.5,
            deliver_interval: 2.0,
            lead_time: LeadTime::Uniform { min: 0.5, max: 2.0 },
            holding_cost: 0.002,
            stock: vec![
                StockConfig::mts(1, 0, 100, 500),
                StockConfig::mts(2, 0, 100, 500),
                StockConfig {
                    item: 3,
                    initial: 0,
                    mode: StockMode::MakeToOrder,
                    reorder_point: None,
                    order_up_to: None,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FirmConfig {
    pub source_interval: f64,
    pub make_interval: f64,
    pub deliver_interval: f64,
    /// Boxes per day, all products together.
    pub capacity_per_day: f64,
    pub lead_time: LeadTime,
    pub fgi_holding_cost: f64,
    pub raw_holding_cost: f64,
    pub products: Vec<StockConfig>,
    pub raws: Vec<StockConfig>,
    /// `(raw, supplier)`: designated source of each raw material.
    pub sourcing: Vec<(RawId, u32)>,
}

impl Default for FirmConfig {
    fn default() -> Self {
        Self {
            source_interval: 3.0,
            make_interval: 3.0,
            deliver_interval: 2.5,
            capacity_per_day: 185.0,
            lead_time: LeadTime::Uniform { min: 1.0, max: 3.0 },
            fgi_holding_cost: 0.001,
            raw_holding_cost: 0.0005,
            products: vec![
                StockConfig::mts(1, 500, 200, 500),
                StockConfig::mts(2, 500, 200, 500),
                StockConfig::mts(3, 300, 100, 300),
            ],
            raws: vec![
                StockConfig::mts(1, 200, 100, 250),
                StockConfig::mts(2, 200, 100, 250),
                StockConfig::mts(3, 200, 100, 250),
            ],
            sourcing: vec![(1, 2), (2, 2), (3, 3)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplierConfig {
    pub id: u32,
    #[serde(default = "four_hours")]
    pub source_interval: f64,
    #[serde(default = "four_hours")]
    pub deliver_interval: f64,
    #[serde(default = "supplier_lead")]
    pub lead_time: LeadTime,
    #[serde(default = "supplier_holding")]
    pub holding_cost: f64,
    /// Raw materials this supplier produces, with its stock of each (kg).
    pub raws: Vec<StockConfig>,
}

fn four_hours() -> f64 {
    4.0
}

fn supplier_lead() -> LeadTime {
    LeadTime::Uniform { min: 2.0, max: 6.0 }
}

fn supplier_holding() -> f64 {
    0.0005
}

pub fn default_suppliers() -> Vec<SupplierConfig> {
    let sup = |id, raws: &[u32]| SupplierConfig {
        id,
        source_interval: four_hours(),
        deliver_interval: four_hours(),
        lead_time: supplier_lead(),
        holding_cost: supplier_holding(),
        raws: raws
            .iter()
            .map(|&r| StockConfig::mts(r, 500, 50, 500))
            .collect(),
    };
    vec![sup(1, &[1]), sup(2, &[1, 2]), sup(3, &[3])]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpstreamConfig {
    pub lead_time: LeadTime,
}

impl Default for UpstreamConfig {
    fn default() -> Self {
        Self {
            lead_time: LeadTime::Fixed { hours: 24.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductPrice {
    pub product: ProductId,
    /// Retailer to customer, per box.
    pub retail: f64,
    /// Firm to retailer and contract clients, per box.
    pub wholesale: f64,
    /// Firm conversion cost per box produced.
    pub production_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPrice {
    pub raw: RawId,
    /// Supplier to firm, per kg.
    pub price: f64,
    /// Upstream to supplier, per kg.
    pub upstream_price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriceConfig {
    pub products: Vec<ProductPrice>,
    pub raws: Vec<RawPrice>,
}

impl Default for PriceConfig {
    fn default() -> Self {
        let pp = |product, retail, wholesale, production_cost| ProductPrice {
            product,
            retail,
            wholesale,
            production_cost,
        };
        Self {
            products: vec![pp(1, 3.0, 2.0, 0.5), pp(2, 3.5, 2.4, 0.6), pp(3, 4.0, 2.8, 0.7)],
            raws: (1..=3)
                .map(|raw| RawPrice {
                    raw,
                    price: 0.3,
                    upstream_price: 0.15,
                })
                .collect(),
        }
    }
}

impl PriceConfig {
    pub fn product(&self, p: ProductId) -> Option<&ProductPrice> {
        self.products.iter().find(|x| x.product == p)
    }

    pub fn raw(&self, r: RawId) -> Option<&RawPrice> {
        self.raws.iter().find(|x| x.raw == r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SatisfactionConfig {
    #[serde(flatten)]
    pub params: SatisfactionParams,
    pub initial_vote: f64,
    /// Lead time (hours) against which delay percentages are measured.
    pub reference_lead_time: f64,
    /// Mean conform fraction against which quality percentages are measured.
    pub mean_quality: f64,
    /// Price variation in percent applied to every delivery.
    pub price_variation: f64,
}

impl Default for SatisfactionConfig {
    fn default() -> Self {
        Self {
            params: SatisfactionParams::default(),
            initial_vote: 8.0,
            reference_lead_time: 4.0,
            mean_quality: 0.9,
            price_variation: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRate {
    pub product: ProductId,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupportConfig {
    /// Probability that a delivered customer lot is defective.
    pub defect_rates: Vec<DefectRate>,
    /// Defective share of a defective lot is drawn in (0, this].
    pub max_defective_fraction: f64,
    /// Multiplier applied to the defect probability per resolved ticket.
    pub education_decay: f64,
    /// Hours before a replacement order can ship.
    pub handling_time: f64,
    pub ticket_cost: f64,
}

impl Default for SupportConfig {
    fn default() -> Self {
        Self {
            defect_rates: (1..=3)
                .map(|product| DefectRate {
                    product,
                    probability: 0.1,
                })
                .collect(),
            max_defective_fraction: 0.25,
            education_decay: 0.9,
            handling_time: 2.0,
            ticket_cost: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    pub interval: f64,
    /// Mean vote below which an innovation project starts.
    pub threshold: f64,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            interval: 6.0,
            threshold: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResearchConfig {
    /// Technology acquisition time in hours.
    pub delay: f64,
    pub technology_cost: f64,
    /// New recipe for the renewed product; unchanged when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renewed_bom: Option<Vec<(RawId, u32)>>,
}

impl Default for ResearchConfig {
    fn default() -> Self {
        Self {
            delay: 8.0,
            technology_cost: 500.0,
            renewed_bom: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProspectConfig {
    pub id: u32,
    pub priority: u32,
    pub product: ProductId,
    pub boxes_per_day: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SellConfig {
    pub interval: f64,
    /// Share of daily capacity that contracts may commit.
    pub capacity_cap: f64,
    /// Hours between recurring contract orders.
    pub contract_order_interval: f64,
    pub prospects: Vec<ProspectConfig>,
}

impl Default for SellConfig {
    fn default() -> Self {
        Self {
            interval: 12.0,
            capacity_cap: 0.5,
            contract_order_interval: 6.0,
            prospects: vec![
                ProspectConfig {
                    id: 1,
                    priority: 2,
                    product: 1,
                    boxes_per_day: 46.0,
                },
                ProspectConfig {
                    id: 2,
                    priority: 1,
                    product: 2,
                    boxes_per_day: 60.0,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_version")]
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon_hours: f64,
    /// Demand-table month at t=0.
    #[serde(default = "first_month")]
    pub start_month: u32,
    #[serde(default)]
    pub processes: ProcessToggles,
    #[serde(default)]
    pub catalog: CatalogConfig,
    #[serde(default)]
    pub demand: DemandConfig,
    #[serde(default = "default_customers")]
    pub customers: Vec<CustomerConfig>,
    #[serde(default)]
    pub retailer: RetailerConfig,
    #[serde(default)]
    pub firm: FirmConfig,
    #[serde(default = "default_suppliers")]
    pub suppliers: Vec<SupplierConfig>,
    #[serde(default)]
    pub upstream: UpstreamConfig,
    #[serde(default)]
    pub prices: PriceConfig,
    #[serde(default)]
    pub satisfaction: SatisfactionConfig,
    #[serde(default)]
    pub support: SupportConfig,
    #[serde(default)]
    pub market: MarketConfig,
    #[serde(default)]
    pub research: ResearchConfig,
    #[serde(default)]
    pub sell: SellConfig,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_horizon() -> f64 {
    48.0
}

fn first_month() -> u32 {
    1
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            name: "case-study".into(),
            mode: Mode::Scor,
            seed: 0,
            horizon_hours: default_horizon(),
            start_month: 1,
            processes: ProcessToggles::default(),
            catalog: CatalogConfig::default(),
            demand: DemandConfig::default(),
            customers: default_customers(),
            retailer: RetailerConfig::default(),
            firm: FirmConfig::default(),
            suppliers: default_suppliers(),
            upstream: UpstreamConfig::default(),
            prices: PriceConfig::default(),
            satisfaction: SatisfactionConfig::default(),
            support: SupportConfig::default(),
            market: MarketConfig::default(),
            research: ResearchConfig::default(),
            sell: SellConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// The case-study profile in the given mode.
    pub fn case_study(mode: Mode) -> Self {
        Self {
            mode,
            name: format!("case-study-{}", mode_name(mode)),
            ..Self::default()
        }
    }

    /// Switches mode; scor clears every process toggle.
    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
        if mode == Mode::Scor {
            self.processes = ProcessToggles::default();
        }
    }

    pub fn processes(&self) -> Result<Processes, ValidationError> {
        match self.mode {
            Mode::Scor => {
                if let Some((name, _)) = self
                    .processes
                    .named()
                    .into_iter()
                    .find(|(_, v)| *v == Some(true))
                {
                    return Err(ValidationError::ScorWithVcorProcess(name.into()));
                }
                Ok(Processes::default())
            }
            Mode::Vcor => {
                let t = &self.processes;
                Ok(Processes {
                    support: t.support.unwrap_or(true),
                    market: t.market.unwrap_or(true),
                    research: t.research.unwrap_or(true),
                    develop: t.develop.unwrap_or(true),
                    sell: t.sell.unwrap_or(true),
                })
            }
        }
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Scor => "scor",
        Mode::Vcor => "vcor",
    }
}
