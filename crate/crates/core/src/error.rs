use std::path::PathBuf;

use thiserror::Error;

use crate::model::{ActorId, Item, OrderId, OrderStatus};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("past event: cannot schedule at t={at} when now={now}")]
    PastEvent { at: f64, now: f64 },
    #[error("non-finite event time {0}")]
    NonFiniteTime(f64),
    #[error("periodic interval must be positive, got {0}")]
    NonPositiveInterval(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LedgerError {
    #[error("order {0} already exists in the ledger")]
    DuplicateOrder(OrderId),
    #[error("order {0} is not in the ledger")]
    UnknownOrder(OrderId),
    #[error("order quantity must be positive")]
    ZeroQuantity,
    #[error("unknown item {0}")]
    UnknownItem(Item),
    #[error("unknown party {0}")]
    UnknownParty(ActorId),
    #[error("new orders must start Open, got {0:?}")]
    NotOpen(OrderStatus),
    #[error("illegal transition for order {order}: {from:?} -> {to:?}")]
    IllegalTransition {
        order: OrderId,
        from: OrderStatus,
        to: OrderStatus,
    },
    #[error("transition for order {order} at t={at} precedes previous at t={last}")]
    TimeReversal { order: OrderId, at: f64, last: f64 },
    #[error("defective quantity {defective} exceeds order quantity {quantity}")]
    DefectiveExceedsOrder { defective: u32, quantity: u32 },
    #[error("ticket {0} is not in the ledger")]
    UnknownTicket(u64),
    #[error("ticket {0} already resolved")]
    TicketResolved(u64),
    #[error("malformed ledger record: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("reservation error: {owner} cannot take {requested} of {item}, only {on_hand} on hand")]
pub struct ReservationError {
    pub owner: ActorId,
    pub item: Item,
    pub on_hand: u32,
    pub requested: u32,
}

/// Semantic scenario errors. Each has a stable code for diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("forgetting factor out of range: alpha={0} must lie in (0, 1)")]
    ForgettingFactor(f64),
    #[error("price weight beta must be positive, got {0}")]
    PriceWeight(f64),
    #[error("reorder point must be below order-up-to level for {owner} item {item}: s={s}, S={big_s}")]
    ReorderLevels {
        owner: String,
        item: String,
        s: u32,
        big_s: u32,
    },
    #[error("unknown raw material id {0}")]
    UnknownRaw(u32),
    #[error("unknown product id {0}")]
    UnknownProduct(u32),
    #[error("raw material {0} has no supplier")]
    RawWithoutSupplier(u32),
    #[error("{0}: interval must be positive")]
    Interval(String),
    #[error("{0}: must be positive")]
    NonPositive(String),
    #[error("{0}: probability must lie in [0, 1]")]
    Probability(String),
    #[error("{0}: invalid lead-time distribution")]
    Distribution(String),
    #[error("mode=scor but VCOR process '{0}' is enabled")]
    ScorWithVcorProcess(String),
    #[error("customer {customer} buys product {product} but the demand table has no row for it")]
    MissingDemand { customer: u32, product: u32 },
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("referenced file does not exist: {0}")]
    MissingFile(PathBuf),
    #[error("horizon must be a non-negative finite number of hours, got {0}")]
    Horizon(f64),
    #[error("month must lie in 1..=12, got {0}")]
    Month(u32),
    #[error("{0}: fraction must lie in (0, 1]")]
    Fraction(String),
}

impl ValidationError {
    pub fn code(&self) -> &'static str {
        match self {
            ValidationError::Schema(_) => "V001",
            ValidationError::ForgettingFactor(_) => "V002",
            ValidationError::PriceWeight(_) => "V003",
            ValidationError::ReorderLevels { .. } => "V004",
            ValidationError::UnknownRaw(_) => "V005",
            ValidationError::UnknownProduct(_) => "V006",
            ValidationError::RawWithoutSupplier(_) => "V007",
            ValidationError::Interval(_) => "V008",
            ValidationError::NonPositive(_) => "V009",
            ValidationError::Probability(_) => "V010",
            ValidationError::Distribution(_) => "V011",
            ValidationError::ScorWithVcorProcess(_) => "V012",
            ValidationError::MissingDemand { .. } => "V013",
            ValidationError::DuplicateId(_) => "V014",
            ValidationError::MissingFile(_) => "V015",
            ValidationError::Horizon(_) => "V016",
            ValidationError::Month(_) => "V017",
            ValidationError::Fraction(_) => "V018",
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{path}: parse error: {message}")]
    Parse { path: String, message: String },
    #[error("validation error [{}]: {0}", .0.code())]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Reservation(#[from] ReservationError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("comparison error: {0}")]
    Comparison(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 validation error, 2 runtime invariant violation, 3 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Parse { .. } | SimError::Validation(_) | SimError::Comparison(_) => 1,
            SimError::Engine(_)
            | SimError::Ledger(_)
            | SimError::Reservation(_)
            | SimError::Invariant(_) => 2,
            SimError::Io { .. } => 3,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
