use serde::{Deserialize, Serialize};

use crate::engine::EventData;
use crate::model::{ActorId, OrderId, ProductId, TicketId};

/// Periodic process of an actor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Process {
    Source,
    Make,
    Deliver,
    Market,
    Sell,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    Activate {
        actor: ActorId,
        process: Process,
    },
    /// Next demand arrival of a (customer, product) pair. `place` is false for
    /// the month-boundary recheck after a zero-demand month.
    CustomerDemand {
        customer: u32,
        product: ProductId,
        place: bool,
    },
    ReceiveOrder {
        order: OrderId,
    },
    Arrival {
        order: OrderId,
    },
    /// Raw reorder check triggered by a raw-limited production run.
    SourceCheck {
        actor: ActorId,
    },
    SupportIncident {
        order: OrderId,
        defective: u32,
    },
    SupportRelease {
        ticket: TicketId,
        order: OrderId,
    },
    SupportResolved {
        ticket: TicketId,
    },
    ArchitectSolution,
    IntroduceTechnology {
        product: ProductId,
    },
    LaunchProduct {
        product: ProductId,
    },
    ContractOrder {
        prospect: u32,
    },
}

/// Trace kinds that only VCOR processes emit.
pub const VCOR_KINDS: [&str; 9] = [
    "analyze-market",
    "qualify-targets",
    "support-incident",
    "support-release",
    "support-resolved",
    "architect-solution",
    "introduce-technology",
    "launch-product",
    "contract-order",
];

pub fn is_vcor_kind(kind: &str) -> bool {
    VCOR_KINDS.contains(&kind)
}

impl EventData for SimEvent {
    fn target(&self) -> String {
        match self {
            SimEvent::Activate { actor, .. } | SimEvent::SourceCheck { actor } => actor.to_string(),
            SimEvent::CustomerDemand { customer, .. } => ActorId::Customer(*customer).to_string(),
            SimEvent::ReceiveOrder { .. }
            | SimEvent::ArchitectSolution
            | SimEvent::IntroduceTechnology { .. }
            | SimEvent::LaunchProduct { .. } => ActorId::Firm.to_string(),
            SimEvent::ContractOrder { prospect } => ActorId::Prospect(*prospect).to_string(),
            SimEvent::Arrival { order } => format!("order-{order}"),
            SimEvent::SupportIncident { .. }
            | SimEvent::SupportRelease { .. }
            | SimEvent::SupportResolved { .. } => ActorId::Retailer.to_string(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            SimEvent::Activate { process, .. } => match process {
                Process::Source => "source",
                Process::Make => "make",
                Process::Deliver => "deliver",
                Process::Market => "analyze-market",
                Process::Sell => "qualify-targets",
            },
            SimEvent::CustomerDemand { .. } => "customer-demand",
            SimEvent::ReceiveOrder { .. } => "receive-order",
            SimEvent::Arrival { .. } => "arrival",
            SimEvent::SourceCheck { .. } => "source-check",
            SimEvent::SupportIncident { .. } => "support-incident",
            SimEvent::SupportRelease { .. } => "support-release",
            SimEvent::SupportResolved { .. } => "support-resolved",
            SimEvent::ArchitectSolution => "architect-solution",
            SimEvent::IntroduceTechnology { .. } => "introduce-technology",
            SimEvent::LaunchProduct { .. } => "launch-product",
            SimEvent::ContractOrder { .. } => "contract-order",
        }
    }
}
