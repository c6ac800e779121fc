use serde::{Deserialize, Serialize};

use super::ids::{ActorId, Item, OrderId, TicketId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrderStatus {
    Open,
    InProduction,
    #[serde(rename = "FGI")]
    Fgi,
    InTransit,
    Delivered,
    ReturnRequested,
    Resolved,
    /// The provider cannot serve the item at all.
    Rejected,
}

impl OrderStatus {
    pub const ALL: [OrderStatus; 8] = [
        OrderStatus::Open,
        OrderStatus::InProduction,
        OrderStatus::Fgi,
        OrderStatus::InTransit,
        OrderStatus::Delivered,
        OrderStatus::ReturnRequested,
        OrderStatus::Resolved,
        OrderStatus::Rejected,
    ];

    /// Edges of the order state machine.
    pub fn can_transition_to(self, next: OrderStatus) -> bool {
        use OrderStatus::*;
        matches!(
            (self, next),
            (Open, InProduction)
                | (Open, Fgi)
                | (Open, InTransit)
                | (Open, Rejected)
                | (InProduction, Fgi)
                | (Fgi, InTransit)
                | (InTransit, Delivered)
                | (Delivered, ReturnRequested)
                | (ReturnRequested, Resolved)
        )
    }

    /// Material has reached the client.
    pub fn is_delivered(self) -> bool {
        matches!(
            self,
            OrderStatus::Delivered | OrderStatus::ReturnRequested | OrderStatus::Resolved
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            OrderStatus::Open => "Open",
            OrderStatus::InProduction => "InProduction",
            OrderStatus::Fgi => "FGI",
            OrderStatus::InTransit => "InTransit",
            OrderStatus::Delivered => "Delivered",
            OrderStatus::ReturnRequested => "ReturnRequested",
            OrderStatus::Resolved => "Resolved",
            OrderStatus::Rejected => "Rejected",
        }
    }
}

/// Why an order exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OrderOrigin {
    /// Customer demand arrival.
    Demand,
    /// (s, S) stock replenishment.
    Replenishment,
    /// Make-to-order request forwarded upstream for a downstream order.
    PassThrough { for_order: OrderId },
    /// Support replacement of defective goods.
    Replacement { ticket: TicketId },
    /// Recurring order of a Sell contract.
    Contract,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub order_id: OrderId,
    pub client: ActorId,
    pub provider: ActorId,
    pub item: Item,
    pub quantity: u32,
    pub created_at: f64,
    pub status: OrderStatus,
    pub origin: OrderOrigin,
    /// Status history including the initial `Open` at `created_at`.
    pub history: Vec<(OrderStatus, f64)>,
}

impl Order {
    pub fn new(
        order_id: OrderId,
        client: ActorId,
        provider: ActorId,
        item: Item,
        quantity: u32,
        created_at: f64,
        origin: OrderOrigin,
    ) -> Self {
        Self {
            order_id,
            client,
            provider,
            item,
            quantity,
            created_at,
            status: OrderStatus::Open,
            origin,
            history: vec![(OrderStatus::Open, created_at)],
        }
    }

    pub fn last_transition_at(&self) -> f64 {
        self.history.last().map(|h| h.1).unwrap_or(self.created_at)
    }

    /// Time at which the order first reached `status`.
    pub fn time_of(&self, status: OrderStatus) -> Option<f64> {
        self.history.iter().find(|h| h.0 == status).map(|h| h.1)
    }

    /// `Delivered − created_at`, when delivered.
    pub fn delivery_time(&self) -> Option<f64> {
        self.time_of(OrderStatus::Delivered).map(|t| t - self.created_at)
    }
}
