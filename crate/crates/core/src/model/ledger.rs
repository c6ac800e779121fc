//! Append-only order ledger: every provider's demand view plus the support
//! database, backed by a replayable record log.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::ids::{ActorId, Item, OrderId, TicketId};
use super::order::{Order, OrderOrigin, OrderStatus};
use crate::error::LedgerError;

/// Items and parties an order may reference.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub products: BTreeSet<u32>,
    pub raws: BTreeSet<u32>,
    pub actors: BTreeSet<ActorId>,
}

impl Catalog {
    pub fn contains_item(&self, item: Item) -> bool {
        match item {
            Item::Product(p) => self.products.contains(&p),
            Item::Raw(r) => self.raws.contains(&r),
        }
    }

    pub fn contains_actor(&self, actor: ActorId) -> bool {
        actor == ActorId::Upstream || self.actors.contains(&actor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportTicket {
    pub ticket_id: TicketId,
    pub order_id: OrderId,
    pub customer: ActorId,
    pub defective: u32,
    pub opened_at: f64,
    pub resolved_at: Option<f64>,
    pub replacement_order: Option<OrderId>,
}

/// One line of the ledger log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum LedgerRecord {
    Order {
        order_id: OrderId,
        client: ActorId,
        provider: ActorId,
        item: Item,
        quantity: u32,
        created_at: f64,
        origin: OrderOrigin,
    },
    Transition {
        order_id: OrderId,
        status: OrderStatus,
        at: f64,
    },
    TicketOpened {
        ticket_id: TicketId,
        order_id: OrderId,
        customer: ActorId,
        defective: u32,
        opened_at: f64,
    },
    TicketReplacement {
        ticket_id: TicketId,
        order_id: OrderId,
    },
    TicketResolved {
        ticket_id: TicketId,
        at: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ledger {
    catalog: Catalog,
    orders: BTreeMap<OrderId, Order>,
    tickets: BTreeMap<TicketId, SupportTicket>,
    log: Vec<LedgerRecord>,
}

impl Ledger {
    pub fn new(catalog: Catalog) -> Self {
        Self {
            catalog,
            ..Default::default()
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn next_order_id(&self) -> OrderId {
        self.orders.keys().next_back().map_or(1, |id| id + 1)
    }

    /// Validates and appends a new `Open` order built from the arguments,
    /// assigning the next order id.
    pub fn create_order(
        &mut self,
        client: ActorId,
        provider: ActorId,
        item: Item,
        quantity: u32,
        at: f64,
        origin: OrderOrigin,
    ) -> Result<OrderId, LedgerError> {
        let id = self.next_order_id();
        self.append_order(Order::new(id, client, provider, item, quantity, at, origin))
    }

    pub fn append_order(&mut self, order: Order) -> Result<OrderId, LedgerError> {
        if self.orders.contains_key(&order.order_id) {
            return Err(LedgerError::DuplicateOrder(order.order_id));
        }
        if order.quantity == 0 {
            return Err(LedgerError::ZeroQuantity);
        }
        if order.status != OrderStatus::Open || order.history.len() != 1 {
            return Err(LedgerError::NotOpen(order.status));
        }
        if !self.catalog.contains_item(order.item) {
            return Err(LedgerError::UnknownItem(order.item));
        }
        for party in [order.client, order.provider] {
            if !self.catalog.contains_actor(party) {
                return Err(LedgerError::UnknownParty(party));
            }
        }
        let id = order.order_id;
        self.log.push(LedgerRecord::Order {
            order_id: id,
            client: order.client,
            provider: order.provider,
            item: order.item,
            quantity: order.quantity,
            created_at: order.created_at,
            origin: order.origin,
        });
        self.orders.insert(id, order);
        Ok(id)
    }

    pub fn transition(
        &mut self,
        order_id: OrderId,
        status: OrderStatus,
        at: f64,
    ) -> Result<(), LedgerError> {
        let order = self
            .orders
            .get_mut(&order_id)
            .ok_or(LedgerError::UnknownOrder(order_id))?;
        if !order.status.can_transition_to(status) {
            return Err(LedgerError::IllegalTransition {
                order: order_id,
                from: order.status,
                to: status,
            });
        }
        let last = order.last_transition_at();
        if at < last {
            return Err(LedgerError::TimeReversal {
                order: order_id,
                at,
                last,
            });
        }
        order.status = status;
        order.history.push((status, at));
        self.log.push(LedgerRecord::Transition {
            order_id,
            status,
            at,
        });
        Ok(())
    }

    pub fn get(&self, id: OrderId) -> Option<&Order> {
        self.orders.get(&id)
    }

    pub fn orders(&self) -> impl Iterator<Item = &Order> {
        self.orders.values()
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// All orders placed with `provider`, in order-id order.
    pub fn demand_view(&self, provider: ActorId) -> impl Iterator<Item = &Order> {
        self.orders.values().filter(move |o| o.provider == provider)
    }

    /// Orders currently `Open` at `provider`, oldest first.
    pub fn open_orders(&self, provider: ActorId, item: Option<Item>) -> Vec<&Order> {
        let mut out: Vec<&Order> = self
            .demand_view(provider)
            .filter(|o| o.status == OrderStatus::Open)
            .filter(|o| item.is_none_or(|i| o.item == i))
            .collect();
        out.sort_by(|a, b| {
            a.created_at
                .total_cmp(&b.created_at)
                .then(a.order_id.cmp(&b.order_id))
        });
        out
    }

    pub fn open_ticket(
        &mut self,
        order_id: OrderId,
        defective: u32,
        at: f64,
    ) -> Result<TicketId, LedgerError> {
        let order = self
            .orders
            .get(&order_id)
            .ok_or(LedgerError::UnknownOrder(order_id))?;
        if defective == 0 {
            return Err(LedgerError::ZeroQuantity);
        }
        if defective > order.quantity {
            return Err(LedgerError::DefectiveExceedsOrder {
                defective,
                quantity: order.quantity,
            });
        }
        let ticket_id = self.tickets.keys().next_back().map_or(1, |id| id + 1);
        let customer = order.client;
        self.tickets.insert(
            ticket_id,
            SupportTicket {
                ticket_id,
                order_id,
                customer,
                defective,
                opened_at: at,
                resolved_at: None,
                replacement_order: None,
            },
        );
        self.log.push(LedgerRecord::TicketOpened {
            ticket_id,
            order_id,
            customer,
            defective,
            opened_at: at,
        });
        Ok(ticket_id)
    }

    pub fn link_replacement(
        &mut self,
        ticket_id: TicketId,
        order_id: OrderId,
    ) -> Result<(), LedgerError> {
        if !self.orders.contains_key(&order_id) {
            return Err(LedgerError::UnknownOrder(order_id));
        }
        let t = self
            .tickets
            .get_mut(&ticket_id)
            .ok_or(LedgerError::UnknownTicket(ticket_id))?;
        t.replacement_order = Some(order_id);
        self.log.push(LedgerRecord::TicketReplacement {
            ticket_id,
            order_id,
        });
        Ok(())
    }

    pub fn resolve_ticket(&mut self, ticket_id: TicketId, at: f64) -> Result<(), LedgerError> {
        let t = self
            .tickets
            .get_mut(&ticket_id)
            .ok_or(LedgerError::UnknownTicket(ticket_id))?;
        if t.resolved_at.is_some() {
            return Err(LedgerError::TicketResolved(ticket_id));
        }
        if at < t.opened_at {
            return Err(LedgerError::TimeReversal {
                order: t.order_id,
                at,
                last: t.opened_at,
            });
        }
        t.resolved_at = Some(at);
        self.log.push(LedgerRecord::TicketResolved { ticket_id, at });
        Ok(())
    }

    pub fn ticket(&self, id: TicketId) -> Option<&SupportTicket> {
        self.tickets.get(&id)
    }

    pub fn tickets(&self) -> impl Iterator<Item = &SupportTicket> {
        self.tickets.values()
    }

    pub fn log(&self) -> &[LedgerRecord] {
        &self.log
    }

    /// Rebuilds a ledger by folding `records` from the empty state.
    pub fn replay<'a, I>(catalog: Catalog, records: I) -> Result<Ledger, LedgerError>
    where
        I: IntoIterator<Item = &'a LedgerRecord>,
    {
        let mut ledger = Ledger::new(catalog);
        for rec in records {
            match *rec {
                LedgerRecord::Order {
                    order_id,
                    client,
                    provider,
                    item,
                    quantity,
                    created_at,
                    origin,
                } => {
                    ledger.append_order(Order::new(
                        order_id, client, provider, item, quantity, created_at, origin,
                    ))?;
                }
                LedgerRecord::Transition {
                    order_id,
                    status,
                    at,
                } => ledger.transition(order_id, status, at)?,
                LedgerRecord::TicketOpened {
                    ticket_id,
                    order_id,
                    defective,
                    opened_at,
                    customer,
                } => {
                    let id = ledger.open_ticket(order_id, defective, opened_at)?;
                    let t = &ledger.tickets[&id];
                    if id != ticket_id || t.customer != customer {
                        return Err(LedgerError::Malformed(format!(
                            "ticket {ticket_id} does not replay"
                        )));
                    }
                }
                LedgerRecord::TicketReplacement {
                    ticket_id,
                    order_id,
                } => ledger.link_replacement(ticket_id, order_id)?,
                LedgerRecord::TicketResolved { ticket_id, at } => {
                    ledger.resolve_ticket(ticket_id, at)?
                }
            }
        }
        Ok(ledger)
    }

    /// One JSON record per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for rec in &self.log {
            serde_json::to_writer(&mut w, rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads a log written by [`Ledger::write_jsonl`], skipping `#` header lines.
    pub fn read_jsonl<R: BufRead>(catalog: Catalog, r: R) -> Result<Ledger, LedgerError> {
        let mut records = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| LedgerError::Malformed(e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let rec: LedgerRecord = serde_json::from_str(&line)
                .map_err(|e| LedgerError::Malformed(format!("line {}: {e}", n + 1)))?;
            records.push(rec);
        }
        Ledger::replay(catalog, &records)
    }
}
