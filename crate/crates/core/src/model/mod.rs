//! Value-chain data types: identifiers, orders, the order ledger, stock
//! records and bills of material.

mod bom;
mod ids;
mod inventory;
mod ledger;
mod order;

pub use bom::BillOfMaterials;
pub use ids::{ActorId, Item, OrderId, ProductId, RawId, TicketId};
pub use inventory::{step_integral, InventoryRecord, ReorderPolicy};
pub use ledger::{Catalog, Ledger, LedgerRecord, SupportTicket};
pub use order::{Order, OrderOrigin, OrderStatus};
