//! Supplier, firm, retailer and customer processes.

mod event;
mod world;

pub use event::{is_vcor_kind, Process, SimEvent, VCOR_KINDS};
pub use world::{Contract, ProductionLot, Project, Sim, World, WorldOutput};
