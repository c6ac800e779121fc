use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub type ProductId = u32;
pub type RawId = u32;
pub type OrderId = u64;
pub type TicketId = u64;

/// Participants of the chain. Prospects are Sell-process clients; `Upstream`
/// is the unbounded tier-2 source behind the suppliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ActorId {
    Customer(u32),
    Retailer,
    Firm,
    Supplier(u32),
    Prospect(u32),
    Upstream,
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActorId::Customer(i) => write!(f, "customer-{i}"),
            ActorId::Retailer => f.write_str("retailer"),
            ActorId::Firm => f.write_str("firm"),
            ActorId::Supplier(i) => write!(f, "supplier-{i}"),
            ActorId::Prospect(i) => write!(f, "prospect-{i}"),
            ActorId::Upstream => f.write_str("upstream"),
        }
    }
}

impl FromStr for ActorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retailer" => return Ok(ActorId::Retailer),
            "firm" => return Ok(ActorId::Firm),
            "upstream" => return Ok(ActorId::Upstream),
            _ => {}
        }
        let (kind, num) = s.rsplit_once('-').ok_or_else(|| format!("bad actor id '{s}'"))?;
        let n: u32 = num.parse().map_err(|_| format!("bad actor id '{s}'"))?;
        match kind {
            "customer" => Ok(ActorId::Customer(n)),
            "supplier" => Ok(ActorId::Supplier(n)),
            "prospect" => Ok(ActorId::Prospect(n)),
            _ => Err(format!("bad actor id '{s}'")),
        }
    }
}

impl From<ActorId> for String {
    fn from(a: ActorId) -> Self {
        a.to_string()
    }
}

impl TryFrom<String> for ActorId {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// A stocked or ordered item: finished product (boxes) or raw material (kg).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Item {
    Product(ProductId),
    Raw(RawId),
}

impl Item {
    pub fn is_product(&self) -> bool {
        matches!(self, Item::Product(_))
    }

    pub fn product(&self) -> Option<ProductId> {
        match *self {
            Item::Product(p) => Some(p),
            Item::Raw(_) => None,
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Product(p) => write!(f, "product-{p}"),
            Item::Raw(r) => write!(f, "raw-{r}"),
        }
    }
}

impl FromStr for Item {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad item '{s}'");
        let (kind, num) = s.split_once('-').ok_or_else(bad)?;
        let n: u32 = num.parse().map_err(|_| bad())?;
        match kind {
            "product" => Ok(Item::Product(n)),
            "raw" => Ok(Item::Raw(n)),
            _ => Err(bad()),
        }
    }
}

impl From<Item> for String {
    fn from(i: Item) -> Self {
        i.to_string()
    }
}

impl TryFrom<String> for Item {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_ids_parse_back() {
        for a in [
            ActorId::Customer(2),
            ActorId::Retailer,
            ActorId::Firm,
            ActorId::Supplier(3),
            ActorId::Prospect(1),
            ActorId::Upstream,
        ] {
            assert_eq!(a.to_string().parse::<ActorId>().unwrap(), a);
        }
        assert!("wholesaler-1".parse::<ActorId>().is_err());
    }

    #[test]
    fn items_parse_back() {
        assert_eq!("raw-3".parse::<Item>().unwrap(), Item::Raw(3));
        assert_eq!(Item::Product(1).to_string(), "product-1");
        assert!("product".parse::<Item>().is_err());
    }
}
