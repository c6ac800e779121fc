use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::model::ActorId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostCategory {
    Purchase,
    Holding,
    Production,
    Support,
    Technology,
    SalesRevenue,
}

impl CostCategory {
    pub const ALL: [CostCategory; 6] = [
        CostCategory::Purchase,
        CostCategory::Holding,
        CostCategory::Production,
        CostCategory::Support,
        CostCategory::Technology,
        CostCategory::SalesRevenue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostCategory::Purchase => "purchase",
            CostCategory::Holding => "holding",
            CostCategory::Production => "production",
            CostCategory::Support => "support",
            CostCategory::Technology => "technology",
            CostCategory::SalesRevenue => "sales-revenue",
        }
    }

    pub fn is_cost(self) -> bool {
        self != CostCategory::SalesRevenue
    }
}

impl fmt::Display for CostCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub time: f64,
    pub actor: ActorId,
    pub category: CostCategory,
    pub amount: f64,
}

/// Cost and revenue flow of a run. Amounts are non-negative; the category
/// says whether an entry is a cost or a revenue.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    entries: Vec<CostEntry>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Books `amount`; zero amounts are skipped.
    pub fn book(&mut self, time: f64, actor: ActorId, category: CostCategory, amount: f64) {
        debug_assert!(amount >= 0.0, "negative {category} amount {amount}");
        if amount > 0.0 {
            self.entries.push(CostEntry {
                time,
                actor,
                category,
                amount,
            });
        }
    }

    pub fn entries(&self) -> &[CostEntry] {
        &self.entries
    }

    pub fn total(&self, actor: Option<ActorId>, category: CostCategory) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.category == category && actor.is_none_or(|a| e.actor == a))
            .fold(0.0, |acc, e| acc + e.amount)
    }

    pub fn revenue(&self, actor: Option<ActorId>) -> f64 {
        self.total(actor, CostCategory::SalesRevenue)
    }

    /// Sum of every non-revenue category.
    pub fn costs(&self, actor: Option<ActorId>) -> f64 {
        CostCategory::ALL
            .into_iter()
            .filter(|c| c.is_cost())
            .fold(0.0, |acc, c| acc + self.total(actor, c))
    }

    pub fn by_category(&self) -> BTreeMap<String, f64> {
        CostCategory::ALL
            .into_iter()
            .map(|c| (c.name().to_string(), self.total(None, c)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["time", "actor", "category", "amount"])?;
        for e in &self.entries {
            wtr.write_record([
                e.time.to_string(),
                e.actor.to_string(),
                e.category.to_string(),
                e.amount.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
