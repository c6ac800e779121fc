use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ids::{ProductId, RawId};

/// Per product: kilograms of each raw material per box.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BillOfMaterials {
    lines: BTreeMap<ProductId, Vec<(RawId, u32)>>,
}

impl BillOfMaterials {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, product: ProductId, raws: Vec<(RawId, u32)>) {
        self.lines.insert(product, raws);
    }

    pub fn recipe(&self, product: ProductId) -> &[(RawId, u32)] {
        self.lines.get(&product).map_or(&[], |v| v.as_slice())
    }

    pub fn products(&self) -> impl Iterator<Item = ProductId> + '_ {
        self.lines.keys().copied()
    }

    /// Boxes of `product` that `available(raw)` kilograms allow.
    pub fn producible(&self, product: ProductId, available: impl Fn(RawId) -> u32) -> u32 {
        self.recipe(product)
            .iter()
            .map(|&(raw, kg)| available(raw) / kg.max(1))
            .min()
            .unwrap_or(u32::MAX)
    }

    /// Raw kilograms consumed by `boxes` of `product`.
    pub fn consumption(&self, product: ProductId, boxes: u32) -> Vec<(RawId, u32)> {
        self.recipe(product)
            .iter()
            .map(|&(raw, kg)| (raw, kg * boxes))
            .collect()
    }
}
