//! Monthly demand table: boxes per (customer, product, month).
//!
//! File layout is delimited text with a header row
//! `customer,product,M1,…,M12`; a `-` cell means no demand.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::SimError;
use crate::model::ProductId;

pub const MONTHS: usize = 12;
/// Hours per demand-table month (30 days).
pub const MONTH_HOURS: f64 = 720.0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemandTable {
    rows: BTreeMap<(u32, ProductId), [u32; MONTHS]>,
}

impl DemandTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, customer: u32, product: ProductId, months: [u32; MONTHS]) {
        self.rows.insert((customer, product), months);
    }

    pub fn has_row(&self, customer: u32, product: ProductId) -> bool {
        self.rows.contains_key(&(customer, product))
    }

    /// Boxes for `month` (1-based); `None` when the pair has no row.
    pub fn boxes(&self, customer: u32, product: ProductId, month: u32) -> Option<u32> {
        let row = self.rows.get(&(customer, product))?;
        let idx = (month.clamp(1, 12) - 1) as usize;
        Some(row[idx])
    }

    pub fn rows(&self) -> impl Iterator<Item = (&(u32, ProductId), &[u32; MONTHS])> {
        self.rows.iter()
    }

    /// Monthly demand table of the agro-food case study (two customers).
    pub fn case_study() -> Self {
        let mut t = Self::new();
        t.insert(1, 1, [250, 260, 245, 247, 255, 257, 250, 251, 253, 255, 250, 241]);
        t.insert(1, 2, [550, 659, 580, 650, 770, 850, 890, 790, 700, 650, 590, 500]);
        t.insert(1, 3, [0; MONTHS]);
        t.insert(2, 1, [300, 310, 312, 295, 311, 320, 301, 305, 313, 300, 295, 297]);
        t.insert(2, 2, [0; MONTHS]);
        t.insert(2, 3, [70, 165, 140, 145, 250, 355, 397, 410, 380, 371, 280, 210]);
        t
    }

    pub fn read<R: Read>(r: R, source: &str) -> Result<Self, SimError> {
        let parse_err = |message: String| SimError::Parse {
            path: source.to_string(),
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers = rdr
            .headers()
            .map_err(|e| parse_err(e.to_string()))?
            .clone();
        let col = |name: &str| -> Result<usize, SimError> {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| parse_err(format!("missing column '{name}'")))
        };
        let c_customer = col("customer")?;
        let c_product = col("product")?;
        let mut c_months = [0usize; MONTHS];
        for (m, slot) in c_months.iter_mut().enumerate() {
            *slot = col(&format!("M{}", m + 1))?;
        }

        let mut table = Self::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| parse_err(format!("line {line}: {e}")))?;
            let field = |c: usize, name: &str| -> Result<&str, SimError> {
                rec.get(c)
                    .ok_or_else(|| parse_err(format!("line {line}: missing field '{name}'")))
            };
            let num = |c: usize, name: &str| -> Result<u32, SimError> {
                let v = field(c, name)?;
                if v == "-" || v.is_empty() {
                    return Ok(0);
                }
                v.parse()
                    .map_err(|_| parse_err(format!("line {line}: field '{name}': bad value '{v}'")))
            };
            let customer = num(c_customer, "customer")?;
            let product = num(c_product, "product")?;
            let mut months = [0u32; MONTHS];
            for (m, &c) in c_months.iter().enumerate() {
                months[m] = num(c, &format!("M{}", m + 1))?;
            }
            if table.has_row(customer, product) {
                return Err(parse_err(format!(
                    "line {line}: duplicate row for customer {customer} product {product}"
                )));
            }
            table.insert(customer, product, months);
        }
        Ok(table)
    }

    /// Writes the table; zero rows are written with dashes.
    pub fn write<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["customer".to_string(), "product".to_string()];
        header.extend((1..=MONTHS).map(|m| format!("M{m}")));
        wtr.write_record(&header)?;
        for (&(c, p), months) in &self.rows {
            let mut rec = vec![c.to_string(), p.to_string()];
            let all_zero = months.iter().all(|&b| b == 0);
            rec.extend(months.iter().map(|b| {
                if all_zero {
                    "-".to_string()
                } else {
                    b.to_string()
                }
            }));
            wtr.write_record(&rec)?;
        }
        wtr.flush()
    }
}
