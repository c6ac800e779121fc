use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{KpiReport, StockClass};
use crate::error::SimError;
use crate::model::ActorId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub scor: Option<f64>,
    pub vcor: Option<f64>,
    /// `vcor − scor`.
    pub delta: Option<f64>,
    /// `vcor / scor`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub header: String,
    pub seed: u64,
    pub scor_digest: String,
    pub vcor_digest: String,
    pub rows: Vec<ComparisonRow>,
    pub findings: Vec<String>,
}

fn row(metric: String, scor: Option<f64>, vcor: Option<f64>) -> ComparisonRow {
    let delta = scor.zip(vcor).map(|(a, b)| b - a);
    let ratio = scor.zip(vcor).and_then(|(a, b)| (a != 0.0).then(|| b / a));
    ComparisonRow {
        metric,
        scor,
        vcor,
        delta,
        ratio,
    }
}

/// Side-by-side report of two runs of the same topology and seed. The first
/// report is the baseline.
pub fn compare_runs(scor: &KpiReport, vcor: &KpiReport) -> Result<ComparisonReport, SimError> {
    if scor.topology != vcor.topology {
        return Err(SimError::Comparison(
            "runs do not share the same topology".into(),
        ));
    }
    if scor.seed != vcor.seed {
        return Err(SimError::Comparison(format!(
            "runs use different seeds ({} vs {})",
            scor.seed, vcor.seed
        )));
    }
    let mut merged: BTreeMap<String, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for (k, v) in scor.metrics() {
        merged.entry(k).or_default().0 = v;
    }
    for (k, v) in vcor.metrics() {
        merged.entry(k).or_default().1 = v;
    }
    let rows = merged
        .into_iter()
        .map(|(k, (a, b))| row(k, a, b))
        .collect();
    Ok(ComparisonReport {
        header: format!(
            "vcor-sim compare scor={} vcor={} seed={}",
            scor.scenario_digest, vcor.scenario_digest, scor.seed
        ),
        seed: scor.seed,
        scor_digest: scor.scenario_digest.clone(),
        vcor_digest: vcor.scenario_digest.clone(),
        rows,
        findings: findings(scor, vcor),
    })
}

/// Directional reading of a rotation pair: higher is faster turnover.
pub fn sri_finding(label: &str, scor: f64, vcor: f64) -> String {
    let ratio = vcor / scor;
    let verdict = if ratio > 1.0 {
        "improvement"
    } else if ratio < 1.0 {
        "decline"
    } else {
        "unchanged"
    };
    format!("{label} SRI vcor/scor = {ratio:.2} ({verdict})")
}

/// Share of the baseline stock mean time that the second run needs.
pub fn smi_finding(label: &str, scor: f64, vcor: f64) -> String {
    format!(
        "{label} stock held {:.0}% of the baseline mean time",
        100.0 * vcor / scor
    )
}

fn findings(scor: &KpiReport, vcor: &KpiReport) -> Vec<String> {
    let mut out = Vec::new();
    for s in &scor.stock {
        let Some(v) = vcor.stock_of(s.actor, s.class) else {
            continue;
        };
        let label = format!("{} {}", s.actor, s.class.name());
        match (s.sri, v.sri) {
            (Some(a), Some(b)) if a > 0.0 => out.push(sri_finding(&label, a, b)),
            _ => out.push(format!("{label} SRI absent in one run")),
        }
        if s.class == StockClass::Raw {
            if let (Some(a), Some(b)) = (s.smi_hours, v.smi_hours) {
                out.push(smi_finding(&label, a, b));
            }
        }
    }
    let mean = |r: &KpiReport| r.delivery_of(ActorId::Retailer).and_then(|d| d.mean_hours);
    if let (Some(a), Some(b)) = (mean(scor), mean(vcor)) {
        let word = if b > a {
            "longer"
        } else if b < a {
            "shorter"
        } else {
            "equal"
        };
        out.push(format!(
            "retailer mean delivery time {b:.2} h vs {a:.2} h ({word})"
        ));
    }
    let count = |r: &KpiReport| r.delivery_of(ActorId::Firm).map_or(0, |d| d.delivered);
    out.push(format!(
        "firm delivered {} orders vs {}",
        count(vcor),
        count(scor)
    ));
    out
}

impl ComparisonReport {
    pub fn row(&self, metric: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["metric", "scor", "vcor", "delta", "ratio"])?;
        let cell = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &self.rows {
            wtr.write_record([
                r.metric.clone(),
                cell(r.scor),
                cell(r.vcor),
                cell(r.delta),
                cell(r.ratio),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
