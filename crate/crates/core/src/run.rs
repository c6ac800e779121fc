//! Run orchestration, end-of-run invariant checks and artifact files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::actors::{Sim, World, WorldOutput};
use crate::engine::{write_trace, TraceRecord};
use crate::error::SimError;
use crate::kpi::{build_report, header_line, KpiReport};
use crate::model::{ActorId, Item, Ledger, OrderOrigin, OrderStatus, ProductId, RawId};
use crate::scenario::Scenario;

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub scenario_digest: String,
    pub seed: u64,
    pub horizon: f64,
    pub trace: Vec<TraceRecord>,
    pub output: WorldOutput,
    pub kpi: KpiReport,
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunArtifacts, SimError> {
    let mut world = World::new(scenario);
    let mut eng = Sim::new();
    world.schedule_initial(&mut eng)?;
    eng.run_until(scenario.horizon(), |eng, ev| world.handle(eng, ev))?;
    let output = world.finish(scenario.horizon());
    check_invariants(scenario, &output)?;
    let kpi = build_report(scenario, &output);
    Ok(RunArtifacts {
        scenario_digest: scenario.digest().to_string(),
        seed: scenario.seed(),
        horizon: scenario.horizon(),
        trace: eng.into_trace(),
        output,
        kpi,
    })
}

fn violated(what: impl Into<String>) -> SimError {
    SimError::Invariant(what.into())
}

/// Conservation and consistency checks over a finished run.
pub fn check_invariants(scenario: &Scenario, out: &WorldOutput) -> Result<(), SimError> {
    let ledger = &out.ledger;
    let census: usize = ledger.orders().map(|_| 1).sum();
    if census != ledger.len() {
        return Err(violated("order census does not match ledger length"));
    }

    let replayed = Ledger::replay(scenario.catalog(), ledger.log())?;
    if &replayed != ledger {
        return Err(violated("transition log does not replay to the final ledger"));
    }

    for o in ledger.orders() {
        if o.history.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(violated(format!(
                "order {} has decreasing transition timestamps",
                o.order_id
            )));
        }
    }

    // Finished goods leaving the firm never exceed initial stock plus output.
    let mut shipped: BTreeMap<ProductId, u64> = BTreeMap::new();
    for o in ledger.demand_view(ActorId::Firm) {
        if let (Item::Product(p), true) = (o.item, o.time_of(OrderStatus::InTransit).is_some()) {
            *shipped.entry(p).or_default() += o.quantity as u64;
        }
    }
    for (p, n) in shipped {
        let initial = out
            .inventory(ActorId::Firm, Item::Product(p))
            .map_or(0, |r| r.initial()) as u64;
        let produced = out.produced.get(&p).copied().unwrap_or(0) as u64;
        if n > initial + produced {
            return Err(violated(format!(
                "firm shipped {n} boxes of product {p} with only {initial} initial and {produced} produced"
            )));
        }
    }

    // Raw balance at the firm: initial + received − consumed = final.
    let mut consumed: BTreeMap<RawId, u64> = BTreeMap::new();
    for lot in &out.lots {
        for &(raw, kg) in &lot.raws {
            *consumed.entry(raw).or_default() += kg as u64;
        }
    }
    for r in out.inventories.iter().filter(|r| r.owner == ActorId::Firm) {
        let Item::Raw(raw) = r.item else { continue };
        let received: u64 = ledger
            .orders()
            .filter(|o| o.client == ActorId::Firm && o.item == r.item && o.status.is_delivered())
            .map(|o| o.quantity as u64)
            .sum();
        let used = consumed.get(&raw).copied().unwrap_or(0);
        if r.initial() as u64 + received != used + r.on_hand() as u64 {
            return Err(violated(format!("raw {raw} balance at the firm does not close")));
        }
    }

    // Replacement quantities equal defective quantities.
    for t in ledger.tickets() {
        if let Some(id) = t.replacement_order {
            let q = ledger.get(id).map(|o| o.quantity);
            if q != Some(t.defective) {
                return Err(violated(format!(
                    "ticket {} replacement quantity differs from defective quantity",
                    t.ticket_id
                )));
            }
        }
    }

    // At most one open replenishment per (client, item).
    let mut open: BTreeMap<(ActorId, Item), usize> = BTreeMap::new();
    for o in ledger.orders() {
        if o.origin == OrderOrigin::Replenishment
            && !o.status.is_delivered()
            && o.status != OrderStatus::Rejected
        {
            *open.entry((o.client, o.item)).or_default() += 1;
        }
    }
    if let Some(((c, i), n)) = open.into_iter().find(|&(_, n)| n > 1) {
        return Err(violated(format!("{n} open replenishment orders for {c} {i}")));
    }

    let cfg = &scenario.config;
    if out.committed_per_day > cfg.sell.capacity_cap * cfg.firm.capacity_per_day {
        return Err(violated("sell contracts exceed the capacity cap"));
    }
    if out.satisfaction.iter().any(|v| !(0.0..=10.0).contains(&v.vote)) {
        return Err(violated("vote outside [0, 10]"));
    }
    Ok(())
}

pub const ARTIFACT_FILES: [&str; 7] = [
    "trace.jsonl",
    "ledger.jsonl",
    "kpi.json",
    "costs.csv",
    "delivery_times.csv",
    "satisfaction.csv",
    "production.csv",
];

fn create(dir: &Path, name: &str) -> Result<(BufWriter<fs::File>, PathBuf), SimError> {
    let path = dir.join(name);
    let f = fs::File::create(&path).map_err(|e| SimError::io(path.display().to_string(), e))?;
    Ok((BufWriter::new(f), path))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> SimError + '_ {
    move |e| SimError::io(path.display().to_string(), e)
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> SimError + '_ {
    move |e| SimError::io(path.display().to_string(), e.into())
}

impl RunArtifacts {
    pub fn header(&self) -> String {
        header_line(&self.scenario_digest, self.seed)
    }

    /// Writes every artifact file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<(), SimError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let header = format!("# {}\n", self.header());

        let (mut w, p) = create(dir, "trace.jsonl")?;
        w.write_all(header.as_bytes()).map_err(io_err(&p))?;
        write_trace(&mut w, &self.trace).map_err(io_err(&p))?;
        w.flush().map_err(io_err(&p))?;

        let (mut w, p) = create(dir, "ledger.jsonl")?;
        w.write_all(header.as_bytes()).map_err(io_err(&p))?;
        self.output.ledger.write_jsonl(&mut w).map_err(io_err(&p))?;
        w.flush().map_err(io_err(&p))?;

        let (mut w, p) = create(dir, "kpi.json")?;
        serde_json::to_writer_pretty(&mut w, &self.kpi).map_err(|e| io_err(&p)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(&p))?;
        w.flush().map_err(io_err(&p))?;

        let (mut w, p) = create(dir, "costs.csv")?;
        w.write_all(header.as_bytes()).map_err(io_err(&p))?;
        self.output.costs.write_csv(&mut w).map_err(csv_err(&p))?;

        let (mut w, p) = create(dir, "delivery_times.csv")?;
        w.write_all(header.as_bytes()).map_err(io_err(&p))?;
        {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["provider", "order_id", "created_at", "delivered_at", "hours"])
                .map_err(csv_err(&p))?;
            for d in &self.kpi.delivery {
                for t in &d.series {
                    c.write_record([
                        d.provider.to_string(),
                        t.order_id.to_string(),
                        t.created_at.to_string(),
                        t.delivered_at.to_string(),
                        t.hours.to_string(),
                    ])
                    .map_err(csv_err(&p))?;
                }
            }
            c.flush().map_err(io_err(&p))?;
        }

        let (mut w, p) = create(dir, "satisfaction.csv")?;
        w.write_all(header.as_bytes()).map_err(io_err(&p))?;
        {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["k", "time", "customer", "product", "vote", "innovation"])
                .map_err(csv_err(&p))?;
            for v in &self.output.satisfaction {
                c.write_record([
                    v.k.to_string(),
                    v.time.to_string(),
                    v.customer.to_string(),
                    v.product.to_string(),
                    v.vote.to_string(),
                    v.innovation.to_string(),
                ])
                .map_err(csv_err(&p))?;
            }
            c.flush().map_err(io_err(&p))?;
        }

        let (mut w, p) = create(dir, "production.csv")?;
        w.write_all(header.as_bytes()).map_err(io_err(&p))?;
        {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["time", "product", "quantity", "for_order"])
                .map_err(csv_err(&p))?;
            for lot in &self.output.lots {
                c.write_record([
                    lot.at.to_string(),
                    lot.product.to_string(),
                    lot.quantity.to_string(),
                    lot.for_order.map_or(String::new(), |o| o.to_string()),
                ])
                .map_err(csv_err(&p))?;
            }
            c.flush().map_err(io_err(&p))?;
        }
        Ok(())
    }
}

/// Reads a `kpi.json` written by [`RunArtifacts::write_to`].
pub fn read_kpi(path: &Path) -> Result<KpiReport, SimError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| SimError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
