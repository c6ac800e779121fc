use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vcor_sim::kpi::{compare_runs, ComparisonReport, KpiReport};
use vcor_sim::model::ActorId;
use vcor_sim::run::read_kpi;
use vcor_sim::scenario::{DemandTable, Mode, Scenario, ScenarioConfig};
use vcor_sim::sweep::{run_batch, run_batch_sequential, run_pair, seed_variants};
use vcor_sim::{load_scenario, run_scenario, SimError};

#[derive(Parser)]
#[command(name = "vcor-sim", version, about = "SCOR/VCOR supply-chain simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Run length in hours.
    #[arg(long)]
    horizon: Option<f64>,
    /// scor or vcor.
    #[arg(long)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run {
        /// Scenario file; the built-in case study when omitted.
        scenario: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a SCOR and a VCOR run. Each side is an artifact directory or a
    /// scenario file to run.
    Compare {
        scor: PathBuf,
        vcor: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario file without running it.
    Validate {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write the built-in case-study scenario pair and demand table.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario over a range of seeds.
    Sweep {
        scenario: Option<PathBuf>,
        /// Number of seeds, starting at --seed (default 0).
        #[arg(long, default_value_t = 8)]
        seeds: u64,
        /// Disable the parallel batch.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: Option<&Path>, o: &Overrides) -> Result<Scenario, SimError> {
    let base = match path {
        Some(p) => load_scenario(p)?,
        None => Scenario::case_study(o.mode.unwrap_or_default()),
    };
    Ok(base.with_config(|c| {
        if let Some(seed) = o.seed {
            c.seed = seed;
        }
        if let Some(h) = o.horizon {
            c.horizon_hours = h;
        }
        if let Some(m) = o.mode {
            c.set_mode(m);
        }
    })?)
}

fn summary(kpi: &KpiReport) -> String {
    let fmt = |v: Option<f64>| v.map_or("absent".to_string(), |x| format!("{x:.3}"));
    let retail = kpi.delivery_of(ActorId::Retailer);
    let firm = kpi.delivery_of(ActorId::Firm);
    format!(
        "mode={} orders={} retailer_delivered={} retailer_mean_h={} firm_delivered={} chain_spi={}",
        kpi.mode,
        kpi.orders,
        retail.map_or(0, |d| d.delivered),
        fmt(retail.and_then(|d| d.mean_hours)),
        firm.map_or(0, |d| d.delivered),
        fmt(kpi.spi_of(None).and_then(|p| p.spi)),
    )
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), SimError> {
    fs::write(path, bytes).map_err(|e| SimError::io(path.display().to_string(), e))
}

fn mkdir(dir: &Path) -> Result<(), SimError> {
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir.display().to_string(), e))
}

fn write_comparison(dir: &Path, report: &ComparisonReport) -> Result<(), SimError> {
    mkdir(dir)?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    write_file(&dir.join("comparison.json"), format!("{json}\n").as_bytes())?;
    let path = dir.join("comparison.csv");
    let mut buf = format!("# {}\n", report.header).into_bytes();
    report
        .write_csv(&mut buf)
        .map_err(|e| SimError::io(path.display().to_string(), e.into()))?;
    write_file(&path, &buf)
}

fn execute(cmd: Command) -> Result<(), SimError> {
    match cmd {
        Command::Run {
            scenario,
            overrides,
            out,
        } => {
            let s = load(scenario.as_deref(), &overrides)?;
            let artifacts = run_scenario(&s)?;
            artifacts.write_to(&out)?;
            println!("{}", summary(&artifacts.kpi));
            println!("artifacts written to {}", out.display());
        }
        Command::Compare {
            scor,
            vcor,
            overrides,
            out,
        } => {
            let (a, b) = if scor.is_dir() && vcor.is_dir() {
                (
                    read_kpi(&scor.join("kpi.json"))?,
                    read_kpi(&vcor.join("kpi.json"))?,
                )
            } else {
                let sa = load(Some(&scor), &Overrides { mode: Some(Mode::Scor), ..overrides.clone() })?;
                let sb = load(Some(&vcor), &Overrides { mode: Some(Mode::Vcor), ..overrides })?;
                let (ra, rb) = run_pair(&sa, &sb);
                let (ra, rb) = (ra?, rb?);
                ra.write_to(&out.join("scor"))?;
                rb.write_to(&out.join("vcor"))?;
                (ra.kpi, rb.kpi)
            };
            let report = compare_runs(&a, &b)?;
            write_comparison(&out, &report)?;
            for f in &report.findings {
                println!("{f}");
            }
            println!("comparison written to {}", out.display());
        }
        Command::Validate {
            scenario,
            overrides,
        } => {
            let s = load(Some(&scenario), &overrides)?;
            println!(
                "ok: {} mode={} horizon={} h digest={}",
                scenario.display(),
                vcor_sim::scenario::mode_name(s.config.mode),
                s.horizon(),
                s.digest()
            );
        }
        Command::Demo { out } => {
            mkdir(&out)?;
            let mut table = Vec::new();
            DemandTable::case_study()
                .write(&mut table)
                .map_err(|e| SimError::io("demand.csv", e))?;
            write_file(&out.join("demand.csv"), &table)?;
            for mode in [Mode::Scor, Mode::Vcor] {
                let mut cfg = ScenarioConfig::case_study(mode);
                cfg.demand.table = Some("demand.csv".into());
                let name = format!("{}.toml", vcor_sim::scenario::mode_name(mode));
                let text = toml::to_string(&cfg).expect("scenario serializes");
                write_file(&out.join(name), text.as_bytes())?;
            }
            println!("wrote scor.toml, vcor.toml and demand.csv to {}", out.display());
        }
        Command::Sweep {
            scenario,
            seeds,
            sequential,
            overrides,
            out,
        } => {
            let base = load(scenario.as_deref(), &overrides)?;
            let first = overrides.seed.unwrap_or(0);
            let batch = seed_variants(&base, first..first + seeds);
            let results = if sequential {
                run_batch_sequential(&batch)
            } else {
                run_batch(&batch)
            };
            let mut lines = vec!["seed,orders,retailer_delivered,retailer_mean_hours,firm_delivered".to_string()];
            for r in results {
                let r = r?;
                let retail = r.kpi.delivery_of(ActorId::Retailer);
                let firm = r.kpi.delivery_of(ActorId::Firm);
                lines.push(format!(
                    "{},{},{},{},{}",
                    r.seed,
                    r.kpi.orders,
                    retail.map_or(0, |d| d.delivered),
                    retail
                        .and_then(|d| d.mean_hours)
                        .map_or(String::new(), |m| m.to_string()),
                    firm.map_or(0, |d| d.delivered),
                ));
            }
            let text = lines.join("\n") + "\n";
            match out {
                Some(dir) => {
                    mkdir(&dir)?;
                    let header = format!("# {}\n", vcor_sim::kpi::header_line(base.digest(), first));
                    write_file(&dir.join("sweep.csv"), (header + &text).as_bytes())?;
                }
                None => {
                    let _ = std::io::stdout().write_all(text.as_bytes());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
