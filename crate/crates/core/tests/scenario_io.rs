//! Scenario files, demand tables and validation.

mod common;

use std::fs;
use std::path::Path;

use vcor_sim::error::ValidationError;
use vcor_sim::scenario::{
    parse_scenario, DemandTable, LeadTime, Mode, Scenario, ScenarioConfig, StockMode,
};
use vcor_sim::{load_scenario, SimError};

fn validation(err: SimError) -> ValidationError {
    match err {
        SimError::Validation(v) => v,
        other => panic!("expected a validation error, got {other}"),
    }
}

fn check(c: ScenarioConfig) -> Result<Scenario, ValidationError> {
    Scenario::new(c, DemandTable::case_study())
}

#[test]
fn case_study_demand_table_is_verbatim() {
    let t = DemandTable::case_study();
    let rows: [(u32, u32, Option<[u32; 12]>); 6] = [
        (1, 1, Some([250, 260, 245, 247, 255, 257, 250, 251, 253, 255, 250, 241])),
        (1, 2, Some([550, 659, 580, 650, 770, 850, 890, 790, 700, 650, 590, 500])),
        (1, 3, None),
        (2, 1, Some([300, 310, 312, 295, 311, 320, 301, 305, 313, 300, 295, 297])),
        (2, 2, None),
        (2, 3, Some([70, 165, 140, 145, 250, 355, 397, 410, 380, 371, 280, 210])),
    ];
    for (c, p, months) in rows {
        for m in 1..=12u32 {
            let want = months.map_or(0, |row| row[m as usize - 1]);
            assert_eq!(t.boxes(c, p, m), Some(want), "customer {c} product {p} month {m}");
        }
    }
    assert_eq!(t.boxes(1, 2, 6), Some(850));
}

#[test]
fn case_study_parameters_are_verbatim() {
    let c = ScenarioConfig::case_study(Mode::Scor);
    assert_eq!(c.horizon_hours, 48.0);

    let r = &c.retailer;
    assert_eq!((r.deliver_interval, r.source_interval), (2.0, 2.5));
    let level = |stock: &[vcor_sim::scenario::StockConfig], item| {
        stock.iter().find(|s| s.item == item).unwrap().initial
    };
    assert_eq!([level(&r.stock, 1), level(&r.stock, 2)], [0, 0]);

    let f = &c.firm;
    assert_eq!(
        (f.deliver_interval, f.source_interval, f.make_interval),
        (2.5, 3.0, 3.0)
    );
    assert_eq!(f.capacity_per_day, 185.0);
    assert_eq!(
        [level(&f.products, 1), level(&f.products, 2), level(&f.products, 3)],
        [500, 500, 300]
    );
    assert_eq!(
        [level(&f.raws, 1), level(&f.raws, 2), level(&f.raws, 3)],
        [200, 200, 200]
    );
    assert!(f.products.iter().all(|s| s.mode == StockMode::MakeToStock));

    // Supplier 1 makes raw 1, supplier 2 raws 1 and 2, supplier 3 raw 3.
    let made: Vec<(u32, Vec<u32>)> = c
        .suppliers
        .iter()
        .map(|s| (s.id, s.raws.iter().map(|r| r.item).collect()))
        .collect();
    assert_eq!(made, [(1, vec![1]), (2, vec![1, 2]), (3, vec![3])]);
    assert_eq!(f.sourcing, [(1, 2), (2, 2), (3, 3)]);
    for s in &c.suppliers {
        assert_eq!((s.deliver_interval, s.source_interval), (4.0, 4.0));
    }

    let customers: Vec<(u32, Vec<u32>)> =
        c.customers.iter().map(|x| (x.id, x.products.clone())).collect();
    assert_eq!(customers, [(1, vec![1, 2]), (2, vec![1, 3])]);
}

#[test]
fn toml_round_trip_keeps_config_and_digest() {
    for mode in [Mode::Scor, Mode::Vcor] {
        let s = Scenario::case_study(mode);
        let back = parse_scenario(&s.to_toml(), "mem", Path::new(".")).unwrap();
        assert_eq!(back.config, s.config);
        assert_eq!(back.digest(), s.digest());
    }
}

#[test]
fn digest_ignores_seed_but_not_content() {
    let s = Scenario::case_study(Mode::Scor);
    let reseeded = s.with_config(|c| c.seed = 99).unwrap();
    assert_eq!(s.digest(), reseeded.digest());
    assert_eq!(s.digest().len(), 16);
    let longer = s.with_config(|c| c.horizon_hours = 24.0).unwrap();
    assert_ne!(s.digest(), longer.digest());
    let mut demand = DemandTable::case_study();
    demand.insert(1, 1, [1; 12]);
    let other = Scenario::new(s.config.clone(), demand).unwrap();
    assert_ne!(s.digest(), other.digest());
}

#[test]
fn empty_file_is_the_case_study() {
    let s = parse_scenario("", "empty.toml", Path::new(".")).unwrap();
    assert_eq!(s.demand, DemandTable::case_study());
    assert_eq!(s.config.firm, ScenarioConfig::default().firm);
}

#[test]
fn loads_scenario_with_relative_demand_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = Vec::new();
    common::micro_demand().write(&mut table).unwrap();
    fs::write(dir.path().join("micro.csv"), table).unwrap();
    let mut cfg = common::micro_config();
    cfg.demand.table = Some("micro.csv".into());
    let path = dir.path().join("micro.toml");
    fs::write(&path, toml::to_string(&cfg).unwrap()).unwrap();

    let s = load_scenario(&path).unwrap();
    assert_eq!(s.demand, common::micro_demand());
    assert_eq!(s.config, cfg);
    let a = vcor_sim::run_scenario(&s).unwrap();
    let b = vcor_sim::run_scenario(&common::micro()).unwrap();
    assert_eq!(a.trace, b.trace);
}

#[test]
fn missing_demand_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[demand]\ntable = \"absent.csv\"\n";
    let err = parse_scenario(text, "s.toml", dir.path()).unwrap_err();
    let v = validation(err);
    assert_eq!(v.code(), "V015");
}

#[test]
fn demand_csv_round_trips_with_dashes() {
    let t = DemandTable::case_study();
    let mut buf = Vec::new();
    t.write(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.lines().any(|l| l.starts_with("1,3,-")));
    assert_eq!(DemandTable::read(buf.as_slice(), "mem").unwrap(), t);
}

#[test]
fn malformed_demand_rows_are_parse_errors() {
    let bad = "customer,product,M1,M2,M3,M4,M5,M6,M7,M8,M9,M10,M11,M12\n1,1,x,0,0,0,0,0,0,0,0,0,0,0\n";
    let err = DemandTable::read(bad.as_bytes(), "bad.csv").unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("line 2"), "{err}");
    let missing = "customer,product,M1\n";
    assert!(DemandTable::read(missing.as_bytes(), "m.csv").is_err());
}

#[test]
fn toml_errors_carry_location() {
    let err = parse_scenario("seed = \"x\"\n", "s.toml", Path::new(".")).unwrap_err();
    assert!(matches!(err, SimError::Parse { .. }));
    assert!(err.to_string().contains("s.toml"), "{err}");
    let err = parse_scenario("nonsense = 1\n", "s.toml", Path::new(".")).unwrap_err();
    assert!(matches!(err, SimError::Parse { .. }));
}

#[test]
fn validation_codes() {
    let base = ScenarioConfig::case_study(Mode::Scor);
    let cases: Vec<(&str, Box<dyn Fn(&mut ScenarioConfig)>)> = vec![
        ("V001", Box::new(|c| c.schema = 7)),
        ("V002", Box::new(|c| c.satisfaction.params.alpha = 1.5)),
        ("V003", Box::new(|c| c.satisfaction.params.beta = 0.0)),
        ("V004", Box::new(|c| {
            c.firm.raws[0].reorder_point = Some(300);
        })),
        ("V005", Box::new(|c| c.catalog.bom[0].raws.push((9, 1)))),
        ("V006", Box::new(|c| c.customers[0].products.push(7))),
        ("V007", Box::new(|c| c.firm.sourcing.retain(|&(r, _)| r != 3))),
        ("V008", Box::new(|c| c.firm.make_interval = 0.0)),
        ("V009", Box::new(|c| c.firm.capacity_per_day = 0.0)),
        ("V010", Box::new(|c| c.support.defect_rates[0].probability = 1.5)),
        ("V011", Box::new(|c| c.retailer.lead_time = LeadTime::Uniform { min: 3.0, max: 1.0 })),
        ("V012", Box::new(|c| c.processes.sell = Some(true))),
        ("V013", Box::new(|c| {
            c.customers.push(vcor_sim::scenario::CustomerConfig {
                id: 3,
                products: vec![1],
            })
        })),
        ("V014", Box::new(|c| {
            let dup = c.suppliers[0].clone();
            c.suppliers.push(dup);
        })),
        ("V016", Box::new(|c| c.horizon_hours = -1.0)),
        ("V017", Box::new(|c| c.start_month = 13)),
        ("V018", Box::new(|c| c.sell.capacity_cap = 0.0)),
    ];
    for (code, mutate) in cases {
        let mut c = base.clone();
        mutate(&mut c);
        match check(c) {
            Err(e) => assert_eq!(e.code(), code, "{e}"),
            Ok(_) => panic!("expected {code}"),
        }
    }
}

#[test]
fn vcor_toggles_resolve() {
    let s = Scenario::case_study(Mode::Vcor);
    let p = s.processes();
    assert!(p.support && p.market && p.research && p.develop && p.sell);
    let off = s
        .with_config(|c| c.processes.support = Some(false))
        .unwrap()
        .processes();
    assert!(!off.support && off.sell);
    assert!(!Scenario::case_study(Mode::Scor).processes().any());
}
