use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use wtn::report::{run_scenario, ScenarioConfig, YearEnsembles};

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy")
}

fn write_config(dir: &Path, years: &[i32], trade_file: &Path, extra: serde_json::Value) -> PathBuf {
    let mut cfg = serde_json::json!({
        "name": "toy",
        "registry_file": toy_dir().join("registry.csv"),
        "trade_file": trade_file,
        "years": years,
        "currencies": [
            {"label": "USD", "core": ["USA", "GBR", "CAN", "AUS", "NZL"]},
            {"label": "BRI", "core": ["CHN", "IND", "RUS", "BRA", "ZAF", "SAU"]}
        ],
        "f_i_grid": [0.25, 0.5, 0.75],
        "n_conf": 40,
        "seed": 5
    });
    for (k, v) in extra.as_object().unwrap() {
        cfg[k] = v.clone();
    }
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

fn bundle(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn one_year_bundle_is_complete_and_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::load(write_config(tmp.path(), &[2011], &toy_dir().join("trade.csv"), serde_json::json!({})))
        .unwrap();
    let out = tmp.path().join("out");
    let outcome = run_scenario(&cfg, &out, Some(2)).unwrap();
    assert!(outcome.diagnostics.is_empty());
    let first = bundle(&out);
    let names: Vec<&str> = first.keys().map(String::as_str).collect();
    assert_eq!(names, ["2011_ensembles.json", "2011_groups.csv", "2011_preferences.csv", "timeseries.csv"]);

    run_scenario(&cfg, &out, Some(1)).unwrap();
    assert_eq!(bundle(&out), first);

    let groups = String::from_utf8(first["2011_groups.csv"].clone()).unwrap();
    let mut lines = groups.lines();
    assert_eq!(lines.next(), Some("iso3,group_label"));
    let rows: BTreeMap<&str, &str> = lines.map(|l| l.split_once(',').unwrap()).collect();
    assert_eq!(rows.len(), 50);
    assert_eq!(rows["USA"], "USD");
    assert_eq!(rows["CHN"], "BRI");
    assert_eq!(rows["PRK"], "no_data");

    let prefs = String::from_utf8(first["2011_preferences.csv"].clone()).unwrap();
    assert!(prefs.starts_with("f_i,iso3,pref_prob_USD,pref_prob_BRI\n"));
    // PRK has no trade and gets no preference rows.
    assert_eq!(prefs.lines().count(), 1 + 3 * 49);

    let ens: YearEnsembles = serde_json::from_slice(&first["2011_ensembles.json"]).unwrap();
    assert_eq!(ens.ensembles.len(), 3);
    assert_eq!(ens.currencies, ["USD", "BRI"]);

    let year = &outcome.years[0];
    let countries: f64 = year.shares.iter().map(|s| s.country_fraction).sum();
    let volume: f64 = year.shares.iter().map(|s| s.volume_fraction).sum();
    assert!((countries - 1.0).abs() <= 1e-12);
    assert!((volume - 1.0).abs() <= 1e-12);
}

#[test]
fn missing_years_are_reported_not_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    fs::copy(toy_dir().join("trade.csv"), tmp.path().join("trade_2010.csv")).unwrap();
    let cfg_path = write_config(
        tmp.path(),
        &[2010, 2011],
        &tmp.path().join("trade_{year}.csv"),
        serde_json::json!({"n_conf": 20}),
    );
    let cfg = ScenarioConfig::load(cfg_path).unwrap();
    let out = tmp.path().join("out");
    let outcome = run_scenario(&cfg, &out, None).unwrap();
    assert_eq!(outcome.years.len(), 1);
    assert_eq!(outcome.diagnostics.len(), 1);
    assert_eq!(outcome.diagnostics[0].year, 2011);
    assert_eq!(outcome.diagnostics[0].status, "skipped");
    assert!(out.join("2010_groups.csv").exists());
    assert!(out.join("diagnostics.json").exists());
}

#[test]
fn three_currencies_use_one_uniform_ensemble() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = write_config(
        tmp.path(),
        &[2012],
        &toy_dir().join("trade.csv"),
        serde_json::json!({"currencies": [
            {"label": "USD", "core": ["USA", "GBR"]},
            {"label": "EUR", "core": ["DEU", "FRA"]},
            {"label": "BRI", "core": ["CHN", "RUS"]}
        ]}),
    );
    let cfg = ScenarioConfig::load(cfg_path).unwrap();
    let out = tmp.path().join("out");
    let outcome = run_scenario(&cfg, &out, None).unwrap();
    assert_eq!(outcome.years[0].summaries.len(), 1);
    let prefs = fs::read_to_string(out.join("2012_preferences.csv")).unwrap();
    assert!(prefs.lines().skip(1).all(|l| l.starts_with("uniform,")));
    assert_eq!(outcome.years[0].shares.len(), 4);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), &[2010], &toy_dir().join("trade.csv"), serde_json::json!({"n_confs": 3}));
    assert!(ScenarioConfig::load(path).is_err());
}

fn wtn(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wtn")).args(args).output().unwrap()
}

#[test]
fn cli_ranks_prints_csv() {
    let reg = toy_dir().join("registry.csv");
    let trade = toy_dir().join("trade.csv");
    for (mode, header) in [("shares", "iso3,import_rank,export_rank"), ("google", "iso3,pagerank,cheirank")] {
        let out = wtn(&[
            "ranks",
            "--trade-file",
            trade.to_str().unwrap(),
            "--registry-file",
            reg.to_str().unwrap(),
            "--year",
            "2010",
            "--mode",
            mode,
        ]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(header));
        assert_eq!(text.lines().count(), 51);
    }
}

#[test]
fn cli_regomax_writes_matrices() {
    let tmp = tempfile::tempdir().unwrap();
    let subset = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/angl_brics_subset.txt");
    let out = wtn(&[
        "--out-dir",
        tmp.path().to_str().unwrap(),
        "regomax",
        "--trade-file",
        toy_dir().join("trade.csv").to_str().unwrap(),
        "--registry-file",
        toy_dir().join("registry.csv").to_str().unwrap(),
        "--year",
        "2012",
        "--subset",
        subset.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["G_R.csv", "G_rr.csv", "G_pr.csv", "G_qr.csv", "stats.json"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let stats: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["order"].as_array().unwrap().len(), 16);
    let w = &stats["weights"];
    let sum = w["w_rr"].as_f64().unwrap() + w["w_pr"].as_f64().unwrap() + w["w_qr"].as_f64().unwrap();
    assert!((sum - 1.0).abs() <= 1e-8);
}

#[test]
fn cli_simulate_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &[2010], &toy_dir().join("trade.csv"), serde_json::json!({}));
    let out = wtn(&[
        "--out-dir",
        tmp.path().join("sim").to_str().unwrap(),
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--year",
        "2010",
        "--f-i",
        "0.3",
        "--n-conf",
        "25",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ens: YearEnsembles = serde_json::from_slice(&fs::read(tmp.path().join("sim/2010_ensembles.json")).unwrap()).unwrap();
    assert_eq!(ens.ensembles.len(), 1);
    assert_eq!(ens.ensembles[0].n_conf, 25);
    assert_eq!(ens.ensembles[0].f_i, Some(0.3));

    let bad = wtn(&["simulate", "--config", cfg.to_str().unwrap(), "--year", "1990"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("1990"));
}
