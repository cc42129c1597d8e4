//! Scenario orchestration and CSV/JSON outputs.
//!
//! A scenario run writes, per year, into the output directory:
//!
//! | file | columns / shape |
//! |------|-----------------|
//! | `<year>_groups.csv` | `iso3,group_label` |
//! | `<year>_preferences.csv` | `f_i,iso3,pref_prob_<currency>...` |
//! | `<year>_ensembles.json` | [`YearEnsembles`] |
//!
//! and, once all years are done, `timeseries.csv` with
//! `year,group,country_fraction,volume_fraction,core_country_fraction,core_volume_fraction`.
//! Years that failed or were skipped are listed in `diagnostics.json`, which
//! is only written when there is something to report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{RankWeights, TradeMatrix};
use crate::google::{self, DEFAULT_ALPHA};
use crate::ingest::{self, CountryRegistry, ScalingSpec, TradeRecord};
use crate::opinion::{
    classify_groups, run_ensemble, Attractor, CoreGroupSpec, EnsembleConfig, EnsembleSummary,
    GroupLabel, InitialDistribution, OpinionModel, ScoringContext, WeightMode,
};
use crate::regomax::{ReducedGoogle, ReducedStats};

/// `0.05, 0.10, ..., 0.95`.
pub fn default_f_i_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

/// One group's share of countries and of trade volume in one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupShare {
    pub year: i32,
    pub group: String,
    /// Share of countries with data.
    pub country_fraction: f64,
    /// `sum (M_c + M*_c) / 2M` over the group.
    pub volume_fraction: f64,
    pub core_country_fraction: f64,
    pub core_volume_fraction: f64,
}

/// Rows for every year and group, in year order.
pub type GroupTimeSeries = Vec<GroupShare>;

/// Country and volume shares of each currency group and the swing group.
pub fn volume_shares(
    labels: &[GroupLabel],
    m: &TradeMatrix,
    core: &CoreGroupSpec,
) -> Result<Vec<GroupShare>> {
    let totals = m.totals();
    if totals.total <= 0.0 {
        return Err(Error::EmptyTradeYear);
    }
    let with_data = labels.iter().filter(|l| **l != GroupLabel::NoData).count() as f64;
    let volume = |c: usize| (totals.imports[c] + totals.exports[c]) / (2.0 * totals.total);

    let mut groups: Vec<(String, GroupLabel)> = core
        .currencies()
        .iter()
        .enumerate()
        .map(|(k, name)| (name.clone(), GroupLabel::Fixed(k as u8)))
        .collect();
    groups.push(("swing".into(), GroupLabel::Swing));

    Ok(groups
        .into_iter()
        .map(|(name, label)| {
            let members: Vec<usize> = (0..labels.len()).filter(|&c| labels[c] == label).collect();
            let core_members: Vec<usize> = match label {
                GroupLabel::Fixed(k) => members
                    .iter()
                    .copied()
                    .filter(|c| core.members(k as usize).contains(c))
                    .collect(),
                _ => Vec::new(),
            };
            GroupShare {
                year: m.year(),
                group: name,
                country_fraction: members.len() as f64 / with_data,
                volume_fraction: members.iter().fold(0.0, |acc, &c| acc + volume(c)),
                core_country_fraction: core_members.len() as f64 / with_data,
                core_volume_fraction: core_members.iter().fold(0.0, |acc, &c| acc + volume(c)),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrencyGroup {
    pub label: String,
    pub core: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Relative paths resolve against the config file's directory.
    pub registry_file: PathBuf,
    /// May contain `{year}` for one file per year.
    pub trade_file: PathBuf,
    pub years: Vec<i32>,
    pub currencies: Vec<CurrencyGroup>,
    #[serde(default)]
    pub weight_mode: WeightMode,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_f_i_grid")]
    pub f_i_grid: Vec<f64>,
    #[serde(default = "default_n_conf")]
    pub n_conf: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_k")]
    pub oil_gas_factor: f64,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_n_conf() -> usize {
    10_000
}
fn default_max_sweeps() -> usize {
    100
}
fn default_k() -> f64 {
    1.0
}

impl ScenarioConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.registry_file = base.join(&cfg.registry_file);
        cfg.trade_file = base.join(&cfg.trade_file);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.currencies.len() < 2 {
            return Err(Error::Config("need at least two currencies".into()));
        }
        if self.years.is_empty() {
            return Err(Error::Config("no years requested".into()));
        }
        if self.n_conf == 0 || self.max_sweeps == 0 {
            return Err(Error::Config("n_conf and max_sweeps must be positive".into()));
        }
        if self.currencies.len() == 2 {
            if self.f_i_grid.is_empty() {
                return Err(Error::Config("empty f_i grid".into()));
            }
            if let Some(f) = self.f_i_grid.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                return Err(Error::Config(format!("f_i = {f} outside [0, 1]")));
            }
        }
        ScalingSpec::new(self.oil_gas_factor)?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    pub fn trade_file_for(&self, year: i32) -> PathBuf {
        PathBuf::from(self.trade_file.to_string_lossy().replace("{year}", &year.to_string()))
    }

    pub fn core_groups(&self, registry: &CountryRegistry) -> Result<CoreGroupSpec> {
        let groups: Vec<(String, Vec<String>)> = self
            .currencies
            .iter()
            .map(|g| (g.label.clone(), g.core.clone()))
            .collect();
        CoreGroupSpec::from_iso3(registry, &groups)
    }

    /// Initial distributions to run: the `f_i` grid for two currencies, a
    /// single uniform draw otherwise.
    pub fn initial_distributions(&self) -> Vec<InitialDistribution> {
        if self.currencies.len() == 2 {
            self.f_i_grid
                .iter()
                .map(|&f_i| InitialDistribution::Bernoulli { f_i })
                .collect()
        } else {
            vec![InitialDistribution::Uniform]
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for one (year, grid point) ensemble, derived from the master seed.
pub fn derive_seed(master: u64, year: i32, grid_index: usize) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(year as u64)) ^ grid_index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    pub f_i: Option<f64>,
    pub seed: u64,
    pub n_conf: usize,
    pub converged: usize,
    pub non_converged: usize,
    pub counted_countries: usize,
    pub mean_tau: f64,
    pub attractors: Vec<Attractor>,
    /// iso3 -> currency -> probability of ending on that currency.
    pub preference: BTreeMap<String, BTreeMap<String, f64>>,
}

impl EnsembleRecord {
    pub fn new(summary: &EnsembleSummary, registry: &CountryRegistry) -> Self {
        let preference = summary
            .preference
            .iter()
            .enumerate()
            .filter(|(c, _)| summary.has_data[*c])
            .map(|(c, row)| {
                let per: BTreeMap<String, f64> = summary
                    .currencies
                    .iter()
                    .cloned()
                    .zip(row.iter().copied())
                    .collect();
                (registry.iso3(c).to_string(), per)
            })
            .collect();
        Self {
            f_i: summary.f_i(),
            seed: summary.seed,
            n_conf: summary.n_conf,
            converged: summary.converged,
            non_converged: summary.non_converged,
            counted_countries: summary.counted_countries,
            mean_tau: summary.mean_tau,
            attractors: summary.attractors.clone(),
            preference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearEnsembles {
    pub scenario: String,
    pub year: i32,
    pub currencies: Vec<String>,
    pub weight_mode: WeightMode,
    pub oil_gas_factor: f64,
    pub ensembles: Vec<EnsembleRecord>,
}

/// Everything computed for one year of a scenario.
#[derive(Debug, Clone)]
pub struct YearResult {
    pub year: i32,
    pub summaries: Vec<EnsembleSummary>,
    pub labels: Vec<GroupLabel>,
    pub shares: Vec<GroupShare>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub year: i32,
    pub status: &'static str,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub years: Vec<YearResult>,
    pub diagnostics: Vec<Diagnostic>,
    pub files: Vec<PathBuf>,
}

/// Ensembles over the configured initial distributions, classification and
/// group shares for one trade matrix.
pub fn run_year(cfg: &ScenarioConfig, m: &TradeMatrix) -> Result<YearResult> {
    let core = cfg.core_groups(m.registry())?;
    let ctx = ScoringContext::from_trade(m, cfg.weight_mode, cfg.alpha)?;
    let model = OpinionModel::new(ctx, core)?;
    let summaries = cfg
        .initial_distributions()
        .into_iter()
        .enumerate()
        .map(|(i, init)| {
            let ens = EnsembleConfig {
                n_conf: cfg.n_conf,
                max_sweeps: cfg.max_sweeps,
                seed: derive_seed(cfg.seed, m.year(), i),
            };
            run_ensemble(&model, init, &ens)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = classify_groups(&summaries)?;
    let shares = volume_shares(&labels, m, model.core())?;
    Ok(YearResult {
        year: m.year(),
        summaries,
        labels,
        shares,
    })
}

fn write(path: PathBuf, body: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(())
}

pub fn groups_csv(labels: &[GroupLabel], currencies: &[String], registry: &CountryRegistry) -> String {
    let mut out = String::from("iso3,group_label\n");
    for (c, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{},{}", registry.iso3(c), l.name(currencies));
    }
    out
}

pub fn preferences_csv(summaries: &[EnsembleSummary], registry: &CountryRegistry) -> String {
    let mut out = String::from("f_i,iso3");
    if let Some(first) = summaries.first() {
        for cur in &first.currencies {
            let _ = write!(out, ",pref_prob_{cur}");
        }
    }
    out.push('\n');
    for s in summaries {
        let f = s.f_i().map_or_else(|| "uniform".to_string(), |f| f.to_string());
        for (c, row) in s.preference.iter().enumerate().filter(|(c, _)| s.has_data[*c]) {
            let _ = write!(out, "{f},{}", registry.iso3(c));
            for p in row {
                let _ = write!(out, ",{p}");
            }
            out.push('\n');
        }
    }
    out
}

pub const TIMESERIES_HEADER: &str =
    "year,group,country_fraction,volume_fraction,core_country_fraction,core_volume_fraction";

pub fn timeseries_csv(rows: &[GroupShare]) -> String {
    let mut out = format!("{TIMESERIES_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.year, r.group, r.country_fraction, r.volume_fraction, r.core_country_fraction, r.core_volume_fraction
        );
    }
    out
}

/// Loads data, runs every requested year and writes the output bundle.
///
/// `jobs` bounds the worker threads (`None`: rayon's default). Outputs depend
/// only on the config, the data and the seed.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path, jobs: Option<usize>) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let registry = Arc::new(CountryRegistry::load(&cfg.registry_file)?);
    cfg.core_groups(&registry)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let scaling = ScalingSpec::new(cfg.oil_gas_factor)?;
    let mut cache: BTreeMap<PathBuf, std::result::Result<Arc<Vec<TradeRecord>>, String>> = BTreeMap::new();
    let mut inputs = Vec::with_capacity(cfg.years.len());
    let mut diagnostics = Vec::new();
    for &year in &cfg.years {
        let path = cfg.trade_file_for(year);
        if !path.exists() {
            log::warn!("{}: no trade file for {year}, skipping", path.display());
            diagnostics.push(Diagnostic {
                year,
                status: "skipped",
                message: format!("missing trade file {}", path.display()),
            });
            continue;
        }
        let records = cache
            .entry(path.clone())
            .or_insert_with(|| {
                ingest::load_trade_records(&path, &registry)
                    .map(Arc::new)
                    .map_err(|e| e.to_string())
            })
            .clone();
        inputs.push((year, records));
    }

    let results: Vec<(i32, Result<YearResult>, Option<TradeMatrix>)> = pool.install(|| {
        inputs
            .par_iter()
            .map(|(year, records)| {
                let matrix = records
                    .as_ref()
                    .map_err(|e| Error::Config(e.clone()))
                    .and_then(|r| ingest::aggregate_to_matrix(r, *year, scaling, &registry));
                match matrix {
                    Ok(m) => (*year, run_year(cfg, &m), Some(m)),
                    Err(e) => (*year, Err(e), None),
                }
            })
            .collect()
    });

    let currencies: Vec<String> = cfg.currencies.iter().map(|c| c.label.clone()).collect();
    let mut files = Vec::new();
    let mut years = Vec::new();
    let mut series = Vec::new();
    for (year, result, _) in results {
        match result {
            Ok(yr) => {
                write(
                    out_dir.join(format!("{year}_groups.csv")),
                    &groups_csv(&yr.labels, &currencies, &registry),
                    &mut files,
                )?;
                write(
                    out_dir.join(format!("{year}_preferences.csv")),
                    &preferences_csv(&yr.summaries, &registry),
                    &mut files,
                )?;
                let record = YearEnsembles {
                    scenario: cfg.name.clone(),
                    year,
                    currencies: currencies.clone(),
                    weight_mode: cfg.weight_mode,
                    oil_gas_factor: cfg.oil_gas_factor,
                    ensembles: yr.summaries.iter().map(|s| EnsembleRecord::new(s, &registry)).collect(),
                };
                write(
                    out_dir.join(format!("{year}_ensembles.json")),
                    &serde_json::to_string_pretty(&record)?,
                    &mut files,
                )?;
                series.extend(yr.shares.iter().cloned());
                years.push(yr);
            }
            Err(e) => {
                log::error!("year {year} failed: {e}");
                diagnostics.push(Diagnostic {
                    year,
                    status: "failed",
                    message: e.to_string(),
                });
            }
        }
    }
    write(out_dir.join("timeseries.csv"), &timeseries_csv(&series), &mut files)?;
    let diag_path = out_dir.join("diagnostics.json");
    if diagnostics.is_empty() {
        if diag_path.exists() {
            fs::remove_file(&diag_path).map_err(|e| Error::io(&diag_path, e))?;
        }
    } else {
        diagnostics.sort_by_key(|d| d.year);
        write(
            diag_path,
            &serde_json::to_string_pretty(&diagnostics)?,
            &mut files,
        )?;
    }
    Ok(ScenarioOutcome {
        years,
        diagnostics,
        files,
    })
}

/// `iso3,import_rank,export_rank` sorted by descending `max(P, P*)`.
pub fn ranks_csv(weights: &RankWeights, registry: &CountryRegistry, columns: (&str, &str)) -> String {
    let mut out = format!("iso3,{},{}\n", columns.0, columns.1);
    for c in weights.order_by_max() {
        let _ = writeln!(
            out,
            "{},{},{}",
            registry.iso3(c),
            weights.import_rank[c],
            weights.export_rank[c]
        );
    }
    out
}

/// Volume ranks, or PageRank/CheiRank when `google_alpha` is given.
pub fn ranks_table(m: &TradeMatrix, google_alpha: Option<f64>) -> Result<String> {
    match google_alpha {
        None => Ok(ranks_csv(&m.compute_rank_weights()?, m.registry(), ("import_rank", "export_rank"))),
        Some(alpha) => {
            let w = google::pagerank_cheirank(&m.compute_shares(), alpha)?;
            Ok(ranks_csv(&w, m.registry(), ("pagerank", "cheirank")))
        }
    }
}

/// Square matrix with iso3 header row and column.
pub fn matrix_csv(m: &DMatrix<f64>, labels: &[&str]) -> String {
    let mut out = String::new();
    for l in labels {
        let _ = write!(out, ",{l}");
    }
    out.push('\n');
    for (i, row) in m.row_iter().enumerate() {
        out.push_str(labels[i]);
        for v in row.iter() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedStatsRecord {
    pub lambda_c: f64,
    pub weights: crate::regomax::ComponentWeights,
    pub neg_stat: f64,
    #[serde(rename = "T")]
    pub incoming: BTreeMap<String, f64>,
    pub order: Vec<String>,
}

impl ReducedStatsRecord {
    pub fn new(r: &ReducedGoogle, stats: &ReducedStats, registry: &CountryRegistry) -> Self {
        let iso = |pos: usize| registry.iso3(r.subset[pos]).to_string();
        Self {
            lambda_c: stats.lambda_c,
            weights: stats.weights,
            neg_stat: stats.neg_stat,
            incoming: stats
                .incoming
                .iter()
                .enumerate()
                .map(|(pos, &t)| (iso(pos), t))
                .collect(),
            order: stats.order.iter().map(|&pos| iso(pos)).collect(),
        }
    }
}

/// Writes `G_R.csv`, `G_rr.csv`, `G_pr.csv`, `G_qr.csv` and `stats.json`.
pub fn write_reduced(
    r: &ReducedGoogle,
    stats: &ReducedStats,
    registry: &CountryRegistry,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let labels: Vec<&str> = r.subset.iter().map(|&c| registry.iso3(c)).collect();
    let mut files = Vec::new();
    for (name, m) in [("G_R", &r.g_r), ("G_rr", &r.g_rr), ("G_pr", &r.g_pr), ("G_qr", &r.g_qr)] {
        write(out_dir.join(format!("{name}.csv")), &matrix_csv(m, &labels), &mut files)?;
    }
    let record = ReducedStatsRecord::new(r, stats, registry);
    write(out_dir.join("stats.json"), &serde_json::to_string_pretty(&record)?, &mut files)?;
    Ok(files)
}
