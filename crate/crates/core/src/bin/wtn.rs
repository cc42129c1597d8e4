use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wtn::google::{Direction, GoogleMatrix, DEFAULT_ALPHA};
use wtn::ingest::{self, CountryRegistry, ScalingSpec};
use wtn::opinion::{run_ensemble, EnsembleConfig, InitialDistribution, OpinionModel, ScoringContext};
use wtn::regomax;
use wtn::report::{self, EnsembleRecord, ScenarioConfig, YearEnsembles};
use wtn::{Error, Result, TradeMatrix};

#[derive(Parser)]
#[command(name = "wtn", version, about = "World trade network ranks, reduced Google matrices and currency-preference dynamics")]
struct Cli {
    /// Master random seed (overrides the scenario file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for ensemble runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for output files (stdout when omitted, where supported).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    #[arg(long)]
    trade_file: PathBuf,
    #[arg(long)]
    registry_file: PathBuf,
    #[arg(long)]
    year: i32,
    /// Multiplier for oil/gas flows.
    #[arg(long = "oil-gas-factor", default_value_t = 1.0)]
    oil_gas_factor: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankMode {
    /// ImportRank and ExportRank from trade volumes.
    Shares,
    /// PageRank and CheiRank of the Google matrices.
    Google,
}

#[derive(Subcommand)]
enum Command {
    /// Rank vectors of one trade year as CSV.
    Ranks {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "shares")]
        mode: RankMode,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Reduced Google matrix of a country subset.
    Regomax {
        #[command(flatten)]
        data: DataArgs,
        /// File with one iso3 code per line.
        #[arg(long)]
        subset: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Ensembles for one year of a scenario.
    Simulate {
        /// Scenario JSON file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        year: i32,
        /// Initial fractions to run instead of the configured grid.
        #[arg(long = "f-i")]
        f_i: Vec<f64>,
        /// Runs per ensemble.
        #[arg(long)]
        n_conf: Option<usize>,
        /// Replaces the scenario's trade file.
        #[arg(long)]
        trade_file: Option<PathBuf>,
        /// Replaces the scenario's registry file.
        #[arg(long)]
        registry_file: Option<PathBuf>,
        /// Replaces the scenario's oil/gas multiplier.
        #[arg(long = "oil-gas-factor")]
        oil_gas_factor: Option<f64>,
    },
    /// Full scenario over all configured years.
    Scenario {
        /// Scenario JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Replaces the scenario's trade file.
        #[arg(long)]
        trade_file: Option<PathBuf>,
        /// Replaces the scenario's registry file.
        #[arg(long)]
        registry_file: Option<PathBuf>,
        /// Replaces the scenario's oil/gas multiplier.
        #[arg(long = "oil-gas-factor")]
        oil_gas_factor: Option<f64>,
    },
}

fn load_matrix(data: &DataArgs) -> Result<TradeMatrix> {
    let registry = Arc::new(CountryRegistry::load(&data.registry_file)?);
    let records = ingest::load_trade_records(&data.trade_file, &registry)?;
    ingest::aggregate_to_matrix(&records, data.year, ScalingSpec::new(data.oil_gas_factor)?, &registry)
}

fn emit(out_dir: Option<&Path>, name: &str, body: &str) -> Result<()> {
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn read_subset(path: &Path, registry: &CountryRegistry) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let codes: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    registry.resolve_all(&codes)
}

fn apply_overrides(
    cfg: &mut ScenarioConfig,
    seed: Option<u64>,
    trade_file: Option<PathBuf>,
    registry_file: Option<PathBuf>,
    k: Option<f64>,
) {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trade_file {
        cfg.trade_file = t;
    }
    if let Some(r) = registry_file {
        cfg.registry_file = r;
    }
    if let Some(k) = k {
        cfg.oil_gas_factor = k;
    }
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out_dir.as_deref();
    match cli.command {
        Command::Ranks { data, mode, alpha } => {
            let m = load_matrix(&data)?;
            let alpha = matches!(mode, RankMode::Google).then_some(alpha);
            emit(out_dir, &format!("ranks_{}.csv", data.year), &report::ranks_table(&m, alpha)?)
        }
        Command::Regomax { data, subset, alpha } => {
            let m = load_matrix(&data)?;
            let subset = read_subset(&subset, m.registry())?;
            let g = GoogleMatrix::build(&m.compute_shares(), alpha, Direction::Imports)?;
            let reduced = regomax::reduce(&g, &subset)?;
            let stats = regomax::component_stats(&reduced, &m.compute_rank_weights()?);
            let dir = out_dir.unwrap_or_else(|| Path::new("regomax_out"));
            for f in report::write_reduced(&reduced, &stats, m.registry(), dir)? {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Simulate {
            config,
            year,
            f_i,
            n_conf,
            trade_file,
            registry_file,
            oil_gas_factor,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            apply_overrides(&mut cfg, cli.seed, trade_file, registry_file, oil_gas_factor);
            if !f_i.is_empty() {
                cfg.f_i_grid = f_i;
            }
            if let Some(n) = n_conf {
                cfg.n_conf = n;
            }
            cfg.validate()?;
            let data = DataArgs {
                trade_file: cfg.trade_file_for(year),
                registry_file: cfg.registry_file.clone(),
                year,
                oil_gas_factor: cfg.oil_gas_factor,
            };
            let m = load_matrix(&data)?;
            let model = OpinionModel::new(
                ScoringContext::from_trade(&m, cfg.weight_mode, cfg.alpha)?,
                cfg.core_groups(m.registry())?,
            )?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs.unwrap_or(0))
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let ensembles = pool.install(|| {
                cfg.initial_distributions()
                    .into_iter()
                    .enumerate()
                    .map(|(i, init): (usize, InitialDistribution)| {
                        let ens = EnsembleConfig {
                            n_conf: cfg.n_conf,
                            max_sweeps: cfg.max_sweeps,
                            seed: report::derive_seed(cfg.seed, year, i),
                        };
                        run_ensemble(&model, init, &ens).map(|s| EnsembleRecord::new(&s, m.registry()))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let record = YearEnsembles {
                scenario: cfg.name.clone(),
                year,
                currencies: model.core().currencies().to_vec(),
                weight_mode: cfg.weight_mode,
                oil_gas_factor: cfg.oil_gas_factor,
                ensembles,
            };
            emit(out_dir, &format!("{year}_ensembles.json"), &serde_json::to_string_pretty(&record)?)
        }
        Command::Scenario {
            config,
            trade_file,
            registry_file,
            oil_gas_factor,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            apply_overrides(&mut cfg, cli.seed, trade_file, registry_file, oil_gas_factor);
            let dir = out_dir.map_or_else(|| PathBuf::from(format!("{}_out", cfg.name)), Path::to_path_buf);
            let outcome = report::run_scenario(&cfg, &dir, cli.jobs)?;
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
