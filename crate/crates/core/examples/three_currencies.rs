//! USD, EUR and a BRICS+ currency competing on the toy network, starting
//! from uniformly random preferences.

use std::path::Path;
use std::sync::Arc;

use wtn::google::DEFAULT_ALPHA;
use wtn::ingest::{aggregate_to_matrix, load_trade_records, ScalingSpec};
use wtn::opinion::{run_ensemble, EnsembleConfig, InitialDistribution, OpinionModel, ScoringContext};
use wtn::{CoreGroupSpec, CountryRegistry, WeightMode};

fn main() -> wtn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let registry = Arc::new(CountryRegistry::load(data.join("registry.csv"))?);
    let records = load_trade_records(data.join("trade.csv"), &registry)?;
    let m = aggregate_to_matrix(&records, 2012, ScalingSpec::identity(), &registry)?;

    let core = CoreGroupSpec::from_iso3(
        &registry,
        &[
            ("USD".to_string(), vec!["USA", "GBR", "CAN", "AUS", "NZL"]),
            ("EUR".to_string(), vec!["DEU", "FRA", "NLD", "ITA", "BEL", "ESP", "AUT", "PRT", "LUX"]),
            ("BRI".to_string(), vec!["CHN", "IND", "RUS", "ARE", "BRA", "SAU", "ZAF", "ARG", "EGY", "IRN", "ETH"]),
        ],
    )?;
    let model = OpinionModel::new(ScoringContext::from_trade(&m, WeightMode::ImportExport, DEFAULT_ALPHA)?, core)?;
    let cfg = EnsembleConfig {
        n_conf: 1000,
        max_sweeps: 100,
        seed: 11,
    };
    let s = run_ensemble(&model, InitialDistribution::Uniform, &cfg)?;
    println!("{} runs, mean tau {:.2}", s.converged, s.mean_tau);
    for a in &s.attractors {
        let parts: Vec<String> = s
            .currencies
            .iter()
            .zip(&a.fractions)
            .map(|(cur, f)| format!("{cur} {f:.3}"))
            .collect();
        println!("  {}  rho={:.3}", parts.join("  "), a.probability);
    }
    Ok(())
}
