//! USD against a BRICS+ currency on the toy network: attractors and their
//! probabilities as the initial share of USD adopters varies.

use std::path::Path;
use std::sync::Arc;

use wtn::google::DEFAULT_ALPHA;
use wtn::ingest::{aggregate_to_matrix, load_trade_records, ScalingSpec};
use wtn::opinion::{classify_groups, run_ensemble, EnsembleConfig, InitialDistribution, OpinionModel, ScoringContext};
use wtn::{CoreGroupSpec, CountryRegistry, WeightMode};

fn main() -> wtn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let registry = Arc::new(CountryRegistry::load(data.join("registry.csv"))?);
    let records = load_trade_records(data.join("trade.csv"), &registry)?;
    let m = aggregate_to_matrix(&records, 2010, ScalingSpec::identity(), &registry)?;

    let core = CoreGroupSpec::from_iso3(
        &registry,
        &[
            ("USD".to_string(), vec!["USA", "GBR", "CAN", "AUS", "NZL"]),
            ("BRI".to_string(), vec!["CHN", "IND", "RUS", "ARE", "BRA", "SAU", "ZAF", "ARG", "EGY", "IRN", "ETH"]),
        ],
    )?;
    let model = OpinionModel::new(ScoringContext::from_trade(&m, WeightMode::ImportExport, DEFAULT_ALPHA)?, core)?;

    let mut summaries = Vec::new();
    for (i, f_i) in [0.1, 0.3, 0.5, 0.7, 0.9].into_iter().enumerate() {
        let cfg = EnsembleConfig {
            n_conf: 500,
            max_sweeps: 100,
            seed: 100 + i as u64,
        };
        let s = run_ensemble(&model, InitialDistribution::Bernoulli { f_i }, &cfg)?;
        let found: Vec<String> = s
            .attractors
            .iter()
            .map(|a| format!("f_f={:.3} (rho={:.2})", a.f_f, a.probability))
            .collect();
        println!("f_i={f_i:.1}  mean tau {:.2}  {}", s.mean_tau, found.join("  "));
        summaries.push(s);
    }

    let labels = classify_groups(&summaries)?;
    let names = model.core().currencies().to_vec();
    let swing: Vec<&str> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.name(&names) == "swing")
        .map(|(c, _)| registry.iso3(c))
        .collect();
    println!("swing countries: {swing:?}");
    Ok(())
}
