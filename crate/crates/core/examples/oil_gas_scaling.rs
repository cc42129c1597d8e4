//! USD, CNY and an OPEC+ currency on the toy network, with oil and gas flows
//! taken at face value and multiplied by four.

use std::path::Path;
use std::sync::Arc;

use wtn::google::DEFAULT_ALPHA;
use wtn::ingest::{aggregate_to_matrix, load_trade_records, ScalingSpec};
use wtn::opinion::{run_ensemble, EnsembleConfig, InitialDistribution, OpinionModel, ScoringContext};
use wtn::{CoreGroupSpec, CountryRegistry, WeightMode};

const OPEC_PLUS: [&str; 13] = [
    "SAU", "RUS", "IRQ", "ARE", "KWT", "IRN", "MEX", "KAZ", "AGO", "NGA", "OMN", "DZA", "LBY",
];

fn main() -> wtn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let registry = Arc::new(CountryRegistry::load(data.join("registry.csv"))?);
    let records = load_trade_records(data.join("trade.csv"), &registry)?;
    let core = CoreGroupSpec::from_iso3(
        &registry,
        &[
            ("USD".to_string(), vec!["USA", "GBR", "CAN", "AUS", "NZL"]),
            ("CNY".to_string(), vec!["CHN"]),
            ("OPE".to_string(), OPEC_PLUS.to_vec()),
        ],
    )?;
    let opec = registry.resolve_all(&OPEC_PLUS)?;

    for k in [1.0, 4.0] {
        let m = aggregate_to_matrix(&records, 2011, ScalingSpec::new(k)?, &registry)?;
        let ranks = m.compute_rank_weights()?;
        let opec_exports: f64 = opec.iter().map(|&c| ranks.export_rank[c]).sum();
        let ctx = ScoringContext::from_trade(&m, WeightMode::ImportExport, DEFAULT_ALPHA)?;
        let model = OpinionModel::new(ctx, core.clone())?;
        let cfg = EnsembleConfig {
            n_conf: 1000,
            max_sweeps: 100,
            seed: 3,
        };
        let s = run_ensemble(&model, InitialDistribution::Uniform, &cfg)?;
        println!("K={k}: OPEC+ share of world exports {opec_exports:.3}");
        for a in &s.attractors {
            println!(
                "    USD {:.3}  CNY {:.3}  OPE {:.3}  rho={:.3}",
                a.fractions[0], a.fractions[1], a.fractions[2], a.probability
            );
        }
    }
    Ok(())
}
