//! Reduced Google matrix of the ANGL and BRICS+ countries in the toy data:
//! component weights, sign balance of the indirect part and the total
//! transfer towards each member.

use std::path::Path;
use std::sync::Arc;

use wtn::google::{Direction, GoogleMatrix, DEFAULT_ALPHA};
use wtn::ingest::{aggregate_to_matrix, load_trade_records, ScalingSpec};
use wtn::regomax::{component_stats, reduce};
use wtn::CountryRegistry;

const SUBSET: [&str; 16] = [
    "USA", "GBR", "CAN", "AUS", "NZL", "CHN", "IND", "RUS", "ARE", "BRA", "SAU", "ZAF", "ARG", "EGY", "IRN", "ETH",
];

fn main() -> wtn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let registry = Arc::new(CountryRegistry::load(data.join("registry.csv"))?);
    let records = load_trade_records(data.join("trade.csv"), &registry)?;
    let subset = registry.resolve_all(&SUBSET)?;

    for year in [2010, 2012] {
        let m = aggregate_to_matrix(&records, year, ScalingSpec::identity(), &registry)?;
        let g = GoogleMatrix::build(&m.compute_shares(), DEFAULT_ALPHA, Direction::Imports)?;
        let r = reduce(&g, &subset)?;
        let stats = component_stats(&r, &m.compute_rank_weights()?);
        let w = stats.weights;
        println!(
            "{year}: lambda_c {:.4}  W_pr {:.3}  W_rr {:.3}  W_qr {:.3}  neg_stat {:.2}  ({} series terms)",
            stats.lambda_c, w.w_pr, w.w_rr, w.w_qr, stats.neg_stat, r.series_terms
        );
        for &pos in stats.order.iter().take(5) {
            println!("    T_{} = {:.2}", registry.iso3(subset[pos]), stats.incoming[pos]);
        }
    }
    Ok(())
}
