//! Load the bundled toy dataset and list the largest traders by volume share.
//!
//!     cargo run --example ingest_and_ranks -- 2011

use std::path::Path;
use std::sync::Arc;

use wtn::ingest::{aggregate_to_matrix, load_trade_records, years, ScalingSpec};
use wtn::CountryRegistry;

fn main() -> wtn::Result<()> {
    let year: i32 = std::env::args().nth(1).map_or(2010, |s| s.parse().expect("year"));
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let registry = Arc::new(CountryRegistry::load(data.join("registry.csv"))?);
    let records = load_trade_records(data.join("trade.csv"), &registry)?;
    println!("{} records, years {:?}", records.len(), years(&records));

    let m = aggregate_to_matrix(&records, year, ScalingSpec::identity(), &registry)?;
    let totals = m.totals();
    let ranks = m.compute_rank_weights()?;
    println!("{year}: total trade {:.3e} USD across {} countries", totals.total, m.n());
    println!("{:<5} {:>10} {:>10}", "iso3", "P (imp)", "P* (exp)");
    for c in ranks.order_by_max().into_iter().take(10) {
        println!("{:<5} {:>10.4} {:>10.4}", registry.iso3(c), ranks.import_rank[c], ranks.export_rank[c]);
    }
    let silent: Vec<&str> = (0..m.n()).filter(|&c| !m.has_data(c)).map(|c| registry.iso3(c)).collect();
    println!("countries without trade: {silent:?}");
    Ok(())
}
