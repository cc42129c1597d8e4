//! PageRank and CheiRank of the toy trade network, compared with plain
//! volume shares.

use std::path::Path;
use std::sync::Arc;

use wtn::google::{pagerank_cheirank, Direction, GoogleMatrix, DEFAULT_ALPHA};
use wtn::ingest::{aggregate_to_matrix, load_trade_records, ScalingSpec};
use wtn::CountryRegistry;

fn main() -> wtn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let registry = Arc::new(CountryRegistry::load(data.join("registry.csv"))?);
    let records = load_trade_records(data.join("trade.csv"), &registry)?;
    let m = aggregate_to_matrix(&records, 2012, ScalingSpec::identity(), &registry)?;

    let shares = m.compute_shares();
    let g = GoogleMatrix::build(&shares, DEFAULT_ALPHA, Direction::Imports)?;
    let run = g.rank()?;
    println!("PageRank converged in {} iterations, residual {:.1e}", run.iterations, run.residual);

    let google = pagerank_cheirank(&shares, DEFAULT_ALPHA)?;
    let volume = m.compute_rank_weights()?;
    println!("{:<5} {:>9} {:>9} {:>9} {:>9}", "iso3", "PageRank", "P", "CheiRank", "P*");
    for c in google.order_by_max().into_iter().take(12) {
        println!(
            "{:<5} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            registry.iso3(c),
            google.import_rank[c],
            volume.import_rank[c],
            google.export_rank[c],
            volume.export_rank[c]
        );
    }
    Ok(())
}
