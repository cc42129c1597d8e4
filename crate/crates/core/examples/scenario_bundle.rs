//! Run a bundled toy scenario over all its years and write the CSV/JSON
//! bundle, as the `wtn scenario` command does.
//!
//!     cargo run --release --example scenario_bundle -- /tmp/toy_bundle

use std::path::{Path, PathBuf};

use wtn::report::{run_scenario, ScenarioConfig};

fn main() -> wtn::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("wtn_toy_bundle"), PathBuf::from);
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/toy_angl_brics.json");
    let mut cfg = ScenarioConfig::load(config)?;
    cfg.n_conf = 100;

    let outcome = run_scenario(&cfg, &out, None)?;
    for year in &outcome.years {
        for share in &year.shares {
            println!(
                "{} {:<6} countries {:.2}  volume {:.2}",
                share.year, share.group, share.country_fraction, share.volume_fraction
            );
        }
    }
    for d in &outcome.diagnostics {
        println!("{}: {} ({})", d.year, d.status, d.message);
    }
    println!("wrote {} files to {}", outcome.files.len(), out.display());
    Ok(())
}
