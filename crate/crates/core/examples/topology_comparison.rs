//! Regular, Erdős-Rényi and preferential-attachment networks side by side.
//!
//!     cargo run --example topology_comparison [seed]

use opinion_shield::cli::{cmd_compare_topologies, OutputFormat, Render, RunConfig, TopologyParams};
use opinion_shield::network::GraphModel;

fn main() -> opinion_shield::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = RunConfig::generated(GraphModel::PreferentialAttachment, 20, seed);
    let report = cmd_compare_topologies(&config, 20, TopologyParams::default())?;
    print!("{}", report.render(OutputFormat::Table));
    Ok(())
}
